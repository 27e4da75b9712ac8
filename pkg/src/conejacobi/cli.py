"""Command-line front end.

Every subcommand writes JSON (default) or CSV to ``--out`` or stdout.
Exit status: 0 on success, 1 on invalid input, 2 on a numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import beta_poly, beta_solver, cone_spectrum, cylinder_modes, growth
from .polynomial import Poly

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERICAL = 2


class CliError(Exception):
    def __init__(self, message, code=EXIT_INVALID):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(f"usage error: {message}")


def _jsonable(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else str(x)
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _dump_json(obj):
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _num(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else str(x.numerator)
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _float_list(text):
    try:
        return [float(x) for x in str(text).replace(";", ",").split(",") if x.strip()]
    except ValueError:
        raise CliError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _read(path):
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _parse_config(path):
    cfg = {}
    for lineno, raw in enumerate(_read(path).splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, val = line.partition("=")
        if not sep or not key.strip():
            raise CliError(f"malformed config line {lineno} in {path}: {raw!r}")
        cfg[key.strip().replace("-", "_")] = val.strip()
    return cfg


# ---------------------------------------------------------------- spectrum


def cmd_spectrum(args):
    cone = cone_spectrum.build_cone(args.p, args.q)
    lines = cone_spectrum.spectrum(cone, args.count)
    if args.format == "csv":
        return cone_spectrum.export_spectrum(lines, keyed=True)
    stab = cone_spectrum.strict_stability(cone)
    doc = {
        "cone": {"p": cone.p, "q": cone.q, "n": cone.n, "a_sq": cone.a_sq, "b_sq": cone.b_sq, "second_ff_sq": cone.second_ff_sq},
        "stability": {"classification": stab.classification, "margin": stab.margin, "lambda_1": stab.lambda_1},
        "levels": [dict(zip(cone_spectrum.SPECTRUM_COLUMNS, row)) for row in cone_spectrum.spectrum_rows(lines)],
    }
    return _dump_json(doc)


# -------------------------------------------------------------------- poly


def _parse_p0(text, ell):
    """``--p0`` accepts a polynomial JSON document (inline or a file path):
    either ``{"terms": [...]}`` in the multi_index/numerator/denominator form
    or a full beta-polynomial document, whose leading layer is used."""
    if not text.lstrip().startswith("{"):
        text = _read(text)
    try:
        doc = json.loads(text)
        if "layers" in doc:
            poly = beta_poly.from_json(doc).leading_layer
        else:
            poly = beta_poly._parse_terms(doc["terms"], int(doc.get("ell", ell)))
    except (json.JSONDecodeError, KeyError, TypeError, ZeroDivisionError) as exc:
        raise CliError(f"cannot parse --p0: {exc}") from None
    if poly.nvars != ell:
        raise CliError(f"--p0 has {poly.nvars} variables but --ell is {ell}")
    return poly


def cmd_poly(args):
    beta = beta_poly.as_beta(args.beta)
    if args.p0 is not None:
        p0 = _parse_p0(args.p0, args.ell)
        if args.degree is not None and not p0.is_zero() and p0.degree != args.degree:
            raise CliError(f"--p0 has degree {p0.degree}, --degree says {args.degree}")
    else:
        if args.degree is None:
            raise CliError("poly needs --degree or --p0")
        p0 = beta_poly.y_power(args.ell, args.degree)
    h = beta_poly.generate(beta, args.ell, p0)
    if args.format == "csv":
        header = ["r"] + [f"y{i + 1}" for i in range(h.ell)] + ["coefficient"]
        full = h.full()
        rows = [list(e) + [_num(Fraction(full.terms[e]))] for e in sorted(full.terms, reverse=True)]
        return _csv(header, rows)
    return json.dumps(json.loads(beta_poly.to_json(h)), indent=2, sort_keys=True) + "\n"


# ------------------------------------------------------------------- solve


def _load_trace(path, ell, beta):
    text = _read(path)
    if text.lstrip().startswith("{"):
        try:
            h = beta_poly.from_json(text)
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise CliError(f"cannot parse trace {path}: {exc}") from None
        if ell is not None and h.ell != ell:
            raise CliError(f"trace has ell={h.ell}, --ell is {ell}")
        if beta is not None and float(h.beta) != float(beta):
            raise CliError(f"trace has beta={h.beta}, --beta is {beta}")
        return h, h.ell, float(h.beta)
    if ell is None or beta is None:
        raise CliError("sampled traces need --ell and --beta")
    rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].startswith("#")]
    try:
        data = np.array([[float(x) for x in r[:2]] for r in rows if r[0].strip() not in ("angle", "theta")])
    except ValueError:
        raise CliError(f"trace {path} must hold 'angle,value' rows") from None
    if data.ndim != 2 or len(data) < 4:
        raise CliError(f"trace {path} needs at least four samples")
    return (data[:, 0], data[:, 1]), ell, float(beta)


def cmd_solve(args):
    trace, ell, beta = _load_trace(args.trace, args.ell, args.beta)
    field = beta_solver.solve_dirichlet(beta, ell, trace, grid=args.grid)
    if args.format == "csv":
        return beta_solver.export_field(field)
    return _dump_json(beta_solver.field_to_dict(field))


# ------------------------------------------------------------------ expand


def cmd_expand(args):
    field = beta_solver.read_field(_read(args.field))
    ex = beta_solver.expand_on_sphere(field, args.rho, args.max_degree)
    rec = beta_solver.reconstruct(ex)
    if args.format == "csv":
        return _csv(["q", "coefficient", "norm"], [[q, repr(c), repr(n)] for q, c, n in zip(ex.degrees, ex.coefficients, ex.norms)])
    doc = {
        "rho": ex.rho,
        "beta": ex.beta,
        "ell": ex.ell,
        "degrees": ex.degrees,
        "coefficients": ex.coefficients,
        "norms": ex.norms,
        "trace_norm_sq": ex.trace_norm_sq,
        "residual": ex.residual,
        "reconstruction_gap": rec.gap,
    }
    return _dump_json(doc)


# ------------------------------------------------------------------- modes


def _parse_modes(text):
    modes = []
    for item in str(text).replace(";", ",").split(","):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        if len(parts) not in (2, 3):
            raise CliError(f"mode {item!r} must read j:q or j:q:amplitude")
        try:
            j, q = int(parts[0]), int(parts[1])
            amp = Fraction(parts[2]) if len(parts) == 3 else Fraction(1)
        except ValueError:
            raise CliError(f"mode {item!r} must read j:q or j:q:amplitude") from None
        modes.append((j, q, amp))
    return modes


def build_field_spec(p, q, ell, modes):
    cone = cone_spectrum.build_cone(p, q)
    top = max((j for j, _, _ in modes), default=1)
    lines = {s.j: s for s in cone_spectrum.spectrum(cone, top)}
    out = []
    for j, deg, amp in modes:
        if j < 1:
            raise CliError("spectral index j starts at 1")
        line = lines[j]
        if isinstance(line.beta, complex):
            raise CliError(f"level j={j} has complex exponents")
        out.append(cylinder_modes.Mode(j, beta_poly.standard_polynomial(line.beta, ell, deg), amp))
    return cylinder_modes.JacobiFieldSpec(cone, ell, out)


def cmd_modes(args):
    spec = build_field_spec(args.p, args.q, args.ell, _parse_modes(args.modes))
    radii = _float_list(args.radii)
    prof = cylinder_modes.avint_profile(spec, radii)
    if args.format == "csv":
        return cylinder_modes.export_profile(prof)
    doc = {
        "cone": {"p": args.p, "q": args.q},
        "ell": args.ell,
        "modes": [{"j": m.j, "q": m.q, "amplitude": Fraction(m.amplitude)} for m in spec.modes],
        "rho": prof.radii,
        "avint_analytic": prof.analytic,
        "avint_quadrature": prof.quadrature,
        "relative_gap": prof.relative_gap,
        "profile": {"exponents": prof.profile.exponents, "coefficients": prof.profile.coefficients},
    }
    return _dump_json(doc)


# ------------------------------------------------------------------ growth


def _exponent(x):
    return Fraction(x) if isinstance(x, (int, str)) else float(x)


def _profile_from_args(args):
    if args.exponents is None or args.coefficients is None:
        raise CliError("give --exponents and --coefficients")
    try:
        qs = [Fraction(x.strip()) for x in args.exponents.split(",") if x.strip()]
    except ValueError:
        raise CliError("--exponents must be numbers or fractions") from None
    bs = _float_list(args.coefficients)
    return growth.GrowthProfile.analytic(qs, bs)


def _read_samples(path):
    text = _read(path)
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        try:
            radii = doc["rho"]
            values = doc.get("avint_quadrature", doc.get("values"))
        except KeyError:
            raise CliError(f"{path} lacks 'rho' samples") from None
        ladder = doc.get("profile", {}).get("exponents")
        return growth.GrowthProfile.sampled(radii, values, provenance=str(path)), ladder
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    header = rows[0]
    col = header.index("avint_quadrature") if "avint_quadrature" in header else 1
    data = np.array([[float(r[0]), float(r[col])] for r in rows[1:]])
    return growth.GrowthProfile.sampled(data[:, 0], data[:, 1], provenance=str(path)), None


def cmd_growth(args):
    kind = args.analysis
    if kind == "ladder":
        cone = cone_spectrum.build_cone(args.p, args.q)
        lad = growth.exponent_ladder(cone_spectrum.spectrum(cone, args.levels), args.max_q)
        if args.format == "csv":
            return _csv(["i", "q_i"], [[i + 1, _num(x)] for i, x in enumerate(lad)])
        return _dump_json({"cone": {"p": args.p, "q": args.q}, "levels": args.levels, "max_q": args.max_q, "ladder": lad})
    if kind == "convexity":
        prof = _profile_from_args(args)
        t = np.linspace(args.t_min, args.t_max, args.points)
        low = growth.psi_convexity(prof, t)
        if args.format == "csv":
            d2 = prof.psi(t[1:-1] + (t[1] - t[0])) - 2 * prof.psi(t[1:-1]) + prof.psi(t[1:-1] - (t[1] - t[0]))
            return _csv(["t", "psi", "second_difference"], [[repr(a), repr(float(prof.psi(a))), repr(float(b))] for a, b in zip(t[1:-1], d2)])
        return _dump_json({"min_second_difference": low, "convex": low >= -1e-9})
    if kind == "dichotomy":
        prof = _profile_from_args(args)
        res = growth.dichotomy_sweep(prof, _float_list(args.Q), _float_list(args.rho))
        if args.format == "csv":
            return growth.export_sweep(res)
        return _dump_json(
            {
                "rows": [
                    {"Q": d.Q, "rho": d.rho, "ratio_small": d.ratio_small, "ratio_large": d.ratio_large, "premise": d.premise, "conclusion": d.conclusion}
                    for d in res
                ],
                "counterexamples": sum(not d.holds for d in res),
            }
        )
    if kind == "gap":
        radii = _float_list(args.radii) if args.radii else (0.5, 1.0, 2.0, 4.0, 8.0, 16.0)
        rep = growth.liouville_gap(args.alpha, radii)
        if args.format == "csv":
            return _csv(["R", "lower", "upper", "feasible"], [[repr(R), repr(lo), repr(up), str(f).lower()] for R, lo, up, f in zip(rep.radii, rep.lower, rep.upper, rep.feasible)])
        return _dump_json(
            {"alpha": rep.alpha, "margin": rep.margin, "report": rep.message, "infeasible_for_R_gt_1": rep.infeasible_beyond_one, "R": rep.radii, "feasible": rep.feasible}
        )
    if kind == "fit":
        samples, file_ladder = _read_samples(args.samples)
        if args.ladder:
            ladder = [Fraction(x.strip()) for x in args.ladder.split(",") if x.strip()]
        elif file_ladder:
            ladder = [_exponent(x) for x in file_ladder]
        else:
            raise CliError("fit needs --ladder (the samples carry none)")
        fit = growth.fit_exponents(samples, ladder)
        if args.format == "csv":
            return _csv(["q_i", "b_i_sq"], [[_num(q), repr(b)] for q, b in zip(fit.ladder, fit.coefficients)])
        return _dump_json(
            {"ladder": fit.ladder, "coefficients": fit.coefficients, "residual": fit.residual, "condition": fit.condition, "ill_conditioned": fit.ill_conditioned}
        )
    raise CliError(f"unknown growth analysis {kind!r}")


# ------------------------------------------------------------------ report


def build_report(seed, grid=32):
    """Summary of the main checks; deterministic for a given seed."""
    rng = np.random.default_rng(seed)
    simons = cone_spectrum.build_cone(3, 3)
    lines = cone_spectrum.spectrum(simons, 4)
    stab = cone_spectrum.strict_stability(simons)
    rep = {"seed": seed}
    rep["spectrum"] = {
        "beta_1": lines[0].beta,
        "gamma_1_plus": lines[0].gamma_plus,
        "gamma_1_minus": lines[0].gamma_minus,
        "stability_margin": stab.margin,
        "classification": stab.classification,
        "unstable_cone_1_1": cone_spectrum.strict_stability(cone_spectrum.build_cone(1, 1)).classification,
    }
    hs = [beta_poly.standard_polynomial(1, 1, q) for q in range(5)]
    worst = 0.0
    for a in range(5):
        for b in range(a + 1, 5):
            ip = beta_poly.sphere_inner_product(hs[a], hs[b])
            worst = max(worst, abs(ip) / np.sqrt(beta_poly.sphere_norm_sq(hs[a]) * beta_poly.sphere_norm_sq(hs[b])))
    rep["polynomials"] = {"h2_r2_coefficient": hs[2].full().terms[(2, 0)], "max_normalised_inner_product": worst}
    errs = []
    for n in (grid, 2 * grid):
        f = beta_solver.solve_dirichlet(1, 1, hs[2], n)
        errs.append(beta_solver.max_error(f, hs[2]))
    rep["solver"] = {"grids": [grid, 2 * grid], "max_error": errs, "observed_order": float(np.log2(errs[0] / errs[1])), "weak_form_residual": beta_solver.weak_form_residual(f)}
    spec = build_field_spec(3, 3, 1, [(1, 0, Fraction(1)), (1, 1, Fraction(1)), (2, 0, Fraction(1, 2))])
    radii = [0.125, 0.25, 0.5, 1.0, 2.0]
    av = cylinder_modes.avint_profile(spec, radii)
    rep["modes"] = {"rho": radii, "avint_analytic": av.analytic, "max_relative_gap": max(av.relative_gap)}
    lad = growth.exponent_ladder(lines[:2], 3)
    low = np.inf
    for _ in range(200):
        b = rng.random(len(lad))
        low = min(low, growth.psi_convexity(growth.GrowthProfile.analytic(lad, b)))
    gap = growth.liouville_gap(0.5)
    rep["growth"] = {"ladder": lad, "min_psi_second_difference": low, "liouville": gap.message}
    return rep


def cmd_report(args):
    if not args.all:
        raise CliError("report needs --all")
    rep = build_report(args.seed)
    if args.format == "csv":
        rows = []
        for section in sorted(k for k in rep if k != "seed"):
            for key, val in sorted(rep[section].items()):
                rows.append([section, key, json.dumps(_jsonable(val))])
        return _csv(["section", "key", "value"], rows)
    return _dump_json(rep)


# ------------------------------------------------------------------ parser


def _add_globals(p, suppress):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--format", choices=("json", "csv"), default=d("json"))
    p.add_argument("--out", default=d(None), help="output path (default: stdout)")
    p.add_argument("--seed", type=int, default=d(0))
    p.add_argument("--config", default=d(None), help="flat key=value file; flags override it")


def build_parser():
    parser = _Parser(prog="conejacobi", description="Jacobi spectra, beta-harmonic analysis and growth laws")
    _add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    subs = {}

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        _add_globals(p, suppress=True)
        p.set_defaults(func=fn)
        subs[name] = p
        return p

    p = add("spectrum", cmd_spectrum, "Jacobi spectrum of the cone over S^p x S^q")
    p.add_argument("--p", type=int, default=3)
    p.add_argument("--q", type=int, default=3)
    p.add_argument("--count", type=int, default=5)

    p = add("poly", cmd_poly, "beta-harmonic polynomial from its leading layer")
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--beta", default="1")
    p.add_argument("--degree", type=int, default=None)
    p.add_argument("--p0", default=None, help="JSON polynomial (inline or path)")

    p = add("solve", cmd_solve, "weighted Dirichlet problem on the half-ball")
    p.add_argument("--ell", type=int, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--trace", required=False, default=None, help="poly JSON or 'angle,value' CSV")

    p = add("expand", cmd_expand, "project a field onto beta-harmonic traces")
    p.add_argument("--field", default=None)
    p.add_argument("--rho", type=float, default=0.5)
    p.add_argument("--max-degree", type=int, default=6)

    p = add("modes", cmd_modes, "averaged L^2 profile of a Jacobi field")
    p.add_argument("--p", type=int, default=3)
    p.add_argument("--q", type=int, default=3)
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--modes", default="1:0:1", help="j:q[:amplitude],...")
    p.add_argument("--radii", default="0.125,0.25,0.5,1,2")

    p = add("growth", cmd_growth, "growth-profile analyses")
    p.add_argument("analysis", choices=("ladder", "convexity", "dichotomy", "gap", "fit"))
    p.add_argument("--p", type=int, default=3)
    p.add_argument("--q", type=int, default=3)
    p.add_argument("--levels", type=int, default=2)
    p.add_argument("--max-q", type=int, default=3)
    p.add_argument("--exponents", default=None)
    p.add_argument("--coefficients", default=None)
    p.add_argument("--t-min", type=float, default=-5.0)
    p.add_argument("--t-max", type=float, default=5.0)
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--Q", default="2")
    p.add_argument("--rho", default="0.5,1,2,4")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--radii", default=None)
    p.add_argument("--samples", default=None)
    p.add_argument("--ladder", default=None)

    p = add("report", cmd_report, "summary report")
    p.add_argument("--all", action="store_true")
    return parser, subs


_REQUIRED = {"solve": ("trace",), "expand": ("field",)}
_FILE_ARGS = {"growth": {"fit": ("samples",)}}


def _apply_config(parser, subs, argv):
    pre = _Parser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    cfg = _parse_config(known.config)
    globals_ = {k: cfg.pop(k) for k in ("format", "out", "seed") if k in cfg}
    if "seed" in globals_:
        try:
            globals_["seed"] = int(globals_["seed"])
        except ValueError:
            raise CliError(f"config seed must be an integer, got {globals_['seed']!r}") from None
    parser.set_defaults(**globals_)
    for p in subs.values():
        known_dests = {a.dest: a for a in p._actions}
        sub_cfg = {}
        for k, v in cfg.items():
            if k in known_dests:
                action = known_dests[k]
                try:
                    sub_cfg[k] = action.type(v) if action.type else (v.lower() in ("1", "true", "yes") if action.const is True else v)
                except ValueError:
                    raise CliError(f"config value for {k} is invalid: {v!r}") from None
        p.set_defaults(**sub_cfg)
    all_dests = {a.dest for p in subs.values() for a in p._actions} | {"command"}
    unknown = set(cfg) - all_dests
    if unknown:
        raise CliError(f"unknown config keys: {', '.join(sorted(unknown))}")


def run(argv=None, stdout=None, stderr=None):
    """Run the command line; returns the exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    try:
        _apply_config(parser, subs, argv)
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            raise CliError("missing subcommand (spectrum, poly, solve, expand, modes, growth, report)")
        for name in _REQUIRED.get(args.command, ()):
            if getattr(args, name) is None:
                raise CliError(f"{args.command} needs --{name}")
        if args.command == "growth" and args.analysis == "fit" and args.samples is None:
            raise CliError("growth fit needs --samples")
        np.random.seed(args.seed)
        text = args.func(args)
        if args.out:
            try:
                Path(args.out).write_text(text)
            except OSError as exc:
                raise CliError(f"cannot write output {args.out}: {exc.strerror}") from None
        else:
            stdout.write(text)
    except CliError as exc:
        stderr.write(f"error: {exc}\n")
        return exc.code
    except beta_solver.SolverError as exc:
        stderr.write(f"numerical failure: {exc} (iterations={exc.iterations})\n")
        return EXIT_NUMERICAL
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    except (ValueError, TypeError, KeyError) as exc:
        stderr.write(f"invalid input: {exc}\n")
        return EXIT_INVALID
    return EXIT_OK


def main():
    sys.exit(run())
