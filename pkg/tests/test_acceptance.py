"""Acceptance suite: one test per criterion, each with its runtime budget.

Every criterion prints a single ``[PASS]`` or ``[FAIL]`` line; the lines are
collected again in the pytest terminal summary.  Run directly with
``python3 tests/test_acceptance.py`` to print them without pytest.
"""

import time
from fractions import Fraction

import numpy as np
import sympy

from conejacobi import beta_poly, beta_solver, cone_spectrum, cylinder_modes, growth
from conejacobi.cli import build_field_spec

RESULTS = []
SIMONS = cone_spectrum.build_cone(3, 3)


def _report(number, title, budget, check):
    start = time.perf_counter()
    ok, detail = check()
    elapsed = time.perf_counter() - start
    within = elapsed < budget
    status = "PASS" if ok and within else "FAIL"
    line = f"[{status}] criterion {number:2d} {title}: {detail} ({elapsed:.2f} s of {budget:g} s)"
    RESULTS.append(line)
    print(line)
    return ok and within, line


# ------------------------------------------------------------- criteria


def anchor():
    lines = cone_spectrum.spectrum(SIMONS, 1)
    first = lines[0]
    stab = cone_spectrum.strict_stability(SIMONS)
    ok = (
        first.beta == 1
        and isinstance(first.beta, (int, Fraction))
        and first.gamma_plus == -2
        and first.gamma_minus == -3
        and stab.margin == Fraction(1, 4)
    )
    return ok, f"beta_1={first.beta}, gamma+={first.gamma_plus}, gamma-={first.gamma_minus}, margin={stab.margin}"


_b = sympy.Symbol("beta", positive=True)
_r, _y = sympy.symbols("r y")
CLOSED_FORMS = [
    sympy.Integer(1),
    _y,
    _y**2 - _r**2 / (2 + _b),
    _y**3 - 3 * _r**2 * _y / (2 + _b),
    _y**4 - 6 * _r**2 * _y**2 / (2 + _b) + 3 * _r**4 / ((2 + _b) * (4 + _b)),
]


def _sympy_terms(expr):
    poly = sympy.Poly(sympy.expand(expr), _r, _y)
    return {e: Fraction(int(c.p), int(c.q)) for e, c in zip(poly.monoms(), poly.coeffs())}


def closed_forms():
    mismatches = 0
    for q in range(5):
        h = beta_poly.generate(_b, 1, beta_poly.y_power(1, q))
        got = sum(c * _r ** e[0] * _y ** e[1] for e, c in h.full().terms.items())
        mismatches += sympy.cancel(got - CLOSED_FORMS[q]) != 0
        for beta in (1, 2, 5):
            terms = beta_poly.standard_polynomial(beta, 1, q).full().terms
            exact = all(isinstance(c, Fraction) for c in terms.values())
            mismatches += not exact or dict(terms) != _sympy_terms(CLOSED_FORMS[q].subs(_b, beta))
    return mismatches == 0, f"{mismatches} mismatches over q=0..4, symbolic beta and beta in {{1,2,5}}"


def orthogonality():
    worst = 0.0
    for ell in (1, 2):
        for beta in (0.5, 1, 2.5):
            hs = [beta_poly.standard_polynomial(beta, ell, q) for q in range(9)]
            norms = [np.sqrt(beta_poly.sphere_norm_sq(h)) for h in hs]
            for p in range(9):
                for q in range(p + 1, 9):
                    ip = beta_poly.sphere_inner_product(hs[p], hs[q])
                    worst = max(worst, abs(ip) / (norms[p] * norms[q]))
    return worst <= 1e-9, f"max |<h_p,h_q>|/(N_p N_q) = {worst:.1e}"


def growth_law():
    worst = 0.0
    for ell in (1, 2):
        for beta in (1, 2.5):
            for q in range(7):
                h = beta_poly.standard_polynomial(beta, ell, q)
                for rho in (0.25, 0.5, 1.0):
                    law = beta_poly.weighted_ball_l2(h, rho)
                    direct = beta_poly.ball_l2_quadrature(h, ell, beta, rho)
                    worst = max(worst, abs(direct - law) / law)
    return worst <= 1e-6, f"max relative gap {worst:.1e} for q<=6, ell in {{1,2}}"


def solver_convergence():
    grids = (32, 64, 128)
    worst_order = np.inf
    worst_residual = 0.0
    orders = []
    for q in range(5):
        h = beta_poly.standard_polynomial(1, 1, q)
        errs = []
        for n in grids:
            field = beta_solver.solve_dirichlet(1, 1, h, n)
            errs.append(beta_solver.max_error(field, h))
            worst_residual = max(worst_residual, beta_solver.weak_form_residual(field))
        if max(errs) < 1e-12:
            # constants are reproduced exactly, so no order is defined
            orders.append("exact")
            continue
        order = min(np.log2(errs[0] / errs[1]), np.log2(errs[1] / errs[2]))
        orders.append(f"{order:.2f}")
        worst_order = min(worst_order, order)
    ok = worst_order >= 1.8 and worst_residual <= 1e-10
    return ok, f"orders q=0..4 [{', '.join(orders)}], weak-form residual {worst_residual:.1e}"


def completeness():
    rho = 0.5
    h1, h3 = (beta_poly.standard_polynomial(1, 1, q) for q in (1, 3))
    field = beta_solver.sample_field(lambda r, y: h1(r, y) + h3(r, y), 1, 1, 64)
    ex = beta_solver.expand_on_sphere(field, rho, 6)
    expected = np.zeros(7)
    for q, h in ((1, h1), (3, h3)):
        expected[q] = np.sqrt(beta_poly.sphere_norm_sq(h)) * rho**q
    coeff_err = float(np.max(np.abs(np.array(ex.coefficients) - expected)))
    gap = beta_solver.reconstruct(ex).gap
    return coeff_err <= 1e-8 and gap < 1e-4, f"coefficient error {coeff_err:.1e}, sup gap on B_0.5 {gap:.1e}"


def separated_ode():
    steps = (0.2, 0.1, 0.05)
    worst = np.inf
    for j, q in ((1, 2), (1, 4), (2, 3), (3, 2)):
        v = cylinder_modes.synthesize(build_field_spec(3, 3, 1, [(j, q, Fraction(1))])).components[j]
        res = [cylinder_modes.separated_ode_residual(v, SIMONS, j, step=s) for s in steps]
        worst = min(worst, np.polyfit(np.log(steps), np.log(res), 1)[0])
    pure = cylinder_modes.synthesize(build_field_spec(3, 3, 1, [(1, 0, Fraction(1))])).components[1]
    exact = cylinder_modes.separated_ode_residual(pure, SIMONS, 1, step=1e-3)
    return worst >= 1.8 and exact < 1e-8, f"min order {worst:.2f}, r^-2 residual {exact:.1e} at step 1e-3"


def convexity_and_dichotomy():
    rng = np.random.default_rng(20260101)
    ladder = growth.exponent_ladder(cone_spectrum.spectrum(SIMONS, 3), 4)
    t = np.linspace(-6.0, 6.0, 241)
    low = np.inf
    profiles = []
    for i in range(10_000):
        b = rng.random(len(ladder)) * (rng.random(len(ladder)) < 0.6)
        if not b.any():
            b[rng.integers(len(ladder))] = 1.0
        prof = growth.GrowthProfile.analytic(ladder, b * 10.0 ** rng.uniform(-3, 3, len(ladder)))
        low = min(low, growth.psi_convexity(prof, t))
        if i % 100 == 0:
            profiles.append(prof)
    Qs = []
    while len(Qs) < 100:
        Q = 4.0 ** rng.uniform(-0.5, float(ladder[-1]) + 0.5)
        try:
            growth.check_allowed_Q(Q, ladder)
        except ValueError:
            continue
        Qs.append(Q)
    rhos = 2.0 ** np.arange(-6, 7)
    bad = sum(not d.holds for prof in profiles for d in growth.dichotomy_sweep(prof, Qs, rhos))
    checked = len(profiles) * len(Qs) * len(rhos)
    return low >= -1e-9 and bad == 0, f"min psi second difference {low:.1e}, {bad} counterexamples in {checked} checks"


def liouville():
    radii = (1.0001, 1.01, 1.5, 2.0, 10.0, 1e3, 1e6)
    failures = []
    for k in range(1, 10):
        alpha = k / 10
        rep = growth.liouville_gap(alpha, radii)
        exact = rep.margin == 2 - 2 * Fraction(repr(alpha))
        if not (rep.infeasible_beyond_one and not any(rep.feasible) and exact):
            failures.append(alpha)
    return not failures, f"alpha=0.1..0.9 infeasible for R>1 with margin 2-2alpha; failures {failures}"


def stability():
    rng = np.random.default_rng(7)
    passed = 0
    for _ in range(100):
        R = rng.uniform(0.5, 5.0)
        core = np.polynomial.Polynomial(rng.normal(size=rng.integers(1, 6)))
        bump = core * np.polynomial.Polynomial([R, -1]) ** 2
        passed += cone_spectrum.cone_stability_inequality(SIMONS, bump, Fraction(1, 4), support=(0.0, R))
    fn, support = cone_spectrum.destabilizing_test_function(cone_spectrum.build_cone(1, 1))
    unstable_fails = not cone_spectrum.cone_stability_inequality(cone_spectrum.build_cone(1, 1), fn, Fraction(1, 4), support=support)
    return passed == 100 and unstable_fails, f"{passed}/100 radial functions pass on (3,3); (1,1) fails: {unstable_fails}"


CRITERIA = [
    (1, "Simons-cone anchor", 1, anchor),
    (2, "closed-form polynomials", 1, closed_forms),
    (3, "orthogonality", 10, orthogonality),
    (4, "ball growth law", 30, growth_law),
    (5, "solver convergence", 120, solver_convergence),
    (6, "completeness roundtrip", 30, completeness),
    (7, "separated ODE", 30, separated_ode),
    (8, "convexity and dichotomy", 60, convexity_and_dichotomy),
    (9, "Liouville gap", 1, liouville),
    (10, "Hardy and stability", 10, stability),
]


def _make_test(number, title, budget, check):
    def test():
        ok, line = _report(number, title, budget, check)
        assert ok, line

    test.__name__ = f"test_criterion_{number:02d}"
    return test


for _entry in CRITERIA:
    globals()[f"test_criterion_{_entry[0]:02d}"] = _make_test(*_entry)


if __name__ == "__main__":
    outcomes = [_report(*entry)[0] for entry in CRITERIA]
    raise SystemExit(0 if all(outcomes) else 1)
