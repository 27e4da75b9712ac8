import io
import json
from fractions import Fraction

import pytest
from numpy.testing import assert_allclose

from conejacobi import beta_poly, beta_solver, cli, cylinder_modes


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_spectrum_csv_five_lines_beta_one():
    code, out, _ = run("spectrum", "--p", "3", "--q", "3", "--count", "5", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 5
    assert "beta=1" in lines[0].split(",")


def test_spectrum_json_stability():
    code, out, _ = run("spectrum", "--p", "3", "--q", "3")
    doc = json.loads(out)
    assert code == 0
    assert doc["stability"]["classification"] == "strictly_stable"
    assert doc["levels"][0]["beta"] == "1"


def test_poly_h2_coefficient():
    code, out, _ = run("poly", "--ell", "1", "--beta", "1", "--degree", "2")
    assert code == 0
    doc = json.loads(out)
    terms = [t for layer in doc["layers"] for t in layer["terms"]]
    assert any(t["numerator"] == -1 and t["denominator"] == 3 for t in terms)


def test_poly_csv_lists_coefficients():
    code, out, _ = run("poly", "--ell", "1", "--beta", "1", "--degree", "2", "--format", "csv")
    assert code == 0
    assert "-1/3" in out


def test_poly_p0_inline():
    p0 = json.dumps({"terms": [{"multi_index": [4], "numerator": 1, "denominator": 1}]})
    code, out, _ = run("poly", "--ell", "1", "--beta", "2", "--p0", p0)
    assert code == 0
    assert json.loads(out)["q"] == 4


def test_gap_message():
    code, out, _ = run("growth", "gap", "--alpha", "0.5")
    assert code == 0
    assert json.loads(out)["report"] == "infeasible for R>1, margin 1.0"


def test_poly_to_solve_to_expand(tmp_path):
    poly = tmp_path / "h2.json"
    field = tmp_path / "field.csv"
    assert run("poly", "--ell", "1", "--beta", "1", "--degree", "2", "--out", str(poly))[0] == 0
    assert run("solve", "--trace", str(poly), "--grid", "64", "--format", "csv", "--out", str(field))[0] == 0
    code, out, _ = run("expand", "--field", str(field), "--rho", "0.5", "--max-degree", "4")
    assert code == 0
    doc = json.loads(out)
    c = doc["coefficients"]
    n2 = doc["norms"][2]
    assert_allclose(c[2], n2 * 0.25, rtol=5e-3)
    assert max(abs(c[i]) for i in (0, 1, 3, 4)) < 5e-3 * abs(c[2])


def test_solve_json_field_reloads(tmp_path):
    poly = tmp_path / "h1.json"
    run("poly", "--ell", "1", "--beta", "1", "--degree", "1", "--out", str(poly))
    code, out, _ = run("solve", "--trace", str(poly), "--grid", "16")
    assert code == 0
    field = beta_solver.read_field(out)
    assert field.values.shape == (16, 16)


def test_solve_sampled_trace(tmp_path):
    trace = tmp_path / "one.csv"
    trace.write_text("angle,value\n" + "".join(f"{t},1\n" for t in (-1.5, -0.5, 0.0, 0.5, 1.5)))
    code, out, _ = run("solve", "--trace", str(trace), "--ell", "1", "--beta", "1", "--grid", "16")
    assert code == 0
    assert_allclose(beta_solver.read_field(out).values, 1.0, atol=1e-12)


def test_modes_to_growth_fit(tmp_path):
    modes = tmp_path / "modes.json"
    args = ("modes", "--p", "3", "--q", "3", "--modes", "1:0:1,1:2:2", "--radii", "0.25,0.5,0.75,1,1.5,2")
    assert run(*args, "--out", str(modes))[0] == 0
    code, out, _ = run("growth", "fit", "--samples", str(modes))
    assert code == 0
    doc = json.loads(out)
    assert len(doc["coefficients"]) == 2
    spec = cli.build_field_spec(3, 3, 1, [(1, 0, Fraction(1)), (1, 2, Fraction(2))])
    expected = cylinder_modes.analytic_avint(spec).coefficients
    assert_allclose(doc["coefficients"], [float(x) for x in expected], rtol=1e-8)


def test_growth_ladder_and_dichotomy():
    code, out, _ = run("growth", "ladder", "--p", "3", "--q", "3", "--levels", "1", "--max-q", "3")
    assert code == 0
    assert json.loads(out)["ladder"] == [0, 1, 2, 3]
    code, out, _ = run("growth", "dichotomy", "--exponents", "0,1,2", "--coefficients", "1,1,1", "--Q", "2,3,5")
    assert code == 0
    assert json.loads(out)["counterexamples"] == 0


def test_growth_dichotomy_forbidden_q_is_invalid():
    code, _, err = run("growth", "dichotomy", "--exponents", "0,1", "--coefficients", "1,1", "--Q", "4")
    assert code == 1
    assert "forbidden" in err


def test_report_runs():
    code, out, _ = run("report", "--all")
    assert code == 0
    rep = json.loads(out)
    assert rep["spectrum"]["beta_1"] == 1
    assert rep["solver"]["observed_order"] > 1.8


def test_byte_identical_runs():
    first = run("report", "--all", "--seed", "7", "--format", "csv")
    second = run("report", "--all", "--seed", "7", "--format", "csv")
    assert first == second
    a = run("modes", "--modes", "1:0,2:1:1/2")
    assert a == run("modes", "--modes", "1:0,2:1:1/2")


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# spectrum defaults\ncount = 3\nformat = csv\n")
    code, out, _ = run("--config", str(cfg), "spectrum")
    assert code == 0
    assert len(out.strip().splitlines()) == 3
    code, out, _ = run("--config", str(cfg), "spectrum", "--count", "2")
    assert len(out.strip().splitlines()) == 2


@pytest.mark.parametrize(
    "text, needle",
    [("nonsense line\n", "config"), ("colour = red\n", "unknown config keys")],
)
def test_malformed_config(tmp_path, text, needle):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(text)
    code, _, err = run("--config", str(cfg), "spectrum")
    assert code == 1
    assert needle in err


def test_validation_errors_exit_one(tmp_path):
    assert run("spectrum", "--bogus")[0] == 1
    assert run()[0] == 1
    assert run("expand", "--field", str(tmp_path / "missing.csv"))[0] == 1
    assert run("poly", "--ell", "1", "--beta", "-1", "--degree", "2")[0] == 1
    code, _, err = run("spectrum", "--out", str(tmp_path / "no" / "such" / "dir.csv"))
    assert code == 1
    assert "cannot write" in err


def test_distinct_diagnostics(tmp_path):
    errs = {
        run("spectrum", "--bogus")[2],
        run("spectrum", "--out", str(tmp_path / "x" / "y"))[2],
        run("--config", str(tmp_path / "absent.cfg"), "spectrum")[2],
    }
    assert len(errs) == 3


def test_solver_failure_exits_two(monkeypatch, tmp_path):
    poly = tmp_path / "h2.json"
    run("poly", "--ell", "1", "--beta", "1", "--degree", "2", "--out", str(poly))

    def fail(*args, **kwargs):
        raise beta_solver.SolverError("no convergence", 17, 1e-3)

    monkeypatch.setattr(beta_solver, "solve_dirichlet", fail)
    code, _, err = run("solve", "--trace", str(poly))
    assert code == 2
    assert "iterations=17" in err


def test_solver_iteration_cap_raises():
    field_args = dict(beta=1, ell=1, boundary_trace=beta_poly.standard_polynomial(1, 1, 2), grid=32, maxiter=3)
    with pytest.raises(beta_solver.SolverError) as info:
        beta_solver.solve_dirichlet(**field_args)
    assert info.value.iterations == 3

