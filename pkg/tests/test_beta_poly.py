from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from conejacobi.beta_poly import (
    apply_beta_laplacian,
    as_beta,
    ball_l2_quadrature,
    ball_l2_series,
    from_json,
    generate,
    radial_power,
    sphere_inner_product,
    sphere_inner_product_moments,
    sphere_norm_sq,
    spherical_eigen_check,
    standard_polynomial,
    to_json,
    weighted_ball_l2,
    y_power,
)
from conejacobi.polynomial import Poly

b = sympy.Symbol("beta", positive=True)
r, y = sympy.symbols("r y")
CLOSED_FORMS = [
    1,
    y,
    y**2 - r**2 / (2 + b),
    y**3 - 3 * r**2 * y / (2 + b),
    y**4 - 6 * r**2 * y**2 / (2 + b) + 3 * r**4 / ((2 + b) * (4 + b)),
]


def _as_sympy(h):
    return sum(c * r ** e[0] * y ** e[1] for e, c in h.full().terms.items())


@pytest.mark.parametrize("q", range(5))
def test_symbolic_closed_forms(q):
    h = generate(b, 1, y_power(1, q))
    assert sympy.simplify(_as_sympy(h) - CLOSED_FORMS[q]) == 0


@pytest.mark.parametrize("beta", [1, 2, 5])
@pytest.mark.parametrize("q", range(5))
def test_rational_closed_forms(beta, q):
    h = standard_polynomial(beta, 1, q)
    expected = sympy.Poly(sympy.expand(sympy.sympify(CLOSED_FORMS[q]).subs(b, beta)), r, y)
    got = {e: c for e, c in h.full().terms.items()}
    assert all(isinstance(c, Fraction) for c in got.values())
    assert got == {e: Fraction(int(c.p), int(c.q)) for e, c in zip(expected.monoms(), expected.coeffs())}


def test_h2_coefficient_for_beta_one():
    assert standard_polynomial(1, 1, 2).full().terms[(2, 0)] == Fraction(-1, 3)


def _random_p0(draw, ell, q):
    terms = {}
    for _ in range(draw(st.integers(1, 4))):
        exps = [0] * ell
        for _ in range(q):
            exps[draw(st.integers(0, ell - 1))] += 1
        terms[tuple(exps)] = draw(st.fractions(min_value=-9, max_value=9, max_denominator=11))
    return Poly(ell, terms)


@st.composite
def beta_polys(draw):
    ell = draw(st.integers(1, 3))
    q = draw(st.integers(0, 10))
    beta = draw(st.fractions(min_value=Fraction(1, 10), max_value=9, max_denominator=12))
    return beta, ell, _random_p0(draw, ell, q)


@settings(max_examples=60, deadline=None)
@given(beta_polys())
def test_generated_polynomials_are_beta_harmonic(data):
    beta, ell, p0 = data
    h = generate(beta, ell, p0)
    assert apply_beta_laplacian(h, beta).is_zero()
    assert h.leading_layer == p0
    # homogeneous of the declared degree
    assert h.full().is_homogeneous()


@settings(max_examples=30, deadline=None)
@given(beta_polys())
def test_json_roundtrip(data):
    h = generate(*data)
    assert from_json(to_json(h)) == h
    assert to_json(from_json(to_json(h))) == to_json(h)


def test_generate_rejects_bad_input():
    with pytest.raises(ValueError):
        generate(1, 1, Poly(1, {(2,): 1, (0,): 1}))
    with pytest.raises(ValueError):
        generate(0, 1, y_power(1, 2))
    with pytest.raises(ValueError):
        generate(-1, 1, y_power(1, 2))
    with pytest.raises(ValueError):
        generate(1, 2, y_power(1, 2))
    with pytest.raises(ValueError):
        radial_power(2, 3)


def test_zero_leading_layer_gives_zero():
    h = generate(1, 2, Poly.zero(2))
    assert h.is_zero()


def test_beta_laplacian_rejects_odd_r():
    with pytest.raises(ValueError):
        apply_beta_laplacian(Poly.monomial((1, 0)), 1)


def test_beta_laplacian_of_monomial():
    # Delta_beta r^4 = 4 (4 + beta) r^2
    out = apply_beta_laplacian(Poly.monomial((4, 0)), Fraction(3, 2))
    assert out.terms == {(2, 0): Fraction(22)}


def test_as_beta_normalisation():
    assert as_beta(0.5) == Fraction(1, 2)
    assert as_beta("5/2") == Fraction(5, 2)
    assert isinstance(as_beta(np.sqrt(2.0)), float)


@pytest.mark.parametrize("ell", [1, 2])
@pytest.mark.parametrize("beta", [0.5, 1, 2.5])
def test_orthogonality(ell, beta):
    hs = [standard_polynomial(beta, ell, q) for q in range(9)]
    norms = [np.sqrt(sphere_norm_sq(h)) for h in hs]
    for p in range(9):
        for q in range(p + 1, 9):
            assert abs(sphere_inner_product(hs[p], hs[q])) <= 1e-9 * norms[p] * norms[q]


def test_quadrature_inner_product_matches_moments():
    h = standard_polynomial(Fraction(3, 2), 2, 4)
    g = generate(Fraction(3, 2), 2, Poly(2, {(4, 0): 1, (2, 2): -3}))
    assert_allclose(sphere_inner_product(h, g, check=False), sphere_inner_product_moments(h, g, 1.5), rtol=1e-12)


@pytest.mark.parametrize("ell", [1, 3])
@pytest.mark.parametrize("q", [1, 2, 5, 8])
def test_spherical_eigen_identity(ell, q):
    assert spherical_eigen_check(standard_polynomial(Fraction(3, 2), ell, q)) < 1e-10


def test_spherical_eigen_identity_radial_data():
    assert spherical_eigen_check(generate(1, 2, radial_power(2, 4))) < 1e-10


@pytest.mark.parametrize("q", range(7))
@pytest.mark.parametrize("R", [0.25, 0.5, 1.0])
def test_ball_l2_growth_law(q, R):
    h = standard_polynomial(1, 1, q)
    direct = ball_l2_quadrature(lambda rr, yy: h(rr, yy), 1, 1.0, R, order=12)
    assert_allclose(direct, weighted_ball_l2(h, R), rtol=1e-10)


def test_ball_l2_of_sum_has_no_cross_terms():
    hs = [standard_polynomial(2, 2, q) for q in (1, 2, 3)]
    c = [0.3, -1.2, 0.7]

    def fn(rr, yy):
        return sum(ci * h(rr, yy) for ci, h in zip(c, hs))

    assert_allclose(ball_l2_quadrature(fn, 2, 2.0, 0.8), ball_l2_series(hs, c, 0.8), rtol=1e-10)


def test_ball_l2_rejects_nonpositive_radius():
    with pytest.raises(ValueError):
        weighted_ball_l2(standard_polynomial(1, 1, 1), 0.0)


def test_to_json_rejects_symbolic_beta():
    with pytest.raises(TypeError):
        to_json(generate(b, 1, y_power(1, 2)))
