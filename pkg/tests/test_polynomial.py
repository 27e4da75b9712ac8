from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from conejacobi.polynomial import Poly

x = Poly.monomial((1, 0))
y = Poly.monomial((0, 1))


def test_arithmetic_and_equality():
    p = (x + y) ** 2
    assert p == x * x + 2 * x * y + y * y
    assert p - p == Poly.zero(2)
    assert (p * 0).is_zero()


def test_integer_coefficients_become_fractions():
    p = Poly(1, {(2,): 3})
    assert isinstance(p.terms[(2,)], Fraction)


def test_diff_and_laplacian():
    p = x**3 * y**2
    assert p.diff(0) == 3 * x**2 * y**2
    assert p.laplacian() == 6 * x * y**2 + 2 * x**3


def test_embed_shifts_variables():
    p = Poly.monomial((2,)).embed(3, 1)
    assert p.terms == {(0, 2, 0): 1}


def test_rejects_bad_exponents():
    with pytest.raises(ValueError):
        Poly(2, {(1,): 1})
    with pytest.raises(ValueError):
        Poly(1, {(-1,): 1})
    with pytest.raises(ValueError):
        x + Poly.monomial((1,))


def test_homogeneity_and_degree():
    assert (x * y + y * y).is_homogeneous()
    assert not (x + y * y).is_homogeneous()
    assert (x + y * y).degree == 2
    assert Poly.zero(2).degree == -1


def test_numeric_evaluation_broadcasts():
    p = x * x - Fraction(1, 3) * y
    a = np.linspace(0, 1, 5)
    assert_allclose(p(a, 2.0), a * a - 2.0 / 3.0)


coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=7)
polys = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), coeffs, max_size=5).map(lambda d: Poly(2, d))


@settings(max_examples=50, deadline=None)
@given(polys, polys, polys)
def test_ring_laws(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert (a * b).laplacian() == a.laplacian() * b + 2 * (a.diff(0) * b.diff(0) + a.diff(1) * b.diff(1)) + a * b.laplacian()
