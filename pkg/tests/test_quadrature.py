import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conejacobi.quadrature import (
    ball_rule,
    gauss_legendre_composite,
    half_sphere_measure,
    half_sphere_moment,
    jacobi_unit_interval,
    sphere_area,
    sphere_rule,
)


def test_composite_legendre_integrates_polynomial():
    x, w = gauss_legendre_composite(1.0, 4.5, nodes_per_unit=8)
    assert_allclose(np.dot(w, x**5), (4.5**6 - 1) / 6, rtol=1e-13)


def test_composite_legendre_rejects_empty_interval():
    with pytest.raises(ValueError):
        gauss_legendre_composite(2.0, 2.0)


@pytest.mark.parametrize("a,b", [(0.5, 0.0), (2.0, 1.5), (0.0, -0.5)])
def test_jacobi_unit_interval_moments(a, b):
    u, w = jacobi_unit_interval(10, a, b)
    # Beta function oracle for int u^(a+k) (1-u)^b
    for k in range(5):
        exact = math.gamma(a + k + 1) * math.gamma(b + 1) / math.gamma(a + k + b + 2)
        assert_allclose(np.dot(w, u**k), exact, rtol=1e-12)


@pytest.mark.parametrize("m", [0, 1, 2, 3])
def test_sphere_rule_area(m):
    pts, w = sphere_rule(m, 6)
    assert_allclose(w.sum(), sphere_area(m), rtol=1e-13)
    assert_allclose(np.linalg.norm(pts, axis=1), 1.0, rtol=1e-13)


def test_sphere_rule_second_moment():
    pts, w = sphere_rule(2, 6)
    # int x^2 over S^2 = 4 pi / 3
    assert_allclose(np.dot(w, pts[:, 0] ** 2), 4 * math.pi / 3, rtol=1e-13)


def test_half_sphere_total_mass_beta_one():
    # ell = 1, beta = 1: int cos^2 over (-pi/2, pi/2)
    meas = half_sphere_measure(1, 1.0, order=8)
    assert_allclose(meas.total_mass, math.pi / 2, rtol=1e-14)


@pytest.mark.parametrize("ell", [1, 2, 3])
@pytest.mark.parametrize("beta", [0.5, 1.0, 2.5])
def test_half_sphere_rule_matches_gamma_moments(ell, beta):
    meas = half_sphere_measure(ell, beta, order=8)
    rng = np.random.default_rng(ell)
    for _ in range(6):
        rp = 2 * int(rng.integers(0, 3))
        ys = [int(v) for v in rng.integers(0, 5, size=ell)]
        vals = meas.nodes[:, 0] ** rp * np.prod(meas.nodes[:, 1:] ** np.array(ys), axis=1)
        assert_allclose(meas.integrate(vals), half_sphere_moment(rp, ys, beta), rtol=1e-11, atol=1e-14)


def test_half_sphere_rejects_bad_input():
    with pytest.raises(ValueError):
        half_sphere_measure(0, 1.0)
    with pytest.raises(ValueError):
        half_sphere_measure(1, -3.0)


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_ball_rule_volume(dim):
    pts, w = ball_rule(dim, 0.0, 6)
    vol = math.pi ** (dim / 2) / math.gamma(dim / 2 + 1)
    assert_allclose(w.sum(), vol, rtol=1e-13)
    assert np.all(np.linalg.norm(pts, axis=1) < 1)
