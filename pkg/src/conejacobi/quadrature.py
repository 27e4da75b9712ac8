"""Quadrature rules used across the package.

Everything here is built on Gauss-Jacobi nodes from :mod:`scipy.special`.
The half-sphere rule absorbs the singular weight ``omega_1**(1 + beta)``
exactly, so integrals of polynomial traces are computed without
discretisation error once enough nodes are requested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, roots_jacobi, roots_legendre


def gauss_legendre_composite(a, b, nodes_per_unit=64):
    """Composite Gauss-Legendre rule on ``[a, b]``.

    The interval is split into ``ceil(b - a)`` panels of equal length with
    ``nodes_per_unit`` nodes each (one panel if ``b - a < 1``).
    """
    if not b > a:
        raise ValueError(f"empty interval [{a}, {b}]")
    panels = max(1, math.ceil(b - a - 1e-12))
    x, w = roots_legendre(nodes_per_unit)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


@lru_cache(maxsize=256)
def _jacobi01(n, a, b):
    # nodes/weights on [0, 1] for the weight u**a * (1 - u)**b
    x, w = roots_jacobi(n, b, a)
    u = 0.5 * (x + 1.0)
    w = w / 2.0 ** (a + b + 1.0)
    u.setflags(write=False)
    w.setflags(write=False)
    return u, w


def jacobi_unit_interval(n, a, b):
    """Gauss-Jacobi rule on ``[0, 1]`` for the weight ``u**a * (1 - u)**b``."""
    return _jacobi01(int(n), float(a), float(b))


@lru_cache(maxsize=64)
def _sphere_rule(m, n):
    if m == 0:
        pts = np.array([[1.0], [-1.0]])
        wts = np.array([1.0, 1.0])
    else:
        # last coordinate t has weight (1 - t^2)^((m - 2)/2) on S^m
        alpha = 0.5 * (m - 2)
        t, wt = roots_jacobi(n, alpha, alpha)
        inner_pts, inner_wts = _sphere_rule(m - 1, n)
        scale = np.sqrt(1.0 - t * t)
        pts = np.concatenate(
            [
                np.repeat(scale, len(inner_wts))[:, None] * np.tile(inner_pts, (n, 1)),
                np.repeat(t, len(inner_wts))[:, None],
            ],
            axis=1,
        )
        wts = np.repeat(wt, len(inner_wts)) * np.tile(inner_wts, n)
    pts.setflags(write=False)
    wts.setflags(write=False)
    return pts, wts


def sphere_rule(m, n):
    """Product rule on the unit sphere ``S^m`` in ``R^(m+1)``.

    Exact for polynomials of degree ``<= 2n - 1`` in the ambient coordinates.
    """
    if m < 0:
        raise ValueError("sphere dimension must be >= 0")
    return _sphere_rule(int(m), int(n))


def sphere_area(m):
    """Surface area of the unit sphere ``S^m``."""
    return 2.0 * math.pi ** ((m + 1) / 2) / math.gamma((m + 1) / 2)


@dataclass(frozen=True)
class HalfSphereMeasure:
    """The weighted measure ``omega_1**(1+beta) dmu`` on the open half-sphere.

    ``nodes`` has shape ``(N, ell + 1)``; column 0 is ``omega_1`` (the ``r``
    direction), the remaining columns are the ``y`` directions.
    """

    ell: int
    beta: float
    order: int
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def total_mass(self):
        return float(self.weights.sum())

    def integrate(self, values):
        return float(np.dot(self.weights, values))


def half_sphere_measure(ell, beta, order=16):
    """Build the quadrature for ``dnu_+ = omega_1**(1+beta) dmu`` on ``S^ell_+``.

    Writing ``omega_1 = sqrt(u)`` and ``y = sqrt(1 - u) * sigma`` with
    ``sigma`` on ``S^(ell-1)``, the measure becomes
    ``u**(beta/2) (1-u)**((ell-2)/2) du dsigma / 2``.  Gauss-Jacobi in ``u``
    and the product rule on ``S^(ell-1)`` make the rule exact for traces of
    polynomials that are even in ``r`` and of degree ``< 2 * order`` in ``y``.
    """
    if ell < 1:
        raise ValueError("ell must be >= 1")
    if not beta > -2:
        raise ValueError("beta must exceed -2 for a finite measure")
    u, wu = jacobi_unit_interval(order, beta / 2.0, (ell - 2) / 2.0)
    sig, wsig = sphere_rule(ell - 1, order)
    omega1 = np.repeat(np.sqrt(u), len(wsig))
    ys = np.repeat(np.sqrt(1.0 - u), len(wsig))[:, None] * np.tile(sig, (len(u), 1))
    nodes = np.concatenate([omega1[:, None], ys], axis=1)
    weights = 0.5 * np.repeat(wu, len(wsig)) * np.tile(wsig, len(u))
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return HalfSphereMeasure(ell=int(ell), beta=float(beta), order=int(order), nodes=nodes, weights=weights)


def half_sphere_moment(r_power, y_powers, beta):
    """Closed form of ``int_{S^ell_+} omega_1**(1+beta+r_power) y**alpha dmu``.

    Uses the Gamma-function formula for monomial integrals over spheres;
    it is the independent check for :func:`half_sphere_measure`.
    """
    if any(a % 2 for a in y_powers):
        return 0.0
    a0 = 1.0 + beta + r_power
    halves = [(a + 1.0) / 2.0 for a in y_powers]
    log_val = gammaln((a0 + 1.0) / 2.0) + sum(gammaln(h) for h in halves)
    log_val -= gammaln((a0 + 1.0) / 2.0 + sum(halves))
    return float(np.exp(log_val))


@lru_cache(maxsize=64)
def _ball_rule(dim, c, n):
    if dim == 0:
        pts = np.zeros((1, 0))
        wts = np.ones(1)
    else:
        a = c + 0.5 * (dim - 1)
        x, wx = roots_jacobi(n, a, a)
        inner_pts, inner_wts = _ball_rule(dim - 1, c, n)
        scale = np.sqrt(1.0 - x * x)
        pts = np.concatenate(
            [
                np.repeat(scale, len(inner_wts))[:, None] * np.tile(inner_pts, (n, 1)),
                np.repeat(x, len(inner_wts))[:, None],
            ],
            axis=1,
        )
        wts = np.repeat(wx, len(inner_wts)) * np.tile(inner_wts, n)
    pts.setflags(write=False)
    wts.setflags(write=False)
    return pts, wts


def ball_rule(dim, c, n):
    """Nested Gauss-Jacobi rule for ``int_{|z|<1} (1 - |z|^2)^c F(z) dz`` in ``R^dim``.

    Peels off one coordinate at a time, each carrying the weight
    ``(1 - x^2)^(c + (d-1)/2)`` of the remaining ``d - 1`` dimensional slice.
    """
    return _ball_rule(int(dim), float(c), int(n))
