"""Homogeneous beta-harmonic polynomials on the weighted half-space.

A beta-harmonic polynomial of degree ``q`` in the variables ``(r, y)``,
``y`` in ``R^ell``, solves

    r^{-1-beta} d/dr (r^{1+beta} dh/dr) + Laplace_y h = 0

and has the layered form ``h = sum_j r^{2j} p_j(y)`` with ``p_j`` homogeneous
of degree ``q - 2j``.  Given the leading layer ``p_0`` the remaining layers
follow from ``p_{j+1} = -Laplace_y p_j / ((2j+2)(2j+2+beta))``.

In the full polynomial (:meth:`BetaPolynomial.full`) variable 0 is ``r`` and
variables ``1..ell`` are ``y_1..y_ell``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np

from .polynomial import Poly
from .quadrature import (
    HalfSphereMeasure,
    ball_rule,
    half_sphere_measure,
    half_sphere_moment,
    jacobi_unit_interval,
)

__all__ = [
    "BetaPolynomial",
    "as_beta",
    "generate",
    "standard_polynomial",
    "y_power",
    "radial_power",
    "measure_for",
    "HalfSphereMeasure",
    "apply_beta_laplacian",
    "sphere_inner_product",
    "sphere_inner_product_moments",
    "sphere_norm_sq",
    "sphere_eigenvalue",
    "spherical_eigen_check",
    "weighted_ball_l2",
    "ball_l2_quadrature",
    "ball_l2_series",
    "to_json",
    "from_json",
]


def as_beta(beta):
    """Normalise a weight exponent, keeping it exact when that is cheap.

    Integers, fractions and short decimals become :class:`Fraction`; long
    floats (irrational exponents coming out of a square root) stay floats;
    sympy expressions pass through untouched.
    """
    if hasattr(beta, "free_symbols"):
        return beta
    if isinstance(beta, bool):
        raise TypeError("beta must be numeric")
    if isinstance(beta, (int, Fraction)):
        return Fraction(beta)
    if isinstance(beta, str):
        return Fraction(beta)
    beta = float(beta)
    frac = Fraction(repr(beta))
    if frac.denominator <= 10**6:
        return frac
    return beta


def _positive(beta):
    if hasattr(beta, "free_symbols"):
        return True
    return beta > 0


def _recursion_factor(j, beta):
    denom = (2 * j + 2) * (2 * j + 2 + beta)
    if isinstance(denom, Fraction):
        return Fraction(-1) / denom
    return -1 / denom


@dataclass(frozen=True, eq=False)
class BetaPolynomial:
    """Homogeneous beta-harmonic polynomial ``h(r, y) = sum_j r^{2j} p_j(y)``."""

    beta: object
    ell: int
    degree: int
    layers: tuple

    @cached_property
    def _full(self):
        nv = self.ell + 1
        out = Poly.zero(nv)
        for j, layer in enumerate(self.layers):
            out = out + layer.embed(nv, 1) * Poly.monomial((2 * j,) + (0,) * self.ell)
        return out

    def full(self):
        """The polynomial in ``(r, y_1, ..., y_ell)``."""
        return self._full

    @property
    def leading_layer(self):
        return self.layers[0]

    def is_zero(self):
        return all(layer.is_zero() for layer in self.layers)

    def __call__(self, r, y):
        """Evaluate at ``(r, y)``; ``y`` has a trailing axis of length ``ell``
        (for ``ell == 1`` it may simply have the shape of ``r``)."""
        r = np.asarray(r, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.ell == 1 and y.shape == r.shape:
            y = y[..., None]
        ys = [y[..., i] for i in range(self.ell)]
        return self.full()(r, *ys)

    def trace(self, nodes):
        """Values on half-sphere nodes of shape ``(N, ell + 1)``."""
        nodes = np.asarray(nodes, dtype=float)
        return self(nodes[:, 0], nodes[:, 1:])

    def scale(self, c):
        return BetaPolynomial(self.beta, self.ell, self.degree, tuple(p * c for p in self.layers))

    def __add__(self, other):
        if (other.ell, other.degree) != (self.ell, self.degree) or other.beta != self.beta:
            raise ValueError("can only add beta-harmonic polynomials of equal beta, ell and degree")
        return BetaPolynomial(
            self.beta, self.ell, self.degree, tuple(a + b for a, b in zip(self.layers, other.layers))
        )

    def __eq__(self, other):
        if not isinstance(other, BetaPolynomial):
            return NotImplemented
        return (
            self.ell == other.ell
            and self.degree == other.degree
            and self.beta == other.beta
            and len(self.layers) == len(other.layers)
            and all(a == b for a, b in zip(self.layers, other.layers))
        )

    __hash__ = None


def generate(beta, ell, p0):
    """Unique beta-harmonic homogeneous polynomial with leading layer ``p0``.

    Parameters
    ----------
    beta : int, Fraction, float, str or sympy expression
        Weight exponent, ``beta > 0``.
    ell : int
        Number of ``y`` variables.
    p0 : Poly
        Homogeneous polynomial in ``ell`` variables.

    Raises
    ------
    ValueError
        If ``p0`` is not homogeneous, ``beta <= 0`` or the variable counts
        disagree.
    """
    beta = as_beta(beta)
    if not _positive(beta):
        raise ValueError(f"beta must be positive, got {beta}")
    if p0.nvars != ell:
        raise ValueError(f"p0 has {p0.nvars} variables, expected ell={ell}")
    if not p0.is_homogeneous():
        raise ValueError(f"p0 must be homogeneous, got degrees {sorted(p0.degrees())}")
    if p0.is_zero():
        return BetaPolynomial(beta, ell, 0, (Poly.zero(ell),))
    q = p0.degree
    layers = [p0]
    for j in range(q // 2):
        nxt = layers[-1].laplacian() * _recursion_factor(j, beta)
        if nxt.is_zero():
            break
        layers.append(nxt)
    return BetaPolynomial(beta, ell, q, tuple(layers))


def y_power(ell, q, axis=0):
    """The monomial ``y_axis**q`` as a polynomial in ``ell`` variables."""
    exps = [0] * ell
    exps[axis] = q
    return Poly.monomial(exps)


def radial_power(ell, q):
    """``|y|**q`` for even ``q``, as a polynomial in ``ell`` variables."""
    if q % 2:
        raise ValueError("|y|^q is a polynomial only for even q")
    sq = Poly.zero(ell)
    for i in range(ell):
        sq = sq + y_power(ell, 2, i)
    return sq ** (q // 2)


def standard_polynomial(beta, ell, q):
    """``h_q`` generated from ``p0 = y_1**q``; for ``ell = 1`` these are the
    classical ``1, y, y^2 - r^2/(2+beta), ...``."""
    return generate(beta, ell, y_power(ell, q))


def _as_full_poly(h):
    if isinstance(h, BetaPolynomial):
        return h.full()
    return h


def apply_beta_laplacian(h, beta):
    """Apply ``r^{-1-beta} d_r(r^{1+beta} d_r) + Laplace_y`` exactly.

    ``h`` is a :class:`Poly` in ``(r, y)`` (variable 0 is ``r``) or a
    :class:`BetaPolynomial`.  Odd powers of ``r`` are rejected because the
    operator maps them to ``r^{-1}`` terms.
    """
    h = _as_full_poly(h)
    beta = as_beta(beta)
    radial = {}
    for exps, c in h.terms.items():
        a = exps[0]
        if a % 2:
            raise ValueError("beta-Laplacian on polynomials requires even powers of r")
        if a >= 2:
            k = (a - 2,) + exps[1:]
            radial[k] = radial.get(k, 0) + c * a * (a + beta)
    return Poly(h.nvars, radial) + h.laplacian(range(1, h.nvars))


def _measure_for(ell, beta, degree):
    return half_sphere_measure(ell, float(beta), order=max(2, degree // 2 + 2))


def _trace_values(h, measure):
    if isinstance(h, BetaPolynomial):
        return h.trace(measure.nodes)
    if isinstance(h, Poly):
        return h(*measure.nodes.T)
    return np.asarray(h(measure.nodes), dtype=float)


def sphere_inner_product_moments(h1, h2, beta):
    """``int h1 h2 dnu_+`` summed from closed-form monomial moments."""
    prod = _as_full_poly(h1) * _as_full_poly(h2)
    beta = float(beta)
    return float(sum(float(c) * half_sphere_moment(e[0], e[1:], beta) for e, c in prod.terms.items()))


def sphere_inner_product(h1, h2, measure=None, check=True):
    """``int_{S^ell_+} h1 h2 omega_1^{1+beta} dmu``.

    Arguments may be :class:`BetaPolynomial`, :class:`Poly` in ``(r, y)``
    or callables taking half-sphere nodes.  When both are polynomials the
    quadrature value is compared with the Gamma-moment sum and a mismatch
    beyond ``1e-9`` (relative to the product of norms) raises
    ``ArithmeticError``.
    """
    polys = all(isinstance(h, (BetaPolynomial, Poly)) for h in (h1, h2))
    if measure is None:
        hs = [h for h in (h1, h2) if isinstance(h, BetaPolynomial)]
        if not hs:
            raise ValueError("a measure is required unless a BetaPolynomial fixes ell and beta")
        if len(hs) == 2 and (hs[0].ell != hs[1].ell or hs[0].beta != hs[1].beta):
            raise ValueError("inner product of polynomials with different ell or beta")
        deg = sum(_as_full_poly(h).degree for h in (h1, h2) if isinstance(h, (BetaPolynomial, Poly)))
        measure = _measure_for(hs[0].ell, hs[0].beta, max(deg, 0))
    v1 = _trace_values(h1, measure)
    v2 = _trace_values(h2, measure)
    value = measure.integrate(v1 * v2)
    if check and polys:
        exact = sphere_inner_product_moments(h1, h2, measure.beta)
        scale = np.sqrt(measure.integrate(v1 * v1) * measure.integrate(v2 * v2))
        if abs(value - exact) > 1e-9 * max(scale, abs(exact), 1e-300):
            raise ArithmeticError(
                f"quadrature {value!r} and moment formula {exact!r} disagree; raise the measure order"
            )
    return value


def sphere_norm_sq(h, measure=None):
    """``N_q^2 = int h^2 dnu_+``."""
    return sphere_inner_product(h, h, measure)


def sphere_eigenvalue(q, ell, beta):
    """``q (q + ell + beta)``, the weighted spherical eigenvalue of ``h_q``."""
    return q * (q + ell + beta)


def _test_monomials(ell, max_degree):
    out = []
    for d in range(max_degree + 1):
        for a in range(0, d + 1, 2):
            rest = d - a
            for combo in combinations_with_replacement(range(ell), rest):
                exps = [a] + [0] * ell
                for i in combo:
                    exps[1 + i] += 1
                out.append(Poly.monomial(exps))
    return out


def _sphere_grad_dot(f, g, nodes):
    # tangential gradient: grad F - (omega . grad F) omega
    nv = f.nvars
    cols = list(nodes.T)
    gf = np.array([f.diff(i)(*cols) for i in range(nv)])
    gg = np.array([g.diff(i)(*cols) for i in range(nv)])
    radial_f = np.einsum("in,ni->n", gf, nodes)
    radial_g = np.einsum("in,ni->n", gg, nodes)
    return np.einsum("in,in->n", gf, gg) - radial_f * radial_g


def spherical_eigen_check(h, test_degree=None):
    """Weak check of the weighted spherical eigen-identity for ``h``.

    For each test monomial ``zeta`` (even in ``r``, degree ``<= test_degree``,
    default ``h.degree + 2``) compares ``int w grad h . grad zeta`` with
    ``q(q+ell+beta) int w h zeta``, where ``w = omega_1^{1+beta}`` and the
    gradients are tangential.  This is the weak form of
    ``-div(w grad h) = q(q+ell+beta) w h``, the sign under which the
    spherical splitting of the beta-Laplacian annihilates ``rho^q h``.

    Returns the largest residual, each one divided by its Cauchy-Schwarz
    bound so that tests orthogonal to ``h`` do not inflate it.
    """
    f = h.full()
    q = h.degree
    if test_degree is None:
        test_degree = q + 2
    lam = sphere_eigenvalue(q, h.ell, float(h.beta))
    measure = half_sphere_measure(h.ell, float(h.beta), order=(q + test_degree) // 2 + 3)
    nodes = measure.nodes
    cols = list(nodes.T)
    hv = f(*cols)
    h_sq = measure.integrate(hv * hv)
    grad_h_sq = measure.integrate(_sphere_grad_dot(f, f, nodes))
    worst = 0.0
    for zeta in _test_monomials(h.ell, test_degree):
        zv = zeta(*cols)
        lhs = measure.integrate(_sphere_grad_dot(f, zeta, nodes))
        rhs = lam * measure.integrate(hv * zv)
        bound = np.sqrt(grad_h_sq * measure.integrate(_sphere_grad_dot(zeta, zeta, nodes)))
        bound += lam * np.sqrt(h_sq * measure.integrate(zv * zv))
        if bound > 0:
            worst = max(worst, abs(lhs - rhs) / bound)
    return worst


def weighted_ball_l2(h, R, norm_sq=None):
    """``int_{B_R^+} h^2 r^{1+beta} dr dy`` for homogeneous beta-harmonic ``h``.

    Closed form ``N_q^2 R^{ell+2+beta+2q} / (ell+2+beta+2q)``.
    """
    if not R > 0:
        raise ValueError("R must be positive")
    if norm_sq is None:
        norm_sq = sphere_norm_sq(h)
    e = h.ell + 2 + float(h.beta) + 2 * h.degree
    return norm_sq * R**e / e


def ball_l2_quadrature(fn, ell, beta, R, order=12):
    """Direct quadrature of ``int_{B_R^+} fn(r, y)^2 r^{1+beta} dr dy``.

    Slices the half-ball in Cartesian coordinates: Gauss-Jacobi in
    ``r / sqrt(R^2 - |y|^2)`` with weight ``tau^{1+beta}``, then a nested
    Gauss-Jacobi rule over the ``y``-ball with weight
    ``(R^2 - |y|^2)^{(2+beta)/2}``.  Exact when ``fn^2`` is a polynomial
    even in ``r`` of modest degree.  ``fn`` takes ``(r, y)`` with ``y`` of
    shape ``(..., ell)``.
    """
    beta = float(beta)
    tau, wt = jacobi_unit_interval(order, 1.0 + beta, 0.0)
    z, wz = ball_rule(ell, (2.0 + beta) / 2.0, order)
    y = R * z
    rad = np.sqrt(np.maximum(R * R - np.sum(y * y, axis=1), 0.0))
    r = rad[:, None] * tau[None, :]
    yy = np.broadcast_to(y[:, None, :], r.shape + (ell,))
    vals = np.asarray(fn(r, yy), dtype=float) ** 2
    inner = vals @ wt
    return float(R ** (ell + 2.0 + beta) * np.dot(wz, inner))


def ball_l2_series(hs, coeffs, R):
    """Ball L^2 of ``sum c_q h_q`` predicted from orthogonality (no cross terms)."""
    return sum(c * c * weighted_ball_l2(h, R) for h, c in zip(hs, coeffs))


def _frac_pair(c):
    c = Fraction(c)
    return c.numerator, c.denominator


def to_json(h):
    """Serialise a :class:`BetaPolynomial` to a JSON string (exact)."""
    beta = h.beta
    if hasattr(beta, "free_symbols"):
        raise TypeError("symbolic beta cannot be serialised")
    if isinstance(beta, Fraction):
        beta_out = {"numerator": beta.numerator, "denominator": beta.denominator}
    else:
        beta_out = float(beta)
    layers = []
    for j, layer in enumerate(h.layers):
        terms = []
        for exps in sorted(layer.terms):
            num, den = _frac_pair(layer.terms[exps])
            terms.append({"multi_index": list(exps), "numerator": num, "denominator": den})
        layers.append({"degree": h.degree - 2 * j, "terms": terms})
    doc = {"beta": beta_out, "ell": h.ell, "q": h.degree, "layers": layers}
    return json.dumps(doc, sort_keys=True)


def _parse_terms(terms, ell):
    return Poly(ell, {tuple(t["multi_index"]): Fraction(t["numerator"], t["denominator"]) for t in terms})


def from_json(text):
    """Inverse of :func:`to_json`."""
    doc = json.loads(text) if isinstance(text, str) else text
    b = doc["beta"]
    beta = Fraction(b["numerator"], b["denominator"]) if isinstance(b, dict) else float(b)
    ell = int(doc["ell"])
    layers = tuple(_parse_terms(layer["terms"], ell) for layer in doc["layers"])
    return BetaPolynomial(beta, ell, int(doc["q"]), layers)


def measure_for(h, extra_degree=0):
    """Half-sphere rule exact for products of ``h`` with polynomials of
    degree ``<= h.degree + extra_degree``."""
    return _measure_for(h.ell, h.beta, 2 * h.degree + extra_degree)

