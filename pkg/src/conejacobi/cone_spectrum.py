"""Spectral data of the minimal cones over ``S^p(a) x S^q(b)``.

The cross-section ``Sigma = S^p(a) x S^q(b)`` with ``a^2 = p/(p+q)`` and
``b^2 = q/(p+q)`` is minimal in ``S^n``, ``n = p + q + 1``, and has
``|A_Sigma|^2 = n - 1``.  Eigenvalues of ``-L_Sigma = -Laplace - |A|^2``
come from products of sphere harmonics of degrees ``(k, m)``:

    lambda = k(k+p-1)/a^2 + m(m+q-1)/b^2 - (n-1).

Closed-form quantities are kept as :class:`~fractions.Fraction`; square
roots stay exact when the radicand is a rational square.
"""

from __future__ import annotations

import cmath
import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.interpolate import CubicSpline

from .quadrature import gauss_legendre_composite, sphere_area

STRICTLY_STABLE = "strictly_stable"
BORDERLINE = "borderline"
UNSTABLE = "unstable"


@dataclass(frozen=True)
class ConeSpec:
    """Cone over ``S^p(a) x S^q(b)`` in ``R^(n+1)``."""

    p: int
    q: int
    n: int
    a_sq: Fraction
    b_sq: Fraction
    second_ff_sq: Fraction

    @property
    def half_gap(self):
        """``(n - 2) / 2``."""
        return Fraction(self.n - 2, 2)

    @property
    def cross_section_area(self):
        """``|Sigma| = |S^p| a^p |S^q| b^q`` (kept apart from the spectrum)."""
        a = math.sqrt(self.a_sq)
        b = math.sqrt(self.b_sq)
        return sphere_area(self.p) * a**self.p * sphere_area(self.q) * b**self.q


def build_cone(p, q):
    """Cone over ``S^p x S^q`` with the minimal radii.

    Raises
    ------
    ValueError
        If ``p`` or ``q`` is below 1 (the cross-section would be singular).
    """
    if isinstance(p, bool) or isinstance(q, bool) or int(p) != p or int(q) != q:
        raise ValueError("sphere dimensions must be integers")
    p, q = int(p), int(q)
    if p < 1 or q < 1:
        raise ValueError(f"need p, q >= 1 for a smooth cross-section, got ({p}, {q})")
    n = p + q + 1
    return ConeSpec(
        p=p,
        q=q,
        n=n,
        a_sq=Fraction(p, p + q),
        b_sq=Fraction(q, p + q),
        second_ff_sq=Fraction(n - 1),
    )


def principal_curvature_sum(cone):
    """``|A_Sigma|^2`` from the principal curvatures of ``S^p(a) x S^q(b)`` in ``S^n``.

    ``p`` curvatures equal ``b/a`` and ``q`` equal ``-a/b``; this is the
    independent route to ``second_ff_sq``.
    """
    return cone.p * cone.b_sq / cone.a_sq + cone.q * cone.a_sq / cone.b_sq


def sphere_harmonic_dim(k, d):
    """Dimension of degree-``k`` spherical harmonics on ``S^d``."""
    if k < 0:
        return 0
    lower = math.comb(k + d - 2, d) if k >= 2 else 0
    return math.comb(k + d, d) - lower


def _exact_sqrt(x):
    """Square root of a non-negative Fraction, exact when possible."""
    num, den = x.numerator, x.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return math.sqrt(x)


@dataclass(frozen=True)
class SpectralLine:
    """One eigen-level of ``-L_Sigma`` with its exponents.

    ``lam`` is exact.  ``beta`` and the ``gamma`` values are Fractions when
    the discriminant ``((n-2)/2)^2 + lam`` is a rational square, floats when
    it is positive otherwise, and complex when it is negative.
    """

    j: int
    lam: Fraction
    multiplicity: int
    gamma_minus: object
    gamma_plus: object
    beta: object
    labels: tuple
    pairs: tuple = field(default=(), repr=False)

    @property
    def k(self):
        return self.labels[0]

    @property
    def m(self):
        return self.labels[1]


def level_eigenvalue(cone, k, m):
    return k * (k + cone.p - 1) / cone.a_sq + m * (m + cone.q - 1) / cone.b_sq - cone.second_ff_sq


def exponents(cone, lam):
    """``(gamma_minus, gamma_plus, beta)`` for the eigenvalue ``lam``."""
    h = cone.half_gap
    disc = h * h + Fraction(lam)
    if disc >= 0:
        root = _exact_sqrt(disc)
        if isinstance(root, Fraction):
            return -h - root, -h + root, 2 * root
        return float(-h) - root, float(-h) + root, 2.0 * root
    root = cmath.sqrt(float(disc))
    return complex(-h) - root, complex(-h) + root, 2 * root


def _levels_below(cone, kmax, mmax):
    out = {}
    for k in range(kmax + 1):
        for m in range(mmax + 1):
            lam = level_eigenvalue(cone, k, m)
            mult = sphere_harmonic_dim(k, cone.p) * sphere_harmonic_dim(m, cone.q)
            out.setdefault(lam, []).append(((k, m), mult))
    return out


def spectrum(cone, count):
    """First ``count`` distinct eigen-levels of ``-L_Sigma``, ascending.

    Levels reached by several ``(k, m)`` are merged with summed
    multiplicity; the stored ``labels`` are the lexicographically smallest
    pair.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    kmax = mmax = 2
    while True:
        levels = _levels_below(cone, kmax, mmax)
        # every level with k > kmax or m > mmax is at least this large
        bound = min(level_eigenvalue(cone, kmax + 1, 0), level_eigenvalue(cone, 0, mmax + 1))
        complete = sorted(lam for lam in levels if lam < bound)
        if len(complete) >= count:
            break
        kmax *= 2
        mmax *= 2
    lines = []
    for j, lam in enumerate(complete[:count], start=1):
        pairs = sorted(levels[lam])
        gm, gp, beta = exponents(cone, lam)
        lines.append(
            SpectralLine(
                j=j,
                lam=lam,
                multiplicity=sum(mult for _, mult in pairs),
                gamma_minus=gm,
                gamma_plus=gp,
                beta=beta,
                labels=pairs[0][0],
                pairs=tuple(pq for pq, _ in pairs),
            )
        )
    return lines


@dataclass(frozen=True)
class StabilityReport:
    classification: str
    margin: Fraction
    lambda_1: Fraction


def strict_stability(cone):
    """Classify by the sign of ``lambda_1 + ((n-2)/2)^2``."""
    lam1 = spectrum(cone, 1)[0].lam
    margin = lam1 + cone.half_gap**2
    if margin > 0:
        cls = STRICTLY_STABLE
    elif margin == 0:
        cls = BORDERLINE
    else:
        cls = UNSTABLE
    return StabilityReport(cls, margin, lam1)


def _as_radial(test_fn, support):
    """Return ``(f, df)`` callables for the supported test-function forms."""
    if isinstance(test_fn, tuple) and len(test_fn) == 2 and callable(test_fn[0]):
        return test_fn
    if hasattr(test_fn, "derivative"):
        return test_fn, test_fn.derivative()
    if hasattr(test_fn, "deriv"):
        return test_fn, test_fn.deriv()
    if isinstance(test_fn, tuple) and len(test_fn) == 2:
        r, vals = (np.asarray(x, dtype=float) for x in test_fn)
        spline = CubicSpline(r, vals)
        return spline, spline.derivative()
    if callable(test_fn):
        a, b = support
        step = 1e-5 * max(1.0, b - a)

        def df(r):
            return (
                -test_fn(r + 2 * step) + 8 * test_fn(r + step) - 8 * test_fn(r - step) + test_fn(r - 2 * step)
            ) / (12 * step)

        return test_fn, df
    raise TypeError("test function must be callable, an (f, df) pair, a spline or (r, values) samples")


def _support_of(test_fn, support):
    if support is not None:
        return float(support[0]), float(support[1])
    if isinstance(test_fn, tuple) and len(test_fn) == 2 and not callable(test_fn[0]):
        r = np.asarray(test_fn[0], dtype=float)
        return float(r.min()), float(r.max())
    if hasattr(test_fn, "x"):
        return float(test_fn.x[0]), float(test_fn.x[-1])
    raise ValueError("support interval required for this test function")


@dataclass(frozen=True)
class HardyResult:
    lhs: float
    rhs: float
    ratio: float
    constant: float


def hardy_check(n, p_exp, test_fn, support=None, nodes_per_unit=64):
    """Evaluate both sides of the weighted radial Hardy inequality.

    ``lhs = int r^{-p-2} f^2 r^{n-1} dr`` and ``rhs = int r^{-p} f'^2 r^{n-1} dr``
    over the support of ``f``; the sharp constant is ``(2/(n-2-p))^2``.
    ``f`` and ``f'`` must be finite on the support.
    """
    if not p_exp < n - 2:
        raise ValueError(f"Hardy inequality needs p < n - 2, got p={p_exp}, n={n}")
    a, b = _support_of(test_fn, support)
    f, df = _as_radial(test_fn, (a, b))
    r, w = gauss_legendre_composite(a, b, nodes_per_unit)
    fv = np.asarray(f(r), dtype=float)
    dfv = np.asarray(df(r), dtype=float)
    lhs = float(np.dot(w, r ** (n - 3 - p_exp) * fv * fv))
    rhs = float(np.dot(w, r ** (n - 1 - p_exp) * dfv * dfv))
    ratio = 0.0 if rhs == 0.0 else lhs / rhs
    return HardyResult(lhs, rhs, ratio, (2.0 / (n - 2 - p_exp)) ** 2)


def radial_stability_terms(cone, test_fn, support=None, nodes_per_unit=64):
    """``(int r^{n-3} zeta^2, int (zeta'^2 - (n-1) r^{-2} zeta^2) r^{n-1})`` per unit ``|Sigma|``."""
    a, b = _support_of(test_fn, support)
    f, df = _as_radial(test_fn, (a, b))
    r, w = gauss_legendre_composite(a, b, nodes_per_unit)
    fv = np.asarray(f(r), dtype=float)
    dfv = np.asarray(df(r), dtype=float)
    n = cone.n
    weighted = float(np.dot(w, r ** (n - 3) * fv * fv))
    energy = float(np.dot(w, r ** (n - 1) * dfv * dfv)) - float(cone.second_ff_sq) * weighted
    return weighted, energy


def cone_stability_inequality(cone, test_fn, lambda_cand, support=None, rtol=1e-10):
    """Whether ``lambda * int |x|^{-2} zeta^2 <= int |grad zeta|^2 - |A|^2 zeta^2``
    holds on the cone for a radial ``zeta`` (up to ``rtol`` of the terms)."""
    weighted, energy = radial_stability_terms(cone, test_fn, support)
    lhs = float(lambda_cand) * weighted
    slack = rtol * (abs(lhs) + abs(energy) + float(cone.second_ff_sq) * weighted)
    return lhs <= energy + slack


def destabilizing_test_function(cone, outer_radius=100.0):
    """Radial ``zeta = r^{-(n-2)/2} sin(pi log r / log R)`` on ``[1, R]``.

    Its stability quotient is ``margin + (pi / log R)^2``, so for an unstable
    cone and large ``R`` it violates the inequality for any ``lambda > 0``.
    Returns ``((f, df), (1, R))``.
    """
    h = float(cone.half_gap)
    k = math.pi / math.log(outer_radius)

    def f(r):
        return r**-h * np.sin(k * np.log(r))

    def df(r):
        return r ** (-h - 1) * (k * np.cos(k * np.log(r)) - h * np.sin(k * np.log(r)))

    return (f, df), (1.0, float(outer_radius))


def _fmt(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else str(x.numerator)
    if isinstance(x, complex):
        return repr(x)
    return repr(float(x))


SPECTRUM_COLUMNS = ("j", "lambda", "multiplicity", "gamma_minus", "gamma_plus", "beta", "k", "m")


def spectrum_rows(lines):
    return [
        [
            line.j,
            _fmt(line.lam),
            line.multiplicity,
            _fmt(line.gamma_minus),
            _fmt(line.gamma_plus),
            _fmt(line.beta),
            line.k,
            line.m,
        ]
        for line in lines
    ]


def export_spectrum(lines, delimiter=",", keyed=False):
    """Delimited text with columns j, lambda, multiplicity, gamma_minus,
    gamma_plus, beta, k, m.

    By default a header line comes first.  With ``keyed=True`` there is no
    header and every cell reads ``name=value``, one line per level.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    rows = spectrum_rows(lines)
    if keyed:
        rows = [[f"{k}={v}" for k, v in zip(SPECTRUM_COLUMNS, row)] for row in rows]
    else:
        writer.writerow(SPECTRUM_COLUMNS)
    writer.writerows(rows)
    return buf.getvalue()
