"""Growth profiles ``rho -> sum_i b_i^2 rho^{2 q_i}`` and the laws they obey.

``psi(t) = log value(e^t)`` is convex, the dyadic ratio
``value(rho) / value(rho/2)`` can only grow with ``rho``, and the exponent
arithmetic behind the Liouville argument rules out bounds of the form
``R^{-alpha} <= A <= R^{-2+alpha}`` for ``R > 1``.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import nnls
from scipy.special import logsumexp

DEDUP_TOL = 1e-12
FORBIDDEN_BAND = 1e-9


def _exact(x):
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    return float(x)


def merge_exponents(exponents, tol=DEDUP_TOL):
    """Sort and merge exponents closer than ``tol``; exact values survive."""
    out = []
    for q in sorted((_exact(q) for q in exponents), key=float):
        if out and abs(float(q) - float(out[-1])) <= tol:
            # keep the exact representative when one is available
            if isinstance(q, Fraction) and not isinstance(out[-1], Fraction):
                out[-1] = q
            continue
        out.append(q)
    return tuple(out)


@dataclass(frozen=True)
class GrowthProfile:
    """Either analytic ``(exponents, coefficients)`` or sampled ``(radii, values)``.

    Coefficients are the ``b_i^2`` (nonnegative); exponents are the ``q_i``
    and the profile is ``sum_i b_i^2 rho^{2 q_i}``.
    """

    exponents: tuple = None
    coefficients: tuple = None
    radii: tuple = None
    values: tuple = None
    provenance: str = "analytic"

    @classmethod
    def analytic(cls, exponents, coefficients, provenance="analytic"):
        if len(exponents) != len(coefficients):
            raise ValueError("exponents and coefficients differ in length")
        merged = {}
        for q, b in zip(exponents, coefficients):
            if b < 0:
                raise ValueError("coefficients b_i^2 must be nonnegative")
            key = None
            for k in merged:
                if abs(float(k) - float(q)) <= DEDUP_TOL:
                    key = k
                    break
            if key is None:
                merged[_exact(q)] = b
            else:
                merged[key] = merged[key] + b
        qs = sorted(merged, key=float)
        return cls(exponents=tuple(qs), coefficients=tuple(merged[q] for q in qs), provenance=provenance)

    @classmethod
    def sampled(cls, radii, values, provenance="sampled"):
        radii = np.asarray(radii, dtype=float)
        values = np.asarray(values, dtype=float)
        if radii.shape != values.shape or radii.ndim != 1:
            raise ValueError("radii and values must be 1-D of equal length")
        if np.any(radii <= 0) or np.any(np.diff(radii) <= 0):
            raise ValueError("radii must be positive and strictly increasing")
        return cls(radii=tuple(radii.tolist()), values=tuple(values.tolist()), provenance=provenance)

    @property
    def is_analytic(self):
        return self.exponents is not None

    @property
    def ladder(self):
        return self.exponents if self.is_analytic else ()

    def is_zero(self):
        if self.is_analytic:
            return all(b == 0 for b in self.coefficients)
        return all(v == 0 for v in self.values)

    def _log_terms(self):
        qs = np.array([float(q) for q, b in zip(self.exponents, self.coefficients) if b > 0])
        logb = np.array([math.log(float(b)) for b in self.coefficients if b > 0])
        return qs, logb

    def psi(self, t):
        """``log value(e^t)``."""
        t = np.asarray(t, dtype=float)
        if self.is_analytic:
            qs, logb = self._log_terms()
            if qs.size == 0:
                raise ValueError("psi is undefined for the zero profile")
            return logsumexp(logb + 2.0 * qs * t[..., None], axis=-1)
        if self.is_zero() or min(self.values) <= 0:
            raise ValueError("psi needs a positive sampled profile")
        return np.interp(t, np.log(self.radii), np.log(self.values))

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        if self.is_analytic:
            out = np.zeros(rho.shape)
            for q, b in zip(self.exponents, self.coefficients):
                out = out + float(b) * rho ** (2.0 * float(q))
            return out
        return np.exp(self.psi(np.log(rho)))


def exponent_ladder(lines, max_q):
    """Merged homogeneities ``q + (beta_j - beta_1) / 2`` for ``0 <= q <= max_q``.

    ``beta_1`` is taken from the line of smallest index ``j``.  Rational
    betas give an exact (Fraction) ladder.
    """
    if max_q < 0:
        raise ValueError("max_q must be >= 0")
    lines = list(lines)
    if not lines:
        raise ValueError("empty spectrum")
    for line in lines:
        if isinstance(line.beta, complex):
            raise ValueError(f"level j={line.j} has complex exponents (unstable cone)")
    beta1 = min(lines, key=lambda s: s.j).beta
    raw = []
    for line in lines:
        shift = (_exact(line.beta) - _exact(beta1)) / 2
        raw.extend(q + shift for q in range(max_q + 1))
    return merge_exponents(raw)


def psi_convexity(profile, t_grid=None, step=None):
    """Smallest second difference ``psi(t+h) - 2 psi(t) + psi(t-h)``.

    For a sampled profile the second divided differences of ``psi`` on the
    sample abscissae are scaled by the local step squared.
    """
    if profile.is_zero():
        raise ValueError("psi is undefined for the zero profile")
    if not profile.is_analytic:
        t = np.log(np.asarray(profile.radii))
        p = np.log(np.asarray(profile.values))
        if np.any(~np.isfinite(p)):
            raise ValueError("psi needs a positive sampled profile")
        if len(t) < 3:
            raise ValueError("need at least three samples")
        slopes = np.diff(p) / np.diff(t)
        h = 0.5 * (t[2:] - t[:-2])
        return float(np.min((slopes[1:] - slopes[:-1]) * h))
    if t_grid is None:
        t_grid = np.linspace(-5.0, 5.0, 201)
    t = np.asarray(t_grid, dtype=float)
    if step is None:
        step = float(t[1] - t[0]) if t.size > 1 else 0.1
    lo, mid, hi = profile.psi(np.stack([t - step, t, t + step]))
    return float(np.min(hi - 2.0 * mid + lo))


@dataclass(frozen=True)
class Dichotomy:
    Q: float
    rho: float
    ratio_small: float
    ratio_large: float
    premise: bool
    conclusion: bool

    @property
    def holds(self):
        return (not self.premise) or self.conclusion


def check_allowed_Q(Q, ladder):
    if not Q > 0:
        raise ValueError("Q must be positive")
    for q in ladder:
        if abs(Q - 4.0 ** float(q)) <= FORBIDDEN_BAND:
            raise ValueError(f"Q = {Q} lies on the forbidden value 4^{q}")


def doubling_dichotomy(profile, Q, rho, ladder=None):
    """Evaluate the premise ``value(rho/2)/value(rho/4) >= Q`` and the
    conclusion ``value(rho)/value(rho/2) > Q``.

    Raises
    ------
    ValueError
        When ``Q`` is within the guard band of some ``4^{q_i}`` or the
        profile vanishes.
    """
    return dichotomy_sweep(profile, [Q], [rho], ladder)[0]


SWEEP_COLUMNS = ("Q", "rho", "ratio_small", "ratio_large", "premise", "conclusion")


def dichotomy_sweep(profile, Qs, rhos, ladder=None):
    """``doubling_dichotomy`` over every ``(Q, rho)`` pair, Q-major order."""
    if profile.is_zero():
        raise ValueError("zero profile")
    ladder = profile.ladder if ladder is None else ladder
    for Q in Qs:
        check_allowed_Q(Q, ladder)
    rhos = np.asarray(rhos, dtype=float)
    # ratios through psi differences stay finite for tiny coefficients
    p1, p2, p4 = profile.psi(np.log(np.stack([rhos, rhos / 2, rhos / 4])))
    small = np.exp(p2 - p4)
    large = np.exp(p1 - p2)
    return [
        Dichotomy(float(Q), float(rho), float(s), float(g), bool(s >= Q), bool(g > Q))
        for Q in Qs
        for rho, s, g in zip(rhos, small, large)
    ]


def export_sweep(results, delimiter=","):
    buf = io.StringIO()
    buf.write(delimiter.join(SWEEP_COLUMNS) + "\n")
    for d in results:
        row = (repr(d.Q), repr(d.rho), repr(d.ratio_small), repr(d.ratio_large), str(d.premise).lower(), str(d.conclusion).lower())
        buf.write(delimiter.join(row) + "\n")
    return buf.getvalue()


@dataclass(frozen=True)
class GapReport:
    alpha: Fraction
    margin: Fraction
    radii: tuple
    lower: tuple
    upper: tuple
    feasible: tuple

    @property
    def infeasible_beyond_one(self):
        return not any(f for R, f in zip(self.radii, self.feasible) if R > 1)

    @property
    def message(self):
        state = "infeasible" if self.infeasible_beyond_one else "feasible"
        return f"{state} for R>1, margin {float(self.margin)}"


def liouville_gap(alpha, R_range=(0.5, 1.0, 2.0, 4.0, 8.0, 16.0)):
    """Check where ``R^{-alpha} <= R^{-2+alpha}`` can hold.

    The two bounds are compatible iff ``R^{2 - 2 alpha} <= 1``, so for
    ``0 < alpha < 1`` every ``R > 1`` is excluded, with exponent margin
    ``2 - 2 alpha`` computed exactly from the decimal form of ``alpha``.
    """
    a = Fraction(alpha) if isinstance(alpha, (int, Fraction)) else Fraction(repr(float(alpha)))
    if not 0 < a < 1:
        raise ValueError("alpha must lie in (0, 1)")
    margin = 2 - 2 * a
    radii = tuple(float(R) for R in R_range)
    if any(R <= 0 for R in radii):
        raise ValueError("radii must be positive")
    af = float(a)
    lower = tuple(R**-af for R in radii)
    upper = tuple(R ** (-2.0 + af) for R in radii)
    # sign of margin * log R decides feasibility; avoids rounding at R ~ 1
    feasible = tuple(R <= 1.0 for R in radii)
    return GapReport(a, margin, radii, lower, upper, feasible)


@dataclass(frozen=True)
class ExponentFit:
    ladder: tuple
    coefficients: tuple
    residual: float
    condition: float
    ill_conditioned: bool

    def profile(self):
        return GrowthProfile.analytic(self.ladder, self.coefficients, provenance="fit")


def fit_exponents(samples, ladder, cond_limit=1e12):
    """Nonnegative least squares for ``b_i^2`` in the basis ``rho^{2 q_i}``.

    Rows are weighted by ``1 / value`` so the fit balances relative errors;
    columns are scaled to unit norm before solving.

    Raises
    ------
    ValueError
        With fewer than two samples per candidate exponent or radii spanning
        less than one doubling.
    """
    if not isinstance(samples, GrowthProfile):
        samples = GrowthProfile.sampled(*samples)
    if samples.is_analytic:
        raise ValueError("fit_exponents needs a sampled profile")
    ladder = merge_exponents(ladder)
    rho = np.asarray(samples.radii)
    vals = np.asarray(samples.values)
    if len(rho) < 2 * len(ladder):
        raise ValueError(f"need at least {2 * len(ladder)} samples for {len(ladder)} exponents")
    if rho[-1] / rho[0] < 2.0:
        raise ValueError("radii span less than one doubling; basis is ill-conditioned")
    A = rho[:, None] ** (2.0 * np.array([float(q) for q in ladder]))[None, :]
    w = 1.0 / np.where(vals > 0, vals, 1.0)
    Aw = A * w[:, None]
    scale = np.linalg.norm(Aw, axis=0)
    x, _ = nnls(Aw / scale, vals * w)
    coeffs = x / scale
    resid = float(np.linalg.norm(A @ coeffs - vals) / max(np.linalg.norm(vals), 1e-300))
    cond = float(np.linalg.cond(Aw / scale))
    return ExponentFit(ladder, tuple(float(c) for c in coeffs), resid, cond, bool(cond > cond_limit))


@dataclass(frozen=True)
class EqualityCase:
    increments: tuple
    equal: bool
    single_mode: bool
    exponent: object


def dyadic_increments(profile, rho):
    """``(psi(log rho) - psi(log rho/2), psi(log rho/2) - psi(log rho/4))``."""
    t = np.log([rho, rho / 2, rho / 4])
    p = profile.psi(t)
    return float(p[0] - p[1]), float(p[1] - p[2])


def equality_case(profile, rho, tol=1e-12):
    """Detect equal dyadic increments of ``psi``.

    For analytic profiles equality forces a single active mode ``q_{i0}``
    whose increment is ``log 4^{q_{i0}}``; the active exponent is returned
    when that happens.
    """
    outer, inner = dyadic_increments(profile, rho)
    equal = abs(outer - inner) <= tol * max(1.0, abs(outer))
    active = [q for q, b in zip(profile.exponents or (), profile.coefficients or ()) if b > 0]
    single = len(active) == 1
    return EqualityCase((outer, inner), equal, single, active[0] if single else None)
