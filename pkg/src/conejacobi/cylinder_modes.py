"""Jacobi fields on the cylinder ``C = C_0 x R^ell``.

A field is ``v = sum_j v_j(r, y) phi_j(omega)`` with per-level profiles
``v_j = r^{gamma_j^+} sum_q amp * h_{j,q}(r, y)`` and ``h_{j,q}``
beta_j-harmonic.  The angular eigenfunctions ``phi_j`` are never sampled:
their orthonormality turns every ``omega`` integral into a per-level sum.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .beta_poly import BetaPolynomial, apply_beta_laplacian, as_beta, sphere_inner_product
from .cone_spectrum import ConeSpec, spectrum
from .growth import GrowthProfile
from .polynomial import Poly
from .quadrature import jacobi_unit_interval

DEFAULT_ANNULUS = (1e-2, 1.0)

# 4th-order central stencils
_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
_OFFSETS = np.arange(-2, 3)


@dataclass(frozen=True)
class Mode:
    """One term ``amplitude * r^{gamma_j} h(r, y)`` of level ``j``."""

    j: int
    poly: BetaPolynomial
    amplitude: float = 1.0

    @property
    def q(self):
        return self.poly.degree


def _beta_matches(a, b):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    try:
        return math.isclose(float(a), float(b), rel_tol=1e-12, abs_tol=1e-12)
    except TypeError:
        return False


@dataclass(frozen=True)
class JacobiFieldSpec:
    cone: ConeSpec
    ell: int
    modes: tuple = ()
    r_range: tuple = DEFAULT_ANNULUS
    levels: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.ell < 1:
            raise ValueError("ell must be >= 1")
        object.__setattr__(self, "modes", tuple(self.modes))
        top = max((m.j for m in self.modes), default=1)
        lines = {s.j: s for s in spectrum(self.cone, max(top, 1))}
        object.__setattr__(self, "levels", lines)
        for m in self.modes:
            line = lines[m.j]
            if isinstance(line.beta, complex):
                raise ValueError(f"level j={m.j} has complex exponents; only real branches are synthesised")
            if m.poly.ell != self.ell:
                raise ValueError(f"mode (j={m.j}, q={m.q}) has ell={m.poly.ell}, expected {self.ell}")
            if not _beta_matches(m.poly.beta, line.beta):
                raise ValueError(f"mode (j={m.j}, q={m.q}) has beta={m.poly.beta}, level needs {line.beta}")
        lo, hi = self.r_range
        if not 0 < lo < hi:
            raise ValueError("evaluation annulus must satisfy 0 < r0 < r1")

    @property
    def beta1(self):
        return self.levels[1].beta

    def homogeneity(self, mode):
        """Exponent of ``rho`` contributed by ``mode`` to the averaged profile."""
        beta_j = self.levels[mode.j].beta
        return 2 * mode.q + as_beta(beta_j) - as_beta(self.beta1)


@dataclass(frozen=True)
class ModeProfile:
    """``v_j(r, y) = r^{gamma} sum amp * h(r, y)`` for one spectral level."""

    j: int
    gamma: object
    beta: object
    lam: object
    ell: int
    terms: tuple = ()

    def h(self, r, y):
        r = np.asarray(r, dtype=float)
        out = np.zeros(r.shape)
        for amp, poly in self.terms:
            out = out + float(amp) * poly(r, y)
        return out

    def __call__(self, r, y):
        r = np.asarray(r, dtype=float)
        return r ** float(self.gamma) * self.h(r, y)

    def polynomial(self):
        """``sum amp * h`` as a :class:`Poly` in ``(r, y)``; exact for rational amplitudes."""
        total = Poly.zero(self.ell + 1)
        for amp, poly in self.terms:
            total = total + poly.full() * as_beta(amp)
        return total


@dataclass(frozen=True)
class JacobiField:
    components: dict

    def component(self, j, ell=1):
        if j in self.components:
            return self.components[j]
        return ModeProfile(j, 0, 0, 0, ell)

    def sum_of_squares(self, r, y):
        r = np.asarray(r, dtype=float)
        out = np.zeros(r.shape)
        for v in self.components.values():
            out = out + v(r, y) ** 2
        return out


def synthesize(spec):
    """Per-level profiles of the field described by ``spec``."""
    comps = {}
    for m in spec.modes:
        line = spec.levels[m.j]
        prev = comps.get(m.j)
        terms = (prev.terms if prev else ()) + ((m.amplitude, m.poly),)
        comps[m.j] = ModeProfile(m.j, line.gamma_plus, line.beta, line.lam, spec.ell, terms)
    return JacobiField(comps)


def _sample_points(ell, r_range, n_r=9, n_y=5):
    lo, hi = r_range
    r = np.geomspace(lo, hi, n_r)
    c = np.linspace(-0.5, 0.5, n_y)
    direction = 0.5 ** np.arange(ell)
    y = c[:, None] * direction[None, :]
    rr = np.repeat(r, n_y)
    yy = np.tile(y, (n_r, 1))
    return rr, yy


def _y_arg(y, ell):
    return y[..., 0] if ell == 1 else y


def _y_laplacian(fn, r, y, step, ell):
    lap = 0.0
    for k in range(ell):
        vals = []
        for o in _OFFSETS:
            yk = y.copy()
            yk[:, k] = yk[:, k] + o * step
            vals.append(fn(r, _y_arg(yk, ell)))
        lap = lap + np.tensordot(_D2, np.array(vals), axes=1) / step**2
    return lap


def separated_ode_residual(vj, cone, j, step=1e-2, r_range=DEFAULT_ANNULUS, ell=None, points=None):
    """Finite-difference residual of the separated equation for ``v_j``.

    With ``t = log r`` the equation
    ``r^{1-n} (r^{n-1} v')' + Delta_y v - lambda_j r^{-2} v = 0`` becomes
    ``v_tt + (n-2) v_t + r^2 Delta_y v - lambda_j v = 0``.  Derivatives use
    fourth-order central differences with spacing ``step`` in ``t`` and in
    ``y``.  The result is the largest residual divided by the largest sum of
    term magnitudes plus ``|v|`` over the sample points (zero for a zero
    profile).

    Raises
    ------
    ValueError
        If the annulus reaches ``r <= 0``.
    """
    lo, hi = r_range
    if not lo > 0:
        raise ValueError("the annulus must avoid the axis r = 0")
    if not hi > lo:
        raise ValueError("empty annulus")
    if ell is None:
        ell = getattr(vj, "ell", 1)
    lam = float(next(s for s in spectrum(cone, j) if s.j == j).lam)
    n = cone.n
    if points is None:
        r, y = _sample_points(ell, r_range)
    else:
        r, y = (np.asarray(x, dtype=float) for x in points)
        y = y.reshape(len(r), ell)
    t = np.log(r)
    vals = np.array([vj(np.exp(t + o * step), _y_arg(y, ell)) for o in _OFFSETS])
    v = vals[2]
    v_t = np.tensordot(_D1, vals, axes=1) / step
    v_tt = np.tensordot(_D2, vals, axes=1) / step**2
    lap_y = r**2 * _y_laplacian(vj, r, y, step, ell)
    terms = [v_tt, (n - 2) * v_t, lap_y, -lam * v]
    res = np.abs(sum(terms))
    scale = np.max(sum(np.abs(x) for x in terms) + np.abs(v))
    if scale == 0:
        return 0.0
    return float(np.max(res) / scale)


@dataclass(frozen=True)
class ProjectedMode:
    """``h_j = r^{-gamma_j} v_j`` with its weight exponent ``beta_j``."""

    beta: object
    gamma: object
    h: object
    polynomial: Poly = None
    exact_residual_zero: bool = None
    fd_residual: float = float("nan")


def beta_laplacian_fd(fn, beta, step=1e-3, r_range=(0.1, 1.0), ell=1, points=None):
    """Relative FD residual of ``h_rr + (1+beta)/r h_r + Delta_y h``.

    Fourth-order central differences in ``r`` and ``y``; normalised as in
    :func:`separated_ode_residual`.
    """
    if points is None:
        r, y = _sample_points(ell, r_range)
    else:
        r, y = (np.asarray(x, dtype=float) for x in points)
        y = y.reshape(len(r), ell)
    if np.min(r) - 2 * step <= 0:
        raise ValueError("stencil reaches the axis r = 0")
    vals = np.array([fn(r + o * step, _y_arg(y, ell)) for o in _OFFSETS])
    h_r = np.tensordot(_D1, vals, axes=1) / step
    h_rr = np.tensordot(_D2, vals, axes=1) / step**2
    terms = [h_rr, (1.0 + float(beta)) / r * h_r, _y_laplacian(fn, r, y, step, ell)]
    scale = np.max(sum(np.abs(x) for x in terms) + np.abs(vals[2]))
    if scale == 0:
        return 0.0
    return float(np.max(np.abs(sum(terms))) / scale)


def mode_projection_transform(vj, cone, j, step=1e-3, r_range=(0.1, 1.0), ell=None):
    """Strip the radial power: ``h = r^{-gamma_j} v_j`` satisfies the
    beta_j-Laplace equation.  Exact symbolic check when ``vj`` is a
    synthesized profile; finite-difference residual always."""
    line = next(s for s in spectrum(cone, j) if s.j == j)
    gamma = line.gamma_plus
    if ell is None:
        ell = getattr(vj, "ell", 1)

    if isinstance(vj, ModeProfile):
        h = vj.h
        poly = vj.polynomial()
    else:

        def h(r, y):
            r = np.asarray(r, dtype=float)
            return r ** (-float(gamma)) * vj(r, y)

        poly = None
    exact = None
    if poly is not None:
        exact = apply_beta_laplacian(poly, as_beta(line.beta)).is_zero()
    fd = beta_laplacian_fd(h, line.beta, step=step, r_range=r_range, ell=ell)
    return ProjectedMode(line.beta, gamma, h, poly, exact, fd)


@dataclass(frozen=True)
class AvintProfile:
    radii: tuple
    analytic: tuple
    quadrature: tuple
    profile: GrowthProfile

    @property
    def relative_gap(self):
        out = []
        for a, q in zip(self.analytic, self.quadrature):
            out.append(abs(a - q) / abs(a) if a else abs(q))
        return tuple(out)


def _level_gram(modes):
    """``{q: sum_{a,b} amp_a amp_b <h_a, h_b>_{nu_+}}`` for one level."""
    by_q = {}
    for m in modes:
        by_q.setdefault(m.q, []).append(m)
    out = {}
    for q, group in by_q.items():
        total = 0.0
        for a in group:
            for b in group:
                total += float(a.amplitude) * float(b.amplitude) * float(sphere_inner_product(a.poly, b.poly))
        out[q] = total
    return out


def analytic_avint(spec):
    """``rho^{-ell-2-beta_1} int_{C cap B_rho} sum_j v_j^2`` as a growth profile.

    Term ``(j, q)`` contributes ``N^2 / (ell + 2 + beta_j + 2q)`` at exponent
    ``q + (beta_j - beta_1) / 2``.
    """
    exps, coeffs = [], []
    for j in sorted({m.j for m in spec.modes}):
        beta_j = spec.levels[j].beta
        for q, nsq in _level_gram([m for m in spec.modes if m.j == j]).items():
            exps.append(q + (as_beta(beta_j) - as_beta(spec.beta1)) / 2)
            coeffs.append(nsq / (spec.ell + 2 + float(beta_j) + 2 * q))
    if not exps:
        return GrowthProfile.analytic([0], [0.0], provenance="avint")
    return GrowthProfile.analytic(exps, coeffs, provenance="avint")


def _polar_cone_integral(fn, beta, ell, rho, n_radial=48, n_angle=48):
    """``int_{B_rho^+} fn(r, y)^2 r^{1+beta} dr dy`` in polar coordinates.

    ``r = s cos a``, ``|y| = s sin a``; Gauss-Jacobi in ``s^2`` for the
    radial power and in the angle for the ``cos^{1+beta}`` factor.  For
    ``ell >= 2`` the ``y`` sphere is handled by the same recursion used for
    the half-sphere measure, so this is independent of the closed form only
    through its nodes.
    """
    from .quadrature import half_sphere_measure

    meas = half_sphere_measure(ell, float(beta), order=n_angle if ell <= 2 else min(n_angle, 16))
    e = ell + 1 + float(beta)
    # int_0^rho s^e g(s) ds with s = rho * u^{1/2}: weight u^{(e-1)/2}
    u, wu = jacobi_unit_interval(n_radial, (e - 1) / 2.0, 0.0)
    s = rho * np.sqrt(u)
    total = 0.0
    for si, wi in zip(s, wu):
        pts = si * meas.nodes
        vals = fn(pts[:, 0], pts[:, 1:] if ell > 1 else pts[:, 1])
        total += wi * meas.integrate(vals**2)
    return 0.5 * rho ** (e + 1) * total


def avint_profile(spec, radii, n_radial=48, n_angle=48):
    """Averaged profile at ``radii``: analytic law and a direct quadrature.

    The quadrature integrates ``sum_j v_j^2 r^{n-1}`` over the cone ball
    using ``2 gamma_j + n - 1 = 1 + beta_j`` and orthonormality of ``phi_j``.
    """
    radii = np.asarray(radii, dtype=float)
    if np.any(radii <= 0) or np.any(np.diff(radii) <= 0):
        raise ValueError("radii must be positive and ascending")
    prof = analytic_avint(spec)
    field_ = synthesize(spec)
    norm_exp = spec.ell + 2 + float(spec.beta1)
    quad = []
    for rho in radii:
        total = 0.0
        for v in field_.components.values():
            total += _polar_cone_integral(v.h, v.beta, spec.ell, rho, n_radial, n_angle)
        quad.append(float(total * rho**-norm_exp))
    return AvintProfile(tuple(radii.tolist()), tuple(prof(radii).tolist()), tuple(quad), prof)


PROFILE_COLUMNS = ("rho", "avint_analytic", "avint_quadrature", "relative_gap")


def export_profile(avint, delimiter=","):
    buf = io.StringIO()
    buf.write(delimiter.join(PROFILE_COLUMNS) + "\n")
    for row in zip(avint.radii, avint.analytic, avint.quadrature, avint.relative_gap):
        buf.write(delimiter.join(f"{x:.17g}" for x in row) + "\n")
    return buf.getvalue()
