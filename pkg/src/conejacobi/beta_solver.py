"""Dirichlet problem for the beta-Laplacian on the half-ball.

The solver minimises the weighted energy

    E(u) = int_{B_1^+} (u_r^2 + |u_y|^2) r^{1+beta} dr dy

with prescribed trace on the unit half-sphere.  The half-ball is meshed in
polar coordinates ``(rho, angle)`` so the curved boundary is a grid line:

* ``ell == 1``: ``r = rho cos(theta)``, ``y = rho sin(theta)``,
  ``theta`` in ``(-pi/2, pi/2)``; the energy density carries
  ``rho^{2+beta} cos^{1+beta}(theta)``.
* ``ell >= 2`` with data depending on ``|y|`` only: ``r = rho cos(phi)``,
  ``s = |y| = rho sin(phi)``, ``phi`` in ``(0, pi/2)``; the density carries
  ``rho^{ell+1+beta} cos^{1+beta}(phi) sin^{ell-1}(phi)``.

The grid is cell-centred, so nothing is evaluated on the degenerate lines
where the weight vanishes, and the fluxes through those faces are zero.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.interpolate import CubicSpline, RectBivariateSpline
from scipy.special import roots_legendre

from .beta_poly import BetaPolynomial, as_beta, generate, radial_power, y_power
from .polynomial import Poly
from .quadrature import half_sphere_measure

POLAR_THETA = "polar(rho,theta)"
POLAR_RS = "polar(rho,phi) over (r,|y|)"


class SolverError(RuntimeError):
    """The linear solve did not reach the requested residual."""

    def __init__(self, message, iterations, residual):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


@dataclass(frozen=True)
class PolarGrid:
    """Cell-centred polar grid on the half-ball."""

    ell: int
    beta: float
    n_rho: int
    n_angle: int

    @property
    def coordinates(self):
        return POLAR_THETA if self.ell == 1 else POLAR_RS

    @property
    def angle_range(self):
        return (-math.pi / 2, math.pi / 2) if self.ell == 1 else (0.0, math.pi / 2)

    @property
    def d_rho(self):
        return 1.0 / self.n_rho

    @property
    def d_angle(self):
        lo, hi = self.angle_range
        return (hi - lo) / self.n_angle

    @property
    def rho(self):
        return (np.arange(self.n_rho) + 0.5) * self.d_rho

    @property
    def angle(self):
        return self.angle_range[0] + (np.arange(self.n_angle) + 0.5) * self.d_angle

    @property
    def radial_power(self):
        return self.ell + 1 + self.beta

    def angular_weight(self, a):
        w = np.abs(np.cos(a)) ** (1.0 + self.beta)
        if self.ell > 1:
            w = w * np.abs(np.sin(a)) ** (self.ell - 1)
        return w

    def angular_cell_weights(self, order=8):
        """``int_cell w(angle) d angle`` for every angular cell (Gauss-Legendre)."""
        x, wx = roots_legendre(order)
        edges = self.angle_range[0] + np.arange(self.n_angle + 1) * self.d_angle
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * self.d_angle
        pts = mid[:, None] + half * x[None, :]
        return half * (self.angular_weight(pts) @ wx)

    def radial_cell_weights(self, power):
        """``int_cell rho^power d rho`` for every radial cell (exact)."""
        edges = np.arange(self.n_rho + 1) * self.d_rho
        return (edges[1:] ** (power + 1) - edges[:-1] ** (power + 1)) / (power + 1)

    @property
    def leading_degree(self):
        """Lowest radial degree of an angularly varying beta-harmonic mode."""
        return 1 if self.ell == 1 else 2

    def angular_coupling_weights(self):
        """Radial factor of the angular fluxes.

        ``int_cell rho^{a-2} (rho / rho_i)^k d rho`` with ``k`` the leading
        degree: cell-centre values of ``rho^k`` modes then see the exact cell
        integral, which keeps the scheme second order at the origin.
        """
        k = self.leading_degree
        return self.radial_cell_weights(self.radial_power - 2.0 + k) / self.rho**k

    def points(self):
        """Cell centres as ``(r, y)``.

        For ``ell == 1`` ``y`` has the shape of ``r``; otherwise it has a
        trailing axis of length ``ell`` and the centre sits on the ``y_1``
        axis.
        """
        rho, ang = np.meshgrid(self.rho, self.angle, indexing="ij")
        r = rho * np.cos(ang)
        return r, _y_from_s(rho * np.sin(ang), self.ell)

    def boundary_nodes(self):
        """Half-sphere points at the angular centres of the outer faces."""
        ang = self.angle
        nodes = np.zeros((self.n_angle, self.ell + 1))
        nodes[:, 0] = np.cos(ang)
        nodes[:, 1] = np.sin(ang)
        return nodes


def _y_from_s(s, ell):
    if ell == 1:
        return s
    y = np.zeros(np.shape(s) + (ell,))
    y[..., 0] = s
    return y


def _node_y(nodes, ell):
    return nodes[:, 1] if ell == 1 else nodes[:, 1:]


def _polar_to_rs(r, y, ell):
    r = np.asarray(r, dtype=float)
    y = np.asarray(y, dtype=float)
    if ell == 1:
        s = y if y.shape == r.shape else y[..., 0]
    else:
        s = np.sqrt(np.sum(y * y, axis=-1))
    return np.hypot(r, s), np.arctan2(s, r)


@dataclass(frozen=True, eq=False)
class HalfBallField:
    """Scalar field on the half-ball stored at polar cell centres.

    ``values`` has shape ``(n_rho, n_angle)``; ``boundary`` holds the trace
    at the outer faces.  A field built by :func:`sample_field` keeps its
    generating function in ``source`` and evaluates it exactly.
    """

    grid: PolarGrid
    values: np.ndarray
    boundary: np.ndarray
    source: object = None
    iterations: int = 0
    residual: float = 0.0
    _spline: list = field(default_factory=list, repr=False, compare=False)

    @property
    def ell(self):
        return self.grid.ell

    @property
    def beta(self):
        return self.grid.beta

    @property
    def coordinates(self):
        return self.grid.coordinates

    def points(self):
        return self.grid.points()

    def _interpolant(self):
        if not self._spline:
            g = self.grid
            vals = self.values
            rho = g.rho
            ang = g.angle
            # reflect through the origin: (-rho, a) is (rho, -a) for ell == 1
            # and (rho, a) for y-radial data
            inner = vals[:2][::-1]
            if g.ell == 1:
                inner = inner[:, ::-1]
            vals = np.vstack([inner, vals, self.boundary[None, :]])
            rho = np.concatenate([-rho[:2][::-1], rho, [1.0]])
            lo, hi = g.angle_range
            # even reflection across both degenerate angular edges
            vals = np.hstack([vals[:, 1::-1], vals, vals[:, :-3:-1]])
            ang = np.concatenate([2 * lo - ang[1::-1], ang, 2 * hi - ang[:-3:-1]])
            self._spline.append(RectBivariateSpline(rho, ang, vals, kx=3, ky=3))
        return self._spline[0]

    def evaluate(self, r, y):
        """Field values at ``(r, y)`` (``r >= 0``, ``r^2 + |y|^2 <= 1``)."""
        r = np.asarray(r, dtype=float)
        if self.source is not None:
            return np.asarray(self.source(r, y), dtype=float)
        rho, ang = _polar_to_rs(r, y, self.ell)
        return self._interpolant()(np.clip(rho, 0.0, 1.0), ang, grid=False)

    def on_sphere(self, radius, nodes):
        """Values of ``u(radius * omega)`` at half-sphere nodes ``(N, ell+1)``."""
        nodes = np.asarray(nodes, dtype=float)
        return self.evaluate(radius * nodes[:, 0], radius * _node_y(nodes, self.ell))


def _trace_function(boundary_trace, ell):
    """Normalise a boundary trace to a callable on half-sphere nodes."""
    if isinstance(boundary_trace, BetaPolynomial):
        return boundary_trace.trace
    if isinstance(boundary_trace, Poly):
        return lambda nodes: boundary_trace(*np.asarray(nodes, dtype=float).T)
    if isinstance(boundary_trace, tuple) and len(boundary_trace) == 2:
        angles, vals = (np.asarray(x, dtype=float) for x in boundary_trace)
        spline = CubicSpline(angles, vals)

        def from_samples(nodes):
            nodes = np.asarray(nodes, dtype=float)
            s = nodes[:, 1] if ell == 1 else np.linalg.norm(nodes[:, 1:], axis=1)
            return spline(np.arctan2(s, nodes[:, 0]))

        return from_samples
    if callable(boundary_trace):
        return boundary_trace
    if np.isscalar(boundary_trace):
        c = float(boundary_trace)
        return lambda nodes: np.full(len(nodes), c)
    raise TypeError("boundary trace must be a polynomial, callable, constant or (angles, values)")


def assemble(grid, boundary_values):
    """Energy Hessian ``A`` and load ``b`` of the discrete Dirichlet energy.

    The discrete energy is ``u^T A u - 2 b^T u + const``; unknowns are
    ordered ``i * n_angle + j`` (radial index ``i``).
    """
    nr, na = grid.n_rho, grid.n_angle
    dr, da = grid.d_rho, grid.d_angle
    a_pow = grid.radial_power
    ang_w = grid.angular_cell_weights()
    rad_w = grid.angular_coupling_weights()
    idx = np.arange(nr * na).reshape(nr, na)

    rows, cols, vals = [], [], []

    def couple(i0, i1, k):
        rows.extend([i0, i1, i0, i1])
        cols.extend([i0, i1, i1, i0])
        vals.extend([k, k, -k, -k])

    # radial faces rho = (i + 1) dr between cells i and i + 1
    face_rho = (np.arange(1, nr) * dr) ** a_pow
    k_rad = (face_rho[:, None] * ang_w[None, :] / dr).ravel()
    couple(idx[:-1].ravel(), idx[1:].ravel(), k_rad)
    # angular faces between j and j + 1
    face_ang = grid.angle_range[0] + np.arange(1, na) * da
    k_ang = (rad_w[:, None] * grid.angular_weight(face_ang)[None, :] / da).ravel()
    couple(idx[:, :-1].ravel(), idx[:, 1:].ravel(), k_ang)
    # outer Dirichlet faces: half-cell distance to rho = 1
    k_bnd = ang_w / (0.5 * dr)
    rows.append(idx[-1])
    cols.append(idx[-1])
    vals.append(k_bnd)

    rows = np.concatenate([np.atleast_1d(np.asarray(x)).ravel() for x in rows])
    cols = np.concatenate([np.atleast_1d(np.asarray(x)).ravel() for x in cols])
    vals = np.concatenate([np.atleast_1d(np.asarray(x, dtype=float)).ravel() for x in vals])
    A = sp.csr_matrix((vals, (rows, cols)), shape=(nr * na, nr * na))
    A.sum_duplicates()
    b = np.zeros(nr * na)
    b[idx[-1]] = k_bnd * boundary_values
    return A, b, k_bnd


def pcg(A, b, rtol=1e-10, maxiter=None, x0=None):
    """Jacobi-preconditioned conjugate gradients.

    Stops when the true residual satisfies ``|b - A x| <= rtol |b|``.

    Returns
    -------
    x, iterations, relative_residual

    Raises
    ------
    SolverError
        If the tolerance is not met within ``maxiter`` iterations.
    """
    n = len(b)
    if maxiter is None:
        maxiter = int(50 * math.sqrt(n)) + 1
    bnorm = np.linalg.norm(b)
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    if bnorm == 0.0:
        return np.zeros(n), 0, 0.0
    dinv = 1.0 / A.diagonal()
    r = b - A @ x
    z = dinv * r
    p = z.copy()
    rz = r @ z
    it = 0
    while it < maxiter:
        if np.linalg.norm(r) <= rtol * bnorm:
            r = b - A @ x
            if np.linalg.norm(r) <= rtol * bnorm:
                break
        ap = A @ p
        alpha = rz / (p @ ap)
        x += alpha * p
        r -= alpha * ap
        it += 1
        if it % 200 == 0:
            r = b - A @ x
        z = dinv * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    res = float(np.linalg.norm(b - A @ x) / bnorm)
    if res > rtol:
        raise SolverError(
            f"conjugate gradients stalled at relative residual {res:.3e} after {it} iterations",
            iterations=it,
            residual=res,
        )
    return x, it, res


def _grid_shape(grid):
    if isinstance(grid, int):
        return grid, grid
    n_rho, n_angle = grid
    return int(n_rho), int(n_angle)


def solve_dirichlet(beta, ell, boundary_trace, grid=64, rtol=1e-10, maxiter=None):
    """Minimise the weighted Dirichlet energy with the given trace.

    Parameters
    ----------
    beta : float
        Weight exponent, ``beta > 0``.
    ell : int
        Number of ``y`` variables.  For ``ell >= 2`` the trace must depend
        on ``|y|`` only.
    boundary_trace : BetaPolynomial, Poly, callable, constant or (angles, values)
        Callables receive half-sphere nodes of shape ``(N, ell + 1)``.
        Samples are interpolated with a cubic spline in the polar angle.
    grid : int or (int, int)
        Cells in ``rho`` and in the angle; at least 8 each.

    Raises
    ------
    ValueError
        For a degenerate grid or non-positive ``beta``.
    SolverError
        When conjugate gradients does not converge.
    """
    beta = float(beta)
    if not beta > 0:
        raise ValueError("beta must be positive")
    if ell < 1:
        raise ValueError("ell must be >= 1")
    n_rho, n_angle = _grid_shape(grid)
    if n_rho < 8 or n_angle < 8:
        raise ValueError(f"grid needs at least 8 cells per dimension, got {n_rho}x{n_angle}")
    g = PolarGrid(int(ell), beta, n_rho, n_angle)
    trace = _trace_function(boundary_trace, ell)
    bvals = np.asarray(trace(g.boundary_nodes()), dtype=float)
    if not np.all(np.isfinite(bvals)):
        raise ValueError("boundary trace must be finite")
    A, b, _ = assemble(g, bvals)
    # start from the trace extended constantly along rays
    x0 = np.tile(bvals, n_rho)
    u, its, res = pcg(A, b, rtol=rtol, maxiter=maxiter, x0=x0)
    values = u.reshape(n_rho, n_angle)
    values.setflags(write=False)
    bvals.setflags(write=False)
    return HalfBallField(g, values, bvals, iterations=its, residual=res)


def sample_field(fn, beta, ell, grid=64):
    """Field on the polar grid with ``fn(r, y)`` kept for exact evaluation.

    ``fn`` receives ``y`` shaped like ``r`` when ``ell == 1`` and with a
    trailing axis of length ``ell`` otherwise.
    """
    n_rho, n_angle = _grid_shape(grid)
    g = PolarGrid(int(ell), float(beta), n_rho, n_angle)
    r, y = g.points()
    values = np.asarray(fn(r, y), dtype=float)
    nodes = g.boundary_nodes()
    bvals = np.asarray(fn(nodes[:, 0], _node_y(nodes, g.ell)), dtype=float)
    values.setflags(write=False)
    bvals.setflags(write=False)
    return HalfBallField(g, values, bvals, source=fn)


def weak_form_residual(field):
    """``max |A u - b| / max |b|``: the discrete weak form tested against every
    interior cell basis function."""
    A, b, _ = assemble(field.grid, field.boundary)
    res = A @ field.values.ravel() - b
    scale = np.max(np.abs(b))
    return float(np.max(np.abs(res)) / scale) if scale else float(np.max(np.abs(res)))


def discrete_energy(field):
    """Discrete weighted Dirichlet energy of the stored values."""
    A, b, k_bnd = assemble(field.grid, field.boundary)
    u = field.values.ravel()
    return float(u @ (A @ u) - 2.0 * b @ u + np.dot(k_bnd, field.boundary**2))


def weighted_l2(field):
    """``int_{B_1^+} u^2 r^{1+beta} dr dy`` by the cell-centred rule."""
    g = field.grid
    w = g.radial_cell_weights(g.radial_power)[:, None] * g.angular_cell_weights()[None, :]
    return float(np.sum(w * field.values**2))


def max_error(field, exact):
    """Largest cell-centre deviation from ``exact(r, y)``."""
    r, y = field.points()
    return float(np.max(np.abs(field.values - exact(r, y))))


def observed_order(spacings, errors):
    """Least-squares slope of ``log(error)`` against ``log(spacing)``."""
    return float(np.polyfit(np.log(spacings), np.log(errors), 1)[0])


@dataclass(frozen=True)
class AxisRegularity:
    max_dr: float
    even_defect: float


def _dr_near_axis(field, k_outer, k_inner):
    """``d_r u`` at the angular midpoint between layers ``k_outer`` and ``k_inner``."""
    g = field.grid
    u = field.values
    a = 0.5 * (g.angle[k_outer] + g.angle[k_inner])
    du_da = (u[:, k_outer] - u[:, k_inner]) / (g.angle[k_outer] - g.angle[k_inner])
    um = 0.5 * (u[:, k_outer] + u[:, k_inner])
    du_drho = np.gradient(um, g.rho)
    rho = g.rho
    # r = rho cos a; y (or s) = rho sin a
    dr = np.cos(a) * du_drho - np.sin(a) / rho * du_da
    return rho * np.cos(a), dr


def axis_regularity_check(field):
    """Estimate ``d_r u`` at the first cell layer next to the axis ``r = 0``.

    Returns ``max_dr``, the largest estimate of ``|d_r u|`` midway between
    the two layers closest to the axis, and ``even_defect``, the one-sided
    angular difference ``|u_0 - u_1| / (rho dangle)`` across those layers,
    which is the normal-derivative jump of the even reflection.  Both are
    first order in the grid spacing for fields extending evenly across
    ``r = 0``.
    """
    g = field.grid
    edges = [(-1, -2)]
    if g.ell == 1:
        edges.append((0, 1))
    max_dr = 0.0
    defect = 0.0
    for k0, k1 in edges:
        _, d = _dr_near_axis(field, k0, k1)
        max_dr = max(max_dr, float(np.max(np.abs(d))))
        jump = np.abs(field.values[:, k0] - field.values[:, k1]) / (g.rho * g.d_angle)
        defect = max(defect, float(np.max(jump)))
    return AxisRegularity(max_dr, defect)


def hardy_ratio(field):
    """``int r^{-2} u^2 dmu_+ / int u_r^2 dmu_+`` on the grid.

    ``u_r`` comes from centred differences in ``(rho, angle)``; for fields
    vanishing on the outer boundary the ratio stays below ``(2/beta)^2``.
    """
    g = field.grid
    u = field.values
    rho = g.rho
    ang = g.angle
    rr, aa = np.meshgrid(rho, ang, indexing="ij")
    du_drho = np.gradient(u, rho, axis=0)
    du_da = np.gradient(u, ang, axis=1)
    ur = np.cos(aa) * du_drho - np.sin(aa) / rr * du_da
    r = rr * np.cos(aa)
    w = g.radial_cell_weights(g.radial_power)[:, None] * g.angular_cell_weights()[None, :]
    num = float(np.sum(w * u**2 / r**2))
    den = float(np.sum(w * ur**2))
    return num / den if den else 0.0


@dataclass(frozen=True)
class ModeExpansion:
    """Coefficients of ``u(rho * omega)`` against normalised beta-harmonic traces."""

    degrees: tuple
    coefficients: tuple
    norms: tuple
    rho: float
    beta: float
    ell: int
    polys: tuple = field(repr=False)
    trace_norm_sq: float = 0.0
    residual: float = 0.0
    source: object = field(default=None, repr=False, compare=False)

    @property
    def truncation(self):
        return max(self.degrees, default=-1)


def mode_basis(beta, ell, max_degree):
    """Beta-harmonic basis used for expansions: ``h_q`` from ``y^q`` when
    ``ell == 1``, from ``|y|^q`` (even ``q``) for y-radial data."""
    if ell == 1:
        return [generate(beta, 1, y_power(1, q)) for q in range(max_degree + 1)]
    return [generate(beta, ell, radial_power(ell, q)) for q in range(0, max_degree + 1, 2)]


def expand_on_sphere(field, rho, max_degree, order=None):
    """Project ``u(rho * .)`` onto the normalised traces ``h_q / N_q``.

    Raises
    ------
    ValueError
        If ``rho`` lies outside ``(0, 1)``.
    """
    if not 0 < rho < 1:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    if max_degree < 0:
        raise ValueError("max_degree must be >= 0")
    beta = as_beta(field.beta)
    ell = field.ell
    if order is None:
        order = max_degree + 4 if field.source is not None else max(48, max_degree + 4)
    measure = half_sphere_measure(ell, float(beta), order=order)
    nodes = measure.nodes
    if ell > 1:
        # y-radial data: put every node on the y_1 axis
        s = np.linalg.norm(nodes[:, 1:], axis=1)
        nodes = np.zeros_like(nodes)
        nodes[:, 0] = measure.nodes[:, 0]
        nodes[:, 1] = s
    u = field.on_sphere(rho, nodes)
    polys = mode_basis(beta, ell, max_degree)
    degrees, coeffs, norms = [], [], []
    recon = np.zeros_like(u)
    for h in polys:
        hv = h.trace(nodes)
        norm = math.sqrt(measure.integrate(hv * hv))
        c = measure.integrate(u * hv) / norm
        degrees.append(h.degree)
        coeffs.append(c)
        norms.append(norm)
        recon += c * hv / norm
    total = measure.integrate(u * u)
    resid = math.sqrt(max(measure.integrate((u - recon) ** 2), 0.0))
    return ModeExpansion(
        degrees=tuple(degrees),
        coefficients=tuple(coeffs),
        norms=tuple(norms),
        rho=float(rho),
        beta=float(beta),
        ell=ell,
        polys=tuple(polys),
        trace_norm_sq=total,
        residual=resid,
        source=field,
    )


@dataclass(frozen=True)
class Reconstruction:
    values: np.ndarray
    gap: float


def half_ball_points(radius, ell=1, n=41):
    """Sample points filling ``B_radius^+`` (polar lattice including the axis)."""
    rho = np.linspace(0.0, radius, n)
    lo = -math.pi / 2 if ell == 1 else 0.0
    ang = np.linspace(lo, math.pi / 2, n)
    rr, aa = np.meshgrid(rho, ang, indexing="ij")
    r = (rr * np.cos(aa)).ravel()
    return np.clip(r, 0.0, None), _y_from_s((rr * np.sin(aa)).ravel(), ell)


def reconstruct(expansion, points=None, source=None):
    """Evaluate ``sum_q c_q rho_s^{-q} h_q / N_q`` at ``points = (r, y)``.

    The gap is the sup-norm difference from ``source`` (default: the field
    the expansion was taken from) over the same points; by default the
    points fill ``B_rho^+`` for the sampling radius.
    """
    if points is None:
        points = half_ball_points(expansion.rho, expansion.ell)
    r, y = points
    r = np.asarray(r, dtype=float)
    vals = np.zeros(r.shape)
    for h, c, nq in zip(expansion.polys, expansion.coefficients, expansion.norms):
        vals = vals + (c / (expansion.rho**h.degree * nq)) * h(r, y)
    ref = source if source is not None else expansion.source
    gap = float("nan")
    if ref is not None:
        ref_vals = ref.evaluate(r, y) if isinstance(ref, HalfBallField) else ref(r, y)
        gap = float(np.max(np.abs(vals - np.asarray(ref_vals, dtype=float))))
    return Reconstruction(vals, gap)


def export_field(field):
    """Delimited text: ``#`` header with metadata, then ``rho,angle,value``
    rows for the cells followed by the outer-face trace at ``rho = 1``."""
    g = field.grid
    buf = io.StringIO()
    buf.write("# conejacobi half-ball field\n")
    buf.write(f"# ell={g.ell}\n")
    buf.write(f"# beta={float(g.beta)!r}\n")
    buf.write(f"# grid={g.n_rho}x{g.n_angle}\n")
    buf.write(f"# coordinates={g.coordinates}\n")
    buf.write("rho,angle,value\n")
    for i, rho in enumerate(g.rho):
        for j, a in enumerate(g.angle):
            buf.write(f"{rho:.17g},{a:.17g},{field.values[i, j]:.17g}\n")
    for j, a in enumerate(g.angle):
        buf.write(f"{1.0:.17g},{a:.17g},{field.boundary[j]:.17g}\n")
    return buf.getvalue()


def load_field(text):
    """Inverse of :func:`export_field` (values reload bit-exactly)."""
    meta = {}
    rows = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            if val:
                meta[key.strip()] = val.strip()
        elif line and not line.startswith("rho"):
            rows.append([float(x) for x in line.split(",")])
    try:
        ell = int(meta["ell"])
        beta = float(meta["beta"])
        n_rho, n_angle = (int(x) for x in meta["grid"].split("x"))
    except KeyError as exc:
        raise ValueError(f"field header lacks {exc}") from None
    data = np.array(rows)
    if data.shape != (n_rho * n_angle + n_angle, 3):
        raise ValueError("field body does not match the declared grid")
    g = PolarGrid(ell, beta, n_rho, n_angle)
    values = data[: n_rho * n_angle, 2].reshape(n_rho, n_angle)
    boundary = data[n_rho * n_angle :, 2].copy()
    values.setflags(write=False)
    boundary.setflags(write=False)
    return HalfBallField(g, values, boundary)


def field_to_dict(field):
    """JSON-ready description of a field; floats survive a dump/load cycle."""
    g = field.grid
    return {
        "kind": "half_ball_field",
        "ell": g.ell,
        "beta": float(g.beta),
        "grid": [g.n_rho, g.n_angle],
        "coordinates": g.coordinates,
        "rho": g.rho.tolist(),
        "angle": g.angle.tolist(),
        "values": field.values.tolist(),
        "boundary": field.boundary.tolist(),
        "iterations": field.iterations,
        "residual": field.residual,
    }


def field_from_dict(data):
    try:
        ell = int(data["ell"])
        beta = float(data["beta"])
        n_rho, n_angle = (int(x) for x in data["grid"])
        values = np.array(data["values"], dtype=float)
        boundary = np.array(data["boundary"], dtype=float)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed field description: {exc}") from None
    if values.shape != (n_rho, n_angle) or boundary.shape != (n_angle,):
        raise ValueError("field arrays do not match the declared grid")
    values.setflags(write=False)
    boundary.setflags(write=False)
    g = PolarGrid(ell, beta, n_rho, n_angle)
    return HalfBallField(g, values, boundary, iterations=int(data.get("iterations", 0)), residual=float(data.get("residual", 0.0)))


def read_field(text):
    """Load a field from either the JSON form or the delimited text export."""
    if text.lstrip().startswith("{"):
        return field_from_dict(json.loads(text))
    return load_field(text)
