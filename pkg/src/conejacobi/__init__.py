"""Jacobi spectra of minimal cones, beta-harmonic polynomials, a
degenerate-weight Dirichlet solver, Jacobi fields on cylinders and the
growth laws of their averaged L^2 profiles."""

from .beta_poly import (
    BetaPolynomial,
    apply_beta_laplacian,
    generate,
    radial_power,
    sphere_inner_product,
    sphere_norm_sq,
    standard_polynomial,
    weighted_ball_l2,
    y_power,
)
from .beta_solver import (
    HalfBallField,
    ModeExpansion,
    SolverError,
    axis_regularity_check,
    expand_on_sphere,
    reconstruct,
    sample_field,
    solve_dirichlet,
)
from .cone_spectrum import (
    ConeSpec,
    SpectralLine,
    build_cone,
    cone_stability_inequality,
    hardy_check,
    spectrum,
    strict_stability,
)
from .cylinder_modes import JacobiFieldSpec, Mode, avint_profile, mode_projection_transform, separated_ode_residual, synthesize
from .growth import (
    GrowthProfile,
    doubling_dichotomy,
    exponent_ladder,
    fit_exponents,
    liouville_gap,
    psi_convexity,
)
from .polynomial import Poly

__version__ = "0.1.0"
