"""Averaged growth of Jacobi fields on the Simons cone.

Builds a field from a few modes, tabulates its scale-normalised ball
average, recovers the exponents by a nonnegative fit and checks the
convexity and doubling laws on the resulting profile.

Run with ``python3 demos/growth_profiles.py``.
"""

from fractions import Fraction

import numpy as np

from conejacobi import cone_spectrum, cylinder_modes, growth
from conejacobi.cli import build_field_spec

spec = build_field_spec(3, 3, 1, [(1, 0, Fraction(1)), (1, 2, Fraction(1, 2)), (2, 1, Fraction(3))])
radii = 2.0 ** np.linspace(-3, 2, 16)
prof = cylinder_modes.avint_profile(spec, radii)
print(cylinder_modes.export_profile(prof))

ladder = growth.exponent_ladder(cone_spectrum.spectrum(spec.cone, 2), 3)
samples = growth.GrowthProfile.sampled(radii, prof.quadrature)
fit = growth.fit_exponents(samples, ladder)
for q, b in zip(fit.ladder, fit.coefficients):
    if b > 1e-10:
        print(f"exponent {q}: coefficient {b:.6g}")

analytic = prof.profile
print("min psi second difference", growth.psi_convexity(analytic))
for d in growth.dichotomy_sweep(analytic, [3.0, 10.0], [0.25, 1.0, 4.0]):
    print(f"Q={d.Q:4g} rho={d.rho:4g} premise={d.premise!s:5} conclusion={d.conclusion!s:5}")
print(growth.liouville_gap(0.5).message)
