"""Spectrum of cones over products of spheres and their stability.

Lists the first levels of the Simons cone with their exponents, compares the
stability margin across a few cones and shows the radial test function that
separates stable from unstable cones.

Run with ``python3 demos/spectrum_and_stability.py``.
"""

from fractions import Fraction

from conejacobi import cone_spectrum

simons = cone_spectrum.build_cone(3, 3)
print(cone_spectrum.export_spectrum(cone_spectrum.spectrum(simons, 6)))

print("cone   n  lambda_1  margin  classification")
for p, q in [(1, 1), (1, 5), (2, 2), (2, 4), (3, 3), (3, 5)]:
    cone = cone_spectrum.build_cone(p, q)
    rep = cone_spectrum.strict_stability(cone)
    print(f"({p},{q})  {cone.n:2d}  {str(rep.lambda_1):>8}  {str(rep.margin):>6}  {rep.classification}")

# the Hardy gap lambda = 1/4 survives on (3,3) and fails on (1,1)
for p, q in [(3, 3), (1, 1)]:
    cone = cone_spectrum.build_cone(p, q)
    fn, support = cone_spectrum.destabilizing_test_function(cone)
    ok = cone_spectrum.cone_stability_inequality(cone, fn, Fraction(1, 4), support=support)
    print(f"({p},{q}) stability inequality with lambda=1/4: {ok}")
