"""Degenerate-weight Dirichlet problem on the half-disc.

Solves with the trace of a beta-harmonic polynomial as boundary data,
measures the convergence order against the exact polynomial, then projects
the solution onto the polynomial modes and rebuilds it.

Run with ``python3 demos/dirichlet_solver.py``.
"""

import numpy as np

from conejacobi import beta_poly, beta_solver

beta = 1
h = beta_poly.standard_polynomial(beta, 1, 4)
print("h_4 =", " + ".join(f"({c}) r^{e[0]} y^{e[1]}" for e, c in sorted(h.full().terms.items())))

errors = []
for n in (16, 32, 64, 128):
    field = beta_solver.solve_dirichlet(beta, 1, h, n)
    errors.append(beta_solver.max_error(field, h))
    print(f"grid {n:3d}^2  iterations {field.iterations:4d}  max error {errors[-1]:.3e}")
print("observed orders", np.round(np.log2(np.array(errors[:-1]) / errors[1:]), 3))

ex = beta_solver.expand_on_sphere(field, 0.5, 6)
for q, c, norm in zip(ex.degrees, ex.coefficients, ex.norms):
    print(f"q={q}  coefficient {c: .6f}  expected {norm * 0.5 ** q if q == 4 else 0.0: .6f}")
print("reconstruction gap on B_0.5:", beta_solver.reconstruct(ex, source=h).gap)
