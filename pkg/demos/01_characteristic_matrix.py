"""Characteristic-matrix basics on the scalar delayed-feedback equation.

The equation x'(t) = -x(t - 1) is the classic testbed: its Floquet-style
multipliers are exactly exp(W_k(-1)) over the branches of the Lambert W
function, so every number printed below can be checked against
scipy.special.lambertw.

We build the characteristic matrix Delta(z), evaluate its determinant along
a few points, then run the contour-based root finder and compare each root
against the closed form.
"""

import numpy as np
import scipy.special

from ddewave import CharMatrixEvaluator, SearchRegion, catalog, find_all

problem = catalog.make("scalar_linear", a=0.0, b=-1.0, tau=1.0)
ev = CharMatrixEvaluator(problem.coeffs, tol=1e-12, radius=25.0)

print("det Delta(z) samples (scalar case: 1 - z * exp(-z)):")
for z in (0.5 + 0.0j, 2.0 - 1.0j, -3.0 + 4.0j):
    det = ev.det_delta(z)
    closed = 1.0 - z * np.exp(-z)
    print(f"  z = {z:>12}:  det = {det:.12f}   closed form = {closed:.12f}")

# all multipliers mu = 1/z with |mu| >= 0.05
mset = find_all(ev, SearchRegion.disk(0.05))
print(f"\nfound {mset.total_count} characteristic roots with |mu| >= 0.05:")
print(f"{'z':>28} {'mu = 1/z':>28} {'|mu - exp(W_k(-1))|':>20}")
for rec in mset.roots:
    # nearest Lambert-W branch value
    err = min(abs(rec.mu - np.exp(scipy.special.lambertw(-1.0, k)))
              for k in range(-4, 5))
    print(f"{rec.z:>28.12f} {rec.mu:>28.12f} {err:>20.2e}")

print("\nall roots are simple:",
      all(r.multiplicity == 1 for r in mset.roots))
