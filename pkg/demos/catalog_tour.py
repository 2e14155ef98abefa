"""Walk the catalog: residuals from closed forms, then the finite-difference cross-check."""
import math

import numpy as np

from sepflow import families as fam
from sepflow.geometry import ConeDomain
from sepflow.verifier import GridSpec, convergence_order, relative_residual

UPPER = ConeDomain.half_plane()
members = [
    (fam.Constant(1.0, -0.5, 2.0), ConeDomain.full_plane()),
    (fam.Linear(0.3, 1.0, -0.7), ConeDomain.full_plane()),
    (fam.quadratic_from_c1c2(1.0, 0.5), ConeDomain.full_plane()),
    (fam.PowerMode(3, 1.0, 0.2), ConeDomain.full_plane()),
    (fam.PowerMode(2.5, 1.0, 0.2), UPPER),
    (fam.RotLog(0.5, -1.0), UPPER),
    (fam.ShearX(1.0, 2.0), ConeDomain.full_plane()),
    (fam.ShearY(-1.0, 0.5), UPPER),
]

rng = np.random.default_rng(0)
print("max relative residual (div, momentum, vorticity) at 1000 interior points")
for s, d in members:
    r = rng.uniform(0.1, 3.0, 1000)
    t = rng.uniform(d.alpha + 0.05, d.beta - 0.05, 1000)
    worst = [float(np.max(c)) for c in relative_residual(s, (r, t))]
    print(f"  {s.tag:10s} on {str(d):22s}", "  ".join(f"{w:.1e}" for w in worst))

print("\nfinite differences against closed forms, h = 1e-2, 5e-3, 2.5e-3")
for s, d in members:
    rep = convergence_order(s, GridSpec(d, n_r=4, n_theta=6), (1e-2, 5e-3, 2.5e-3))
    print(f"  {s.tag:10s}", ", ".join(f"{k}: {rep.message(k)}" for k in rep.order))

print(f"\nrotlog pressure at (1, pi/2): {float(fam.RotLog(0.5, -1.0).p(1.0, math.pi / 2)):.6f}")
