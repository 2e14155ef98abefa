"""The logarithmic swirl near the apex of a half-plane.

Its velocity vanishes at the corner but the gradient grows like |C2 ln r|,
and the Hoelder ratio only starts to decay far below desk radii.
"""
import numpy as np

from sepflow import families as fam
from sepflow.geometry import ConeDomain
from sepflow.verifier import blowup_profile, holder_check

UPPER = ConeDomain.half_plane()
radii = 2.0 ** -np.arange(5, 41)

for C1, C2 in [(0.0, 1.0), (5.0, 2.0), (1.0, 0.0)]:
    rep = blowup_profile(fam.RotLog(C1, C2), radii, domain=UPPER)
    print(f"C1={C1}, C2={C2}: {rep.message}")

s = fam.RotLog(0.0, 1.0)
for gamma in (0.5, 0.9, 0.99):
    h = holder_check(s, gamma, 2.0 ** -np.arange(1, 41, dtype=float), domain=UPPER)
    print(f"gamma={gamma}: verdict {h.verdict!r}, monotone below r = {h.certificate_radius:.3g}")
