"""Export a sampled field to CSV, read it back and recover family and constants."""
import tempfile
from pathlib import Path

from sepflow import families as fam
from sepflow.classifier import FieldSamples, classify
from sepflow.fileio import export_grid, read_grid
from sepflow.geometry import ConeDomain
from sepflow.verifier import GridSpec

cases = [
    (fam.PowerMode(1.7, 0.8, -0.3, 0.1), ConeDomain.sector(0.2, 2.6)),
    (fam.RotLog(1.0, -1.0, 0.0), ConeDomain.half_plane()),
    (fam.ShearY(0.6, -1.2, 0.4), ConeDomain.full_plane()),
    (fam.quadratic_from_c1c2(-0.4, 1.1, 2.0), ConeDomain.full_plane()),
]

with tempfile.TemporaryDirectory() as tmp:
    for s, d in cases:
        path = Path(tmp) / f"{s.tag}.csv"
        export_grid(s, GridSpec(d, 0.5, 2.0, 10, 20, theta_margin=0.05), path)
        data = read_grid(path)
        res = classify(FieldSamples(data.radii, data.angles, data.u1, data.u2, data.p), d)
        print(f"{s.tag:10s} -> {res.tag:10s} residual {res.fit_residual:.1e}")
        for k, v in s.constants.items():
            print(f"    {k}: {v: .12f}  recovered {res.constants[k]: .12f}")
