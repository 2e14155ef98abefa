import math

import numpy as np
import pytest

from sepflow import families as fam
from sepflow.classifier import FieldSamples, classify
from sepflow.fileio import (ConfigError, GridFormatError, RunConfig, build_solution,
                            export_grid, parse_config, read_grid, render_config)
from sepflow.geometry import ConeDomain
from sepflow.verifier import GridSpec

from catalog_gen import TAGS, random_domain, random_member


def test_parse_powermode():
    cfg = parse_config("family=powermode\nlambda=3\nc1=1\nc2=0\nc3=0\ndomain=fullplane")
    assert cfg.solution() == fam.PowerMode(3, 1, 0, 0)
    assert cfg.domain.is_full_plane


def test_inadmissible_config_cites_the_rule():
    with pytest.raises(ConfigError, match="λ≥3 and λ∈ℕ"):
        parse_config("family=powermode\nlambda=1.5\ndomain=fullplane")


def test_quadratic_constraint_error():
    with pytest.raises(ConfigError, match=r"residuals \(1, 1\)"):
        parse_config("family=quadratic\nc1=1\nc2=0\nc3=1\nc4=0")


@pytest.mark.parametrize("text, where", [
    ("family=constant\ncolour=red", "line 2"),
    ("family=constant\nc1=1\nc1=2", "line 3"),
    ("# note\nfamily=linear\nc1=abc", "line 3"),
    ("family=constant\njunk", "line 2"),
])
def test_parse_errors_carry_line_numbers(text, where):
    with pytest.raises(ConfigError, match=where):
        parse_config(text)


@pytest.mark.parametrize("text", [
    "c1=1",
    "family=vortex",
    "family=rotlog\nc2=1\ndomain=fullplane",
    "family=linear\nlambda=2",
    "family=powermode\nc1=1\ndomain=sector",
    "family=constant\ndomain=sector\nalpha=2\nbeta=1",
    "family=constant\nrmin=3\nrmax=1",
    "family=constant\nalpha=1",
])
def test_rejected_configs(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_comments_case_and_halfplane():
    cfg = parse_config("FAMILY = rotlog   # swirl\n\nc1=0.5\nc2=-1\ndomain=halfplane\nnr=4")
    assert cfg.solution() == fam.RotLog(0.5, -1.0)
    assert cfg.domain == ConeDomain.half_plane() and cfg.nr == 4


@pytest.mark.parametrize("text", [
    "family=powermode\nlambda=2.5\nc1=0.1\nc2=-3e-7\nc3=1\ndomain=sector\nalpha=0.2\nbeta=3.1",
    "family=quadratic\nc1=1\nc2=1\nc3=1\nc4=1\nc5=0.3\nnr=9\nntheta=20",
    "family=shearx\nc1=0.1\nc2=0.2\nc3=0.30000000000000004\nrmin=0.25\nrmax=4",
])
def test_render_round_trip(text):
    cfg = parse_config(text)
    assert parse_config(render_config(cfg)) == cfg


def test_build_solution_validates():
    with pytest.raises(ConfigError):
        build_solution("constant", (1, 2, 3, 4))
    with pytest.raises(ConfigError):
        build_solution("powermode", (1.0,))


def test_export_constant_grid(tmp_path):
    path = tmp_path / "c.csv"
    assert export_grid(fam.Constant(1, 2, 3), GridSpec(ConeDomain.half_plane(), n_r=2, n_theta=2), path) == 0
    lines = path.read_text().splitlines()
    assert lines[0] == "x,y,u1,u2,p,w" and len(lines) == 5
    rows = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    assert np.all(rows[:, 2:] == [1, 2, 3, 0])


def test_export_powermode_row(tmp_path):
    path = tmp_path / "p.csv"
    export_grid(fam.PowerMode(3, 1, 0), GridSpec(ConeDomain.full_plane(), 1.0, 2.0, 2, 4), path)
    first = [float(v) for v in path.read_text().splitlines()[1].split(",")]
    assert first[:3] == [1.0, 0.0, 1.0] and first[5] == 0.0


def test_export_rotlog_near_apex(tmp_path):
    path = tmp_path / "r.csv"
    s = fam.RotLog(0.2, -1.0)
    export_grid(s, GridSpec(ConeDomain.half_plane(), 1e-8, 1.0, 3, 4), path)
    data = read_grid(path)
    assert np.all(np.isfinite(data.u1)) and np.all(np.abs(data.u1[0]) < 1e-6)
    # w = -(2 C2 ln r + C2 + 2 C1) is large and negative for C2 < 0 near the apex
    assert np.all(data.w[0] < -30)


def test_export_is_bit_exact(tmp_path):
    s = fam.PowerMode(2.7, math.pi, -1 / 3, 0.1)
    g = GridSpec(ConeDomain.sector(0.3, 2.9), 0.5, 2.0, 8, 16)
    export_grid(s, g, tmp_path / "f.csv")
    data = read_grid(tmp_path / "f.csv")
    R, T = g.mesh()
    assert np.array_equal(data.u1, s.u(R, T)[0])
    assert np.allclose(data.radii, g.radii, rtol=1e-14)
    assert np.allclose(data.angles, g.angles, atol=1e-14)


def test_read_grid_rejects_bad_files(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(GridFormatError):
        read_grid(p)
    p.write_text("x,y,u1,u2,p,w\n1,0,1,1,1,1\n0,1,1,1,1,1\n2,0,1,1,1,1\n0,1.5,1,1,1,1\n")
    with pytest.raises(GridFormatError):
        read_grid(p)


@pytest.mark.parametrize("tag", TAGS)
def test_export_classify_round_trip(tag, tmp_path):
    rng = np.random.default_rng(7 + len(tag))
    d = random_domain(rng, tag)
    s = random_member(rng, tag, d)
    g = GridSpec(d, 0.5, 2.0, 10, 20, theta_margin=0.05)
    export_grid(s, g, tmp_path / "f.csv")
    data = read_grid(tmp_path / "f.csv")
    res = classify(FieldSamples(data.radii, data.angles, data.u1, data.u2, data.p), d)
    assert res.tag == tag
    want = np.array([float(v) for v in s.constants.values()])
    got = np.array([float(res.constants[k]) for k in s.constants])
    assert np.linalg.norm(got - want) <= 1e-6 * np.linalg.norm(want)


def test_runconfig_defaults():
    cfg = RunConfig("constant", (1.0,))
    assert cfg.grid().n_r == 8 and cfg.solution() == fam.Constant(1.0)
