import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sepflow import families as fam
from sepflow.classifier import (DegenerateSamples, FieldSamples, Unclassifiable, classify,
                                fit_family, fit_lambda, proportionality_fit)
from sepflow.geometry import ConeDomain

from catalog_gen import TAGS, interior_angles, random_domain, random_member

RADII = np.geomspace(0.5, 2.0, 8)
FULL, UPPER = ConeDomain.full_plane(), ConeDomain.half_plane()


def samples(s, d, n_r=12, n_t=24):
    return FieldSamples.from_solution(s, np.geomspace(0.5, 2.0, n_r),
                                      interior_angles(d, n_t, margin=0.05))


def close(res, s, rel=1e-6):
    want = np.array([float(v) for v in s.constants.values()])
    got = np.array([float(res.constants[k]) for k in s.constants])
    return np.linalg.norm(got - want) <= rel * max(np.linalg.norm(want), 1e-300)


# -- proportionality and exponent fits ------------------------------------------

def test_proportionality_examples():
    p = proportionality_fit(2 * RADII, RADII)
    assert p.kind == "proportional" and p.lam == pytest.approx(2)
    assert proportionality_fit(0 * RADII, 0 * RADII).kind == "zero"
    assert proportionality_fit(RADII, RADII**2).kind == "independent"


def test_proportionality_needs_equal_counts():
    with pytest.raises(ValueError):
        proportionality_fit(RADII, RADII[:-1])


def test_fit_lambda_examples():
    f = fit_lambda(RADII, RADII**3)
    assert f.kind == "power" and f.lam == pytest.approx(3, abs=1e-9)
    f = fit_lambda(RADII, RADII * np.log(RADII))
    assert f.kind == "loglinear"
    assert (f.C1, f.C2) == pytest.approx((0, 1), abs=1e-9)
    with pytest.raises(Unclassifiable):
        fit_lambda(RADII, RADII + 1 / RADII)


def test_fit_lambda_prefers_power_when_both_fit():
    f = fit_lambda(RADII, 2.5 * RADII)
    assert f.kind == "power" and f.lam == pytest.approx(1)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 6), st.floats(0.2, 5), st.booleans())
def test_fit_lambda_recovers_exponents(lam, amp, neg):
    amp = -amp if neg else amp
    f = fit_lambda(RADII, amp * RADII**lam)
    assert f.kind == "power" or abs(lam - 1) < 1e-6
    assert f.lam == pytest.approx(lam, abs=1e-9)


# -- samples --------------------------------------------------------------------

def test_sample_requirements():
    t = np.linspace(0.1, 3, 16)
    z = np.zeros((8, 16))
    with pytest.raises(DegenerateSamples):
        FieldSamples(np.geomspace(1, 2, 8), t, z, z)
    with pytest.raises(DegenerateSamples):
        FieldSamples(RADII, t[:10], z[:, :10], z[:, :10])
    with pytest.raises(DegenerateSamples):
        FieldSamples(RADII, t, z, z[:, :15])
    bad = z.copy()
    bad[0, 0] = np.nan
    with pytest.raises(DegenerateSamples):
        FieldSamples(RADII, t, bad, z)


def test_separated_samples_have_rank_one():
    fs = samples(fam.PowerMode(2.5, 1.0, 0.4), UPPER)
    sv = np.linalg.svd(np.hstack([fs.u1, fs.u2]), compute_uv=False)
    assert sv[1] <= 1e-10 * sv[0]


# -- classification --------------------------------------------------------------

def test_powermode_example():
    s = fam.PowerMode(3, 1, 2)
    res = classify(samples(s, FULL), FULL)
    assert res.tag == "powermode" and res.constants["lam"] == 3
    assert close(res, s)


def test_rotlog_example():
    s = fam.RotLog(1, -1)
    res = classify(samples(s, UPPER), UPPER)
    assert res.tag == "rotlog" and close(res, s)


def test_divergent_field_is_unclassifiable():
    fs = samples(fam.Constant(), UPPER)
    R, T = fs.mesh()
    X = R * np.cos(T)
    with pytest.raises(Unclassifiable) as exc:
        classify(FieldSamples(fs.radii, fs.angles, X * X, 0 * X), UPPER)
    assert exc.value.diagnostics["divergence_residual"] > 0.1


def test_point_vortex_is_outside_the_catalog():
    fs = samples(fam.Constant(), UPPER)
    R, T = fs.mesh()
    with pytest.raises(Unclassifiable):
        classify(FieldSamples(fs.radii, fs.angles, -np.sin(T) / R, np.cos(T) / R), UPPER)


@pytest.mark.parametrize("s, d", [
    (fam.Linear(0.3, -1.0, 0.7, 0.2), FULL),
    (fam.RotLog(1.3, 0.0, 0.0), UPPER),       # rigid rotation is a linear member
    (fam.quadratic_from_c1c2(0.8, -1.1, 0.5), FULL),
    (fam.ShearX(0.4, 1.2, -0.3), FULL),
    (fam.ShearY(-0.9, 0.6, 0.1), UPPER),
    (fam.Constant(0.0, 0.0, 2.0), FULL),
])
def test_round_trip_cases(s, d):
    res = classify(samples(s, d), d)
    assert fam.admissible(res.solution(), d)
    if isinstance(s, fam.RotLog):
        assert res.tag == "linear"
        np.testing.assert_allclose(np.array(res.solution().u(1.3, 0.4)), s.u(1.3, 0.4),
                                   atol=1e-12)
    else:
        assert res.tag == s.tag and close(res, s)


@pytest.mark.parametrize("tag", TAGS)
def test_random_round_trip_and_scaling(tag):
    rng = np.random.default_rng(100 + len(tag))
    for _ in range(4):
        d = random_domain(rng, tag)
        s = random_member(rng, tag, d)
        res = classify(samples(s, d), d)
        assert res.tag == tag and close(res, s)
        assert res.fit_residual <= 1e-8
        for sigma in (0.5, 2.0):
            assert classify(samples(s.scaled(sigma), d), d).tag == tag


def test_without_pressure_the_constant_is_zero():
    s = fam.PowerMode(2.5, 1.0, 0.4, 3.0)
    fs = FieldSamples.from_solution(s, RADII, interior_angles(UPPER, 16), with_pressure=False)
    res = classify(fs, UPPER)
    assert res.constants["C3"] == 0.0


def test_classification_is_always_admissible():
    # a full-plane power mode at a fractional exponent cannot be emitted
    fs = samples(fam.PowerMode(2.5, 1.0, 0.0), ConeDomain.sector(0.1, 6.0))
    with pytest.raises(Unclassifiable):
        classify(fs, FULL)


def test_fit_family_reports_residual():
    s = fam.Linear(1.0, 2.0, -0.5, 0.0)
    consts, res = fit_family("linear", samples(s, FULL))
    assert res <= 1e-12
    consts, res = fit_family("constant", samples(s, FULL))
    assert res > 0.1
