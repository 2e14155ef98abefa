import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from sepflow import families as fam
from sepflow.geometry import ConeDomain

from catalog_gen import TAGS, random_domain, random_member, random_points

E = math.e


def at_xy(s, x, y):
    return np.array(s.velocity_xy(x, y), dtype=float)


# -- velocity, pressure, gradient, vorticity examples --------------------------------

def test_linear_velocity():
    assert at_xy(fam.Linear(0, 1, -1), 2, 3) == pytest.approx([3, -2], abs=1e-14)


def test_powermode_velocity_on_axis():
    assert np.array(fam.PowerMode(3, 1, 0).u(1.0, 0.0)) == pytest.approx([1, 0], abs=1e-15)


def test_rotlog_velocity():
    u = np.array(fam.RotLog(0, 1).u(E, math.pi / 2))
    assert u == pytest.approx([-E, 0], abs=1e-14)


@pytest.mark.parametrize("s, point, expected", [
    (fam.PowerMode(3, 1, 0, 0), (2.0, 0.3), -32.0),
    (fam.Constant(0, 0, 7), (1.3, 2.0), 7.0),
    (fam.RotLog(1, 0, 0), (1.0, math.pi), 0.5),
])
def test_pressure_examples(s, point, expected):
    assert float(s.p(*point)) == pytest.approx(expected, abs=1e-13)


def test_rotlog_gradient_example():
    G = fam.RotLog(0, 1).grad_u(1 / E, 0.0)
    assert np.asarray(G) == pytest.approx(np.array([[0, 1], [0, 0]]), abs=1e-15)


def test_constant_and_linear_gradients():
    assert np.asarray(fam.Constant(1, 2, 3).grad_u(1.0, 0.4)) == pytest.approx(np.zeros((2, 2)))
    G = fam.Linear(1, 0, 0).grad_u(np.array([0.5, 2.0]), np.array([0.1, 4.0]))
    assert G == pytest.approx(np.array([[[1, 0], [0, -1]]] * 2))


def test_vorticity_examples():
    assert float(fam.PowerMode(2.5, 1.3, -0.4).w(1.7, 0.9)) == pytest.approx(0, abs=1e-14)
    assert float(fam.RotLog(1, 0).w(0.3, 1.0)) == pytest.approx(-2)
    assert float(fam.ShearX(0, 1).w(2.0, 0.5)) == pytest.approx(-1)
    # w = -(2 C2 ln r + C2 + 2 C1)
    r = 0.37
    assert float(fam.RotLog(0.4, -1.1).w(r, 1.0)) == pytest.approx(
        -(2 * -1.1 * math.log(r) - 1.1 + 0.8))


def test_vorticity_is_curl_of_velocity():
    rng = np.random.default_rng(0)
    for tag in TAGS:
        d = random_domain(rng, tag)
        s = random_member(rng, tag, d)
        r, t = random_points(rng, d, 50, 0.3, 2)
        G = np.asarray(s.grad_u(r, t))
        assert s.w(r, t) == pytest.approx(G[:, 0, 1] - G[:, 1, 0], abs=1e-12)


# -- the quadratic constraint set ---------------------------------------------------

@pytest.mark.parametrize("C", [(0, 0, 1, 1, 0), (1, 1, 1, 1, 0)])
def test_make_quadratic_accepts(C):
    assert fam.make_quadratic(*C).constants["C3"] == C[2]


def test_quadratic_from_c1c2_needs_a_nonzero_pair():
    with pytest.raises(ValueError):
        fam.quadratic_from_c1c2(0.0, 0.0)


def test_make_quadratic_rejects_with_residuals():
    with pytest.raises(fam.ConstraintViolation) as exc:
        fam.make_quadratic(1, 0, 1, 0)
    assert (exc.value.res1, exc.value.res2) == (1, 1)


@pytest.mark.parametrize("c12, c34", [((1, 1), (1, 1)), ((1, 0), (0, -1)), ((0, 1), (-1, 0))])
def test_quadratic_from_c1c2(c12, c34):
    q = fam.quadratic_from_c1c2(*c12)
    assert (q.C3, q.C4) == pytest.approx(c34, abs=1e-15)
    fam.make_quadratic(q.C1, q.C2, q.C3, q.C4)


@settings(max_examples=50, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5))
def test_quadratic_from_c1c2_satisfies_constraints(c1, c2):
    assume(c1 * c1 + c2 * c2 > 1e-200)
    q = fam.quadratic_from_c1c2(c1, c2)
    scale = max(1.0, c1 * c1 + c2 * c2)
    assert max(map(abs, fam.quadratic_residuals(q.C1, q.C2, q.C3, q.C4))) <= 1e-14 * scale
    # the quartic pressure coefficient vanishes on the constraint set
    assert abs(q.C1**2 + q.C2**2 - q.C3**2 - q.C4**2) <= 1e-13 * scale


# -- admissibility -----------------------------------------------------------------

def test_admissibility_examples():
    full, sector = ConeDomain.full_plane(), ConeDomain.sector(0.2, 2.5)
    assert fam.admissible(fam.PowerMode(3, 1, 0), full)
    bad = fam.admissible(fam.PowerMode(1.5, 1, 0), full)
    assert not bad and "λ≥3 and λ∈ℕ" in bad.reason
    assert fam.admissible(fam.PowerMode(1.5, 1, 0), sector)
    rot = fam.admissible(fam.RotLog(0, 1), full)
    assert not rot and "Ω≠ℝ²" in rot.reason
    assert fam.admissible(fam.RotLog(0, 1), sector)


@pytest.mark.parametrize("lam", [1, 2])
def test_powermode_excludes_one_and_two(lam):
    with pytest.raises(ValueError):
        fam.PowerMode(lam, 1, 0)


def test_rotlog_gradient_errors_at_apex_but_velocity_has_a_limit():
    s = fam.RotLog(0.5, 1.0)
    assert np.array(s.u(0.0, 0.0)) == pytest.approx([0, 0])
    with pytest.raises(fam.SingularPointError):
        s.grad_u(0.0, 0.0)


# -- structural identities ---------------------------------------------------------

def test_bernoulli_for_powermode():
    # irrotational: p + |u|^2 / 2 is constant
    s = fam.PowerMode(2.7, 0.8, -1.1, 0.25)
    r, t = np.geomspace(0.2, 3, 7), np.linspace(0.1, 3.0, 7)
    u1, u2 = s.u(r, t)
    assert s.p(r, t) + 0.5 * (u1**2 + u2**2) == pytest.approx(np.full(7, 0.25), abs=1e-12)


@pytest.mark.parametrize("tag", TAGS)
@pytest.mark.parametrize("sigma", [0.5, 2.0])
def test_scaling_law(tag, sigma):
    rng = np.random.default_rng(hash(tag) % 2**32)
    d = random_domain(rng, tag)
    s = random_member(rng, tag, d)
    sc = s.scaled(sigma)
    assert sc.tag == s.tag
    r, t = random_points(rng, d, 20, 0.2, 2)
    u = np.array(s.u(sigma * r, t))
    assert np.array(sc.u(r, t)) == pytest.approx(sigma * u, rel=1e-12, abs=1e-12)
    if tag != "rotlog":
        # rotlog pressure is multivalued in theta only through its additive branch
        assert sc.p(r, t) == pytest.approx(sigma**2 * s.p(sigma * r, t), rel=1e-12, abs=1e-12)


def test_pressure_gradient_matches_pressure():
    rng = np.random.default_rng(3)
    h = 1e-6
    for tag in TAGS:
        d = random_domain(rng, tag)
        s = random_member(rng, tag, d)
        r, t = random_points(rng, d, 10, 0.5, 2)
        x, y = r * np.cos(t), r * np.sin(t)
        gx = (s.pressure_xy(x + h, y) - s.pressure_xy(x - h, y)) / (2 * h)
        gy = (s.pressure_xy(x, y + h) - s.pressure_xy(x, y - h)) / (2 * h)
        px, py = s.grad_p(r, t)
        assert px == pytest.approx(gx, abs=1e-6 * (1 + np.abs(gx).max()))
        assert py == pytest.approx(gy, abs=1e-6 * (1 + np.abs(gy).max()))


def test_pressure_constant_field():
    s = fam.Linear(1, 2, 3, 4).with_pressure_constant(-1.0)
    assert s.C4 == -1.0
    assert fam.PowerMode.pressure_constant_field == "C3"


def test_families_are_immutable():
    s = fam.Constant(1, 2, 3)
    with pytest.raises(AttributeError):
        s.C1 = 5
