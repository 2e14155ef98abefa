import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sepflow.euler_system import (EulerCase, EulerSystem, classify_case, ode_residual,
                                  ode_residual_relative, solve)


def test_classify_examples():
    assert classify_case(1, 0, 1, 1).case is EulerCase.B0_EQUAL
    assert classify_case(1, 0, 1, 1).roots == (1.0,)
    info = classify_case(1, 1, 0, 0)
    assert info.case is EulerCase.REAL_DISTINCT and info.delta == 1
    assert info.roots == (1.0, 0.0)
    info = classify_case(0, 1, -1, 0)
    assert info.case is EulerCase.COMPLEX and info.delta == -4
    assert info.roots[0] == pytest.approx(1j)


def test_b0_distinct_and_double():
    assert classify_case(2, 0, 1, 1).case is EulerCase.B0_DISTINCT
    info = classify_case(1, 1, -0.25, 2)
    assert info.case is EulerCase.REAL_DOUBLE and info.roots == (1.5,)


R = np.array([0.3, 0.5, 1.0, 2.0, 5.0])


def test_case1_formulas():
    pair = solve(EulerSystem(1, 0, 1, 1, 1, 0))
    assert pair.phi1(R) == pytest.approx(R)
    assert pair.phi2(R) == pytest.approx(R * np.log(R))


def test_case3_formulas():
    pair = solve(EulerSystem(1, 1, 0, 0, 1, 1))
    assert pair.phi1(R) == pytest.approx(R + 1)
    assert pair.phi2(R) == pytest.approx(-np.ones_like(R))


def test_case5_formulas():
    pair = solve(EulerSystem(0, 1, -1, 0, 1, 0))
    assert pair.phi1(R) == pytest.approx(np.cos(np.log(R)))
    assert pair.phi2(R) == pytest.approx(-np.sin(np.log(R)))
    assert ode_residual(pair, EulerSystem(0, 1, -1, 0, 1, 0), math.e) == pytest.approx(
        [0, 0], abs=1e-12)


@pytest.mark.parametrize("abcd", [(1, 0, 1, 1), (2, 0, 1, -1), (1, 1, 0, 0),
                                  (1, 1, -0.25, 2), (0, 1, -1, 0)])
def test_residual_vanishes_at_one(abcd):
    sys = EulerSystem(*abcd, 0.7, -1.3)
    assert ode_residual(solve(sys), sys, 1.0) == pytest.approx([0, 0], abs=1e-12)


def test_perturbed_pair_is_caught():
    sys = EulerSystem(1, 0, 1, 1, 1, 0.5)
    res = ode_residual(solve(sys).perturbed(phi2_scale=1.01), sys, R)
    assert np.all(np.abs(res[0]) < 1e-12)
    assert np.all(np.abs(res[1]) > 1e-4)


def test_nonpositive_radius():
    sys = EulerSystem(1, 1, 0, 0)
    with pytest.raises(ValueError):
        ode_residual(solve(sys), sys, 0.0)


def _fd_residual(pair, sys, r, h=1e-6):
    # independent of the stored derivatives
    d1 = (pair.phi1(r * (1 + h)) - pair.phi1(r * (1 - h))) / (2 * h)
    d2 = (pair.phi2(r * (1 + h)) - pair.phi2(r * (1 - h))) / (2 * h)
    p1, p2 = pair.phi1(r), pair.phi2(r)
    return d1 - sys.a * p1 - sys.b * p2, d2 - sys.c * p1 - sys.d * p2


coef = st.floats(-3, 3, allow_nan=False)
# the case formulas divide by b, so keep it zero or of desk size
b_coef = st.one_of(st.just(0.0), coef.filter(lambda v: abs(v) >= 1e-3))


@settings(max_examples=200, deadline=None)
@given(coef, b_coef, coef, coef, coef, coef)
def test_closed_form_solves_system(a, b, c, d, C1, C2):
    sys = EulerSystem(a, b, c, d, C1, C2)
    pair = solve(sys)
    info = classify_case(a, b, c, d)
    assert pair.case is info.case
    for rho in info.root_pair:
        assert abs(rho * rho - (a + d) * rho + a * d - b * c) <= 1e-9 * (1 + abs(rho)) ** 2
    if info.case is EulerCase.REAL_DOUBLE and b != 0 and abs(info.delta) > 0:
        return  # near-double roots: the double-root formula is exact only at delta = 0
    assert ode_residual_relative(pair, sys, [0.5, 1.0, 2.0]) <= 1e-10
    scale = 1 + max(abs(x) for x in (a, b, c, d)) * (
        abs(pair.phi1(1.5)) + abs(pair.phi2(1.5)) + 1)
    assert np.max(np.abs(_fd_residual(pair, sys, 1.5))) <= 1e-6 * scale


def test_linear_independence_flag():
    assert solve(EulerSystem(1, 1, 0, 0, 1, 1)).linearly_independent
    assert not solve(EulerSystem(1, 1, 0, 0, 1, 0)).linearly_independent


def test_tiny_b_keeps_eigenvector_ratio():
    # (rho - a)/b cancels when b is tiny; c/(rho - d) does not
    sys = EulerSystem(-1.0, 1e-277, 1.0, 0.0, 0.0, 1.0)
    pair = solve(sys)
    assert pair.case is EulerCase.REAL_DISTINCT
    assert ode_residual_relative(pair, sys, [0.5, 1.0, 2.0]) <= 1e-14
    assert pair.phi2(1.0) == pytest.approx(-1.0)
