"""Angular algebra behind the single-profile families.

For ``u = phi(r) (v1(t), v2(t))`` write

    A = cos t v1 + sin t v2,   L = sin t v1 - cos t v2,   H = A' + (lam+1) L.

When ``phi = C r**lam`` the vorticity is ``C r**(lam-1) H`` and the vorticity
equation splits into ``(lam-1) H A - H' L = 0`` and ``H'' + (lam-1)**2 H = 0``.
This module builds the general (A, L, H) solving the second equation and the
compatibility residuals the first one imposes on the constants.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .evaluators import Evaluator, linear_combination, product, trig


def trig_power_profile(order: int, C: float = 1.0, sine: bool = False) -> Evaluator:
    """Closed-form angular profiles.

    ``sine=False``: order 1 gives ``C cos t`` (solves ``sin t v + cos t v' = 0``),
    order 2 gives ``C cos^2 t`` (solves ``2 sin t v + cos t v' = 0``).
    ``sine=True``: ``C sin^a t`` for ``a = order`` in {0, 1, 2}, solving
    ``a cos t v - sin t v' = 0``.
    """
    if sine:
        if order == 0:
            return Evaluator.constant(C, order=2)
        if order == 1:
            return trig("sin", 1.0, 2).scale(C)
        if order == 2:
            # sin^2 = (1 - cos 2t)/2
            return linear_combination([(0.5 * C, Evaluator.constant(1.0, 2)),
                                       (-0.5 * C, trig("cos", 2.0, 2))])
        raise ValueError(f"unsupported sine exponent {order}; expected 0, 1 or 2")
    if order == 1:
        return trig("cos", 1.0, 2).scale(C)
    if order == 2:
        return linear_combination([(0.5 * C, Evaluator.constant(1.0, 2)),
                                   (0.5 * C, trig("cos", 2.0, 2))])
    raise ValueError(f"unsupported cosine order {order}; expected 1 or 2")


lemma2_solution = trig_power_profile


def _t_times(kind: str) -> Evaluator:
    """``t cos t`` or ``t sin t`` with three derivatives."""
    if kind == "cos":
        return Evaluator.of(
            lambda t: t * np.cos(t),
            lambda t: np.cos(t) - t * np.sin(t),
            lambda t: -2 * np.sin(t) - t * np.cos(t),
            lambda t: -3 * np.cos(t) + t * np.sin(t))
    return Evaluator.of(
        lambda t: t * np.sin(t),
        lambda t: np.sin(t) + t * np.cos(t),
        lambda t: 2 * np.cos(t) - t * np.sin(t),
        lambda t: -3 * np.sin(t) - t * np.cos(t))


@dataclass(frozen=True)
class AngularTriple:
    lam: float
    C1: float
    C2: float
    C3: float
    C4: float
    A: Evaluator
    L: Evaluator
    H: Evaluator


def build_ALH(lam: float, C1: float, C2: float, C3: float, C4: float) -> AngularTriple:
    """General angular factors for the exponent ``lam >= 0``.

    For ``lam = 1`` the equation for H forces H to be a constant; that
    constant is passed as ``C3`` and ``C4`` must be zero.
    """
    if lam < 0:
        raise ValueError("exponent must be non-negative")
    if lam == 1:
        if C4 != 0:
            raise ValueError("lam = 1 takes (C1, C2, H-constant) only; C4 must be 0")
        b = C3
        A = linear_combination([(C1, trig("cos", 2.0)), (C2, trig("sin", 2.0))])
        L = linear_combination([(0.5 * b, Evaluator.constant(1.0)),
                                (C1, trig("sin", 2.0)), (-C2, trig("cos", 2.0))])
        H = Evaluator.constant(b)
        return AngularTriple(lam, C1, C2, C3, C4, A, L, H)
    if lam == 0:
        cos1, sin1 = trig("cos", 1.0), trig("sin", 1.0)
        tcos, tsin = _t_times("cos"), _t_times("sin")
        A = linear_combination([(C3, cos1), (0.5 * C1, tcos), (-0.5 * C2, tsin), (C4, sin1)])
        L = linear_combination([(0.5 * C1 - C4, cos1), (0.5 * C2, tcos),
                                (0.5 * C1, tsin), (C3 - 0.5 * C2, sin1)])
        H = linear_combination([(C1, cos1), (-C2, sin1)])
        return AngularTriple(lam, C1, C2, C3, C4, A, L, H)
    hi, lo = lam + 1.0, lam - 1.0
    k = 1.0 / (4.0 * lam)
    A = linear_combination([(C3, trig("cos", hi)), (C4, trig("sin", hi)),
                            (lo * k * C2, trig("cos", lo)), (-lo * k * C1, trig("sin", lo))])
    L = linear_combination([(C3, trig("sin", hi)), (-C4, trig("cos", hi)),
                            (hi * k * C1, trig("cos", lo)), (hi * k * C2, trig("sin", lo))])
    H = linear_combination([(C1, trig("cos", lo)), (C2, trig("sin", lo))])
    return AngularTriple(lam, C1, C2, C3, C4, A, L, H)


def recover_v1v2(A: Evaluator, L: Evaluator):
    """Invert ``A = cos v1 + sin v2``, ``L = sin v1 - cos v2`` (an orthogonal map)."""
    order = min(A.order, L.order)
    c, s = trig("cos", 1.0, order), trig("sin", 1.0, order)
    v1 = linear_combination([(1.0, product(A, c)), (1.0, product(L, s))])
    v2 = linear_combination([(1.0, product(A, s)), (-1.0, product(L, c))])
    return v1, v2


def a_l_from_v(v1: Evaluator, v2: Evaluator):
    """Forward map ``(v1, v2) -> (A, L)``; the inverse of :func:`recover_v1v2`."""
    order = min(v1.order, v2.order)
    c, s = trig("cos", 1.0, order), trig("sin", 1.0, order)
    A = linear_combination([(1.0, product(v1, c)), (1.0, product(v2, s))])
    L = linear_combination([(1.0, product(v1, s)), (-1.0, product(v2, c))])
    return A, L


def compatibility_residual(lam, C1, C2, C3, C4, theta):
    """Left-hand side of the constraint the vorticity equation imposes on the constants.

    ``lam = 0`` uses the secular form, ``lam = 1`` is unconstrained (returns 0),
    every other exponent (``lam = 2`` included) uses the general trigonometric form.
    """
    theta = np.asarray(theta, dtype=float)
    if lam == 1:
        return np.zeros_like(theta)
    if lam == 0:
        c2, s2 = np.cos(2 * theta), np.sin(2 * theta)
        d = C1**2 - C2**2
        return ((0.5 * (d * theta - C1 * C2) + C1 * C3 + C2 * C4) * c2
                - (C1 * C2 * theta - C1 * C4 + C2 * C3 + 0.25 * d) * s2)
    m = (2 * lam - 2) * theta
    return ((C1 * C3 + C2 * C4) * np.cos(2 * theta) + (C1 * C4 - C2 * C3) * np.sin(2 * theta)
            - (C1 * C2 * np.cos(m) + 0.5 * (C2**2 - C1**2) * np.sin(m)) / (2 * lam))


def vorticity_pair_residual(triple: AngularTriple, theta):
    """``((lam-1) H A - H' L, H'' + (lam-1)^2 H)`` evaluated directly from the triple."""
    lam = triple.lam
    A, L, H = triple.A(theta), triple.L(theta), triple.H(theta)
    dH, ddH = triple.H.d(theta, 1), triple.H.d(theta, 2)
    return (lam - 1) * H * A - dH * L, ddH + (lam - 1) ** 2 * H


def radial_vorticity_ode_basis():
    """Fundamental system ``(r, r ln r, 1/r)`` of ``r^3 f''' + 2 r^2 f'' - r f' + f = 0``."""
    lin = Evaluator.of(lambda r: r, np.ones_like, np.zeros_like, np.zeros_like)
    rlog = Evaluator.of(lambda r: r * np.log(r), lambda r: np.log(r) + 1.0,
                        lambda r: 1.0 / r, lambda r: -1.0 / r**2)
    inv = Evaluator.of(lambda r: 1.0 / r, lambda r: -1.0 / r**2,
                       lambda r: 2.0 / r**3, lambda r: -6.0 / r**4)
    return lin, rlog, inv


def vorticity_ode_residual(phi: Evaluator, r):
    r = np.asarray(r, dtype=float)
    return (r**3 * phi.d(r, 3) + 2 * r**2 * phi.d(r, 2) - r * phi.d(r, 1) + phi(r))


def power(k: float) -> Evaluator:
    """``r**k`` with three derivatives; handy for residual checks."""
    return Evaluator(tuple(
        (lambda r, j=j: math.prod(k - i for i in range(j)) * np.asarray(r, float) ** (k - j))
        for j in range(4)))
