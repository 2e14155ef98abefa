"""Two-profile ansatz ``u = (v1(t) phi1(r), v2(t) phi2(r))``.

Incompressibility, written at two angles, is a 2x2 linear system for
``(r phi1', r phi2')`` whose right-hand side is linear in ``(phi1, phi2)``.
Solving it gives the equidimensional system ``r phi' = [[a, b], [c, d]] phi``.
The remaining helpers evaluate the vorticity identity that such fields must
satisfy, expressed through three angular functions F1, F2, F3.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .evaluators import Evaluator, trig
from .families import ShearX, ShearY
from .geometry import ConeDomain

DET_TOL = 1e-10
AXIS_TOL = 1e-8


class DegenerateAngles(ValueError):
    """The two probe angles give a (near) singular incompressibility system."""


class AxisSingularity(ValueError):
    """Angle too close to a coordinate axis for the F-function formulas."""


@dataclass(frozen=True)
class GeneralAnsatz:
    v1: Evaluator
    v2: Evaluator
    phi1: Evaluator
    phi2: Evaluator

    def u(self, r, theta):
        return self.v1(theta) * self.phi1(r), self.v2(theta) * self.phi2(r)


@dataclass(frozen=True)
class RadialCoeffs:
    a: float
    b: float
    c: float
    d: float
    conditioning: float = math.inf
    residual: float = 0.0

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])


def _const(v):
    return Evaluator.constant(v, order=3)


def _radial(k):
    """``r**k`` for k in {0, 1}, the only radial profiles the shear ansatz needs."""
    if k == 0:
        return _const(1.0)
    return Evaluator.of(lambda r: np.asarray(r, float), np.ones_like, np.zeros_like, np.zeros_like)


def shear_ansatz(s) -> GeneralAnsatz:
    """Write a shear solution in two-profile form."""
    if isinstance(s, ShearX):
        # (C1, C2 x) = (C1 * 1, C2 cos t * r)
        return GeneralAnsatz(_const(s.C1), trig("cos", 1.0).scale(s.C2), _radial(0), _radial(1))
    if isinstance(s, ShearY):
        # (C1 y, C2) = (C1 sin t * r, C2 * 1)
        return GeneralAnsatz(trig("sin", 1.0).scale(s.C1), _const(s.C2), _radial(1), _radial(0))
    raise TypeError(f"no two-profile form for {type(s).__name__}")


def divergence_general(g: GeneralAnsatz, r, theta):
    r = np.asarray(r, dtype=float)
    c, s = np.cos(theta), np.sin(theta)
    return (c * g.v1(theta) * g.phi1.d(r) + s * g.v2(theta) * g.phi2.d(r)
            + c * g.v2.d(theta) * g.phi2(r) / r - s * g.v1.d(theta) * g.phi1(r) / r)


def raw_vorticity(g: GeneralAnsatz, r, theta):
    """``w = d2 u1 - d1 u2`` by the polar chain rule, without using any radial system."""
    r = np.asarray(r, dtype=float)
    c, s = np.cos(theta), np.sin(theta)
    return (s * g.v1(theta) * g.phi1.d(r) - c * g.v2(theta) * g.phi2.d(r)
            + c * g.v1.d(theta) * g.phi1(r) / r + s * g.v2.d(theta) * g.phi2(r) / r)


def default_probe_angles(domain: ConeDomain):
    """Two angles at 30% and 70% of the opening, kept 0.05 rad off the axes."""
    lo, hi = domain.alpha, domain.beta
    out = []
    for frac in (0.3, 0.7):
        t = lo + frac * (hi - lo)
        k = round(t / (math.pi / 2))
        axis = k * math.pi / 2
        if abs(t - axis) < 0.05:
            t = axis + math.copysign(0.05, t - axis if t != axis else frac - 0.5)
        out.append(t)
    return tuple(out)


def cramer_matrices(g: GeneralAnsatz, thetas):
    th = np.asarray(thetas, dtype=float)
    M = np.column_stack([np.cos(th) * g.v1(th), np.sin(th) * g.v2(th)])
    N = np.column_stack([np.sin(th) * g.v1.d(th), -np.cos(th) * g.v2.d(th)])
    return M, N


def derive_radial_system(g: GeneralAnsatz, theta1: float, theta2: float,
                         r_samples=(0.5, 1.0, 2.0)) -> RadialCoeffs:
    """Recover ``(a, b, c, d)`` from incompressibility at two angles.

    At each angle ``cos t v1 (r phi1') + sin t v2 (r phi2') = sin t v1' phi1 - cos t v2' phi2``,
    so ``r phi' = M^{-1} N phi`` with ``M``, ``N`` built from the angular data only.
    The reported residual is the relative misfit of that system on ``r_samples``.
    """
    if theta1 == theta2:
        raise DegenerateAngles("probe angles coincide")
    M, N = cramer_matrices(g, (theta1, theta2))
    norms = np.linalg.norm(M, axis=1)
    if np.any(norms == 0):
        raise DegenerateAngles("angular factors vanish at a probe angle")
    cond = abs(np.linalg.det(M / norms[:, None]))
    if cond < DET_TOL:
        raise DegenerateAngles(f"normalized determinant {cond:.3e} below {DET_TOL:g}")
    K = np.linalg.solve(M, N)
    r = np.asarray(r_samples, dtype=float)
    lhs = np.stack([r * g.phi1.d(r), r * g.phi2.d(r)])
    rhs = K @ np.stack([g.phi1(r), g.phi2(r)])
    scale = max(np.abs(lhs).max(), np.abs(rhs).max(), np.finfo(float).tiny)
    res = float(np.abs(lhs - rhs).max() / scale)
    return RadialCoeffs(*(float(x) for x in K.ravel()), conditioning=float(cond), residual=res)


def _check_axis(theta):
    q = np.asarray(theta, dtype=float) / (math.pi / 2)
    if np.any(np.abs(q - np.round(q)) * (math.pi / 2) < AXIS_TOL):
        raise AxisSingularity("angle within 1e-8 of a coordinate axis")


def F_functions(a, b, c, d, v1, v2, theta):
    """Angular coefficients of ``r^3 Lap w`` (F1, F2) and of ``r^2 u.grad w`` (F3).

    ``v1``, ``v2`` are the angular values at ``theta`` (numbers or arrays).
    """
    _check_axis(theta)
    s, co = np.sin(theta), np.cos(theta)
    cot, tan = co / s, s / co
    F1 = (a * (a - 1) * (a - 2) * v1 / s**3
          + c * (a * (a - 2) * cot**2 - d * (d + 2 * a - 2)) * v2 / co)
    F2 = (d * (d - 1) * (d - 2) * v2 / co**3
          + b * (d * (d - 2) * tan**2 - a * (a + 2 * d - 2)) * v1 / s)
    F3 = ((a * cot - d * tan) * (b * v1**2 + c * v2**2)
          + ((a * a - a) / s**2 - (d * d - d) / co**2) * v1 * v2)
    return F1, F2, F3


def critical_identity_residual(g: GeneralAnsatz, rc: RadialCoeffs, r, theta):
    """``F1 phi1 - F2 phi2 - [(a+d) v1 v2 r (b phi2^2 - c phi1^2) + F3 r phi1 phi2]``."""
    a, b, c, d = rc.a, rc.b, rc.c, rc.d
    v1, v2 = g.v1(theta), g.v2(theta)
    F1, F2, F3 = F_functions(a, b, c, d, v1, v2, theta)
    p1, p2 = g.phi1(r), g.phi2(r)
    return F1 * p1 - F2 * p2 - ((a + d) * v1 * v2 * r * (b * p2**2 - c * p1**2) + F3 * r * p1 * p2)


def angular_system_residual(a, b, c, d, v1, dv1, v2, dv2, theta):
    s, co = np.sin(theta), np.cos(theta)
    return np.array([a * co * v1 + c * s * v2 - s * dv1,
                     b * co * v1 + d * s * v2 + co * dv2])


def general_vorticity(g: GeneralAnsatz, rc: RadialCoeffs, r, theta):
    """Vorticity once both the radial and the angular systems hold."""
    _check_axis(theta)
    return (rc.a * g.v1(theta) / np.sin(theta) * g.phi1(r) / r
            - rc.d * g.v2(theta) / np.cos(theta) * g.phi2(r) / r)
