"""Closed-form solutions of the 2x2 equidimensional system

    r phi1' = a phi1 + b phi2
    r phi2' = c phi1 + d phi2

With ``t = ln r`` this is a constant-coefficient system, so every solution
is a combination of two basis functions of the form ``r**k * f(ln r)`` with
``f`` in {1, t, cos(mu t), sin(mu t)}. Each :class:`EulerRadialPair` stores
both components as coefficient vectors on that shared basis, which makes
differentiation exact and the linear-dependence test a 2x2 determinant.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

DELTA_TOL = 1e-12


class EulerCase(str, Enum):
    B0_EQUAL = "B0-equal"
    B0_DISTINCT = "B0-distinct"
    REAL_DISTINCT = "Real-distinct"
    REAL_DOUBLE = "Real-double"
    COMPLEX = "Complex"


@dataclass(frozen=True)
class EulerSystem:
    a: float
    b: float
    c: float
    d: float
    C1: float = 1.0
    C2: float = 0.0

    @property
    def delta(self) -> float:
        return (self.a - self.d) ** 2 + 4 * self.b * self.c

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)


@dataclass(frozen=True)
class CaseInfo:
    case: EulerCase
    delta: float
    roots: tuple  # real roots, or (lam + i mu, lam - i mu) as complex numbers

    @property
    def root_pair(self):
        if len(self.roots) == 1:
            return self.roots[0], self.roots[0]
        return self.roots


def _real_roots(s: float, q: float, delta: float):
    """Roots of rho^2 - s rho + q with delta = s^2 - 4q > 0, larger first.

    Sign-matched formula: the root of larger magnitude is computed without
    cancellation and the other from the product q.
    """
    sq = math.sqrt(delta)
    if s == 0:
        return 0.5 * sq, -0.5 * sq
    big = 0.5 * (s + math.copysign(sq, s))
    small = q / big
    return (big, small) if big > small else (small, big)


def _ratio(rho: float, a: float, b: float, c: float, d: float) -> float:
    """``phi2/phi1`` along the eigenvector of ``rho``: ``(rho-a)/b`` or, equivalently, ``c/(rho-d)``.

    The form with the larger denominator avoids cancellation when ``b`` is tiny.
    """
    if abs(b) >= abs(rho - d):
        return (rho - a) / b
    return c / (rho - d)


def classify_case(a: float, b: float, c: float, d: float) -> CaseInfo:
    delta = (a - d) ** 2 + 4 * b * c
    if b == 0:
        if d == a:
            return CaseInfo(EulerCase.B0_EQUAL, delta, (float(a),))
        return CaseInfo(EulerCase.B0_DISTINCT, delta, (float(a), float(d)))
    s, q = a + d, a * d - b * c
    if abs(delta) <= DELTA_TOL:
        return CaseInfo(EulerCase.REAL_DOUBLE, delta, (0.5 * s,))
    if delta > 0:
        return CaseInfo(EulerCase.REAL_DISTINCT, delta, _real_roots(s, q, delta))
    lam, mu = 0.5 * s, 0.5 * math.sqrt(-delta)
    return CaseInfo(EulerCase.COMPLEX, delta, (complex(lam, mu), complex(lam, -mu)))


# basis kinds: r**k, ln(r) r**k, cos(mu ln r) r**k, sin(mu ln r) r**k
_POW, _LOG, _COS, _SIN = "pow", "log", "cos", "sin"


@dataclass(frozen=True)
class _Basis:
    kind: str
    k: float
    mu: float = 0.0

    def value(self, r):
        r = np.asarray(r, dtype=float)
        t = np.log(r)
        rk = r ** self.k
        if self.kind == _POW:
            return rk
        if self.kind == _LOG:
            return t * rk
        if self.kind == _COS:
            return np.cos(self.mu * t) * rk
        return np.sin(self.mu * t) * rk

    def log_derivative(self, r):
        """``r * d/dr`` of the basis function."""
        r = np.asarray(r, dtype=float)
        t = np.log(r)
        rk = r ** self.k
        if self.kind == _POW:
            return self.k * rk
        if self.kind == _LOG:
            return rk + self.k * t * rk
        if self.kind == _COS:
            return (self.k * np.cos(self.mu * t) - self.mu * np.sin(self.mu * t)) * rk
        return (self.k * np.sin(self.mu * t) + self.mu * np.cos(self.mu * t)) * rk


@dataclass(frozen=True)
class EulerRadialPair:
    case: EulerCase
    roots: tuple
    basis: tuple            # two _Basis entries
    coef1: tuple            # phi1 coefficients on the basis
    coef2: tuple            # phi2 coefficients on the basis

    def phi1(self, r):
        return sum(c * b.value(r) for c, b in zip(self.coef1, self.basis))

    def phi2(self, r):
        return sum(c * b.value(r) for c, b in zip(self.coef2, self.basis))

    def dphi1(self, r):
        r = np.asarray(r, dtype=float)
        return sum(c * b.log_derivative(r) for c, b in zip(self.coef1, self.basis)) / r

    def dphi2(self, r):
        r = np.asarray(r, dtype=float)
        return sum(c * b.log_derivative(r) for c, b in zip(self.coef2, self.basis)) / r

    @property
    def linearly_independent(self) -> bool:
        """False when phi1 and phi2 are proportional (including either vanishing)."""
        (p, q), (s, t) = self.coef1, self.coef2
        det = p * t - q * s
        scale = max(abs(p), abs(q)) * max(abs(s), abs(t))
        return scale > 0 and abs(det) > 1e-12 * scale

    def perturbed(self, phi1_scale: float = 1.0, phi2_scale: float = 1.0) -> "EulerRadialPair":
        return replace(self,
                       coef1=tuple(phi1_scale * c for c in self.coef1),
                       coef2=tuple(phi2_scale * c for c in self.coef2))


def solve(sys: EulerSystem) -> EulerRadialPair:
    a, b, c, d, C1, C2 = sys.a, sys.b, sys.c, sys.d, sys.C1, sys.C2
    info = classify_case(a, b, c, d)
    case = info.case
    if case is EulerCase.B0_EQUAL:
        # phi1 = C1 r^a, phi2 = (c C1 ln r + C2) r^a
        basis = (_Basis(_POW, a), _Basis(_LOG, a))
        return EulerRadialPair(case, info.roots, basis, (C1, 0.0), (C2, c * C1))
    if case is EulerCase.B0_DISTINCT:
        # phi1 = C1 r^a, phi2 = c/(a-d) C1 r^a + C2 r^d
        basis = (_Basis(_POW, a), _Basis(_POW, d))
        return EulerRadialPair(case, info.roots, basis, (C1, 0.0), (c / (a - d) * C1, C2))
    if case is EulerCase.REAL_DISTINCT:
        m, n = info.roots
        basis = (_Basis(_POW, m), _Basis(_POW, n))
        return EulerRadialPair(case, info.roots, basis, (C1, C2),
                               (_ratio(m, a, b, c, d) * C1, _ratio(n, a, b, c, d) * C2))
    if case is EulerCase.REAL_DOUBLE:
        (l,) = info.roots
        basis = (_Basis(_LOG, l), _Basis(_POW, l))
        return EulerRadialPair(case, info.roots, basis, (C1, C2),
                               ((l - a) / b * C1, (C1 + (l - a) * C2) / b))
    lam, mu = info.roots[0].real, info.roots[0].imag
    basis = (_Basis(_COS, lam, mu), _Basis(_SIN, lam, mu))
    return EulerRadialPair(case, info.roots, basis, (C1, C2),
                           (((lam - a) * C1 + mu * C2) / b, ((lam - a) * C2 - mu * C1) / b))


def ode_residual(pair: EulerRadialPair, sys: EulerSystem, r) -> np.ndarray:
    """(r phi1' - a phi1 - b phi2, r phi2' - c phi1 - d phi2) at r > 0."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("radius must be positive")
    p1, p2 = pair.phi1(r), pair.phi2(r)
    return np.array([r * pair.dphi1(r) - sys.a * p1 - sys.b * p2,
                     r * pair.dphi2(r) - sys.c * p1 - sys.d * p2])


def ode_residual_relative(pair: EulerRadialPair, sys: EulerSystem, r) -> float:
    """Largest residual component over the size of the terms it balances."""
    r = np.asarray(r, dtype=float)
    p1, p2 = pair.phi1(r), pair.phi2(r)
    res = ode_residual(pair, sys, r)
    scale1 = np.abs(r * pair.dphi1(r)) + abs(sys.a * p1) + abs(sys.b * p2)
    scale2 = np.abs(r * pair.dphi2(r)) + abs(sys.c * p1) + abs(sys.d * p2)
    scale = np.maximum(np.maximum(scale1, scale2), np.finfo(float).tiny)
    return float(np.max(np.abs(res) / scale))
