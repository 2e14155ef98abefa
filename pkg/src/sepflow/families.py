"""The catalog of separated-variable exact solutions.

Seven families solve ``-lap u + u.grad u + grad p = 0``, ``div u = 0``:

========== ===================================================
Constant   u = (C1, C2), p = C3
Linear     u = (C1 x + C2 y, C3 x - C1 y)
Quadratic  homogeneous quadratic u with two algebraic constraints
PowerMode  u = r^lam (C1 cos lam t + C2 sin lam t, C2 cos lam t - C1 sin lam t)
RotLog     u = (C1 + C2 ln r)(-y, x), sectors only
ShearX     u = (C1, C2 x), p = -C1 C2 y + C3
ShearY     u = (C1 y, C2), p = -C1 C2 x + C3
========== ===================================================

Every evaluator takes polar arrays ``(r, theta)`` and broadcasts. All
derivatives are closed-form; nothing here differentiates numerically.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, fields, replace
from typing import ClassVar

import numpy as np

from .geometry import ConeDomain, to_polar

QUADRATIC_TOL = 1e-12


class SingularPointError(ValueError):
    """Gradient requested where it blows up (the apex of the cone)."""


class BoundaryLimitWarning(UserWarning):
    """A value was returned as a limit at the apex rather than by evaluation."""


class ConstraintViolation(ValueError):
    def __init__(self, res1: float, res2: float):
        self.res1 = res1
        self.res2 = res2
        super().__init__(
            f"quadratic constants violate the compatibility constraints: "
            f"residuals ({res1:.3g}, {res2:.3g})")


def _xy(r, theta):
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    return r * np.cos(theta), r * np.sin(theta)


def _mat(a11, a12, a21, a22):
    a11, a12, a21, a22 = np.broadcast_arrays(a11, a12, a21, a22)
    return np.stack([np.stack([a11, a12], -1), np.stack([a21, a22], -1)], -2)


def _full(shape_like, value):
    return np.full(np.shape(shape_like), float(value))


@dataclass(frozen=True)
class FlowSolution:
    """Base class. Subclasses are frozen dataclasses of real constants."""

    tag: ClassVar[str] = ""
    pressure_constant_field: ClassVar[str] = ""

    @property
    def constants(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    # -- closed forms, overridden per family ---------------------------------
    def u(self, r, theta):
        raise NotImplementedError

    def grad_u(self, r, theta):
        raise NotImplementedError

    def lap_u(self, r, theta):
        raise NotImplementedError

    def p(self, r, theta):
        raise NotImplementedError

    def grad_p(self, r, theta):
        raise NotImplementedError

    def w(self, r, theta):
        g = self.grad_u(r, theta)
        return g[..., 0, 1] - g[..., 1, 0]

    def grad_w(self, r, theta):
        z = np.zeros(np.broadcast(np.asarray(r), np.asarray(theta)).shape)
        return z, z.copy()

    def lap_w(self, r, theta):
        return np.zeros(np.broadcast(np.asarray(r), np.asarray(theta)).shape)

    def u_magnitude(self, r, theta):
        """Size of the terms that make up ``u``; the scale for relative residuals."""
        return tuple(np.abs(c) for c in self.u(r, theta))

    def scaled(self, sigma: float) -> "FlowSolution":
        """The member of the catalog equal to ``sigma*u(sigma x)``, ``sigma^2*p(sigma x)``."""
        raise NotImplementedError

    @property
    def gradient_singular_at_apex(self) -> bool:
        return False

    def with_pressure_constant(self, value: float) -> "FlowSolution":
        return replace(self, **{self.pressure_constant_field: float(value)})

    # -- Cartesian convenience --------------------------------------------
    def velocity_xy(self, x, y):
        r, t = _polar_arrays(x, y)
        return self.u(r, t)

    def pressure_xy(self, x, y):
        r, t = _polar_arrays(x, y)
        return self.p(r, t)

    def _check_regular(self, r):
        if self.gradient_singular_at_apex and np.any(np.asarray(r) == 0):
            raise SingularPointError(
                f"{self.tag}: velocity gradient blows up at r = 0")


def _polar_arrays(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim == 0 and y.ndim == 0:
        p = to_polar(float(x), float(y))
        return np.asarray(p.r), np.asarray(p.theta)
    return to_polar(*np.broadcast_arrays(x, y))


@dataclass(frozen=True)
class Constant(FlowSolution):
    C1: float = 0.0
    C2: float = 0.0
    C3: float = 0.0

    tag: ClassVar[str] = "constant"
    pressure_constant_field: ClassVar[str] = "C3"

    def u(self, r, theta):
        x, _ = _xy(r, theta)
        return _full(x, self.C1), _full(x, self.C2)

    def grad_u(self, r, theta):
        x, _ = _xy(r, theta)
        z = np.zeros_like(x)
        return _mat(z, z, z, z)

    def lap_u(self, r, theta):
        x, _ = _xy(r, theta)
        return np.zeros_like(x), np.zeros_like(x)

    def p(self, r, theta):
        x, _ = _xy(r, theta)
        return _full(x, self.C3)

    def grad_p(self, r, theta):
        x, _ = _xy(r, theta)
        return np.zeros_like(x), np.zeros_like(x)

    def scaled(self, sigma):
        return Constant(sigma * self.C1, sigma * self.C2, sigma**2 * self.C3)


@dataclass(frozen=True)
class Linear(FlowSolution):
    C1: float = 0.0
    C2: float = 0.0
    C3: float = 0.0
    C4: float = 0.0

    tag: ClassVar[str] = "linear"
    pressure_constant_field: ClassVar[str] = "C4"

    def u(self, r, theta):
        x, y = _xy(r, theta)
        return self.C1 * x + self.C2 * y, self.C3 * x - self.C1 * y

    def grad_u(self, r, theta):
        x, _ = _xy(r, theta)
        o = np.ones_like(x)
        return _mat(self.C1 * o, self.C2 * o, self.C3 * o, -self.C1 * o)

    def lap_u(self, r, theta):
        x, _ = _xy(r, theta)
        return np.zeros_like(x), np.zeros_like(x)

    def p(self, r, theta):
        x, y = _xy(r, theta)
        return -0.5 * (self.C1**2 + self.C2 * self.C3) * (x * x + y * y) + self.C4

    def grad_p(self, r, theta):
        x, y = _xy(r, theta)
        k = -(self.C1**2 + self.C2 * self.C3)
        return k * x, k * y

    def w(self, r, theta):
        x, _ = _xy(r, theta)
        return _full(x, self.C2 - self.C3)

    def scaled(self, sigma):
        s2 = sigma**2
        return Linear(s2 * self.C1, s2 * self.C2, s2 * self.C3, s2 * self.C4)


def quadratic_residuals(C1, C2, C3, C4):
    """Left-hand sides of the two algebraic constraints on the quadratic family."""
    res1 = C1 * C3 + C2 * C4 - 2.0 * C1 * C2
    res2 = C1 * C4 - C2 * C3 + C1**2 - C2**2
    return res1, res2


@dataclass(frozen=True)
class Quadratic(FlowSolution):
    """Quadratic velocity, quartic pressure.

    The constructor checks the constraints with a tolerance scaled by the
    squared size of the constants; :func:`make_quadratic` applies the strict
    absolute test. ``Quadratic.unchecked`` skips the check so that violated
    fields can be studied.
    """

    C1: float = 0.0
    C2: float = 0.0
    C3: float = 0.0
    C4: float = 0.0
    C5: float = 0.0

    tag: ClassVar[str] = "quadratic"
    pressure_constant_field: ClassVar[str] = "C5"

    def __post_init__(self):
        if getattr(self, "_skip_check", False):
            return
        res1, res2 = quadratic_residuals(self.C1, self.C2, self.C3, self.C4)
        scale = max(1.0, max(abs(self.C1), abs(self.C2), abs(self.C3), abs(self.C4)) ** 2)
        if max(abs(res1), abs(res2)) > QUADRATIC_TOL * scale:
            raise ConstraintViolation(res1, res2)

    @classmethod
    def unchecked(cls, C1, C2, C3, C4, C5=0.0) -> "Quadratic":
        obj = cls.__new__(cls)
        for name, val in zip(("C1", "C2", "C3", "C4", "C5"), (C1, C2, C3, C4, C5)):
            object.__setattr__(obj, name, float(val))
        object.__setattr__(obj, "_skip_check", True)
        return obj

    @property
    def _pqrs(self):
        C1, C2, C3, C4 = self.C1, self.C2, self.C3, self.C4
        # u1 = P x^2 + Q y^2 + 2R xy,  u2 = S x^2 - R y^2 - 2P xy
        return C2 + C3, 3 * C2 - C3, C1 + C4, C4 - 3 * C1

    def u(self, r, theta):
        x, y = _xy(r, theta)
        P, Q, R, S = self._pqrs
        return (P * x * x + Q * y * y + 2 * R * x * y,
                S * x * x - R * y * y - 2 * P * x * y)

    def u_magnitude(self, r, theta):
        # u vanishes along the null rays of the form while rounding in the
        # constraints does not, so measure the monomials instead of their sum
        x, y = np.abs(_xy(r, theta))
        P, Q, R, S = (abs(v) for v in self._pqrs)
        return (P * x * x + Q * y * y + 2 * R * x * y,
                S * x * x + R * y * y + 2 * P * x * y)

    def grad_u(self, r, theta):
        x, y = _xy(r, theta)
        P, Q, R, S = self._pqrs
        return _mat(2 * P * x + 2 * R * y, 2 * Q * y + 2 * R * x,
                    2 * S * x - 2 * P * y, -2 * R * y - 2 * P * x)

    def lap_u(self, r, theta):
        x, _ = _xy(r, theta)
        return _full(x, 8 * self.C2), _full(x, -8 * self.C1)

    @property
    def _quartic(self):
        return self.C1**2 + self.C2**2 - self.C3**2 - self.C4**2

    def p(self, r, theta):
        x, y = _xy(r, theta)
        rr = x * x + y * y
        return 0.5 * self._quartic * rr * rr + 8 * self.C2 * x - 8 * self.C1 * y + self.C5

    def grad_p(self, r, theta):
        x, y = _xy(r, theta)
        k = 2 * self._quartic * (x * x + y * y)
        return k * x + 8 * self.C2, k * y - 8 * self.C1

    def w(self, r, theta):
        x, y = _xy(r, theta)
        return 8 * self.C1 * x + 8 * self.C2 * y

    def grad_w(self, r, theta):
        x, _ = _xy(r, theta)
        return _full(x, 8 * self.C1), _full(x, 8 * self.C2)

    def scaled(self, sigma):
        s3 = sigma**3
        return Quadratic.unchecked(s3 * self.C1, s3 * self.C2, s3 * self.C3,
                                   s3 * self.C4, sigma**2 * self.C5)


def make_quadratic(C1, C2, C3, C4, C5=0.0) -> Quadratic:
    """Build a quadratic member, rejecting constants off the constraint set (1e-12 absolute)."""
    res1, res2 = quadratic_residuals(C1, C2, C3, C4)
    if abs(res1) > QUADRATIC_TOL or abs(res2) > QUADRATIC_TOL:
        raise ConstraintViolation(res1, res2)
    return Quadratic.unchecked(C1, C2, C3, C4, C5)


def quadratic_from_c1c2(C1, C2, C5=0.0) -> Quadratic:
    """Solve the (linear in C3, C4) constraint system for given C1, C2."""
    det = C1 * C1 + C2 * C2
    if det == 0:
        raise ValueError("C1 = C2 = 0 leaves C3, C4 free; use make_quadratic")
    C3 = C2 * (3 * C1 * C1 - C2 * C2) / det
    C4 = C1 * (3 * C2 * C2 - C1 * C1) / det
    return Quadratic.unchecked(C1, C2, C3, C4, C5)


@dataclass(frozen=True)
class PowerMode(FlowSolution):
    """Irrotational power mode; ``u1 - i u2 = (C1 - i C2) z**lam``."""

    lam: float = 3.0
    C1: float = 0.0
    C2: float = 0.0
    C3: float = 0.0

    tag: ClassVar[str] = "powermode"
    pressure_constant_field: ClassVar[str] = "C3"

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("power-mode exponent must be positive")
        if self.lam in (1.0, 2.0):
            raise ValueError(
                f"lam = {self.lam:g} belongs to the "
                f"{'linear' if self.lam == 1 else 'quadratic'} family")

    def _f(self, r, theta, k):
        """k-th complex derivative of (C1 - i C2) z**lam at r e^{i theta}."""
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        coef = complex(self.C1, -self.C2)
        for j in range(k):
            coef *= self.lam - j
        e = self.lam - k
        with np.errstate(divide="ignore", invalid="ignore"):
            mag = np.where(r > 0, r ** e, 0.0 if e > 0 else (1.0 if e == 0 else np.inf))
        return coef * mag * np.exp(1j * e * theta)

    def u(self, r, theta):
        f = self._f(r, theta, 0)
        return f.real, -f.imag

    def grad_u(self, r, theta):
        self._check_regular(r)
        fp = self._f(r, theta, 1)
        return _mat(fp.real, -fp.imag, -fp.imag, -fp.real)

    def lap_u(self, r, theta):
        self._check_regular(r)
        x, _ = _xy(r, theta)
        return np.zeros_like(x), np.zeros_like(x)

    def p(self, r, theta):
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        return np.broadcast_to(
            -0.5 * (self.C1**2 + self.C2**2) * r ** (2 * self.lam) + self.C3,
            np.broadcast(r, theta).shape).copy()

    def grad_p(self, r, theta):
        self._check_regular(r)
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        k = np.where(r > 0, -self.lam * (self.C1**2 + self.C2**2) * r ** (2 * self.lam - 1), 0.0)
        return k * np.cos(theta), k * np.sin(theta)

    def w(self, r, theta):
        self._check_regular(r)
        return np.zeros(np.broadcast(np.asarray(r), np.asarray(theta)).shape)

    def scaled(self, sigma):
        s = sigma ** (self.lam + 1)
        return PowerMode(self.lam, s * self.C1, s * self.C2, sigma**2 * self.C3)

    @property
    def gradient_singular_at_apex(self):
        return self.lam < 1 and (self.C1 != 0 or self.C2 != 0)


@dataclass(frozen=True)
class RotLog(FlowSolution):
    """Swirl with logarithmic angular speed; admissible off the full plane."""

    C1: float = 0.0
    C2: float = 0.0
    C3: float = 0.0

    tag: ClassVar[str] = "rotlog"
    pressure_constant_field: ClassVar[str] = "C3"

    def _g(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return self.C1 + self.C2 * np.log(r)

    def u(self, r, theta):
        x, y = _xy(r, theta)
        r = np.asarray(r, dtype=float)
        with np.errstate(invalid="ignore"):
            g = self._g(r)
            u1, u2 = -g * y, g * x
        at0 = np.broadcast_to(r == 0, np.shape(u1))
        if np.any(at0):
            u1 = np.where(at0, 0.0, u1)
            u2 = np.where(at0, 0.0, u2)
        return u1, u2

    def grad_u(self, r, theta):
        self._check_regular(r)
        theta = np.asarray(theta, dtype=float)
        g = self._g(r)
        s, c = np.sin(theta), np.cos(theta)
        C2 = self.C2
        return _mat(-C2 * s * c, -(g + C2 * s * s), g + C2 * c * c, C2 * s * c)

    def lap_u(self, r, theta):
        self._check_regular(r)
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        k = 2 * self.C2 / r
        return -k * np.sin(theta), k * np.cos(theta)

    def p(self, r, theta):
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        C1, C2 = self.C1, self.C2
        with np.errstate(divide="ignore", invalid="ignore"):
            L = np.log(r)
            bracket = C2**2 * L * L + (2 * C1 * C2 - C2**2) * L + C1**2 - C1 * C2 + 0.5 * C2**2
            val = 0.5 * r * r * bracket
        val = np.where(r == 0, 0.0, val)
        return val + 2 * C2 * theta + self.C3

    def grad_p(self, r, theta):
        self._check_regular(r)
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        g = self._g(r)
        s, c = np.sin(theta), np.cos(theta)
        a = 2 * self.C2 / r
        b = g * g * r
        return -a * s + b * c, a * c + b * s

    def w(self, r, theta):
        self._check_regular(r)
        r, theta = np.broadcast_arrays(np.asarray(r, float), np.asarray(theta, float))
        return -(2 * self._g(r) + self.C2)

    def grad_w(self, r, theta):
        self._check_regular(r)
        x, y = _xy(r, theta)
        k = -2 * self.C2 / (x * x + y * y)
        return k * x, k * y

    def scaled(self, sigma):
        s2 = sigma**2
        new = RotLog(s2 * (self.C1 + self.C2 * math.log(sigma)), s2 * self.C2, 0.0)
        # fix the additive pressure constant at one reference point
        ref = sigma**2 * self.p(sigma, 1.0) - new.p(1.0, 1.0)
        return replace(new, C3=float(ref))

    @property
    def gradient_singular_at_apex(self):
        return self.C2 != 0


@dataclass(frozen=True)
class ShearX(FlowSolution):
    """u = (C1, C2 x)."""

    C1: float = 0.0
    C2: float = 0.0
    C3: float = 0.0

    tag: ClassVar[str] = "shearx"
    pressure_constant_field: ClassVar[str] = "C3"

    def u(self, r, theta):
        x, _ = _xy(r, theta)
        return _full(x, self.C1), self.C2 * x

    def grad_u(self, r, theta):
        x, _ = _xy(r, theta)
        z = np.zeros_like(x)
        return _mat(z, z, z + self.C2, z)

    def lap_u(self, r, theta):
        x, _ = _xy(r, theta)
        return np.zeros_like(x), np.zeros_like(x)

    def p(self, r, theta):
        _, y = _xy(r, theta)
        return -self.C1 * self.C2 * y + self.C3

    def grad_p(self, r, theta):
        x, _ = _xy(r, theta)
        return np.zeros_like(x), _full(x, -self.C1 * self.C2)

    def scaled(self, sigma):
        return ShearX(sigma * self.C1, sigma**2 * self.C2, sigma**2 * self.C3)


@dataclass(frozen=True)
class ShearY(FlowSolution):
    """u = (C1 y, C2)."""

    C1: float = 0.0
    C2: float = 0.0
    C3: float = 0.0

    tag: ClassVar[str] = "sheary"
    pressure_constant_field: ClassVar[str] = "C3"

    def u(self, r, theta):
        x, y = _xy(r, theta)
        return self.C1 * y, _full(x, self.C2)

    def grad_u(self, r, theta):
        x, _ = _xy(r, theta)
        z = np.zeros_like(x)
        return _mat(z, z + self.C1, z, z)

    def lap_u(self, r, theta):
        x, _ = _xy(r, theta)
        return np.zeros_like(x), np.zeros_like(x)

    def p(self, r, theta):
        x, _ = _xy(r, theta)
        return -self.C1 * self.C2 * x + self.C3

    def grad_p(self, r, theta):
        x, _ = _xy(r, theta)
        return _full(x, -self.C1 * self.C2), np.zeros_like(x)

    def scaled(self, sigma):
        return ShearY(sigma**2 * self.C1, sigma * self.C2, sigma**2 * self.C3)


FAMILIES = {cls.tag: cls for cls in
            (Constant, Linear, Quadratic, PowerMode, RotLog, ShearX, ShearY)}


# -- public point evaluators ------------------------------------------------

def velocity(s: FlowSolution, p) -> np.ndarray:
    r, theta = p
    if r == 0 and isinstance(s, RotLog) and s.C2 != 0:
        warnings.warn("RotLog velocity at r = 0 returned as its limit (0, 0)",
                      BoundaryLimitWarning, stacklevel=2)
    u1, u2 = s.u(r, theta)
    return np.array([float(u1), float(u2)])


def pressure(s: FlowSolution, p) -> float:
    r, theta = p
    return float(s.p(r, theta))


def velocity_gradient(s: FlowSolution, p) -> np.ndarray:
    """2x2 matrix with entries d u_i / d x_j."""
    r, theta = p
    return np.asarray(s.grad_u(r, theta), dtype=float).reshape(2, 2)


def vorticity(s: FlowSolution, p) -> float:
    r, theta = p
    return float(s.w(r, theta))


# -- admissibility ----------------------------------------------------------

@dataclass(frozen=True)
class Admissibility:
    ok: bool
    reason: str = ""

    def __bool__(self):
        return self.ok


def admissible(s: FlowSolution, d: ConeDomain) -> Admissibility:
    if isinstance(s, PowerMode):
        if d.is_full_plane:
            if float(s.lam).is_integer() and s.lam >= 3:
                return Admissibility(True)
            return Admissibility(
                False, f"powermode on the full plane needs an integer exponent >= 3 "
                       f"(λ≥3 and λ∈ℕ); got lam = {s.lam:g}")
        return Admissibility(True)
    if isinstance(s, RotLog) and d.is_full_plane:
        return Admissibility(
            False, "rotlog is single-valued only off the full plane (Ω≠ℝ²); "
                   "a rigid rotation (C2 = 0) is a linear member")
    return Admissibility(True)
