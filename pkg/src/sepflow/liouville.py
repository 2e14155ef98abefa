"""Liouville-type consequences checked member by member over the catalog.

Sublinear growth at infinity together with a gradient that stays bounded up
to the apex and the rays forces the field to be constant; on the whole plane
every admissible member is a polynomial.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .families import (Constant, FlowSolution, Linear, PowerMode, Quadratic, RotLog,
                       ShearX, ShearY, admissible)
from .geometry import ConeDomain

NON_POLYNOMIAL = "non-polynomial"


class Growth(NamedTuple):
    exponent: float
    log_factor: bool


class InadmissiblePair(ValueError):
    pass


def _zero(*values) -> bool:
    return all(v == 0 for v in values)


def is_constant(s: FlowSolution) -> bool:
    """Compare values, not tags: a shear with zero slope is a constant field."""
    if isinstance(s, Constant):
        return True
    if isinstance(s, Linear):
        return _zero(s.C1, s.C2, s.C3)
    if isinstance(s, Quadratic):
        return _zero(s.C1, s.C2, s.C3, s.C4)
    if isinstance(s, PowerMode):
        return _zero(s.C1, s.C2)
    if isinstance(s, RotLog):
        return _zero(s.C1, s.C2)
    if isinstance(s, ShearX):
        return s.C2 == 0
    if isinstance(s, ShearY):
        return s.C1 == 0
    raise TypeError(type(s).__name__)


def growth_exponent(s: FlowSolution) -> Growth:
    """Exponent of ``|u| ~ r**sigma`` as ``r -> infinity`` (per family, not per value)."""
    if isinstance(s, Constant):
        return Growth(0.0, False)
    if isinstance(s, (Linear, ShearX, ShearY)):
        return Growth(1.0, False)
    if isinstance(s, Quadratic):
        return Growth(2.0, False)
    if isinstance(s, PowerMode):
        return Growth(float(s.lam), False)
    if isinstance(s, RotLog):
        return Growth(1.0, s.C2 != 0)
    raise TypeError(type(s).__name__)


def growth_ok(s: FlowSolution) -> bool:
    """Whether ``|x|^{-1} |u(x)| -> 0`` along every direction."""
    if is_constant(s):
        return True
    if isinstance(s, ShearX):
        return s.C2 == 0
    if isinstance(s, ShearY):
        return s.C1 == 0
    if isinstance(s, RotLog):
        return _zero(s.C1, s.C2)
    if isinstance(s, PowerMode):
        return s.lam < 1
    # a nonzero linear or quadratic field is at least linear along some ray
    return False


def corner_c1(s: FlowSolution, d: ConeDomain) -> bool:
    """Whether ``grad u`` extends continuously to the closure, apex included."""
    if isinstance(s, RotLog):
        return s.C2 == 0
    if isinstance(s, PowerMode):
        return s.lam >= 1 or _zero(s.C1, s.C2)
    return True


def polynomial_degree(s: FlowSolution):
    """Degree of ``u`` as a polynomial in ``(x, y)``, or ``"non-polynomial"``."""
    if is_constant(s):
        return 0
    if isinstance(s, (Linear, ShearX, ShearY)):
        return 1
    if isinstance(s, Quadratic):
        return 2
    if isinstance(s, PowerMode):
        return int(s.lam) if float(s.lam).is_integer() else NON_POLYNOMIAL
    if isinstance(s, RotLog):
        return 1 if s.C2 == 0 else NON_POLYNOMIAL
    raise TypeError(type(s).__name__)


@dataclass(frozen=True)
class LiouvilleVerdict:
    growth_ok: bool
    c1_closure_ok: bool
    is_constant: bool
    polynomial_degree: object

    @property
    def consistent(self) -> bool:
        """The implication ``growth_ok and c1_closure_ok -> is_constant``."""
        return not (self.growth_ok and self.c1_closure_ok) or self.is_constant


def liouville_verdict(s: FlowSolution, d: ConeDomain) -> LiouvilleVerdict:
    ok = admissible(s, d)
    if not ok:
        raise InadmissiblePair(ok.reason)
    return LiouvilleVerdict(growth_ok(s), corner_c1(s, d), is_constant(s), polynomial_degree(s))


def directional_difference(s: FlowSolution, x: float, y: float, direction, order: int,
                           h: float = 0.5) -> np.ndarray:
    """``order``-th forward difference of ``u`` along ``direction`` with step ``h``.

    For a polynomial of degree below ``order`` this vanishes up to rounding.
    """
    ex, ey = direction
    total = np.zeros(2)
    for k in range(order + 1):
        coef = (-1) ** (order - k) * math.comb(order, k)
        total += coef * np.array(s.velocity_xy(x + k * h * ex, y + k * h * ey), dtype=float)
    return total / h**order


def polynomial_check(s: FlowSolution, points, directions, h: float = 0.5) -> float:
    """Largest undivided ``(degree+1)``-th difference of ``u`` over points and directions."""
    deg = polynomial_degree(s)
    if deg == NON_POLYNOMIAL:
        raise ValueError("field is not polynomial")
    worst = 0.0
    for (x, y) in points:
        for e in directions:
            diff = directional_difference(s, x, y, e, deg + 1, h) * h ** (deg + 1)
            worst = max(worst, float(np.abs(diff).max()))
    return worst
