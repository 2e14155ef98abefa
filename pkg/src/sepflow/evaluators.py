"""One-variable functions carried together with their analytic derivatives."""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class Evaluator:
    """``derivs[k]`` is the k-th derivative; ``derivs[0]`` the function itself."""

    derivs: tuple

    def __call__(self, x):
        return self.derivs[0](np.asarray(x, dtype=float))

    def d(self, x, order: int = 1):
        if order >= len(self.derivs):
            raise ValueError(f"derivative of order {order} not available")
        return self.derivs[order](np.asarray(x, dtype=float))

    @property
    def order(self) -> int:
        return len(self.derivs) - 1

    @classmethod
    def of(cls, *funcs: Callable) -> "Evaluator":
        return cls(tuple(funcs))

    @classmethod
    def constant(cls, value: float, order: int = 3) -> "Evaluator":
        zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))  # noqa: E731
        const = lambda x: np.full_like(np.asarray(x, dtype=float), value)  # noqa: E731
        return cls((const,) + (zero,) * order)

    def scale(self, k: float) -> "Evaluator":
        return Evaluator(tuple((lambda x, f=f: k * f(x)) for f in self.derivs))


def linear_combination(terms: Sequence[tuple]) -> Evaluator:
    """Sum of ``coef * evaluator`` over ``terms``, truncated to the lowest order present."""
    order = min(e.order for _, e in terms)
    derivs = []
    for k in range(order + 1):
        derivs.append(lambda x, k=k: sum(c * e.d(x, k) for c, e in terms))
    return Evaluator(tuple(derivs))


def trig(kind: str, freq: float, order: int = 3) -> Evaluator:
    """``cos(freq*x)`` or ``sin(freq*x)`` with derivatives up to ``order``."""
    # derivatives of cos cycle through cos, -sin, -cos, sin; sin is cos shifted by one step
    cycle = ((1, np.cos), (-1, np.sin), (-1, np.cos), (1, np.sin))
    start = 0 if kind == "cos" else 3
    derivs = []
    for k in range(order + 1):
        sign, fn = cycle[(start + k) % 4]
        derivs.append(lambda x, c=sign * freq**k, fn=fn: c * fn(freq * x))
    return Evaluator(tuple(derivs))


def product(f: Evaluator, g: Evaluator) -> Evaluator:
    """Leibniz rule: derivatives of ``f*g`` up to the lower of the two orders."""
    order = min(f.order, g.order)
    return Evaluator(tuple(
        (lambda x, k=k: sum(comb(k, j) * f.d(x, j) * g.d(x, k - j) for j in range(k + 1)))
        for k in range(order + 1)))
