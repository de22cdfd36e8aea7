"""Real 2x2 query observables in the {u_A, u_A_perp} basis and their Born-rule means."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qspace import ProjectedState

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class Observable:
    m11: float
    m12: float
    m21: float
    m22: float

    @classmethod
    def from_array(cls, a) -> "Observable":
        a = np.asarray(a, dtype=np.float64)
        return cls(float(a[0, 0]), float(a[0, 1]), float(a[1, 0]), float(a[1, 1]))

    def as_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    def apply(self, v: tuple[float, float]) -> tuple[float, float]:
        x, y = v
        return (self.m11 * x + self.m12 * y, self.m21 * x + self.m22 * y)

    def __matmul__(self, o: "Observable") -> "Observable":
        return Observable(
            self.m11 * o.m11 + self.m12 * o.m21,
            self.m11 * o.m12 + self.m12 * o.m22,
            self.m21 * o.m11 + self.m22 * o.m21,
            self.m21 * o.m12 + self.m22 * o.m22,
        )

    def __add__(self, o: "Observable") -> "Observable":
        return Observable(self.m11 + o.m11, self.m12 + o.m12, self.m21 + o.m21, self.m22 + o.m22)

    def __sub__(self, o: "Observable") -> "Observable":
        return self + (-1.0) * o

    def __rmul__(self, c: float) -> "Observable":
        return Observable(c * self.m11, c * self.m12, c * self.m21, c * self.m22)

    def __neg__(self) -> "Observable":
        return (-1.0) * self

    @property
    def trace(self) -> float:
        return self.m11 + self.m22

    @property
    def det(self) -> float:
        return self.m11 * self.m22 - self.m12 * self.m21


IDENTITY = Observable(1.0, 0.0, 0.0, 1.0)


def _pq(p: float) -> tuple[float, float]:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"overlap must lie in [0, 1], got {p!r}")
    return p, math.sqrt(max(0.0, 1.0 - p * p))


def op_A() -> Observable:
    """+1 on u_A, -1 on u_A_perp."""
    return Observable(1.0, 0.0, 0.0, -1.0)


def op_Ax() -> Observable:
    """Swaps the u_A and u_A_perp components."""
    return Observable(0.0, 1.0, 1.0, 0.0)


def op_B(p: float) -> Observable:
    """+1 on u_B, -1 on u_B_perp, written in the A basis."""
    p, q = _pq(p)
    return Observable(2 * p * p - 1, 2 * p * q, 2 * p * q, 1 - 2 * p * p)


def op_Bx(p: float) -> Observable:
    """The component swap of the B basis, written in the A basis."""
    p, q = _pq(p)
    return Observable(-2 * p * q, 2 * p * p - 1, 2 * p * p - 1, 2 * p * q)


def op_Bplus(p: float) -> Observable:
    return (-1.0 / SQRT2) * (op_B(p) + op_Bx(p))


def op_Bminus(p: float) -> Observable:
    return (1.0 / SQRT2) * (op_B(p) - op_Bx(p))


def _coords(state: ProjectedState | tuple[float, float]) -> tuple[float, float]:
    return state.a_coords if isinstance(state, ProjectedState) else (float(state[0]), float(state[1]))


def expectation(state: ProjectedState | tuple[float, float], op: Observable) -> float:
    x, y = _coords(state)
    ox, oy = op.apply((x, y))
    return x * ox + y * oy


def pair_expectation(state: ProjectedState | tuple[float, float], op1: Observable, op2: Observable) -> float:
    """<psi| op1 op2 |psi> with the plain (unsymmetrized) product."""
    return expectation(state, op1 @ op2)
