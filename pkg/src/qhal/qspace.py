"""Document state and the two-word query plane.

All projections happen in the ambient HAL space; what leaves this module is the
overlap ``p`` and the normalized in-plane coefficients of the document state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .corpus import TokenizedDocument, Vocabulary
from .hal import CooccurrenceMatrix, WordVector

DEGENERATE_EPS = 1e-9


class AbsentWord(ValueError):
    """A query word has no usable (nonzero) HAL row."""

    def __init__(self, which: str):
        super().__init__(f"query word {which} has a zero vector")
        self.which = which


class DegeneratePlane(ValueError):
    """The two word vectors are parallel to within the degeneracy tolerance."""

    def __init__(self, p: float):
        super().__init__(f"word vectors are parallel (p = {p!r})")
        self.p = p


@dataclass(frozen=True, eq=False)
class QueryPlane:
    u_a: np.ndarray
    u_a_perp: np.ndarray
    u_b: np.ndarray
    u_b_perp: np.ndarray
    p: float

    @property
    def q(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.p * self.p))

    def basis_overlaps(self) -> np.ndarray:
        """Inner products between the B basis (rows) and the A basis (columns)."""
        b = np.vstack([self.u_b, self.u_b_perp])
        a = np.vstack([self.u_a, self.u_a_perp])
        return b @ a.T


@dataclass(frozen=True)
class ProjectedState:
    alpha: float
    alpha_perp: float
    beta: float
    beta_perp: float

    @property
    def a_coords(self) -> tuple[float, float]:
        return (self.alpha, self.alpha_perp)

    @property
    def b_coords(self) -> tuple[float, float]:
        return (self.beta, self.beta_perp)


def document_state(doc: TokenizedDocument, m: CooccurrenceMatrix, vocab: Vocabulary) -> np.ndarray:
    """Sum of the symmetric HAL rows of the document's distinct word types."""
    if not m.symmetric:
        raise ValueError("document state is built from the symmetric matrix")
    types = sorted({vocab.index[t] for t in doc.tokens})
    if not types:
        return np.zeros(m.n)
    return np.asarray(m.matrix[types].sum(axis=0), dtype=np.float64).ravel()


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def make_plane(w_a: WordVector | np.ndarray, w_b: WordVector | np.ndarray, eps: float = DEGENERATE_EPS) -> QueryPlane:
    """Gram-Schmidt both ways on the normalized query word vectors.

    The perpendicular directions are oriented so that
    ``u_b_perp . u_a == -sqrt(1 - p**2)`` and ``u_b . u_a_perp == +sqrt(1 - p**2)``.
    """
    a = np.asarray(getattr(w_a, "components", w_a), dtype=np.float64)
    b = np.asarray(getattr(w_b, "components", w_b), dtype=np.float64)
    if not np.any(a):
        raise AbsentWord("A")
    if not np.any(b):
        raise AbsentWord("B")
    u_a, u_b = _unit(a), _unit(b)
    p = float(np.clip(u_b @ u_a, 0.0, 1.0))
    if p > 1.0 - eps:
        raise DegeneratePlane(p)
    # Dividing by the residual norm instead of sqrt(1 - p^2) keeps unit length
    # when p is close to 1; the two agree mathematically.
    u_a_perp = _unit(u_b - p * u_a)
    u_b_perp = _unit(p * u_b - u_a)
    return QueryPlane(u_a, u_a_perp, u_b, u_b_perp, p)


def project_state(psi: np.ndarray, plane: QueryPlane) -> ProjectedState:
    a, a_perp = float(plane.u_a @ psi), float(plane.u_a_perp @ psi)
    b, b_perp = float(plane.u_b @ psi), float(plane.u_b_perp @ psi)
    r_a = math.hypot(a, a_perp)
    r_b = math.hypot(b, b_perp)
    if r_a == 0.0 or r_b == 0.0:
        raise ValueError("document state has no component in the query plane")
    return ProjectedState(a / r_a, a_perp / r_a, b / r_b, b_perp / r_b)
