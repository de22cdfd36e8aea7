"""Bell query parameter, window-length sweeps, peak detection and ranking.

A note on what the parameter measures: every pair expectation below is the
quadratic form of a product of two real reflections, i.e. of a rotation, so on a
real state it equals the cosine of the rotation angle whatever the state is.
Consequently ``s_query(state, p) == 2*sqrt(2)*abs(2*p**2 - 1)``; the document
enters only through the overlap ``p`` of the two query word vectors.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import TokenizedDocument, Vocabulary, normalize_query_word
from .hal import HalParams, MatrixCache, WeightFn, build_forward, linear_ramp, symmetrize, word_vector
from .observables import op_A, op_Ax, op_Bminus, op_Bplus, pair_expectation
from .qspace import DEGENERATE_EPS, DegeneratePlane, ProjectedState, document_state, make_plane, project_state

CLASSICAL_BOUND = 2.0
TSIRELSON_BOUND = 2.0 * math.sqrt(2.0)
ALGEBRAIC_BOUND = 4.0

DELTA_TIE = 1e-9
DELTA_PLATEAU = 0.05
DEFAULT_L_MIN = 1
DEFAULT_L_MAX = 60


class Status(str, enum.Enum):
    NORMAL = "normal"
    WORD_A_ABSENT = "word_a_absent"
    WORD_B_ABSENT = "word_b_absent"
    BOTH_ABSENT = "both_absent"
    DEGENERATE = "degenerate"

    @property
    def short_circuit(self) -> bool:
        return self in (Status.WORD_A_ABSENT, Status.WORD_B_ABSENT, Status.BOTH_ABSENT)


class NoPeak(ValueError):
    """Curves fixed by an absent query word have no peak."""


@dataclass(frozen=True)
class BellPoint:
    l: int
    s: float
    status: Status = Status.NORMAL
    p: float | None = None
    state: ProjectedState | None = None


@dataclass(frozen=True)
class BellCurve:
    doc_id: str
    word_a: str
    word_b: str
    points: tuple[BellPoint, ...]
    status: Status

    @property
    def ls(self) -> list[int]:
        return [pt.l for pt in self.points]

    @property
    def values(self) -> list[float]:
        return [pt.s for pt in self.points]


@dataclass(frozen=True)
class PeakReport:
    l_star: int
    s_star: float
    plateau_width: int


@dataclass(frozen=True)
class RankEntry:
    doc_id: str
    status: Status
    peak: PeakReport | None = None

    def to_dict(self) -> dict:
        return {
            "doc": self.doc_id,
            "status": self.status.value,
            "l_star": self.peak.l_star if self.peak else None,
            "s_star": self.peak.s_star if self.peak else None,
            "plateau_width": self.peak.plateau_width if self.peak else None,
        }


@dataclass(frozen=True)
class RankResult:
    entries: tuple[RankEntry, ...]

    @property
    def order(self) -> list[str]:
        return [e.doc_id for e in self.entries]

    def to_json_obj(self) -> list[dict]:
        return [e.to_dict() for e in self.entries]


def s_query(state: ProjectedState | tuple[float, float], p: float) -> float:
    """|<A B+> + <Ax B+>| + |<A B-> - <Ax B->| for the query observables at overlap p."""
    a, ax = op_A(), op_Ax()
    bp, bm = op_Bplus(p), op_Bminus(p)
    return abs(pair_expectation(state, a, bp) + pair_expectation(state, ax, bp)) + abs(
        pair_expectation(state, a, bm) - pair_expectation(state, ax, bm)
    )


def s_query_shortcircuit(status: Status) -> float:
    if status in (Status.WORD_A_ABSENT, Status.WORD_B_ABSENT):
        return 2.0
    if status is Status.BOTH_ABSENT:
        return 0.0
    raise ValueError(f"no short-circuit value for status {status!r}")


def _absence(a_missing: bool, b_missing: bool) -> Status | None:
    if a_missing and b_missing:
        return Status.BOTH_ABSENT
    if a_missing:
        return Status.WORD_A_ABSENT
    if b_missing:
        return Status.WORD_B_ABSENT
    return None


@dataclass(frozen=True)
class SweepOptions:
    weight: WeightFn = linear_ramp
    eps: float = DEGENERATE_EPS
    cache_dir: str | Path | None = None
    workers: int = 1


def evaluate_window(
    doc: TokenizedDocument,
    vocab: Vocabulary,
    word_a: str,
    word_b: str,
    l: int,
    options: SweepOptions = SweepOptions(),
) -> tuple[BellPoint, bool]:
    """Compute one curve point; also report whether the matrix was freshly built."""
    params = HalParams(l, options.weight)
    if options.cache_dir is not None:
        forward, built = MatrixCache(options.cache_dir).get_or_build(doc, vocab, params)
    else:
        forward, built = build_forward(doc, vocab, params), True
    sym = symmetrize(forward)
    w_a = word_vector(sym, word_a, vocab)
    w_b = word_vector(sym, word_b, vocab)

    # A present word whose row is zero defines no direction: treat it as absent.
    status = _absence(w_a.is_zero, w_b.is_zero)
    if status is not None:
        return BellPoint(l, s_query_shortcircuit(status), status), built
    try:
        plane = make_plane(w_a, w_b, options.eps)
    except DegeneratePlane as exc:
        return BellPoint(l, TSIRELSON_BOUND, Status.DEGENERATE, p=exc.p), built
    state = project_state(document_state(doc, sym, vocab), plane)
    return BellPoint(l, s_query(state, plane.p), Status.NORMAL, p=plane.p, state=state), built


def _curve_status(points: Sequence[BellPoint]) -> Status:
    statuses = {pt.status for pt in points}
    if len(statuses) == 1:
        return statuses.pop()
    return Status.NORMAL


def _check_range(l_min: int, l_max: int) -> None:
    if l_min < 1:
        raise ValueError(f"l_min must be >= 1, got {l_min}")
    if l_max < l_min:
        raise ValueError(f"l_max ({l_max}) must be >= l_min ({l_min})")


def _task(args) -> tuple[BellPoint, bool]:
    doc, word_a, word_b, l, options = args
    return evaluate_window(doc, Vocabulary(doc.tokens), word_a, word_b, l, options)


def _run_tasks(tasks: list, workers: int) -> list[tuple[BellPoint, bool]]:
    if workers <= 1 or len(tasks) <= 1:
        return [_task(t) for t in tasks]
    chunk = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map() yields in submission order, so assembly is scheduling-independent.
        return list(pool.map(_task, tasks, chunksize=chunk))


def sweep_documents(
    docs: Sequence[TokenizedDocument],
    word_a: str,
    word_b: str,
    l_min: int = DEFAULT_L_MIN,
    l_max: int = DEFAULT_L_MAX,
    options: SweepOptions = SweepOptions(),
) -> tuple[list[BellCurve], int]:
    """Sweep every document over ``[l_min, l_max]``; returns the curves and the number of matrices built.

    Each document uses its own vocabulary, so a cached matrix depends only on the
    document text and the window length.
    """
    _check_range(l_min, l_max)
    word_a, word_b = normalize_query_word(word_a), normalize_query_word(word_b)
    ls = range(l_min, l_max + 1)
    tasks = [(doc, word_a, word_b, l, options) for doc in docs for l in ls]
    results = _run_tasks(tasks, options.workers)
    curves = []
    built = 0
    for i, doc in enumerate(docs):
        chunk = results[i * len(ls) : (i + 1) * len(ls)]
        points = tuple(pt for pt, _ in chunk)
        built += sum(b for _, b in chunk)
        curves.append(BellCurve(doc.id, word_a, word_b, points, _curve_status(points)))
    return curves, built


def bell_sweep(
    doc: TokenizedDocument,
    word_a: str,
    word_b: str,
    l_min: int = DEFAULT_L_MIN,
    l_max: int = DEFAULT_L_MAX,
    options: SweepOptions = SweepOptions(),
) -> BellCurve:
    curves, _ = sweep_documents([doc], word_a, word_b, l_min, l_max, options)
    return curves[0]


def build_matrices(
    docs: Sequence[TokenizedDocument], l_min: int, l_max: int, options: SweepOptions
) -> tuple[int, int]:
    """Populate the matrix cache; returns ``(built, loaded)`` counts."""
    _check_range(l_min, l_max)
    if options.cache_dir is None:
        raise ValueError("a cache directory is required")
    built = loaded = 0
    for doc in docs:
        vocab = Vocabulary(doc.tokens)
        cache = MatrixCache(options.cache_dir)
        for l in range(l_min, l_max + 1):
            _, fresh = cache.get_or_build(doc, vocab, HalParams(l, options.weight))
            built += fresh
            loaded += not fresh
    return built, loaded


def detect_peak(
    curve: BellCurve, tie_tol: float = DELTA_TIE, plateau_tol: float = DELTA_PLATEAU
) -> PeakReport:
    """Global maximum, earliest window length within ``tie_tol`` of it, and the plateau around it."""
    if curve.status.short_circuit:
        raise NoPeak(f"{curve.doc_id}: curve is fixed by an absent query word ({curve.status.value})")
    if not curve.points:
        raise NoPeak(f"{curve.doc_id}: empty curve")
    values = curve.values
    s_star = max(values)
    k = next(i for i, s in enumerate(values) if s >= s_star - tie_tol)
    lo = hi = k
    while lo > 0 and values[lo - 1] >= s_star - plateau_tol:
        lo -= 1
    while hi + 1 < len(values) and values[hi + 1] >= s_star - plateau_tol:
        hi += 1
    return PeakReport(curve.points[k].l, s_star, hi - lo + 1)


_SHORT_CIRCUIT_ORDER = {Status.WORD_A_ABSENT: 0, Status.WORD_B_ABSENT: 0, Status.BOTH_ABSENT: 1}


def rank_curves(
    curves: Iterable[BellCurve], tie_tol: float = DELTA_TIE, plateau_tol: float = DELTA_PLATEAU
) -> RankResult:
    """Earliest peak first; documents missing query words go last."""
    peaked, fixed = [], []
    for c in curves:
        if c.status.short_circuit:
            fixed.append(RankEntry(c.doc_id, c.status))
        else:
            peaked.append(RankEntry(c.doc_id, c.status, detect_peak(c, tie_tol, plateau_tol)))
    peaked.sort(key=lambda e: (e.peak.l_star, -e.peak.plateau_width, -e.peak.s_star, e.doc_id))
    fixed.sort(key=lambda e: (_SHORT_CIRCUIT_ORDER[e.status], e.doc_id))
    return RankResult(tuple(peaked + fixed))


def rank_documents(
    docs: Sequence[TokenizedDocument],
    word_a: str,
    word_b: str,
    l_min: int = DEFAULT_L_MIN,
    l_max: int = DEFAULT_L_MAX,
    options: SweepOptions = SweepOptions(),
    tie_tol: float = DELTA_TIE,
    plateau_tol: float = DELTA_PLATEAU,
) -> RankResult:
    curves, _ = sweep_documents(docs, word_a, word_b, l_min, l_max, options)
    return rank_curves(curves, tie_tol, plateau_tol)
