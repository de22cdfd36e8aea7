"""Bell-parameter scoring of documents for two-word queries over HAL semantic spaces."""

from .bell import (
    ALGEBRAIC_BOUND,
    CLASSICAL_BOUND,
    TSIRELSON_BOUND,
    BellCurve,
    BellPoint,
    NoPeak,
    PeakReport,
    RankResult,
    Status,
    SweepOptions,
    bell_sweep,
    detect_peak,
    rank_documents,
    s_query,
    s_query_shortcircuit,
)
from .corpus import TokenizedDocument, Vocabulary, build_vocabulary, load_documents, tokenize
from .hal import CooccurrenceMatrix, HalParams, build_forward, symmetrize, word_vector
from .qspace import AbsentWord, DegeneratePlane, ProjectedState, QueryPlane, make_plane, project_state

__version__ = "0.1.0"
