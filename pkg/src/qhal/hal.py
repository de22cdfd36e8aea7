"""HAL co-occurrence matrices: construction, symmetrization, word rows, disk cache."""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .corpus import TokenizedDocument, Vocabulary

MAGIC = "QHAL1"

WeightFn = Callable[[int, int], float]


def linear_ramp(d: int, l: int) -> int:
    """Adjacent words get weight ``l``, words ``l`` apart get weight 1."""
    return l - d + 1


def reciprocal(d: int, l: int) -> float:
    return 1.0 / d


class CacheFormatError(ValueError):
    """Malformed matrix stream."""


@dataclass(frozen=True)
class HalParams:
    window_length: int
    weight: WeightFn = field(default=linear_ramp, compare=False)

    def __post_init__(self):
        if int(self.window_length) != self.window_length or self.window_length < 1:
            raise ValueError(f"window length must be an integer >= 1, got {self.window_length!r}")


@dataclass(frozen=True, eq=False)
class CooccurrenceMatrix:
    """Sparse word-by-word weights for one window length (CSR, duplicates summed)."""

    matrix: sp.csr_matrix
    window_length: int
    symmetric: bool = False
    doc_digest: str = "-"

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def nnz(self) -> int:
        return self.matrix.count_nonzero()

    def entry(self, i: int, j: int):
        return self.matrix[i, j]

    def row(self, i: int) -> np.ndarray:
        return self.matrix.getrow(i).toarray().ravel()

    def total(self):
        return self.matrix.sum()

    def triplets(self) -> list[tuple[int, int, object]]:
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return [
            (int(coo.row[k]), int(coo.col[k]), coo.data[k].item())
            for k in order
            if coo.data[k] != 0
        ]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CooccurrenceMatrix):
            return NotImplemented
        return (
            self.n == other.n
            and self.window_length == other.window_length
            and self.symmetric == other.symmetric
            and self.doc_digest == other.doc_digest
            and (self.matrix != other.matrix).nnz == 0
        )

    __hash__ = None


@dataclass(frozen=True)
class WordVector:
    components: np.ndarray
    index: int | None
    absent: bool = False

    @property
    def is_zero(self) -> bool:
        return not np.any(self.components)


def build_forward(doc: TokenizedDocument, vocab: Vocabulary, params: HalParams) -> CooccurrenceMatrix:
    """Slide the window from the first token to the last, accumulating forward pairs.

    For each focus position ``i`` and offset ``d`` in ``1..l`` (clipped at the end of
    the document), ``weight(d, l)`` is added to entry (token[i], token[i+d]).
    """
    ids = np.asarray(vocab.encode(doc), dtype=np.int64)
    l = params.window_length
    n = len(vocab)
    rows, cols, data = [], [], []
    for d in range(1, min(l, len(ids) - 1) + 1):
        rows.append(ids[:-d])
        cols.append(ids[d:])
        data.append(np.full(len(ids) - d, params.weight(d, l)))
    if rows:
        values = np.concatenate(data)
        m = sp.coo_matrix((values, (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
    else:
        m = sp.coo_matrix((n, n), dtype=np.int64)
    m = m.tocsr()
    m.sum_duplicates()
    return CooccurrenceMatrix(m, l, symmetric=False, doc_digest=doc.source_digest)


def symmetrize(m: CooccurrenceMatrix) -> CooccurrenceMatrix:
    if m.symmetric:
        raise ValueError("matrix is already symmetric")
    s = (m.matrix + m.matrix.T).tocsr()
    return CooccurrenceMatrix(s, m.window_length, symmetric=True, doc_digest=m.doc_digest)


def word_vector(m: CooccurrenceMatrix, word: str, vocab: Vocabulary) -> WordVector:
    if not m.symmetric:
        raise ValueError("word vectors are rows of the symmetric matrix")
    idx = vocab.get(word)
    if idx is None:
        return WordVector(np.zeros(m.n), None, absent=True)
    return WordVector(m.row(idx).astype(np.float64), idx)


def _format_weight(w) -> str:
    if isinstance(w, (int, np.integer)) or float(w).is_integer():
        return str(int(w))
    return repr(float(w))


def dumps(m: CooccurrenceMatrix) -> bytes:
    """Serialize a forward matrix: a header line then sorted ``row col weight`` lines."""
    if m.symmetric:
        raise ValueError("only forward matrices are stored; symmetrize after loading")
    lines = [f"{MAGIC} {m.doc_digest} {m.window_length} {m.n}"]
    lines.extend(f"{r} {c} {_format_weight(w)}" for r, c, w in m.triplets())
    return ("\n".join(lines) + "\n").encode("ascii")


def loads(data: bytes) -> CooccurrenceMatrix:
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError as exc:
        raise CacheFormatError(f"byte offset {exc.start}: non-ASCII data") from None
    lines = text.splitlines()
    if not lines:
        raise CacheFormatError("line 1: missing header")
    head = lines[0].split()
    if len(head) != 4 or head[0] != MAGIC:
        raise CacheFormatError(f"line 1: bad header {lines[0]!r}")
    try:
        digest, l, n = head[1], int(head[2]), int(head[3])
    except ValueError:
        raise CacheFormatError(f"line 1: bad header {lines[0]!r}") from None
    if l < 1 or n < 0:
        raise CacheFormatError(f"line 1: bad header {lines[0]!r}")

    rows, cols, vals = [], [], []
    integral = True
    prev = (-1, -1)
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) != 3:
            raise CacheFormatError(f"line {lineno}: expected 'row col weight', got {line!r}")
        try:
            r, c = int(parts[0]), int(parts[1])
            w: float | int
            if parts[2].lstrip("-").isdigit():
                w = int(parts[2])
            else:
                w = float(parts[2])
                integral = False
        except ValueError:
            raise CacheFormatError(f"line {lineno}: unparsable entry {line!r}") from None
        if not (0 <= r < n and 0 <= c < n):
            raise CacheFormatError(f"line {lineno}: index out of range for n={n}")
        if not np.isfinite(w) or w < 0:
            raise CacheFormatError(f"line {lineno}: weight must be finite and nonnegative")
        if (r, c) <= prev:
            raise CacheFormatError(f"line {lineno}: entries not sorted by (row, col)")
        prev = (r, c)
        rows.append(r)
        cols.append(c)
        vals.append(w)

    dtype = np.int64 if integral else np.float64
    m = sp.csr_matrix(
        (np.asarray(vals, dtype=dtype), (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))),
        shape=(n, n),
    )
    return CooccurrenceMatrix(m, l, symmetric=False, doc_digest=digest)


class MatrixCache:
    """Forward matrices on disk, keyed by document digest, weight function and window length."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)

    def path_for(self, digest: str, l: int, weight: WeightFn = linear_ramp) -> Path:
        tag = getattr(weight, "__name__", "custom")
        return self.directory / f"{digest}-{tag}-l{l:04d}.qhal"

    def get_or_build(
        self, doc: TokenizedDocument, vocab: Vocabulary, params: HalParams
    ) -> tuple[CooccurrenceMatrix, bool]:
        """Return ``(matrix, built)``; ``built`` is False on a cache hit."""
        path = self.path_for(doc.source_digest, params.window_length, params.weight)
        if path.exists():
            m = loads(path.read_bytes())
            if m.n != len(vocab) or m.window_length != params.window_length:
                raise CacheFormatError(f"{path}: header does not match the document")
            return m, False
        m = build_forward(doc, vocab, params)
        self.directory.mkdir(parents=True, exist_ok=True)
        # Atomic publish so concurrent workers never read a partial file.
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        with os.fdopen(fd, "wb") as fh:
            fh.write(dumps(m))
        os.replace(tmp, path)
        return m, True
