"""Text ingestion: tokenization, documents and vocabularies."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from itertools import groupby
from pathlib import Path
from typing import Iterable, Sequence

PLURAL_MIN_LENGTH = 4


def depluralize(token: str) -> str:
    """Strip one trailing "s" from simple plurals ("battles" -> "battle").

    Short tokens ("is", "has") and tokens ending in "ss" ("less") are kept.
    """
    if len(token) >= PLURAL_MIN_LENGTH and token.endswith("s") and not token.endswith("ss"):
        return token[:-1]
    return token


def normalize_words(raw_text: str) -> list[str]:
    """Case-fold, cut into maximal runs of letters, de-pluralize."""
    # upper() first so that e.g. dotless i and I fold to the same letter.
    folded = raw_text.upper().casefold()
    return [depluralize("".join(run)) for is_letter, run in groupby(folded, str.isalpha) if is_letter]


@dataclass(frozen=True)
class TokenizedDocument:
    id: str
    tokens: tuple[str, ...]
    source_digest: str

    def __len__(self) -> int:
        return len(self.tokens)


def digest_text(raw_text: str) -> str:
    return hashlib.sha256(raw_text.encode("utf-8")).hexdigest()


def tokenize(raw_text: str, doc_id: str = "") -> TokenizedDocument:
    """Lowercase, split on non-letters and de-pluralize, keeping every word."""
    return TokenizedDocument(doc_id, tuple(normalize_words(raw_text)), digest_text(raw_text))


class Vocabulary:
    """Bijection between word types and dense indices, assigned in sorted order."""

    def __init__(self, words: Iterable[str]):
        self.words: tuple[str, ...] = tuple(sorted(set(words)))
        self.index: dict[str, int] = {w: i for i, w in enumerate(self.words)}

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: object) -> bool:
        return word in self.index

    def __iter__(self):
        return iter(self.words)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Vocabulary) and self.words == other.words

    def __repr__(self) -> str:
        return f"Vocabulary({len(self)} words)"

    def get(self, word: str) -> int | None:
        return self.index.get(word)

    def encode(self, doc: TokenizedDocument) -> list[int]:
        try:
            return [self.index[t] for t in doc.tokens]
        except KeyError as exc:
            raise KeyError(f"token {exc.args[0]!r} of document {doc.id!r} is not in the vocabulary") from None


def build_vocabulary(docs: Iterable[TokenizedDocument]) -> Vocabulary:
    return Vocabulary(t for doc in docs for t in doc.tokens)


def _expand_paths(paths: Sequence[str | Path]) -> list[Path]:
    files: list[Path] = []
    for p in map(Path, paths):
        if p.is_dir():
            files.extend(sorted(f for f in p.iterdir() if f.is_file() and not f.name.startswith(".")))
        elif p.is_file():
            files.append(p)
        else:
            raise FileNotFoundError(f"no such document file or directory: {p}")
    return files


def load_documents(paths: Sequence[str | Path]) -> list[TokenizedDocument]:
    """Read UTF-8 text files (directories are expanded); the id is the file stem.

    Documents are returned sorted by id.
    """
    docs: dict[str, TokenizedDocument] = {}
    for path in _expand_paths(paths):
        doc = tokenize(path.read_text(encoding="utf-8"), path.stem)
        if doc.id in docs:
            raise ValueError(f"duplicate document id {doc.id!r} ({path})")
        docs[doc.id] = doc
    return [docs[k] for k in sorted(docs)]


def normalize_query_word(word: str) -> str:
    """Apply the document normalization to a query word; it must yield one token."""
    tokens = normalize_words(word)
    if len(tokens) != 1:
        raise ValueError(f"query word {word!r} normalizes to {tokens!r}, expected exactly one token")
    return tokens[0]
