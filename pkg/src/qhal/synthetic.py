"""Generated corpora with planted query-word geometry, for ranking checks and demos."""

from __future__ import annotations

import random

_CONSONANTS = "bcdfghjklmnpqrtvxz"


def filler_vocabulary(size: int, rng: random.Random) -> list[str]:
    """Random consonant pseudo-words; none ends in "s", so tokenization keeps them intact."""
    words: set[str] = set()
    while len(words) < size:
        words.add("w" + "".join(rng.choice(_CONSONANTS) for _ in range(5)))
    return sorted(words)


def planted_text(
    word_a: str,
    word_b: str | None,
    gap: tuple[int, int],
    rng: random.Random,
    filler: list[str],
    length: int = 2000,
    period: int = 60,
) -> str:
    """Filler text with ``word_a`` at the start of every ``period`` tokens and
    ``word_b`` a uniformly drawn ``gap`` positions after it (omitted when None)."""
    lo, hi = gap
    if not 1 <= lo <= hi < period:
        raise ValueError(f"gap {gap} must fit inside a period of {period}")
    tokens: list[str] = []
    while len(tokens) < length:
        block = [rng.choice(filler) for _ in range(period)]
        block[0] = word_a
        if word_b is not None:
            block[rng.randint(lo, hi)] = word_b
        tokens.extend(block)
    return " ".join(tokens[:length])


def planted_corpus(word_a: str = "alpha", word_b: str = "bravo", seed: int = 0, filler_size: int = 200) -> dict[str, str]:
    """Three documents: A and B within 5 tokens (``d1``), about 30 apart (``d2``),
    and B never present (``d3``)."""
    rng = random.Random(seed)
    filler = filler_vocabulary(filler_size, rng)
    return {
        "d1": planted_text(word_a, word_b, (1, 5), rng, filler),
        "d2": planted_text(word_a, word_b, (28, 32), rng, filler),
        "d3": planted_text(word_a, None, (1, 5), rng, filler),
    }
