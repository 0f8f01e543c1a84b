"""Input checks shared by the estimator classes."""

from __future__ import annotations

from .words import LetterDistribution, Word, as_word


def check_words(X, min_length: int = 1) -> list[Word]:
    """Coerce an iterable of words (str, rank sequences or Words) to a list of Words."""
    if isinstance(X, (str, Word)):
        raise TypeError("expected a collection of words, got a single word")
    try:
        words = [as_word(x) for x in X]
    except TypeError as exc:
        raise TypeError("X must be an iterable of words") from exc
    if not words:
        raise ValueError("X is empty")
    for w in words:
        if len(w) < min_length:
            raise ValueError(f"words must have length >= {min_length}, got {len(w)}")
    return words


def check_distribution(dist) -> LetterDistribution:
    if isinstance(dist, LetterDistribution):
        return dist
    if isinstance(dist, str):
        return LetterDistribution.from_spec(dist)
    return LetterDistribution(dist)
