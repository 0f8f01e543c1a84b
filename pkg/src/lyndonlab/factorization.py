"""Lyndon factorization, standard factorization and normalized factor lengths."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels
from .words import Word, as_word, is_lyndon


@dataclass(frozen=True)
class Factorization:
    """Nonincreasing Lyndon factorization ``w = w_l ... w_2 w_1``.

    ``spans`` are ``(start, length)`` pairs read left to right, so the last
    span is the smallest factor ``w_1``. Factors are views into ``word``.
    """

    word: Word
    spans: tuple[tuple[int, int], ...]

    @classmethod
    def from_ends(cls, word: Word, ends) -> Factorization:
        spans, start = [], 0
        for end in ends:
            end = int(end)
            spans.append((start, end - start))
            start = end
        return cls(word, tuple(spans))

    @property
    def count(self) -> int:
        return len(self.spans)

    @property
    def factors(self) -> list[Word]:
        return [self.word[s : s + m] for s, m in self.spans]

    @property
    def lengths(self) -> list[int]:
        """Factor lengths, smallest factor first."""
        return [m for _, m in reversed(self.spans)]

    def __iter__(self):
        return iter(self.factors)

    def __len__(self):
        return self.count

    def __str__(self):
        return "(" + ")(".join(str(f) for f in self.factors) + ")"


@dataclass(frozen=True)
class RhoSequence:
    """Normalized factor lengths ``|w_i| / n``, smallest factor first.

    Conceptually continued by zeros past the last factor.
    """

    values: tuple[Fraction, ...]
    n: int

    def __getitem__(self, i):
        return self.values[i]

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def partial_remainders(self) -> list[Fraction]:
        """``s_i = 1 - (rho_1 + ... + rho_i)`` for ``i = 0..l``."""
        out, s = [Fraction(1)], Fraction(1)
        for v in self.values:
            s -= v
            out.append(s)
        return out

    def padded(self, depth: int) -> np.ndarray:
        out = np.zeros(depth)
        m = min(depth, len(self.values))
        out[:m] = [float(v) for v in self.values[:m]]
        return out


@dataclass(frozen=True)
class StandardFactorization:
    """``w = u v`` with ``v`` the smallest proper suffix of ``w``."""

    u: Word
    v: Word

    @property
    def n(self) -> int:
        return len(self.u) + len(self.v)

    @property
    def R(self) -> int:
        return len(self.v)

    @property
    def r(self) -> Fraction:
        return Fraction(len(self.v), self.n)


def duval_factorize(w) -> Factorization:
    """Linear-time Chen-Fox-Lyndon factorization (Duval's algorithm)."""
    w = as_word(w)
    if len(w) == 0:
        raise ValueError("cannot factorize the empty word")
    return Factorization.from_ends(w, _kernels.duval_ends(w.letters))


def brute_force_factorize(w) -> Factorization:
    """Reference factorization: repeatedly strip the smallest suffix.

    Quadratic; meant as an oracle for short words.
    """
    w = as_word(w)
    if len(w) == 0:
        raise ValueError("cannot factorize the empty word")
    letters = tuple(w.letters.tolist())
    ends = []
    end = len(letters)
    while end > 0:
        head = letters[:end]
        start = min(range(end), key=lambda i: head[i:])
        ends.append(end)
        end = start
    return Factorization.from_ends(w, reversed(ends))


def standard_right_factor(w) -> StandardFactorization:
    """Standard factorization of a Lyndon word of length at least 2."""
    w = as_word(w)
    if len(w) < 2:
        raise ValueError("standard factorization needs a word of length >= 2")
    if not is_lyndon(w):
        raise ValueError(f"{w!r} is not a Lyndon word")
    # the smallest proper suffix of w is the smallest suffix of w[1:]
    split = 1 + int(_kernels.smallest_suffix_start(w.letters[1:]))
    return StandardFactorization(w[:split], w[split:])


def rho_sequence(f: Factorization) -> RhoSequence:
    n = len(f.word)
    return RhoSequence(tuple(Fraction(m, n) for m in f.lengths), n)


def decreasing_rearrangement(r: RhoSequence | Sequence) -> list:
    return sorted(r, reverse=True)
