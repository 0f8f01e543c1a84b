"""Alphabets, letter distributions and words over ranked symbols.

Symbols are addressed by their 1-based rank: rank 1 is the smallest letter
``a1``. Words are immutable wrappers around read-only ``int64`` arrays.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

from . import _kernels

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class Alphabet:
    """Ordered alphabet ``a1 < a2 < ...``; ``size=None`` means unbounded."""

    size: int | None = None

    def __post_init__(self):
        if self.size is not None and self.size < 1:
            raise ValueError(f"alphabet size must be positive, got {self.size}")

    @property
    def is_finite(self) -> bool:
        return self.size is not None

    def __contains__(self, rank) -> bool:
        return rank >= 1 and (self.size is None or rank <= self.size)


def _exact(x) -> Fraction:
    if isinstance(x, (Fraction, int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(repr(float(x)))


class LetterDistribution:
    """Finite distribution ``(p_1, p_2, ...)`` over letter ranks.

    Probabilities are kept as exact fractions (floats are read through their
    shortest decimal repr, so ``0.3`` becomes ``3/10``).
    """

    def __init__(self, probabilities: Iterable, *, tol: float = 1e-12):
        probs = tuple(_exact(p) for p in probabilities)
        if not probs:
            raise ValueError("empty distribution")
        if any(p < 0 for p in probs):
            raise ValueError("probabilities must be nonnegative")
        if abs(float(sum(probs)) - 1.0) > tol:
            raise ValueError(f"probabilities sum to {float(sum(probs))!r}, not 1")
        if not 0 < probs[0] < 1:
            raise ValueError(f"p1 must lie in (0, 1), got {probs[0]}")
        self.probabilities = probs
        self._cdf = np.cumsum([float(p) for p in probs])
        self._cdf[-1] = 1.0

    @classmethod
    def uniform(cls, q: int) -> LetterDistribution:
        if q < 2:
            raise ValueError("uniform distribution needs at least 2 letters")
        return cls([Fraction(1, q)] * q)

    @classmethod
    def geometric(cls, p) -> GeometricDistribution:
        return GeometricDistribution(p)

    @classmethod
    def from_spec(cls, spec: str) -> LetterDistribution:
        """Parse ``uniform:q``, ``geometric:p`` or ``json:[p1,p2,...]``."""
        kind, sep, arg = spec.partition(":")
        if not sep:
            raise ValueError(f"bad distribution spec {spec!r}")
        kind = kind.strip().lower()
        if kind == "uniform":
            return cls.uniform(int(arg))
        if kind == "geometric":
            return GeometricDistribution(arg.strip())
        if kind == "json":
            # keep the literal decimal text so that 0.3 stays 3/10
            values = json.loads(arg, parse_float=Fraction, parse_int=Fraction)
            if not isinstance(values, list):
                raise ValueError("json distribution must be a list")
            return cls(values)
        raise ValueError(f"unknown distribution kind {kind!r}")

    @property
    def spec(self) -> str:
        probs = self.probabilities
        if all(p == probs[0] for p in probs):
            return f"uniform:{len(probs)}"
        return "json:[" + ",".join(_fmt_fraction(p) for p in probs) + "]"

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(len(self.probabilities))

    @property
    def p1(self) -> Fraction:
        return self.probabilities[0]

    @property
    def beta(self) -> Fraction:
        return max(self.p1, 1 - self.p1)

    def pmf(self, rank: int) -> Fraction:
        if 1 <= rank <= len(self.probabilities):
            return self.probabilities[rank - 1]
        return Fraction(0)

    def power_sum(self, d: int) -> Fraction:
        """Exact ``sum_i p_i**d`` for a positive integer ``d``."""
        return sum((p**d for p in self.probabilities), Fraction(0))

    def norm(self, alpha: float) -> float:
        if alpha < 1:
            raise ValueError("alpha-norm needs alpha >= 1")
        return float(sum(float(p) ** alpha for p in self.probabilities)) ** (1.0 / alpha)

    def weight(self, letters: Sequence[int]) -> Fraction:
        out = Fraction(1)
        for r in letters:
            out *= self.pmf(int(r))
        return out

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Inverse-CDF draw of ``size`` letter ranks."""
        u = rng.random(size)
        return np.searchsorted(self._cdf, u, side="right").astype(np.int64) + 1

    def __eq__(self, other):
        return type(self) is type(other) and self.probabilities == other.probabilities

    def __hash__(self):
        return hash(self.probabilities)

    def __repr__(self):
        return f"LetterDistribution({self.spec!r})"


class GeometricDistribution(LetterDistribution):
    """``p_i = p (1-p)**(i-1)`` on the unbounded alphabet."""

    def __init__(self, p):
        p = _exact(p)
        if not 0 < p < 1:
            raise ValueError(f"geometric parameter must lie in (0, 1), got {p}")
        self.p = p

    @property
    def probabilities(self):
        raise AttributeError("geometric distribution has unbounded support")

    @property
    def spec(self) -> str:
        return f"geometric:{_fmt_fraction(self.p)}"

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(None)

    @property
    def p1(self) -> Fraction:
        return self.p

    def pmf(self, rank: int) -> Fraction:
        if rank < 1:
            return Fraction(0)
        return self.p * (1 - self.p) ** (rank - 1)

    def power_sum(self, d: int) -> Fraction:
        return self.p**d / (1 - (1 - self.p) ** d)

    def norm(self, alpha: float) -> float:
        if alpha < 1:
            raise ValueError("alpha-norm needs alpha >= 1")
        p = float(self.p)
        return (p**alpha / (1.0 - (1.0 - p) ** alpha)) ** (1.0 / alpha)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        u = rng.random(size)
        ranks = np.floor(np.log1p(-u) / math.log1p(-float(self.p))) + 1
        return ranks.astype(np.int64)

    def __eq__(self, other):
        return type(self) is type(other) and self.p == other.p

    def __hash__(self):
        return hash(("geometric", self.p))

    def __repr__(self):
        return f"GeometricDistribution({self.spec!r})"


def _fmt_fraction(p: Fraction) -> str:
    if p.denominator == 1:
        return str(p.numerator)
    # short decimal when exact, else the fraction itself
    den = p.denominator
    while den % 2 == 0:
        den //= 2
    while den % 5 == 0:
        den //= 5
    if den == 1:
        text = f"{float(p)!r}"
        if Fraction(text) == p:
            return text
    return f"{p.numerator}/{p.denominator}"


class Word:
    """Immutable finite word of letter ranks.

    ``Word("banana")`` reads lowercase letters as ranks 1..26;
    ``Word("3,1,27")`` or ``Word([3, 1, 27])`` give ranks directly.
    """

    def __init__(self, letters, alphabet: Alphabet | None = None):
        if isinstance(letters, Word):
            alphabet = alphabet or letters.alphabet
            letters = letters.letters
        elif isinstance(letters, str):
            letters = decode_word(letters)
        arr = np.array(letters, dtype=np.int64).reshape(-1)
        alphabet = alphabet or Alphabet()
        if arr.size:
            lo, hi = int(arr.min()), int(arr.max())
            if lo < 1:
                raise ValueError("letter ranks must be >= 1")
            if alphabet.size is not None and hi > alphabet.size:
                raise ValueError(f"rank {hi} outside alphabet of size {alphabet.size}")
        arr.flags.writeable = False
        self.letters = arr
        self.alphabet = alphabet

    @classmethod
    def _wrap(cls, arr: np.ndarray, alphabet: Alphabet) -> Word:
        # trusted constructor: no validation, no copy
        obj = cls.__new__(cls)
        if arr.flags.writeable:
            arr = arr.view()
            arr.flags.writeable = False
        obj.letters = arr
        obj.alphabet = alphabet
        return obj

    def __len__(self):
        return self.letters.shape[0]

    def __iter__(self):
        return (int(x) for x in self.letters)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return Word._wrap(self.letters[item], self.alphabet)
        return int(self.letters[item])

    def __add__(self, other: Word) -> Word:
        _check_same_alphabet(self, other)
        return Word._wrap(np.concatenate([self.letters, other.letters]), self.alphabet)

    @cached_property
    def _key(self) -> bytes:
        # big-endian unsigned bytes compare exactly like the words
        return self.letters.astype(">u8").tobytes()

    def __eq__(self, other):
        if not isinstance(other, Word):
            return NotImplemented
        return self.alphabet == other.alphabet and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __lt__(self, other):
        return lex_compare(self, other) < 0

    def __le__(self, other):
        return lex_compare(self, other) <= 0

    def __gt__(self, other):
        return lex_compare(self, other) > 0

    def __ge__(self, other):
        return lex_compare(self, other) >= 0

    def __str__(self):
        return encode_word(self.letters)

    def __repr__(self):
        return f"Word({str(self)!r})"

    def tolist(self) -> list[int]:
        return self.letters.tolist()


def decode_word(text: str) -> list[int]:
    """Text codec: ``"abc"`` -> ``[1, 2, 3]``; ``"1,2,30"`` -> ``[1, 2, 30]``."""
    text = text.strip()
    if not text:
        return []
    if "," in text or text.isdigit():
        return [int(tok) for tok in text.split(",")]
    out = []
    for ch in text:
        idx = _LETTERS.find(ch)
        if idx < 0:
            raise ValueError(f"cannot decode letter {ch!r}; use comma-separated ranks")
        out.append(idx + 1)
    return out


def encode_word(letters) -> str:
    letters = [int(x) for x in letters]
    if letters and max(letters) > len(_LETTERS):
        return ",".join(str(x) for x in letters)
    return "".join(_LETTERS[x - 1] for x in letters)


def as_word(w, alphabet: Alphabet | None = None) -> Word:
    if isinstance(w, Word) and alphabet is None:
        return w
    return Word(w, alphabet)


def _check_same_alphabet(u: Word, v: Word):
    if u.alphabet != v.alphabet:
        raise ValueError(f"words over different alphabets: {u.alphabet} vs {v.alphabet}")


def lex_compare(u, v) -> int:
    """Three-way lexicographic comparison: -1, 0 or 1.

    A proper prefix is smaller than any of its extensions.
    """
    u, v = as_word(u), as_word(v)
    _check_same_alphabet(u, v)
    a, b = u._key, v._key
    return (a > b) - (a < b)


def _require_nonempty(w: Word, what: str):
    if len(w) == 0:
        raise ValueError(f"{what} is undefined on the empty word")


def rotate(w, r: int) -> Word:
    """``tau**r w``: move the first ``r`` letters (mod n) to the end."""
    w = as_word(w)
    _require_nonempty(w, "rotation")
    if r < 0:
        raise ValueError("rotation count must be nonnegative")
    r %= len(w)
    return Word._wrap(np.roll(w.letters, -r), w.alphabet)


def is_primitive(w) -> bool:
    w = as_word(w)
    _require_nonempty(w, "primitivity")
    n = len(w)
    p = int(_kernels.smallest_period(w.letters))
    return p == n or n % p != 0


def least_rotation(w) -> tuple[int, Word]:
    """Return ``(r, tau**r w)`` with ``tau**r w`` the Lyndon word of the necklace."""
    w = as_word(w)
    _require_nonempty(w, "least rotation")
    if not is_primitive(w):
        raise ValueError(f"{w!r} is not primitive; its necklace has no Lyndon word")
    r = int(_kernels.least_rotation(w.letters))
    return r, rotate(w, r)


def is_lyndon(w) -> bool:
    w = as_word(w)
    if len(w) == 0:
        return False
    return bool(_kernels.is_lyndon(w.letters))
