"""Runs of the smallest letter, long blocks, good words and block decompositions.

A word is read through the morphism sending ``a1`` to the digit 0 and every
other letter to 1. Thresholds depend on ``n``, on ``p1`` and on
``beta = max(p1, 1 - p1)``; real thresholds are turned into integer length
tests with a ``1e-9`` slack so that exact values (``log2(16) = 4``) behave.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .factorization import standard_right_factor
from .words import LetterDistribution, Word, as_word, is_lyndon

_SLACK = 1e-9

GENERAL = "general"
LYNDON = "lyndon"


def _log(n: int, base) -> float:
    return math.log(n) / math.log(float(base))


@dataclass(frozen=True)
class BlockParams:
    """Thresholds for long runs and long blocks.

    ``alpha=None`` resolves to ``0.9 * p1 (1 - p1) / 4`` for the distribution
    at hand.
    """

    epsilon: float = 0.4
    alpha: float | None = None

    def __post_init__(self):
        if not 0 < self.epsilon < 0.5:
            raise ValueError(f"epsilon must lie in (0, 1/2), got {self.epsilon}")
        if self.alpha is not None and self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")

    def alpha_for(self, dist: LetterDistribution) -> float:
        p1 = float(dist.p1)
        cap = p1 * (1 - p1) / 4
        if self.alpha is None:
            return 0.9 * cap
        if self.alpha >= cap:
            raise ValueError(f"alpha must be < p1(1-p1)/4 = {cap:.6g}, got {self.alpha}")
        return self.alpha

    def run_threshold(self, n: int, dist: LetterDistribution) -> float:
        return (1 - self.epsilon) * _log(n, 1 / dist.p1)

    def min_run_length(self, n: int, dist: LetterDistribution) -> int:
        """A run of ``a1`` is long iff its length is at least this."""
        return max(1, math.ceil(self.run_threshold(n, dist) - _SLACK))

    def block_threshold(self, n: int, dist: LetterDistribution) -> float:
        return 1 + 3 * _log(n, 1 / dist.beta)

    def min_block_length(self, n: int, dist: LetterDistribution) -> int:
        """Smallest integer length strictly larger than the block threshold."""
        return math.floor(self.block_threshold(n, dist) + _SLACK) + 1

    def common_factor_bound(self, n: int, dist: LetterDistribution) -> float:
        return 3 * _log(n, 1 / dist.beta)

    def min_blocks(self, n: int, dist: LetterDistribution) -> int:
        return math.floor(self.alpha_for(dist) * n**self.epsilon)


def binarize(w) -> np.ndarray:
    """0 where the letter is ``a1``, 1 elsewhere."""
    w = as_word(w)
    return (w.letters != 1).astype(np.uint8)


@dataclass(frozen=True, eq=False)
class RunStats:
    """Maximal runs of the binarized word, in order."""

    digits: np.ndarray
    starts: np.ndarray
    lengths: np.ndarray

    @property
    def runs(self) -> list[tuple[int, int]]:
        return list(zip(self.digits.tolist(), self.lengths.tolist()))

    @property
    def N(self) -> int:
        return int(self.digits.shape[0])

    @property
    def N0(self) -> int:
        return int(np.count_nonzero(self.digits == 0))

    @property
    def N1(self) -> int:
        return int(np.count_nonzero(self.digits == 1))

    @property
    def M0(self) -> int:
        sel = self.lengths[self.digits == 0]
        return int(sel.max()) if sel.size else 0

    @property
    def M1(self) -> int:
        sel = self.lengths[self.digits == 1]
        return int(sel.max()) if sel.size else 0

    def summary(self) -> dict:
        return {"N": self.N, "N0": self.N0, "N1": self.N1, "M0": self.M0, "M1": self.M1}


def run_stats(w) -> RunStats:
    b = binarize(w)
    n = b.shape[0]
    if n == 0:
        raise ValueError("run statistics need a nonempty word")
    starts = np.concatenate([[0], np.flatnonzero(np.diff(b)) + 1]).astype(np.int64)
    lengths = np.diff(np.append(starts, n))
    return RunStats(b[starts], starts, lengths)


def _a1_runs(stats: RunStats) -> tuple[np.ndarray, np.ndarray]:
    sel = stats.digits == 0
    return stats.starts[sel], stats.lengths[sel]


def long_runs(w, params: BlockParams, dist: LetterDistribution) -> list[tuple[int, int]]:
    """Spans ``(start, length)`` of the long runs of ``a1``; their count is ``H_n``."""
    w = as_word(w)
    if len(w) < 2:
        raise ValueError("long runs need n >= 2")
    starts, lengths = _a1_runs(run_stats(w))
    keep = lengths >= params.min_run_length(len(w), dist)
    return list(zip(starts[keep].tolist(), lengths[keep].tolist()))


def _scan_blocks(w: Word, params: BlockParams, dist: LetterDistribution, cyclic: bool):
    n = len(w)
    stats = run_stats(w)
    a1_starts, a1_lengths = _a1_runs(stats)
    long_sel = a1_lengths >= params.min_run_length(n, dist)
    runs = list(zip(a1_starts[long_sel].tolist(), a1_lengths[long_sel].tolist()))
    endpoints = a1_starts
    if cyclic and n and w.letters[0] == 1 and w.letters[-1] != 1:
        # on the necklace the word end is followed by the leading run of a1
        endpoints = np.append(a1_starts, n)
    min_len = params.min_block_length(n, dist)
    blocks, orphans = [], []
    for s, m in runs:
        i = np.searchsorted(endpoints, s + min_len, side="left")
        if i < endpoints.shape[0]:
            blocks.append((s, int(endpoints[i]) - s))
        else:
            orphans.append((s, m))
    return stats, runs, blocks, orphans


def long_blocks(
    w, params: BlockParams, dist: LetterDistribution, *, cyclic: bool = False
) -> list[tuple[int, int]]:
    """Long blocks as ``(start, length)`` spans, in word order.

    A long block starts with a long run of ``a1``, ends just before the start
    of some run of ``a1`` and has the smallest such length above the block
    threshold. A long run with no admissible end before the word end gets no
    block. With ``cyclic=True`` the end of the word also counts as an end
    point when the word starts with ``a1`` (necklace reading).
    """
    w = as_word(w)
    if len(w) < 2:
        raise ValueError("long blocks need n >= 2")
    return _scan_blocks(w, params, dist, cyclic)[2]


@dataclass(frozen=True)
class GoodWordReport:
    """Outcome of the six good-word conditions.

    i: enough long blocks; ii: long blocks do not overlap; iii: common
    factors of two long blocks are short; iv: every long run starts a long
    block; v, vi: longest runs of ``a1`` / of other letters are bounded.
    """

    conditions: dict
    witnesses: dict
    long_runs: list
    long_blocks: list
    run_stats: RunStats = field(repr=False)

    @property
    def is_good(self) -> bool:
        return all(self.conditions.values())

    @property
    def failed(self) -> list[str]:
        return [k for k, ok in self.conditions.items() if not ok]

    def to_dict(self) -> dict:
        return {
            "is_good": self.is_good,
            "conditions": dict(self.conditions),
            "witnesses": {k: v for k, v in self.witnesses.items() if v},
        }


class NotGoodWordError(ValueError):
    def __init__(self, report: GoodWordReport):
        self.report = report
        super().__init__(f"word is not good; failed conditions: {', '.join(report.failed)}")


def _shared_factor(w: Word, blocks, m: int):
    """First pair of distinct blocks sharing a factor of length ``m``, or None."""
    if m <= 0 or len(blocks) < 2:
        return None
    raw = w.letters.astype(">u8").tobytes()
    seen = {}
    for idx, (s, length) in enumerate(blocks):
        for off in range(s, s + length - m + 1):
            gram = raw[8 * off : 8 * (off + m)]
            other = seen.setdefault(gram, idx)
            if other != idx:
                return blocks[other], blocks[idx], (off, m)
    return None


def is_good_word(
    w, params: BlockParams, dist: LetterDistribution, *, cyclic: bool = False
) -> GoodWordReport:
    w = as_word(w)
    n = len(w)
    if n < 2:
        raise ValueError("good-word test needs n >= 2")
    stats, runs, blocks, orphans = _scan_blocks(w, params, dist, cyclic)
    witnesses = {}

    need = params.min_blocks(n, dist)
    cond_i = len(blocks) >= need
    witnesses["i"] = [] if cond_i else [{"blocks": len(blocks), "required": need}]

    overlaps = [
        (a, b) for a, b in zip(blocks, blocks[1:]) if b[0] < a[0] + a[1]
    ]
    witnesses["ii"] = overlaps

    m = math.ceil(params.common_factor_bound(n, dist) - _SLACK)
    shared = _shared_factor(w, blocks, m)
    witnesses["iii"] = [shared] if shared else []

    witnesses["iv"] = orphans

    m0_bound = 2 * _log(n, 1 / dist.p1)
    m1_bound = 2 * _log(n, 1 / (1 - dist.p1))
    cond_v = stats.M0 <= m0_bound + _SLACK
    cond_vi = stats.M1 <= m1_bound + _SLACK
    witnesses["v"] = [] if cond_v else [{"M0": stats.M0, "bound": m0_bound}]
    witnesses["vi"] = [] if cond_vi else [{"M1": stats.M1, "bound": m1_bound}]

    conditions = {
        "i": cond_i,
        "ii": not overlaps,
        "iii": shared is None,
        "iv": not orphans,
        "v": cond_v,
        "vi": cond_vi,
    }
    return GoodWordReport(conditions, witnesses, runs, blocks, stats)


@dataclass(frozen=True, eq=False)
class BlockDecomposition:
    """Tiling of a good word into long and short blocks.

    General form: ``w = (non-a1)^k Y_1 ... Y_K a1^L``. Lyndon form:
    ``w = Y_0 Y_1 ... Y_K`` with ``Y_0`` the smallest long block. Blocks are
    stored as parallel arrays in word order; ``starts``/``lengths`` include
    ``Y_0`` in Lyndon form.
    """

    word: Word
    mode: str
    prefix_len: int
    suffix_len: int
    starts: np.ndarray
    lengths: np.ndarray
    is_long: np.ndarray

    @property
    def n(self) -> int:
        return len(self.word)

    @property
    def K(self) -> int:
        """Number of permutable blocks."""
        return int(self.starts.shape[0]) - (1 if self.mode == LYNDON else 0)

    @property
    def H(self) -> int:
        return int(np.count_nonzero(self.is_long))

    @property
    def blocks(self) -> list[tuple[int, int, str]]:
        kinds = np.where(self.is_long, "long", "short")
        return list(zip(self.starts.tolist(), self.lengths.tolist(), kinds.tolist()))

    def block_word(self, j: int) -> Word:
        s = int(self.starts[j])
        return self.word[s : s + int(self.lengths[j])]

    def _keys(self, idx) -> list[bytes]:
        raw = self.word.letters.astype(">u8").tobytes()
        return [
            raw[8 * int(self.starts[j]) : 8 * int(self.starts[j] + self.lengths[j])]
            for j in idx
        ]

    @cached_property
    def long_indices(self) -> np.ndarray:
        return np.flatnonzero(self.is_long)

    @cached_property
    def long_ranks(self) -> np.ndarray:
        """Lexicographic rank (1 = smallest) of each long block, in word order."""
        idx = self.long_indices
        keys = self._keys(idx)
        order = sorted(range(len(idx)), key=lambda t: (keys[t], t))
        ranks = np.empty(len(idx), dtype=np.int64)
        ranks[order] = np.arange(1, len(idx) + 1)
        return ranks

    @cached_property
    def ranks(self) -> np.ndarray:
        """Lexicographic rank of every block; ties broken by word order."""
        idx = range(self.starts.shape[0])
        keys = self._keys(idx)
        order = sorted(idx, key=lambda t: (keys[t], t))
        ranks = np.empty(len(order), dtype=np.int64)
        ranks[order] = np.arange(1, len(order) + 1)
        return ranks

    @property
    def Xi(self) -> list[int]:
        """Block lengths sorted by increasing lexicographic rank."""
        order = np.argsort(self.ranks)
        return self.lengths[order].tolist()

    @property
    def J(self) -> list[int]:
        """Block index of the i-th smallest block, ``i = 1..H``.

        Indices count ``Y_1, Y_2, ...`` from 1 in general form and
        ``Y_0, Y_1, ...`` from 0 in Lyndon form, so they match the tiling.
        """
        idx = self.long_indices[np.argsort(self.long_ranks)]
        offset = 0 if self.mode == LYNDON else 1
        return (idx + offset).tolist()

    @property
    def d(self) -> list[Fraction]:
        """Normalized start positions of the i-th smallest blocks."""
        idx = self.long_indices[np.argsort(self.long_ranks)]
        return [Fraction(int(self.starts[j]), self.n) for j in idx]

    @property
    def positions(self) -> list[Fraction]:
        """Normalized start position of every block, in word order."""
        return [Fraction(int(s), self.n) for s in self.starts]

    @property
    def record_count(self) -> int:
        """Low records of the long-block ranks read left to right.

        In Lyndon form the fixed head ``Y_0`` is left out, so the count is
        taken over the permutable long blocks only.
        """
        ranks = self.long_ranks
        if self.mode == LYNDON:
            ranks = ranks[1:]
        return count_low_records(ranks.tolist())

    def tiles(self) -> list[Word]:
        """Prefix, blocks and suffix; their concatenation is the word."""
        out = [self.word[: self.prefix_len]]
        out += [self.block_word(j) for j in range(self.starts.shape[0])]
        out.append(self.word[self.n - self.suffix_len :])
        return out

    def summary(self) -> dict:
        return {
            "mode": self.mode,
            "prefix_len": self.prefix_len,
            "suffix_len": self.suffix_len,
            "K": self.K,
            "H": self.H,
            "J": self.J,
            "d": [str(x) for x in self.d],
            "long_ranks": self.long_ranks.tolist(),
            "records": self.record_count,
        }


def block_decompose(
    w, params: BlockParams, dist: LetterDistribution, mode: str = GENERAL
) -> BlockDecomposition:
    """Decompose a good word into long and short blocks.

    Raises :class:`NotGoodWordError` (carrying the report) on words that are
    not good, and ``ValueError`` when ``mode="lyndon"`` is asked of a word
    that is not a Lyndon word starting with a long block.
    """
    w = as_word(w)
    if mode not in (GENERAL, LYNDON):
        raise ValueError(f"unknown mode {mode!r}")
    lyndon = mode == LYNDON
    if lyndon and not is_lyndon(w):
        raise ValueError(f"{w!r} is not a Lyndon word")
    report = is_good_word(w, params, dist, cyclic=lyndon)
    if not report.is_good:
        raise NotGoodWordError(report)
    n = len(w)
    letters = w.letters
    stats = report.run_stats
    a1_starts, _ = _a1_runs(stats)

    if lyndon:
        k = 0
        L = 0
    else:
        k = int(stats.lengths[0]) if stats.digits[0] == 1 else 0
        L = int(stats.lengths[-1]) if stats.digits[-1] == 0 and stats.N > 1 else 0
        if stats.N == 1 and stats.digits[0] == 0:
            L = n
    stop = n - L

    bstarts = np.array([s for s, _ in report.long_blocks], dtype=np.int64)
    bends = np.array([s + m for s, m in report.long_blocks], dtype=np.int64)
    cand = a1_starts[(a1_starts >= k) & (a1_starts < stop)]
    if bstarts.size:
        pos = np.searchsorted(bstarts, cand, side="right") - 1
        inside = (pos >= 0) & (cand > bstarts[np.maximum(pos, 0)]) & (
            cand < bends[np.maximum(pos, 0)]
        )
        cand = cand[~inside]
    starts = cand
    lengths = np.diff(np.append(starts, stop))
    is_long = np.isin(starts, bstarts)
    if bstarts.size and not np.array_equal(lengths[is_long], bends - bstarts):
        raise AssertionError("long blocks do not align with the tiling")
    if lyndon and (starts.size == 0 or not is_long[0] or starts[0] != 0):
        raise ValueError("Lyndon form needs the word to start with a long block")
    if not lyndon and L == 0 and k < n and letters[-1] == 1:
        raise AssertionError("suffix run of a1 not detected")
    return BlockDecomposition(w, mode, k, L, starts, lengths, is_long)


def shuffle_blocks(d: BlockDecomposition, perm: Sequence[int]) -> Word:
    """Reorder the permutable blocks: position ``j`` receives block ``perm[j]``.

    ``perm`` is a permutation of ``range(K)`` or of ``1..K``. The head block
    (Lyndon form) or the prefix and suffix runs (general form) stay put.
    """
    perm = [int(x) for x in perm]
    K = d.K
    if len(perm) != K:
        raise ValueError(f"permutation has size {len(perm)}, expected {K}")
    if K and min(perm) == 1:
        perm = [x - 1 for x in perm]
    if sorted(perm) != list(range(K)):
        raise ValueError("not a permutation")
    head = 1 if d.mode == LYNDON else 0
    pieces = [d.word.letters[: d.prefix_len]]
    if head:
        pieces.append(d.word.letters[: int(d.lengths[0])])
    for j in perm:
        b = j + head
        s = int(d.starts[b])
        pieces.append(d.word.letters[s : s + int(d.lengths[b])])
    pieces.append(d.word.letters[d.n - d.suffix_len :])
    return Word._wrap(np.concatenate(pieces), d.word.alphabet)


def count_low_records(seq: Sequence) -> int:
    """Number of ``i`` with ``seq[i] <= min(seq[:i])``; the first term counts."""
    count = 0
    best = math.inf
    for x in seq:
        if x <= best:
            count += 1
            best = x
    return count


def lyndon_block_checks(w, params: BlockParams, dist: LetterDistribution) -> dict:
    """Structural facts expected of a good Lyndon word.

    Returns booleans for: long blocks pairwise distinct, smallest long block
    a prefix of ``w``, and the second smallest long block a prefix of the
    standard right factor unless ``r_n = 1 - 1/n``. An entry is None when
    there are too few long blocks for it to say anything.
    """
    w = as_word(w)
    n = len(w)
    blocks = long_blocks(w, params, dist, cyclic=True)
    raw = w.letters.astype(">u8").tobytes()
    keys = [raw[8 * s : 8 * (s + m)] for s, m in blocks]
    order = sorted(range(len(blocks)), key=lambda t: (keys[t], t))
    out = {
        "distinct": len(set(keys)) == len(keys),
        "smallest_is_prefix": blocks[order[0]][0] == 0 if blocks else None,
        "second_prefixes_right_factor": None,
    }
    if len(blocks) >= 2:
        sf = standard_right_factor(w)
        second = keys[order[1]]
        v = sf.v.letters.astype(">u8").tobytes()
        out["second_prefixes_right_factor"] = v.startswith(second) or sf.R == n - 1
    return out
