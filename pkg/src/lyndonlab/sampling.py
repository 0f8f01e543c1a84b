"""Seeded samplers for random words and random Lyndon words.

Randomness comes from numpy's counter-based Philox4x64-10 bit generator keyed
by ``(seed, stream_id)``; the pair fully determines the stream on any
machine. Shards derive their seeds with :func:`derive_shard_seed`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .words import LetterDistribution, Word, is_primitive, least_rotation

RNG_NAME = "numpy.Philox4x64-10"
RNG_VERSION = f"{RNG_NAME}/numpy-{np.__version__.split('.')[0]}"

_MASK64 = (1 << 64) - 1
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def _splitmix64(x: int) -> int:
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_shard_seed(seed: int, shard_index: int) -> int:
    """64-bit seed of shard ``shard_index``.

    ``splitmix64(seed + (shard_index + 1) * 0x9E3779B97F4A7C15 mod 2**64)``.
    Both steps are bijections of 64-bit integers, so distinct shard indices
    below ``2**64`` get distinct seeds.
    """
    if shard_index < 0:
        raise ValueError("shard index must be nonnegative")
    return _splitmix64(seed + (shard_index + 1) * _GOLDEN_GAMMA)


def make_rng(seed: int, stream_id: int = 0) -> np.random.Generator:
    key = (seed & _MASK64) | ((stream_id & _MASK64) << 64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class SamplerConfig:
    dist: LetterDistribution
    n: int
    seed: int = 0
    stream_id: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"word length must be >= 1, got {self.n}")

    def rng(self) -> np.random.Generator:
        return make_rng(self.seed, self.stream_id)


@dataclass
class LyndonSampleStats:
    accepted: int = 0
    rejections: int = 0

    @property
    def rejection_rate(self) -> float:
        total = self.accepted + self.rejections
        return self.rejections / total if total else 0.0


def draw_word(dist: LetterDistribution, n: int, rng: np.random.Generator) -> Word:
    return Word._wrap(dist.sample(rng, n), dist.alphabet)


def draw_lyndon(
    dist: LetterDistribution,
    n: int,
    rng: np.random.Generator,
    stats: LyndonSampleStats | None = None,
) -> Word:
    """Exact draw from the Lyndon-word law ``L_n``.

    A word drawn from ``P_n`` is rotated to the Lyndon word of its necklace;
    non-primitive draws are rejected. All ``n`` rotations of a primitive word
    carry the same weight, so each Lyndon word ``w`` is hit with probability
    ``n p(w)`` per attempt, proportional to its target weight.
    """
    while True:
        w = draw_word(dist, n, rng)
        if is_primitive(w):
            if stats is not None:
                stats.accepted += 1
            return least_rotation(w)[1]
        if stats is not None:
            stats.rejections += 1


def sample_word(cfg: SamplerConfig, rng: np.random.Generator | None = None) -> Word:
    """``n`` i.i.d. letters; deterministic in ``(seed, stream_id)`` when ``rng`` is None."""
    return draw_word(cfg.dist, cfg.n, rng if rng is not None else cfg.rng())


def sample_lyndon(
    cfg: SamplerConfig, rng: np.random.Generator | None = None
) -> tuple[Word, LyndonSampleStats]:
    stats = LyndonSampleStats()
    w = draw_lyndon(cfg.dist, cfg.n, rng if rng is not None else cfg.rng(), stats)
    return w, stats
