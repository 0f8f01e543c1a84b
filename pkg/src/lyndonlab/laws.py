"""Exact counts and reference limit laws.

Covers primitive-word probabilities by Moebius inversion, the
atom-plus-uniform law of the normalized standard right factor, the
stickbreaking chain with failed first breaks, Poisson-Dirichlet(1), the law
of the number of records of a uniform permutation, and one-dimensional
Wasserstein-2 distances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .sampling import make_rng
from .words import LetterDistribution


def divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def mobius(n: int) -> int:
    if n < 1:
        raise ValueError("mobius needs n >= 1")
    result, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            result = -result
        p += 1
    if m > 1:
        result = -result
    return result


def norm_alpha(dist: LetterDistribution, a: float) -> float:
    """``(sum_i p_i**a) ** (1/a)`` for ``a >= 1``."""
    return dist.norm(a)


def primitive_probability(dist: LetterDistribution, n: int) -> Fraction:
    """Exact probability that a random ``n``-letter word is primitive.

    ``sum_{d | n} mobius(d) * (sum_i p_i**d) ** (n/d)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return sum(
        (mobius(d) * dist.power_sum(d) ** (n // d) for d in divisors(n)), Fraction(0)
    )


def lyndon_count(q: int, n: int) -> int:
    """Number of Lyndon words of length ``n`` over ``q`` letters."""
    if q < 2 or n < 1:
        raise ValueError("need q >= 2 and n >= 1")
    total = sum(mobius(d) * q ** (n // d) for d in divisors(n))
    return total // n


@dataclass(frozen=True)
class MuLaw:
    """Atom of mass ``p1`` plus ``(1 - p1)`` times Lebesgue measure on [0, 1].

    ``atom=1`` is the limit law of the normalized standard right factor; with
    ``atom=0`` it is the law of the normalized smallest Lyndon factor.
    """

    p1: float
    atom: int = 1

    def __post_init__(self):
        if not 0 <= self.p1 <= 1:
            raise ValueError(f"p1 must lie in [0, 1], got {self.p1}")
        if self.atom not in (0, 1):
            raise ValueError("atom must be 0 or 1")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if np.any((x < 0) | (x > 1)):
            raise ValueError("x must lie in [0, 1]")
        p1 = self.p1
        if self.atom == 1:
            out = np.where(x < 1, (1 - p1) * x, 1.0)
        else:
            out = p1 + (1 - p1) * x
        return out if out.ndim else float(out)

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        if np.any((u <= 0) | (u >= 1)):
            raise ValueError("u must lie in (0, 1)")
        p1 = self.p1
        if self.atom == 1:
            cut = 1 - p1
            out = np.where(u < cut, u / np.where(cut > 0, cut, 1), 1.0)
        else:
            out = np.where(u <= p1, 0.0, (u - p1) / np.where(p1 < 1, 1 - p1, 1))
        return out if out.ndim else float(out)

    def moment(self, k: int) -> float:
        uniform_part = (1 - self.p1) / (k + 1)
        return uniform_part + (self.p1 if self.atom == 1 else 0.0)

    @property
    def mean(self) -> float:
        return self.moment(1)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.quantile(_open_uniform(rng, size))

    @property
    def spec(self) -> str:
        return f"mu:p1={self.p1}"


@dataclass(frozen=True)
class Uniform01:
    def cdf(self, x):
        return np.clip(x, 0.0, 1.0)

    def quantile(self, u):
        return np.asarray(u, dtype=float) if np.ndim(u) else float(u)

    def moment(self, k: int) -> float:
        return 1.0 / (k + 1)

    @property
    def spec(self) -> str:
        return "uniform01"


class PD1Largest:
    """Law of the largest part of Poisson-Dirichlet(1).

    No closed-form quantile is available, so quantiles are read from a fixed
    seeded reference sample of stickbreaking draws.
    """

    spec = "pd1"

    def __init__(self, reference_size: int = 200_000, seed: int = 0):
        self.reference_size = reference_size
        self.seed = seed
        self._ref = None

    @property
    def reference(self) -> np.ndarray:
        if self._ref is None:
            rng = make_rng(self.seed, stream_id=0x9D1)
            self._ref = np.sort(pd1_batch(rng, self.reference_size, 1)[:, 0])
        return self._ref

    def quantile(self, u):
        return np.quantile(self.reference, u)

    def moment(self, k: int) -> float:
        return float(np.mean(self.reference**k))


GOLOMB_DICKMAN = 0.6243299885435508


def parse_law(spec: str):
    """``mu:p1=<v>``, ``mu0:p1=<v>`` (atom at 0), ``uniform01`` or ``pd1``."""
    spec = spec.strip().lower()
    if spec == "uniform01":
        return Uniform01()
    if spec == "pd1":
        return PD1Largest()
    kind, _, arg = spec.partition(":")
    if kind in ("mu", "mu0"):
        key, _, value = arg.partition("=")
        if key.strip() != "p1":
            raise ValueError(f"bad law spec {spec!r}")
        return MuLaw(float(value), atom=0 if kind == "mu0" else 1)
    raise ValueError(f"unknown law {spec!r}")


def mu_cdf(p1: float, x: float) -> float:
    return MuLaw(p1).cdf(x)


def mu_quantile(p1: float, u: float) -> float:
    return MuLaw(p1).quantile(u)


def _open_uniform(rng, size):
    # (0, 1]; avoids a zero break in stickbreaking
    return 1.0 - rng.random(size)


def stickbreak_variant_batch(p1: float, k: int, size: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """``size`` independent runs of the first ``k`` steps of the chain.

    From ``s = 1`` the break fails with probability ``p1`` (fragment 0, state
    stays 1) and otherwise lands uniformly on (0, 1]; from ``s < 1`` the next
    state is uniform on (0, s]. Returns ``(fragments, states)`` with shapes
    ``(size, k)`` and ``(size, k + 1)``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    states = np.empty((size, k + 1))
    states[:, 0] = 1.0
    s = np.ones(size)
    at_top = np.ones(size, dtype=bool)
    for i in range(k):
        u = _open_uniform(rng, size)
        fail = rng.random(size) < p1
        s = np.where(at_top, np.where(fail, 1.0, u), s * u)
        at_top &= fail
        states[:, i + 1] = s
    return -np.diff(states, axis=1), states


def sample_stickbreak_variant(p1: float, k: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    rho, s = stickbreak_variant_batch(p1, k, 1, make_rng(seed))
    return rho[0], s[0]


def pd1_batch(rng, size: int, k: int, depth: int = 200, chunk: int = 20_000) -> np.ndarray:
    """Top ``k`` fragments (decreasing) of ``size`` pure stickbreaking runs."""
    if k < 1 or k > depth:
        raise ValueError("need 1 <= k <= depth")
    out = np.empty((size, k))
    for lo in range(0, size, chunk):
        m = min(chunk, size - lo)
        s = np.cumprod(_open_uniform(rng, (m, depth)), axis=1)
        frags = -np.diff(np.concatenate([np.ones((m, 1)), s], axis=1), axis=1)
        top = -np.partition(-frags, k - 1, axis=1)[:, :k] if k < depth else frags
        out[lo : lo + m] = -np.sort(-top, axis=1)
    return out


def sample_pd1(k: int, seed: int, depth: int = 200) -> np.ndarray:
    """First ``k`` terms of an (approximate) Poisson-Dirichlet(1) draw.

    Pure stickbreaking truncated after ``depth`` breaks, sorted decreasingly;
    the unassigned remainder is the product of ``depth`` uniforms.
    """
    return pd1_batch(make_rng(seed), 1, k, depth)[0]


def stirling_first(k: int) -> list[int]:
    """Unsigned Stirling numbers of the first kind ``[k, j]`` for ``j = 0..k``."""
    row = [1]
    for m in range(k):
        nxt = [0] * (len(row) + 1)
        for j, c in enumerate(row):
            nxt[j] += m * c
            nxt[j + 1] += c
        row = nxt
    return row


def records_pmf(k: int, exact: bool = False) -> dict:
    """Law of the number of records of a uniform random permutation of size ``k``."""
    if not 1 <= k <= 64:
        raise ValueError("records_pmf supports 1 <= k <= 64")
    row = stirling_first(k)
    total = math.factorial(k)
    pmf = {j: Fraction(row[j], total) for j in range(1, k + 1)}
    if exact:
        return pmf
    return {j: float(p) for j, p in pmf.items()}


def harmonic(k: int) -> Fraction:
    return sum((Fraction(1, i) for i in range(1, k + 1)), Fraction(0))


def records_mean_var(k: int) -> tuple[float, float]:
    """Mean ``H_k`` and variance ``H_k - sum 1/i**2`` of the record count."""
    h = sum(1.0 / i for i in range(1, k + 1))
    h2 = sum(1.0 / (i * i) for i in range(1, k + 1))
    return h, h - h2


def wasserstein2_samples(xs, ys) -> float:
    """W2 between two equal-size empirical laws (sorted pairing)."""
    xs = np.sort(np.asarray(xs, dtype=float).ravel())
    ys = np.sort(np.asarray(ys, dtype=float).ravel())
    if xs.size != ys.size:
        raise ValueError(f"sample sizes differ: {xs.size} vs {ys.size}")
    if xs.size == 0:
        raise ValueError("empty samples")
    return float(np.sqrt(np.mean((xs - ys) ** 2)))


def wasserstein2_vs_law(xs, law) -> float:
    """W2 estimate between a sample and a law.

    The ``i``-th order statistic is paired with the law's quantile at the
    midpoint ``(i - 1/2) / N``; the estimator carries an O(1/N) bias.
    """
    xs = np.sort(np.asarray(xs, dtype=float).ravel())
    if xs.size == 0:
        raise ValueError("empty sample")
    u = (np.arange(1, xs.size + 1) - 0.5) / xs.size
    q = np.asarray(law.quantile(u), dtype=float)
    return float(np.sqrt(np.mean((xs - q) ** 2)))


def sequence_distance(u, v, depth: int = 64) -> float:
    """``sum_k 2**-k |u_k - v_k|`` over the first ``depth`` terms, zero padded."""
    a = np.zeros(depth)
    b = np.zeros(depth)
    u = np.asarray(u, dtype=float)[:depth]
    v = np.asarray(v, dtype=float)[:depth]
    a[: u.size] = u
    b[: v.size] = v
    return float(np.sum(np.abs(a - b) * 0.5 ** np.arange(1, depth + 1)))


@dataclass(frozen=True)
class IntervalBoundResult:
    estimate: float
    stderr: float
    bound: float

    @property
    def within_bound(self) -> bool:
        return self.estimate <= self.bound + 3 * self.stderr


def larcin_bound_check(widths, k: int, trials: int, seed: int) -> IntervalBoundResult:
    """Positions of ``k`` marked intervals after a uniform shuffle, against U[0,1]^k.

    ``widths = (x_0, x_1, ..., x_l, x_{l+1})``: the first and last intervals
    stay at the ends, the ``l`` middle ones are ordered by i.i.d. uniforms
    ``U_i``, and the left end of interval ``j`` is coupled with ``U_j``. The
    coupling gives an upper estimate of W2, compared against
    ``sqrt(k/3 * sum_{i=1..l} x_i**2)``.
    """
    x = np.asarray(widths, dtype=float)
    if x.ndim != 1 or x.size < 3:
        raise ValueError("need widths (x_0, ..., x_{l+1}) with l >= 1")
    if np.any(x < 0) or abs(x.sum() - 1) > 1e-9:
        raise ValueError("widths must be nonnegative and sum to 1")
    mid = x[1:-1]
    ell = mid.size
    if not 1 <= k <= ell:
        raise ValueError(f"k must lie in [1, {ell}]")
    rng = make_rng(seed)
    U = rng.random((trials, ell))
    sq = np.zeros(trials)
    for j in range(k):
        below = U < U[:, j : j + 1]
        a = x[0] + below.astype(float) @ mid
        sq += (U[:, j] - a) ** 2
    mean_sq = float(sq.mean())
    est = math.sqrt(mean_sq)
    se_sq = float(sq.std(ddof=1)) / math.sqrt(trials) if trials > 1 else 0.0
    stderr = se_sq / (2 * est) if est > 0 else se_sq
    bound = math.sqrt(k / 3 * float(np.sum(mid**2)))
    return IntervalBoundResult(est, stderr, bound)
