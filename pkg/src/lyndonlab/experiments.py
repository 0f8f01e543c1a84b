"""Reproducible Monte Carlo experiments and exhaustive small-n laws.

Trials are split into shards; shard ``i`` draws from the Philox stream keyed
by ``derive_shard_seed(seed, i)``. Per-trial records are merged in shard
order and every statistic is computed from the merged arrays, so a report
depends only on its config (wall-clock aside).
"""

from __future__ import annotations

import csv
import itertools
import json
import math
import time
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy import stats as sps

from . import __version__, _kernels
from .blocks import (
    GENERAL,
    LYNDON,
    BlockParams,
    block_decompose,
    is_good_word,
    lyndon_block_checks,
)
from .factorization import duval_factorize, rho_sequence, standard_right_factor
from .laws import (
    GOLOMB_DICKMAN,
    MuLaw,
    records_mean_var,
    stickbreak_variant_batch,
    wasserstein2_samples,
    wasserstein2_vs_law,
)
from .sampling import (
    RNG_VERSION,
    LyndonSampleStats,
    derive_shard_seed,
    draw_lyndon,
    draw_word,
    make_rng,
)
from .words import LetterDistribution, Word, least_rotation

SCHEMA_VERSION = "lyndonlab.report/1"
EXPERIMENTS = ("right-factor", "factor-lengths", "good-words")
SEQUENCE_DEPTH = 64
ENUMERATION_BUDGET = 10**7


class ConfigError(ValueError):
    pass


class BudgetError(RuntimeError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str
    dist: str = "uniform:2"
    n: list = field(default_factory=lambda: [1000])
    trials: int = 1000
    seed: int = 0
    epsilon: float = 0.4
    alpha: float | None = None
    shards: int = 1
    out: str | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")
        if isinstance(self.n, int):
            self.n = [self.n]
        self.n = [int(x) for x in self.n]
        if not self.n or min(self.n) < 1:
            raise ConfigError("n values must be >= 1")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.shards < 1:
            raise ConfigError("shards must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        try:
            dist = self.distribution()
            self.block_params().alpha_for(dist)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def distribution(self) -> LetterDistribution:
        return LetterDistribution.from_spec(self.dist)

    def block_params(self) -> BlockParams:
        return BlockParams(self.epsilon, self.alpha)

    def shard_sizes(self) -> list[int]:
        base, extra = divmod(self.trials, self.shards)
        return [base + (i < extra) for i in range(self.shards)]

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    statistics: dict
    shards: list
    wall_clock: float
    samples: dict = field(default_factory=dict, repr=False)
    histograms: dict = field(default_factory=dict, repr=False)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "tool": {"name": "lyndonlab", "version": __version__, "rng": RNG_VERSION},
            "config": self.config.to_dict(),
            "shards": self.shards,
            "statistics": self.statistics,
            "wall_clock_seconds": self.wall_clock,
        }

    def statistics_json(self) -> str:
        return json.dumps(self.statistics, sort_keys=True)

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    def write(self, path) -> list[Path]:
        """Write the JSON report and one CSV histogram per sampled statistic."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json() + "\n")
        written = [path]
        for name, rows in self.histograms.items():
            csv_path = path.with_name(f"{path.stem}.{name}.csv")
            with csv_path.open("w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["n", "bin_left", "bin_right", "count"])
                writer.writerows(rows)
            written.append(csv_path)
        return written


def _mean_se(x) -> tuple[float, float]:
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        return math.nan, math.nan
    se = float(x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else math.nan
    return float(x.mean()), se


def _proportion(hits, total) -> dict:
    if total == 0:
        return {"estimate": None, "stderr": None, "count": 0}
    p = hits / total
    se = math.sqrt(p * (1 - p) / total)
    return {"estimate": p, "stderr": se, "radius_4sigma": 4 * se, "count": int(hits)}


def _clean(obj):
    """JSON-safe copy: NaN becomes None, numpy scalars become Python ones."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return None if math.isnan(obj) else float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _histogram(n, values, bins=20):
    counts, edges = np.histogram(values, bins=bins, range=(0.0, 1.0))
    return [[n, float(edges[i]), float(edges[i + 1]), int(c)] for i, c in enumerate(counts)]


def _run_shards(cfg: ExperimentConfig, n: int, trial_fn):
    records, shards = [], []
    for i, size in enumerate(cfg.shard_sizes()):
        seed = derive_shard_seed(cfg.seed, i)
        rng = make_rng(seed, stream_id=n)
        records.extend(trial_fn(rng) for _ in range(size))
        shards.append({"n": n, "index": i, "seed": seed, "trials": size})
    return records, shards


# right factor of random Lyndon words


def _right_factor_trial(dist, n):
    def trial(rng):
        stats = LyndonSampleStats()
        w = draw_lyndon(dist, n, rng, stats)
        R = standard_right_factor(w).R if n > 1 else 0
        return R, stats.rejections

    return trial


def _is_primitive_fast(w: Word) -> bool:
    n = len(w)
    p = int(_kernels.smallest_period(w.letters))
    return p == n or n % p != 0


def run_right_factor_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Normalized standard right factor of random Lyndon words vs the limit law.

    For ``n = 1`` the single-letter Lyndon words have no standard
    factorization; their ``r`` is recorded as 0.
    """
    dist = cfg.distribution()
    p1 = float(dist.p1)
    law = MuLaw(p1)
    started = time.perf_counter()
    stats, shards, samples, hist = {}, [], {}, {}
    for n in cfg.n:
        recs, sh = _run_shards(cfg, n, _right_factor_trial(dist, n))
        shards += sh
        R = np.array([r for r, _ in recs], dtype=np.int64)
        rejections = int(sum(j for _, j in recs))
        r = R / n
        samples[n] = r
        hist[n] = _histogram(n, r)
        atom = _proportion(int(np.count_nonzero(R == n - 1)) if n > 1 else 0, R.size)
        atom["limit"] = p1
        moments = {}
        for k in (1, 2, 3):
            m, se = _mean_se(r**k)
            moments[str(k)] = {"estimate": m, "stderr": se, "limit": law.moment(k)}
        stats[str(n)] = {
            "trials": int(R.size),
            "atom_frequency": atom,
            "w2_vs_mu": wasserstein2_vs_law(r, law),
            "moments": moments,
            "rejection_rate": rejections / (rejections + R.size),
        }
    statistics = _clean({"experiment": "right-factor", "p1": p1, "by_n": stats})
    return ExperimentReport(
        cfg, statistics, shards, time.perf_counter() - started, samples,
        {"r_hist": [row for n in cfg.n for row in hist[n]]},
    )


# Lyndon factor lengths of random words


def _factor_lengths_trial(dist, n):
    def trial(rng):
        w = draw_word(dist, n, rng)
        ends = _kernels.duval_ends(w.letters)
        lengths = np.diff(np.concatenate([[0], ends]))[::-1]
        smallest_is_a1 = lengths[0] == 1 and w.letters[-1] == 1
        tail = np.flatnonzero(w.letters[::-1] != 1)
        leading_zeros = int(tail[0]) if tail.size else n
        s = np.zeros(SEQUENCE_DEPTH)
        rem = 1.0 - np.cumsum(lengths[:SEQUENCE_DEPTH]) / n
        s[: rem.size] = rem
        return lengths[0], bool(smallest_is_a1), leading_zeros, int(lengths.max()), s

    return trial


def _geometric_chisquare(counts_by_k: np.ndarray, p1: float) -> dict:
    """Goodness of fit of leading-zero counts against ``P(L=k) = p1**k (1-p1)``."""
    total = counts_by_k.sum()
    K = 1
    while total * p1**K * (1 - p1) >= 5:
        K += 1
    counts_by_k = np.pad(counts_by_k, (0, max(0, K + 1 - counts_by_k.size)))
    probs = np.array([p1**k * (1 - p1) for k in range(K)] + [p1**K])
    observed = np.append(counts_by_k[:K], counts_by_k[K:].sum())
    if K < 2 or total == 0:
        return {"statistic": None, "pvalue": None, "bins": int(K + 1)}
    res = sps.chisquare(observed, probs * total)
    return {"statistic": float(res.statistic), "pvalue": float(res.pvalue), "bins": int(K + 1)}


def _two_sample_chisquare(a: np.ndarray, b: np.ndarray) -> dict:
    top = 0
    while np.count_nonzero(a > top) + np.count_nonzero(b > top) >= 10:
        top += 1
    edges = list(range(top + 1))
    table = np.array(
        [[np.count_nonzero(x == k) for k in edges[:-1]] + [np.count_nonzero(x >= edges[-1])]
         for x in (a, b)]
    )
    table = table[:, table.sum(axis=0) > 0]
    if table.shape[1] < 2:
        return {"statistic": None, "pvalue": None, "bins": int(table.shape[1])}
    chi2, pvalue, _, _ = sps.chi2_contingency(table)
    return {"statistic": float(chi2), "pvalue": float(pvalue), "bins": int(table.shape[1])}


def run_factor_lengths_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Normalized Lyndon factor lengths of random words vs stickbreaking references."""
    dist = cfg.distribution()
    p1 = float(dist.p1)
    started = time.perf_counter()
    stats, shards, samples, hist = {}, [], {}, []
    for n in cfg.n:
        recs, sh = _run_shards(cfg, n, _factor_lengths_trial(dist, n))
        shards += sh
        first = np.array([r[0] for r in recs]) / n
        is_a1 = np.array([r[1] for r in recs])
        zeros = np.array([r[2] for r in recs], dtype=np.int64)
        largest = np.array([r[3] for r in recs]) / n
        chain = np.array([r[4] for r in recs])
        samples[n] = {"rho1": first, "largest": largest, "leading_zeros": zeros}
        hist += _histogram(n, first)

        ref_rng = make_rng(derive_shard_seed(cfg.seed, 0), stream_id=(1 << 63) | n)
        ref_rho, ref_s = stickbreak_variant_batch(p1, SEQUENCE_DEPTH, len(recs), ref_rng)
        ref_zeros = _leading_zero_fragments(ref_rho)

        positive = first[first * n > 1]
        if positive.size:
            ks = sps.kstest(positive, "uniform")
            ks_out = {"statistic": float(ks.statistic), "pvalue": float(ks.pvalue),
                      "count": int(positive.size)}
        else:
            ks_out = {"statistic": None, "pvalue": None, "count": 0}
        weights = 0.5 ** np.arange(1, SEQUENCE_DEPTH + 1)
        marginal = [wasserstein2_samples(chain[:, k], ref_s[:, k + 1]) for k in range(SEQUENCE_DEPTH)]
        atom = _proportion(int(is_a1.sum()), is_a1.size)
        atom["limit"] = p1
        mean_largest, se_largest = _mean_se(largest)
        stats[str(n)] = {
            "trials": len(recs),
            "smallest_factor_is_a1": atom,
            "rho1_given_long_vs_uniform": ks_out,
            "leading_zero_fragments": {
                "mean": float(zeros.mean()),
                "limit_mean": p1 / (1 - p1),
                "vs_geometric": _geometric_chisquare(np.bincount(zeros), p1),
                "vs_stickbreak_reference": _two_sample_chisquare(zeros, ref_zeros),
            },
            "chain_weighted_w2": float(np.dot(weights, marginal)),
            "largest_part": {"estimate": mean_largest, "stderr": se_largest,
                             "pd1_reference": GOLOMB_DICKMAN},
        }
    statistics = _clean({"experiment": "factor-lengths", "p1": p1, "by_n": stats})
    return ExperimentReport(cfg, statistics, shards, time.perf_counter() - started, samples,
                            {"rho1_hist": hist})


def _leading_zero_fragments(rho: np.ndarray) -> np.ndarray:
    nonzero = rho > 0
    first = np.argmax(nonzero, axis=1)
    first[~nonzero.any(axis=1)] = rho.shape[1]
    return first


# good words, blocks and records


def _good_words_trial(dist, n, params):
    alpha = params.alpha_for(dist)
    h_target = alpha * n**params.epsilon
    m0_bound = 2 * math.log(n) / math.log(1 / float(dist.p1))
    m1_bound = 2 * math.log(n) / math.log(1 / (1 - float(dist.p1)))

    def trial(rng):
        w = draw_word(dist, n, rng)
        out = {"good": False, "lyndon_good": None}
        if n < 2:
            return out
        rep = is_good_word(w, params, dist)
        H = len(rep.long_runs)
        out.update(
            good=rep.is_good,
            H=H,
            H_ok=H >= h_target,
            M0_ok=rep.run_stats.M0 <= m0_bound + 1e-9,
            M1_ok=rep.run_stats.M1 <= m1_bound + 1e-9,
            failed=rep.failed,
        )
        if rep.is_good:
            dec = block_decompose(w, params, dist, GENERAL)
            out["records"] = (dec.H, dec.record_count)
        if _is_primitive_fast(w):
            lw = least_rotation(w)[1]
            lrep = is_good_word(lw, params, dist, cyclic=True)
            out["lyndon_good"] = lrep.is_good
            if lrep.is_good:
                checks = lyndon_block_checks(lw, params, dist)
                out["lyndon_checks"] = checks
                try:
                    ldec = block_decompose(lw, params, dist, LYNDON)
                    out["lyndon_records"] = (ldec.H - 1, ldec.record_count)
                except ValueError:
                    out["lyndon_records"] = None
        return out

    return trial


def _records_summary(pairs) -> dict:
    pairs = [p for p in pairs if p is not None and p[0] >= 1]
    if not pairs:
        return {"count": 0}
    lam = np.array([lam for _, lam in pairs], dtype=float)
    mv = [records_mean_var(k) for k, _ in pairs]
    expected = float(np.mean([m for m, _ in mv]))
    sigma = math.sqrt(sum(v for _, v in mv)) / len(pairs)
    mean = float(lam.mean())
    return {
        "count": len(pairs),
        "mean": mean,
        "expected_mean": expected,
        "sigma": sigma,
        "z": (mean - expected) / sigma if sigma > 0 else None,
        "mean_blocks": float(np.mean([k for k, _ in pairs])),
    }


def run_good_word_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Good-word frequency, run statistics and block records across an ``n`` sweep."""
    dist = cfg.distribution()
    params = cfg.block_params()
    started = time.perf_counter()
    stats, shards, fractions = {}, [], []
    for n in cfg.n:
        recs, sh = _run_shards(cfg, n, _good_words_trial(dist, n, params))
        shards += sh
        T = len(recs)
        good = sum(r["good"] for r in recs)
        fractions.append(good / T)
        failures = defaultdict(int)
        for r in recs:
            for k in r.get("failed", []):
                failures[k] += 1
        lyndon = [r for r in recs if r["lyndon_good"] is not None]
        lgood = [r for r in lyndon if r["lyndon_good"]]
        violations = defaultdict(int)
        for r in lgood:
            for key, ok in r["lyndon_checks"].items():
                if ok is False:
                    violations[key] += 1
        stats[str(n)] = {
            "trials": T,
            "good_fraction": _proportion(good, T),
            "failed_conditions": dict(sorted(failures.items())),
            "mean_long_runs": float(np.mean([r.get("H", 0) for r in recs])),
            "long_runs_at_least_alpha_n_eps": _proportion(sum(r.get("H_ok", False) for r in recs), T),
            "M0_bounded": _proportion(sum(r.get("M0_ok", False) for r in recs), T),
            "M1_bounded": _proportion(sum(r.get("M1_ok", False) for r in recs), T),
            "records": _records_summary([r.get("records") for r in recs]),
            "lyndon": {
                "samples": len(lyndon),
                "good": len(lgood),
                "block_check_violations": dict(sorted(violations.items())),
                "second_block_checked": sum(
                    r["lyndon_checks"]["second_prefixes_right_factor"] is not None for r in lgood
                ),
                "records": _records_summary([r.get("lyndon_records") for r in lgood]),
            },
        }
    order = np.argsort(cfg.n)
    ordered = [fractions[i] for i in order]
    if len(cfg.n) < 3:
        trend = "insufficient"
    elif all(b >= a for a, b in zip(ordered, ordered[1:])):
        trend = "nondecreasing"
    else:
        trend = "not monotone"
    statistics = _clean({
        "experiment": "good-words",
        "p1": float(dist.p1),
        "alpha": params.alpha_for(dist),
        "epsilon": params.epsilon,
        "by_n": stats,
        "good_fraction_trend": trend,
    })
    return ExperimentReport(cfg, statistics, shards, time.perf_counter() - started)


_RUNNERS = {
    "right-factor": run_right_factor_experiment,
    "factor-lengths": run_factor_lengths_experiment,
    "good-words": run_good_word_experiment,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    report = _RUNNERS[cfg.experiment](cfg)
    if cfg.out:
        report.write(cfg.out)
    return report


# exhaustive laws


STATISTICS = ("right-factor", "rho", "primitive-prob", "good-fraction")


def exact_small_n(
    dist: LetterDistribution,
    n: int,
    statistic: str,
    params: BlockParams | None = None,
    budget: int = ENUMERATION_BUDGET,
) -> dict:
    """Exact law of a statistic by enumerating every word of length ``n``.

    Returns ``{"P": ..., "L": ...}``: the law under the word measure and
    under the Lyndon-word measure (weights restricted to Lyndon words and
    renormalized). Laws are dicts from value to ``Fraction``; probabilities
    of events are plain ``Fraction`` values.
    """
    if statistic not in STATISTICS:
        raise ValueError(f"unknown statistic {statistic!r}; choose from {STATISTICS}")
    if not dist.alphabet.is_finite:
        raise BudgetError("enumeration needs a finite alphabet")
    q = dist.alphabet.size
    if q**n > budget:
        raise BudgetError(f"{q}^{n} words exceed the enumeration budget of {budget}")
    if n < 1:
        raise ValueError("n must be >= 1")
    params = params or BlockParams()
    weight_cache = {}

    def weight(letters):
        key = tuple(np.bincount(letters, minlength=q + 1)[1:])
        if key not in weight_cache:
            weight_cache[key] = math.prod(
                (dist.pmf(i + 1) ** c for i, c in enumerate(key)), start=Fraction(1)
            )
        return weight_cache[key]

    p_law = defaultdict(Fraction)
    l_law = defaultdict(Fraction)
    lyndon_mass = Fraction(0)
    alphabet = dist.alphabet
    for letters in itertools.product(range(1, q + 1), repeat=n):
        arr = np.array(letters, dtype=np.int64)
        pw = weight(arr)
        if pw == 0:
            continue
        w = Word._wrap(arr, alphabet)
        lyn = bool(_kernels.is_lyndon(arr))
        if lyn:
            lyndon_mass += pw
        if statistic == "primitive-prob":
            if _is_primitive_fast(w):
                p_law[True] += pw
        elif statistic == "right-factor":
            if lyn:
                r = standard_right_factor(w).r if n > 1 else Fraction(0)
                l_law[r] += pw
        elif statistic == "rho":
            rho = tuple(rho_sequence(duval_factorize(w)).values)
            p_law[rho] += pw
            if lyn:
                l_law[rho] += pw
        else:
            good = n >= 2 and is_good_word(w, params, dist).is_good
            if good:
                p_law[True] += pw
            if lyn and n >= 2 and is_good_word(w, params, dist, cyclic=True).is_good:
                l_law[True] += pw

    def normalized(law):
        return {k: v / lyndon_mass for k, v in law.items()}

    if statistic == "primitive-prob":
        return {"P": p_law[True], "lyndon_mass": lyndon_mass}
    if statistic == "good-fraction":
        return {"P": p_law[True], "L": l_law[True] / lyndon_mass}
    if statistic == "right-factor":
        return {"L": normalized(l_law)}
    return {"P": dict(p_law), "L": normalized(l_law)}
