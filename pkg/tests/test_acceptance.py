"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line; the lines are repeated in
the terminal summary. Seeds are fixed here once and never tuned.
"""

import itertools
import math
from collections import Counter, defaultdict
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from lyndonlab.blocks import LYNDON, BlockParams, block_decompose, count_low_records, is_good_word
from lyndonlab.experiments import (
    ExperimentConfig,
    run_experiment,
    run_factor_lengths_experiment,
    run_good_word_experiment,
    run_right_factor_experiment,
)
from lyndonlab.factorization import brute_force_factorize, duval_factorize
from lyndonlab.laws import (
    GOLOMB_DICKMAN,
    larcin_bound_check,
    pd1_batch,
    primitive_probability,
    records_mean_var,
    records_pmf,
)
from lyndonlab.sampling import draw_lyndon, make_rng
from lyndonlab.words import Alphabet, LetterDistribution, Word, is_primitive

SEED = 20240601
RESULTS = []


def verdict(number, title, checks):
    """Record and print one line for a criterion; ``checks`` maps label -> (ok, detail)."""
    ok = all(passed for passed, _ in checks.values())
    detail = "; ".join(f"{k}={v}" for k, (_, v) in checks.items())
    failed = [k for k, (passed, _) in checks.items() if not passed]
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} | {detail}"
    if failed:
        line += f" | failed: {', '.join(failed)}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def _words(q, n):
    alphabet = Alphabet(q)
    for t in itertools.product(range(1, q + 1), repeat=n):
        yield t, Word._wrap(np.array(t, dtype=np.int64), alphabet)


def test_criterion_01_factorization_oracle():
    checked, mismatches = 0, 0
    for q in (2, 3):
        for n in range(1, 13):
            for _, w in _words(q, n):
                checked += 1
                if duval_factorize(w).spans != brute_force_factorize(w).spans:
                    mismatches += 1
    verdict(1, "Duval = brute force on all binary/ternary words, n <= 12", {
        "words": (checked == sum(2**n + 3**n for n in range(1, 13)), checked),
        "mismatches": (mismatches == 0, mismatches),
    })


def test_criterion_02_mobius_exact():
    dists = {
        "uniform2": LetterDistribution.uniform(2),
        "uniform3": LetterDistribution.uniform(3),
        "p=(.5,.3,.2)": LetterDistribution([Fraction(1, 2), Fraction(3, 10), Fraction(1, 5)]),
    }
    mismatches = []
    for name, dist in dists.items():
        q = dist.alphabet.size
        for n in range(1, 13):
            # group primitive words by letter counts; the weight only depends on those
            classes = Counter()
            for t, w in _words(q, n):
                if is_primitive(w):
                    classes[tuple(t.count(i) for i in range(1, q + 1))] += 1
            enumerated = sum(
                (c * math.prod((dist.pmf(i + 1) ** k for i, k in enumerate(key)), start=Fraction(1))
                 for key, c in classes.items()),
                Fraction(0),
            )
            if primitive_probability(dist, n) != enumerated:
                mismatches.append((name, n))
    u2 = dists["uniform2"]
    verdict(2, "Mobius formula equals enumeration exactly", {
        "mismatches": (not mismatches, mismatches or 0),
        "P(n=2)": (primitive_probability(u2, 2) == Fraction(1, 2), primitive_probability(u2, 2)),
        "P(n=4)": (primitive_probability(u2, 4) == Fraction(3, 4), primitive_probability(u2, 4)),
    })


def test_criterion_03_right_factor_law():
    rep = run_right_factor_experiment(
        ExperimentConfig("right-factor", dist="uniform:2", n=[1000], trials=10**4, seed=SEED)
    )
    s = rep.statistics["by_n"]["1000"]
    skew = run_right_factor_experiment(
        ExperimentConfig("right-factor", dist="json:[0.3,0.7]", n=[1000], trials=10**4, seed=SEED)
    ).statistics["by_n"]["1000"]
    atom = s["atom_frequency"]["estimate"]
    w2 = s["w2_vs_mu"]
    mean = s["moments"]["1"]["estimate"]
    atom_skew = skew["atom_frequency"]["estimate"]
    verdict(3, "right factor limit law, n=1000, 1e4 Lyndon words", {
        "atom": (0.48 <= atom <= 0.52, f"{atom:.4f}"),
        "W2": (w2 <= 0.03, f"{w2:.4f}"),
        "mean": (0.74 <= mean <= 0.76, f"{mean:.4f}"),
        "atom(p1=.3)": (0.28 <= atom_skew <= 0.32, f"{atom_skew:.4f}"),
    })


@pytest.fixture(scope="module")
def factor_lengths_run():
    cfg = ExperimentConfig("factor-lengths", dist="uniform:2", n=[2000], trials=10**4, seed=SEED)
    return run_factor_lengths_experiment(cfg).statistics["by_n"]["2000"]


def test_criterion_04_factor_lengths(factor_lengths_run):
    s = factor_lengths_run
    atom = s["smallest_factor_is_a1"]["estimate"]
    ks = s["rho1_given_long_vs_uniform"]["statistic"]
    geo = s["leading_zero_fragments"]["vs_geometric"]["pvalue"]
    ref = s["leading_zero_fragments"]["vs_stickbreak_reference"]["pvalue"]
    verdict(4, "factor length law, n=2000, 1e4 words", {
        "atom": (0.48 <= atom <= 0.52, f"{atom:.4f}"),
        "KS": (ks <= 0.02, f"{ks:.4f}"),
        "zeros-vs-geometric p": (geo > 0.001, f"{geo:.3g}"),
        "zeros-vs-reference p": (ref > 0.001, f"{ref:.3g}"),
    })


def test_criterion_05_pd1_largest_part(factor_lengths_run):
    largest = factor_lengths_run["largest_part"]["estimate"]
    oracle = float(pd1_batch(make_rng(SEED, stream_id=5), 10**6, 1)[:, 0].mean())
    verdict(5, "mean largest factor vs PD(1)", {
        "mean largest": (0.614 <= largest <= 0.634, f"{largest:.4f}"),
        "oracle": (abs(oracle - GOLOMB_DICKMAN) <= 0.002, f"{oracle:.4f}"),
    })


def test_criterion_06_shuffled_interval_bound():
    rng = make_rng(SEED, stream_id=6)
    worst, violations = -math.inf, []
    for v in range(20):
        # random widths over all l + 2 intervals, fixed ends included
        widths = rng.dirichlet(np.ones(102))
        for k in (1, 3):
            r = larcin_bound_check(widths, k, 10**4, seed=SEED + 10 * v + k)
            worst = max(worst, r.estimate - r.bound - 3 * r.stderr)
            if not r.within_bound:
                violations.append((v, k))
    closed = larcin_bound_check([0.0, 1.0, 0.0], 1, 10**4, seed=SEED).estimate
    verdict(6, "shuffled-interval W2 bound", {
        "violations": (not violations, violations or 0),
        "max(est-bound-3se)": (worst <= 0, f"{worst:.4f}"),
        "degenerate": (abs(closed - 1 / math.sqrt(3)) <= 0.01, f"{closed:.4f}"),
    })


def test_criterion_07_record_law():
    exact_ok = True
    for k in range(1, 9):
        counts = Counter(count_low_records(p) for p in itertools.permutations(range(k)))
        expected = {j: Fraction(counts.get(j, 0), math.factorial(k)) for j in range(1, k + 1)}
        exact_ok &= records_pmf(k, exact=True) == expected

    dist = LetterDistribution.uniform(2)
    params = BlockParams()
    rng = make_rng(SEED, stream_id=7)
    lam, sizes, drawn = [], [], 0
    while len(lam) < 1000 and drawn < 20_000:
        w = draw_lyndon(dist, 10**5, rng)
        drawn += 1
        if is_good_word(w, params, dist, cyclic=True).is_good:
            d = block_decompose(w, params, dist, LYNDON)
            lam.append(d.record_count)
            sizes.append(d.H - 1)
    mv = [records_mean_var(k) if k else (0.0, 0.0) for k in sizes]
    expected = float(np.mean([m for m, _ in mv]))
    sigma = math.sqrt(sum(v for _, v in mv)) / len(mv)
    mean = float(np.mean(lam))
    z = (mean - expected) / sigma
    verdict(7, "record law of long-block ranks, n=1e5", {
        "pmf==enumeration(k<=8)": (exact_ok, exact_ok),
        "good Lyndon words": (len(lam) == 1000, f"{len(lam)}/{drawn} drawn"),
        "mean": (abs(z) <= 3, f"{mean:.4f} vs {expected:.4f} (z={z:+.2f})"),
    })


@pytest.fixture(scope="module")
def good_word_run():
    cfg = ExperimentConfig(
        "good-words", dist="uniform:2", n=[10**3, 10**4, 10**5], trials=10**3, seed=SEED, epsilon=0.4
    )
    return run_good_word_experiment(cfg).statistics


def test_criterion_08_run_statistics(good_word_run):
    s = good_word_run["by_n"][str(10**5)]
    m0 = s["M0_bounded"]["estimate"]
    h = s["long_runs_at_least_alpha_n_eps"]["estimate"]
    fractions = [good_word_run["by_n"][str(n)]["good_fraction"]["estimate"] for n in (10**3, 10**4, 10**5)]
    verdict(8, "run statistics and good-word trend", {
        "M0<=2log2n": (m0 >= 0.95, f"{m0:.3f}"),
        "H>=alpha n^eps": (h >= 0.95, f"{h:.3f}"),
        "good fractions": (
            good_word_run["good_fraction_trend"] == "nondecreasing",
            "/".join(f"{f:.3f}" for f in fractions),
        ),
    })


def test_criterion_09_good_lyndon_structure(good_word_run):
    totals = defaultdict(int)
    good = checked = 0
    for s in good_word_run["by_n"].values():
        good += s["lyndon"]["good"]
        checked += s["lyndon"]["second_block_checked"]
        for key, count in s["lyndon"]["block_check_violations"].items():
            totals[key] += count
    verdict(9, "structure of good Lyndon words", {
        "good Lyndon words": (good > 0, good),
        "second-block checks": (True, checked),
        "violations": (not totals, dict(totals) or 0),
    })


def test_criterion_10_reproducibility():
    identical = True
    for name in ("right-factor", "factor-lengths", "good-words"):
        cfg = ExperimentConfig(name, n=[300, 600, 900], trials=300, seed=SEED, shards=3)
        identical &= run_experiment(cfg).statistics_json() == run_experiment(cfg).statistics_json()
    base = dict(dist="uniform:2", n=[1000], trials=10**4, seed=SEED)
    one = run_right_factor_experiment(ExperimentConfig("right-factor", shards=1, **base))
    eight = run_right_factor_experiment(ExperimentConfig("right-factor", shards=8, **base))
    p_rf = stats.ks_2samp(one.samples[1000], eight.samples[1000]).pvalue
    one = run_factor_lengths_experiment(ExperimentConfig("factor-lengths", shards=1, **base))
    eight = run_factor_lengths_experiment(ExperimentConfig("factor-lengths", shards=8, **base))
    p_fl = stats.ks_2samp(one.samples[1000]["rho1"], eight.samples[1000]["rho1"]).pvalue
    verdict(10, "reproducibility and shard invariance", {
        "identical statistics": (identical, identical),
        "KS p right-factor": (p_rf > 0.001, f"{p_rf:.3g}"),
        "KS p factor-lengths": (p_fl > 0.001, f"{p_fl:.3g}"),
    })
