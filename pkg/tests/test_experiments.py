import json
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from lyndonlab.blocks import BlockParams
from lyndonlab.experiments import (
    BudgetError,
    ConfigError,
    ExperimentConfig,
    exact_small_n,
    run_experiment,
    run_factor_lengths_experiment,
    run_good_word_experiment,
    run_right_factor_experiment,
)
from lyndonlab.words import LetterDistribution


class TestExact:
    def test_examples(self, binary):
        assert exact_small_n(binary, 4, "primitive-prob")["P"] == Fraction(3, 4)
        assert exact_small_n(binary, 3, "right-factor")["L"] == {
            Fraction(1, 3): Fraction(1, 2),
            Fraction(2, 3): Fraction(1, 2),
        }
        assert exact_small_n(binary, 1, "rho")["P"] == {(Fraction(1),): 1}

    def test_laws_are_normalized(self, skewed):
        for stat in ("right-factor", "rho"):
            law = exact_small_n(skewed, 6, stat)
            assert sum(law["L"].values()) == 1
        assert sum(exact_small_n(skewed, 6, "rho")["P"].values()) == 1

    def test_budget(self, binary):
        with pytest.raises(BudgetError):
            exact_small_n(binary, 24, "rho")
        with pytest.raises(BudgetError):
            exact_small_n(LetterDistribution.geometric(0.5), 3, "rho")

    def test_unknown_statistic(self, binary):
        with pytest.raises(ValueError):
            exact_small_n(binary, 3, "mean")


class TestConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"experiment": "nope"},
            {"experiment": "right-factor", "trials": 0},
            {"experiment": "right-factor", "n": [0]},
            {"experiment": "right-factor", "shards": 0},
            {"experiment": "right-factor", "dist": "uniform:1"},
            {"experiment": "good-words", "epsilon": 0.7},
            {"experiment": "good-words", "alpha": 1.0},
        ],
    )
    def test_rejects(self, kwargs):
        with pytest.raises(ConfigError):
            ExperimentConfig(**kwargs)

    def test_shard_sizes(self):
        cfg = ExperimentConfig("right-factor", trials=10, shards=3)
        assert cfg.shard_sizes() == [4, 3, 3]


class TestSmoke:
    def test_single_trial(self):
        for name in ("right-factor", "factor-lengths", "good-words"):
            rep = run_experiment(ExperimentConfig(name, n=[50], trials=1))
            assert rep.statistics["by_n"]["50"]["trials"] == 1
            json.dumps(rep.to_dict())

    def test_length_one(self):
        rep = run_factor_lengths_experiment(ExperimentConfig("factor-lengths", n=1, trials=20))
        s = rep.statistics["by_n"]["1"]
        assert s["largest_part"]["estimate"] == 1
        assert s["rho1_given_long_vs_uniform"]["count"] == 0
        rep = run_right_factor_experiment(ExperimentConfig("right-factor", n=1, trials=5))
        assert rep.statistics["by_n"]["1"]["trials"] == 5

    def test_insufficient_sweep(self):
        rep = run_good_word_experiment(ExperimentConfig("good-words", n=[10], trials=20))
        assert rep.statistics["good_fraction_trend"] == "insufficient"

    def test_sweep_trend_field(self):
        rep = run_good_word_experiment(ExperimentConfig("good-words", n=[100, 200, 400], trials=40))
        assert rep.statistics["good_fraction_trend"] in ("nondecreasing", "not monotone")

    def test_length_three_right_factor(self):
        rep = run_right_factor_experiment(ExperimentConfig("right-factor", n=3, trials=10_000, seed=4))
        r = rep.samples[3]
        assert set(np.round(r * 3).astype(int)) == {1, 2}
        assert abs(np.mean(r == 2 / 3) - 0.5) < 0.02


class TestReport:
    def test_reproducible(self):
        cfg = ExperimentConfig("factor-lengths", n=[200, 300], trials=200, seed=11, shards=3)
        a = run_experiment(cfg)
        b = run_experiment(cfg)
        assert a.statistics_json() == b.statistics_json()
        assert a.shards == b.shards

    def test_config_echoed(self):
        cfg = ExperimentConfig("right-factor", n=[30], trials=7, seed=5, shards=2)
        d = run_experiment(cfg).to_dict()
        assert d["config"] == cfg.to_dict()
        assert d["schema"].startswith("lyndonlab.report/")
        assert d["tool"]["rng"].startswith("numpy.Philox")
        assert [s["trials"] for s in d["shards"]] == [4, 3]

    def test_write(self, tmp_path):
        cfg = ExperimentConfig("right-factor", n=[40], trials=30, out=str(tmp_path / "rep.json"))
        run_experiment(cfg)
        data = json.loads((tmp_path / "rep.json").read_text())
        assert data["statistics"]["by_n"]["40"]["trials"] == 30
        rows = (tmp_path / "rep.r_hist.csv").read_text().splitlines()
        assert rows[0] == "n,bin_left,bin_right,count"
        assert sum(int(r.split(",")[-1]) for r in rows[1:]) == 30

    def test_shard_invariance(self):
        base = dict(n=[500], trials=4000, seed=21)
        one = run_right_factor_experiment(ExperimentConfig("right-factor", shards=1, **base))
        eight = run_right_factor_experiment(ExperimentConfig("right-factor", shards=8, **base))
        assert stats.ks_2samp(one.samples[500], eight.samples[500]).pvalue > 0.001


class TestAgainstOracle:
    """Monte Carlo estimates within their 4 sigma radius of the exact law."""

    @pytest.mark.parametrize("n", [4, 7, 10])
    def test_right_factor(self, binary, n):
        law = exact_small_n(binary, n, "right-factor")["L"]
        rep = run_right_factor_experiment(ExperimentConfig("right-factor", n=n, trials=4000, seed=n))
        s = rep.statistics["by_n"][str(n)]
        atom = law.get(1 - Fraction(1, n), 0)
        assert abs(s["atom_frequency"]["estimate"] - float(atom)) <= s["atom_frequency"]["radius_4sigma"]
        for k in (1, 2, 3):
            exact = float(sum(p * r**k for r, p in law.items()))
            m = s["moments"][str(k)]
            assert abs(m["estimate"] - exact) <= 4 * m["stderr"]

    @pytest.mark.parametrize("n", [5, 10])
    def test_smallest_factor_atom(self, binary, n):
        law = exact_small_n(binary, n, "rho")["P"]
        rep = run_factor_lengths_experiment(ExperimentConfig("factor-lengths", n=n, trials=4000, seed=n))
        s = rep.statistics["by_n"][str(n)]["smallest_factor_is_a1"]
        # the smallest factor is the letter a1 exactly when the word ends with a1
        assert abs(s["estimate"] - float(binary.p1)) <= s["radius_4sigma"]
        samples = rep.samples[n]["rho1"]
        exact_len1 = float(sum(p for rho, p in law.items() if rho[0] == Fraction(1, n)))
        se = np.sqrt(exact_len1 * (1 - exact_len1) / samples.size)
        assert abs(np.mean(samples == 1 / n) - exact_len1) <= 4 * se

    def test_good_fraction(self, binary):
        params = BlockParams(0.3, 0.01)
        n = 10
        exact = exact_small_n(binary, n, "good-fraction", params)["P"]
        cfg = ExperimentConfig("good-words", n=n, trials=4000, seed=3, epsilon=0.3, alpha=0.01)
        s = run_good_word_experiment(cfg).statistics["by_n"][str(n)]["good_fraction"]
        assert abs(s["estimate"] - float(exact)) <= s["radius_4sigma"]
