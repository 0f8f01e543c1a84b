"""scikit-learn style wrappers around the word statistics.

Transformers map a collection of words to a float matrix, so they can sit
in a ``Pipeline`` next to ordinary estimators.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .blocks import run_stats
from .factorization import duval_factorize, standard_right_factor
from .laws import MuLaw, wasserstein2_vs_law
from .validation import check_words


class LyndonFactorLengths(TransformerMixin, BaseEstimator):
    """Normalized Lyndon factor lengths, smallest factor first, zero padded.

    Parameters
    ----------
    depth : int
        Number of leading factor lengths kept per word.
    sort : {"smallest", "decreasing"}
        ``"decreasing"`` returns the decreasing rearrangement instead.
    """

    def __init__(self, depth: int = 64, sort: str = "smallest"):
        self.depth = depth
        self.sort = sort

    def fit(self, X, y=None):
        check_words(X)
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if self.sort not in ("smallest", "decreasing"):
            raise ValueError(f"unknown sort {self.sort!r}")
        self.n_features_out_ = self.depth
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_out_")
        words = check_words(X)
        out = np.zeros((len(words), self.depth))
        for i, w in enumerate(words):
            rho = np.array(duval_factorize(w).lengths, dtype=float) / len(w)
            if self.sort == "decreasing":
                rho = np.sort(rho)[::-1]
            m = min(self.depth, rho.size)
            out[i, :m] = rho[:m]
        return out


class RunStatsTransformer(TransformerMixin, BaseEstimator):
    """Per-word run statistics ``(N, N0, N1, M0, M1)`` of the a1 / non-a1 pattern."""

    feature_names = ("N", "N0", "N1", "M0", "M1")

    def fit(self, X, y=None):
        check_words(X)
        self.n_features_out_ = len(self.feature_names)
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_out_")
        rows = []
        for w in check_words(X):
            s = run_stats(w)
            rows.append([s.N, s.N0, s.N1, s.M0, s.M1])
        return np.asarray(rows, dtype=float)

    def get_feature_names_out(self, input_features=None):
        return np.asarray(self.feature_names, dtype=object)


class RightFactorLawEstimator(BaseEstimator):
    """Fits the atom-plus-uniform law to normalized standard right factors.

    ``fit`` takes Lyndon words of length >= 2 and estimates the atom mass
    ``p1`` by the frequency of ``R = n - 1``. ``score`` is minus the W2
    distance between the right factors of ``X`` and the fitted law.
    """

    def __init__(self, clip: bool = True):
        self.clip = clip

    @staticmethod
    def _right_factors(X):
        words = check_words(X, min_length=2)
        R = np.array([standard_right_factor(w).R for w in words])
        n = np.array([len(w) for w in words])
        return R, n

    def fit(self, X, y=None):
        R, n = self._right_factors(X)
        p = float(np.mean(R == n - 1))
        self.p1_ = min(max(p, 0.0), 1.0) if self.clip else p
        self.law_ = MuLaw(self.p1_)
        self.n_samples_ = R.size
        return self

    def transform(self, X):
        R, n = self._right_factors(X)
        return (R / n).reshape(-1, 1)

    def score(self, X, y=None):
        check_is_fitted(self, "law_")
        return -wasserstein2_vs_law(self.transform(X).ravel(), self.law_)
