"""scikit-learn estimators wrapping the offline and streaming algorithms.

Inputs are 2-D integer arrays whose rows are 1-based permutations of
``1..d``; medians are reported in the same layout.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .clustering import (Dataset, approx_k_median, approx_k_median_outliers, as_dataset,
                         best_from_input, brute_force_k_median, _result)
from .exceptions import DataError, DimensionMismatch, NotBijection
from .permutation import Permutation, pairwise_distances
from .streaming import StreamConfig, StreamSketch


def check_permutations(X, d: int | None = None) -> np.ndarray:
    """Validate ``X`` as an ``(n, d)`` array of 1-based permutation rows."""
    if isinstance(X, Dataset):
        X = [p.symbols for p in X.points]
    elif isinstance(X, (list, tuple)) and X and isinstance(X[0], Permutation):
        X = [p.symbols for p in X]
    X = check_array(X, dtype=np.int64)
    n, width = X.shape
    if d is not None and width != d:
        raise DimensionMismatch(d, width)
    ok = (np.sort(X, axis=1) == np.arange(1, width + 1)).all(axis=1)
    if not ok.all():
        row = int(np.flatnonzero(~ok)[0])
        vals, counts = np.unique(X[row], return_counts=True)
        bad = vals[(counts > 1) | (vals < 1) | (vals > width)]
        raise NotBijection(int(bad[0]) if bad.size else X[row].tolist(), width)
    return X


def _to_perms(X: np.ndarray) -> list[Permutation]:
    return [Permutation._trusted(tuple(int(v) for v in row)) for row in X]


class _MedianMixin(TransformerMixin):
    def transform(self, X):
        """Ulam distance from every row to every median, shape ``(n, k)``."""
        check_is_fitted(self, "medians_")
        X = check_permutations(X, self.n_features_in_)
        return pairwise_distances(self.medians_ - 1, X - 1).T

    def predict(self, X):
        """Index of the nearest median (ties go to the lower index)."""
        return self.transform(X).argmin(axis=1)

    def score(self, X, y=None):
        """Negative k-median objective of ``X`` against the fitted medians."""
        return -float(self.transform(X).min(axis=1).sum())


class UlamKMedian(_MedianMixin, ClusterMixin, BaseEstimator):
    """Offline k-median under the Ulam metric.

    ``method="approx"`` runs the reconstruction-based approximation,
    ``"best_input"`` the discrete optimum over input points and
    ``"brute_force"`` the exact search over all of S_d (tiny d only).
    """

    def __init__(self, n_clusters=1, outlier_fraction=0.0, method="approx",
                 budget=10**8, recon_budget=10**6):
        self.n_clusters = n_clusters
        self.outlier_fraction = outlier_fraction
        self.method = method
        self.budget = budget
        self.recon_budget = recon_budget

    def fit(self, X, y=None):
        X = check_permutations(X)
        S = as_dataset(_to_perms(X))
        k, p = self.n_clusters, self.outlier_fraction
        if self.method == "approx":
            if p:
                res = approx_k_median_outliers(S, k, p, self.budget, self.recon_budget)
            else:
                res = approx_k_median(S, k, self.budget, self.recon_budget)
        elif self.method == "best_input":
            res = _result(S, best_from_input(S, k, self.budget), p)
        elif self.method == "brute_force":
            res = brute_force_k_median(S, k, p)
        else:
            raise DataError(f"unknown method {self.method!r}")
        self.result_ = res
        self.medians_ = np.array([m.symbols for m in res.medians], dtype=np.int64)
        self.labels_ = np.asarray(res.assignment)
        self.objective_ = res.objective
        self.outliers_ = np.asarray(res.outliers, dtype=np.int64)
        self.n_features_in_ = X.shape[1]
        return self


class StreamingUlamKMedian(_MedianMixin, ClusterMixin, BaseEstimator):
    """Single-pass k-median; ``partial_fit`` feeds rows into one sketch."""

    def __init__(self, n_clusters=1, n_bound=None, beta=1e-7, gamma=0.1, lam=1e-7,
                 rho=1e-8, kappa=1 / 3, coreset_size=None, recon_budget=3000,
                 query_budget=10**8, greedy_fallback=False, random_state=0):
        self.n_clusters = n_clusters
        self.n_bound = n_bound
        self.beta = beta
        self.gamma = gamma
        self.lam = lam
        self.rho = rho
        self.kappa = kappa
        self.coreset_size = coreset_size
        self.recon_budget = recon_budget
        self.query_budget = query_budget
        self.greedy_fallback = greedy_fallback
        self.random_state = random_state

    def _config(self, d, n):
        return StreamConfig(
            n_bound=self.n_bound or n, d=d, k=self.n_clusters, beta=self.beta,
            gamma=self.gamma, lam=self.lam, rho=self.rho, kappa=self.kappa,
            seed=self.random_state, coreset_size=self.coreset_size,
            query_budget=self.query_budget, recon_budget=self.recon_budget,
            greedy_fallback=self.greedy_fallback)

    def fit(self, X, y=None):
        if hasattr(self, "sketch_"):
            del self.sketch_
        return self.partial_fit(X)

    def partial_fit(self, X, y=None):
        first = not hasattr(self, "sketch_")
        X = check_permutations(X, None if first else self.n_features_in_)
        if first:
            self.sketch_ = StreamSketch(self._config(X.shape[1], X.shape[0]))
            self.n_features_in_ = X.shape[1]
        for x in _to_perms(X):
            self.sketch_.update(x)
        res = self.sketch_.query()
        self.result_ = res
        self.medians_ = np.array([m.symbols for m in res.medians], dtype=np.int64)
        self.weighted_objective_ = res.weighted_objective
        return self

    def fit_predict(self, X, y=None):
        # one pass keeps no per-item labels, so label with a second look at X
        return self.fit(X).predict(X)
