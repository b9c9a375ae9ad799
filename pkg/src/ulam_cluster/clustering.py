"""Offline k-median objectives and approximation algorithms."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .exceptions import (BudgetExceeded, DataError, DimensionMismatch, EmptyDataset,
                         EmptyMedianSet)
from .permutation import Permutation, as_permutation, pairwise_distances, stack
from .reconstruct import reconstruct

DEFAULT_BUDGET = 10**8
DEFAULT_RECON_BUDGET = 10**6
BRUTE_FORCE_BUDGET = 10**6
BRUTE_FORCE_MAX_D = 7


@dataclass(frozen=True)
class ApproxConstants:
    """Analysis constants behind the 1.999 guarantee.

    They never influence control flow; kept for reporting.
    """

    epsilon: float = 0.03319

    @property
    def alpha(self) -> float:
        return self.epsilon / 11


class Dataset:
    """Ordered multiset of permutations sharing one dimension."""

    def __init__(self, points: Iterable):
        pts = tuple(as_permutation(p) for p in points)
        if not pts:
            raise EmptyDataset()
        d = pts[0].d
        for p in pts:
            if p.d != d:
                raise DimensionMismatch(d, p.d)
        self.points = pts
        self.d = d
        self.array = stack(pts)
        self.array.flags.writeable = False

    @property
    def n(self) -> int:
        return len(self.points)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def __eq__(self, other):
        return isinstance(other, Dataset) and self.points == other.points

    def __repr__(self):
        return f"Dataset(n={self.n}, d={self.d})"

    def distinct(self) -> tuple[list[Permutation], list[int]]:
        """Distinct points in first-occurrence order, with their first indices."""
        seen: dict[bytes, int] = {}
        for i, p in enumerate(self.points):
            seen.setdefault(p.key, i)
        idx = sorted(seen.values())
        return [self.points[i] for i in idx], idx


class MedianSet(tuple):
    """A non-empty tuple of candidate medians of one dimension."""

    def __new__(cls, medians: Iterable):
        if isinstance(medians, Permutation):
            medians = (medians,)
        items = tuple(as_permutation(m) for m in medians)
        if not items:
            raise EmptyMedianSet()
        d = items[0].d
        for m in items:
            if m.d != d:
                raise DimensionMismatch(d, m.d)
        return super().__new__(cls, items)

    @property
    def d(self) -> int:
        return self[0].d


@dataclass(frozen=True)
class ClusteringResult:
    medians: MedianSet
    assignment: tuple[int, ...]
    objective: int
    outliers: tuple[int, ...] = ()

    def cluster(self, i: int) -> list[int]:
        """Dataset indices assigned to median ``i`` (outliers excluded)."""
        out = set(self.outliers)
        return [j for j, a in enumerate(self.assignment) if a == i and j not in out]


def as_dataset(S) -> Dataset:
    return S if isinstance(S, Dataset) else Dataset(S)


def _check_p(p: float):
    if not 0 <= p < 1:
        raise DataError(f"outlier fraction must lie in [0, 1), got {p}")


def outlier_count(p: float, n: int) -> int:
    """``floor(p * n)``, tolerant to float round-off such as ``(1/6) * 6``."""
    return int(math.floor(p * n + 1e-9))


def _median_distances(S: Dataset, Y: MedianSet) -> np.ndarray:
    if Y.d != S.d:
        raise DimensionMismatch(S.d, Y.d)
    return pairwise_distances(stack(Y), S.array)


def _pick_outliers(mins: np.ndarray, n_out: int) -> tuple[int, ...]:
    if n_out == 0:
        return ()
    n = mins.shape[0]
    # largest distance first; among equal distances the higher index goes first
    order = np.lexsort((-np.arange(n), -mins))
    return tuple(sorted(int(i) for i in order[:n_out]))


def objective(S, Y) -> int:
    """Sum over points of the distance to the nearest median."""
    S, Y = as_dataset(S), MedianSet(Y)
    return int(_median_distances(S, Y).min(axis=0).sum())


def objective_with_outliers(S, Y, p: float) -> tuple[int, tuple[int, ...]]:
    """Objective after discarding the ``floor(p n)`` worst-served points."""
    _check_p(p)
    S, Y = as_dataset(S), MedianSet(Y)
    mins = _median_distances(S, Y).min(axis=0)
    outliers = _pick_outliers(mins, outlier_count(p, S.n))
    keep = np.ones(S.n, dtype=bool)
    keep[list(outliers)] = False
    return int(mins[keep].sum()), outliers


def subset_count(m: int, k: int) -> int:
    return sum(math.comb(m, j) for j in range(1, min(k, m) + 1))


def best_subset(D: np.ndarray, k: int, n_out: int = 0, weights=None,
                budget: int = DEFAULT_BUDGET):
    """Exhaustive search over candidate subsets of size 1..k.

    ``D`` is a (candidates x points) distance matrix. Returns ``(score, combo)``
    for the lexicographically smallest minimising index tuple. ``n_out``
    largest per-point distances are dropped; ``weights`` turns the sum into a
    weighted one.
    """
    m, n = D.shape
    k = min(k, m)
    required = subset_count(m, k)
    if required > budget:
        raise BudgetExceeded(required, budget)
    keep = n - n_out
    best = None
    for size in range(1, k + 1):
        chunk = max(1, (1 << 22) // max(1, size * n))
        combos = itertools.combinations(range(m), size)
        while True:
            block = list(itertools.islice(combos, chunk))
            if not block:
                break
            mins = D[np.asarray(block)].min(axis=1)
            if weights is not None:
                scores = mins @ weights
            elif n_out:
                scores = np.sort(mins, axis=1)[:, :keep].sum(axis=1)
            else:
                scores = mins.sum(axis=1)
            j = int(np.argmin(scores))
            cand = (scores[j].item(), block[j])
            if best is None or cand < best:
                best = cand
    return best


def best_from_input(S, k: int = 1, budget: int = DEFAULT_BUDGET) -> MedianSet:
    """Best set of at most ``k`` medians drawn from the input itself."""
    if k < 1:
        raise DataError("k must be >= 1")
    S = as_dataset(S)
    cands, _ = S.distinct()
    D = pairwise_distances(stack(cands), S.array)
    _, combo = best_subset(D, k, budget=budget)
    return MedianSet(cands[i] for i in combo)


def _five_subset_reconstructions(S: Dataset, recon_budget: int) -> Iterable[Permutation]:
    required = math.comb(S.n, 5)
    if required > recon_budget:
        raise BudgetExceeded(required, recon_budget, "5-subset reconstructions")
    cache: dict[tuple, Permutation] = {}
    for T in itertools.combinations(range(S.n), 5):
        key = tuple(sorted(S.points[i].key for i in T))
        out = cache.get(key)
        if out is None:
            out = cache[key] = reconstruct([S.points[i] for i in T])
        yield out


def approx_median(S, budget: int = DEFAULT_BUDGET,
                  recon_budget: int = DEFAULT_RECON_BUDGET) -> Permutation:
    """1-median: best input point or best 5-subset reconstruction."""
    S = as_dataset(S)
    cands = [best_from_input(S, 1, budget)[0]]
    cands.extend(_five_subset_reconstructions(S, recon_budget))
    totals = pairwise_distances(stack(cands), S.array).sum(axis=1)
    return cands[int(np.argmin(totals))]


def candidate_family(S, recon_budget: int = DEFAULT_RECON_BUDGET) -> list[Permutation]:
    """Distinct inputs followed by distinct 5-subset reconstructions."""
    S = as_dataset(S)
    cands, _ = S.distinct()
    seen = {c.key for c in cands}
    for r in _five_subset_reconstructions(S, recon_budget):
        if r.key not in seen:
            seen.add(r.key)
            cands.append(r)
    return cands


def _result(S: Dataset, medians: Sequence[Permutation], p: float) -> ClusteringResult:
    Y = MedianSet(medians)
    D = _median_distances(S, Y)
    mins = D.min(axis=0)
    outliers = _pick_outliers(mins, outlier_count(p, S.n))
    keep = np.ones(S.n, dtype=bool)
    keep[list(outliers)] = False
    return ClusteringResult(medians=Y,
                            assignment=tuple(int(a) for a in D.argmin(axis=0)),
                            objective=int(mins[keep].sum()),
                            outliers=outliers)


def _approx(S, k: int, p: float, budget: int, recon_budget: int) -> ClusteringResult:
    S = as_dataset(S)
    if not 1 <= k <= S.n:
        raise DataError(f"k must satisfy 1 <= k <= n={S.n}, got {k}")
    _check_p(p)
    cands = candidate_family(S, recon_budget)
    D = pairwise_distances(stack(cands), S.array)
    _, combo = best_subset(D, k, n_out=outlier_count(p, S.n), budget=budget)
    return _result(S, [cands[i] for i in combo], p)


def approx_k_median(S, k: int, budget: int = DEFAULT_BUDGET,
                    recon_budget: int = DEFAULT_RECON_BUDGET) -> ClusteringResult:
    """Best ``k``-subset of inputs plus 5-subset reconstructions."""
    return _approx(S, k, 0.0, budget, recon_budget)


def approx_k_median_outliers(S, k: int, p: float, budget: int = DEFAULT_BUDGET,
                             recon_budget: int = DEFAULT_RECON_BUDGET) -> ClusteringResult:
    """As :func:`approx_k_median` but scored with the ``p``-outlier objective."""
    return _approx(S, k, p, budget, recon_budget)


def all_permutations(d: int) -> list[Permutation]:
    return [Permutation._trusted(t) for t in itertools.permutations(range(1, d + 1))]


def brute_force_k_median(S, k: int = 1, p: float = 0.0,
                         budget: int = BRUTE_FORCE_BUDGET) -> ClusteringResult:
    """Exact optimum by enumerating every median set drawn from all of S_d."""
    S = as_dataset(S)
    _check_p(p)
    if S.d > BRUTE_FORCE_MAX_D:
        raise BudgetExceeded(math.factorial(S.d), budget, f"d={S.d} > {BRUTE_FORCE_MAX_D}; permutations")
    required = subset_count(math.factorial(S.d), k)
    if required > budget:
        raise BudgetExceeded(required, budget)
    cands = all_permutations(S.d)
    D = pairwise_distances(stack(cands), S.array)
    _, combo = best_subset(D, k, n_out=outlier_count(p, S.n), budget=budget)
    return _result(S, [cands[i] for i in combo], p)
