"""Streaming k-median coreset over the Ulam metric.

Merge-and-reduce: the stream is cut into blocks of ``block_size`` distinct
permutations; equal-level blocks are merged like a binary counter and each
merge is shrunk back by sensitivity sampling against a D-sampled
bicriteria solution. Cluster weights are restored exactly after sampling, so
the total weight always equals the number of items seen.
"""

from __future__ import annotations

import numpy as np

from .. import _kernels
from ..permutation import Permutation, pairwise_distances, stack


class WeightedSet:
    """Weighted multiset of permutations keyed by symbol content."""

    __slots__ = ("_items",)

    def __init__(self, items=None):
        self._items: dict[bytes, list] = {}
        for p, w in items or ():
            self.add(p, w)

    def add(self, p: Permutation, w: float = 1.0):
        slot = self._items.get(p.key)
        if slot is None:
            self._items[p.key] = [p, float(w)]
        else:
            slot[1] += float(w)

    def merge(self, other: "WeightedSet") -> "WeightedSet":
        out = WeightedSet(self.items())
        for p, w in other.items():
            out.add(p, w)
        return out

    def items(self):
        return [(p, w) for p, w in self._items.values()]

    @property
    def points(self) -> list[Permutation]:
        return [p for p, _ in self._items.values()]

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self._items.values()], dtype=np.float64)

    @property
    def total_weight(self) -> float:
        return float(sum(w for _, w in self._items.values()))

    def __len__(self):
        return len(self._items)


def weighted_cost(points, weights, medians) -> float:
    """``sum_x w(x) * Δ(x, medians)``."""
    D = pairwise_distances(stack(list(medians)), stack(list(points)))
    return float(D.min(axis=0) @ np.asarray(weights, dtype=np.float64))


def _d_sampling(X: np.ndarray, w: np.ndarray, n_centers: int, rng) -> np.ndarray:
    """Weighted D-sampling seeding; returns (centers, point->center distances)."""
    n = X.shape[0]
    first = int(rng.choice(n, p=w / w.sum()))
    centers = [first]
    best = _kernels.dists_to0(X[first], X, n).astype(np.float64)
    for _ in range(1, n_centers):
        mass = w * best
        if mass.sum() <= 0:
            break
        c = int(rng.choice(n, p=mass / mass.sum()))
        centers.append(c)
        best = np.minimum(best, _kernels.dists_to0(X[c], X, n))
    return np.asarray(centers)


def sensitivity_reduce(ws: WeightedSet, size: int, k: int, rng) -> WeightedSet:
    """Shrink ``ws`` to about ``size`` points by sensitivity sampling."""
    if len(ws) <= size:
        return ws
    pts = ws.points
    w = ws.weights
    X = stack(pts)
    centers = _d_sampling(X, w, 2 * k, rng)
    D = pairwise_distances(X[centers], X)
    label = D.argmin(axis=0)
    cost = D.min(axis=0).astype(np.float64)

    cluster_w = np.bincount(label, weights=w, minlength=len(centers))
    total = float(cost @ w)
    sens = w / cluster_w[label]
    if total > 0:
        sens = sens + w * cost / total
    q = sens / sens.sum()

    draws = rng.choice(len(pts), size=size, replace=True, p=q)
    new_w = np.zeros(len(pts))
    np.add.at(new_w, draws, w[draws] / (size * q[draws]))

    out = WeightedSet()
    for j in range(len(centers)):
        members = np.flatnonzero((label == j) & (new_w > 0))
        if members.size == 0:
            out.add(pts[centers[j]], cluster_w[j])
            continue
        scale = cluster_w[j] / new_w[members].sum()
        for i in members:
            out.add(pts[i], new_w[i] * scale)
    return out


class StreamingCoreset:
    """Binary-counter merge-and-reduce coreset (insertion-only)."""

    def __init__(self, k: int, block_size: int, rng):
        self.k = k
        self.block_size = block_size
        self.rng = rng
        self.buffer = WeightedSet()
        self.levels: list[WeightedSet | None] = []

    def update(self, x: Permutation):
        self.buffer.add(x, 1.0)
        if len(self.buffer) >= self.block_size:
            node, self.buffer = self.buffer, WeightedSet()
            self._carry(node)

    def _carry(self, node: WeightedSet):
        i = 0
        while i < len(self.levels) and self.levels[i] is not None:
            node = sensitivity_reduce(self.levels[i].merge(node), self.block_size,
                                      self.k, self.rng)
            self.levels[i] = None
            i += 1
        if i == len(self.levels):
            self.levels.append(None)
        self.levels[i] = node

    @property
    def stored(self) -> int:
        return len(self.buffer) + sum(len(n) for n in self.levels if n is not None)

    def snapshot(self) -> WeightedSet:
        """Union of all nodes and the buffer, the current coreset ``(P, w)``."""
        out = WeightedSet(self.buffer.items())
        for node in self.levels:
            if node is not None:
                out = out.merge(node)
        return out
