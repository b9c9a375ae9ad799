"""Streaming 1-median from a uniform reservoir and a (1, lambda)-coreset."""

from __future__ import annotations

import itertools
import math

import numpy as np

from ..exceptions import DimensionMismatch, EmptySketch, InvalidConfig, StreamOverflow
from ..permutation import Permutation, as_permutation, pairwise_distances, stack
from ..reconstruct import reconstruct
from .config import log2ceil
from .coreset import StreamingCoreset


class StreamingOneMedian:
    """Reservoir of ``ceil(log2 n_bound)`` items plus a merge-and-reduce coreset."""

    def __init__(self, d: int, n_bound: int, lam: float = 1e-7, seed: int = 0,
                 coreset_size: int | None = None):
        if d < 1 or n_bound < 1:
            raise InvalidConfig("d and n_bound must be positive")
        if not 0 < lam < 1:
            raise InvalidConfig("lam must lie in (0, 1)")
        self.d = d
        self.n_bound = n_bound
        self.lam = lam
        self.rng = np.random.Generator(np.random.PCG64(seed))
        self.reservoir_size = log2ceil(n_bound)
        self.block_size = coreset_size or int(min(n_bound, math.ceil(lam ** -2)))
        self.reservoir: list[Permutation] = []
        self.coreset = StreamingCoreset(1, self.block_size, self.rng)
        self.items_seen = 0
        self.peak_stored = 0

    @property
    def coreset_capacity(self) -> int:
        m = self.block_size
        levels = int(math.floor(math.log2(max(1, self.n_bound // m)))) + 1
        return levels * (m + 2) + m - 1

    @property
    def space_constant(self) -> float:
        """``c`` with ``stored <= c * log2(n)^2`` implied by the size accounting."""
        L = self.reservoir_size
        return (L + self.coreset_capacity) / L ** 2

    @property
    def stored(self) -> int:
        return len(self.reservoir) + self.coreset.stored

    def update(self, x) -> "StreamingOneMedian":
        x = as_permutation(x)
        if x.d != self.d:
            raise DimensionMismatch(self.d, x.d)
        if self.items_seen >= self.n_bound:
            raise StreamOverflow(self.n_bound)
        t = self.items_seen
        if t < self.reservoir_size:
            self.reservoir.append(x)
        else:
            j = int(self.rng.integers(t + 1))
            if j < self.reservoir_size:
                self.reservoir[j] = x
        self.coreset.update(x)
        self.items_seen += 1
        self.peak_stored = max(self.peak_stored, self.stored)
        return self

    def candidates(self) -> list[Permutation]:
        seen: set[bytes] = set()
        out = []
        R = self.reservoir
        recon = (reconstruct([R[i] for i in T])
                 for T in itertools.combinations(range(len(R)), 5))
        for p in itertools.chain(R, recon):
            if p.key not in seen:
                seen.add(p.key)
                out.append(p)
        return out

    def query(self) -> Permutation:
        cands = self.candidates()
        if not cands:
            raise EmptySketch()
        core = self.coreset.snapshot()
        D = pairwise_distances(stack(cands), stack(core.points))
        return cands[int(np.argmin(D @ core.weights))]


def streaming_1_median(stream, d: int, n_bound: int, lam: float = 1e-7, seed: int = 0,
                       coreset_size: int | None = None) -> Permutation:
    sk = StreamingOneMedian(d, n_bound, lam=lam, seed=seed, coreset_size=coreset_size)
    for x in stream:
        sk.update(x)
    return sk.query()
