"""Monotone faraway sampling.

One ring per distance threshold ``1, 2, 4, ... <= d``. A ring admits a
permutation when it is farther than the threshold from every current ring
member and the ring is below its cap. Rings only grow, so the sample is
monotone in the stream prefix.
"""

from __future__ import annotations

import numpy as np

from .. import _kernels
from ..permutation import Permutation


class _Ring:
    __slots__ = ("threshold", "cap", "members", "buf")

    def __init__(self, threshold: int, cap: int, d: int):
        self.threshold = threshold
        self.cap = cap
        self.members: list[Permutation] = []
        self.buf = np.empty((cap, d), dtype=np.int64)

    def offer(self, x: Permutation) -> bool:
        m = len(self.members)
        if m >= self.cap:
            return False
        if m and not _kernels.all_at_least0(x.array, self.buf, m, self.threshold + 1):
            return False
        self.buf[m] = x.array
        self.members.append(x)
        return True


class FarawaySampler:
    def __init__(self, d: int, thresholds, ring_cap: int):
        self.rings = [_Ring(t, ring_cap, d) for t in thresholds]

    def update(self, x: Permutation):
        for ring in self.rings:
            ring.offer(x)

    @property
    def stored(self) -> int:
        return sum(len(r.members) for r in self.rings)

    def members(self) -> list[Permutation]:
        """Distinct sampled permutations in ring order."""
        seen, out = set(), []
        for ring in self.rings:
            for p in ring.members:
                if p.key not in seen:
                    seen.add(p.key)
                    out.append(p)
        return out
