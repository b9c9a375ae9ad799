"""Single-pass k-median sketch: grid buckets, faraway sample and coreset.

The sketch is a single-writer state machine; callers must serialise
:meth:`StreamSketch.update` calls.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import _kernels
from ..clustering import MedianSet, best_subset, subset_count
from ..exceptions import (BudgetExceeded, DimensionMismatch, EmptySketch, ParseError,
                          StreamOverflow)
from ..permutation import Permutation, as_permutation, pairwise_distances, stack
from ..reconstruct import reconstruct
from .config import StreamConfig
from .coreset import StreamingCoreset, WeightedSet
from .faraway import FarawaySampler

SNAPSHOT_FORMAT = "ulam-cluster-sketch"
SNAPSHOT_VERSION = 1
_QUERY_STREAM = 0x51  # spawn key separating the query RNG from the update RNG


class SampleBucket:
    """Sample ``S_{ell,p}``: rate-``p`` sample pruned to pairwise distance >= beta*ell."""

    __slots__ = ("ell", "p", "threshold", "min_dist", "members", "keys", "_buf", "resets")

    def __init__(self, ell: float, p: float, beta: float):
        self.ell = ell
        self.p = p
        self.threshold = beta * ell
        # distances are integers, so Δ >= threshold  <=>  Δ >= ceil(threshold)
        self.min_dist = math.ceil(self.threshold)
        self.members: list[Permutation] = []
        self.keys: set[bytes] = set()
        self._buf: np.ndarray | None = None
        self.resets = 0

    def admits(self, x: Permutation) -> bool:
        if self.min_dist <= 0 or not self.members:
            return True
        if self.min_dist == 1:
            return x.key not in self.keys
        return bool(_kernels.all_at_least0(x.array, self._buf, len(self.members),
                                           self.min_dist))

    def add(self, x: Permutation):
        m = len(self.members)
        if self.min_dist >= 2:
            if self._buf is None or self._buf.shape[0] == m:
                grown = np.empty((max(8, 2 * m), x.d), dtype=np.int64)
                if m:
                    grown[:m] = self._buf[:m]
                self._buf = grown
            self._buf[m] = x.array
        self.members.append(x)
        self.keys.add(x.key)

    def reset(self):
        self.members = []
        self.keys = set()
        self._buf = None
        self.resets += 1

    def array(self) -> np.ndarray:
        if self._buf is not None:
            return self._buf[:len(self.members)]
        return stack(self.members)

    def __len__(self):
        return len(self.members)


@dataclass(frozen=True)
class StreamQueryResult:
    medians: MedianSet
    weighted_objective: float
    candidate_count: int
    reconstruction_count: int
    all_five_subsets: bool
    greedy: bool


class StreamSketch:
    def __init__(self, config: StreamConfig):
        self.config = config
        self.rng = np.random.Generator(np.random.PCG64(config.seed))
        self.buckets = [SampleBucket(ell, p, config.beta)
                        for ell in config.ell_grid for p in config.p_grid]
        self._rates = np.array([b.p for b in self.buckets])
        self.faraway = FarawaySampler(config.d, config.faraway_thresholds,
                                      config.faraway_ring_cap)
        self.coreset = StreamingCoreset(config.k, config.block_size, self.rng)
        self.items_seen = 0
        self.peak_stored = 0
        self._bucket_stored = 0

    # -- updates ---------------------------------------------------------------

    def update(self, x) -> "StreamSketch":
        x = as_permutation(x)
        cfg = self.config
        if x.d != cfg.d:
            raise DimensionMismatch(cfg.d, x.d)
        if self.items_seen >= cfg.n_bound:
            raise StreamOverflow(cfg.n_bound)
        kept = np.flatnonzero(self.rng.random(len(self.buckets)) < self._rates)
        cap = cfg.bucket_cap
        for i in kept:
            b = self.buckets[i]
            if b.admits(x):
                b.add(x)
                self._bucket_stored += 1
                if len(b) >= cap:
                    self._bucket_stored -= len(b)
                    b.reset()
        self.faraway.update(x)
        self.coreset.update(x)
        self.items_seen += 1
        self.peak_stored = max(self.peak_stored, self.stored)
        return self

    def extend(self, stream) -> "StreamSketch":
        for x in stream:
            self.update(x)
        return self

    @property
    def stored(self) -> int:
        """Permutations currently held across buckets, faraway rings and coreset."""
        return self._bucket_stored + self.faraway.stored + self.coreset.stored

    def sample(self) -> list[Permutation]:
        """Distinct union of bucket members (the set R)."""
        seen: dict[bytes, Permutation] = {}
        for b in self.buckets:
            for p in b.members:
                seen.setdefault(p.key, p)
        return list(seen.values())

    def check_invariants(self):
        cap = self.config.bucket_cap
        for b in self.buckets:
            assert len(b) < cap
            if len(b) > 1:
                D = pairwise_distances(b.members, b.members)
                np.fill_diagonal(D, np.iinfo(np.int64).max)
                assert D.min() >= b.threshold, (b.ell, b.p)
        assert sum(len(b) for b in self.buckets) == self._bucket_stored

    # -- query -----------------------------------------------------------------

    def _reconstructions(self, R: list[Permutation], rng) -> tuple[list[Permutation], bool]:
        cfg = self.config
        budget = cfg.recon_budget
        if math.comb(len(R), 5) <= budget:
            return [reconstruct([R[i] for i in T])
                    for T in itertools.combinations(range(len(R)), 5)], True
        # Too many 5-subsets: draw them inside single buckets, each from the
        # ball of radius 2(1+gamma)ell around a random anchor member.
        eligible = [i for i, b in enumerate(self.buckets) if len(b) >= 5]
        if not eligible or budget == 0:
            return [], False
        quota = max(1, math.ceil(budget / len(eligible)))
        order = rng.permutation(len(eligible))
        seen: set[tuple] = set()
        out: list[Permutation] = []
        for j in order:
            b = self.buckets[eligible[j]]
            X = b.array()
            m = len(b)
            radius = 2 * (1 + cfg.gamma) * b.ell
            for _ in range(quota):
                a = int(rng.integers(m))
                dist = _kernels.dists_to0(X[a], X, m)
                ball = np.flatnonzero(dist <= radius)
                ball = ball[ball != a]
                if ball.size < 4:
                    continue
                T = [a] + [int(i) for i in rng.choice(ball, 4, replace=False)]
                key = tuple(sorted(b.members[i].key for i in T))
                if key in seen:
                    continue
                seen.add(key)
                out.append(reconstruct([b.members[i] for i in T]))
                if len(out) >= budget:
                    return out, False
        return out, False

    def candidates(self) -> tuple[list[Permutation], int, bool]:
        """Distinct candidate medians: R, then F, then reconstructions."""
        rng = np.random.Generator(np.random.PCG64([self.config.seed, _QUERY_STREAM]))
        R = self.sample()
        recon, exhaustive = self._reconstructions(R, rng)
        seen: set[bytes] = set()
        out = []
        for p in itertools.chain(R, self.faraway.members(), recon):
            if p.key not in seen:
                seen.add(p.key)
                out.append(p)
        return out, len(recon), exhaustive

    def query(self, greedy: bool | None = None) -> StreamQueryResult:
        """Best k-tuple of candidates scored on the weighted coreset."""
        cfg = self.config
        greedy = cfg.greedy_fallback if greedy is None else greedy
        cands, n_recon, exhaustive = self.candidates()
        if not cands:
            raise EmptySketch()
        core = self.coreset.snapshot()
        w = core.weights
        D = pairwise_distances(stack(cands), stack(core.points))
        k = min(cfg.k, len(cands))
        used_greedy = False
        if subset_count(len(cands), k) <= cfg.query_budget:
            score, combo = best_subset(D, k, weights=w, budget=cfg.query_budget)
        elif greedy:
            score, combo = _greedy(D, w, k)
            used_greedy = True
        else:
            raise BudgetExceeded(subset_count(len(cands), k), cfg.query_budget)
        return StreamQueryResult(medians=MedianSet(cands[i] for i in combo),
                                 weighted_objective=float(score),
                                 candidate_count=len(cands),
                                 reconstruction_count=n_recon,
                                 all_five_subsets=exhaustive,
                                 greedy=used_greedy)

    # -- snapshots -------------------------------------------------------------

    def to_json(self) -> str:
        table: dict[bytes, int] = {}
        perms: list[list[int]] = []

        def ref(p: Permutation) -> int:
            i = table.get(p.key)
            if i is None:
                i = table[p.key] = len(perms)
                perms.append(list(p.symbols))
            return i

        def wset(ws: WeightedSet):
            return [[ref(p), w] for p, w in ws.items()]

        doc = {
            "format": SNAPSHOT_FORMAT,
            "version": SNAPSHOT_VERSION,
            "config": self.config.to_dict(),
            "rng": self.rng.bit_generator.state,
            "items_seen": self.items_seen,
            "peak_stored": self.peak_stored,
            "buckets": [[b.resets, [ref(p) for p in b.members]] for b in self.buckets],
            "faraway": [[ref(p) for p in r.members] for r in self.faraway.rings],
            "coreset": {
                "buffer": wset(self.coreset.buffer),
                "levels": [None if n is None else wset(n) for n in self.coreset.levels],
            },
            "perms": perms,
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "StreamSketch":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"snapshot is not valid JSON ({exc})") from None
        if doc.get("format") != SNAPSHOT_FORMAT:
            raise ParseError("not a sketch snapshot")
        if doc.get("version") != SNAPSHOT_VERSION:
            raise ParseError(f"unsupported snapshot version {doc.get('version')}")
        s = cls(StreamConfig(**doc["config"]))
        perms = [Permutation(tuple(p)) for p in doc["perms"]]
        s.rng.bit_generator.state = doc["rng"]
        s.items_seen = doc["items_seen"]
        s.peak_stored = doc["peak_stored"]
        if len(doc["buckets"]) != len(s.buckets):
            raise ParseError("bucket grid does not match the configuration")
        for b, (resets, ids) in zip(s.buckets, doc["buckets"]):
            for i in ids:
                b.add(perms[i])
            b.resets = resets
            s._bucket_stored += len(ids)
        for ring, ids in zip(s.faraway.rings, doc["faraway"]):
            for i in ids:
                ring.buf[len(ring.members)] = perms[i].array
                ring.members.append(perms[i])

        def wset(rows):
            return WeightedSet((perms[i], w) for i, w in rows)

        s.coreset.buffer = wset(doc["coreset"]["buffer"])
        s.coreset.levels = [None if n is None else wset(n) for n in doc["coreset"]["levels"]]
        return s

    def save(self, path):
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path) -> "StreamSketch":
        return cls.from_json(Path(path).read_text())


def _greedy(D: np.ndarray, w: np.ndarray, k: int):
    """Greedy seeding by marginal weighted cost, then single-swap local search."""
    current = np.full(D.shape[1], np.iinfo(np.int64).max, dtype=np.int64)
    chosen: list[int] = []
    for _ in range(k):
        scores = np.minimum(D, current) @ w
        scores[chosen] = np.inf
        j = int(np.argmin(scores))
        chosen.append(j)
        current = np.minimum(current, D[j])
    score = float(current @ w)
    improved = True
    while improved:
        improved = False
        for pos in range(k):
            others = [c for i, c in enumerate(chosen) if i != pos]
            rest = (D[others].min(axis=0) if others
                    else np.full(D.shape[1], np.iinfo(np.int64).max, dtype=np.int64))
            scores = np.minimum(D, rest) @ w
            scores[others] = np.inf
            j = int(np.argmin(scores))
            if scores[j] < score - 1e-9:
                chosen[pos], score, improved = j, float(scores[j]), True
    return score, tuple(sorted(chosen))


def sketch_init(config: StreamConfig) -> StreamSketch:
    return StreamSketch(config)


def sketch_update(s: StreamSketch, x) -> StreamSketch:
    return s.update(x)


def sketch_query(s: StreamSketch, greedy: bool | None = None) -> StreamQueryResult:
    return s.query(greedy)
