"""Planted-cluster instances built from random character moves."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .exceptions import InvalidConfig
from .permutation import Permutation, write_dataset


@dataclass(frozen=True)
class PlantedSpec:
    k: int
    d: int
    sizes: tuple[int, ...]
    radius: int
    outlier_count: int = 0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        if self.k < 1 or len(self.sizes) != self.k:
            raise InvalidConfig(f"need one size per cluster (k={self.k}, sizes={self.sizes})")
        if any(s < 1 for s in self.sizes):
            raise InvalidConfig("cluster sizes must be positive")
        if self.d < 1 or not 0 <= self.radius < max(self.d, 1):
            raise InvalidConfig(f"radius must satisfy 0 <= radius < d, got {self.radius}")
        if self.outlier_count < 0:
            raise InvalidConfig("outlier_count must be non-negative")

    @classmethod
    def uniform(cls, k, d, n, radius, outlier_count=0, seed=0) -> "PlantedSpec":
        """Split ``n`` points as evenly as possible over ``k`` clusters."""
        base, extra = divmod(n, k)
        sizes = tuple(base + (i < extra) for i in range(k))
        return cls(k, d, sizes, radius, outlier_count, seed)

    @property
    def n(self) -> int:
        return sum(self.sizes) + self.outlier_count


@dataclass(frozen=True)
class PlantedInstance:
    spec: PlantedSpec
    points: tuple[Permutation, ...]
    labels: tuple[int, ...]  # cluster index, -1 for outliers
    centers: tuple[Permutation, ...]


def character_move(seq: list, rng) -> list:
    """Pick a symbol and reinsert it at a different position."""
    d = len(seq)
    if d < 2:
        return list(seq)
    i = int(rng.integers(d))
    j = int(rng.integers(d - 1))
    if j >= i:
        j += 1
    out = list(seq)
    sym = out.pop(i)
    out.insert(j, sym)
    return out


def generate(spec: PlantedSpec) -> PlantedInstance:
    rng = np.random.default_rng(spec.seed)
    centers = [[int(v) + 1 for v in rng.permutation(spec.d)] for _ in range(spec.k)]
    rows, labels = [], []
    for c, size in enumerate(spec.sizes):
        for _ in range(size):
            p = centers[c]
            for _ in range(spec.radius):
                p = character_move(p, rng)
            rows.append(p)
            labels.append(c)
    for _ in range(spec.outlier_count):
        rows.append([int(v) + 1 for v in rng.permutation(spec.d)])
        labels.append(-1)
    order = rng.permutation(len(rows))
    return PlantedInstance(
        spec=spec,
        points=tuple(Permutation._trusted(tuple(rows[i])) for i in order),
        labels=tuple(labels[i] for i in order),
        centers=tuple(Permutation._trusted(tuple(c)) for c in centers),
    )


def truth_path(out_path) -> Path:
    return Path(str(out_path) + ".truth.json")


def write_instance(inst: PlantedInstance, out_path):
    """Write the dataset file and its ``.truth.json`` sidecar."""
    write_dataset(out_path, inst.points)
    truth = {
        "spec": asdict(inst.spec),
        "centers": [list(c.symbols) for c in inst.centers],
        "labels": list(inst.labels),
    }
    truth_path(out_path).write_text(json.dumps(truth, sort_keys=True) + "\n")


def read_truth(out_path) -> dict:
    return json.loads(truth_path(out_path).read_text())


def random_dataset(n: int, d: int, seed: int = 0) -> tuple[Permutation, ...]:
    """``n`` independent uniformly random permutations of ``1..d``."""
    rng = np.random.default_rng(seed)
    return tuple(Permutation._trusted(tuple(int(v) + 1 for v in rng.permutation(d)))
                 for _ in range(n))
