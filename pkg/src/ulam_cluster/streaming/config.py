"""Configuration and derived sizes for the streaming sketch."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from ..exceptions import InvalidConfig

# published constants; anything else is a desk-scale override
PUBLISHED = {"beta": 1e-7, "gamma": 0.1, "lam": 1e-7, "rho": 1e-8, "kappa": 1 / 3}


def log2ceil(n: float) -> int:
    """Ceiling base-2 logarithm, floored at 1 so that derived caps stay positive."""
    return max(1, math.ceil(math.log2(n))) if n > 1 else 1


def geometric_grid(top: float, ratio: float) -> list[float]:
    """``1, ratio, ratio**2, ...`` strictly below ``top``, then ``top`` itself."""
    out = []
    v, i = 1.0, 0
    while v < top * (1 - 1e-12):
        out.append(v)
        i += 1
        v = ratio ** i
    out.append(float(top))
    return out


@dataclass(frozen=True)
class StreamConfig:
    n_bound: int
    d: int
    k: int = 1
    beta: float = PUBLISHED["beta"]
    gamma: float = PUBLISHED["gamma"]
    lam: float = PUBLISHED["lam"]
    rho: float = PUBLISHED["rho"]
    kappa: float = PUBLISHED["kappa"]
    seed: int = 0
    coreset_size: int | None = None
    query_budget: int = 10**8
    recon_budget: int = 3000
    greedy_fallback: bool = False

    def __post_init__(self):
        for name in ("n_bound", "d", "k"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise InvalidConfig(f"{name} must be a positive integer, got {v!r}")
        for name in ("beta", "gamma", "lam", "rho", "kappa"):
            if not getattr(self, name) > 0:
                raise InvalidConfig(f"{name} must be positive")
        for name in ("gamma", "lam", "kappa", "rho"):
            if not getattr(self, name) < 1:
                raise InvalidConfig(f"{name} must lie in (0, 1)")
        if self.coreset_size is not None and self.coreset_size < 1:
            raise InvalidConfig("coreset_size must be positive")
        if self.query_budget < 1 or self.recon_budget < 0:
            raise InvalidConfig("budgets must be positive")

    @property
    def is_published(self) -> bool:
        return all(getattr(self, k) == v for k, v in PUBLISHED.items())

    @property
    def log_n(self) -> int:
        return log2ceil(self.n_bound)

    @property
    def bucket_cap(self) -> int:
        return self.k * self.log_n ** 3

    @property
    def ell_grid(self) -> list[float]:
        return geometric_grid(self.d, 1 + self.gamma)

    @property
    def p_grid(self) -> list[float]:
        return [1.0 / v for v in geometric_grid(self.n_bound, 1 + self.gamma)]

    @property
    def n_buckets(self) -> int:
        return len(self.ell_grid) * len(self.p_grid)

    @property
    def block_size(self) -> int:
        """Merge-and-reduce block size of the coreset."""
        if self.coreset_size is not None:
            return self.coreset_size
        return int(min(self.n_bound, math.ceil(self.k / self.lam ** 2)))

    @property
    def coreset_capacity(self) -> int:
        m = self.block_size
        blocks = max(1, self.n_bound // m)
        levels = int(math.floor(math.log2(blocks))) + 1
        return levels * (m + 2 * self.k) + m - 1

    @property
    def faraway_thresholds(self) -> list[int]:
        return [2 ** j for j in range(int(math.floor(math.log2(self.d))) + 1)]

    @property
    def faraway_ring_cap(self) -> int:
        return self.k * log2ceil(1 + self.k * self.kappa * self.n_bound)

    @property
    def faraway_bound(self) -> int:
        return len(self.faraway_thresholds) * self.faraway_ring_cap

    @property
    def faraway_analytic_bound(self) -> float:
        """``k^2 (rho kappa)^-1 log k log(1 + k kappa n)`` with unit constant."""
        k = self.k
        return (k * k / (self.rho * self.kappa) * max(1.0, math.log2(k))
                * math.log2(1 + k * self.kappa * self.n_bound))

    @property
    def space_bound(self) -> int:
        return self.n_buckets * self.bucket_cap + self.faraway_bound + self.coreset_capacity

    def to_dict(self) -> dict:
        return asdict(self)
