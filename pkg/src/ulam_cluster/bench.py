"""Run reports and the benchmark suite driver."""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .clustering import (approx_k_median, approx_k_median_outliers, approx_median,
                         as_dataset, best_from_input, brute_force_k_median, objective,
                         objective_with_outliers)
from .datasets import PlantedSpec, generate, random_dataset
from .exceptions import DataError, UlamError
from .permutation import read_dataset
from .streaming import StreamConfig, StreamSketch, StreamingOneMedian

ALGORITHMS = ("approx_median", "approx_k_median", "best_from_input", "brute_force",
              "stream", "stream_1_median")


@dataclass
class RunReport:
    instance: str
    algorithm: str
    n: int
    d: int
    k: int
    p: float
    objective: int | None = None
    oracle_objective: int | None = None
    ratio: float | None = None
    wall_time: float = 0.0
    peak_stored: int | None = None
    status: str = "ok"

    def to_text(self) -> str:
        return "\n".join(f"{f.name}={_fmt(getattr(self, f.name))}" for f in fields(self))

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def ratio(value: int, oracle: int) -> float:
    if oracle == 0:
        return 1.0 if value == 0 else float("inf")
    return value / oracle


def run_algorithm(points, algorithm: str, k: int = 1, p: float = 0.0, oracle: bool = False,
                  stream: dict | None = None, seed: int = 0, instance: str = "-") -> RunReport:
    """Run one pipeline on in-memory data and fill a :class:`RunReport`."""
    S = as_dataset(points)
    rep = RunReport(instance=instance, algorithm=algorithm, n=S.n, d=S.d, k=k, p=p)
    t0 = time.perf_counter()
    if algorithm == "approx_median":
        if k != 1:
            raise DataError("approx_median requires k=1")
        medians = [approx_median(S)]
    elif algorithm == "approx_k_median":
        res = approx_k_median_outliers(S, k, p) if p else approx_k_median(S, k)
        medians = res.medians
    elif algorithm == "best_from_input":
        medians = best_from_input(S, k)
    elif algorithm == "brute_force":
        medians = brute_force_k_median(S, k, p).medians
    elif algorithm == "stream":
        opts = dict(stream or {})
        opts.setdefault("seed", seed)
        cfg = StreamConfig(n_bound=opts.pop("n_bound", S.n), d=S.d, k=k, **opts)
        sk = StreamSketch(cfg).extend(S.points)
        medians = sk.query().medians
        rep.peak_stored = sk.peak_stored
    elif algorithm == "stream_1_median":
        if k != 1:
            raise DataError("stream_1_median requires k=1")
        opts = dict(stream or {})
        opts.setdefault("seed", seed)
        sk = StreamingOneMedian(S.d, opts.pop("n_bound", S.n), **opts)
        for x in S.points:
            sk.update(x)
        medians = [sk.query()]
        rep.peak_stored = sk.peak_stored
    else:
        raise DataError(f"unknown algorithm {algorithm!r}")
    rep.objective = (objective_with_outliers(S, medians, p)[0] if p
                     else objective(S, medians))
    rep.wall_time = time.perf_counter() - t0
    if oracle:
        rep.oracle_objective = brute_force_k_median(S, k, p).objective
        rep.ratio = ratio(rep.objective, rep.oracle_objective)
    return rep


def load_instance(spec: dict):
    """Materialise the ``planted`` / ``random`` / ``file`` instance of a suite row."""
    if "planted" in spec:
        pl = dict(spec["planted"])
        if "sizes" in pl:
            ps = PlantedSpec(pl["k"], pl["d"], tuple(pl["sizes"]), pl.get("radius", 0),
                             pl.get("outlier_count", 0), pl.get("seed", 0))
        else:
            ps = PlantedSpec.uniform(pl["k"], pl["d"], pl["n"], pl.get("radius", 0),
                                     pl.get("outlier_count", 0), pl.get("seed", 0))
        return generate(ps).points
    if "random" in spec:
        r = spec["random"]
        return random_dataset(r["n"], r["d"], r.get("seed", 0))
    if "file" in spec:
        return read_dataset(spec["file"])
    raise DataError("suite row needs one of 'planted', 'random' or 'file'")


def _desk_suite() -> list[dict]:
    runs = []
    for s in range(3):
        runs.append({"name": f"median-d6-n8-s{s}", "random": {"n": 8, "d": 6, "seed": s},
                     "algorithm": "approx_median", "k": 1, "oracle": True})
    for s in range(3):
        runs.append({"name": f"kmed-d5-n6-s{s}", "random": {"n": 6, "d": 5, "seed": 100 + s},
                     "algorithm": "approx_k_median", "k": 2, "oracle": True})
    for s in range(2):
        runs.append({"name": f"outl-d5-n8-s{s}", "random": {"n": 8, "d": 5, "seed": 200 + s},
                     "algorithm": "approx_k_median", "k": 1, "p": 0.25, "oracle": True})
    runs.append({"name": "stream-planted-d6", "planted": {"k": 2, "d": 6, "n": 30, "radius": 1,
                                                          "seed": 7},
                 "algorithm": "stream", "k": 2, "oracle": True})
    runs.append({"name": "stream1-planted-d6", "planted": {"k": 1, "d": 6, "n": 60, "radius": 2,
                                                           "seed": 8},
                 "algorithm": "stream_1_median", "k": 1, "oracle": True,
                 "stream": {"lam": 0.1}})
    return runs


DEFAULT_SUITE = {"runs": _desk_suite()}


def load_suite(path) -> dict:
    if str(path) == "default":
        return DEFAULT_SUITE
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"suite file is not valid JSON ({exc})") from None


def run_suite(suite: dict) -> list[RunReport]:
    """Run every row; failures become ``status="error: ..."`` rows."""
    reports = []
    for i, spec in enumerate(suite.get("runs", [])):
        name = spec.get("name", f"run{i}")
        try:
            rep = run_algorithm(load_instance(spec), spec.get("algorithm", "approx_k_median"),
                                k=spec.get("k", 1), p=spec.get("p", 0.0),
                                oracle=spec.get("oracle", False), stream=spec.get("stream"),
                                seed=spec.get("seed", 0), instance=name)
        except (UlamError, OSError, KeyError, TypeError) as exc:
            rep = RunReport(instance=name, algorithm=str(spec.get("algorithm")), n=0, d=0,
                            k=spec.get("k", 1), p=spec.get("p", 0.0),
                            status=f"error: {exc}")
        reports.append(rep)
    return reports


TABLE_COLUMNS = ("instance", "algorithm", "n", "d", "k", "p", "objective",
                 "oracle_objective", "ratio", "wall_time", "peak_stored", "status")


def format_table(reports: list[RunReport]) -> str:
    rows = [list(TABLE_COLUMNS)]
    rows += [[_fmt(getattr(r, c)) for c in TABLE_COLUMNS] for r in reports]
    widths = [max(len(row[i]) for row in rows) for i in range(len(TABLE_COLUMNS))]
    return "\n".join("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
                     for row in rows)
