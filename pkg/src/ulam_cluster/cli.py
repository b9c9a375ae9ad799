"""Command-line front end: ``ulam-cluster {dist,gen,kmedian,bench}``.

Exit codes: 0 success, 2 usage error, 3 data error, 4 budget error.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import bench
from .clustering import (DEFAULT_BUDGET, approx_k_median, approx_k_median_outliers,
                         as_dataset, brute_force_k_median, objective_with_outliers)
from .datasets import PlantedSpec, generate, write_instance
from .exceptions import BudgetExceeded, DataError, UlamError
from .permutation import iter_dataset, read_dataset, read_permutation, ulam_distance
from .streaming import StreamConfig, StreamSketch

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_BUDGET = 0, 2, 3, 4


def cmd_dist(args) -> int:
    x = read_permutation(args.file_x)
    y = read_permutation(args.file_y)
    print(ulam_distance(x, y))
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.sizes:
        sizes = tuple(int(s) for s in args.sizes.split(","))
        spec = PlantedSpec(args.k, args.d, sizes, args.radius, args.outliers, args.seed)
    else:
        if args.n is None:
            raise DataError("give either --sizes or --n")
        spec = PlantedSpec.uniform(args.k, args.d, args.n, args.radius, args.outliers, args.seed)
    write_instance(generate(spec), args.out)
    return EXIT_OK


def _stream_config(args, d: int, n_bound: int) -> StreamConfig:
    overrides = {name: getattr(args, name) for name in ("beta", "gamma", "lam", "rho")
                 if getattr(args, name) is not None}
    return StreamConfig(n_bound=n_bound, d=d, k=args.k, seed=args.seed,
                        coreset_size=args.coreset_size, query_budget=args.budget,
                        recon_budget=args.recon_budget, greedy_fallback=args.greedy,
                        **overrides)


def _open_input(path):
    return sys.stdin if path == "-" else open(path)


def _run_stream(args) -> tuple[StreamSketch, list]:
    """Feed the file through a sketch in one pass; returns (sketch, retained copy)."""
    retained = []
    if args.snapshot_in:
        sk = StreamSketch.load(args.snapshot_in)
    else:
        sk = None
    if args.file is not None:
        with _open_input(args.file) as fh:
            for x in iter_dataset(fh):
                if sk is None:
                    if args.n_bound is None:
                        raise DataError("--mode stream needs --n-bound (or --snapshot-in)")
                    sk = StreamSketch(_stream_config(args, x.d, args.n_bound))
                sk.update(x)
                if args.oracle:
                    retained.append(x)
    if sk is None:
        raise DataError("no input: give a dataset file or --snapshot-in")
    return sk, retained


def cmd_kmedian(args) -> int:
    t0 = time.perf_counter()
    if args.mode == "offline":
        if args.file is None:
            raise DataError("offline mode needs a dataset file")
        with _open_input(args.file) as fh:
            S = as_dataset(list(iter_dataset(fh)))
        if args.p:
            res = approx_k_median_outliers(S, args.k, args.p, budget=args.budget)
        else:
            res = approx_k_median(S, args.k, budget=args.budget)
        medians, obj, outliers = res.medians, res.objective, res.outliers
        rep = bench.RunReport(instance=str(args.file), algorithm="approx_k_median",
                              n=S.n, d=S.d, k=args.k, p=args.p, objective=obj)
        retained = S.points
    else:
        if args.p:
            raise DataError("--p is only supported in offline mode")
        sk, retained = _run_stream(args)
        res = sk.query()
        if args.snapshot_out:
            sk.save(args.snapshot_out)
        medians, outliers = res.medians, ()
        obj = res.weighted_objective
        obj = int(obj) if float(obj).is_integer() else obj
        rep = bench.RunReport(instance=str(args.file), algorithm="stream",
                              n=sk.items_seen, d=sk.config.d, k=args.k, p=0.0,
                              objective=obj, peak_stored=sk.peak_stored)
    rep.wall_time = time.perf_counter() - t0
    if args.oracle:
        oracle = brute_force_k_median(retained, args.k, args.p).objective
        rep.oracle_objective = oracle
        exact = objective_with_outliers(retained, medians, args.p)[0]
        rep.ratio = bench.ratio(exact, oracle)
    for m in medians:
        print(m)
    print(f"objective={obj}")
    if args.p:
        print("outliers=" + " ".join(str(i) for i in outliers))
    print(rep.to_text())
    return EXIT_OK


def cmd_bench(args) -> int:
    reports = bench.run_suite(bench.load_suite(args.suite))
    print(bench.format_table(reports))
    for r in reports:
        print(r.to_json())
    return EXIT_OK if all(r.status == "ok" for r in reports) else EXIT_DATA


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ulam-cluster",
                                 description="k-median clustering of permutations under the Ulam metric")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", help="Ulam distance between two permutation files")
    p.add_argument("file_x")
    p.add_argument("file_y")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("gen", help="write a planted-cluster dataset and its truth sidecar")
    p.add_argument("out")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--sizes", help="comma-separated cluster sizes")
    p.add_argument("--radius", type=int, default=0)
    p.add_argument("--outliers", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("kmedian", help="approximate k-median of a dataset file ('-' for stdin)")
    p.add_argument("file", nargs="?")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--p", type=float, default=0.0, help="outlier fraction (offline mode)")
    p.add_argument("--mode", choices=("offline", "stream"), default="offline")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-bound", type=int)
    p.add_argument("--beta", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--coreset-size", type=int)
    p.add_argument("--recon-budget", type=int, default=3000)
    p.add_argument("--greedy", action="store_true",
                   help="greedy k-tuple selection when enumeration exceeds --budget")
    p.add_argument("--oracle", action="store_true", help="also run the exact brute force")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--snapshot-out")
    p.add_argument("--snapshot-in")
    p.set_defaults(func=cmd_kmedian)

    p = sub.add_parser("bench", help="run a benchmark suite ('default' for the desk suite)")
    p.add_argument("suite", nargs="?", default="default")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UlamError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
