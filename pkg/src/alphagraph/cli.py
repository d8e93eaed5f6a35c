"""Command-line interface.  Machine-readable JSON goes to stdout, logs to stderr.

Exit codes: 0 success, 1 validation error, 2 failed property check.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np

from alphagraph import analysis, bench, io
from alphagraph._parallel import default_threads
from alphagraph.build import VamanaParams, build_slow, build_vamana
from alphagraph.core import Dataset, gen_random_points
from alphagraph.prune import rp_tuning
from alphagraph.search import brute_force_knn, mean_recall, search_batch

log = logging.getLogger("alphagraph")


class PropertyCheckFailed(Exception):
    pass


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True, default=_json_default))


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def _finite_or_str(x: float):
    return x if math.isfinite(x) else str(x)


def cmd_gen(args) -> None:
    pts = gen_random_points(args.n, args.dim, args.seed, args.dist)
    io.write_vecs(args.out, pts, "fvecs")
    _emit({"out": str(args.out), "n": args.n, "dim": args.dim})


def cmd_build(args) -> None:
    ds = io.read_vecs(args.data)
    t0 = time.perf_counter()
    if args.method == "slow":
        g = build_slow(ds, args.alpha, threads=args.threads)
    else:
        g = build_vamana(ds, VamanaParams(args.alpha, args.R, args.L_build, args.seed))
    seconds = time.perf_counter() - t0
    meta = {
        "method": args.method,
        "alpha": args.alpha,
        "R": args.R if args.method == "vamana" else None,
        "L_build": args.L_build if args.method == "vamana" else None,
        "seed": args.seed,
    }
    io.write_index(g, meta, args.out, ds)
    _emit({"build_seconds": seconds, "degree_stats": g.degree_stats().to_dict(), "out": str(args.out)})


def cmd_tune(args) -> None:
    ds = io.read_vecs(args.data)
    g = io.read_index(args.index, ds)
    before = g.edge_count()
    t0 = time.perf_counter()
    rp_tuning(g, ds, args.alpha2, sorted=not args.unsorted, shuffle_seed=args.shuffle_seed, threads=args.threads)
    seconds = time.perf_counter() - t0
    meta = io.read_meta(args.index)
    meta.update(
        {"method": "rp_tuning", "alpha": args.alpha2, "sorted": not args.unsorted,
         "base_alpha": meta.get("base_alpha", meta.get("alpha"))}
    )
    io.write_index(g, meta, args.out, ds)
    _emit(
        {
            "prune_seconds": seconds,
            "degree_stats": g.degree_stats().to_dict(),
            "edges_removed": before - g.edge_count(),
            "out": str(args.out),
        }
    )


def cmd_search(args) -> None:
    ds = io.read_vecs(args.data)
    g = io.read_index(args.index, ds)
    queries = io.read_queries(args.queries)
    ids, hops = search_batch(g, ds, queries, args.k, args.L)
    t0 = time.perf_counter()
    search_batch(g, ds, queries, args.k, args.L)
    seconds = time.perf_counter() - t0
    out = {"qps": len(queries) / max(seconds, 1e-9), "hops_mean": float(hops.mean()), "queries": len(queries)}
    if args.truth:
        truth = io.read_vecs(args.truth, "ivecs")
        if truth.shape[0] < len(queries) or truth.shape[1] < args.k:
            raise ValueError("ground truth has fewer rows or columns than needed")
        out["recall"] = mean_recall(ids, truth, args.k)
    _emit(out)


def cmd_audit(args) -> None:
    ds = io.read_vecs(args.data)
    g = io.read_index(args.index, ds)
    report = analysis.audit_reachability(g, ds, threads=args.threads)
    _emit(report.to_dict())
    if args.min_alpha is not None and report.alpha_star < args.min_alpha:
        raise PropertyCheckFailed(f"alpha_star {report.alpha_star} below required {args.min_alpha}")


def cmd_bounds(args) -> None:
    _emit(analysis.all_bounds(args.alpha1, args.alpha2))


def cmd_verify(args) -> None:
    rep = analysis.verify_lemma_a_optimum(args.alpha1, args.alpha2, args.samples, args.seed, args.tol)
    _emit(rep.to_dict())
    if not rep.passed:
        raise PropertyCheckFailed(f"max_found {rep.max_found} outside beta +/- {rep.tol}")


def cmd_truth(args) -> None:
    ds = io.read_vecs(args.data)
    queries = io.read_queries(args.queries)
    truth = brute_force_knn(ds, queries, args.k)
    io.write_vecs(args.out, truth.astype(np.int32), "ivecs")
    _emit({"out": str(args.out), "queries": len(queries), "k": args.k})


def cmd_experiment(args) -> None:
    plan = bench.TuningPlan.from_json(Path(args.plan).read_text())
    if args.queries:
        ds = io.read_vecs(args.data)
        queries = io.read_queries(args.queries, limit=plan.query_count)
    else:
        # hold out a seeded sample of the data as queries
        pts = io.read_vecs(args.data).points
        rng = np.random.default_rng(plan.seed)
        qi = rng.choice(pts.shape[0], size=plan.query_count, replace=False)
        mask = np.ones(pts.shape[0], dtype=bool)
        mask[qi] = False
        ds, queries = Dataset.from_points(pts[mask]), pts[qi]
    name = args.name or Path(args.data).stem
    records = bench.run_tuning_experiment(ds, queries, plan, dataset_name=name)
    if args.out_csv:
        bench.emit_report(records, args.out_csv, "csv")
    if args.out_json:
        bench.emit_report(records, args.out_json, "json")
    summary = bench.tuning_summary(records)
    summary["speedup"] = _finite_or_str(summary["speedup"])
    summary["records"] = len(records)
    _emit(summary)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="alphagraph", description=__doc__.splitlines()[0])
    ap.add_argument("--threads", type=int, default=None, help="worker threads (default: $ALPHAGRAPH_THREADS or 1)")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a synthetic dataset as fvecs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dist", default="gaussian", help="uniform_cube | gaussian | clustered(k)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("build", help="build an index")
    p.add_argument("--data", required=True)
    p.add_argument("--method", choices=("vamana", "slow"), default="vamana")
    p.add_argument("--alpha", type=float, default=1.2)
    p.add_argument("--R", type=int, default=70)
    p.add_argument("--L-build", dest="L_build", type=int, default=75)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("tune", help="RP-Tuning of an existing index")
    p.add_argument("--data", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--alpha2", type=float, required=True)
    p.add_argument("--unsorted", action="store_true")
    p.add_argument("--shuffle-seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("search", help="batch search with optional recall")
    p.add_argument("--data", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--L", type=int, default=50)
    p.add_argument("--truth", default=None)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("audit", help="exact reachability of an index")
    p.add_argument("--data", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--min-alpha", type=float, default=None, help="exit 2 if alpha_star falls below this")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("bounds", help="worst-case reachability after tuning")
    p.add_argument("--alpha1", type=float, required=True)
    p.add_argument("--alpha2", type=float, required=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("verify-lemma-a", help="randomised check of the sorted Euclidean optimum")
    p.add_argument("--alpha1", type=float, required=True)
    p.add_argument("--alpha2", type=float, required=True)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("experiment", help="prune-vs-rebuild tuning experiment")
    p.add_argument("--data", required=True)
    p.add_argument("--plan", required=True, help="JSON TuningPlan")
    p.add_argument("--queries", default=None, help="query fvecs; default holds out query_count data points")
    p.add_argument("--name", default=None)
    p.add_argument("--out-csv", default=None)
    p.add_argument("--out-json", default=None)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("truth", help="exact ground truth as ivecs")
    p.add_argument("--data", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--k", type=int, default=100)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_truth)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    if args.threads is None:
        args.threads = default_threads()
    try:
        args.func(args)
    except PropertyCheckFailed as exc:
        print(json.dumps({"error": str(exc), "kind": "property_check"}), file=sys.stderr)
        return 2
    except (ValueError, IndexError, OSError, TypeError, KeyError) as exc:
        print(json.dumps({"error": str(exc), "kind": type(exc).__name__}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
