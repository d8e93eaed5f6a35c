"""Tune-by-pruning versus rebuild: timing, recall/QPS sweeps and reports."""

from __future__ import annotations

import csv
import json
import logging
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from alphagraph.build import VamanaParams, build_vamana
from alphagraph.core import Dataset, gen_random_dataset
from alphagraph.graph import ProximityGraph
from alphagraph.prune import rp_tuning
from alphagraph.search import brute_force_knn, mean_recall, search_batch

log = logging.getLogger(__name__)

METHODS = ("base", "prune", "rebuild")
CSV_COLUMNS = (
    "dataset", "method", "alpha", "L", "recall", "qps",
    "avg_degree", "max_degree", "build_seconds", "hops_mean",
)


@dataclass
class BenchRecord:
    dataset_name: str
    method: str
    alpha: float
    L: int
    recall: float
    qps: float
    avg_degree: float
    max_degree: int
    build_seconds: float
    hops_mean: float

    def to_row(self) -> dict:
        row = asdict(self)
        row["dataset"] = row.pop("dataset_name")
        return {c: row[c] for c in CSV_COLUMNS}

    @classmethod
    def from_row(cls, row: dict) -> BenchRecord:
        types = {f.name: f.type for f in fields(cls)}
        conv = {"str": str, "float": float, "int": int}
        data = dict(row)
        data["dataset_name"] = data.pop("dataset")
        return cls(**{k: conv[types[k]](v) for k, v in data.items()})


@dataclass
class TuningPlan:
    base_alpha: float = 1.2
    target_alphas: list[float] = field(default_factory=lambda: [1.1, 1.05, 1.01])
    vamana: VamanaParams = field(default_factory=lambda: VamanaParams(1.2, 32, 40, 0))
    L_sweep: list[int] = field(default_factory=lambda: [100, 150, 200, 300])
    k: int = 100
    query_count: int = 500
    seed: int = 0
    qps_repeats: int = 5

    def __post_init__(self):
        if isinstance(self.vamana, dict):
            self.vamana = VamanaParams(**self.vamana)
        self.target_alphas = sorted((float(a) for a in self.target_alphas), reverse=True)
        if any(a >= self.base_alpha for a in self.target_alphas):
            raise ValueError("every target alpha must be below the base alpha")
        if not self.L_sweep or self.k > min(self.L_sweep):
            raise ValueError("k must not exceed the smallest L in the sweep")
        if self.query_count < 1 or self.qps_repeats < 1:
            raise ValueError("query_count and qps_repeats must be positive")

    @classmethod
    def from_json(cls, text: str) -> TuningPlan:
        return cls(**json.loads(text))

    def to_dict(self) -> dict:
        return asdict(self)


def measure(g: ProximityGraph, ds: Dataset, queries, truth, k: int, L: int, repeats: int = 5):
    """One untimed warm-up pass, then the best of ``repeats`` timed passes.

    Returns ``(recall, qps, hops_mean)``.
    """
    ids, hops = search_batch(g, ds, queries, k, L)
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        search_batch(g, ds, queries, k, L)
        best = min(best, time.perf_counter() - t0)
    m = len(queries)
    return mean_recall(ids, truth, k), m / max(best, 1e-9), float(hops.mean())


def _sweep(name, method, alpha, g, ds, queries, truth, plan, seconds) -> list[BenchRecord]:
    stats = g.degree_stats()
    out = []
    for L in plan.L_sweep:
        recall, qps, hops = measure(g, ds, queries, truth, plan.k, L, plan.qps_repeats)
        out.append(
            BenchRecord(name, method, alpha, L, recall, qps, stats.avg_out_degree,
                        stats.max_out_degree, seconds, hops)
        )
        log.info("%s alpha=%.3g L=%d recall=%.4f qps=%.0f", method, alpha, L, recall, qps)
    return out


def warm_up() -> None:
    """Trigger JIT compilation so timings exclude it."""
    ds = gen_random_dataset(64, 2, seed=0)
    g = build_vamana(ds, VamanaParams(1.2, 4, 8, 0))
    rp_tuning(g, ds, 1.1)
    search_batch(g, ds, ds.points[:2], 1, 4)


def run_tuning_experiment(
    ds: Dataset,
    queries,
    plan: TuningPlan,
    dataset_name: str = "dataset",
    graphs: dict | None = None,
) -> list[BenchRecord]:
    """Base build, then per target alpha a timed RP-Tuning copy and a timed rebuild, each swept over L.

    Pass a dict as ``graphs`` to receive the built indices keyed by (method, alpha).
    """
    queries = np.asarray(queries, dtype=np.float64)[: plan.query_count]
    truth = brute_force_knn(ds, queries, plan.k)
    warm_up()
    base_params = VamanaParams(plan.base_alpha, plan.vamana.R, plan.vamana.L_build, plan.vamana.seed)
    t0 = time.perf_counter()
    base = build_vamana(ds, base_params)
    base_seconds = time.perf_counter() - t0
    if graphs is not None:
        graphs[("base", plan.base_alpha)] = base
    records = _sweep(dataset_name, "base", plan.base_alpha, base, ds, queries, truth, plan, base_seconds)
    for a2 in plan.target_alphas:
        g = base.copy()
        t0 = time.perf_counter()
        rp_tuning(g, ds, a2)
        prune_seconds = time.perf_counter() - t0
        records += _sweep(dataset_name, "prune", a2, g, ds, queries, truth, plan, prune_seconds)
        t0 = time.perf_counter()
        r = build_vamana(ds, VamanaParams(a2, plan.vamana.R, plan.vamana.L_build, plan.vamana.seed))
        rebuild_seconds = time.perf_counter() - t0
        records += _sweep(dataset_name, "rebuild", a2, r, ds, queries, truth, plan, rebuild_seconds)
        if graphs is not None:
            graphs[("prune", a2)] = g
            graphs[("rebuild", a2)] = r
    return records


def tuning_summary(records: list[BenchRecord]) -> dict:
    """Per-alpha and total rebuild/prune seconds with the overall speedup."""
    per = {}
    for r in records:
        if r.method in ("prune", "rebuild"):
            per.setdefault(r.alpha, {})[r.method] = r.build_seconds
    total_prune = sum(v.get("prune", 0.0) for v in per.values())
    total_rebuild = sum(v.get("rebuild", 0.0) for v in per.values())
    return {
        "per_alpha": {str(a): v for a, v in sorted(per.items(), reverse=True)},
        "total_prune_seconds": total_prune,
        "total_rebuild_seconds": total_rebuild,
        "speedup": total_rebuild / total_prune if total_prune > 0 else float("inf"),
    }


def _dominates(a: BenchRecord, b: BenchRecord) -> bool:
    return a.recall >= b.recall and a.qps >= b.qps and (a.recall > b.recall or a.qps > b.qps)


def pareto_frontier(records: list[BenchRecord], methods=METHODS) -> list[BenchRecord]:
    """Non-dominated records (maximise recall and QPS) among ``methods``, by recall descending."""
    if not records:
        raise ValueError("no records")
    pool = [r for r in records if r.method in set(methods)]
    front = [r for r in pool if not any(_dominates(o, r) for o in pool)]
    return sorted(front, key=lambda r: (-r.recall, -r.qps))


def emit_report(records: list[BenchRecord], path, format: str = "csv") -> None:
    path = Path(path)
    rows = [r.to_row() for r in records]
    if format == "csv":
        with path.open("w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
    elif format == "json":
        path.write_text(json.dumps(rows, indent=2) + "\n")
    else:
        raise ValueError(f"unknown report format {format!r}")


def load_report(path) -> list[BenchRecord]:
    path = Path(path)
    if path.suffix == ".json":
        rows = json.loads(path.read_text())
    else:
        with path.open(newline="") as fh:
            rows = list(csv.DictReader(fh))
    return [BenchRecord.from_row(r) for r in rows]
