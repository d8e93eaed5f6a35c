import csv
import json

import numpy as np
import pytest

from alphagraph import VamanaParams, gen_random_dataset
from alphagraph.bench import (
    CSV_COLUMNS,
    BenchRecord,
    TuningPlan,
    emit_report,
    load_report,
    pareto_frontier,
    run_tuning_experiment,
    tuning_summary,
)


def rec(recall, qps, method="base", alpha=1.2, L=100):
    return BenchRecord("toy", method, alpha, L, recall, qps, 10.0, 20, 0.5, 12.0)


class TestPareto:
    def test_single(self):
        r = rec(0.9, 100)
        assert pareto_frontier([r]) == [r]

    def test_dominated(self):
        a, b = rec(0.9, 100), rec(0.8, 50)
        assert pareto_frontier([b, a]) == [a]

    def test_three(self):
        a, b, c = rec(0.95, 50), rec(0.90, 80), rec(0.85, 70)
        assert pareto_frontier([c, b, a]) == [a, b]

    def test_ties_kept(self):
        a, b = rec(0.9, 100, L=1), rec(0.9, 100, L=2)
        assert len(pareto_frontier([a, b])) == 2

    def test_method_filter(self):
        a, b = rec(0.9, 100, method="rebuild"), rec(0.8, 50, method="prune")
        assert pareto_frontier([a, b], {"prune"}) == [b]

    def test_empty(self):
        with pytest.raises(ValueError):
            pareto_frontier([])


class TestReport:
    def test_empty_csv(self, tmp_path):
        f = tmp_path / "r.csv"
        emit_report([], f, "csv")
        assert f.read_text() == ",".join(CSV_COLUMNS) + "\n"

    def test_csv_rows(self, tmp_path):
        f = tmp_path / "r.csv"
        recs = [rec(0.5, 1234.5), rec(0.7, 99.0, "prune", 1.05, 200)]
        emit_report(recs, f, "csv")
        lines = f.read_text().splitlines()
        assert len(lines) == 3 and lines[0] == "dataset,method,alpha,L,recall,qps,avg_degree,max_degree,build_seconds,hops_mean"
        row = next(csv.DictReader(f.open()))
        assert row["qps"] == "1234.5"

    def test_json_round_trip(self, tmp_path):
        f = tmp_path / "r.json"
        r = rec(0.75, 321.0, "rebuild", 1.01, 150)
        emit_report([r], f, "json")
        data = json.loads(f.read_text())
        assert list(data[0]) == list(CSV_COLUMNS)
        assert load_report(f) == [r]

    def test_csv_round_trip(self, tmp_path):
        f = tmp_path / "r.csv"
        recs = [rec(0.5, 1234.5), rec(0.7, 99.0, "prune", 1.05, 200)]
        emit_report(recs, f)
        assert load_report(f) == recs

    def test_bad_format(self, tmp_path):
        with pytest.raises(ValueError):
            emit_report([], tmp_path / "x", "xml")


class TestPlan:
    def test_defaults(self):
        p = TuningPlan()
        assert p.target_alphas == [1.1, 1.05, 1.01] and p.k <= min(p.L_sweep)

    def test_sorted_descending(self):
        assert TuningPlan(target_alphas=[1.01, 1.1]).target_alphas == [1.1, 1.01]

    def test_target_above_base(self):
        with pytest.raises(ValueError):
            TuningPlan(base_alpha=1.2, target_alphas=[1.3])

    def test_k_above_sweep(self):
        with pytest.raises(ValueError):
            TuningPlan(k=100, L_sweep=[50])

    def test_json(self):
        p = TuningPlan(vamana=VamanaParams(1.2, 8, 16, 3), L_sweep=[10, 20], k=10)
        q = TuningPlan.from_json(json.dumps(p.to_dict()))
        assert q == p


@pytest.fixture(scope="module")
def small_run():
    ds = gen_random_dataset(1500, 8, seed=4)
    queries = np.random.default_rng(5).standard_normal((60, 8))
    plan = TuningPlan(1.2, [1.1, 1.01], VamanaParams(1.2, 16, 24, 0), [10, 20, 40], 10, 60, 0, 1)
    return ds, queries, plan, run_tuning_experiment(ds, queries, plan, "small")


class TestExperiment:
    def test_base_only(self):
        ds = gen_random_dataset(300, 4, seed=1)
        q = np.random.default_rng(0).standard_normal((10, 4))
        plan = TuningPlan(1.2, [], VamanaParams(1.2, 8, 16, 0), [10, 20], 5, 10, 0, 1)
        recs = run_tuning_experiment(ds, q, plan)
        assert {r.method for r in recs} == {"base"} and len(recs) == 2

    def test_record_shape(self, small_run):
        _, _, plan, recs = small_run
        assert len(recs) == len(plan.L_sweep) * (1 + 2 * len(plan.target_alphas))
        for r in recs:
            assert 0 <= r.recall <= 1 and r.qps > 0 and r.build_seconds >= 0

    def test_recall_monotone_in_L(self, small_run):
        _, _, _, recs = small_run
        for method in ("base", "prune"):
            groups = {}
            for r in recs:
                if r.method == method:
                    groups.setdefault(r.alpha, []).append((r.L, r.recall))
            for vals in groups.values():
                rec_by_L = [v for _, v in sorted(vals)]
                assert rec_by_L == sorted(rec_by_L)

    def test_recall_reproducible(self, small_run):
        ds, queries, plan, recs = small_run
        again = run_tuning_experiment(ds, queries, plan, "small")
        assert [r.recall for r in again] == [r.recall for r in recs]
        assert [r.avg_degree for r in again] == [r.avg_degree for r in recs]

    def test_degrees_fall(self, small_run):
        _, _, _, recs = small_run
        deg = {(r.method, r.alpha): r.avg_degree for r in recs}
        assert deg[("prune", 1.01)] < deg[("prune", 1.1)] < deg[("base", 1.2)]

    def test_summary(self, small_run):
        _, _, _, recs = small_run
        s = tuning_summary(recs)
        assert set(s["per_alpha"]) == {"1.1", "1.01"}
        assert s["speedup"] == pytest.approx(s["total_rebuild_seconds"] / s["total_prune_seconds"])
