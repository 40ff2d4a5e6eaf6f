import numpy as np
import pytest

from fluidrec.experiment import (
    DEFAULT_BUDGETS,
    _aggregate,
    optimize_instances,
    run_budget_sweep,
    run_robustness,
    summarize_avg_recs,
    write_robustness_csv,
    write_sweep_csv,
)
from fluidrec.invclass import OptimizeConfig, RecommendationResult


@pytest.fixture(scope="module")
def small_test(splits):
    _, _, test_s, _ = splits
    return test_s.take(np.arange(60))


def test_default_budget_grid():
    assert DEFAULT_BUDGETS == (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)


def test_budget_zero_prepended_equals_start(classifier, ife_model, small_test):
    budgets = (0.0, 0.2)
    report = run_budget_sweep(classifier, ife_model, small_test, budgets, OptimizeConfig())
    results0 = optimize_instances(classifier, ife_model, small_test, 0.0, OptimizeConfig())
    starts = np.array([r.prob_start for r in results0])
    assert report.rows[0].mean_prob == starts.mean()
    assert report.rows[0].mean_rel_improvement == 0.0
    assert report.rows[1].mean_prob <= report.rows[0].mean_prob


def test_per_instance_nesting(classifier, ife_model, small_test):
    budgets = (0.1, 0.4, 0.8)
    objs = []
    for b in budgets:
        res = optimize_instances(classifier, ife_model, small_test, b, OptimizeConfig())
        objs.append([r.prob_after for r in res])
    objs = np.array(objs)
    assert np.all(np.diff(objs, axis=0) <= 1e-6)


def test_workers_do_not_change_report(classifier, ife_model, small_test, tmp_path):
    budgets = (0.3, 0.7)
    rep1 = run_budget_sweep(classifier, ife_model, small_test, budgets, OptimizeConfig(), workers=1)
    rep2 = run_budget_sweep(classifier, ife_model, small_test, budgets, OptimizeConfig(), workers=3)
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    write_sweep_csv(rep1, p1)
    write_sweep_csv(rep2, p2)
    assert p1.read_bytes() == p2.read_bytes()


def _fake_result(z, prob_before, prob_start, prob_after):
    z = np.asarray(z, dtype=float)
    return RecommendationResult(
        x_d_optimized=z.copy(),
        z=z,
        x_i_predicted=np.zeros(1),
        prob_before=prob_before,
        prob_after=prob_after,
        trajectory=[(0, prob_start), (1, prob_after)],
        converged=True,
        iters_used=1,
    )


class TestAvgRecs:
    def test_all_zero_deltas(self):
        results = {0.0: [_fake_result([0, 0], 0.6, 0.5, 0.5) for _ in range(4)]}
        report = summarize_avg_recs(results, ("a", "b"))
        assert all(r.mean_delta == 0.0 for r in report.rows)

    def test_hand_built_fixture(self):
        results = {
            0.3: [
                _fake_result([0.1, -0.2], 0.8, 0.7, 0.5),   # positive stratum
                _fake_result([0.3, 0.0], 0.9, 0.8, 0.6),    # positive stratum
                _fake_result([-0.1, 0.1], 0.2, 0.3, 0.1),   # negative stratum
                _fake_result([0.0, 0.3], 0.4, 0.35, 0.2),   # negative stratum
            ]
        }
        report = summarize_avg_recs(results, ("a", "b"), threshold=0.5)
        rows = {(r.feature, r.stratum): r for r in report.rows}
        assert rows[("a", "positive")].mean_delta == pytest.approx(0.2)
        assert rows[("b", "positive")].mean_delta == pytest.approx(-0.1)
        assert rows[("a", "negative")].mean_delta == pytest.approx(-0.05)
        assert rows[("b", "negative")].mean_delta == pytest.approx(0.2)
        assert all(r.n == 2 for r in report.rows)

    def test_strata_partition_instances(self, classifier, ife_model, small_test):
        results = {0.5: optimize_instances(classifier, ife_model, small_test, 0.5, OptimizeConfig())}
        report = summarize_avg_recs(results, ife_model.d_names)
        by_budget = {}
        seen = set()
        for r in report.rows:
            if (r.budget, r.stratum) not in seen:
                seen.add((r.budget, r.stratum))
                by_budget[r.budget] = by_budget.get(r.budget, 0) + r.n
        assert by_budget[0.5] == small_test.n

    def test_empty_stratum_omitted(self):
        results = {0.1: [_fake_result([0.1], 0.9, 0.8, 0.7)]}  # positive only
        report = summarize_avg_recs(results, ("a",))
        strata = {r.stratum for r in report.rows}
        assert strata == {"positive"}

    def test_empty_results_rejected(self):
        with pytest.raises(ValueError):
            summarize_avg_recs({}, ("a",))


class TestRobustness:
    def test_degenerate_init_range_deterministic(self, classifier, ife_model, small_test):
        rep = run_robustness(
            classifier, ife_model, small_test, (0.2,), OptimizeConfig(),
            init_range=(0.05, 0.05), seed=1,
        )
        rep2 = run_robustness(
            classifier, ife_model, small_test, (0.2,), OptimizeConfig(),
            init_range=(0.05, 0.05), seed=99,  # seed irrelevant for zero-width draws
        )
        assert rep.random.rows[0] == rep2.random.rows[0]

    def test_same_seed_identical(self, classifier, ife_model, small_test, tmp_path):
        kw = dict(budgets=(0.1, 0.5), cfg=OptimizeConfig(), init_range=(0.0, 0.1), seed=5)
        rep1 = run_robustness(classifier, ife_model, small_test, **kw)
        rep2 = run_robustness(classifier, ife_model, small_test, **kw)
        p1, p2 = tmp_path / "r1.csv", tmp_path / "r2.csv"
        write_robustness_csv(rep1, p1)
        write_robustness_csv(rep2, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_arms_share_instances_and_budgets(self, classifier, ife_model, small_test):
        rep = run_robustness(classifier, ife_model, small_test, (0.1, 0.9), OptimizeConfig(), seed=0)
        assert [r.budget for r in rep.hitl.rows] == [r.budget for r in rep.random.rows]
        assert rep.hitl.n_instances == rep.random.n_instances == small_test.n


def test_aggregate_matches_manual():
    results = [
        _fake_result([0.0], 0.5, 0.5, 0.25),
        _fake_result([0.0], 0.8, 0.8, 0.6),
    ]
    row = _aggregate(0.4, results)
    probs = np.array([0.25, 0.6])
    starts = np.array([0.5, 0.8])
    assert row.mean_prob == probs.mean()
    assert row.std_prob == probs.std()
    rel = (starts - probs) / starts
    assert row.mean_rel_improvement == rel.mean()
    assert row.std_rel_improvement == rel.std()
