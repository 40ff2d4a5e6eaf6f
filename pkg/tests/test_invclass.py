import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fluidrec import mlp
from fluidrec.errors import DimensionMismatch, NegativeBudget
from fluidrec.ife import IfeConfig, IfeModel
from fluidrec.invclass import (
    OptimizeConfig,
    RecommendationRequest,
    composed_gradient,
    composed_objective,
    derive_partition,
    optimize_recommendation,
    project_feasible,
    request_from_json,
    request_to_json,
)
from fluidrec.models import ClassifierConfig, ClassifierModel


def _models(theta_u, theta_i, theta_d, bias, H_matrix=None, H_bias=None):
    """Logistic classifier over [U, I, D] feature order plus a linear
    estimator, both built directly from coefficients."""
    n_u, n_i, n_d = len(theta_u), len(theta_i), len(theta_d)
    theta = np.concatenate([theta_u, theta_i, theta_d])[:, None]
    names = tuple(
        [f"u{k}" for k in range(n_u)] + [f"i{k}" for k in range(n_i)] + [f"d{k}" for k in range(n_d)]
    )
    clf = ClassifierModel(
        mlp.Network([theta], [np.array([bias])]),
        ClassifierConfig("logistic", 0, 1, 0.01, 0),
        names,
    )
    if H_matrix is None:
        H_matrix = np.zeros((n_u + n_d, n_i))
    if H_bias is None:
        H_bias = np.zeros(n_i)
    h = IfeModel(
        mlp.Network([np.asarray(H_matrix, dtype=float)], [np.asarray(H_bias, dtype=float)]),
        IfeConfig("linear", 0, 1, 0.01, 0),
        tuple(f"u{k}" for k in range(n_u)),
        tuple(f"d{k}" for k in range(n_d)),
        tuple(f"i{k}" for k in range(n_i)),
    )
    return clf, h


class TestProjection:
    def test_feasible_point_unchanged(self, rng):
        x_d = rng.uniform(0.2, 0.8, size=5)
        v = x_d + rng.uniform(-0.05, 0.05, size=5)
        out = project_feasible(v, x_d, b=1.0)
        np.testing.assert_array_equal(out, v)

    def test_zero_budget_returns_center(self, rng):
        x_d = rng.uniform(size=6)
        v = rng.uniform(-1, 2, size=6)
        out = project_feasible(v, x_d, b=0.0)
        np.testing.assert_array_equal(out, x_d)

    def test_negative_budget(self):
        with pytest.raises(NegativeBudget):
            project_feasible(np.zeros(2), np.zeros(2), -0.1)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            project_feasible(np.zeros(3), np.zeros(2), 0.5)

    def test_matches_classical_l1_projection_when_box_inactive(self, rng):
        # center at 0.5, small budget, interior v: the box never binds, so the
        # classical sorted soft-threshold projection is an independent oracle
        for _ in range(50):
            x_d = np.full(6, 0.5)
            v = rng.uniform(0.35, 0.65, size=6)
            b = 0.08
            got = project_feasible(v, x_d, b)
            diff = v - x_d
            if np.abs(diff).sum() <= b:
                expected = v
            else:
                a = np.sort(np.abs(diff))[::-1]
                csum = np.cumsum(a)
                ks = np.arange(1, len(a) + 1)
                valid = a - (csum - b) / ks > 0
                k = int(ks[valid].max())
                lam = (csum[k - 1] - b) / k
                expected = x_d + np.sign(diff) * np.maximum(np.abs(diff) - lam, 0.0)
            assert np.abs(got - expected).max() < 1e-8

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 100_000), st.integers(2, 6), st.floats(0.01, 2.0))
    def test_feasibility_and_idempotence(self, seed, dim, b):
        rng = np.random.default_rng(seed)
        x_d = rng.uniform(size=dim)
        v = rng.uniform(-1.5, 2.5, size=dim)
        w = project_feasible(v, x_d, b)
        assert np.all(w >= 0.0) and np.all(w <= 1.0)
        assert np.abs(w - x_d).sum() <= b + 1e-8
        w2 = project_feasible(w, x_d, b)
        assert np.abs(w2 - w).max() < 1e-10


class TestOptimize:
    def test_budget_zero_identity(self, rng):
        clf, h = _models(
            theta_u=rng.normal(size=2),
            theta_i=rng.normal(size=3),
            theta_d=rng.normal(size=4),
            bias=0.2,
            H_matrix=rng.normal(scale=0.2, size=(6, 3)),
        )
        req = RecommendationRequest(
            x_u=rng.uniform(size=2),
            x_i_observed=rng.uniform(size=3),
            x_d_physician=rng.uniform(size=4),
            budget=0.0,
        )
        res = optimize_recommendation(clf, h, req, OptimizeConfig(budget=0.0))
        np.testing.assert_array_equal(res.z, np.zeros(4))
        np.testing.assert_array_equal(res.x_d_optimized, req.x_d_physician)
        assert res.prob_after == res.prob_start
        expected = composed_objective(clf, h, req.x_u, req.x_d_physician)
        assert res.prob_after == pytest.approx(expected, abs=1e-12)
        assert res.converged

    def test_one_dimensional_analytic_optimum(self):
        # positive coefficient on the single direct feature, inert estimator:
        # optimum slides the coordinate down by the full budget
        clf, h = _models(
            theta_u=np.array([0.5]),
            theta_i=np.array([0.0]),
            theta_d=np.array([3.0]),
            bias=-0.4,
        )
        x_u = np.array([0.6])
        start = 0.7
        budget = 0.4
        req = RecommendationRequest(x_u, np.array([0.5]), np.array([start]), budget)
        res = optimize_recommendation(clf, h, req, OptimizeConfig(budget=budget))
        x_opt = max(0.0, start - budget)
        analytic = 1.0 / (1.0 + np.exp(-(-0.4 + 0.5 * 0.6 + 3.0 * x_opt)))
        assert abs(res.prob_after - analytic) < 1e-6
        assert abs(res.x_d_optimized[0] - x_opt) < 1e-6

    def test_two_dimensional_grid_oracle(self):
        # linear f and H chosen by hand; exhaustive grid over the feasible
        # region certifies the PGD solution
        clf, h = _models(
            theta_u=np.array([0.3]),
            theta_i=np.array([1.2, -0.8]),
            theta_d=np.array([1.5, -2.0]),
            bias=-0.3,
            H_matrix=np.array([[0.2, -0.1], [0.4, 0.3], [-0.2, 0.5]]),
            H_bias=np.array([0.1, 0.2]),
        )
        x_u = np.array([0.4])
        x_d0 = np.array([0.5, 0.45])
        budget = 0.35
        req = RecommendationRequest(x_u, np.array([0.5, 0.5]), x_d0, budget)
        res = optimize_recommendation(clf, h, req, OptimizeConfig(budget=budget, max_iters=500))

        grid = np.linspace(0.0, 1.0, 1001)
        G1, G2 = np.meshgrid(grid, grid, indexing="ij")
        mask = np.abs(G1 - x_d0[0]) + np.abs(G2 - x_d0[1]) <= budget
        pts = np.stack([G1[mask], G2[mask]], axis=1)
        ud = np.hstack([np.full((len(pts), 1), x_u[0]), pts])
        xi = np.clip(ud @ h.net.weights[0] + h.net.biases[0], 0.0, 1.0)
        full = np.hstack([np.full((len(pts), 1), x_u[0]), xi, pts])
        logits = full @ clf.net.weights[0][:, 0] + clf.net.biases[0][0]
        best_grid = float(1.0 / (1.0 + np.exp(-logits)).min())
        assert res.prob_after <= best_grid + 1e-4

    def test_best_iterate_never_worse_than_start(self, classifier, ife_model, splits, rng):
        _, _, test_s, _ = splits
        part = derive_partition(classifier, ife_model)
        for r in rng.integers(0, test_s.n, size=12):
            x = test_s.X[r]
            req = RecommendationRequest(
                x[list(part.u_indices)],
                x[list(part.i_indices)],
                x[list(part.d_indices)],
                budget=float(rng.uniform(0.05, 1.0)),
            )
            res = optimize_recommendation(classifier, ife_model, req, OptimizeConfig())
            assert res.prob_after <= res.prob_start + 1e-12
            assert np.abs(res.z).sum() <= req.budget + 1e-8
            assert np.all(res.x_d_optimized >= 0) and np.all(res.x_d_optimized <= 1)

    def test_budget_monotonicity_small(self, classifier, ife_model, splits):
        _, _, test_s, _ = splits
        part = derive_partition(classifier, ife_model)
        budgets = (0.1, 0.3, 0.5, 0.8, 1.0)
        for r in range(0, 30, 5):
            x = test_s.X[r]
            prev = None
            for b in budgets:
                req = RecommendationRequest(
                    x[list(part.u_indices)], x[list(part.i_indices)], x[list(part.d_indices)], b
                )
                res = optimize_recommendation(classifier, ife_model, req, OptimizeConfig())
                if prev is not None:
                    assert res.prob_after <= prev + 1e-6
                prev = res.prob_after

    def test_request_validation(self, rng):
        with pytest.raises(NegativeBudget):
            RecommendationRequest(np.zeros(1), np.zeros(1), np.zeros(1), -0.5)
        with pytest.raises(ValueError):
            RecommendationRequest(np.zeros(1), np.zeros(1), np.array([1.4]), 0.5)

    def test_dimension_mismatch(self, classifier, ife_model):
        req = RecommendationRequest(np.zeros(2), np.zeros(3), np.zeros(4), 0.5)
        with pytest.raises(DimensionMismatch):
            optimize_recommendation(classifier, ife_model, req, OptimizeConfig())

    def test_result_json_shape(self, classifier, ife_model, splits):
        _, _, test_s, _ = splits
        part = derive_partition(classifier, ife_model)
        x = test_s.X[0]
        req = RecommendationRequest(
            x[list(part.u_indices)], x[list(part.i_indices)], x[list(part.d_indices)], 0.3
        )
        res = optimize_recommendation(classifier, ife_model, req, OptimizeConfig())
        doc = res.to_json()
        assert set(doc) == {
            "x_d_optimized", "z", "x_i_predicted", "prob_before", "prob_after",
            "converged", "iters_used", "trajectory",
        }
        short = res.to_json(include_trajectory=False)
        assert "trajectory" not in short
        back = request_from_json(request_to_json(req))
        np.testing.assert_array_equal(back.x_d_physician, req.x_d_physician)


class TestComposedGradient:
    def test_matches_finite_differences(self, rng):
        h_step = 1e-5
        checked = 0
        while checked < 30:
            n_u, n_i, n_d = 2, 3, 3
            rng_net = np.random.default_rng(rng.integers(1_000_000))
            cnet = mlp.init_network(rng_net, n_u + n_i + n_d, 4, 1)
            hnet = mlp.init_network(rng_net, n_u + n_d, 5, n_i)
            clf = ClassifierModel(
                cnet, ClassifierConfig("feedforward", 4, 1, 0.01, 0),
                tuple([f"u{k}" for k in range(n_u)] + [f"i{k}" for k in range(n_i)] + [f"d{k}" for k in range(n_d)]),
            )
            hm = IfeModel(
                hnet, IfeConfig("feedforward", 5, 1, 0.01, 0),
                tuple(f"u{k}" for k in range(n_u)),
                tuple(f"d{k}" for k in range(n_d)),
                tuple(f"i{k}" for k in range(n_i)),
            )
            x_u = rng.uniform(0.1, 0.9, size=n_u)
            x_d = rng.uniform(0.1, 0.9, size=n_d)
            hz1 = np.concatenate([x_u, x_d]) @ hnet.weights[0] + hnet.biases[0]
            raw_i = np.maximum(hz1, 0) @ hnet.weights[1] + hnet.biases[1]
            # keep clear of the estimator clamp boundary and all ReLU kinks
            if np.any(np.abs(raw_i) < 1e-3) or np.any(np.abs(raw_i - 1.0) < 1e-3):
                continue
            if np.any(np.abs(hz1) < 1e-3):
                continue
            full = np.empty(n_u + n_i + n_d)
            full[:n_u] = x_u
            full[n_u : n_u + n_i] = np.clip(raw_i, 0, 1)
            full[n_u + n_i :] = x_d
            if np.any(np.abs(full @ cnet.weights[0] + cnet.biases[0]) < 1e-3):
                continue
            val, grad = composed_gradient(clf, hm, x_u, x_d)
            ok = True
            for k in range(n_d):
                e = np.zeros(n_d)
                e[k] = h_step
                fd = (
                    composed_objective(clf, hm, x_u, x_d + e)
                    - composed_objective(clf, hm, x_u, x_d - e)
                ) / (2 * h_step)
                denom = max(abs(fd), abs(grad[k]), 1e-8)
                if abs(grad[k] - fd) / denom >= 1e-4:
                    ok = False
            assert ok
            checked += 1
