"""Budget-constrained treatment refinement by projected gradient descent.

Starting from the prescriber-entered direct-feature vector, each step follows
the full chain-rule gradient of predicted mortality (direct path plus the
indirect path through the feature estimator) and projects back onto the
feasible region: the L1 ball of radius `budget` centered at the prescription,
intersected with the unit box. The best iterate seen is returned, so the
result is never worse than the starting point's objective.

The PGD core is written over blocks of instances (a single request is a block
of one), which keeps sweeps over whole test cohorts fast without a second
code path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import mlp
from .dataset import FeaturePartition
from .errors import DimensionMismatch, NegativeBudget, NonFiniteGradient
from .ife import IfeModel
from .models import PROBA_EPS, ClassifierModel

BISECT_TOL = 1e-10
BISECT_MAX_ITERS = 200


# -- projection ---------------------------------------------------------------

def project_feasible(v: np.ndarray, x_d: np.ndarray, b: float) -> np.ndarray:
    """Euclidean projection of v onto {w : ||w - x_d||_1 <= b, 0 <= w <= 1}.

    Clip to the box first; if that already satisfies the budget it is the
    projection. Otherwise solve for the Lagrange multiplier of the L1
    constraint by bisection: each coordinate is shrunk toward its center by
    lambda (soft threshold centered at x_d) and clamped to [0,1], and the
    budget excess is continuous and non-increasing in lambda.
    """
    v = np.asarray(v, dtype=float).ravel()
    x_d = np.asarray(x_d, dtype=float).ravel()
    if v.shape != x_d.shape:
        raise DimensionMismatch(f"v has {v.shape}, center has {x_d.shape}")
    return _project_block(v[None, :], x_d[None, :], b)[0]


def _project_block(V: np.ndarray, C: np.ndarray, b: float) -> np.ndarray:
    """Row-wise projection; V and C are (m, k), centers already in the box."""
    if b < 0:
        raise NegativeBudget(f"budget {b} is negative")
    if b == 0:
        return C.copy()
    diff = V - C
    a = np.abs(diff)
    sign = np.sign(diff)
    # furthest each coordinate can move from its center before the box binds
    cap = np.where(diff > 0, 1.0 - C, C)
    inside = np.minimum(a, cap)  # contribution of the plain box clip
    W = C + sign * inside
    need = inside.sum(axis=1) > b
    if not need.any():
        return W

    an, capn, signn, cn = a[need], cap[need], sign[need], C[need]
    lo = np.zeros(an.shape[0])
    hi = an.max(axis=1)
    for _ in range(BISECT_MAX_ITERS):
        mid = 0.5 * (lo + hi)
        excess = np.minimum(np.maximum(an - mid[:, None], 0.0), capn).sum(axis=1) - b
        over = excess > 0
        lo = np.where(over, mid, lo)
        hi = np.where(over, hi, mid)
        if np.all(hi - lo < BISECT_TOL):
            break
    W[need] = cn + signn * np.minimum(np.maximum(an - hi[:, None], 0.0), capn)
    return W


# -- configuration and request/result types ------------------------------------

@dataclass(frozen=True)
class OptimizeConfig:
    budget: float = 0.5
    step_size: float = 0.05
    max_iters: int = 200
    convergence_tol: float = 1e-6
    seed: int = 0  # reserved for randomized tie-breaking; unused by default

    def __post_init__(self):
        if self.budget < 0:
            raise NegativeBudget(f"budget {self.budget} is negative")
        if self.step_size <= 0 or self.max_iters < 1 or self.convergence_tol <= 0:
            raise ValueError("step_size, max_iters, convergence_tol must be positive")


@dataclass(frozen=True)
class RecommendationRequest:
    x_u: np.ndarray
    x_i_observed: np.ndarray
    x_d_physician: np.ndarray
    budget: float

    def __post_init__(self):
        object.__setattr__(self, "x_u", np.asarray(self.x_u, dtype=float).ravel())
        object.__setattr__(self, "x_i_observed", np.asarray(self.x_i_observed, dtype=float).ravel())
        object.__setattr__(self, "x_d_physician", np.asarray(self.x_d_physician, dtype=float).ravel())
        if self.budget < 0:
            raise NegativeBudget(f"budget {self.budget} is negative")
        if (self.x_d_physician < 0).any() or (self.x_d_physician > 1).any():
            raise ValueError("physician direct features must lie in [0,1]")


@dataclass
class RecommendationResult:
    x_d_optimized: np.ndarray
    z: np.ndarray
    x_i_predicted: np.ndarray
    prob_before: float
    prob_after: float
    trajectory: list[tuple[int, float]]
    converged: bool
    iters_used: int

    @property
    def prob_start(self) -> float:
        """Objective at the physician point with estimated indirect features
        (the b = 0 reachable value; prob_after never exceeds it)."""
        return self.trajectory[0][1]

    def to_json(self, include_trajectory: bool = True) -> dict:
        doc = {
            "x_d_optimized": [float(v) for v in self.x_d_optimized],
            "z": [float(v) for v in self.z],
            "x_i_predicted": [float(v) for v in self.x_i_predicted],
            "prob_before": self.prob_before,
            "prob_after": self.prob_after,
            "converged": self.converged,
            "iters_used": self.iters_used,
        }
        if include_trajectory:
            doc["trajectory"] = [[int(t), float(o)] for t, o in self.trajectory]
        return doc


def derive_partition(f: ClassifierModel, h: IfeModel) -> FeaturePartition:
    """Block index sets implied by the classifier's feature order and the
    estimator's input/output name maps; raises if they are inconsistent."""
    pos = {n: j for j, n in enumerate(f.feature_names)}
    for name in (*h.u_names, *h.i_names, *h.d_names):
        if name not in pos:
            raise DimensionMismatch(f"estimator feature {name!r} unknown to classifier")
    try:
        return FeaturePartition(
            tuple(pos[n] for n in h.u_names),
            tuple(pos[n] for n in h.i_names),
            tuple(pos[n] for n in h.d_names),
        )
    except ValueError as exc:
        raise DimensionMismatch(str(exc)) from None


# -- composed objective ---------------------------------------------------------

class _Objective:
    """Batched value/gradient of f(x_u, clamp(H(x_u, x_d)), x_d) w.r.t. x_d."""

    def __init__(self, f: ClassifierModel, h: IfeModel, partition: FeaturePartition | None = None):
        self.f = f
        self.h = h
        self.partition = partition or derive_partition(f, h)
        self.u_idx = np.fromiter(self.partition.u_indices, dtype=int)
        self.i_idx = np.fromiter(self.partition.i_indices, dtype=int)
        self.d_idx = np.fromiter(self.partition.d_indices, dtype=int)
        self.p = self.partition.p

    def predict_full(self, X_full: np.ndarray) -> np.ndarray:
        z = mlp.forward(self.f.net, X_full)[:, 0]
        return np.clip(mlp.sigmoid(z), PROBA_EPS, 1.0 - PROBA_EPS)

    def estimate_indirect(self, X_u: np.ndarray, X_d: np.ndarray) -> np.ndarray:
        return mlp.forward(self.h.net, np.hstack([X_u, X_d]))

    def assemble(self, X_u, X_i, X_d) -> np.ndarray:
        m = X_u.shape[0]
        X = np.empty((m, self.p))
        X[:, self.u_idx] = X_u
        X[:, self.i_idx] = X_i
        X[:, self.d_idx] = X_d
        return X

    def value_and_grad(self, X_u: np.ndarray, X_d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        raw_i = self.estimate_indirect(X_u, X_d)
        X_full = self.assemble(X_u, np.clip(raw_i, 0.0, 1.0), X_d)

        fnet = self.f.net
        if fnet.n_layers == 1:
            z = X_full @ fnet.weights[0][:, 0] + fnet.biases[0][0]
            dg = np.broadcast_to(fnet.weights[0][:, 0], X_full.shape)
        else:
            z1 = X_full @ fnet.weights[0] + fnet.biases[0]
            z = mlp.relu(z1) @ fnet.weights[1][:, 0] + fnet.biases[1][0]
            dg = (mlp.relu_grad(z1) * fnet.weights[1][:, 0]) @ fnet.weights[0].T
        prob = mlp.sigmoid(z)
        slope = (prob * (1.0 - prob))[:, None]
        grad_full = slope * dg
        grad_d = grad_full[:, self.d_idx]
        # chain through the estimator; clamped outputs pass no gradient
        grad_i = grad_full[:, self.i_idx] * ((raw_i >= 0.0) & (raw_i <= 1.0))
        hnet = self.h.net
        n_u = len(self.u_idx)
        if hnet.n_layers == 1:
            chain = grad_i @ hnet.weights[0][n_u:, :].T
        else:
            hz1 = np.hstack([X_u, X_d]) @ hnet.weights[0] + hnet.biases[0]
            chain = ((grad_i @ hnet.weights[1].T) * mlp.relu_grad(hz1)) @ hnet.weights[0][n_u:, :].T
        grad = grad_d + chain
        if not np.all(np.isfinite(grad)):
            raise NonFiniteGradient("non-finite gradient encountered")
        return np.clip(prob, PROBA_EPS, 1.0 - PROBA_EPS), grad


def composed_objective(
    f: ClassifierModel,
    h: IfeModel,
    x_u: np.ndarray,
    x_d: np.ndarray,
    partition: FeaturePartition | None = None,
) -> float:
    """Predicted mortality at (x_u, clamp(H(x_u, x_d)), x_d)."""
    obj = _Objective(f, h, partition)
    x_u = np.atleast_2d(np.asarray(x_u, dtype=float))
    x_d = np.atleast_2d(np.asarray(x_d, dtype=float))
    raw_i = obj.estimate_indirect(x_u, x_d)
    return float(obj.predict_full(obj.assemble(x_u, np.clip(raw_i, 0.0, 1.0), x_d))[0])


def composed_gradient(
    f: ClassifierModel,
    h: IfeModel,
    x_u: np.ndarray,
    x_d: np.ndarray,
    partition: FeaturePartition | None = None,
) -> tuple[float, np.ndarray]:
    """Objective value and its gradient w.r.t. the direct block:
    df/dx_D + J_H^T df/dx_I, clamp treated as identity inside the box and
    zero outside."""
    obj = _Objective(f, h, partition)
    val, grad = obj.value_and_grad(
        np.atleast_2d(np.asarray(x_u, dtype=float)),
        np.atleast_2d(np.asarray(x_d, dtype=float)),
    )
    return float(val[0]), grad[0]


# -- projected gradient descent --------------------------------------------------

def optimize_block(
    f: ClassifierModel,
    h: IfeModel,
    X_u: np.ndarray,
    X_i_observed: np.ndarray,
    X_d0: np.ndarray,
    budget: float,
    cfg: OptimizeConfig,
    partition: FeaturePartition | None = None,
) -> list[RecommendationResult]:
    """Run PGD for a block of instances sharing one budget."""
    obj = _Objective(f, h, partition)
    X_u = np.atleast_2d(np.asarray(X_u, dtype=float))
    X_i_observed = np.atleast_2d(np.asarray(X_i_observed, dtype=float))
    X_d0 = np.atleast_2d(np.asarray(X_d0, dtype=float))
    m = X_u.shape[0]
    if (
        X_u.shape[1] != len(obj.u_idx)
        or X_i_observed.shape[1] != len(obj.i_idx)
        or X_d0.shape[1] != len(obj.d_idx)
    ):
        raise DimensionMismatch("request blocks do not match the model partition")
    if budget < 0:
        raise NegativeBudget(f"budget {budget} is negative")
    if (X_d0 < 0).any() or (X_d0 > 1).any():
        raise ValueError("starting direct features must lie in [0,1]")

    prob_before = obj.predict_full(obj.assemble(X_u, X_i_observed, X_d0))

    x = X_d0.copy()
    val, grad = obj.value_and_grad(X_u, x)
    trajectories: list[list[tuple[int, float]]] = [[(0, float(v))] for v in val]
    best_obj = val.copy()
    best_x = x.copy()
    converged = np.zeros(m, dtype=bool)
    iters_used = np.zeros(m, dtype=int)
    live = np.ones(m, dtype=bool)
    live_rows = np.arange(m)

    for t in range(1, cfg.max_iters + 1):
        rows = live_rows[live]
        if rows.size == 0:
            break
        x_new = _project_block(x[rows] - cfg.step_size * grad[rows], X_d0[rows], budget)
        val_new, grad_new = obj.value_and_grad(X_u[rows], x_new)
        step = np.abs(x_new - x[rows]).max(axis=1)
        for k, r in enumerate(rows):
            trajectories[r].append((t, float(val_new[k])))
        improved = val_new < best_obj[rows]
        imp_rows = rows[improved]
        best_obj[imp_rows] = val_new[improved]
        best_x[imp_rows] = x_new[improved]
        x[rows] = x_new
        grad[rows] = grad_new
        iters_used[rows] = t
        done = step < cfg.convergence_tol
        converged[rows[done]] = True
        live[rows[done]] = False

    x_i_pred = np.clip(obj.estimate_indirect(X_u, best_x), 0.0, 1.0)
    return [
        RecommendationResult(
            x_d_optimized=best_x[r].copy(),
            z=best_x[r] - X_d0[r],
            x_i_predicted=x_i_pred[r].copy(),
            prob_before=float(prob_before[r]),
            prob_after=float(best_obj[r]),
            trajectory=trajectories[r],
            converged=bool(converged[r]),
            iters_used=int(iters_used[r]),
        )
        for r in range(m)
    ]


def optimize_recommendation(
    f: ClassifierModel,
    h: IfeModel,
    req: RecommendationRequest,
    cfg: OptimizeConfig,
) -> RecommendationResult:
    return optimize_block(
        f,
        h,
        req.x_u[None, :],
        req.x_i_observed[None, :],
        req.x_d_physician[None, :],
        req.budget,
        cfg,
    )[0]


def request_from_json(doc: dict) -> RecommendationRequest:
    return RecommendationRequest(
        x_u=np.array(doc["x_u"], dtype=float),
        x_i_observed=np.array(doc["x_i_observed"], dtype=float),
        x_d_physician=np.array(doc["x_d_physician"], dtype=float),
        budget=float(doc["budget"]),
    )


def request_to_json(req: RecommendationRequest) -> dict:
    return {
        "x_u": [float(v) for v in req.x_u],
        "x_i_observed": [float(v) for v in req.x_i_observed],
        "x_d_physician": [float(v) for v in req.x_d_physician],
        "budget": req.budget,
    }
