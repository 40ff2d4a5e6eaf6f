"""Probabilistic mortality classifier: sigmoid head over a linear or
single-hidden-layer ReLU score, trained with full-batch Adam on binary
cross-entropy, with exact input gradients for the downstream optimizer."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import mlp
from .dataset import Dataset
from .errors import DimensionMismatch, SingleClassDataset

PROBA_EPS = 1e-12  # keep predictions strictly inside (0,1)


@dataclass(frozen=True)
class ClassifierConfig:
    variant: str = "feedforward"  # "logistic" | "feedforward"
    hidden_nodes: int = 3
    epochs: int = 250
    learning_rate: float = 0.01
    seed: int = 0
    batch_size: int | None = None  # None -> full batch

    def __post_init__(self):
        if self.variant not in ("logistic", "feedforward"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.variant == "logistic" and self.hidden_nodes != 0:
            object.__setattr__(self, "hidden_nodes", 0)
        if self.epochs <= 0 or self.learning_rate <= 0:
            raise ValueError("epochs and learning_rate must be positive")

    @property
    def effective_hidden(self) -> int:
        return 0 if self.variant == "logistic" else self.hidden_nodes


@dataclass
class ClassifierModel:
    net: mlp.Network
    config: ClassifierConfig
    feature_names: tuple[str, ...]
    loss_history: list[float] = field(default_factory=list)

    @property
    def n_params(self) -> int:
        return self.net.n_params

    def _check_dim(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.net.in_dim:
            raise DimensionMismatch(
                f"expected {self.net.in_dim} features, got {x.shape[-1]}"
            )
        return x


def train_classifier(train: Dataset, cfg: ClassifierConfig) -> ClassifierModel:
    rng = np.random.default_rng(cfg.seed)
    net = mlp.init_network(rng, train.p, cfg.effective_hidden, 1)
    history = mlp.train_network(
        net,
        train.X,
        train.y.astype(float),
        mlp.bce_loss_and_grad,
        epochs=cfg.epochs,
        learning_rate=cfg.learning_rate,
        rng=rng,
        batch_size=cfg.batch_size,
    )
    return ClassifierModel(net, cfg, tuple(train.feature_names), history)


def predict_proba(m: ClassifierModel, x: np.ndarray) -> float | np.ndarray:
    """Mortality probability; accepts a single vector or an (n, p) batch."""
    x = m._check_dim(x)
    z = mlp.forward(m.net, x)[:, 0]
    p = np.clip(mlp.sigmoid(z), PROBA_EPS, 1.0 - PROBA_EPS)
    return float(p[0]) if x.ndim == 1 else p


def proba_and_gradient(m: ClassifierModel, x: np.ndarray) -> tuple[float, np.ndarray]:
    """Probability and its exact input gradient in one forward pass."""
    x = m._check_dim(np.asarray(x, dtype=float).ravel())
    net = m.net
    if net.n_layers == 1:
        z = float(x @ net.weights[0][:, 0] + net.biases[0][0])
        dg = net.weights[0][:, 0]
    else:
        z1 = x @ net.weights[0] + net.biases[0]
        z = float(mlp.relu(z1) @ net.weights[1][:, 0] + net.biases[1][0])
        dg = net.weights[0] @ (net.weights[1][:, 0] * mlp.relu_grad(z1))
    p = float(mlp.sigmoid(np.array([z]))[0])
    proba = float(np.clip(p, PROBA_EPS, 1.0 - PROBA_EPS))
    return proba, p * (1.0 - p) * dg


def gradient_wrt_input(m: ClassifierModel, x: np.ndarray) -> np.ndarray:
    """Exact gradient of predict_proba at a single point."""
    return proba_and_gradient(m, x)[1]


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    auc: float


def accuracy(m: ClassifierModel, ds: Dataset) -> float:
    """Fraction correct at decision threshold 0.5 (positive iff p > 0.5)."""
    p = predict_proba(m, ds.X)
    return float(((p > 0.5).astype(int) == ds.y).mean())


def auc_score(scores: np.ndarray, labels: np.ndarray) -> float:
    """Rank-based AUC with half credit for ties (Mann-Whitney statistic)."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=int)
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassDataset("AUC needs both classes present")
    ranks = _average_ranks(scores)
    pos_rank_sum = float(ranks[labels == 1].sum())
    return (pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def _average_ranks(v: np.ndarray) -> np.ndarray:
    """1-based ranks, ties averaged."""
    order = np.argsort(v, kind="stable")
    ranks = np.empty(len(v), dtype=float)
    ranks[order] = np.arange(1, len(v) + 1, dtype=float)
    sv = v[order]
    i = 0
    while i < len(sv):
        j = i
        while j + 1 < len(sv) and sv[j + 1] == sv[i]:
            j += 1
        if j > i:
            ranks[order[i : j + 1]] = 0.5 * (i + 1 + j + 1)
        i = j + 1
    return ranks


def evaluate(m: ClassifierModel, ds: Dataset) -> Metrics:
    if ds.n == 0:
        raise ValueError("empty dataset")
    p = predict_proba(m, ds.X)
    return Metrics(accuracy=float(((p > 0.5).astype(int) == ds.y).mean()),
                   auc=auc_score(p, ds.y))


@dataclass(frozen=True)
class GridRow:
    config: ClassifierConfig
    metrics: Metrics          # validation split
    train_metrics: Metrics


def grid_search(
    train: Dataset, val: Dataset, grid: list[ClassifierConfig]
) -> tuple[ClassifierModel, list[GridRow]]:
    """Pick the config with the best validation AUC; ties go to the smaller
    model, then to fewer epochs."""
    if not grid:
        raise ValueError("empty config grid")
    rows: list[GridRow] = []
    best: tuple[float, int, int] | None = None
    best_model: ClassifierModel | None = None
    for cfg in grid:
        model = train_classifier(train, cfg)
        rows.append(GridRow(cfg, evaluate(model, val), evaluate(model, train)))
        key = (-rows[-1].metrics.auc, model.n_params, cfg.epochs)
        if best is None or key < best:
            best = key
            best_model = model
    return best_model, rows


def default_grid(seed: int = 0) -> list[ClassifierConfig]:
    grid = []
    for hn in (0, 3, 5, 10):
        for epochs in (100, 150, 200, 250):
            variant = "logistic" if hn == 0 else "feedforward"
            grid.append(ClassifierConfig(variant, hn, epochs, 0.01, seed))
    return grid


# -- serialization -------------------------------------------------------------

def classifier_to_json(m: ClassifierModel, scaler_ref: str = "") -> dict:
    doc = {
        "variant": m.config.variant,
        "dims": [m.net.in_dim]
        + ([m.net.weights[0].shape[1]] if m.net.n_layers == 2 else [])
        + [1],
        "feature_names": list(m.feature_names),
        "scaler_ref": scaler_ref,
        "config": {
            "hidden_nodes": m.config.hidden_nodes,
            "epochs": m.config.epochs,
            "learning_rate": m.config.learning_rate,
            "seed": m.config.seed,
        },
    }
    doc.update(mlp.weights_to_strings(m.net))
    return doc


def classifier_from_json(doc: dict) -> ClassifierModel:
    net = mlp.weights_from_strings(doc)
    cfgdoc = doc.get("config", {})
    cfg = ClassifierConfig(
        variant=doc["variant"],
        hidden_nodes=int(cfgdoc.get("hidden_nodes", 0)),
        epochs=int(cfgdoc.get("epochs", 1)),
        learning_rate=float(cfgdoc.get("learning_rate", 0.01)),
        seed=int(cfgdoc.get("seed", 0)),
    )
    return ClassifierModel(net, cfg, tuple(doc["feature_names"]))


def save_classifier(m: ClassifierModel, path: str | Path, scaler_ref: str = "") -> None:
    Path(path).write_text(json.dumps(classifier_to_json(m, scaler_ref), indent=2) + "\n")


def load_classifier(path: str | Path) -> ClassifierModel:
    return classifier_from_json(json.loads(Path(path).read_text()))
