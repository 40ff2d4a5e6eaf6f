"""Indirect feature estimator: a regression map from the (unchangeable,
direct) blocks to the indirect block, with an analytic Jacobian w.r.t. the
direct block for chain-rule use inside the optimizer. Output head is linear;
clamping to the unit cube happens at the composition boundary, not here."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import mlp
from .dataset import Dataset
from .errors import DimensionMismatch, EmptyIndirectBlock


@dataclass(frozen=True)
class IfeConfig:
    variant: str = "feedforward"  # "linear" | "feedforward"
    hidden_nodes: int = 10
    epochs: int = 250
    learning_rate: float = 0.01
    seed: int = 0
    batch_size: int | None = None

    def __post_init__(self):
        if self.variant not in ("linear", "feedforward"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.variant == "linear" and self.hidden_nodes != 0:
            object.__setattr__(self, "hidden_nodes", 0)
        if self.epochs <= 0 or self.learning_rate <= 0:
            raise ValueError("epochs and learning_rate must be positive")

    @property
    def effective_hidden(self) -> int:
        return 0 if self.variant == "linear" else self.hidden_nodes


@dataclass
class IfeModel:
    net: mlp.Network
    config: IfeConfig
    u_names: tuple[str, ...]
    d_names: tuple[str, ...]
    i_names: tuple[str, ...]
    loss_history: list[float] = field(default_factory=list)

    @property
    def n_u(self) -> int:
        return len(self.u_names)

    @property
    def n_d(self) -> int:
        return len(self.d_names)

    @property
    def n_i(self) -> int:
        return len(self.i_names)

    @property
    def n_params(self) -> int:
        return self.net.n_params

    def _check_dims(self, x_u: np.ndarray, x_d: np.ndarray) -> np.ndarray:
        x_u = np.asarray(x_u, dtype=float).ravel()
        x_d = np.asarray(x_d, dtype=float).ravel()
        if len(x_u) != self.n_u or len(x_d) != self.n_d:
            raise DimensionMismatch(
                f"expected |U|={self.n_u}, |D|={self.n_d}; got {len(x_u)}, {len(x_d)}"
            )
        return np.concatenate([x_u, x_d])


def train_ife(train: Dataset, cfg: IfeConfig) -> IfeModel:
    """Fit the regression on observed (U, D) -> I triples by Adam on pooled MSE."""
    part = train.partition
    if part is None or not part.i_indices:
        raise EmptyIndirectBlock("training data has no indirect features")
    u_idx, d_idx, i_idx = list(part.u_indices), list(part.d_indices), list(part.i_indices)
    X_in = train.X[:, u_idx + d_idx]
    Y = train.X[:, i_idx]
    rng = np.random.default_rng(cfg.seed)
    net = mlp.init_network(rng, X_in.shape[1], cfg.effective_hidden, Y.shape[1])
    history = mlp.train_network(
        net,
        X_in,
        Y,
        mlp.mse_loss_and_grad,
        epochs=cfg.epochs,
        learning_rate=cfg.learning_rate,
        rng=rng,
        batch_size=cfg.batch_size,
    )
    names = train.feature_names
    return IfeModel(
        net,
        cfg,
        tuple(names[j] for j in u_idx),
        tuple(names[j] for j in d_idx),
        tuple(names[j] for j in i_idx),
        history,
    )


def predict_indirect(m: IfeModel, x_u: np.ndarray, x_d: np.ndarray) -> np.ndarray:
    """Estimated indirect block, unclamped (linear head)."""
    x = m._check_dims(x_u, x_d)
    return mlp.forward(m.net, x)[0]


def predict_indirect_batch(m: IfeModel, X_u: np.ndarray, X_d: np.ndarray) -> np.ndarray:
    X = np.hstack([np.atleast_2d(X_u), np.atleast_2d(X_d)])
    if X.shape[1] != m.n_u + m.n_d:
        raise DimensionMismatch("input block widths do not match the model")
    return mlp.forward(m.net, X)


def predict_and_jacobian(m: IfeModel, x_u: np.ndarray, x_d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unclamped prediction and its Jacobian w.r.t. the direct block, shape
    (|I|, |D|), sharing one forward pass."""
    x = m._check_dims(x_u, x_d)
    net = m.net
    if net.n_layers == 1:
        pred = x @ net.weights[0] + net.biases[0]
        jac = net.weights[0][m.n_u :, :].T.copy()
    else:
        z1 = x @ net.weights[0] + net.biases[0]
        pred = mlp.relu(z1) @ net.weights[1] + net.biases[1]
        jac = (net.weights[1].T * mlp.relu_grad(z1)) @ net.weights[0][m.n_u :, :].T
    return pred, jac


def ife_jacobian(m: IfeModel, x_u: np.ndarray, x_d: np.ndarray) -> np.ndarray:
    """Analytic d(output)/d(direct block), shape (|I|, |D|)."""
    return predict_and_jacobian(m, x_u, x_d)[1]


@dataclass(frozen=True)
class RegressionMetrics:
    mse: float
    mae: float


def evaluate_ife(m: IfeModel, ds: Dataset) -> RegressionMetrics:
    """Error pooled over every indirect feature and record."""
    part = ds.partition
    if part is None or not part.i_indices:
        raise EmptyIndirectBlock("dataset has no indirect features")
    u_idx, d_idx, i_idx = list(part.u_indices), list(part.d_indices), list(part.i_indices)
    pred = mlp.forward(m.net, ds.X[:, u_idx + d_idx])
    resid = pred - ds.X[:, i_idx]
    return RegressionMetrics(
        mse=float(np.mean(resid * resid)),
        mae=float(np.mean(np.abs(resid))),
    )


def ife_grid_search(
    train: Dataset, val: Dataset, grid: list[IfeConfig]
) -> tuple[IfeModel, list[tuple[IfeConfig, RegressionMetrics]]]:
    """Select by validation MSE; ties to the smaller model."""
    if not grid:
        raise ValueError("empty config grid")
    rows = []
    best_key: tuple[float, int] | None = None
    best_model: IfeModel | None = None
    for cfg in grid:
        model = train_ife(train, cfg)
        metrics = evaluate_ife(model, val)
        rows.append((cfg, metrics))
        key = (metrics.mse, model.n_params)
        if best_key is None or key < best_key:
            best_key = key
            best_model = model
    return best_model, rows


def default_ife_grid(seed: int = 0) -> list[IfeConfig]:
    return [
        IfeConfig("linear" if hn == 0 else "feedforward", hn, 250, 0.01, seed)
        for hn in (0, 3, 5, 10)
    ]


# -- serialization -------------------------------------------------------------

def ife_to_json(m: IfeModel, scaler_ref: str = "") -> dict:
    doc = {
        "variant": m.config.variant,
        "dims": [m.net.in_dim]
        + ([m.net.weights[0].shape[1]] if m.net.n_layers == 2 else [])
        + [m.net.out_dim],
        "feature_names": {
            "u": list(m.u_names),
            "d": list(m.d_names),
            "i": list(m.i_names),
        },
        "output_activation": "none",
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


def ife_from_json(doc: dict) -> IfeModel:
    net = mlp.weights_from_strings(doc)
    cfgdoc = doc.get("config", {})
    cfg = IfeConfig(
        variant=doc["variant"],
        hidden_nodes=int(cfgdoc.get("hidden_nodes", 0)),
        epochs=int(cfgdoc.get("epochs", 1)),
        learning_rate=float(cfgdoc.get("learning_rate", 0.01)),
        seed=int(cfgdoc.get("seed", 0)),
    )
    names = doc["feature_names"]
    return IfeModel(net, cfg, tuple(names["u"]), tuple(names["d"]), tuple(names["i"]))


def save_ife(m: IfeModel, path: str | Path, scaler_ref: str = "") -> None:
    Path(path).write_text(json.dumps(ife_to_json(m, scaler_ref), indent=2) + "\n")


def load_ife(path: str | Path) -> IfeModel:
    return ife_from_json(json.loads(Path(path).read_text()))
