"""Shared single-hidden-layer network internals.

Both the mortality classifier and the indirect-feature estimator are thin
wrappers over the same structure: an optional ReLU hidden layer followed by a
linear output layer. Training is plain backprop + Adam on full batches (or
seeded mini-batches), all in numpy, so runs are bit-reproducible under a
fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonFiniteLoss

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


def relu(z: np.ndarray) -> np.ndarray:
    return np.maximum(z, 0.0)


def relu_grad(z: np.ndarray) -> np.ndarray:
    # subgradient 0 at the kink
    return (z > 0.0).astype(z.dtype)


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


@dataclass
class Network:
    """Weights of a 1- or 2-layer perceptron; layer k maps via X @ W + b.

    One layer -> purely linear map. Two layers -> ReLU hidden layer followed
    by a linear output layer. Output activation (sigmoid / none) is applied
    by the caller.
    """

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    @property
    def in_dim(self) -> int:
        return self.weights[0].shape[0]

    @property
    def out_dim(self) -> int:
        return self.weights[-1].shape[1]

    @property
    def n_params(self) -> int:
        return sum(w.size for w in self.weights) + sum(b.size for b in self.biases)

    def copy(self) -> "Network":
        return Network([w.copy() for w in self.weights], [b.copy() for b in self.biases])


def init_network(rng: np.random.Generator, in_dim: int, hidden: int, out_dim: int) -> Network:
    """hidden == 0 builds the single linear layer variant."""
    if hidden > 0:
        weights = [glorot_uniform(rng, in_dim, hidden), glorot_uniform(rng, hidden, out_dim)]
        biases = [np.zeros(hidden), np.zeros(out_dim)]
    else:
        weights = [glorot_uniform(rng, in_dim, out_dim)]
        biases = [np.zeros(out_dim)]
    return Network(weights, biases)


def forward(net: Network, X: np.ndarray) -> np.ndarray:
    """Pre-activation output of the final layer, shape (n, out_dim)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if net.n_layers == 1:
        return X @ net.weights[0] + net.biases[0]
    z1 = X @ net.weights[0] + net.biases[0]
    return relu(z1) @ net.weights[1] + net.biases[1]


def input_jacobian(net: Network, x: np.ndarray) -> np.ndarray:
    """Exact Jacobian d(output)/d(input) at a single point, shape (out, in)."""
    x = np.asarray(x, dtype=float).ravel()
    if net.n_layers == 1:
        return net.weights[0].T.copy()
    z1 = x @ net.weights[0] + net.biases[0]
    mask = relu_grad(z1)
    # (out,h) * (h,) -> (out,h) @ (h,in)
    return (net.weights[1].T * mask) @ net.weights[0].T


def _backprop(net: Network, X: np.ndarray, cache: tuple, d_out: np.ndarray):
    """Parameter gradients given dLoss/d(final pre-activation)."""
    if net.n_layers == 1:
        return [X.T @ d_out], [d_out.sum(axis=0)]
    z1, a1 = cache
    dW2 = a1.T @ d_out
    db2 = d_out.sum(axis=0)
    dz1 = (d_out @ net.weights[1].T) * relu_grad(z1)
    dW1 = X.T @ dz1
    db1 = dz1.sum(axis=0)
    return [dW1, dW2], [db1, db2]


def _forward_cached(net: Network, X: np.ndarray):
    if net.n_layers == 1:
        return X @ net.weights[0] + net.biases[0], None
    z1 = X @ net.weights[0] + net.biases[0]
    a1 = relu(z1)
    return a1 @ net.weights[1] + net.biases[1], (z1, a1)


@dataclass
class _AdamState:
    m_w: list = field(default_factory=list)
    v_w: list = field(default_factory=list)
    m_b: list = field(default_factory=list)
    v_b: list = field(default_factory=list)
    t: int = 0


def train_network(
    net: Network,
    X: np.ndarray,
    Y: np.ndarray,
    loss_and_grad,
    epochs: int,
    learning_rate: float,
    rng: np.random.Generator,
    batch_size: int | None = None,
) -> list[float]:
    """Adam-optimize `net` in place; returns the per-epoch loss history.

    `loss_and_grad(z, y)` maps final pre-activations and targets to
    (scalar loss, dLoss/dz). batch_size None -> full batch.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    n = X.shape[0]
    state = _AdamState(
        m_w=[np.zeros_like(w) for w in net.weights],
        v_w=[np.zeros_like(w) for w in net.weights],
        m_b=[np.zeros_like(b) for b in net.biases],
        v_b=[np.zeros_like(b) for b in net.biases],
    )
    history: list[float] = []
    for _ in range(epochs):
        if batch_size is None or batch_size >= n:
            batches = [np.arange(n)]
        else:
            order = rng.permutation(n)
            batches = [order[i : i + batch_size] for i in range(0, n, batch_size)]
        epoch_loss = 0.0
        for idx in batches:
            xb, yb = X[idx], Y[idx]
            z, cache = _forward_cached(net, xb)
            loss, d_out = loss_and_grad(z, yb)
            if not np.isfinite(loss):
                raise NonFiniteLoss(f"training diverged: loss={loss!r}")
            epoch_loss += loss * len(idx)
            grads_w, grads_b = _backprop(net, xb, cache, d_out)
            _adam_update(net, state, grads_w, grads_b, learning_rate)
        history.append(epoch_loss / n)
    return history


def _adam_update(net: Network, s: _AdamState, grads_w, grads_b, lr: float) -> None:
    s.t += 1
    c1 = 1.0 - ADAM_BETA1**s.t
    c2 = 1.0 - ADAM_BETA2**s.t
    for i, g in enumerate(grads_w):
        s.m_w[i] = ADAM_BETA1 * s.m_w[i] + (1 - ADAM_BETA1) * g
        s.v_w[i] = ADAM_BETA2 * s.v_w[i] + (1 - ADAM_BETA2) * g * g
        net.weights[i] -= lr * (s.m_w[i] / c1) / (np.sqrt(s.v_w[i] / c2) + ADAM_EPS)
    for i, g in enumerate(grads_b):
        s.m_b[i] = ADAM_BETA1 * s.m_b[i] + (1 - ADAM_BETA1) * g
        s.v_b[i] = ADAM_BETA2 * s.v_b[i] + (1 - ADAM_BETA2) * g * g
        net.biases[i] -= lr * (s.m_b[i] / c1) / (np.sqrt(s.v_b[i] / c2) + ADAM_EPS)


def bce_loss_and_grad(z: np.ndarray, y: np.ndarray):
    """Binary cross-entropy on sigmoid(z); z shape (n,1), y shape (n,) or (n,1)."""
    y = y.reshape(z.shape)
    # mean(softplus(z) - y*z) is the BCE of sigmoid(z), computed stably
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z))
    d_out = (sigmoid(z) - y) / z.shape[0]
    return loss, d_out


def mse_loss_and_grad(z: np.ndarray, y: np.ndarray):
    """Mean squared error pooled over samples and output columns."""
    y = y.reshape(z.shape)
    diff = z - y
    loss = float(np.mean(diff * diff))
    d_out = 2.0 * diff / diff.size
    return loss, d_out


# -- serialization ----------------------------------------------------------

def weights_to_strings(net: Network) -> dict:
    """Row-major weight/bias arrays rendered as exact decimal strings."""
    return {
        "weights": [[[repr(float(v)) for v in row] for row in w] for w in net.weights],
        "biases": [[repr(float(v)) for v in b] for b in net.biases],
    }


def weights_from_strings(doc: dict) -> Network:
    weights = [np.array([[float(v) for v in row] for row in w]) for w in doc["weights"]]
    biases = [np.array([float(v) for v in b]) for b in doc["biases"]]
    return Network(weights, biases)
