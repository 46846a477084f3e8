"""Mini-batch training of spectral networks.

The objective is MSE plus a sparsity penalty on the hidden eigenvalues:

    total = mse(y, target) + rho * omega(hidden eigenvalues)

with omega either the sum of absolute values or the sum of squares.  Input
eigenvalues are pinned to zero and never updated; output eigenvalues are
trained by the data term but excluded from the penalty, since shutting them
off would remove output neurons.  Pushing a hidden eigenvalue to zero
silences its neuron everywhere at once (every bundle touching it scales with
it once the neighbouring layer's eigenvalues are off), which is what turns a
weight penalty into an architecture search.

The optimizer is Adam with bias correction.  Runs are deterministic given
the config seed: the train/validation split, the per-epoch shuffles, and the
parameter init are all driven by explicitly seeded generators.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .analysis import gamma_norm
from .errors import ConfigError, TrainingDivergedError
from .network import Gradients, backward, forward, mse_grad, mse_value
from .spectral import SpectralParams

__all__ = [
    "TrainConfig",
    "LossBreakdown",
    "TrainHistory",
    "AdamState",
    "init_adam",
    "adam_step",
    "regularizer_value",
    "add_regularizer_grads",
    "loss_total",
    "split_train_val",
    "train",
]


@dataclass
class TrainConfig:
    learning_rate: float = 1e-3
    batch_size: int = 100
    epochs: int = 100
    reg_type: str = "l2"
    reg_strength: float = 0.0
    loss: str = "mse"
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0
    validation_fraction: float = 0.2

    def __post_init__(self):
        if self.learning_rate <= 0.0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be at least 1, got {self.batch_size}")
        if self.epochs < 0:
            raise ConfigError(f"epochs must be non-negative, got {self.epochs}")
        if self.reg_type not in ("l1", "l2"):
            raise ConfigError(f"reg_type must be 'l1' or 'l2', got {self.reg_type!r}")
        if self.reg_strength < 0.0:
            raise ConfigError(f"reg_strength must be non-negative, got {self.reg_strength}")
        if self.loss != "mse":
            raise ConfigError(f"only the 'mse' loss is supported, got {self.loss!r}")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ConfigError(
                f"validation_fraction must be in [0, 1), got {self.validation_fraction}"
            )
        if not 0.0 < self.beta1 < 1.0:
            raise ConfigError(f"beta1 must be in (0, 1), got {self.beta1}")
        if not 0.0 < self.beta2 < 1.0:
            raise ConfigError(f"beta2 must be in (0, 1), got {self.beta2}")
        if self.adam_eps <= 0.0:
            raise ConfigError(f"adam_eps must be positive, got {self.adam_eps}")


def _penalized_layers(params: SpectralParams) -> list[int]:
    layers = list(params.hidden_indices)
    if not params.frozen_output:
        layers.append(params.b)
    return layers


def regularizer_value(params: SpectralParams, config: TrainConfig) -> float:
    """Unscaled penalty omega over the penalized eigenvalue vectors."""
    total = 0.0
    for l in _penalized_layers(params):
        e = params.eig[l]
        total += float(np.sum(np.abs(e)) if config.reg_type == "l1" else np.sum(e * e))
    return total


def add_regularizer_grads(params: SpectralParams, grads: Gradients, config: TrainConfig) -> None:
    """Accumulate rho * d(omega)/d(eig) into the gradients, in place.

    The l1 subgradient at zero is taken as zero, so an eigenvalue that has
    been driven exactly to zero stays put unless the data term moves it.
    """
    rho = config.reg_strength
    if rho == 0.0:
        return
    for l in _penalized_layers(params):
        e = params.eig[l]
        if config.reg_type == "l1":
            grads.d_eig[l] += rho * np.sign(e)
        else:
            grads.d_eig[l] += rho * 2.0 * e


@dataclass
class LossBreakdown:
    total: float
    data: float
    omega: float


def loss_total(params: SpectralParams, x: np.ndarray, target: np.ndarray, config: TrainConfig) -> LossBreakdown:
    """Full objective on one batch, with its components."""
    y, _ = forward(params, x)
    data = mse_value(y, target)
    omega = regularizer_value(params, config)
    return LossBreakdown(data + config.reg_strength * omega, data, omega)


@dataclass
class AdamState:
    step: int
    m_phi: list[np.ndarray]
    v_phi: list[np.ndarray]
    m_eig: list[np.ndarray]
    v_eig: list[np.ndarray]


def init_adam(params: SpectralParams) -> AdamState:
    return AdamState(
        step=0,
        m_phi=[np.zeros_like(p) for p in params.phi],
        v_phi=[np.zeros_like(p) for p in params.phi],
        m_eig=[np.zeros_like(e) for e in params.eig],
        v_eig=[np.zeros_like(e) for e in params.eig],
    )


def adam_step(params: SpectralParams, grads: Gradients, state: AdamState, config: TrainConfig) -> None:
    """One Adam update, in place on params and state."""
    state.step += 1
    t = state.step
    b1, b2 = config.beta1, config.beta2
    corr1 = 1.0 - b1**t
    corr2 = 1.0 - b2**t

    def update(p, g, m, v):
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        p -= config.learning_rate * (m / corr1) / (np.sqrt(v / corr2) + config.adam_eps)

    for k in range(len(params.phi)):
        update(params.phi[k], grads.d_phi[k], state.m_phi[k], state.v_phi[k])
    for l in range(len(params.eig)):
        if l == 0 and params.frozen_input:
            continue
        update(params.eig[l], grads.d_eig[l], state.m_eig[l], state.v_eig[l])


@dataclass
class TrainHistory:
    """Per-epoch record of one run.  Row 0 is the untrained model.

    train_indices/val_indices document the split actually used, so later
    stages (pruning, baselines) can evaluate on the identical hold-out.
    """

    layers: tuple[int, ...]
    train_indices: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=int))
    val_indices: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=int))
    epochs: list[int] = field(default_factory=list)
    train_loss: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    omega: list[float] = field(default_factory=list)
    eig_mean: list[list[float]] = field(default_factory=list)
    eig_max: list[list[float]] = field(default_factory=list)
    gamma: list[float] | None = None

    def header(self) -> list[str]:
        cols = ["epoch", "train_loss", "val_loss", "omega"]
        for l in range(len(self.layers)):
            cols.append(f"eig_mean_{l + 1}")
        for l in range(len(self.layers)):
            cols.append(f"eig_max_{l + 1}")
        if self.gamma is not None:
            cols.append("gamma_norm")
        return cols

    def rows(self) -> list[list[float]]:
        out = []
        for i, epoch in enumerate(self.epochs):
            row = [
                float(epoch),
                self.train_loss[i],
                self.val_loss[i],
                self.omega[i],
            ]
            row.extend(self.eig_mean[i])
            row.extend(self.eig_max[i])
            if self.gamma is not None:
                row.append(self.gamma[i])
            out.append(row)
        return out


def split_train_val(n: int, fraction: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic shuffled split; returns (train indices, val indices)."""
    perm = rng.permutation(n)
    n_val = int(round(n * fraction))
    return perm[n_val:], perm[:n_val]


def _record(history, params, config, epoch, x_tr, y_tr, x_val, y_val):
    tr = loss_total(params, x_tr, y_tr, config)
    if x_val.shape[0] > 0:
        val = loss_total(params, x_val, y_val, config).data
    else:
        val = float("nan")
    history.epochs.append(epoch)
    history.train_loss.append(tr.data)
    history.val_loss.append(val)
    history.omega.append(tr.omega)
    history.eig_mean.append([float(np.mean(np.abs(e))) for e in params.eig])
    history.eig_max.append(
        [float(np.max(np.abs(e))) if e.size else 0.0 for e in params.eig]
    )
    if history.gamma is not None:
        history.gamma.append(gamma_norm(params))


def train(
    params: SpectralParams, x: np.ndarray, y: np.ndarray, config: TrainConfig
) -> tuple[SpectralParams, TrainHistory]:
    """Train in place and return (params, history).

    Shuffles the training split freshly every epoch, walks it in mini
    batches (last one possibly short), and records epoch-end metrics on the
    full splits.  Non-finite losses or gradients abort immediately with the
    epoch and batch indices in the message.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape[0] != y.shape[0]:
        raise ConfigError(f"x has {x.shape[0]} samples but y has {y.shape[0]}")
    rng = np.random.default_rng(config.seed)
    train_idx, val_idx = split_train_val(x.shape[0], config.validation_fraction, rng)
    x_tr, y_tr = x[train_idx], y[train_idx]
    x_val, y_val = x[val_idx], y[val_idx]

    history = TrainHistory(
        layers=params.layers, train_indices=train_idx, val_indices=val_idx
    )
    if params.b == 2:
        history.gamma = []
    state = init_adam(params)
    _record(history, params, config, 0, x_tr, y_tr, x_val, y_val)

    n_tr = x_tr.shape[0]
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(n_tr)
        for bi, start in enumerate(range(0, n_tr, config.batch_size)):
            batch = order[start : start + config.batch_size]
            yb, trace = forward(params, x_tr[batch])
            data = mse_value(yb, y_tr[batch])
            if not np.isfinite(data):
                raise TrainingDivergedError(
                    f"loss became non-finite at epoch {epoch}, batch {bi}"
                )
            grads = backward(params, trace, mse_grad(yb, y_tr[batch]))
            add_regularizer_grads(params, grads, config)
            if not np.isfinite(grads.max_abs()):
                raise TrainingDivergedError(
                    f"gradients became non-finite at epoch {epoch}, batch {bi}"
                )
            adam_step(params, grads, state, config)
        _record(history, params, config, epoch, x_tr, y_tr, x_val, y_val)
    return params, history
