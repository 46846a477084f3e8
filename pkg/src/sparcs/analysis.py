"""Post-training diagnostics: nonlinearity measure, pruning, bookkeeping.

The gamma tensor measures how much computation actually flows through the
hidden layer of a three-layer network: entry (i, j, k) is the product of the
bundle into hidden neuron j from input k with the bundle out of j into output
i.  It vanishes identically while the network remains an effective
perceptron, so its norm tracks the recruitment of the hidden layer.

Spectral pruning exploits the eigenvalue/neuron correspondence: once the
neighbouring layers' eigenvalues are off, zeroing one hidden eigenvalue
removes one hidden neuron from every bundle at once, so sweeping eigenvalues
in magnitude order yields an architecture search with a one-dimensional
dial.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneracyError, DimensionError
from .linalg import frobenius_norm
from .network import forward, mse_value
from .spectral import SpectralParams, weight_blocks

__all__ = [
    "gamma_tensor",
    "gamma_norm",
    "eigenvalue_histogram",
    "PruningCurve",
    "spectral_prune",
    "ParamCount",
    "param_count_comparison",
    "r2_score",
]


def gamma_tensor(params: SpectralParams) -> np.ndarray:
    """Elementwise product of the two adjacent bundles of a 3-layer network.

    Returns the (output, hidden, input)-shaped tensor
    gamma[i, j, k] = W_out_hidden[i, j] * W_hidden_in[j, k]; no summation
    over the hidden index, so individual hidden channels stay visible.
    Only defined for exactly one hidden layer.
    """
    if params.b != 2:
        raise DimensionError(
            f"gamma tensor needs exactly 3 layers, got sizes {params.layers}"
        )
    blocks = weight_blocks(params)
    w_in = blocks[(1, 0)]
    w_out = blocks[(2, 1)]
    return w_out[:, :, np.newaxis] * w_in[np.newaxis, :, :]


def gamma_norm(params: SpectralParams) -> float:
    """Frobenius norm of the gamma tensor."""
    return frobenius_norm(gamma_tensor(params))


def eigenvalue_histogram(
    params: SpectralParams, layer: int, bins: int = 30
) -> tuple[np.ndarray, np.ndarray]:
    """Histogram of eigenvalue magnitudes for one layer.

    Bins run from zero to the largest magnitude (or to one if the layer is
    entirely switched off, to keep the bin edges well defined).  Returns
    (counts, edges) as numpy arrays.
    """
    if not 0 <= layer < len(params.layers):
        raise DimensionError(
            f"layer {layer} out of range for sizes {params.layers}"
        )
    mags = np.abs(params.eig[layer])
    top = float(mags.max()) if mags.size and mags.max() > 0.0 else 1.0
    counts, edges = np.histogram(mags, bins=bins, range=(0.0, top))
    return counts, edges


@dataclass
class PruningCurve:
    """Trade-off curve recorded while switching eigenvalues off.

    Entry t describes the model with the t+1 smallest hidden eigenvalues
    zeroed: how many hidden neurons remain active and the relative increase
    of the validation loss over the unpruned model.  correspondence_warning
    flags curves measured outside the regime (input eigenvalues zero, at
    most one hidden layer still on) in which zeroing an eigenvalue exactly
    removes a neuron.  removable_layers lists the hidden layers (1-based)
    whose eigenvalue vector is entirely zero in the pruned model, so the
    whole layer drops out of the architecture.
    """

    active_neurons: list[int]
    rel_increase: list[float]
    baseline_loss: float
    threshold_pct: float
    chosen_active: int
    correspondence_warning: bool
    removable_layers: list[int]


def spectral_prune(
    params: SpectralParams,
    x_val: np.ndarray,
    y_val: np.ndarray,
    threshold_pct: float = 5.0,
) -> tuple[SpectralParams, PruningCurve]:
    """Prune hidden neurons by switching their eigenvalues off.

    Walks the nonzero hidden eigenvalues in ascending magnitude order,
    zeroing one at a time and measuring the validation loss, then keeps the
    deepest prefix whose relative loss increase stays within threshold_pct
    percent.  Returns the pruned copy and the full curve; the input params
    are untouched.
    """
    if threshold_pct <= 0.0:
        raise DimensionError(f"threshold_pct must be positive, got {threshold_pct}")
    x_val = np.asarray(x_val, dtype=np.float64)
    y_val = np.asarray(y_val, dtype=np.float64)
    if x_val.shape[0] == 0:
        raise DimensionError("pruning needs a non-empty validation set")
    base_pred, _ = forward(params, x_val)
    base = mse_value(base_pred, y_val)
    if base <= 0.0:
        raise DegeneracyError(
            "unpruned validation loss is zero; relative increase is undefined"
        )

    candidates = sorted(
        (abs(float(params.eig[l][r])), l, r)
        for l in params.hidden_indices
        for r in range(params.layers[l])
        if params.eig[l][r] != 0.0
    )
    active0 = len(candidates)

    warning = not (
        np.all(params.eig[0] == 0.0)
        and sum(1 for l in params.hidden_indices if np.any(params.eig[l] != 0.0)) <= 1
    )

    work = params.copy()
    active, rel = [], []
    for t, (_, l, r) in enumerate(candidates):
        work.eig[l][r] = 0.0
        pred, _ = forward(work, x_val)
        loss = mse_value(pred, y_val)
        active.append(active0 - (t + 1))
        rel.append((loss - base) / base)

    chosen_steps = 0
    for t in range(len(candidates)):
        if rel[t] <= threshold_pct / 100.0:
            chosen_steps = t + 1
    pruned = params.copy()
    for _, l, r in candidates[:chosen_steps]:
        pruned.eig[l][r] = 0.0
    curve = PruningCurve(
        active_neurons=active,
        rel_increase=rel,
        baseline_loss=base,
        threshold_pct=threshold_pct,
        chosen_active=active0 - chosen_steps,
        correspondence_warning=warning,
        removable_layers=[
            l + 1 for l in pruned.hidden_indices if not np.any(pruned.eig[l])
        ],
    )
    return pruned, curve


@dataclass
class ParamCount:
    """Exact trainable-parameter counts for one layer-size profile.

    The spectral parametrization stores one coupling block per adjacent
    pair plus one eigenvalue per neuron; the direct parametrization of the
    same connectivity stores every bundle, skips included.  Both breakdowns
    are kept term by term so reports can print the full sums.
    """

    layers: tuple[int, ...]
    phi_terms: list[int]
    eig_terms: list[int]
    direct_terms: list[tuple[int, int, int]]

    @property
    def spectral_total(self) -> int:
        return sum(self.phi_terms) + sum(self.eig_terms)

    @property
    def direct_total(self) -> int:
        return sum(t for _, _, t in self.direct_terms)


def param_count_comparison(layers) -> ParamCount:
    """Count spectral vs direct parameters for the given layer sizes.

    Pure integer arithmetic.  The direct count grows with the square of the
    depth because of the skip bundles, the spectral one only linearly; with
    uniform widths the direct form is smaller only for a single hidden
    layer.
    """
    sizes = tuple(int(n) for n in layers)
    if len(sizes) < 2 or any(n < 1 for n in sizes):
        raise DimensionError(f"invalid layer sizes {sizes}")
    phi_terms = [sizes[k] * sizes[k + 1] for k in range(len(sizes) - 1)]
    eig_terms = [n for n in sizes]
    direct_terms = [
        (i + 1, j + 1, sizes[i] * sizes[j])
        for i in range(1, len(sizes))
        for j in range(i)
    ]
    return ParamCount(sizes, phi_terms, eig_terms, direct_terms)


def r2_score(y_pred: np.ndarray, y_true: np.ndarray) -> float:
    """Coefficient of determination, averaged over output columns.

    A constant target column makes the score undefined and raises
    DegeneracyError rather than returning a silent sentinel.
    """
    y_pred = np.asarray(y_pred, dtype=np.float64)
    y_true = np.asarray(y_true, dtype=np.float64)
    if y_pred.shape != y_true.shape:
        raise DimensionError(
            f"prediction shape {y_pred.shape} vs target shape {y_true.shape}"
        )
    if y_pred.ndim == 1:
        y_pred = y_pred[:, np.newaxis]
        y_true = y_true[:, np.newaxis]
    ss_tot = np.sum((y_true - y_true.mean(axis=0)) ** 2, axis=0)
    if np.any(ss_tot <= 0.0):
        raise DegeneracyError("target has a zero-variance column; r2 undefined")
    ss_res = np.sum((y_true - y_pred) ** 2, axis=0)
    return float(np.mean(1.0 - ss_res / ss_tot))
