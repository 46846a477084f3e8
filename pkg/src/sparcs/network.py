"""Forward and backward passes through the spectrally parametrized network.

The update rule feeds every layer with the sum of all bundles arriving from
every earlier layer (skips included):

    z[i] = sum_{j < i} a[j] @ W[i, j].T
    a[i] = relu(z[i])        for hidden layers
    a[B] = z[B]              linear output layer

Weight bundles are materialized from the spectral parameters on entry and
never cached across calls.  The backward pass is reverse-mode through both
stages: first the layered update rule, then the closed-form map from spectral
parameters to bundles.  Because one coupling block or eigenvalue vector
appears in many bundles, its gradient accumulates one contribution per bundle
it touches.

Gradients are summed over the batch; any averaging lives inside the loss.
relu's derivative at exactly zero is taken to be zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, DimensionError
from .spectral import SpectralParams, bracket, weight_blocks

__all__ = [
    "ActivationTrace",
    "Gradients",
    "FiniteDiffResult",
    "forward",
    "backward",
    "mse_value",
    "mse_grad",
    "finite_difference_gradients",
]


@dataclass
class ActivationTrace:
    """Everything forward computed, kept for the backward pass.

    pre[0] is None (the input has no pre-activation); post[0] is the input
    batch itself.  blocks are the bundles the pass actually used.
    """

    layers: tuple[int, ...]
    pre: list
    post: list
    blocks: dict[tuple[int, int], np.ndarray]


@dataclass
class Gradients:
    """Loss gradients mirroring SpectralParams' storage layout."""

    d_phi: list[np.ndarray]
    d_eig: list[np.ndarray]

    def max_abs(self) -> float:
        vals = [np.max(np.abs(a)) if a.size else 0.0 for a in self.d_phi + self.d_eig]
        return float(max(vals))


def _check_input(params: SpectralParams, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != params.layers[0]:
        raise DimensionError(
            f"input batch has shape {x.shape}, expected (n, {params.layers[0]})"
        )
    return x


def forward(params: SpectralParams, x: np.ndarray) -> tuple[np.ndarray, ActivationTrace]:
    """Run the network on a batch (samples are rows).

    Returns the output batch and the full activation trace.
    """
    x = _check_input(params, x)
    blocks = weight_blocks(params)
    last = params.b
    pre: list = [None]
    post: list = [x]
    for i in range(1, last + 1):
        z = np.zeros((x.shape[0], params.layers[i]))
        for j in range(i):
            z += post[j] @ blocks[(i, j)].T
        pre.append(z)
        post.append(z if i == last else np.maximum(z, 0.0))
    return post[last], ActivationTrace(params.layers, pre, post, blocks)


def backward(
    params: SpectralParams, trace: ActivationTrace, d_loss_d_y: np.ndarray
) -> Gradients:
    """Reverse-mode gradients of a scalar loss w.r.t. all spectral parameters.

    d_loss_d_y is the loss gradient at the network output, already carrying
    whatever batch normalization the loss applies; everything here just sums.
    """
    if trace.layers != params.layers:
        raise ConsistencyError(
            f"trace built for layers {trace.layers}, params have {params.layers}"
        )
    last = params.b
    d_loss_d_y = np.asarray(d_loss_d_y, dtype=np.float64)
    if d_loss_d_y.shape != trace.post[last].shape:
        raise DimensionError(
            f"output gradient has shape {d_loss_d_y.shape}, expected {trace.post[last].shape}"
        )

    # Stage one: back through the update rule, collecting one adjoint per
    # materialized bundle.
    w_adj: dict[tuple[int, int], np.ndarray] = {}
    act_adj = [np.zeros_like(trace.post[l]) for l in range(last)]
    for i in range(last, 0, -1):
        if i == last:
            d = d_loss_d_y
        else:
            d = act_adj[i] * (trace.pre[i] > 0.0)
        for j in range(i):
            w_adj[(i, j)] = d.T @ trace.post[j]
            if j > 0:
                act_adj[j] += d @ trace.blocks[(i, j)]

    # Stage two: push bundle adjoints through the closed form.  Each bundle
    # is sign * bracket(i) @ phi[i-2] @ ... @ phi[j]; the bracket collects
    # one adjoint per destination layer, every chain factor gets its own
    # left/right-sandwiched contribution.
    d_phi = [np.zeros_like(p) for p in params.phi]
    d_eig = [np.zeros_like(e) for e in params.eig]
    bracket_adj = [np.zeros_like(bracket(params, i)) for i in range(1, last + 1)]
    for i in range(1, last + 1):
        core = bracket(params, i)
        for j in range(i - 1, -1, -1):
            wa = w_adj[(i, j)]
            gap = i - 1 - j
            sign = -1.0 if gap % 2 else 1.0
            if gap == 0:
                bracket_adj[i - 1] += wa
                continue
            factors = [params.phi[i - 2 - q] for q in range(gap)]
            rights: list = [None] * gap
            acc = None
            for q in range(gap - 1, -1, -1):
                rights[q] = acc
                acc = factors[q] if acc is None else factors[q] @ acc
            bracket_adj[i - 1] += sign * (wa @ acc.T)
            left = sign * core
            for q in range(gap):
                sandwiched = left.T @ wa
                if rights[q] is not None:
                    sandwiched = sandwiched @ rights[q].T
                d_phi[i - 2 - q] += sandwiched
                left = left @ factors[q]

    # Bracket internals: columnwise source-eigenvalue scaling minus rowwise
    # destination-eigenvalue scaling of the coupling block.
    for i in range(1, last + 1):
        ba = bracket_adj[i - 1]
        p = params.phi[i - 1]
        d_phi[i - 1] += ba * params.eig[i - 1][np.newaxis, :]
        d_phi[i - 1] -= params.eig[i][:, np.newaxis] * ba
        d_eig[i - 1] += (ba * p).sum(axis=0)
        d_eig[i] -= (ba * p).sum(axis=1)

    if params.frozen_input:
        d_eig[0][:] = 0.0
    return Gradients(d_phi, d_eig)


def mse_value(y: np.ndarray, target: np.ndarray) -> float:
    """Mean squared error over batch and output dimensions together."""
    if y.shape != target.shape:
        raise DimensionError(f"prediction {y.shape} vs target {target.shape} mismatch")
    diff = y - target
    return float(np.mean(diff * diff))


def mse_grad(y: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Gradient of mse_value w.r.t. the predictions."""
    if y.shape != target.shape:
        raise DimensionError(f"prediction {y.shape} vs target {target.shape} mismatch")
    return 2.0 * (y - target) / y.size


@dataclass
class FiniteDiffResult:
    """Central-difference gradients plus the relu-kink exclusion masks.

    A parameter is flagged kinked when nudging it flips the sign of any
    hidden pre-activation between the two half-step evaluations; central
    differences straddle the relu corner there and cannot be compared against
    the analytic value, which commits to a zero derivative at the corner.
    """

    grads: Gradients
    kink_phi: list[np.ndarray]
    kink_eig: list[np.ndarray]

    def n_kinked(self) -> int:
        return int(sum(m.sum() for m in self.kink_phi + self.kink_eig))


def finite_difference_gradients(
    params: SpectralParams,
    x: np.ndarray,
    y_target: np.ndarray,
    eps: float = 1e-6,
) -> FiniteDiffResult:
    """Independent gradient oracle: central differences of the MSE loss.

    Perturbs every scalar parameter in both directions and differences the
    loss.  Frozen input eigenvalues are skipped (their gradient is pinned to
    zero by definition).  Purely a verification tool; quadratic cost in the
    parameter count.
    """
    x = _check_input(params, x)
    work = params.copy()
    last = work.b

    def eval_loss() -> tuple[float, list[np.ndarray]]:
        y, trace = forward(work, x)
        signs = [np.sign(trace.pre[i]) for i in range(1, last)]
        return mse_value(y, y_target), signs

    def probe(arr: np.ndarray, r, c=None) -> tuple[float, bool]:
        idx = r if c is None else (r, c)
        old = arr[idx]
        arr[idx] = old + eps
        loss_plus, signs_plus = eval_loss()
        arr[idx] = old - eps
        loss_minus, signs_minus = eval_loss()
        arr[idx] = old
        kinked = any(
            np.any(sp != sm) for sp, sm in zip(signs_plus, signs_minus)
        )
        return (loss_plus - loss_minus) / (2.0 * eps), kinked

    d_phi = [np.zeros_like(p) for p in work.phi]
    kink_phi = [np.zeros(p.shape, dtype=bool) for p in work.phi]
    for k, p in enumerate(work.phi):
        for r in range(p.shape[0]):
            for c in range(p.shape[1]):
                d_phi[k][r, c], kink_phi[k][r, c] = probe(p, r, c)

    d_eig = [np.zeros_like(e) for e in work.eig]
    kink_eig = [np.zeros(e.shape, dtype=bool) for e in work.eig]
    for l, e in enumerate(work.eig):
        if l == 0 and work.frozen_input:
            continue
        for r in range(e.shape[0]):
            d_eig[l][r], kink_eig[l][r] = probe(e, r)

    return FiniteDiffResult(Gradients(d_phi, d_eig), kink_phi, kink_eig)
