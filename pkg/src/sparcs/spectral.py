"""Spectral parametrization of layered networks with skip connections.

A network with layers of sizes (N_1, ..., N_{B+1}) is represented by the
adjacency matrix of a weighted multipartite graph.  Instead of storing the
inter-layer weight bundles directly, the adjacency matrix is parametrized
through its spectral decomposition: a block lower-unitriangular eigenvector
matrix holding one rectangular block per adjacent layer pair, plus one real
eigenvalue per neuron.  Everything else (all weight bundles, including every
skip bundle between non-adjacent layers) is a closed-form function of those
quantities, so training the factors trains the whole network and no numerical
diagonalization ever happens.

Two facts make the closed forms possible:

* The eigenvector matrix is unit-diagonal with only sub-diagonal blocks
  filled, so it is "shift-like": subtracting the identity gives a nilpotent
  matrix whose powers march down one block diagonal at a time and vanish
  entirely at power B+1.
* Consequently its inverse is a polynomial in the matrix itself with
  alternating binomial coefficients, and the blocks of the inverse are
  alternating-sign chained products of the eigenvector blocks.

Layer indices run 0..B in code.  File formats and printed reports label
layers 1..B+1 for human consumption.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CapacityError,
    ConsistencyError,
    DegeneracyError,
    DimensionError,
    StructuralError,
)
from .linalg import frobenius_norm

__all__ = [
    "SpectralParams",
    "BinomialReport",
    "DirectModel",
    "validate_layers",
    "init_perceptron",
    "random_params",
    "block_pairs",
    "bracket",
    "weight_blocks",
    "phi_inverse_blocks",
    "phi_inverse_polynomial",
    "phi_dense",
    "assemble_dense_adjacency",
    "nilpotency_residual",
    "binomial_identities",
    "export_direct",
    "MAX_BINOMIAL_B",
    "DEAD_BLOCK_TOL",
]

# Exact-arithmetic envelope for the binomial identity checks: every
# coefficient and partial sum up to this depth fits comfortably in 128 bits,
# which keeps the contract portable to fixed-width integer implementations.
MAX_BINOMIAL_B = 60

# Blocks with Frobenius norm below this are treated as absent on export.
DEAD_BLOCK_TOL = 1e-12


def validate_layers(layers) -> tuple[int, ...]:
    """Check a layer-size list (length >= 2, every entry a positive int)."""
    sizes = tuple(int(n) for n in layers)
    if len(sizes) < 2:
        raise DimensionError(f"need at least two layers, got sizes {sizes}")
    if any(n < 1 for n in sizes):
        raise DimensionError(f"layer sizes must be positive, got {sizes}")
    return sizes


@dataclass
class SpectralParams:
    """Complete spectral description of one network.

    phi[k] holds the eigenvector block coupling layer k to layer k+1 and has
    shape (layers[k+1], layers[k]).  eig[l] holds the eigenvalues attached to
    the neurons of layer l.  frozen_input pins the input eigenvalues to zero
    (they are never updated); frozen_output keeps the output eigenvalues out
    of the sparsity penalty, since switching output neurons off would destroy
    the regression target itself.
    """

    layers: tuple[int, ...]
    phi: list[np.ndarray]
    eig: list[np.ndarray]
    frozen_input: bool = True
    frozen_output: bool = True

    def __post_init__(self):
        self.layers = validate_layers(self.layers)
        b = len(self.layers) - 1
        if len(self.phi) != b:
            raise ConsistencyError(
                f"expected {b} coupling blocks for {len(self.layers)} layers, got {len(self.phi)}"
            )
        if len(self.eig) != b + 1:
            raise ConsistencyError(
                f"expected {b + 1} eigenvalue vectors, got {len(self.eig)}"
            )
        self.phi = [np.ascontiguousarray(p, dtype=np.float64) for p in self.phi]
        self.eig = [np.ascontiguousarray(e, dtype=np.float64) for e in self.eig]
        for k, p in enumerate(self.phi):
            want = (self.layers[k + 1], self.layers[k])
            if p.shape != want:
                raise DimensionError(
                    f"coupling block {k} has shape {p.shape}, expected {want}"
                )
        for l, e in enumerate(self.eig):
            if e.shape != (self.layers[l],):
                raise DimensionError(
                    f"eigenvalue vector {l} has shape {e.shape}, expected ({self.layers[l]},)"
                )
        if any(not np.all(np.isfinite(p)) for p in self.phi) or any(
            not np.all(np.isfinite(e)) for e in self.eig
        ):
            raise DegeneracyError("spectral parameters contain non-finite entries")
        if self.frozen_input and np.any(self.eig[0] != 0.0):
            raise ConsistencyError("frozen_input requires all input eigenvalues to be zero")

    @property
    def b(self) -> int:
        """Number of coupling blocks (layer count minus one)."""
        return len(self.layers) - 1

    @property
    def hidden_indices(self) -> range:
        """Code indices of the hidden layers."""
        return range(1, self.b)

    def copy(self) -> "SpectralParams":
        return SpectralParams(
            layers=self.layers,
            phi=[p.copy() for p in self.phi],
            eig=[e.copy() for e in self.eig],
            frozen_input=self.frozen_input,
            frozen_output=self.frozen_output,
        )

    def n_parameters(self) -> int:
        return sum(p.size for p in self.phi) + sum(e.size for e in self.eig)


def init_perceptron(layers, seed, frozen_input: bool = True, frozen_output: bool = True) -> SpectralParams:
    """Draw the standard starting point: an exact deep perceptron.

    Coupling blocks get Xavier-uniform entries with limit sqrt(6/(fan_in +
    fan_out)).  Eigenvalues are zero everywhere except the output layer,
    where they are one.  With zero eigenvalues on all but the output layer
    every bundle between layers below the output vanishes identically, hidden
    units receive no input, and the network computes a single linear map from
    input to output.  Training then reactivates exactly the eigenvalues (and
    with them the neurons) that the task requires.
    """
    sizes = validate_layers(layers)
    rng = np.random.default_rng(seed)
    phi = []
    for k in range(len(sizes) - 1):
        limit = math.sqrt(6.0 / (sizes[k] + sizes[k + 1]))
        phi.append(rng.uniform(-limit, limit, size=(sizes[k + 1], sizes[k])))
    eig = [np.zeros(n) for n in sizes[:-1]] + [np.ones(sizes[-1])]
    return SpectralParams(sizes, phi, eig, frozen_input, frozen_output)


def random_params(layers, rng, frozen_input: bool = False) -> SpectralParams:
    """Fully random parameters with entries uniform in [-1, 1].

    Convenience for verification sweeps and tests; not a training init.
    """
    sizes = validate_layers(layers)
    phi = [
        rng.uniform(-1.0, 1.0, size=(sizes[k + 1], sizes[k]))
        for k in range(len(sizes) - 1)
    ]
    eig = [rng.uniform(-1.0, 1.0, size=n) for n in sizes]
    if frozen_input:
        eig[0] = np.zeros(sizes[0])
    return SpectralParams(sizes, phi, eig, frozen_input, frozen_output=True)


def block_pairs(n_layers: int) -> list[tuple[int, int]]:
    """All ordered (destination, source) layer pairs with a weight bundle."""
    return [(i, j) for i in range(1, n_layers) for j in range(i)]


def bracket(params: SpectralParams, i: int) -> np.ndarray:
    """Core factor of every bundle arriving at layer i.

    Equals phi[i-1] scaled columnwise by the source-layer eigenvalues minus
    phi[i-1] scaled rowwise by the destination-layer eigenvalues.  Vanishes
    identically when both adjacent eigenvalue vectors are zero, which is what
    switches whole bundles off at the perceptron init.
    """
    p = params.phi[i - 1]
    return p * params.eig[i - 1][np.newaxis, :] - params.eig[i][:, np.newaxis] * p


def weight_blocks(params: SpectralParams) -> dict[tuple[int, int], np.ndarray]:
    """Materialize every weight bundle from the spectral parameters.

    The bundle from layer j into layer i is the bracket factor for layer i,
    chained through the coupling blocks of every intermediate layer, with a
    sign alternating in the layer gap:

        W[i, j] = (-1)^(i-j-1) * bracket(i) @ phi[i-2] @ ... @ phi[j]

    (the chain is empty for adjacent layers).  Blocks are returned for every
    (i, j) pair including all skips; this is pure bookkeeping on top of the
    parameters, recomputed on demand and never stored.
    """
    blocks: dict[tuple[int, int], np.ndarray] = {}
    for i in range(1, len(params.layers)):
        acc = bracket(params, i)
        blocks[(i, i - 1)] = acc
        sign = -1.0
        for j in range(i - 2, -1, -1):
            acc = acc @ params.phi[j]
            blocks[(i, j)] = sign * acc
            sign = -sign
    return blocks


def phi_inverse_blocks(params: SpectralParams) -> dict[tuple[int, int], np.ndarray]:
    """Sub-diagonal blocks of the inverse eigenvector matrix, closed form.

    The inverse of the unit-diagonal eigenvector matrix is again unit
    diagonal, with block (i, j) equal to the chained product of the coupling
    blocks from layer j up to layer i, carrying sign (-1)^(i-j):

        S[i, j] = (-1)^(i-j) * phi[i-1] @ phi[i-2] @ ... @ phi[j]

    Diagonal blocks are identities and everything above the diagonal is zero;
    only the sub-diagonal blocks are returned.
    """
    blocks: dict[tuple[int, int], np.ndarray] = {}
    for i in range(1, len(params.layers)):
        acc = params.phi[i - 1]
        sign = -1.0
        blocks[(i, i - 1)] = sign * acc
        for j in range(i - 2, -1, -1):
            acc = acc @ params.phi[j]
            sign = -sign
            blocks[(i, j)] = sign * acc
    return blocks


def _layer_offsets(layers) -> tuple[list[int], int]:
    offsets = [0]
    for n in layers:
        offsets.append(offsets[-1] + n)
    return offsets, offsets[-1]


def phi_dense(params: SpectralParams) -> np.ndarray:
    """Assemble the full eigenvector matrix: identity plus coupling blocks."""
    offsets, total = _layer_offsets(params.layers)
    full = np.eye(total)
    for k, p in enumerate(params.phi):
        full[offsets[k + 1] : offsets[k + 2], offsets[k] : offsets[k + 1]] = p
    return full


def phi_inverse_polynomial(params: SpectralParams) -> np.ndarray:
    """Inverse of the eigenvector matrix as an explicit matrix polynomial.

    Because the matrix minus the identity is nilpotent of index B+1, the
    inverse collapses to a degree-B polynomial with alternating binomial
    coefficients:

        inv = sum_{k=0}^{B} (-1)^k  C(B+1, k+1)  full^k

    This route shares no code with phi_inverse_blocks and serves as the
    independent check on it.
    """
    full = phi_dense(params)
    b = params.b
    total = full.shape[0]
    power = np.eye(total)
    out = np.zeros_like(full)
    for k in range(b + 1):
        coeff = float(math.comb(b + 1, k + 1))
        if k % 2 == 0:
            out += coeff * power
        else:
            out -= coeff * power
        if k < b:
            power = power @ full
    return out


def assemble_dense_adjacency(params: SpectralParams) -> np.ndarray:
    """Reconstitute the dense adjacency matrix from its factors.

    Computes eigenvectors @ diag(eigenvalues) @ inverse directly, with the
    inverse taken from the polynomial route.  The result must be block lower
    triangular with the eigenvalue vectors on the block diagonal and the
    weight bundles below it; tests and the verification command compare the
    closed-form bundles against sub-blocks of this matrix.
    """
    full = phi_dense(params)
    lam = np.concatenate(params.eig)
    inv = phi_inverse_polynomial(params)
    return (full * lam[np.newaxis, :]) @ inv


def nilpotency_residual(params: SpectralParams) -> float:
    """Max-norm of (eigenvectors - identity) raised to the layer count.

    Exact zero in infinite precision; the returned float measures how much
    rounding the chained products accumulated.
    """
    offsets, total = _layer_offsets(params.layers)
    shifted = phi_dense(params) - np.eye(total)
    power = shifted
    for _ in range(params.b):
        power = power @ shifted
    return float(np.max(np.abs(power)))


@dataclass
class BinomialReport:
    """Outcome of the exact integer identity checks."""

    max_b: int
    unit_sums_checked: int
    vanishing_sums_checked: int
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def binomial_identities(max_b: int) -> BinomialReport:
    """Verify the two alternating binomial sums behind the closed forms.

    First: sum_{k=0}^{B} (-1)^k C(B+1, k+1) = 1 for every B up to max_b.
    This is why the polynomial inverse has unit diagonal.

    Second: sum_{k=r}^{n} (-1)^k C(k, r) C(n, k) = 0 for every 1 <= r < n
    <= max_b.  This kills all cross terms when the polynomial inverse is
    multiplied back against the eigenvector matrix.  (At r = n the sum is
    (-1)^r, a single surviving term, so the strict inequality is part of the
    identity, not a limitation.)

    All arithmetic is exact integer arithmetic.  max_b beyond the documented
    envelope raises CapacityError instead of risking overflow on fixed-width
    platforms.
    """
    if max_b < 1:
        raise DimensionError(f"max_b must be at least 1, got {max_b}")
    if max_b > MAX_BINOMIAL_B:
        raise CapacityError(
            f"max_b = {max_b} exceeds the exact-arithmetic envelope ({MAX_BINOMIAL_B})"
        )
    failures: list[str] = []
    unit_checked = 0
    for b in range(1, max_b + 1):
        total = sum((-1) ** k * math.comb(b + 1, k + 1) for k in range(b + 1))
        unit_checked += 1
        if total != 1:
            failures.append(f"unit sum at B={b} gave {total}")
    vanish_checked = 0
    for n in range(2, max_b + 1):
        for r in range(1, n):
            total = sum(
                (-1) ** k * math.comb(k, r) * math.comb(n, k) for k in range(r, n + 1)
            )
            vanish_checked += 1
            if total != 0:
                failures.append(f"vanishing sum at n={n}, r={r} gave {total}")
    return BinomialReport(max_b, unit_checked, vanish_checked, failures)


@dataclass
class DirectModel:
    """Materialized network: explicit weight bundles, no spectral structure.

    kept[l] lists the surviving neuron indices of layer l (referring to the
    original layer numbering).  entries holds one (destination, source,
    weights) triple per surviving bundle, already sliced down to the
    surviving neurons.  Layers whose kept list is empty have been removed
    outright and are reported by removed_layers().
    """

    layer_sizes: tuple[int, ...]
    kept: list[np.ndarray]
    entries: list[tuple[int, int, np.ndarray]]

    def removed_layers(self) -> list[int]:
        return [l for l, k in enumerate(self.kept) if k.size == 0]

    def active_size(self, l: int) -> int:
        return int(self.kept[l].size)

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Run the layered update rule on the materialized bundles.

        Samples are rows.  Hidden layers apply relu, the output layer is
        linear, and every surviving bundle (skips included) feeds its
        destination's pre-activation.
        """
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.layer_sizes[0]:
            raise DimensionError(
                f"input has shape {x.shape}, expected (n, {self.layer_sizes[0]})"
            )
        n_layers = len(self.layer_sizes)
        last = n_layers - 1
        incoming: dict[int, list[tuple[int, np.ndarray]]] = {}
        for dst, src, w in self.entries:
            incoming.setdefault(dst, []).append((src, w))
        acts: list[np.ndarray] = [x]
        for l in range(1, n_layers):
            z = np.zeros((x.shape[0], self.active_size(l)))
            for src, w in incoming.get(l, []):
                z += acts[src] @ w.T
            acts.append(z if l == last else np.maximum(z, 0.0))
        return acts[last]


def export_direct(params: SpectralParams, eig_threshold: float = 0.0) -> DirectModel:
    """Materialize the network and strip everything that cannot act.

    Three reductions are applied, in order:

    * bundles with Frobenius norm below DEAD_BLOCK_TOL are dropped;
    * hidden neurons whose eigenvalue magnitude falls below eig_threshold are
      removed, taking their rows and columns out of the adjacent bundles;
    * hidden neurons left with no surviving incoming connections are removed
      as well, cascading front to back, since they can only ever emit
      relu(0).

    With eig_threshold = 0 the reductions are lossless and the exported
    model's forward pass reproduces the spectral one.  Input and output
    neurons are never dropped; a threshold that would silence the entire
    output layer raises StructuralError, because output eigenvalues are the
    one set that must stay on for the task to exist at all.
    """
    if eig_threshold < 0.0:
        raise DimensionError(f"eig_threshold must be non-negative, got {eig_threshold}")
    sizes = params.layers
    last = params.b
    if eig_threshold > 0.0 and np.all(np.abs(params.eig[last]) < eig_threshold):
        raise StructuralError(
            "threshold would remove the entire output layer; output eigenvalues cannot be switched off"
        )
    kept: list[np.ndarray] = []
    for l, n in enumerate(sizes):
        if l == 0 or l == last:
            kept.append(np.arange(n))
        else:
            kept.append(np.flatnonzero(np.abs(params.eig[l]) >= eig_threshold))

    blocks = {
        pair: w
        for pair, w in weight_blocks(params).items()
        if frobenius_norm(w) >= DEAD_BLOCK_TOL
    }

    def sliced(i: int, j: int) -> np.ndarray | None:
        w = blocks.get((i, j))
        if w is None:
            return None
        w = w[np.ix_(kept[i], kept[j])]
        if w.size == 0 or frobenius_norm(w) < DEAD_BLOCK_TOL:
            return None
        return w

    # Front-to-back dead-neuron sweep: a hidden neuron with no surviving
    # incoming weight can never activate, and its removal can only silence
    # neurons further along, so one ascending pass settles everything.
    for l in range(1, last):
        if kept[l].size == 0:
            continue
        drive = np.zeros(kept[l].size)
        for j in range(l):
            w = sliced(l, j)
            if w is not None:
                drive += np.abs(w).sum(axis=1)
        kept[l] = kept[l][drive >= DEAD_BLOCK_TOL]

    entries = []
    for i, j in block_pairs(len(sizes)):
        w = sliced(i, j)
        if w is not None:
            entries.append((i, j, w))
    return DirectModel(sizes, kept, entries)
