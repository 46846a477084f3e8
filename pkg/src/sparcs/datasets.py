"""Benchmark regression datasets and their on-disk format.

Two generators ship:

* an interpolation family that blends a fixed linear map with a fixed
  nonlinear function of the input, steered by a mixing knob alpha and a
  sharpness knob beta, so the "amount of nonlinearity" in the target is a
  controlled quantity;
* a teacher network: one hidden relu layer sandwiched between two random
  rotations, giving a nonlinear target a linear regression provably cannot
  fit well.

Datasets are stored as CSV with '#' provenance comments followed by a
header row x1..xd,y1..ym.  Floats are written with full round-trip
precision, so save/load is bit-exact and reruns are byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DimensionError, ParseError
from .ioutil import format_float
from .linalg import qr_orthonormal

__all__ = [
    "Dataset",
    "gen_family",
    "gen_teacher",
    "add_bias_column",
    "save_csv",
    "load_csv",
    "family_csv_name",
    "teacher_csv_name",
]


@dataclass
class Dataset:
    x: np.ndarray
    y: np.ndarray
    provenance: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.float64)
        if self.x.ndim != 2 or self.y.ndim != 2:
            raise DimensionError(
                f"dataset arrays must be 2-D, got x {self.x.shape}, y {self.y.shape}"
            )
        if self.x.shape[0] != self.y.shape[0]:
            raise DimensionError(
                f"x has {self.x.shape[0]} rows but y has {self.y.shape[0]}"
            )

    @property
    def n(self) -> int:
        return self.x.shape[0]


def _uniform_inputs(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(-1.0, 1.0, size=(n, d))


def gen_family(alpha: float, beta: float, n: int, d: int = 2, seed: int = 0,
               w: np.ndarray | None = None) -> Dataset:
    """Linear-to-nonlinear interpolation family.

    The target blends w.x with x.x through saturating weights:

        y = 1/4 (1 - tanh(beta (alpha - 1/2))) w.x
          + 1/4 (1 + tanh(beta (alpha - 1/2))) x.x

    At large beta the blend is a step: alpha below one half gives the purely
    linear target at half strength, above one half the purely nonlinear one,
    and exactly one half mixes both at quarter strength.  w defaults to the
    all-ones vector.
    """
    if not 0.0 <= alpha <= 1.0:
        raise DimensionError(f"alpha must lie in [0, 1], got {alpha}")
    if beta <= 0.0:
        raise DimensionError(f"beta must be positive, got {beta}")
    if n < 1 or d < 1:
        raise DimensionError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    if w is None:
        w = np.ones(d)
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (d,):
        raise DimensionError(f"w has shape {w.shape}, expected ({d},)")
    rng = np.random.default_rng(seed)
    x = _uniform_inputs(n, d, rng)
    gate = float(np.tanh(beta * (alpha - 0.5)))
    lin = 0.25 * (1.0 - gate)
    non = 0.25 * (1.0 + gate)
    y = lin * (x @ w) + non * np.sum(x * x, axis=1)
    prov = {
        "generator": "family",
        "alpha": format_float(alpha),
        "beta": format_float(beta),
        "n": str(n),
        "d": str(d),
        "seed": str(seed),
    }
    return Dataset(x, y[:, np.newaxis], prov)


def gen_teacher(d: int, hidden: int, n: int, seed: int = 0) -> tuple[Dataset, tuple[np.ndarray, np.ndarray]]:
    """Teacher-network regression target built from two random rotations.

    The teacher computes w2 @ relu(w1 @ x) with w1, w2 independent rotation
    matrices (orthonormal, determinant +1, Haar via QR of Gaussian draws).
    Rotations preserve norms and relu only shrinks them, so the target never
    outgrows the input.  The construction needs hidden == d; anything else
    is rejected.  Returns the dataset and (w1, w2).
    """
    if hidden != d:
        raise DimensionError(
            f"teacher needs hidden == d for square rotations, got d={d}, hidden={hidden}"
        )
    if n < 1 or d < 1:
        raise DimensionError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    rng = np.random.default_rng(seed)
    w1 = qr_orthonormal(rng.standard_normal((d, d)))
    w2 = qr_orthonormal(rng.standard_normal((d, d)))
    x = _uniform_inputs(n, d, rng)
    y = np.maximum(x @ w1.T, 0.0) @ w2.T
    prov = {
        "generator": "teacher",
        "d": str(d),
        "n": str(n),
        "seed": str(seed),
    }
    return Dataset(x, y, prov), (w1, w2)


def add_bias_column(x: np.ndarray) -> np.ndarray:
    """Append a constant-one feature, the bias convention used throughout."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise DimensionError(f"expected a 2-D batch, got shape {x.shape}")
    return np.hstack([x, np.ones((x.shape[0], 1))])


def family_csv_name(alpha: float, beta: float, seed: int) -> str:
    return f"family_a{alpha:g}_b{beta:g}_seed{seed}.csv"


def teacher_csv_name(d: int, seed: int) -> str:
    return f"teacher_d{d}_seed{seed}.csv"


def save_csv(dataset: Dataset, path) -> None:
    """Write a dataset with provenance comments and full float precision."""
    d = dataset.x.shape[1]
    m = dataset.y.shape[1]
    lines = [f"# {k}: {v}" for k, v in dataset.provenance.items()]
    header = [f"x{i + 1}" for i in range(d)] + [f"y{i + 1}" for i in range(m)]
    lines.append(",".join(header))
    for xi, yi in zip(dataset.x, dataset.y):
        lines.append(",".join(format_float(v) for v in np.concatenate([xi, yi])))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def load_csv(path) -> Dataset:
    """Read a dataset written by save_csv; malformed lines name their number."""
    text = Path(path).read_text(encoding="ascii")
    prov: dict[str, str] = {}
    header: list[str] | None = None
    xs: list[list[float]] = []
    ys: list[list[float]] = []
    d = m = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if header is not None:
                raise ParseError(f"line {lineno}: comment after header")
            body = line[1:].strip()
            if ":" not in body:
                raise ParseError(f"line {lineno}: malformed provenance comment")
            key, val = body.split(":", 1)
            prov[key.strip()] = val.strip()
            continue
        if header is None:
            header = line.split(",")
            d = sum(1 for h in header if h.startswith("x"))
            m = sum(1 for h in header if h.startswith("y"))
            expect = [f"x{i + 1}" for i in range(d)] + [f"y{i + 1}" for i in range(m)]
            if d < 1 or m < 1 or header != expect:
                raise ParseError(f"line {lineno}: bad header {line!r}")
            continue
        fields = line.split(",")
        if len(fields) != d + m:
            raise ParseError(
                f"line {lineno}: expected {d + m} fields, got {len(fields)}"
            )
        try:
            vals = [float(f) for f in fields]
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
        xs.append(vals[:d])
        ys.append(vals[d:])
    if header is None or not xs:
        raise ParseError("line 0: no header or data rows found")
    return Dataset(np.array(xs), np.array(ys), prov)
