"""Dense matrix kernels used by every other module.

Matrices are two-dimensional float64 numpy arrays in row-major (C) order.
The helpers here are thin, contract-checked wrappers: shapes are validated
up front with errors that name both operands, and outputs are guaranteed
finite.  Anything heavier (eigendecompositions, sparse storage) is out of
scope on purpose; the whole point of the spectral parametrization is that
training never diagonalizes anything.
"""

from __future__ import annotations

import numpy as np

from .errors import DegeneracyError, DimensionError

__all__ = [
    "as_matrix",
    "matmul",
    "qr_orthonormal",
    "least_squares",
    "frobenius_norm",
]

# Pivot floor for the symmetric solve in least_squares.
_PIVOT_TOL = 1e-12


def as_matrix(data) -> np.ndarray:
    """Coerce array-like input to a 2-D float64 C-order array.

    Raises DimensionError for anything that is not two-dimensional and
    DegeneracyError if the payload contains NaN or Inf.
    """
    a = np.asarray(data, dtype=np.float64, order="C")
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DegeneracyError(f"matrix of shape {a.shape} contains non-finite entries")
    return a


def _check_finite(a: np.ndarray, op: str) -> np.ndarray:
    if not np.all(np.isfinite(a)):
        raise DegeneracyError(f"{op} produced non-finite entries")
    return a


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product a @ b with an explicit inner-dimension check."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2:
        raise DimensionError(
            f"matmul needs two matrices, got shapes {a.shape} and {b.shape}"
        )
    if a.shape[1] != b.shape[0]:
        raise DimensionError(
            f"matmul inner dimensions differ: {a.shape} @ {b.shape}"
        )
    return _check_finite(a @ b, "matmul")


def qr_orthonormal(g: np.ndarray) -> np.ndarray:
    """Project a square matrix onto the special orthogonal group.

    QR-factorize, flip column signs so the triangular factor has a positive
    diagonal (this makes the map deterministic), then flip one final column
    if needed so det(Q) = +1.  Gaussian input makes the result Haar-uniform
    over rotations, which is how benchmark teachers are drawn.
    """
    g = as_matrix(g)
    n, m = g.shape
    if n != m:
        raise DimensionError(f"qr_orthonormal needs a square matrix, got {g.shape}")
    q, r = np.linalg.qr(g)
    diag = np.diagonal(r)
    if np.any(np.abs(diag) < _PIVOT_TOL):
        raise DegeneracyError(
            f"qr_orthonormal input of shape {g.shape} is numerically rank-deficient"
        )
    q = q * np.sign(diag)[np.newaxis, :]
    if np.linalg.det(q) < 0.0:
        q[:, -1] = -q[:, -1]
    return _check_finite(q, "qr_orthonormal")


def _cholesky_solve(gram: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve gram @ beta = rhs for symmetric positive-definite gram.

    Plain Cholesky with an explicit pivot guard so near-singular normal
    matrices fail loudly instead of returning garbage.
    """
    n = gram.shape[0]
    low = np.zeros_like(gram)
    for k in range(n):
        pivot = gram[k, k] - low[k, :k] @ low[k, :k]
        if pivot < _PIVOT_TOL:
            raise DegeneracyError(
                f"normal matrix of shape {gram.shape} is singular (pivot {pivot:.3e})"
            )
        low[k, k] = np.sqrt(pivot)
        if k + 1 < n:
            low[k + 1 :, k] = (gram[k + 1 :, k] - low[k + 1 :, :k] @ low[k, :k]) / low[k, k]
    # forward then backward substitution, vectorized over rhs columns
    y = np.zeros_like(rhs)
    for k in range(n):
        y[k] = (rhs[k] - low[k, :k] @ y[:k]) / low[k, k]
    beta = np.zeros_like(rhs)
    for k in range(n - 1, -1, -1):
        beta[k] = (y[k] - low[k + 1 :, k] @ beta[k + 1 :]) / low[k, k]
    return beta


def least_squares(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Minimize ||x @ beta - y||_F via the normal equations.

    x is (n, d) with n >= d, y is (n, m); returns beta of shape (d, m).
    The normal matrix is solved symmetrically; a pivot below 1e-12 raises
    DegeneracyError rather than silently regularizing.
    """
    x = as_matrix(x)
    y = as_matrix(y)
    if x.shape[0] != y.shape[0]:
        raise DimensionError(
            f"least_squares row counts differ: x {x.shape} vs y {y.shape}"
        )
    if x.shape[0] < x.shape[1]:
        raise DimensionError(
            f"least_squares is underdetermined: x {x.shape} has fewer rows than columns"
        )
    beta = _cholesky_solve(x.T @ x, x.T @ y)
    return _check_finite(beta, "least_squares")


def frobenius_norm(t: np.ndarray) -> float:
    """Frobenius norm of an array of any shape (flattened 2-norm)."""
    t = np.asarray(t, dtype=np.float64)
    out = float(np.linalg.norm(t.ravel()))
    if not np.isfinite(out):
        raise DegeneracyError("frobenius_norm produced a non-finite value")
    return out
