"""Dense kernel tests with independent oracles.

The matrix product is checked against a triple-loop evaluation, the
orthonormalization against defining properties of rotation matrices, and the
least-squares solver against both a hand-seeded gradient descent and the
normal-equation residual orthogonality that characterizes the optimum.
"""

import numpy as np
import pytest

from sparcs.errors import DegeneracyError, DimensionError
from sparcs.linalg import (
    as_matrix,
    frobenius_norm,
    least_squares,
    matmul,
    qr_orthonormal,
)


def matmul_loops(a, b):
    """Independent O(n^3) oracle for the matrix product."""
    n, k = a.shape
    k2, m = b.shape
    assert k == k2
    out = np.zeros((n, m))
    for i in range(n):
        for j in range(m):
            acc = 0.0
            for t in range(k):
                acc += a[i, t] * b[t, j]
            out[i, j] = acc
    return out


class TestAsMatrix:
    def test_accepts_nested_lists(self):
        m = as_matrix([[1, 2], [3, 4]])
        assert m.dtype == np.float64
        assert m.flags["C_CONTIGUOUS"]
        np.testing.assert_array_equal(m, [[1.0, 2.0], [3.0, 4.0]])

    def test_rejects_vector(self):
        with pytest.raises(DimensionError):
            as_matrix([1.0, 2.0, 3.0])

    def test_rejects_3d(self):
        with pytest.raises(DimensionError):
            as_matrix(np.zeros((2, 2, 2)))

    def test_rejects_nan(self):
        with pytest.raises(DegeneracyError):
            as_matrix([[1.0, np.nan]])

    def test_rejects_inf(self):
        with pytest.raises(DegeneracyError):
            as_matrix([[np.inf, 1.0]])


class TestMatmul:
    def test_hand_value(self):
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        b = np.array([[5.0, 6.0], [7.0, 8.0]])
        np.testing.assert_array_equal(matmul(a, b), [[19.0, 22.0], [43.0, 50.0]])

    def test_matches_triple_loop_oracle(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            n, k, m = rng.integers(1, 7, size=3)
            a = rng.standard_normal((n, k))
            b = rng.standard_normal((k, m))
            np.testing.assert_allclose(
                matmul(a, b), matmul_loops(a, b), rtol=0, atol=1e-12
            )

    def test_associativity(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            a = rng.standard_normal((4, 3))
            b = rng.standard_normal((3, 5))
            c = rng.standard_normal((5, 2))
            np.testing.assert_allclose(
                matmul(matmul(a, b), c), matmul(a, matmul(b, c)), atol=1e-12
            )

    def test_inner_dimension_mismatch(self):
        with pytest.raises(DimensionError) as exc:
            matmul(np.zeros((2, 3)), np.zeros((4, 2)))
        assert "(2, 3)" in str(exc.value) and "(4, 2)" in str(exc.value)

    def test_rejects_vectors(self):
        with pytest.raises(DimensionError):
            matmul(np.zeros(3), np.zeros((3, 2)))


class TestQrOrthonormal:
    def test_orthonormal_columns(self):
        rng = np.random.default_rng(42)
        for n in (1, 2, 3, 5, 8, 20):
            q = qr_orthonormal(rng.standard_normal((n, n)))
            np.testing.assert_allclose(q.T @ q, np.eye(n), atol=1e-12)

    def test_determinant_plus_one(self):
        rng = np.random.default_rng(3)
        for n in (2, 3, 4, 7):
            for _ in range(10):
                q = qr_orthonormal(rng.standard_normal((n, n)))
                assert np.linalg.det(q) == pytest.approx(1.0, abs=1e-10)

    def test_deterministic_in_input(self):
        g = np.random.default_rng(11).standard_normal((6, 6))
        np.testing.assert_array_equal(qr_orthonormal(g), qr_orthonormal(g.copy()))

    def test_identity_fixed_point(self):
        # An orthonormal input with positive-diagonal R factor maps to itself.
        np.testing.assert_allclose(qr_orthonormal(np.eye(4)), np.eye(4), atol=1e-15)

    def test_rotation_2d_angle(self):
        # A 2-D Gaussian sample projects onto the rotation with the same
        # first-column direction: check against the explicit angle form.
        g = np.array([[3.0, 1.0], [4.0, 2.0]])
        q = qr_orthonormal(g)
        theta = np.arctan2(4.0, 3.0)
        expect = np.array(
            [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]]
        )
        np.testing.assert_allclose(q, expect, atol=1e-12)

    def test_norm_preservation(self):
        rng = np.random.default_rng(5)
        q = qr_orthonormal(rng.standard_normal((9, 9)))
        v = rng.standard_normal((9, 4))
        np.testing.assert_allclose(
            np.linalg.norm(q @ v, axis=0), np.linalg.norm(v, axis=0), atol=1e-12
        )

    def test_rejects_rectangular(self):
        with pytest.raises(DimensionError):
            qr_orthonormal(np.zeros((3, 4)))

    def test_rank_deficient_raises(self):
        g = np.ones((3, 3))
        with pytest.raises(DegeneracyError):
            qr_orthonormal(g)


def descend_least_squares(x, y, steps=20000, lr=None):
    """Independent oracle: plain gradient descent on ||x beta - y||^2."""
    n, d = x.shape
    beta = np.zeros((d, y.shape[1]))
    if lr is None:
        lr = 1.0 / (np.linalg.norm(x, 2) ** 2)
    for _ in range(steps):
        beta -= lr * (x.T @ (x @ beta - y))
    return beta


class TestLeastSquares:
    def test_exact_on_consistent_system(self):
        rng = np.random.default_rng(42)
        x = rng.standard_normal((12, 4))
        beta_true = rng.standard_normal((4, 3))
        beta = least_squares(x, x @ beta_true)
        np.testing.assert_allclose(beta, beta_true, atol=1e-9)

    def test_matches_gradient_descent_oracle(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal((30, 3))
        y = rng.standard_normal((30, 2))
        np.testing.assert_allclose(
            least_squares(x, y), descend_least_squares(x, y), atol=1e-7
        )

    def test_residual_orthogonal_to_columns(self):
        # The optimum is characterized by x^T (x beta - y) = 0.
        rng = np.random.default_rng(9)
        for _ in range(5):
            x = rng.standard_normal((25, 4))
            y = rng.standard_normal((25, 2))
            beta = least_squares(x, y)
            np.testing.assert_allclose(
                x.T @ (x @ beta - y), np.zeros((4, 2)), atol=1e-10
            )

    def test_hand_value_univariate(self):
        # Simple regression of y = 2 + 3 u on an intercept + slope design.
        u = np.array([0.0, 1.0, 2.0, 3.0])
        x = np.column_stack([np.ones(4), u])
        y = (2.0 + 3.0 * u).reshape(-1, 1)
        np.testing.assert_allclose(
            least_squares(x, y), [[2.0], [3.0]], atol=1e-12
        )

    def test_row_count_mismatch(self):
        with pytest.raises(DimensionError):
            least_squares(np.zeros((5, 2)), np.zeros((4, 1)))

    def test_underdetermined_rejected(self):
        with pytest.raises(DimensionError):
            least_squares(np.zeros((2, 5)), np.zeros((2, 1)))

    def test_collinear_columns_raise(self):
        x = np.ones((10, 2))
        y = np.arange(10, dtype=float).reshape(-1, 1)
        with pytest.raises(DegeneracyError):
            least_squares(x, y)


class TestFrobeniusNorm:
    def test_hand_value(self):
        assert frobenius_norm(np.array([[3.0, 4.0]])) == pytest.approx(5.0)

    def test_matches_elementwise_definition(self):
        rng = np.random.default_rng(2)
        t = rng.standard_normal((3, 4, 2))
        assert frobenius_norm(t) == pytest.approx(np.sqrt((t**2).sum()), abs=1e-12)

    def test_zero(self):
        assert frobenius_norm(np.zeros((4, 4))) == 0.0
