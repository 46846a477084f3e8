"""Core algebra tests.

The closed-form weight bundles and inverse blocks are verified three ways:
frozen scalar examples worked out by hand, the explicit matrix-polynomial
inverse (an independent code path), and the dense reassembly of the adjacency
matrix whose sub-blocks must reproduce every bundle.  The binomial identities
behind those closed forms are checked in exact integer arithmetic.
"""

import math

import numpy as np
import pytest

from sparcs.errors import (
    CapacityError,
    ConsistencyError,
    DegeneracyError,
    DimensionError,
    StructuralError,
)
from sparcs.spectral import (
    MAX_BINOMIAL_B,
    SpectralParams,
    assemble_dense_adjacency,
    binomial_identities,
    block_pairs,
    bracket,
    export_direct,
    init_perceptron,
    nilpotency_residual,
    phi_dense,
    phi_inverse_blocks,
    phi_inverse_polynomial,
    random_params,
    weight_blocks,
)


def scalar_params():
    """Three single-neuron layers with hand-checkable numbers.

    Couplings 2 and 3, eigenvalues 1, 4, 5.  Every block below was derived
    by hand and frozen; see the individual tests for the arithmetic.
    """
    return SpectralParams(
        layers=(1, 1, 1),
        phi=[np.array([[2.0]]), np.array([[3.0]])],
        eig=[np.array([1.0]), np.array([4.0]), np.array([5.0])],
        frozen_input=False,
    )


class TestSpectralParamsValidation:
    def test_minimal_two_layers(self):
        p = SpectralParams(
            layers=(2, 3),
            phi=[np.zeros((3, 2))],
            eig=[np.zeros(2), np.ones(3)],
        )
        assert p.b == 1
        assert list(p.hidden_indices) == []

    def test_hidden_indices_cover_interior(self):
        p = init_perceptron((2, 4, 5, 3), seed=0)
        assert list(p.hidden_indices) == [1, 2]

    def test_phi_shape_mismatch(self):
        with pytest.raises(DimensionError):
            SpectralParams(
                layers=(2, 3),
                phi=[np.zeros((2, 3))],  # transposed
                eig=[np.zeros(2), np.ones(3)],
            )

    def test_eig_length_mismatch(self):
        with pytest.raises(DimensionError):
            SpectralParams(
                layers=(2, 3),
                phi=[np.zeros((3, 2))],
                eig=[np.zeros(2), np.ones(4)],
            )

    def test_frozen_input_requires_zero_input_eigs(self):
        with pytest.raises(ConsistencyError):
            SpectralParams(
                layers=(2, 3),
                phi=[np.zeros((3, 2))],
                eig=[np.array([0.5, 0.0]), np.ones(3)],
                frozen_input=True,
            )

    def test_non_finite_rejected(self):
        with pytest.raises(DegeneracyError):
            SpectralParams(
                layers=(2, 3),
                phi=[np.full((3, 2), np.nan)],
                eig=[np.zeros(2), np.ones(3)],
            )

    def test_single_layer_rejected(self):
        with pytest.raises(DimensionError):
            SpectralParams(layers=(4,), phi=[], eig=[np.zeros(4)])

    def test_zero_width_layer_rejected(self):
        with pytest.raises(DimensionError):
            SpectralParams(
                layers=(2, 0),
                phi=[np.zeros((0, 2))],
                eig=[np.zeros(2), np.zeros(0)],
            )

    def test_copy_is_deep(self):
        p = init_perceptron((2, 3, 2), seed=1)
        q = p.copy()
        q.phi[0][0, 0] += 1.0
        assert p.phi[0][0, 0] != q.phi[0][0, 0]

    def test_n_parameters_counts_phi_and_eigs(self):
        p = init_perceptron((2, 3, 4), seed=0)
        # couplings: 3*2 + 4*3 = 18; eigenvalues: 2 + 3 + 4 = 9
        assert p.n_parameters() == 27


class TestInitPerceptron:
    def test_eig_structure(self):
        p = init_perceptron((3, 5, 4, 2), seed=9)
        np.testing.assert_array_equal(p.eig[0], np.zeros(3))
        np.testing.assert_array_equal(p.eig[1], np.zeros(5))
        np.testing.assert_array_equal(p.eig[2], np.zeros(4))
        np.testing.assert_array_equal(p.eig[3], np.ones(2))

    def test_xavier_uniform_bounds(self):
        p = init_perceptron((2, 3), seed=4)
        limit = math.sqrt(6.0 / (2 + 3))
        assert np.all(np.abs(p.phi[0]) <= limit)
        # A wide draw should actually use the range, not collapse near zero.
        wide = init_perceptron((200, 300), seed=4)
        wide_limit = math.sqrt(6.0 / 500)
        assert np.abs(wide.phi[0]).max() > 0.9 * wide_limit

    def test_deterministic_given_seed(self):
        a = init_perceptron((3, 4, 2), seed=123)
        b = init_perceptron((3, 4, 2), seed=123)
        for pa, pb in zip(a.phi, b.phi):
            np.testing.assert_array_equal(pa, pb)

    def test_different_seeds_differ(self):
        a = init_perceptron((3, 4, 2), seed=123)
        b = init_perceptron((3, 4, 2), seed=124)
        assert not np.array_equal(a.phi[0], b.phi[0])


class TestScalarClosedForms:
    """Single-neuron layers: every product is scalar arithmetic done by hand."""

    def test_bundle_values(self):
        w = weight_blocks(scalar_params())
        # bracket(1) = 2*1 - 4*2 = -6, adjacent so no chain, no sign flip
        assert w[(1, 0)][0, 0] == pytest.approx(-6.0)
        # bracket(2) = 3*4 - 5*3 = -3
        assert w[(2, 1)][0, 0] == pytest.approx(-3.0)
        # skip bundle: (-1)^(2-0-1) * bracket(2) * phi0 = -(-3)(2) = 6
        assert w[(2, 0)][0, 0] == pytest.approx(6.0)

    def test_inverse_block_values(self):
        s = phi_inverse_blocks(scalar_params())
        # adjacent inverse blocks are just the negated couplings
        assert s[(1, 0)][0, 0] == pytest.approx(-2.0)
        assert s[(2, 1)][0, 0] == pytest.approx(-3.0)
        # two-step block: (+1) * phi1 @ phi0 = 6
        assert s[(2, 0)][0, 0] == pytest.approx(6.0)

    def test_dense_adjacency_matrix(self):
        a = assemble_dense_adjacency(scalar_params())
        np.testing.assert_allclose(
            a,
            [[1.0, 0.0, 0.0], [-6.0, 4.0, 0.0], [6.0, -3.0, 5.0]],
            atol=1e-12,
        )

    def test_polynomial_inverse_is_true_inverse(self):
        p = scalar_params()
        full = phi_dense(p)
        inv = phi_inverse_polynomial(p)
        np.testing.assert_allclose(full @ inv, np.eye(3), atol=1e-12)
        np.testing.assert_allclose(inv @ full, np.eye(3), atol=1e-12)


class TestClosedFormsRandom:
    def test_polynomial_inverse_matches_numpy(self):
        rng = np.random.default_rng(42)
        for _ in range(10):
            depth = int(rng.integers(1, 6))
            sizes = tuple(int(s) for s in rng.integers(1, 7, size=depth + 1))
            p = random_params(sizes, rng)
            inv = phi_inverse_polynomial(p)
            np.testing.assert_allclose(
                inv, np.linalg.inv(phi_dense(p)), atol=1e-10
            )

    def test_inverse_blocks_match_polynomial(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            depth = int(rng.integers(1, 6))
            sizes = tuple(int(s) for s in rng.integers(1, 7, size=depth + 1))
            p = random_params(sizes, rng)
            inv = phi_inverse_polynomial(p)
            offsets = np.cumsum([0, *sizes])
            for (i, j), blk in phi_inverse_blocks(p).items():
                sub = inv[offsets[i] : offsets[i + 1], offsets[j] : offsets[j + 1]]
                np.testing.assert_allclose(blk, sub, atol=1e-10)

    def test_weight_blocks_match_dense_adjacency(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            depth = int(rng.integers(1, 6))
            sizes = tuple(int(s) for s in rng.integers(1, 7, size=depth + 1))
            p = random_params(sizes, rng)
            dense = assemble_dense_adjacency(p)
            offsets = np.cumsum([0, *sizes])
            blocks = weight_blocks(p)
            for i, j in block_pairs(len(sizes)):
                sub = dense[offsets[i] : offsets[i + 1], offsets[j] : offsets[j + 1]]
                np.testing.assert_allclose(blocks[(i, j)], sub, atol=1e-10)

    def test_dense_adjacency_diagonal_and_upper(self):
        rng = np.random.default_rng(5)
        sizes = (3, 4, 2, 5)
        p = random_params(sizes, rng)
        dense = assemble_dense_adjacency(p)
        offsets = np.cumsum([0, *sizes])
        for l, n in enumerate(sizes):
            sub = dense[offsets[l] : offsets[l + 1], offsets[l] : offsets[l + 1]]
            np.testing.assert_allclose(sub, np.diag(p.eig[l]), atol=1e-12)
        for i in range(len(sizes)):
            for j in range(i + 1, len(sizes)):
                sub = dense[offsets[i] : offsets[i + 1], offsets[j] : offsets[j + 1]]
                np.testing.assert_allclose(sub, 0.0, atol=1e-12)

    def test_perceptron_hidden_bundles_exactly_zero(self):
        # With all input and hidden eigenvalues zero, every bundle that does
        # not terminate at the output layer has an explicit zero factor, so
        # the result is exact zero, not merely small.
        p = init_perceptron((3, 4, 5, 2), seed=8)
        blocks = weight_blocks(p)
        last = p.b
        for (i, j), w in blocks.items():
            if i < last:
                np.testing.assert_array_equal(w, np.zeros_like(w))

    def test_bracket_vanishes_iff_adjacent_eigs_zero(self):
        rng = np.random.default_rng(11)
        p = random_params((3, 4, 2), rng)
        p.eig[0][:] = 0.0
        p.eig[1][:] = 0.0
        np.testing.assert_array_equal(bracket(p, 1), np.zeros((4, 3)))
        assert np.abs(bracket(p, 2)).max() > 0.0


class TestNilpotency:
    def test_two_layer_exact(self):
        rng = np.random.default_rng(0)
        p = random_params((3, 4), rng)
        assert nilpotency_residual(p) == 0.0

    def test_residual_small_for_deep_stack(self):
        rng = np.random.default_rng(1)
        for depth in (2, 3, 4, 5, 6):
            sizes = tuple(int(s) for s in rng.integers(1, 8, size=depth + 1))
            p = random_params(sizes, rng)
            assert nilpotency_residual(p) < 1e-9

    def test_lower_power_does_not_vanish(self):
        # The nilpotency index is exactly the layer count: one power lower
        # leaves the full chain product in the bottom-left block.
        rng = np.random.default_rng(2)
        sizes = (2, 3, 3, 2)
        p = random_params(sizes, rng)
        shifted = phi_dense(p) - np.eye(sum(sizes))
        power = np.linalg.matrix_power(shifted, p.b)
        assert np.abs(power).max() > 1e-6


class TestBinomialIdentities:
    def test_hand_values(self):
        # B = 3 unit sum: 4 - 6 + 4 - 1 = 1
        total = sum((-1) ** k * math.comb(4, k + 1) for k in range(4))
        assert total == 1
        # n = 4, r = 2 vanishing sum: 6 - 12 + 6 = 0
        total = sum((-1) ** k * math.comb(k, 2) * math.comb(4, k) for k in range(2, 5))
        assert total == 0

    def test_report_counts_and_ok(self):
        rep = binomial_identities(25)
        assert rep.ok
        assert rep.unit_sums_checked == 25
        # strict pairs 1 <= r < n <= 25: sum_{n=2..25} (n-1) = 300
        assert rep.vanishing_sums_checked == 300
        assert rep.failures == []

    def test_r_equal_n_is_excluded_for_a_reason(self):
        # At r = n the alternating sum leaves a single surviving term, so the
        # identity genuinely requires r < n; the checker must not test r = n.
        for n in (1, 2, 5, 9):
            total = sum(
                (-1) ** k * math.comb(k, n) * math.comb(n, k) for k in range(n, n + 1)
            )
            assert total == (-1) ** n

    def test_capacity_cap(self):
        assert binomial_identities(MAX_BINOMIAL_B).ok
        with pytest.raises(CapacityError):
            binomial_identities(MAX_BINOMIAL_B + 1)

    def test_rejects_zero(self):
        with pytest.raises(DimensionError):
            binomial_identities(0)


class TestExportDirect:
    def test_perceptron_collapses_to_single_bundle(self):
        p = init_perceptron((3, 4, 4, 2), seed=21)
        model = export_direct(p)
        assert model.removed_layers() == [1, 2]
        assert [model.active_size(l) for l in range(4)] == [3, 0, 0, 2]
        assert [(i, j) for i, j, _ in model.entries] == [(3, 0)]
        x = np.random.default_rng(0).uniform(-1, 1, (10, 3))
        expect = x @ weight_blocks(p)[(3, 0)].T
        np.testing.assert_allclose(model.forward(x), expect, atol=1e-12)

    def test_round_trip_exact_at_zero_threshold(self):
        from sparcs.network import forward

        rng = np.random.default_rng(13)
        p = random_params((3, 5, 4, 2), rng)
        model = export_direct(p, eig_threshold=0.0)
        x = rng.uniform(-1, 1, (20, 3))
        y_spec, _ = forward(p, x)
        np.testing.assert_allclose(model.forward(x), y_spec, atol=1e-10)

    def test_threshold_drops_hidden_neurons(self):
        rng = np.random.default_rng(17)
        p = random_params((3, 6, 2), rng)
        p.eig[1][:3] = np.array([1e-6, -1e-6, 0.0])  # three tiny eigenvalues
        p.eig[1][3:] = np.array([0.5, -0.7, 0.9])
        model = export_direct(p, eig_threshold=1e-3)
        assert model.active_size(1) == 3
        np.testing.assert_array_equal(model.kept[1], [3, 4, 5])

    def test_output_layer_protected(self):
        p = init_perceptron((3, 4, 2), seed=2)
        with pytest.raises(StructuralError):
            export_direct(p, eig_threshold=10.0)

    def test_negative_threshold_rejected(self):
        p = init_perceptron((3, 4, 2), seed=2)
        with pytest.raises(DimensionError):
            export_direct(p, eig_threshold=-0.1)

    def test_forward_validates_input_width(self):
        model = export_direct(init_perceptron((3, 4, 2), seed=2))
        with pytest.raises(DimensionError):
            model.forward(np.zeros((5, 7)))

    def test_dead_neuron_cascade(self):
        # Zero out the incoming couplings of two first-hidden-layer neurons;
        # with the input eigenvalues pinned at zero their only incoming bundle
        # is scaled by the layer eigenvalues, so killing those rows of the
        # coupling matrix silences the neurons and the export must drop them.
        rng = np.random.default_rng(23)
        p = random_params((3, 4, 2), rng, frozen_input=True)
        p.phi[0][1, :] = 0.0
        p.phi[0][2, :] = 0.0
        model = export_direct(p)
        np.testing.assert_array_equal(model.kept[1], [0, 3])
        from sparcs.network import forward

        x = rng.uniform(-1, 1, (15, 3))
        y_spec, _ = forward(p, x)
        np.testing.assert_allclose(model.forward(x), y_spec, atol=1e-10)


class TestBlockPairs:
    def test_enumeration(self):
        assert block_pairs(3) == [(1, 0), (2, 0), (2, 1)]

    def test_count_is_quadratic(self):
        assert len(block_pairs(5)) == 10
