"""Dataset-generator and CSV-format tests.

The family target is recomputed pointwise from its defining formula, the
teacher target from an independently assembled relu sandwich, and the CSV
round trip is held to byte identity so reruns of the pipelines can be
compared as files.
"""

import numpy as np
import pytest

from sparcs.datasets import (
    Dataset,
    add_bias_column,
    family_csv_name,
    gen_family,
    gen_teacher,
    load_csv,
    save_csv,
    teacher_csv_name,
)
from sparcs.errors import DimensionError, ParseError


class TestFamily:
    def test_pointwise_recompute(self):
        ds = gen_family(alpha=0.37, beta=7.0, n=50, d=3, seed=9)
        gate = np.tanh(7.0 * (0.37 - 0.5))
        w = np.ones(3)
        for xi, yi in zip(ds.x, ds.y):
            expect = 0.25 * (1 - gate) * (xi @ w) + 0.25 * (1 + gate) * (xi @ xi)
            assert yi[0] == pytest.approx(expect, abs=1e-15)

    def test_sharp_gate_saturates_linear(self):
        # At beta = 1e3 and alpha = 0 the nonlinear coefficient is
        # (1 + tanh(-500))/4, indistinguishable from zero in float64.
        ds = gen_family(alpha=0.0, beta=1e3, n=40, d=2, seed=1)
        expect = 0.5 * ds.x.sum(axis=1, keepdims=True)
        np.testing.assert_allclose(ds.y, expect, atol=1e-12)

    def test_sharp_gate_saturates_quadratic(self):
        ds = gen_family(alpha=1.0, beta=1e3, n=40, d=2, seed=1)
        expect = 0.5 * (ds.x**2).sum(axis=1, keepdims=True)
        np.testing.assert_allclose(ds.y, expect, atol=1e-12)

    def test_midpoint_mixes_equally(self):
        # tanh(0) = 0: both terms carry coefficient 1/4 regardless of beta.
        ds = gen_family(alpha=0.5, beta=123.0, n=30, d=2, seed=2)
        expect = 0.25 * ds.x.sum(axis=1, keepdims=True) + 0.25 * (ds.x**2).sum(
            axis=1, keepdims=True
        )
        np.testing.assert_allclose(ds.y, expect, atol=1e-15)

    def test_custom_weight_vector(self):
        w = np.array([2.0, -1.0])
        ds = gen_family(alpha=0.0, beta=1e3, n=20, d=2, seed=3, w=w)
        np.testing.assert_allclose(ds.y, 0.5 * (ds.x @ w)[:, None], atol=1e-12)

    def test_inputs_uniform_in_cube(self):
        ds = gen_family(alpha=0.5, beta=5.0, n=2000, d=2, seed=4)
        assert ds.x.min() >= -1.0 and ds.x.max() <= 1.0
        assert abs(ds.x.mean()) < 0.05

    def test_deterministic_per_seed(self):
        a = gen_family(alpha=0.3, beta=5.0, n=10, d=2, seed=7)
        b = gen_family(alpha=0.3, beta=5.0, n=10, d=2, seed=7)
        c = gen_family(alpha=0.3, beta=5.0, n=10, d=2, seed=8)
        np.testing.assert_array_equal(a.x, b.x)
        np.testing.assert_array_equal(a.y, b.y)
        assert not np.array_equal(a.x, c.x)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"alpha": -0.1},
            {"alpha": 1.1},
            {"beta": 0.0},
            {"n": 0},
            {"d": 0},
        ],
    )
    def test_invalid_arguments(self, kwargs):
        base = {"alpha": 0.5, "beta": 5.0, "n": 10, "d": 2}
        base.update(kwargs)
        with pytest.raises(DimensionError):
            gen_family(**base)

    def test_weight_shape_mismatch(self):
        with pytest.raises(DimensionError):
            gen_family(alpha=0.5, beta=5.0, n=10, d=3, w=np.ones(2))


class TestTeacher:
    def test_rotation_contracts(self):
        _, (w1, w2) = gen_teacher(d=6, hidden=6, n=5, seed=0)
        for w in (w1, w2):
            np.testing.assert_allclose(w @ w.T, np.eye(6), atol=1e-12)
            assert np.linalg.det(w) == pytest.approx(1.0, abs=1e-12)
        assert not np.allclose(w1, w2)

    def test_pointwise_recompute(self):
        ds, (w1, w2) = gen_teacher(d=4, hidden=4, n=30, seed=5)
        for xi, yi in zip(ds.x, ds.y):
            np.testing.assert_allclose(
                yi, w2 @ np.maximum(w1 @ xi, 0.0), atol=1e-14
            )

    def test_target_norm_never_exceeds_input_norm(self):
        # A rotation preserves the norm and relu only shrinks it, so the
        # composite map is 1-Lipschitz at the origin.
        ds, _ = gen_teacher(d=8, hidden=8, n=500, seed=6)
        nx = np.linalg.norm(ds.x, axis=1)
        ny = np.linalg.norm(ds.y, axis=1)
        assert np.all(ny <= nx + 1e-12)

    def test_target_is_genuinely_nonlinear(self):
        # Least-squares residual of the best linear fit stays well above
        # zero; a linear target would fit exactly.
        ds, _ = gen_teacher(d=5, hidden=5, n=4000, seed=7)
        xb = np.hstack([ds.x, np.ones((ds.n, 1))])
        beta, *_ = np.linalg.lstsq(xb, ds.y, rcond=None)
        resid = ds.y - xb @ beta
        assert float(np.mean(resid**2)) > 0.01 * float(np.mean(ds.y**2))

    def test_rejects_rectangular_teacher(self):
        with pytest.raises(DimensionError):
            gen_teacher(d=4, hidden=5, n=10)

    def test_deterministic_per_seed(self):
        a, (w1a, _) = gen_teacher(d=3, hidden=3, n=10, seed=11)
        b, (w1b, _) = gen_teacher(d=3, hidden=3, n=10, seed=11)
        np.testing.assert_array_equal(a.x, b.x)
        np.testing.assert_array_equal(w1a, w1b)


class TestBiasColumn:
    def test_appends_ones(self):
        x = np.array([[1.0, 2.0], [3.0, 4.0]])
        xb = add_bias_column(x)
        np.testing.assert_array_equal(xb[:, :2], x)
        np.testing.assert_array_equal(xb[:, 2], np.ones(2))

    def test_rejects_vector(self):
        with pytest.raises(DimensionError):
            add_bias_column(np.ones(3))


class TestCsvRoundTrip:
    def test_bit_exact_round_trip(self, tmp_path):
        ds = gen_family(alpha=0.4, beta=9.0, n=25, d=3, seed=13)
        path = tmp_path / "a.csv"
        save_csv(ds, path)
        back = load_csv(path)
        np.testing.assert_array_equal(back.x, ds.x)
        np.testing.assert_array_equal(back.y, ds.y)
        assert back.provenance == ds.provenance

    def test_two_saves_byte_identical(self, tmp_path):
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        save_csv(gen_family(alpha=0.4, beta=9.0, n=25, seed=13), p1)
        save_csv(gen_family(alpha=0.4, beta=9.0, n=25, seed=13), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_provenance_comments_written(self, tmp_path):
        ds, _ = gen_teacher(d=3, hidden=3, n=4, seed=2)
        path = tmp_path / "t.csv"
        save_csv(ds, path)
        text = path.read_text()
        assert "# generator: teacher" in text
        assert "# seed: 2" in text
        assert text.splitlines()[-1].count(",") == 5  # 3 inputs + 3 outputs

    def test_header_names_positional(self, tmp_path):
        ds, _ = gen_teacher(d=2, hidden=2, n=3, seed=2)
        path = tmp_path / "t.csv"
        save_csv(ds, path)
        header = [
            line
            for line in path.read_text().splitlines()
            if not line.startswith("#")
        ][0]
        assert header == "x1,x2,y1,y2"

    def test_parse_error_names_line_number(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("# generator: family\nx1,y1\n0.5,1.0\n0.5\n")
        with pytest.raises(ParseError, match="line 4"):
            load_csv(path)

    def test_parse_error_on_non_numeric(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x1,y1\n0.5,oops\n")
        with pytest.raises(ParseError, match="line 2"):
            load_csv(path)

    def test_parse_error_on_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x1,z1\n0.5,1.0\n")
        with pytest.raises(ParseError, match="line 1"):
            load_csv(path)

    def test_parse_error_on_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("\n")
        with pytest.raises(ParseError):
            load_csv(path)

    def test_dataset_rejects_row_mismatch(self):
        with pytest.raises(DimensionError):
            Dataset(np.zeros((3, 2)), np.zeros((4, 1)))

    def test_extreme_values_survive_round_trip(self, tmp_path):
        x = np.array([[1e-300, -1e300], [np.pi, 1 / 3]])
        y = np.array([[2**-52], [1.0 + 2**-52]])
        path = tmp_path / "x.csv"
        save_csv(Dataset(x, y), path)
        back = load_csv(path)
        np.testing.assert_array_equal(back.x, x)
        np.testing.assert_array_equal(back.y, y)


class TestNames:
    def test_family_name(self):
        assert family_csv_name(0.5, 1000.0, 42) == "family_a0.5_b1000_seed42.csv"

    def test_teacher_name(self):
        assert teacher_csv_name(10, 42) == "teacher_d10_seed42.csv"
