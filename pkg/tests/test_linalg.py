import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bootsparse.linalg import (
    DegenerateColumnError,
    mixed_norm,
    normalize_columns,
    row_support,
    select_rows,
)


class TestMixedNorm:
    def test_single_345_row(self):
        assert mixed_norm([[3.0, 4.0], [0.0, 0.0]], 1, 2) == pytest.approx(5.0)

    def test_sum_of_abs(self):
        assert mixed_norm([[3.0, 4.0], [0.0, 0.0]], 1, 1) == pytest.approx(7.0)

    def test_identity_rows(self):
        assert mixed_norm(np.eye(2), 1, 2) == pytest.approx(2.0)

    @pytest.mark.parametrize("p,q", [(0, 2), (1, 3), (2, 0.5), (np.inf, 2)])
    def test_rejects_unsupported_exponents(self, p, q):
        with pytest.raises(ValueError):
            mixed_norm(np.eye(2), p, q)

    def test_22_equals_frobenius(self):
        rng = np.random.default_rng(0)
        X = rng.standard_normal((7, 4))
        assert mixed_norm(X, 2, 2) == pytest.approx(
            float(np.linalg.norm(X.ravel())), abs=1e-12
        )

    @pytest.mark.parametrize("K", [1, 2, 5])
    def test_replicated_columns_sqrtK_identity(self, K):
        rng = np.random.default_rng(K)
        x = rng.standard_normal(9)
        X = np.tile(x[:, None], (1, K))
        expected = np.sqrt(K) * np.sum(np.abs(x))
        assert mixed_norm(X, 1, 2) == pytest.approx(float(expected), rel=1e-12)

    @given(
        c=st.floats(-50, 50, allow_nan=False),
        seed=st.integers(0, 2**16),
        p=st.sampled_from([1, 2]),
        q=st.sampled_from([1, 2]),
    )
    @settings(max_examples=50, deadline=None)
    def test_absolute_homogeneity(self, c, seed, p, q):
        X = np.random.default_rng(seed).standard_normal((5, 3))
        assert mixed_norm(c * X, p, q) == pytest.approx(
            abs(c) * mixed_norm(X, p, q), rel=1e-10, abs=1e-10
        )

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            mixed_norm([[np.nan, 0.0]], 1, 2)


class TestSelectRows:
    def setup_method(self):
        self.A = np.arange(6.0).reshape(3, 2)

    def test_plain_selection(self):
        out = select_rows(self.A, [0, 2])
        assert np.array_equal(out, self.A[[0, 2]])

    def test_duplicates_repeat_rows(self):
        out = select_rows(self.A, [1, 1])
        assert np.array_equal(out, np.stack([self.A[1], self.A[1]]))

    def test_full_range_is_identity(self):
        assert np.array_equal(select_rows(self.A, [0, 1, 2]), self.A)

    @pytest.mark.parametrize("bad", [[3], [-1], [0, 5]])
    def test_out_of_range(self, bad):
        with pytest.raises(IndexError):
            select_rows(self.A, bad)

    @given(st.data())
    @settings(max_examples=40, deadline=None)
    def test_union_is_concatenation(self, data):
        rng = np.random.default_rng(data.draw(st.integers(0, 2**16)))
        A = rng.standard_normal((6, 3))
        i1 = data.draw(st.lists(st.integers(0, 5), min_size=1, max_size=5))
        i2 = data.draw(st.lists(st.integers(0, 5), min_size=1, max_size=5))
        merged = select_rows(A, i1 + i2)
        stacked = np.vstack([select_rows(A, i1), select_rows(A, i2)])
        assert np.array_equal(merged, stacked)


class TestNormalizeColumns:
    def test_three_four_five(self):
        out, q = normalize_columns([[3.0], [4.0]])
        assert np.allclose(out, [[0.6], [0.8]])
        assert q == pytest.approx([0.2])

    def test_already_unit_columns(self):
        M = np.eye(3)
        out, q = normalize_columns(M)
        assert np.array_equal(out, M)
        assert np.allclose(q, np.ones(3))

    def test_random_columns_become_unit(self):
        M = np.random.default_rng(1).standard_normal((6, 4))
        out, _ = normalize_columns(M)
        norms = np.linalg.norm(out, axis=0)
        assert np.abs(norms - 1.0).max() < 1e-12

    def test_roundtrip_recovers_input(self):
        M = np.random.default_rng(2).standard_normal((5, 5))
        out, q = normalize_columns(M)
        assert np.abs(out / q - M).max() < 1e-12

    def test_zero_column_rejected(self):
        with pytest.raises(DegenerateColumnError):
            normalize_columns([[1.0, 0.0], [0.0, 0.0]])


class TestRowSupport:
    def test_zero_matrix_empty(self):
        assert row_support(np.zeros((4, 2))) == set()

    def test_tiny_row_filtered(self):
        X = np.array([[1.0, 1.0], [1e-9, 0.0]])
        assert row_support(X, 1e-4) == {0}

    def test_rel_tol_zero_keeps_nonzero_rows(self):
        assert row_support(np.eye(2), 0.0) == {0, 1}

    def test_vector_treated_as_column(self):
        assert row_support(np.array([0.0, 3.0, 0.0])) == {1}

    def test_rel_tol_domain(self):
        with pytest.raises(ValueError):
            row_support(np.eye(2), 1.0)
        with pytest.raises(ValueError):
            row_support(np.eye(2), -0.1)
