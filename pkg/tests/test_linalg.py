"""Dense-matrix helpers: ranks, positivity, isometric completions."""

from __future__ import annotations

import itertools

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from colligate import (
    DimensionError,
    OrthogonalityError,
    PaddingError,
    RankError,
    injective_on_range,
    is_isometry,
    is_psd,
    isometric_factor,
    max_abs,
    numerical_rank,
    orthonormal_range_basis,
    random_isometry,
)


def _randc(rng, rows, cols):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


class TestMaxAbs:
    def test_picks_largest_modulus(self):
        assert max_abs(np.array([[1.0, -2.0], [0.5j, 1.5 + 2j]])) == pytest.approx(2.5)

    def test_empty_is_zero(self):
        assert max_abs(np.zeros((0, 3))) == 0.0


class TestIsIsometry:
    def test_accepts_unitary(self):
        rng = np.random.default_rng(0)
        q, _ = np.linalg.qr(_randc(rng, 5, 5))
        assert is_isometry(q)

    def test_accepts_tall_isometry(self):
        assert is_isometry(random_isometry(6, 2, seed=1))

    def test_rejects_contraction(self):
        assert not is_isometry(0.5 * np.eye(3))

    def test_wide_matrix_is_an_error(self):
        with pytest.raises(DimensionError):
            is_isometry(np.ones((2, 4)))

    def test_tolerance_boundary(self):
        m = np.eye(3) * np.sqrt(1.0 + 5e-7)
        assert is_isometry(m, atol=1e-6)
        assert not is_isometry(m, atol=1e-8)


class TestIsPsd:
    def test_gram_matrix_passes(self):
        rng = np.random.default_rng(2)
        g = _randc(rng, 4, 6)
        assert is_psd(g @ g.conj().T)

    def test_negative_direction_fails(self):
        assert not is_psd(np.diag([1.0, -0.1, 3.0]))

    def test_non_hermitian_fails(self):
        m = np.array([[1.0, 1.0], [0.0, 1.0]])
        assert not is_psd(m)

    def test_empty_matrix_passes(self):
        assert is_psd(np.zeros((0, 0)))

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_gram_positivity_property(self, seed):
        rng = np.random.default_rng(seed)
        rows = int(rng.integers(1, 6))
        cols = int(rng.integers(1, 6))
        g = _randc(rng, rows, cols)
        assert is_psd(g @ g.conj().T, atol=1e-10)


class TestNumericalRank:
    def test_outer_product_has_rank_one(self):
        rng = np.random.default_rng(3)
        u = _randc(rng, 5, 1)
        v = _randc(rng, 1, 4)
        assert numerical_rank(u @ v) == 1

    def test_sum_of_independent_outer_products(self):
        rng = np.random.default_rng(4)
        m = sum(_randc(rng, 6, 1) @ _randc(rng, 1, 6) for _ in range(3))
        assert numerical_rank(m) == 3

    def test_threshold_is_absolute_below_unit_scale(self):
        rng = np.random.default_rng(5)
        tiny = 1e-20 * _randc(rng, 4, 4)
        assert numerical_rank(tiny) == 0

    def test_scaling_does_not_change_rank_above_unit_scale(self):
        rng = np.random.default_rng(6)
        u = _randc(rng, 5, 2)
        m = 1e8 * (u @ u.conj().T)
        assert numerical_rank(m) == 2


class TestOrthonormalRangeBasis:
    def test_columns_are_orthonormal_and_span(self):
        rng = np.random.default_rng(7)
        m = _randc(rng, 6, 3) @ _randc(rng, 3, 5)
        q = orthonormal_range_basis(m)
        assert q.shape == (6, 3)
        npt.assert_allclose(q.conj().T @ q, np.eye(3), atol=1e-12)
        npt.assert_allclose(q @ (q.conj().T @ m), m, atol=1e-10)

    def test_zero_matrix_gives_empty_basis(self):
        assert orthonormal_range_basis(np.zeros((4, 2))).shape == (4, 0)


class TestIsometricFactor:
    def test_reconstructs_the_input(self):
        rng = np.random.default_rng(8)
        d2 = _randc(rng, 6, 2)
        left, y = isometric_factor(d2, 3)
        assert left.shape == (6, 3)
        assert is_isometry(left, atol=1e-12)
        npt.assert_allclose(left @ y, d2, atol=1e-12)

    def test_padding_respects_orthogonal_to(self):
        e = np.eye(6, dtype=np.complex128)
        d2 = e[:, :1] @ np.ones((1, 2))
        other = e[:, 3:5]
        left, y = isometric_factor(d2, 3, orthogonal_to=other)
        npt.assert_allclose(left @ y, d2, atol=1e-12)
        assert max_abs(left.conj().T @ other) < 1e-12

    def test_rank_above_target_is_rejected(self):
        rng = np.random.default_rng(9)
        with pytest.raises(RankError):
            isometric_factor(_randc(rng, 5, 4), 2)

    def test_overlapping_ranges_are_rejected(self):
        e = np.eye(4, dtype=np.complex128)
        with pytest.raises(OrthogonalityError):
            isometric_factor(e[:, :2], 2, orthogonal_to=e[:, 1:3])

    def test_no_room_to_pad_is_rejected(self):
        e = np.eye(3, dtype=np.complex128)
        with pytest.raises(PaddingError):
            isometric_factor(e[:, :1], 2, orthogonal_to=e[:, 1:])

    def test_zero_input_with_zero_columns(self):
        left, y = isometric_factor(np.zeros((4, 2)), 0)
        assert left.shape == (4, 0)
        assert y.shape == (0, 2)


def _range_intersection_dim(a: np.ndarray, b: np.ndarray) -> int:
    """Dimension of the intersection of ranges by rank counting."""
    ra = numerical_rank(a)
    rb = numerical_rank(b)
    return ra + rb - numerical_rank(np.hstack([a, b]))


class TestInjectiveOnRange:
    def test_vacuous_when_range_is_trivial(self):
        assert injective_on_range(np.zeros((2, 3)), np.zeros((3, 2)))

    def test_detects_kernel_overlap(self):
        # mstar kills e0; r's range contains e0
        mstar = np.diag([0.0, 1.0, 1.0])
        r = np.eye(3)[:, :1]
        assert not injective_on_range(mstar, r)

    def test_passes_when_kernel_misses_range(self):
        mstar = np.diag([0.0, 1.0, 1.0])
        r = np.eye(3)[:, 1:]
        assert injective_on_range(mstar, r)

    def test_flat_operator_cannot_be_injective_on_big_range(self):
        mstar = np.ones((1, 3))
        r = np.eye(3)[:, :2]
        assert not injective_on_range(mstar, r)

    def test_against_kernel_intersection_oracle(self):
        # injectivity on range(r) fails exactly when ker(mstar) meets
        # range(r) nontrivially; compare with a rank-counting oracle on
        # small known-rank constructions
        rng = np.random.default_rng(10)
        for rows, cols, rank_m, rank_r in itertools.product(
            range(1, 5), range(1, 5), range(0, 4), range(0, 4)
        ):
            rank_m = min(rank_m, rows, cols)
            rank_r = min(rank_r, cols)
            mstar = (
                _randc(rng, rows, rank_m) @ _randc(rng, rank_m, cols)
                if rank_m
                else np.zeros((rows, cols), dtype=np.complex128)
            )
            r = (
                _randc(rng, cols, rank_r) @ _randc(rng, rank_r, 3)
                if rank_r
                else np.zeros((cols, 3), dtype=np.complex128)
            )
            _, _, vh = np.linalg.svd(mstar)
            kernel = vh[rank_m:].conj().T
            q = orthonormal_range_basis(r)
            if q.shape[1] == 0 or kernel.shape[1] == 0:
                expected = True
            else:
                expected = _range_intersection_dim(kernel, q) == 0
            assert injective_on_range(mstar, r) == expected, (
                rows,
                cols,
                rank_m,
                rank_r,
            )


class TestRandomIsometry:
    def test_deterministic_per_seed(self):
        npt.assert_array_equal(random_isometry(5, 3, seed=11), random_isometry(5, 3, seed=11))

    def test_distinct_seeds_differ(self):
        assert max_abs(random_isometry(5, 3, seed=0) - random_isometry(5, 3, seed=1)) > 1e-3

    def test_is_isometry(self):
        assert is_isometry(random_isometry(7, 4, seed=12), atol=1e-12)

    def test_too_few_rows_is_an_error(self):
        with pytest.raises(DimensionError):
            random_isometry(2, 3, seed=0)
