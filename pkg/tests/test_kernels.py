import time

import numpy as np
import pytest

from tpcmg import (BandedCorrection, BlockVector, RectToeplitzSpec,
                   ToeplitzSpec, TpcOperator, circulant_matvec,
                   rect_toeplitz_matvec_tall, rect_toeplitz_matvec_wide,
                   toeplitz_matvec, tpc_matvec)
from tpcmg.oracle import dense_expand

from conftest import dense_toeplitz, random_tpc


class TestCirculant:
    def test_identity(self):
        assert np.allclose(circulant_matvec([1, 0, 0], [3, 7, 2]), [3, 7, 2])

    def test_cyclic_shift(self):
        assert np.allclose(circulant_matvec([0, 1, 0], [1, 2, 3]), [3, 1, 2])

    def test_constant_nullspace(self):
        out = circulant_matvec([2, -1, -1], [1, 1, 1])
        assert np.abs(out).max() < 1e-14

    def test_identity_neutrality(self, rng):
        n = 17
        c = rng.standard_normal(n)
        x = rng.standard_normal(n)
        e1 = np.zeros(n)
        e1[0] = 1.0
        once = circulant_matvec(c, x)
        twice = circulant_matvec(c, circulant_matvec(e1, x))
        assert np.abs(once - twice).max() < 1e-13

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            circulant_matvec([1, 0], [1, 2, 3])


class TestToeplitz:
    def test_tridiagonal_laplacian_on_constants(self):
        # offsets -2..2: (t_{-1}, t_0, t_1) = (-1, 2, -1)
        spec = ToeplitzSpec(3, [0, -1, 2, -1, 0], symmetric=True)
        assert np.allclose(toeplitz_matvec(spec, [1, 1, 1]), [1, 0, 1])

    def test_identity(self, rng):
        spec = ToeplitzSpec.identity(9)
        x = rng.standard_normal(9)
        assert np.allclose(toeplitz_matvec(spec, x), x)

    def test_random_vs_dense_m257(self, rng):
        m = 257
        spec = ToeplitzSpec(m, rng.standard_normal(2 * m - 1))
        x = rng.standard_normal(m)
        ref = dense_toeplitz(spec) @ x
        assert np.abs(toeplitz_matvec(spec, x) - ref).max() < 1e-12 * np.abs(ref).max()

    @pytest.mark.parametrize("m", [1, 2, 3, 5, 64, 129, 1000])
    def test_sizes_vs_dense(self, rng, m):
        spec = ToeplitzSpec(m, rng.standard_normal(2 * m - 1))
        x = rng.standard_normal(m)
        ref = dense_toeplitz(spec) @ x
        scale = 1.0 + np.abs(x).max() * np.abs(spec.coeffs).sum()
        assert np.abs(toeplitz_matvec(spec, x) - ref).max() <= 1e-11 * scale

    @pytest.mark.slow
    def test_scaled_accuracy_invariant(self, rng):
        # 100 random trials, sizes up to m = 4097, scaled tolerance
        sizes = np.unique(np.geomspace(2, 4097, 99).astype(int)).tolist() + [4097]
        while len(sizes) < 100:
            sizes.append(int(rng.integers(2, 4098)))
        for m in sizes:
            spec = ToeplitzSpec(m, rng.standard_normal(2 * m - 1))
            x = rng.standard_normal(m)
            ref = dense_toeplitz(spec) @ x
            scale = 1.0 + np.abs(x).max() * np.abs(spec.coeffs).sum()
            assert np.abs(toeplitz_matvec(spec, x) - ref).max() <= 1e-11 * scale

    def test_symmetric_flag_validation(self):
        with pytest.raises(ValueError):
            ToeplitzSpec(2, [1.0, 2.0, 3.0], symmetric=True)

    def test_window_storage(self):
        spec = ToeplitzSpec(100, np.zeros(199))
        assert spec.stored_count == 1
        c = np.zeros(199)
        c[99 + 3] = 5.0
        spec = ToeplitzSpec(100, c)
        assert spec.stored_count == 1
        assert spec.coeff(3) == 5.0
        assert spec.coeff(4) == 0.0
        assert np.array_equal(spec.coeffs, c)

    def test_length_mismatch(self):
        spec = ToeplitzSpec.identity(4)
        with pytest.raises(ValueError):
            toeplitz_matvec(spec, np.ones(5))


class TestRectToeplitz:
    def test_wide_all_ones(self):
        B = RectToeplitzSpec(2, 3, np.ones(4))
        assert np.allclose(rect_toeplitz_matvec_wide(B, [1, 1, 1]), [3, 3])

    def test_wide_basis_vector_gives_first_column(self):
        M, N = 4, 7
        coeffs = np.arange(-(M - 1), N, dtype=float)
        B = RectToeplitzSpec(M, N, coeffs)
        e1 = np.zeros(N)
        e1[0] = 1.0
        first_col = np.array([B.coeff(-i) for i in range(M)])
        assert np.allclose(rect_toeplitz_matvec_wide(B, e1), first_col)

    def test_tall_all_ones(self):
        C = RectToeplitzSpec(3, 2, np.ones(4))
        assert np.allclose(rect_toeplitz_matvec_tall(C, [1, 1]), [2, 2, 2])

    def test_tall_identity_prefix(self, rng):
        # C = first M columns of the N x N identity: result is [v; zeros]
        N, M = 6, 4
        coeffs = np.zeros(N + M - 1)
        coeffs[N - 1] = 1.0    # offset 0
        C = RectToeplitzSpec(N, M, coeffs)
        v = rng.standard_normal(M)
        out = rect_toeplitz_matvec_tall(C, v)
        assert np.allclose(out, np.concatenate([v, np.zeros(N - M)]))

    @pytest.mark.parametrize("shape", [(63, 64), (17, 40), (2, 3)])
    def test_wide_vs_dense(self, rng, shape):
        M, N = shape
        coeffs = rng.standard_normal(M + N - 1)
        B = RectToeplitzSpec(M, N, coeffs)
        dense = np.array([[B.coeff(j - i) for j in range(N)] for i in range(M)])
        w = rng.standard_normal(N)
        assert np.abs(rect_toeplitz_matvec_wide(B, w) - dense @ w).max() < 1e-12 * (
            1 + np.abs(dense @ w).max())

    @pytest.mark.parametrize("shape", [(64, 63), (40, 17), (3, 2)])
    def test_tall_vs_dense(self, rng, shape):
        N, M = shape
        coeffs = rng.standard_normal(N + M - 1)
        C = RectToeplitzSpec(N, M, coeffs)
        dense = np.array([[C.coeff(j - i) for j in range(M)] for i in range(N)])
        v = rng.standard_normal(M)
        assert np.abs(rect_toeplitz_matvec_tall(C, v) - dense @ v).max() < 1e-12 * (
            1 + np.abs(dense @ v).max())

    def test_orientation_errors(self):
        sq = RectToeplitzSpec(3, 3, np.ones(5))
        with pytest.raises(ValueError):
            rect_toeplitz_matvec_wide(sq, np.ones(3))
        with pytest.raises(ValueError):
            rect_toeplitz_matvec_tall(sq, np.ones(3))


class TestBlockVector:
    def test_round_trip(self):
        bv = BlockVector([1.0, 2.0], [3.0, 4.0, 5.0])
        assert bv.n == 5 and bv.m == 2
        assert np.array_equal(bv.v, [1, 2])
        assert np.array_equal(bv.w, [3, 4, 5])
        again = BlockVector.from_array(bv.data)
        assert np.array_equal(again.data, bv.data)

    def test_length_validation(self):
        with pytest.raises(ValueError):
            BlockVector([1.0, 2.0], [3.0, 4.0])
        with pytest.raises(ValueError):
            BlockVector.from_array(np.ones(4))


class TestBanded:
    def test_matvec_vs_dense(self, rng):
        n = 13
        bands = {0: rng.standard_normal(n), 1: rng.standard_normal(n - 1),
                 -2: rng.standard_normal(n - 2)}
        bc = BandedCorrection(n, bands)
        x = rng.standard_normal(n)
        assert np.abs(bc.matvec(x) - bc.dense() @ x).max() < 1e-13

    def test_band_length_validation(self):
        with pytest.raises(ValueError):
            BandedCorrection(5, {1: np.ones(5)})


class TestTpcOperator:
    def test_identity(self, rng):
        op = TpcOperator.identity(6)
        x = rng.standard_normal(13)
        assert np.allclose(op.matvec(x), x)

    def test_example_fine_cross_column(self):
        # identity diagonals, all-ones off blocks; column through the center
        m = 7
        op = TpcOperator(
            ToeplitzSpec.identity(m), ToeplitzSpec(m, np.ones(2 * m - 1)),
            ToeplitzSpec(m, np.ones(2 * m - 1)), ToeplitzSpec.identity(m),
            np.ones(m), np.ones(m), np.zeros(m), np.zeros(m), 1.0)
        e = np.zeros(op.n)
        e[m] = 1.0
        assert np.allclose(op.matvec(e), dense_expand(op)[:, m])

    def test_random_vs_dense_with_banded(self, rng):
        m = 63
        op = random_tpc(rng, m, symmetric=True, banded_bw=1)
        x = rng.standard_normal(op.n)
        ref = dense_expand(op) @ x
        assert np.abs(op.matvec(x) - ref).max() <= 1e-11 * (1 + np.abs(ref).max())

    def test_linearity(self, rng):
        op = random_tpc(rng, 15, banded_bw=1)
        x, y = rng.standard_normal(op.n), rng.standard_normal(op.n)
        a, b = 0.7, -1.3
        lhs = op.matvec(a * x + b * y)
        rhs = a * op.matvec(x) + b * op.matvec(y)
        assert np.abs(lhs - rhs).max() < 1e-12 * (1 + np.abs(rhs).max())

    def test_block_vector_surface(self, rng):
        op = random_tpc(rng, 8)
        bv = BlockVector(rng.standard_normal(8), rng.standard_normal(9))
        out = tpc_matvec(op, bv)
        assert isinstance(out, BlockVector)
        assert np.allclose(out.data, op.matvec(bv.data))

    def test_symmetric_flag_validation(self, rng):
        op = random_tpc(rng, 5)
        with pytest.raises(ValueError):
            TpcOperator(op.A, op.Bbar, op.Cbar, op.Dbar, op.p, op.q, op.xi,
                        op.zeta, op.o, symmetric=True)

    def test_scale_shift(self, rng):
        op = random_tpc(rng, 9, symmetric=True, banded_bw=0)
        shifted = op.scale_shift(0.25, 2.0)
        dense = dense_expand(op)
        ref = 2.0 * np.eye(op.n) + 0.25 * dense
        assert np.abs(dense_expand(shifted) - ref).max() < 1e-13
        assert shifted.symmetric

    def test_size_mismatch(self, rng):
        op = random_tpc(rng, 5)
        with pytest.raises(ValueError):
            op.matvec(np.ones(op.n + 1))


@pytest.mark.slow
def test_toeplitz_matvec_runtime_growth(rng):
    """time(4n)/time(n) <= 5.5, median of 5, for n in {2^12, 2^14}."""
    def median_time(spec, x):
        toeplitz_matvec(spec, x)   # warm the cached symbol and FFT plan
        times = []
        for _ in range(5):
            t0 = time.perf_counter()
            toeplitz_matvec(spec, x)
            times.append(time.perf_counter() - t0)
        return float(np.median(times))

    for attempt in range(2):
        ok = True
        for n in (2 ** 12, 2 ** 14):
            spec1 = ToeplitzSpec(n, rng.standard_normal(2 * n - 1))
            spec4 = ToeplitzSpec(4 * n, rng.standard_normal(8 * n - 1))
            t1 = median_time(spec1, rng.standard_normal(n))
            t4 = median_time(spec4, rng.standard_normal(4 * n))
            ok = ok and (t4 / t1 <= 5.5)
        if ok:
            break
    assert ok
