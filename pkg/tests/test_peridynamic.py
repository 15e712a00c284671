import numpy as np
import pytest

from tpcmg import (BlockVector, PdModelConfig, assemble_pd_system,
                   fold_boundary_rhs, pd_coefficients, pd_exact_forcing,
                   sample_collar)
from tpcmg.oracle import (dense_expand, pd_dense_reference,
                          pd_forcing_quadrature, pd_full_domain_operator,
                          sym_eig_extremes)


class TestCoefficients:
    def test_r1_values(self):
        co = pd_coefficients(1, symmetric=False)
        assert co.a.tolist() == [10.0, -1.0]
        assert co.a_half.tolist() == [-4.0]
        assert co.c.tolist() == [-9.0 / 4.0, 0.25]
        assert co.d.tolist() == [8.0, -2.0]

    def test_r2_values(self):
        co = pd_coefficients(2, symmetric=False)
        assert co.a.tolist() == [22.0, -2.0, -1.0]
        assert co.a_half.tolist() == [-4.0, -4.0]
        assert co.c.tolist() == [-2.0, -9.0 / 4.0, 0.25]
        assert co.d.tolist() == [20.0, -4.0, -2.0]

    @pytest.mark.parametrize("r", [1, 2, 3, 5, 8, 17])
    def test_zero_row_sum_identity(self, r):
        co = pd_coefficients(r, symmetric=False)
        assert co.a[0] + 2 * co.a[1:].sum() + 2 * co.a_half.sum() == pytest.approx(0.0)
        # w-row analogue: d_0 + 2 sum d_m + 2 sum c_m = 0
        assert co.d[0] + 2 * co.d[1:].sum() + 2 * co.c.sum() == pytest.approx(0.0)

    def test_symmetric_has_no_cd(self):
        co = pd_coefficients(3, symmetric=True)
        assert co.c is None and co.d is None

    def test_invalid_r(self):
        with pytest.raises(ValueError):
            pd_coefficients(0, symmetric=True)


class TestConfig:
    def test_ratio_floor(self):
        assert PdModelConfig(N=32, delta=0.25).r == 8
        assert PdModelConfig(N=32, delta=1.0 / 64.0).r == 1   # delta <= h
        assert PdModelConfig(N=32, delta="sqrt-h").r == 5     # floor(sqrt(32))
        assert PdModelConfig(N=64, delta="sqrt-h").r == 8

    def test_eta_scale(self):
        cfg = PdModelConfig(N=32, delta=0.25)
        assert cfg.eta == pytest.approx(2.0 * 0.25 ** 3 * 32.0)

    def test_stencil_overflow(self):
        with pytest.raises(ValueError):
            PdModelConfig(N=4, delta=0.9)


class TestAssembly:
    def test_symmetric_row_one(self):
        system = assemble_pd_system(PdModelConfig(N=4, delta=0.25, symmetric=True))
        assert system.cfg.r == 1
        dense = dense_expand(system.op)
        assert dense[0].tolist() == [10.0, -1.0, 0.0, -4.0, -4.0, 0.0, 0.0]

    def test_symmetric_is_exactly_symmetric(self):
        system = assemble_pd_system(PdModelConfig(N=16, delta=0.25, symmetric=True))
        dense = dense_expand(system.op)
        assert np.abs(dense - dense.T).max() == 0.0

    def test_nonsym_cross_entries(self):
        system = assemble_pd_system(PdModelConfig(N=8, delta=1.0 / 8.0, symmetric=False))
        assert system.cfg.r == 1
        assert system.op.o == 8.0          # d_0
        assert system.op.zeta[0] == -2.0   # d_1
        assert system.op.q[0] == -9.0 / 4.0  # c_0

    @pytest.mark.parametrize("symmetric", [False, True])
    @pytest.mark.parametrize("N,r", [(8, 1), (8, 2), (16, 3), (16, 6), (8, 6)])
    def test_matches_dense_reference(self, N, r, symmetric):
        cfg = PdModelConfig(N=N, delta=r / N, symmetric=symmetric)
        assert cfg.r == r
        system = assemble_pd_system(cfg)
        ref = pd_dense_reference(cfg)
        assert np.abs(dense_expand(system.op) - ref).max() <= 1e-12

    @pytest.mark.parametrize("symmetric", [False, True])
    def test_matches_full_domain_stencil(self, symmetric):
        cfg = PdModelConfig(N=16, delta=0.25, symmetric=symmetric)
        interior, _, _ = pd_full_domain_operator(cfg)
        system = assemble_pd_system(cfg)
        assert np.abs(dense_expand(system.op) - interior).max() <= 1e-12

    def test_spd(self):
        for (N, r) in ((16, 1), (32, 3), (64, 8)):
            cfg = PdModelConfig(N=N, delta=r / N, symmetric=True)
            lam_min, _ = sym_eig_extremes(dense_expand(assemble_pd_system(cfg).op))
            assert lam_min > 0.0

    def test_weak_dominance_zero_interior_rows(self):
        cfg = PdModelConfig(N=32, delta=4.0 / 32.0, symmetric=True)
        dense = dense_expand(assemble_pd_system(cfg).op)
        rows = dense.sum(axis=1)
        assert rows.min() >= -1e-12
        r, N = cfg.r, cfg.N
        interior = np.concatenate([np.arange(r, N - 1 - r),
                                   N - 1 + np.arange(r, N - r)])
        assert np.abs(rows[interior]).max() <= 1e-12 * dense[0, 0]

    def test_jacobi_spectrum_range(self):
        # lambda_max(D^{-1} A) in [1, 2] for the SPD variant
        for (N, r) in ((16, 1), (32, 2), (64, 5)):
            cfg = PdModelConfig(N=N, delta=r / N, symmetric=True)
            A = dense_expand(assemble_pd_system(cfg).op)
            d = np.diag(A)
            G = A / np.sqrt(np.outer(d, d))
            _, lam_max = sym_eig_extremes(0.5 * (G + G.T))
            assert 1.0 - 1e-10 <= lam_max <= 2.0 + 1e-10


class TestFolding:
    def test_zero_collar_leaves_f(self, rng):
        cfg = PdModelConfig(N=8, delta=0.25, symmetric=True)
        system = assemble_pd_system(cfg)
        F = rng.standard_normal(15)
        collar = sample_collar(cfg, lambda x: 0.0)
        assert np.array_equal(fold_boundary_rhs(system, F, collar), F)

    @pytest.mark.parametrize("symmetric", [False, True])
    def test_constants_identity(self, symmetric):
        """u = 1 with g = 1, f = 0: op @ 1 = eta * F_folded exactly."""
        cfg = PdModelConfig(N=16, delta=4.0 / 16.0, symmetric=symmetric)
        system = assemble_pd_system(cfg)
        folded = fold_boundary_rhs(system, np.zeros(31), sample_collar(cfg, lambda x: 1.0))
        resid = system.op.matvec(np.ones(31)) - system.scale * folded
        assert np.abs(resid).max() <= 1e-12 * abs(system.op.o)

    @pytest.mark.parametrize("symmetric", [False, True])
    @pytest.mark.parametrize("N,r", [(8, 1), (8, 2), (16, 5)])
    def test_matches_dense_elimination(self, rng, N, r, symmetric):
        cfg = PdModelConfig(N=N, delta=r / N, symmetric=symmetric)
        system = assemble_pd_system(cfg)
        _, exterior, ext_x = pd_full_domain_operator(cfg)
        gvals = {round(2 * N * x): rng.standard_normal() for x in ext_x}
        g = lambda x: gvals[round(2 * N * x)]
        F = rng.standard_normal(2 * N - 1)
        folded = fold_boundary_rhs(system, F, sample_collar(cfg, g))
        gvec = np.array([g(x) for x in ext_x])
        truth = F - (exterior @ gvec) / system.scale
        assert np.abs(folded - truth).max() <= 1e-12 * (1 + np.abs(truth).max())

    def test_block_vector_round_trip(self, rng):
        cfg = PdModelConfig(N=8, delta=0.25, symmetric=True)
        system = assemble_pd_system(cfg)
        F = BlockVector(rng.standard_normal(7), rng.standard_normal(8))
        out = fold_boundary_rhs(system, F, sample_collar(cfg, lambda x: 1.0))
        assert isinstance(out, BlockVector)

    def test_collar_length_validation(self, rng):
        cfg = PdModelConfig(N=8, delta=0.25, symmetric=True)
        system = assemble_pd_system(cfg)
        collar = sample_collar(cfg, lambda x: 1.0)
        collar.left_v = collar.left_v[:-1]
        with pytest.raises(ValueError):
            fold_boundary_rhs(system, np.zeros(15), collar)


class TestForcing:
    def test_matches_quadrature(self):
        for delta in (0.25, 0.125):
            for x in (0.1, 0.5, 0.93):
                closed = pd_exact_forcing(x, 0.4, delta)
                ref = pd_forcing_quadrature(x, 0.4, delta)
                assert closed == pytest.approx(ref, abs=1e-10)
