from dataclasses import replace

import numpy as np
import pytest

from hankel_rpca.solvers import (
    SolverConfig,
    default_gamma,
    ht_rmc,
    ht_rpca,
    matrix_svt,
    relative_residual,
    rpca,
    soft_shrink,
)
from hankel_rpca.synth import SynthConfig, gen_mask, gen_synthetic

# reduced synthetic problem (period 80 kept) so these run in seconds
SMALL = SynthConfig(n=20, t=320, seed=3)
SMALL_CFG = SolverConfig(tau=40, gamma=0.01)


@pytest.fixture(scope="module")
def small():
    return gen_synthetic(SMALL)


class TestSoftShrink:
    def test_values(self):
        np.testing.assert_array_equal(soft_shrink([[1.5, -0.3, -2.0]], 1.0), [[0.5, 0.0, -1.0]])

    def test_zero_threshold(self, rng):
        y = rng.standard_normal((3, 4))
        np.testing.assert_array_equal(soft_shrink(y, 0.0), y)

    def test_negative(self):
        with pytest.raises(ValueError):
            soft_shrink([[1.0]], -0.1)


class TestMatrixSvt:
    def test_zero_threshold(self, rng):
        y = rng.standard_normal((4, 6))
        np.testing.assert_allclose(matrix_svt(y, 0.0), y, atol=1e-13)

    def test_full_shrinkage(self, rng):
        y = rng.standard_normal((4, 6))
        assert not matrix_svt(y, np.linalg.norm(y, 2)).any()

    def test_rank_one(self, rng):
        u = rng.standard_normal(5)
        v = rng.standard_normal(7)
        u /= np.linalg.norm(u)
        v /= np.linalg.norm(v)
        np.testing.assert_allclose(matrix_svt(3 * np.outer(u, v), 1.0), 2 * np.outer(u, v), atol=1e-13)

    def test_negative(self):
        with pytest.raises(ValueError):
            matrix_svt(np.eye(2), -1.0)


class TestRelativeResidual:
    def test_exact(self, rng):
        m = rng.standard_normal((3, 4))
        l = rng.standard_normal((3, 4))
        assert relative_residual(m, l, m - l) == pytest.approx(0.0, abs=1e-15)

    def test_normalization(self, rng):
        m = rng.standard_normal((3, 4))
        assert relative_residual(m, 0 * m, 0 * m) == 1.0

    def test_hand_value(self):
        m = np.array([[2.0, 0], [0, 0]])
        l = np.array([[1.0, 0], [0, 0]])
        assert relative_residual(m, l, np.zeros((2, 2)), np.ones((2, 2), bool)) == 0.5

    def test_masked_cells_ignored(self):
        m = np.array([[2.0, 5.0]])
        mask = np.array([[True, False]])
        assert relative_residual(m, np.array([[1.0, -7.0]]), np.zeros((1, 2)), mask) == 0.5

    def test_zero_data(self):
        with pytest.raises(ValueError):
            relative_residual(np.zeros((2, 2)), np.zeros((2, 2)), np.zeros((2, 2)))


class TestDefaultGamma:
    def test_values(self):
        assert default_gamma(100, 1200) == pytest.approx(1 / np.sqrt(1200))
        assert default_gamma(100, 1200) == pytest.approx(0.02887, abs=1e-5)
        assert default_gamma(159, 1440) == pytest.approx(0.0264, abs=5e-5)
        assert default_gamma(1, 1) == 1.0

    def test_invalid(self):
        with pytest.raises(ValueError):
            default_gamma(0, 3)


class TestConfig:
    @pytest.mark.parametrize("kw", [
        dict(tau=0), dict(gamma=0.0), dict(rho0=0.0), dict(rho0=10.0, rho_max=1.0),
        dict(beta=0.9), dict(tol=0.0), dict(max_iter=0),
    ])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            SolverConfig(**kw)

    def test_gamma_resolution(self):
        assert SolverConfig().resolved(10, 400).gamma == pytest.approx(0.05)
        assert SolverConfig(gamma=0.3).resolved(10, 400).gamma == 0.3


class TestZeroInput:
    @pytest.mark.parametrize("solve", [rpca, ht_rpca])
    def test_zero_fixed_point(self, solve):
        res = solve(np.zeros((4, 12)), SolverConfig(tau=3, gamma=0.1))
        assert res.iterations == 1 and res.converged
        assert not res.low_rank.any() and not res.sparse.any()

    def test_rmc_zero(self):
        mask = gen_mask(4, 12, 0.3, 0)
        res = ht_rmc(np.zeros((4, 12)), mask, SolverConfig(tau=3, gamma=0.1))
        assert res.converged and not res.sparse.any()


class TestErrors:
    def test_non_finite(self):
        m = np.ones((3, 5))
        m[1, 2] = np.nan
        for solve in (rpca, ht_rpca):
            with pytest.raises(ValueError, match="non-finite"):
                solve(m, SolverConfig(tau=2))

    def test_non_finite_off_mask_is_ignored(self, rng):
        z = rng.standard_normal((3, 8))
        mask = np.ones_like(z, dtype=bool)
        mask[0, 0] = False
        z[0, 0] = np.inf
        res = ht_rmc(z, mask, SolverConfig(tau=2, max_iter=5))
        assert np.all(np.isfinite(res.low_rank))

    def test_empty_mask(self, rng):
        with pytest.raises(ValueError, match="empty"):
            ht_rmc(rng.standard_normal((2, 5)), np.zeros((2, 5), bool), SolverConfig(tau=2))

    def test_tau_too_long(self, rng):
        with pytest.raises(ValueError):
            ht_rpca(rng.standard_normal((2, 5)), SolverConfig(tau=6))

    def test_max_iter_is_not_an_error(self, small):
        res = ht_rpca(small.corrupted, replace(SMALL_CFG, max_iter=3))
        assert not res.converged and res.iterations == 3
        assert len(res.residual_history) == 3


def test_tau_one_matches_rpca(rng):
    for _ in range(3):
        m = rng.standard_normal((20, 50))
        m[rng.random(m.shape) < 0.05] += 8.0
        cfg = SolverConfig(tau=1, gamma=0.15)
        a, b = ht_rpca(m, cfg), rpca(m, cfg)
        assert a.iterations == b.iterations
        np.testing.assert_allclose(a.low_rank, b.low_rank, rtol=0, atol=1e-8)
        np.testing.assert_allclose(a.sparse, b.sparse, rtol=0, atol=1e-8)


def test_full_mask_rmc_equals_rpca(small):
    full = np.ones(small.corrupted.shape, bool)
    a = ht_rmc(small.corrupted, full, SMALL_CFG)
    b = ht_rpca(small.corrupted, SMALL_CFG)
    np.testing.assert_array_equal(a.low_rank, b.low_rank)
    np.testing.assert_array_equal(a.sparse, b.sparse)
    assert a.residual_history == b.residual_history


def test_rmc_observed_cells_fixed_each_iteration(small):
    z = small.corrupted
    mask = gen_mask(*z.shape, 0.3, 5)
    for k in (1, 2, 5, 17):
        res = ht_rmc(np.where(mask, z, 123.0), mask, replace(SMALL_CFG, max_iter=k))
        np.testing.assert_array_equal(res.completed[mask], z[mask])


def test_convergence_means_small_residual(small):
    for solve in (rpca, ht_rpca):
        res = solve(small.corrupted, SMALL_CFG)
        assert res.converged
        assert res.final_residual < SMALL_CFG.tol
        assert relative_residual(small.corrupted, res.low_rank, res.sparse) < SMALL_CFG.tol
        assert len(res.residual_history) == res.iterations


def test_residual_trend(small):
    hist = np.array(ht_rpca(small.corrupted, replace(SMALL_CFG, tol=1e-9)).residual_history)
    medians = [np.median(hist[i:i + 20]) for i in range(10, len(hist) - 19)]
    assert len(medians) > 5
    assert np.all(np.diff(medians) <= 0)


def test_sparsity_decreases_with_gamma(small):
    counts = []
    for g in (0.002, 0.005, 0.01, 0.02, 0.05, 0.1):
        res = ht_rpca(small.corrupted, replace(SMALL_CFG, gamma=g))
        counts.append(np.count_nonzero(res.sparse))
    assert counts == sorted(counts, reverse=True)


def test_deterministic_and_thread_independent(small):
    a = ht_rpca(small.corrupted, SMALL_CFG)
    b = ht_rpca(small.corrupted, SMALL_CFG)
    c = ht_rpca(small.corrupted, replace(SMALL_CFG, n_jobs=4))
    for x in (b, c):
        np.testing.assert_array_equal(a.low_rank, x.low_rank)
        np.testing.assert_array_equal(a.sparse, x.sparse)
        assert a.residual_history == x.residual_history


def test_small_benchmark_recovers_anomalies(small):
    ht = ht_rpca(small.corrupted, SMALL_CFG)
    err = np.sqrt(np.mean((ht.sparse - small.sparse) ** 2))
    assert err < 0.1 * np.sqrt(np.mean(small.sparse ** 2))


def test_degenerate_shapes(rng):
    x = rng.standard_normal((1, 30))
    assert ht_rpca(x, SolverConfig(tau=5, gamma=0.2)).low_rank.shape == (1, 30)
    assert ht_rpca(x, SolverConfig(tau=30, gamma=0.2)).low_rank.shape == (1, 30)


def test_tnn_reported(small):
    res = ht_rpca(small.corrupted, SMALL_CFG)
    from hankel_rpca.hankel import hankelize
    from hankel_rpca.tensor_core import tnn
    # the t-SVT output is not recorded; its TNN should be close to that of H(L)
    assert res.tnn > 0
    assert res.tnn == pytest.approx(tnn(hankelize(res.low_rank, SMALL_CFG.tau)), rel=0.05)
