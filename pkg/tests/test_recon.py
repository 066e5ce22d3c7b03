import numpy as np
import pytest

from conftest import random_grid
from oracles import dense_forward, objective, plain_prox_gradient
from symnus.errors import InvalidParameter
from symnus.grid import asymmetry_residual, ft2d, ift2d, unvec, vec
from symnus.recon import (
    IstdConfig, L1SolverConfig, istd_reconstruct, l1_objective, l1_reconstruct, shr, write_trace_csv,
)
from symnus.sampling import NusData, build_nusdata, random_2d, scpg_generate


def sparse_problem(rng, n, n_peaks, sched):
    x = np.zeros((n, n), complex)
    cells = rng.choice(n * n, n_peaks, replace=False)
    x.ravel()[cells] = rng.uniform(1, 3, n_peaks) * np.exp(2j * np.pi * rng.random(n_peaks))
    return x, build_nusdata(ift2d(x), sched)


class TestShr:
    def test_real_examples(self):
        assert shr(np.array([5.0]), 2)[0] == 3
        assert shr(np.array([1.0]), 2)[0] == 0
        assert shr(np.array([-5.0]), 2)[0] == -3

    def test_complex_example(self):
        # elementwise sign(z) (|z| - b + ||z| - b|) / 2
        z = 3 + 4j
        brute = (z / abs(z)) * (abs(z) - 2 + abs(abs(z) - 2)) / 2
        assert shr(np.array([z]), 2)[0] == pytest.approx(brute, abs=1e-15)
        assert shr(np.array([z]), 2)[0] == pytest.approx(1.8 + 2.4j, abs=1e-15)

    def test_zero_and_commutation(self, rng):
        assert shr(np.zeros(3), 0.0).tolist() == [0, 0, 0]
        g = random_grid(rng, 9)
        assert np.array_equal(shr(g, 0.7).T, shr(g.T, 0.7))

    def test_negative_threshold(self):
        with pytest.raises(InvalidParameter):
            shr(np.ones(2), -1)


class TestIstd:
    def test_full_sampling_gives_direct_ft(self, rng):
        g = random_grid(rng, 16)
        nus = build_nusdata(g, random_2d(16, 256))
        res = istd_reconstruct(nus, IstdConfig(maxt=200, eps=0.0))
        ref = ft2d(unvec(nus.y, 16))
        assert res.iterations <= 201
        assert np.linalg.norm(res.spectrum - ref) <= 1e-8 * np.linalg.norm(ref)

    def test_single_peak_half_sampled(self):
        n = 16
        x = np.zeros((n, n), complex)
        x[5, 3] = 2.0
        nus = build_nusdata(ift2d(x), random_2d(n, n * n // 2, seed=4))
        res = istd_reconstruct(nus, IstdConfig(maxt=100))
        assert abs(abs(res.spectrum[5, 3]) - 2.0) / 2.0 < 1e-6

    def test_zero_data(self):
        nus = NusData(4, [(0, 0), (1, 1)], [0, 0])
        res = istd_reconstruct(nus)
        assert res.iterations == 0 and not res.spectrum.any()

    def test_iterate_symmetry_under_scpg(self, rng):
        g = random_grid(rng, 32)
        nus = build_nusdata(g, scpg_generate(32, 120, seed=5))
        worst = []

        def check(t, x, s):
            for m in (x, s):
                top = np.abs(m).max()
                worst.append(asymmetry_residual(m) / top if top else 0.0)

        istd_reconstruct(nus, IstdConfig(maxt=50), callback=check)
        assert max(worst) <= 1e-10

    def test_scaling_equivariance(self, rng):
        x, nus = sparse_problem(rng, 16, 6, random_2d(16, 80, seed=1))
        a = istd_reconstruct(nus, IstdConfig(maxt=40))
        b = istd_reconstruct(NusData(16, nus.omega, 3.5 * nus.y), IstdConfig(maxt=40))
        assert np.linalg.norm(b.spectrum - 3.5 * a.spectrum) <= 1e-12 * np.linalg.norm(b.spectrum)

    def test_residual_trace(self, rng, tmp_path):
        x, nus = sparse_problem(rng, 16, 6, random_2d(16, 120, seed=1))
        res = istd_reconstruct(nus, IstdConfig(maxt=30))
        assert res.iterations == len(res.trace) <= 31
        assert [t for t, _, _ in res.trace] == list(range(1, res.iterations + 1))
        assert res.trace[-1][1] == 0.0 or res.final_residual <= 1e-6 * np.linalg.norm(nus.y)
        write_trace_csv(tmp_path / "t.csv", res, "beta")
        lines = (tmp_path / "t.csv").read_text().splitlines()
        assert lines[0] == "iter,beta,residual" and len(lines) == res.iterations + 1

    def test_config_validation(self):
        with pytest.raises(InvalidParameter):
            IstdConfig(maxt=0)
        with pytest.raises(InvalidParameter):
            IstdConfig(shrink_factor=1.0)


class TestL1:
    def test_large_lambda_gives_zero(self, rng):
        x, nus = sparse_problem(rng, 8, 3, random_2d(8, 30, seed=2))
        top = np.abs(ft2d(unvec_scatter(nus))).max()
        res = l1_reconstruct(nus, L1SolverConfig(lam=top * 1.0001))
        assert not res.spectrum.any()

    @pytest.mark.parametrize("seed", range(3))
    def test_matches_slow_reference(self, seed):
        rng = np.random.default_rng(seed)
        x, nus = sparse_problem(rng, 8, 4, random_2d(8, 32, seed=seed))
        lam = 1e-2
        A = dense_forward(nus)
        ref = objective(A, nus.y, plain_prox_gradient(A, nus.y, lam), lam)
        res = l1_reconstruct(nus, L1SolverConfig(lam=lam, max_iters=20_000, rel_obj_tol=1e-14))
        got = l1_objective(nus, res.spectrum, lam)
        assert abs(got - ref) <= 1e-6 * abs(ref)

    def test_dense_operator_agrees_with_fft_operator(self, rng):
        x, nus = sparse_problem(rng, 8, 4, random_2d(8, 25, seed=0))
        A = dense_forward(nus)
        assert np.allclose(A @ vec(x), nus.y, atol=1e-12)

    def test_objective_not_above_zero_solution(self, rng):
        x, nus = sparse_problem(rng, 16, 5, random_2d(16, 60, seed=3))
        res = l1_reconstruct(nus, L1SolverConfig(lam=1e-3, max_iters=300))
        assert l1_objective(nus, res.spectrum, 1e-3) <= 0.5 * np.vdot(nus.y, nus.y).real

    def test_scpg_solution_symmetric_and_symmetrizing_helps(self, rng):
        g = random_grid(rng, 8)
        nus = build_nusdata(g, scpg_generate(8, 14, seed=1))
        res = l1_reconstruct(nus, L1SolverConfig(lam=1e-2, max_iters=20_000, rel_obj_tol=1e-14))
        x = res.spectrum
        assert asymmetry_residual(x) <= 1e-8 * np.abs(x).max()
        sym = 0.5 * (x + x.T)
        assert l1_objective(nus, sym, 1e-2) <= l1_objective(nus, x, 1e-2) + 1e-10

    def test_plain_ista_and_trace(self, rng):
        x, nus = sparse_problem(rng, 8, 3, random_2d(8, 30, seed=2))
        res = l1_reconstruct(nus, L1SolverConfig(lam=1e-2, max_iters=50, accelerated=False))
        objs = [o for _, o, _ in res.trace]
        # plain ISTA with step 1 is monotone
        assert all(b <= a + 1e-12 for a, b in zip(objs, objs[1:]))


def unvec_scatter(nus):
    from symnus.sampling import scatter
    return scatter(nus.omega, nus.y, nus.n)
