import numpy as np
import pytest
import scipy.sparse as sp

from kspec.eigen import (EigenConvergenceError, inertia_ldlt,
                         nonsym_spectrum, sym_smallest)
from kspec.graphs import degree_stats
from kspec.operators import bethe_hessian, reduced_nonbacktracking
from kspec.randnet import BlockModelSpec, sample


def random_symmetric(rng, n, scale=1.0):
    a = rng.standard_normal((n, n)) * scale
    return (a + a.T) / 2


def dense_sign_counts(mat, zero_tol=1e-8):
    vals = np.linalg.eigvalsh(np.asarray(mat, dtype=float))
    tau = zero_tol * np.abs(mat).max()
    neg = int((vals < -tau).sum())
    pos = int((vals > tau).sum())
    return neg, len(vals) - neg - pos, pos


class TestSymSmallest:
    def test_diagonal_example(self):
        m = sp.diags([-3.0, -1.0, 0.5, 5.0])
        spect = sym_smallest(m, k=2)
        assert np.allclose(spect.values, [-3.0, -1.0], atol=1e-12)
        assert spect.converged

    def test_path_laplacian(self, path3):
        spect = sym_smallest(bethe_hessian(path3, 1.0), k=3)
        assert np.allclose(spect.values, [0.0, 1.0, 3.0], atol=1e-12)

    def test_values_ascending(self):
        rng = np.random.default_rng(0)
        spect = sym_smallest(random_symmetric(rng, 60), k=12)
        assert np.all(np.diff(spect.values) >= 0)

    def test_iterative_matches_dense_oracle(self):
        rng = np.random.default_rng(1)
        a = random_symmetric(rng, 200)
        oracle = np.linalg.eigvalsh(a)[:10]
        spect = sym_smallest(a, k=10, tol=1e-12, force_iterative=True)
        assert spect.method == "lanczos"
        assert spect.converged
        assert np.max(np.abs(spect.values - oracle)) < 1e-8
        assert np.all(spect.residual_norms <= 1e-12 * 200)  # tol * span bound

    def test_iterative_sparse_input(self, karate):
        h = bethe_hessian(karate, 2.0)
        oracle = np.linalg.eigvalsh(h.toarray())[:6]
        spect = sym_smallest(h, k=6, tol=1e-13, force_iterative=True)
        assert np.max(np.abs(spect.values - oracle)) < 1e-9

    def test_deflation_recovers_multiplicities(self):
        # smallest eigenvalue has multiplicity three; plain Lanczos sees
        # one copy per sweep, so this exercises the deflated restarts
        rng = np.random.default_rng(2)
        diag = np.concatenate([[-2.0, -2.0, -2.0], np.arange(1.0, 38.0)])
        q, _ = np.linalg.qr(rng.standard_normal((40, 40)))
        a = q @ np.diag(diag) @ q.T
        a = (a + a.T) / 2
        spect = sym_smallest(a, k=5, tol=1e-12, force_iterative=True)
        oracle = np.sort(diag)[:5]
        assert np.max(np.abs(spect.values - oracle)) < 1e-8

    def test_nonconvergence_carries_partial(self):
        rng = np.random.default_rng(3)
        a = random_symmetric(rng, 50)
        with pytest.raises(EigenConvergenceError) as err:
            sym_smallest(a, k=5, max_iter=2, force_iterative=True)
        assert err.value.partial is not None
        assert not err.value.partial.converged

    def test_k_bounds(self):
        with pytest.raises(ValueError):
            sym_smallest(np.eye(3), k=4)

    def test_asymmetric_rejected(self):
        with pytest.raises(ValueError, match="symmetric"):
            sym_smallest(np.array([[0.0, 1.0], [0.0, 0.0]]), k=1)


class TestInertia:
    def test_diagonal_example(self):
        inertia = inertia_ldlt(np.diag([-1.0, 0.0, 2.0]))
        assert (inertia.negative, inertia.zero, inertia.positive) == (1, 1, 1)
        assert inertia.n == 3

    def test_laplacian_psd_with_one_null_direction(self, karate):
        inertia = inertia_ldlt(bethe_hessian(karate, 1.0))
        assert inertia.negative == 0
        assert inertia.zero == 1
        assert inertia.positive == karate.n - 1

    def test_matches_dense_oracle_exactly(self):
        rng = np.random.default_rng(4)
        for trial in range(100):
            n = int(rng.integers(2, 51))
            a = random_symmetric(rng, n, scale=float(rng.uniform(0.1, 10)))
            inertia = inertia_ldlt(a)
            assert (inertia.negative, inertia.zero, inertia.positive) \
                == dense_sign_counts(a)

    def test_two_by_two_pivots(self):
        # a saddle forces Bunch-Kaufman into a 2x2 pivot block
        a = np.array([[0.0, 1.0], [1.0, 0.0]])
        inertia = inertia_ldlt(a)
        assert (inertia.negative, inertia.zero, inertia.positive) == (1, 0, 1)

    def test_zero_matrix(self):
        inertia = inertia_ldlt(np.zeros((4, 4)))
        assert inertia.zero == 4

    def test_agrees_with_sym_smallest_on_bethe_hessians(self, karate):
        for r in (1.5, 2.0, 3.0):
            h = bethe_hessian(karate, r)
            inertia = inertia_ldlt(h)
            vals = np.linalg.eigvalsh(h.toarray())
            tau = 1e-8 * np.abs(h.toarray()).max()
            assert inertia.negative == int((vals < -tau).sum())


class TestNonsymSpectrum:
    def test_cycle_permutation(self):
        p = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
        spect = nonsym_spectrum(p, mode="full")
        roots = np.exp(2j * np.pi * np.arange(3) / 3)
        got = np.sort_complex(spect.values)
        want = np.sort_complex(roots)
        assert np.max(np.abs(got - want)) < 1e-10

    def test_triangle_nb_real_count(self, triangle):
        b = reduced_nonbacktracking(triangle)
        spect = nonsym_spectrum(b, mode="full")
        oracle = np.linalg.eigvals(b.toarray())
        assert np.max(np.abs(np.sort_complex(spect.values)
                             - np.sort_complex(oracle))) < 1e-12
        # the defective double root at 1 splits at sqrt(eps) scale, so the
        # realness window needs its absolute floor
        real = spect.values[np.abs(spect.values.imag) < 1e-6]
        assert int((real.real >= 1.0 - 1e-10).sum()) == 2

    def test_conjugate_closure_full(self):
        rng = np.random.default_rng(5)
        vals = nonsym_spectrum(rng.standard_normal((40, 40)), mode="full").values
        scale = np.abs(vals).max()
        for v in vals[np.abs(vals.imag) > 1e-8 * scale]:
            assert np.min(np.abs(vals - np.conj(v))) < 1e-8 * scale

    def test_leading_by_modulus_matches_dense(self):
        rng = np.random.default_rng(6)
        dense = rng.standard_normal((300, 300)) / np.sqrt(300)
        oracle = np.linalg.eigvals(dense)
        mods = np.sort(np.abs(oracle))[::-1]
        radius = 0.5 * (mods[5] + mods[6])  # clean gap for a fixed seed
        spect = nonsym_spectrum(sp.csr_matrix(dense), mode="leading", radius=radius)
        want = oracle[np.abs(oracle) >= radius]
        got = spect.values[np.abs(spect.values) >= radius]
        assert got.size == want.size == 6
        assert np.max(np.abs(np.sort_complex(got) - np.sort_complex(want))) < 1e-7

    def test_leading_by_real_part_matches_dense_count(self):
        spec = BlockModelSpec(n=300, K=2, pi=(0.5, 0.5), w=(1.0, 1.0),
                              beta=0.2, lambda_n=15.0)
        g, _ = sample(spec, 17)
        b = reduced_nonbacktracking(g)
        thr = np.sqrt(degree_stats(g).d_tilde)
        oracle = np.linalg.eigvals(b.toarray())
        real_oracle = oracle[np.abs(oracle.imag) <= np.maximum(1e-6, 1e-8 * np.abs(oracle))]
        want = int((real_oracle.real >= thr).sum())
        spect = nonsym_spectrum(b, mode="leading", radius=thr, rank_by="real")
        vals = spect.values
        real = vals[np.abs(vals.imag) <= np.maximum(1e-6, 1e-8 * np.abs(vals))]
        assert int((real.real >= thr).sum()) == want == 2

    def test_leading_deterministic(self):
        rng = np.random.default_rng(7)
        m = sp.csr_matrix(rng.standard_normal((120, 120)))
        a = nonsym_spectrum(m, mode="leading", radius=3.0)
        b = nonsym_spectrum(m, mode="leading", radius=3.0)
        assert np.array_equal(a.values, b.values)

    def test_leading_needs_radius(self):
        with pytest.raises(ValueError, match="radius"):
            nonsym_spectrum(sp.eye(40, format="csr"), mode="leading")

    def test_small_matrix_falls_back_to_full(self):
        spect = nonsym_spectrum(np.eye(4), mode="leading", radius=0.5)
        assert spect.mode == "full"

    def test_sbm_informative_count_monte_carlo(self):
        # two real eigenvalues clear sqrt(d_tilde) in at least 90 of 100
        # moderately sized two-community samples (dense-oracle path)
        spec = BlockModelSpec(n=400, K=2, pi=(0.5, 0.5), w=(1.0, 1.0),
                              beta=0.2, lambda_n=15.0)
        hits = 0
        for seed in range(100):
            g, _ = sample(spec, 40_000 + seed)
            thr = np.sqrt(degree_stats(g).d_tilde)
            vals = nonsym_spectrum(reduced_nonbacktracking(g), mode="full").values
            real = vals[np.abs(vals.imag) <= np.maximum(1e-6, 1e-8 * np.abs(vals))]
            if int((real.real >= thr).sum()) == 2:
                hits += 1
        assert hits >= 90
