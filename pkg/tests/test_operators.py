import math

import numpy as np
import pytest

from kspec.eigen import sym_smallest
from kspec.graphs import degree_stats, from_edge_list
from kspec.operators import (bethe_hessian, directed_edges,
                             full_nonbacktracking, r_average, r_moment,
                             reduced_nonbacktracking, save_coordinates)

from conftest import random_connected_graph, spectral_multiset_distance


def dense_reduced(g):
    """Independent dense assembly of [[0, D-I], [-I, A]]."""
    n = g.n
    a = g.adjacency.toarray()
    d_minus_i = np.diag(g.degrees.astype(float) - 1.0)
    return np.block([[np.zeros((n, n)), d_minus_i], [-np.eye(n), a]])


def hadamard_bound_log(mat: np.ndarray) -> float:
    return float(np.sum(np.log(np.linalg.norm(mat, axis=1))))


def zeta_log_residual(g, lam: float) -> float:
    """log(|det H(lam)| / Hadamard bound); very negative at NB eigenvalues."""
    h = bethe_hessian(g, lam).toarray()
    sign, logdet = np.linalg.slogdet(h)
    if sign == 0:
        return -np.inf
    return logdet - hadamard_bound_log(h)


class TestReducedNonBacktracking:
    def test_triangle_spectrum(self, triangle):
        b = reduced_nonbacktracking(triangle)
        assert b.shape == (6, 6)
        ev = np.linalg.eigvals(b.toarray())  # dense oracle
        # the double root at 1 is defective and splits at sqrt(eps) scale
        n_one = int((np.abs(ev - 1.0) < 1e-6).sum())
        assert n_one == 2
        assert np.all(np.abs(ev) <= 1.0 + 1e-6)

    def test_single_edge_blocks(self, single_edge):
        b = reduced_nonbacktracking(single_edge).toarray()
        assert b.shape == (4, 4)
        assert np.array_equal(b[:2, 2:], np.zeros((2, 2)))  # D - I vanishes
        assert np.array_equal(b[2:, :2], -np.eye(2))

    def test_matches_dense_assembly(self, karate):
        assert np.array_equal(reduced_nonbacktracking(karate).toarray(),
                              dense_reduced(karate))

    def test_nonzero_count(self, karate):
        b = reduced_nonbacktracking(karate)
        not_deg1 = int((karate.degrees != 1).sum())
        assert b.nnz == 2 * karate.m + karate.n + not_deg1

    def test_random_graphs_match_dense(self):
        rng = np.random.default_rng(8)
        for _ in range(5):
            g = random_connected_graph(rng, n_max=15)
            assert np.array_equal(reduced_nonbacktracking(g).toarray(),
                                  dense_reduced(g))

    def test_empty_graph_rejected(self):
        with pytest.raises(ValueError, match="no edges"):
            reduced_nonbacktracking(from_edge_list([], n_hint=3))


class TestFullNonBacktracking:
    def test_single_edge_is_zero(self, single_edge):
        b = full_nonbacktracking(single_edge)
        assert b.shape == (2, 2)
        assert b.nnz == 0

    def test_triangle_row_sums(self, triangle):
        b = full_nonbacktracking(triangle)
        assert np.all(np.asarray(b.sum(axis=1)).ravel() == 1.0)

    def test_path_nonzeros(self, path3):
        # directed order: 0:(0,1) 1:(1,0) 2:(1,2) 3:(2,1)
        dedges = directed_edges(path3)
        assert dedges.tolist() == [[0, 1], [1, 0], [1, 2], [2, 1]]
        b = full_nonbacktracking(path3).tocoo()
        entries = sorted(zip(b.row.tolist(), b.col.tolist()))
        assert entries == [(0, 2), (3, 1)]

    def test_row_sums_follow_head_degree(self, karate):
        b = full_nonbacktracking(karate)
        dedges = directed_edges(karate)
        expected = karate.degrees[dedges[:, 1]] - 1
        assert np.array_equal(np.asarray(b.sum(axis=1)).ravel(), expected)


class TestIharaBassIdentity:
    def test_spectrum_split(self):
        # spec(B) equals spec(B-reduced) plus +-1, each m - n times
        rng = np.random.default_rng(21)
        for _ in range(8):
            g = random_connected_graph(rng, n_max=14, min_degree=2)
            full = np.linalg.eigvals(full_nonbacktracking(g).toarray())
            red = np.linalg.eigvals(reduced_nonbacktracking(g).toarray())
            extra = g.m - g.n
            assert extra >= 0
            combined = np.concatenate([red, np.ones(extra), -np.ones(extra)])
            assert spectral_multiset_distance(full, combined) < 1e-8


class TestZetaVanishing:
    def test_determinant_vanishes_at_real_nb_eigenvalues(self):
        rng = np.random.default_rng(22)
        for _ in range(6):
            g = random_connected_graph(rng, n_max=14, min_degree=2)
            ev = np.linalg.eigvals(reduced_nonbacktracking(g).toarray())
            real = ev[(np.abs(ev.imag) < 1e-9) & (np.abs(ev.real) > 1.0)]
            assert real.size >= 1  # the Perron eigenvalue at least
            for lam in real.real:
                assert zeta_log_residual(g, lam) <= math.log(1e-6)


class TestBetheHessian:
    def test_triangle_at_two(self, triangle):
        h = bethe_hessian(triangle, 2.0).toarray()
        expected = np.full((3, 3), -2.0)
        np.fill_diagonal(expected, 5.0)
        assert np.array_equal(h, expected)

    def test_r_one_is_laplacian(self, karate):
        h = bethe_hessian(karate, 1.0)
        lap = np.diag(karate.degrees.astype(float)) - karate.adjacency.toarray()
        assert np.array_equal(h.toarray(), lap)

    def test_laplacian_smallest_eigenvalue_zero(self, karate):
        vals = np.linalg.eigvalsh(bethe_hessian(karate, 1.0).toarray())
        assert abs(vals[0]) < 1e-10
        assert vals[1] > 1e-6  # karate is connected

    def test_symmetry(self, karate):
        h = bethe_hessian(karate, 2.5)
        assert (h - h.T).nnz == 0

    def test_nonfinite_r_rejected(self, triangle):
        with pytest.raises(ValueError, match="finite"):
            bethe_hessian(triangle, float("inf"))

    def test_negative_r_allowed(self, triangle):
        h = bethe_hessian(triangle, -2.0).toarray()
        assert h[0, 1] == 2.0
        assert h[0, 0] == 5.0

    def test_karate_iterative_matches_dense_oracle(self, karate):
        h = bethe_hessian(karate, r_average(karate))
        oracle = np.linalg.eigvalsh(h.toarray())
        spect = sym_smallest(h, k=10, tol=1e-13, force_iterative=True)
        assert np.max(np.abs(spect.values - oracle[:10])) < 1e-10


class TestRadii:
    def test_regular_graph(self):
        edges = [(i, j) for i in range(5) for j in range(i + 1, 5)]  # K5
        g = from_edge_list(edges)
        assert r_moment(g) == pytest.approx(math.sqrt(3.0))
        assert r_average(g) == pytest.approx(2.0)

    def test_star(self):
        g = from_edge_list([(0, 1), (0, 2), (0, 3)])
        assert r_moment(g) == pytest.approx(1.0)
        assert r_average(g) == pytest.approx(math.sqrt(1.5))

    def test_karate_from_degree_stats(self, karate):
        stats = degree_stats(karate)
        assert r_moment(karate) == pytest.approx(math.sqrt(stats.d_tilde), abs=0)
        assert r_average(karate) == pytest.approx(math.sqrt(stats.lambda_hat), abs=0)

    def test_moment_bound(self, karate):
        # Cauchy-Schwarz: r_m >= sqrt(mean degree - 1)
        stats = degree_stats(karate)
        assert r_moment(karate) >= math.sqrt(stats.lambda_hat - 1) - 1e-12

    def test_matching_graph_rejected(self):
        g = from_edge_list([(0, 1), (2, 3)])  # all degrees 1, d_tilde = 0
        with pytest.raises(ValueError, match="not positive"):
            r_moment(g)


class TestCoordinateDump:
    def test_round_trip(self, triangle, tmp_path):
        h = bethe_hessian(triangle, 2.0)
        path = tmp_path / "h.coo"
        save_coordinates(h, path)
        lines = path.read_text().strip().splitlines()
        head = lines[0].split()
        assert head[1:] == ["3", "3", str(h.nnz)]
        rebuilt = np.zeros((3, 3))
        for line in lines[1:]:
            i, j, v = line.split()
            rebuilt[int(i), int(j)] = float(v)
        assert np.array_equal(rebuilt, h.toarray())
