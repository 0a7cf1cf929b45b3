import numpy as np
import pytest

from kspec.graphs import Graph, from_edge_list


@pytest.fixture(scope="session")
def karate():
    from kspec.datasets import load_dataset
    g, _ = load_dataset("karate")
    return g


@pytest.fixture
def triangle():
    return from_edge_list([(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def path3():
    return from_edge_list([(0, 1), (1, 2)])


@pytest.fixture
def single_edge():
    return from_edge_list([(0, 1)])


def spectral_multiset_distance(a, b) -> float:
    """Greedy matching distance between two eigenvalue multisets.

    Canonical sorting alone cannot compare the lists elementwise:
    numerically tied real parts interleave conjugate pairs differently.
    Greedy nearest-neighbor matching can only overestimate the optimal
    distance, so a small bound still certifies multiset equality.
    """
    a = np.sort_complex(np.asarray(a, dtype=complex))
    b = np.sort_complex(np.asarray(b, dtype=complex))
    assert a.shape == b.shape
    used = np.zeros(b.size, dtype=bool)
    worst = 0.0
    for v in a:
        dist = np.abs(b - v)
        dist[used] = np.inf
        j = int(np.argmin(dist))
        used[j] = True
        worst = max(worst, float(dist[j]))
    return worst


def random_connected_graph(rng: np.random.Generator, n_max: int = 20,
                           min_degree: int = 2) -> Graph:
    """Rejection-sample a connected Erdos-Renyi graph with a degree floor."""
    from scipy.sparse.csgraph import connected_components

    while True:
        n = int(rng.integers(max(min_degree + 2, 5), n_max + 1))
        p = min(1.0, 2.2 * np.log(n) / n)
        u = rng.random((n, n))
        mask = np.triu(u < p, k=1)
        rows, cols = np.nonzero(mask)
        if rows.size == 0:
            continue
        g = from_edge_list(np.column_stack((rows, cols)), n_hint=n)
        if g.degrees.min() < min_degree:
            continue
        n_comp, _ = connected_components(g.adjacency, directed=False)
        if n_comp == 1:
            return g
