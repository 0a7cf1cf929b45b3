"""Spectral graph operators: non-backtracking matrices and the Bethe Hessian.

The reduced non-backtracking matrix is the 2n-by-2n block matrix

    [ 0    D - I ]
    [ -I   A     ]

whose spectrum equals that of the full 2m-by-2m edge operator up to
eigenvalues +-1.  The Bethe Hessian is ``H(r) = (r^2 - 1) I - r A + D``;
its determinant vanishes exactly at the real eigenvalues of the
non-backtracking operator, and ``H(1)`` is the combinatorial Laplacian.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sp

from .graphs import Graph, degree_stats

__all__ = [
    "reduced_nonbacktracking",
    "full_nonbacktracking",
    "directed_edges",
    "bethe_hessian",
    "r_moment",
    "r_average",
    "save_coordinates",
]


def _require_edges(g: Graph):
    if g.m == 0:
        raise ValueError("degenerate graph: no edges")


def reduced_nonbacktracking(g: Graph) -> sp.csr_matrix:
    """2n-by-2n reduced non-backtracking matrix ``[[0, D-I], [-I, A]]``.

    Stored zeros are eliminated, so degree-1 nodes contribute nothing to
    the ``D - I`` block.
    """
    _require_edges(g)
    n = g.n
    d_minus_i = sp.diags(g.degrees.astype(float) - 1.0)
    minus_i = -sp.eye(n)
    mat = sp.bmat([[None, d_minus_i], [minus_i, g.adjacency]], format="csr")
    mat.eliminate_zeros()
    return mat


def directed_edges(g: Graph) -> np.ndarray:
    """The directed-edge ordering used by :func:`full_nonbacktracking`.

    Row ``2e`` is ``(i, j)`` and row ``2e + 1`` is ``(j, i)`` for the
    e-th undirected edge in lexicographic order.
    """
    _require_edges(g)
    out = np.empty((2 * g.m, 2), dtype=np.int64)
    out[0::2] = g.edges
    out[1::2] = g.edges[:, ::-1]
    return out


def full_nonbacktracking(g: Graph) -> sp.csr_matrix:
    """Full 2m-by-2m non-backtracking matrix over directed edges.

    Entry ``(i->j, k->l)`` is 1 when ``j == k`` and ``i != l``: a walk
    may continue from ``j`` anywhere except straight back to ``i``.
    """
    _require_edges(g)
    dedges = directed_edges(g)
    index = {(int(i), int(j)): e for e, (i, j) in enumerate(dedges)}
    neighbors = [g.adjacency.indices[g.adjacency.indptr[v]:g.adjacency.indptr[v + 1]]
                 for v in range(g.n)]
    rows, cols = [], []
    for e, (i, j) in enumerate(dedges):
        for l in neighbors[j]:
            if l != i:
                rows.append(e)
                cols.append(index[(int(j), int(l))])
    data = np.ones(len(rows))
    size = 2 * g.m
    return sp.csr_matrix((data, (rows, cols)), shape=(size, size))


def bethe_hessian(g: Graph, r: float) -> sp.csr_matrix:
    """Bethe Hessian ``(r^2 - 1) I - r A + D`` as a symmetric CSR matrix."""
    _require_edges(g)
    if not math.isfinite(r):
        raise ValueError("r must be finite")
    diag = sp.diags((r * r - 1.0) + g.degrees.astype(float))
    return (diag - r * g.adjacency).tocsr()


def r_moment(g: Graph) -> float:
    """Square root of the degree second-moment statistic ``d_tilde``."""
    d_tilde = degree_stats(g).d_tilde
    if d_tilde <= 0:
        raise ValueError(f"d_tilde = {d_tilde} is not positive; "
                         "the moment radius is undefined")
    return math.sqrt(d_tilde)


def r_average(g: Graph) -> float:
    """Square root of the average degree."""
    _require_edges(g)
    return math.sqrt(2.0 * g.m / g.n)


def save_coordinates(matrix, path):
    """Dump a sparse matrix as text lines ``row col value`` (0-based)."""
    coo = sp.coo_matrix(matrix)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# {coo.shape[0]} {coo.shape[1]} {coo.nnz}\n")
        for i, j, v in zip(coo.row, coo.col, coo.data):
            fh.write(f"{i} {j} {float(v)!r}\n")
