"""Immutable undirected simple graphs with cached degree data.

Graphs are built once from an edge list and never mutated afterwards,
which makes them safe to share across concurrent estimator runs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

logger = logging.getLogger(__name__)

__all__ = [
    "Graph",
    "DegreeStats",
    "EdgeListParseError",
    "from_edge_list",
    "parse_edge_list",
    "load_edge_list",
    "largest_connected_component",
    "degree_stats",
]


class EdgeListParseError(ValueError):
    """Raised when an edge-list file contains a malformed line."""


class Graph:
    """Undirected simple graph: no self-loops, no parallel edges.

    Node ids are contiguous ``0..n-1``.  Edges are stored as an
    ``(m, 2)`` integer array with ``edges[e, 0] < edges[e, 1]``, sorted
    lexicographically.  Degrees and the CSR adjacency matrix are cached
    at construction; all arrays are marked read-only.
    """

    __slots__ = ("n", "edges", "degrees", "dropped_self_loops",
                 "merged_duplicates", "_adj")

    def __init__(self, n: int, edges: np.ndarray,
                 dropped_self_loops: int = 0, merged_duplicates: int = 0):
        if n < 1:
            raise ValueError("graph needs at least one node")
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size and edges.max() >= n:
            raise ValueError("edge endpoint out of range")
        self.n = int(n)
        self.edges = edges
        self.degrees = np.bincount(edges.ravel(), minlength=n).astype(np.int64)
        self.dropped_self_loops = dropped_self_loops
        self.merged_duplicates = merged_duplicates
        m = edges.shape[0]
        data = np.ones(2 * m)
        rows = np.concatenate([edges[:, 0], edges[:, 1]])
        cols = np.concatenate([edges[:, 1], edges[:, 0]])
        self._adj = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
        for a in (self.edges, self.degrees):
            a.flags.writeable = False

    @property
    def m(self) -> int:
        """Number of undirected edges."""
        return self.edges.shape[0]

    @property
    def adjacency(self) -> sp.csr_matrix:
        """Symmetric 0/1 CSR adjacency matrix.  Treat as read-only."""
        return self._adj

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.edges.shape == other.edges.shape \
            and bool(np.array_equal(self.edges, other.edges))

    def __hash__(self):
        return hash((self.n, self.m, self.edges.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class DegreeStats:
    """Degree summary used to pick spectral thresholds.

    ``d_tilde`` is the second-moment statistic
    ``sum(d_i^2) / sum(d_i) - 1``; ``lambda_hat`` is the plain average
    degree.  By Cauchy-Schwarz ``d_tilde >= lambda_hat - 1``.
    """

    lambda_hat: float
    d_tilde: float
    min_degree: int
    max_degree: int


def from_edge_list(pairs: Iterable[Sequence[int]] | np.ndarray,
                   n_hint: int | None = None) -> Graph:
    """Build a :class:`Graph` from node-id pairs.

    Self-loops are dropped and duplicate edges (in either orientation)
    are merged; both events are counted on the returned graph and logged
    when nonzero.  ``n`` is ``max id + 1`` or ``n_hint`` if larger.

    Raises ``ValueError`` on empty input without ``n_hint`` or on
    negative ids.
    """
    arr = np.asarray(list(pairs) if not isinstance(pairs, np.ndarray) else pairs,
                     dtype=np.int64)
    if arr.size == 0:
        if n_hint is None:
            raise ValueError("empty graph: no edges and no node-count hint")
        return Graph(n_hint, np.empty((0, 2), dtype=np.int64))
    arr = arr.reshape(-1, 2)
    if arr.min() < 0:
        raise ValueError("node ids must be non-negative")

    loops = arr[:, 0] == arr[:, 1]
    n_loops = int(loops.sum())
    arr = arr[~loops]
    canon = np.sort(arr, axis=1)
    uniq = np.unique(canon, axis=0) if canon.size else canon
    n_dup = canon.shape[0] - uniq.shape[0]
    if n_loops or n_dup:
        logger.warning("simplified input: dropped %d self-loops, merged %d duplicate edges",
                       n_loops, n_dup)

    max_id = int(arr.max()) if arr.size else -1
    n = max_id + 1
    if n_hint is not None:
        n = max(n, n_hint)
    if n == 0:
        raise ValueError("empty graph: all edges were self-loops")
    return Graph(n, uniq, dropped_self_loops=n_loops, merged_duplicates=n_dup)


def parse_edge_list(text: str, n_hint: int | None = None) -> Graph:
    """Parse edge-list text: one edge per line, two integer tokens.

    Blank lines and lines starting with ``#`` or ``%`` are ignored.
    Malformed lines raise :class:`EdgeListParseError` with the 1-based
    line number.
    """
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(("#", "%")):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise EdgeListParseError(
                f"line {lineno}: expected 2 tokens, got {len(tokens)}")
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise EdgeListParseError(
                f"line {lineno}: non-integer token in {tokens!r}") from None
        if u < 0 or v < 0:
            raise EdgeListParseError(f"line {lineno}: negative node id")
        pairs.append((u, v))
    return from_edge_list(np.array(pairs, dtype=np.int64).reshape(-1, 2), n_hint=n_hint)


def load_edge_list(path, n_hint: int | None = None) -> Graph:
    """Read an edge-list file (see :func:`parse_edge_list`)."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_edge_list(fh.read(), n_hint=n_hint)


def largest_connected_component(g: Graph) -> tuple[Graph, np.ndarray]:
    """Induced subgraph on the largest connected component.

    Returns ``(subgraph, node_map)`` where ``node_map[new_id]`` is the
    original node id.  Ties between equally large components go to the
    one containing the smallest original node id.  Idempotent.
    """
    n_comp, labels = connected_components(g.adjacency, directed=False)
    if n_comp == 1:
        return g, np.arange(g.n, dtype=np.int64)
    sizes = np.bincount(labels, minlength=n_comp)
    best = sizes.max()
    # smallest original id among maximal components wins
    winner = labels[np.flatnonzero(sizes[labels] == best)[0]]
    keep = np.flatnonzero(labels == winner).astype(np.int64)
    remap = -np.ones(g.n, dtype=np.int64)
    remap[keep] = np.arange(keep.size)
    mask = (labels[g.edges[:, 0]] == winner)
    sub_edges = remap[g.edges[mask]]
    sub = Graph(int(keep.size), sub_edges)
    return sub, keep


def degree_stats(g: Graph) -> DegreeStats:
    """Average degree and the second-moment statistic ``d_tilde``.

    Sums are taken over exact integers before the final division.
    Raises ``ValueError`` for edgeless graphs.
    """
    if g.m == 0:
        raise ValueError("degenerate graph: no edges")
    d = g.degrees
    sum_d = int(d.sum())
    sum_d2 = int((d.astype(object) ** 2).sum())
    return DegreeStats(
        lambda_hat=sum_d / g.n,
        d_tilde=sum_d2 / sum_d - 1.0,
        min_degree=int(d.min()),
        max_degree=int(d.max()),
    )
