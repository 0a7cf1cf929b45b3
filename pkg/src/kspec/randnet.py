"""Stochastic block model and degree-corrected block model samplers.

The generative recipe: nodes get contiguous community labels sized by
the proportion vector ``pi``; a K-by-K mixing matrix has ``w`` on the
diagonal and ``beta`` off it; per-node degree multipliers ``theta`` are
drawn from a two-point law (1 with probability ``1 - gamma``, else
``theta_low``); the resulting rank-K mean matrix is rescaled so the
expected average degree equals ``lambda_n`` and entries are clamped to
[0, 1]; edges are independent Bernoulli draws.

Sampling is driven by a counter-based Philox stream.  The stream for a
graph is derived as ``SeedSequence(seed)``; the benchmark harness
derives per-replication seeds as ``SeedSequence(master_seed,
spawn_key=(sweep_index, replication_index))``, which makes results
independent of worker count.  The ``theta`` uniforms are always drawn
first, even when ``gamma == 0``, so a zero-gamma spec consumes exactly
the same stream as its degree-corrected counterpart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graphs import Graph, from_edge_list

__all__ = [
    "BlockModelSpec",
    "EdgeProbabilityMatrix",
    "InfeasibleSpecError",
    "size_ratio_proportions",
    "planted_partition",
    "community_sizes",
    "community_labels",
    "build_mean_matrix",
    "sample",
]

CLAMP_FRACTION_LIMIT = 0.2


class InfeasibleSpecError(ValueError):
    """The target average degree cannot be met with probabilities in [0, 1]."""


@dataclass(frozen=True)
class BlockModelSpec:
    """Full generative description of an (DC)SBM experiment setting."""

    n: int
    K: int
    pi: tuple[float, ...]
    w: tuple[float, ...]
    beta: float
    lambda_n: float
    gamma: float = 0.0
    theta_low: float = 0.2

    def __post_init__(self):
        object.__setattr__(self, "pi", tuple(float(p) for p in self.pi))
        object.__setattr__(self, "w", tuple(float(x) for x in self.w))
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if len(self.pi) != self.K:
            raise ValueError(f"pi has length {len(self.pi)}, expected K={self.K}")
        if len(self.w) != self.K:
            raise ValueError(f"w has length {len(self.w)}, expected K={self.K}")
        if any(p < 0 for p in self.pi):
            raise ValueError("pi entries must be non-negative")
        if abs(math.fsum(self.pi) - 1.0) > 1e-12:
            raise ValueError("pi must sum to 1 within 1e-12")
        if any(x <= 0 for x in self.w):
            raise ValueError("w entries must be positive")
        if self.beta < 0:
            raise ValueError("beta must be non-negative")
        if self.lambda_n <= 0:
            raise ValueError("lambda_n must be positive")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        if not 0.0 < self.theta_low <= 1.0:
            raise ValueError("theta_low must lie in (0, 1]")


@dataclass(frozen=True)
class EdgeProbabilityMatrix:
    """Dense symmetric matrix of Bernoulli means with zero diagonal."""

    matrix: np.ndarray
    scale: float                   # factor applied to the raw mean matrix
    clamped_count: int             # off-diagonal entries clipped to 1
    clamped_fraction: float
    theta: np.ndarray = field(repr=False)

    @property
    def mean_degree(self) -> float:
        """Expected average degree implied by the (clamped) matrix."""
        return float(self.matrix.sum() / self.matrix.shape[0])


def size_ratio_proportions(K: int, ratio: float) -> tuple[float, ...]:
    """Proportion vector with first/last communities shrunk/grown.

    ``pi_1 = ratio/K``, ``pi_K = (2 - ratio)/K`` and ``1/K`` in between;
    ``ratio = 1`` gives equal sizes.
    """
    if K < 2:
        raise ValueError("size_ratio_proportions needs K >= 2")
    if not 0.0 < ratio <= 1.0:
        raise ValueError("ratio must lie in (0, 1]")
    return (ratio / K,) + (1.0 / K,) * (K - 2) + ((2.0 - ratio) / K,)


def planted_partition(n: int, a: float, b: float) -> tuple[BlockModelSpec, bool]:
    """Two equal communities with within-rate ``a/n`` and between-rate ``b/n``.

    Returns the spec plus the detectability indicator
    ``(a - b)**2 > 2*(a + b)``.
    """
    if not 0 <= b <= a:
        raise ValueError("need 0 <= b <= a")
    if a > n:
        raise ValueError("within-rate a must not exceed n")
    if a == 0:
        raise ValueError("a must be positive")
    pi = (0.5, 0.5)
    sizes = community_sizes(n, pi)
    # lambda_n chosen so the rescaled mean matrix hits a/n, b/n exactly
    raw = float(sizes[0] * (sizes[0] - 1) + sizes[1] * (sizes[1] - 1)
                + 2 * sizes[0] * sizes[1] * (b / a))
    spec = BlockModelSpec(n=n, K=2, pi=pi, w=(1.0, 1.0), beta=b / a,
                          lambda_n=a * raw / n ** 2)
    return spec, (a - b) ** 2 > 2 * (a + b)


def community_sizes(n: int, pi: tuple[float, ...]) -> np.ndarray:
    """Integer community sizes from proportions by largest remainder."""
    quotas = np.asarray(pi) * n
    sizes = np.floor(quotas).astype(np.int64)
    short = n - int(sizes.sum())
    if short:
        # stable tie-break: larger remainder first, then lower index
        order = np.lexsort((np.arange(len(pi)), -(quotas - sizes)))
        sizes[order[:short]] += 1
    return sizes


def community_labels(spec: BlockModelSpec) -> np.ndarray:
    """Planted 0-based labels: contiguous blocks sized by ``pi``."""
    return np.repeat(np.arange(spec.K), community_sizes(spec.n, spec.pi))


def _draw_theta(spec: BlockModelSpec, rng: np.random.Generator) -> np.ndarray:
    u = rng.random(spec.n)
    return np.where(u < spec.gamma, spec.theta_low, 1.0)


def _mean_from_theta(spec: BlockModelSpec, theta: np.ndarray) -> EdgeProbabilityMatrix:
    labels = community_labels(spec)
    mixing = np.full((spec.K, spec.K), spec.beta)
    np.fill_diagonal(mixing, spec.w)
    raw = np.outer(theta, theta) * mixing[np.ix_(labels, labels)]
    np.fill_diagonal(raw, 0.0)
    total = raw.sum()
    if total <= 0:
        raise InfeasibleSpecError("mean matrix is identically zero")
    scale = spec.n * spec.lambda_n / total
    scaled = scale * raw
    over = int((scaled > 1.0).sum())
    n_offdiag = spec.n * (spec.n - 1)
    frac = over / n_offdiag
    if frac > CLAMP_FRACTION_LIMIT:
        raise InfeasibleSpecError(
            f"target degree infeasible: {frac:.1%} of entries exceed 1 after scaling")
    np.clip(scaled, 0.0, 1.0, out=scaled)
    scaled.flags.writeable = False
    return EdgeProbabilityMatrix(matrix=scaled, scale=scale, clamped_count=over,
                                 clamped_fraction=frac, theta=theta)


def build_mean_matrix(spec: BlockModelSpec,
                      rng: np.random.Generator | None = None) -> EdgeProbabilityMatrix:
    """Edge-probability matrix for a spec.

    Degree multipliers are drawn from ``rng`` when ``gamma > 0``; a pure
    block model (``gamma == 0``) needs no randomness.  The scale factor
    is chosen so the pre-clamping expected average degree equals
    ``lambda_n``; the clamped fraction is reported on the result.
    """
    if spec.gamma > 0:
        if rng is None:
            raise ValueError("gamma > 0 requires an rng for the theta draws")
        theta = _draw_theta(spec, rng)
    else:
        theta = np.ones(spec.n)
    return _mean_from_theta(spec, theta)


def sample(spec: BlockModelSpec,
           seed: int | np.random.SeedSequence) -> tuple[Graph, np.ndarray]:
    """Draw one graph; deterministic for a fixed seed.

    ``seed`` is an integer or an already-derived ``SeedSequence`` (the
    benchmark harness spawns one per replication).  Returns the graph
    and the planted 0-based label vector.  Stream order is fixed: ``n``
    theta uniforms first, then the ``n * n`` edge uniforms (upper
    triangle used).
    """
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    rng = np.random.Generator(np.random.Philox(seed))
    theta = _draw_theta(spec, rng)
    epm = _mean_from_theta(spec, theta)
    u = rng.random((spec.n, spec.n))
    iu = np.triu_indices(spec.n, k=1)
    hits = u[iu] < epm.matrix[iu]
    edges = np.column_stack((iu[0][hits], iu[1][hits]))
    return from_edge_list(edges, n_hint=spec.n), community_labels(spec)
