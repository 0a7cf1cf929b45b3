"""Estimators for the number of communities in a graph.

Five methods share two spectral ingredients:

* NB counts the real eigenvalues of the reduced non-backtracking
  matrix that reach the bulk radius, approximated by ``sqrt(d_tilde)``.
* BHm / BHa count the negative eigenvalues of the Bethe Hessian at
  ``r = sqrt(d_tilde)`` (moment choice) or ``r = sqrt(mean degree)``
  (average choice).
* BHmc / BHac additionally admit small positive eigenvalues through a
  ratio test: with the spectrum sorted ascending as ``v_1 <= v_2 <=
  ...``, the estimate is the largest ``k`` with ``t * v_k <= v_{k+1}``.
  Any negative ``v_k`` passes automatically, so the corrected count
  never falls below the plain negative-eigenvalue count.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .eigen import inertia_ldlt, nonsym_spectrum, sym_smallest
from .graphs import Graph, degree_stats
from .operators import bethe_hessian, r_average, r_moment, reduced_nonbacktracking

__all__ = [
    "METHODS",
    "SolverConfig",
    "EstimateReport",
    "normalize_method",
    "estimate_nb",
    "count_negative",
    "corrected_count",
    "estimate_bh",
    "bh_report_pair",
    "estimate_all",
]

METHODS = ("NB", "BHm", "BHmc", "BHa", "BHac")
_CANONICAL = {name.lower(): name for name in METHODS}

DEFAULT_T = 5.0
DEFAULT_K_MAX = 15


def normalize_method(name: str) -> str:
    """Map a case-insensitive method name to its canonical spelling."""
    try:
        return _CANONICAL[name.lower()]
    except KeyError:
        raise ValueError(f"unknown method {name!r}; choose from {', '.join(METHODS)}") from None


@dataclass(frozen=True)
class SolverConfig:
    """Numeric knobs shared by all estimators.

    ``nb_threshold`` selects how the non-backtracking bulk radius is
    obtained: ``"dtilde"`` (degree moments, the default) or
    ``"operator_norm"`` (explicit spectral norm, more expensive).
    """

    dense_cutoff_sym: int = 2000
    dense_cutoff_nonsym: int = 1500
    force_iterative: bool = False
    tol: float = 1e-9
    max_iter: int = 10000
    zero_tol: float = 1e-8
    nb_threshold: str = "dtilde"
    realness_abs: float = 1e-6
    realness_rel: float = 1e-8
    threshold_slack: float = 1e-10

    def __post_init__(self):
        if self.nb_threshold not in ("dtilde", "operator_norm"):
            raise ValueError("nb_threshold must be 'dtilde' or 'operator_norm'")


DEFAULT_CONFIG = SolverConfig()


@dataclass
class EstimateReport:
    """One method's estimate plus the evidence behind it."""

    method: str
    k_hat: int
    threshold: float
    t: float | None = None
    evidence: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "k_hat": self.k_hat,
            "threshold": self.threshold,
            "t": self.t,
            "evidence": self.evidence,
            "warnings": list(self.warnings),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _spectral_radius(matrix, cfg: SolverConfig) -> float:
    """Largest eigenvalue magnitude: the bulk-circle radius squared.

    For the heavily non-normal non-backtracking operator the 2-norm
    overshoots the bulk circle badly, so the radius is taken from the
    spectrum itself.
    """
    import scipy.sparse.linalg as spla

    dim = matrix.shape[0]
    if dim <= cfg.dense_cutoff_nonsym and not cfg.force_iterative:
        return float(np.abs(np.linalg.eigvals(matrix.toarray())).max())
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(0x5EED)))
    vals = spla.eigs(matrix.astype(float), k=1, which="LM",
                     v0=rng.standard_normal(dim), return_eigenvectors=False)
    return float(np.abs(vals).max())


def _is_real(values: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    return np.abs(values.imag) <= np.maximum(cfg.realness_abs,
                                             cfg.realness_rel * np.abs(values))


def estimate_nb(g: Graph, cfg: SolverConfig = DEFAULT_CONFIG) -> EstimateReport:
    """Non-backtracking estimate: real eigenvalues at or above the bulk radius.

    The comparison is inclusive, with a relative slack of
    ``cfg.threshold_slack`` absorbing ties at machine precision.
    """
    stats = degree_stats(g)
    bmat = reduced_nonbacktracking(g)
    if cfg.nb_threshold == "dtilde":
        if stats.d_tilde <= 0:
            raise ValueError("d_tilde is not positive; NB threshold undefined")
        threshold = math.sqrt(stats.d_tilde)
    else:
        threshold = math.sqrt(_spectral_radius(bmat, cfg))

    spect = nonsym_spectrum(bmat, mode="auto", radius=threshold, rank_by="real",
                            dense_cutoff=cfg.dense_cutoff_nonsym,
                            force_iterative=cfg.force_iterative)
    vals = spect.values
    mask = _is_real(vals, cfg) & (vals.real >= threshold * (1.0 - cfg.threshold_slack))
    counted = np.sort(vals.real[mask])[::-1]
    warnings = []
    if counted.size == 0:
        warnings.append("no real eigenvalues reached the threshold; k_hat = 0")
    return EstimateReport(
        method="NB",
        k_hat=int(counted.size),
        threshold=threshold,
        evidence={
            "counted_real_eigenvalues": [float(v) for v in counted],
            "n_eigenvalues_examined": int(vals.size),
            "spectrum_mode": spect.mode,
        },
        warnings=warnings,
    )


def count_negative(g: Graph, r: float, cfg: SolverConfig = DEFAULT_CONFIG) -> int:
    """Number of negative eigenvalues of the Bethe Hessian at ``r``."""
    return inertia_ldlt(bethe_hessian(g, r), zero_tol=cfg.zero_tol).negative


def corrected_count(sorted_smallest, t: float) -> int:
    """Ratio-test count over an ascending eigenvalue list.

    Largest ``k`` (1-based) with ``t * v_k <= v_{k+1}``; 0 when no k
    qualifies.  The list must hold at least two values and ``t`` must
    exceed 1.
    """
    vals = np.asarray(sorted_smallest, dtype=float)
    if vals.size < 2:
        raise ValueError("need at least two eigenvalues")
    if not t > 1:
        raise ValueError("t must exceed 1")
    if np.any(np.diff(vals) < 0):
        raise ValueError("eigenvalue list must be ascending")
    k_hat = 0
    for k in range(1, vals.size):
        if t * vals[k - 1] <= vals[k]:
            k_hat = k
    return k_hat


def _ratio_outcomes(vals: np.ndarray, t: float) -> list[dict]:
    return [
        {"k": k, "scaled": float(t * vals[k - 1]), "next": float(vals[k]),
         "pass": bool(t * vals[k - 1] <= vals[k])}
        for k in range(1, vals.size)
    ]


def bh_report_pair(g: Graph, variant: str, t: float = DEFAULT_T,
                   k_max: int = DEFAULT_K_MAX,
                   cfg: SolverConfig = DEFAULT_CONFIG) -> tuple[EstimateReport, EstimateReport]:
    """Uncorrected and corrected Bethe Hessian reports, sharing one matrix.

    ``variant`` is ``"m"`` (moment radius) or ``"a"`` (average-degree
    radius).
    """
    if variant not in ("m", "a"):
        raise ValueError("variant must be 'm' or 'a'")
    r = r_moment(g) if variant == "m" else r_average(g)
    hessian = bethe_hessian(g, r)
    k_eff = min(k_max + 1, g.n)
    spect = sym_smallest(hessian, k=k_eff, tol=cfg.tol, max_iter=cfg.max_iter,
                         dense_cutoff=cfg.dense_cutoff_sym,
                         force_iterative=cfg.force_iterative)
    inertia = inertia_ldlt(hessian, zero_tol=cfg.zero_tol)
    smallest = [float(v) for v in spect.values]
    base = "BHm" if variant == "m" else "BHa"
    evidence = {
        "r": r,
        "smallest_eigenvalues": smallest,
        "negative_count": inertia.negative,
        "inertia": [inertia.negative, inertia.zero, inertia.positive],
    }
    uncorrected = EstimateReport(method=base, k_hat=inertia.negative,
                                 threshold=r, evidence=dict(evidence))

    k_corr = corrected_count(spect.values, t)
    warnings = []
    if k_corr == 0:
        warnings.append("no k passed the ratio test; k_hat = 0")
    if k_corr == min(k_max, k_eff - 1):
        warnings.append("k_max reached; the estimate may be truncated")
    corrected = EstimateReport(
        method=base + "c", k_hat=k_corr, threshold=r, t=t,
        evidence={**evidence, "ratio_tests": _ratio_outcomes(spect.values, t)},
        warnings=warnings,
    )
    return uncorrected, corrected


def estimate_bh(g: Graph, variant: str, corrected: bool = False,
                t: float = DEFAULT_T, k_max: int = DEFAULT_K_MAX,
                cfg: SolverConfig = DEFAULT_CONFIG) -> EstimateReport:
    """Bethe Hessian estimate; see :func:`bh_report_pair` for the knobs."""
    pair = bh_report_pair(g, variant, t=t, k_max=k_max, cfg=cfg)
    return pair[1] if corrected else pair[0]


def estimate_all(g: Graph, methods=None, t: float = DEFAULT_T,
                 k_max: int = DEFAULT_K_MAX,
                 cfg: SolverConfig = DEFAULT_CONFIG) -> list[EstimateReport]:
    """Run the requested methods (default all five) in canonical order.

    The two reports of each Bethe Hessian variant share their matrix
    and eigenvalue work.
    """
    wanted = list(METHODS) if methods is None else [normalize_method(m) for m in methods]
    reports: dict[str, EstimateReport] = {}
    if "NB" in wanted:
        reports["NB"] = estimate_nb(g, cfg)
    for variant, unc_name, corr_name in (("m", "BHm", "BHmc"), ("a", "BHa", "BHac")):
        if unc_name in wanted or corr_name in wanted:
            unc, corr = bh_report_pair(g, variant, t=t, k_max=k_max, cfg=cfg)
            reports[unc_name] = unc
            reports[corr_name] = corr
    return [reports[name] for name in METHODS if name in wanted]
