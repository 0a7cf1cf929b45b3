"""Replicated accuracy experiments and real-network evaluation.

A plan fixes a base block model, one sweep axis (average degree,
community-size ratio, or within-community weights), a method subset,
and a replication count.  Per-replication random streams are derived as
``SeedSequence(master_seed, spawn_key=(sweep_index, replication_index))``,
so outcomes are bitwise identical for any worker count.
"""

from __future__ import annotations

import json
import logging
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .datasets import REGISTRY, load_dataset
from .estimators import (DEFAULT_CONFIG, DEFAULT_K_MAX, DEFAULT_T,
                         SolverConfig, bh_report_pair, estimate_all,
                         estimate_nb, normalize_method)
from .graphs import largest_connected_component, load_edge_list
from .randnet import BlockModelSpec, sample, size_ratio_proportions

logger = logging.getLogger(__name__)

__all__ = [
    "SCHEMA_VERSION",
    "PlanValidationError",
    "ExperimentPlan",
    "PointResult",
    "ExperimentOutcome",
    "plan_from_dict",
    "plan_to_dict",
    "load_plan",
    "spec_for_sweep_value",
    "run_plan",
    "eval_real",
    "export",
]

SCHEMA_VERSION = 1
SWEEP_PARAMS = ("lambda_n", "size_ratio", "w")
CSV_COLUMNS = ("sweep_param", "sweep_value", "method", "accuracy",
               "mean_khat", "n_fail", "replications", "seed")


class PlanValidationError(ValueError):
    """Plan document violates the schema; message names the field path."""


@dataclass(frozen=True)
class ExperimentPlan:
    base: BlockModelSpec
    sweep_param: str
    sweep_values: tuple
    methods: tuple[str, ...]
    replications: int
    seed: int
    k_max: int = DEFAULT_K_MAX
    t: float = DEFAULT_T

    def __post_init__(self):
        if self.sweep_param not in SWEEP_PARAMS:
            raise PlanValidationError(f"sweep.param: must be one of {SWEEP_PARAMS}")
        if len(self.sweep_values) == 0:
            raise PlanValidationError("sweep.values: must be non-empty")
        if self.replications < 1:
            raise PlanValidationError("replications: must be >= 1")


@dataclass(frozen=True)
class PointResult:
    sweep_index: int
    sweep_value: object
    method: str
    accuracy: float
    mean_khat: float | None
    khat_counts: dict
    n_fail: int
    replications: int


@dataclass
class ExperimentOutcome:
    plan: ExperimentPlan
    rows: list[PointResult]
    runtime_seconds: float
    warnings: list[str] = field(default_factory=list)


def _expect(doc: dict, key: str, kind, path: str):
    if key not in doc:
        raise PlanValidationError(f"{path}{key}: missing required field")
    value = doc[key]
    if kind is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if kind is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if not isinstance(value, kind) or isinstance(value, bool):
        raise PlanValidationError(f"{path}{key}: expected {kind.__name__}, "
                                  f"got {type(value).__name__}")
    return value


def plan_from_dict(doc: dict) -> ExperimentPlan:
    """Validate a plan document; errors carry the offending field path."""
    if not isinstance(doc, dict):
        raise PlanValidationError("plan: expected a JSON object")
    version = _expect(doc, "schema_version", int, "")
    if version != SCHEMA_VERSION:
        raise PlanValidationError(f"schema_version: expected {SCHEMA_VERSION}, got {version}")

    model = _expect(doc, "model", dict, "")
    n = _expect(model, "n", int, "model.")
    k = _expect(model, "K", int, "model.")
    if k < 1:
        raise PlanValidationError("model.K: must be >= 1")
    pi = model.get("pi")
    if pi is None:
        pi = [1.0 / k] * k
    elif not isinstance(pi, list):
        raise PlanValidationError("model.pi: expected a list")
    w = model.get("w", [1.0] * k)
    if not isinstance(w, list):
        raise PlanValidationError("model.w: expected a list")
    try:
        base = BlockModelSpec(
            n=n, K=k, pi=tuple(pi), w=tuple(w),
            beta=_expect(model, "beta", float, "model."),
            lambda_n=_expect(model, "lambda_n", float, "model."),
            gamma=float(model.get("gamma", 0.0)),
            theta_low=float(model.get("theta_low", 0.2)),
        )
    except ValueError as exc:
        raise PlanValidationError(f"model: {exc}") from None

    sweep = _expect(doc, "sweep", dict, "")
    param = _expect(sweep, "param", str, "sweep.")
    if param not in SWEEP_PARAMS:
        raise PlanValidationError(f"sweep.param: must be one of {SWEEP_PARAMS}")
    values = _expect(sweep, "values", list, "sweep.")
    if not values:
        raise PlanValidationError("sweep.values: must be non-empty")
    parsed_values = []
    for i, v in enumerate(values):
        if param == "w":
            if not isinstance(v, list) or len(v) != k:
                raise PlanValidationError(f"sweep.values[{i}]: expected a list of {k} weights")
            parsed_values.append(tuple(float(x) for x in v))
        else:
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise PlanValidationError(f"sweep.values[{i}]: expected a number")
            parsed_values.append(float(v))

    methods_doc = _expect(doc, "methods", list, "")
    try:
        methods = tuple(normalize_method(m) for m in methods_doc)
    except ValueError as exc:
        raise PlanValidationError(f"methods: {exc}") from None

    plan = ExperimentPlan(
        base=base, sweep_param=param, sweep_values=tuple(parsed_values),
        methods=methods,
        replications=_expect(doc, "replications", int, ""),
        seed=_expect(doc, "seed", int, ""),
        k_max=int(doc.get("k_max", DEFAULT_K_MAX)),
        t=float(doc.get("t", DEFAULT_T)),
    )
    # surface sweep/model incompatibilities (e.g. size_ratio with K=1) now
    for i, v in enumerate(plan.sweep_values):
        try:
            spec_for_sweep_value(plan.base, plan.sweep_param, v)
        except ValueError as exc:
            raise PlanValidationError(f"sweep.values[{i}]: {exc}") from None
    return plan


def plan_to_dict(plan: ExperimentPlan) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "model": {
            "n": plan.base.n, "K": plan.base.K, "pi": list(plan.base.pi),
            "w": list(plan.base.w), "beta": plan.base.beta,
            "lambda_n": plan.base.lambda_n, "gamma": plan.base.gamma,
            "theta_low": plan.base.theta_low,
        },
        "sweep": {"param": plan.sweep_param,
                  "values": [list(v) if isinstance(v, tuple) else v
                             for v in plan.sweep_values]},
        "methods": list(plan.methods),
        "replications": plan.replications,
        "seed": plan.seed,
        "k_max": plan.k_max,
        "t": plan.t,
    }


def load_plan(path) -> ExperimentPlan:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise PlanValidationError(f"plan: invalid JSON ({exc})") from None
    return plan_from_dict(doc)


def spec_for_sweep_value(base: BlockModelSpec, param: str, value) -> BlockModelSpec:
    if param == "lambda_n":
        return replace(base, lambda_n=float(value))
    if param == "size_ratio":
        return replace(base, pi=size_ratio_proportions(base.K, float(value)))
    if param == "w":
        return replace(base, w=tuple(float(x) for x in value))
    raise ValueError(f"unknown sweep parameter {param!r}")


def _run_replication(plan: ExperimentPlan, cfg: SolverConfig,
                     s_idx: int, r_idx: int):
    """One sampled graph, all requested methods.  Failures are recorded
    per method group, never raised."""
    spec = spec_for_sweep_value(plan.base, plan.sweep_param, plan.sweep_values[s_idx])
    seed = np.random.SeedSequence(plan.seed, spawn_key=(s_idx, r_idx))
    khats: dict[str, int | None] = {m: None for m in plan.methods}
    errors: list[str] = []
    try:
        g, _labels = sample(spec, seed)
    except Exception as exc:
        errors.append(f"sample[{s_idx},{r_idx}]: {exc}")
        return s_idx, r_idx, khats, errors

    if "NB" in plan.methods:
        try:
            khats["NB"] = estimate_nb(g, cfg).k_hat
        except Exception as exc:
            errors.append(f"NB[{s_idx},{r_idx}]: {exc}")
    for variant, unc, corr in (("m", "BHm", "BHmc"), ("a", "BHa", "BHac")):
        if unc in plan.methods or corr in plan.methods:
            try:
                pair = bh_report_pair(g, variant, t=plan.t, k_max=plan.k_max, cfg=cfg)
                if unc in plan.methods:
                    khats[unc] = pair[0].k_hat
                if corr in plan.methods:
                    khats[corr] = pair[1].k_hat
            except Exception as exc:
                errors.append(f"BH{variant}[{s_idx},{r_idx}]: {exc}")
    return s_idx, r_idx, khats, errors


def run_plan(plan: ExperimentPlan, workers: int = 1,
             cfg: SolverConfig = DEFAULT_CONFIG,
             progress=None) -> ExperimentOutcome:
    """Execute every (sweep point, replication) cell and aggregate.

    ``progress``, when given, is called with ``(done, total)`` after
    each replication.  Results do not depend on ``workers``.
    """
    t_start = time.perf_counter()
    tasks = [(s, r) for s in range(len(plan.sweep_values))
             for r in range(plan.replications)]
    results = {}
    warnings: list[str] = []

    def _store(res):
        s_idx, r_idx, khats, errors = res
        results[(s_idx, r_idx)] = khats
        warnings.extend(errors)
        if progress is not None:
            progress(len(results), len(tasks))

    if workers <= 1:
        for s, r in tasks:
            _store(_run_replication(plan, cfg, s, r))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for res in pool.map(_run_replication, [plan] * len(tasks),
                                [cfg] * len(tasks), [s for s, _ in tasks],
                                [r for _, r in tasks], chunksize=1):
                _store(res)

    rows: list[PointResult] = []
    for s_idx, value in enumerate(plan.sweep_values):
        true_k = plan.base.K
        for method in plan.methods:
            khats = [results[(s_idx, r)][method] for r in range(plan.replications)]
            hits = sum(1 for kh in khats if kh == true_k)
            ok = [kh for kh in khats if kh is not None]
            counts = Counter(ok)
            n_fail = plan.replications - len(ok)
            if n_fail * 2 > plan.replications:
                warnings.append(f"sweep point {s_idx} ({method}): "
                                f"{n_fail}/{plan.replications} replications failed")
            rows.append(PointResult(
                sweep_index=s_idx, sweep_value=value, method=method,
                accuracy=hits / plan.replications,
                mean_khat=(sum(ok) / len(ok)) if ok else None,
                khat_counts={int(kk): counts[kk] for kk in sorted(counts)},
                n_fail=n_fail, replications=plan.replications,
            ))
    return ExperimentOutcome(plan=plan, rows=rows,
                             runtime_seconds=time.perf_counter() - t_start,
                             warnings=warnings)


def _fmt_value(v) -> str:
    if isinstance(v, (tuple, list)):
        return "|".join(_fmt_value(x) for x in v)
    return format(float(v), ".10g")


def export(outcome: ExperimentOutcome, fmt: str, path,
           include_timestamp: bool = True) -> None:
    """Write the outcome table as CSV or JSON.

    Row order and float formatting are deterministic; the optional
    timestamp header is the only non-reproducible byte and can be
    suppressed.
    """
    path = Path(path)
    if not outcome.rows:
        logger.warning("outcome has no rows; writing header only")
    if fmt == "csv":
        lines = []
        if include_timestamp:
            lines.append(f"# generated {time.strftime('%Y-%m-%dT%H:%M:%S')}")
        lines.append(",".join(CSV_COLUMNS))
        for row in outcome.rows:
            lines.append(",".join([
                outcome.plan.sweep_param,
                _fmt_value(row.sweep_value),
                row.method,
                format(row.accuracy, ".10g"),
                "nan" if row.mean_khat is None else format(row.mean_khat, ".10g"),
                str(row.n_fail),
                str(row.replications),
                str(outcome.plan.seed),
            ]))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    elif fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "plan": plan_to_dict(outcome.plan),
            "rows": [{
                "sweep_param": outcome.plan.sweep_param,
                "sweep_value": list(row.sweep_value) if isinstance(row.sweep_value, tuple)
                               else row.sweep_value,
                "method": row.method,
                "accuracy": row.accuracy,
                "mean_khat": row.mean_khat,
                "khat_counts": {str(kk): vv for kk, vv in row.khat_counts.items()},
                "n_fail": row.n_fail,
                "replications": row.replications,
                "seed": outcome.plan.seed,
            } for row in outcome.rows],
            "warnings": outcome.warnings,
        }
        if include_timestamp:
            doc["generated"] = time.strftime("%Y-%m-%dT%H:%M:%S")
        path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    else:
        raise ValueError(f"unknown export format {fmt!r}")


def eval_real(source, methods=None, k_max: int = DEFAULT_K_MAX,
              t: float = DEFAULT_T, cfg: SolverConfig = DEFAULT_CONFIG,
              apply_lcc: bool | None = None) -> dict:
    """Estimate community counts for a named dataset or an edge-list file.

    Named datasets follow their registry policy for largest-component
    extraction unless ``apply_lcc`` overrides it.  Returns a table row:
    dataset, n, m, per-method estimates, known truth when available.
    """
    truth = None
    if isinstance(source, str) and source in REGISTRY:
        g, info = load_dataset(source, apply_lcc=apply_lcc)
        name, truth = source, info.truth
    else:
        g = load_edge_list(source)
        if apply_lcc:
            g, _ = largest_connected_component(g)
        name = str(source)
    reports = estimate_all(g, methods, t=t, k_max=k_max, cfg=cfg)
    return {
        "dataset": name,
        "n": g.n,
        "m": g.m,
        "estimates": {rep.method: rep.k_hat for rep in reports},
        "truth": truth,
        "warnings": [w for rep in reports for w in rep.warnings],
    }
