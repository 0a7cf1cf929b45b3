"""Command-line front-end: estimate, generate, bench, eval-real.

Exit codes: 0 success, 1 usage or plan-schema error, 2 runtime or
solver error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .bench import (PlanValidationError, eval_real, export, load_plan,
                    run_plan)
from .datasets import DatasetMissingError, dataset_names
from .estimators import (DEFAULT_K_MAX, DEFAULT_T, METHODS, SolverConfig,
                         estimate_all)
from .graphs import largest_connected_component, load_edge_list
from .randnet import BlockModelSpec, sample, size_ratio_proportions

USAGE_EXIT = 1
RUNTIME_EXIT = 2

_METHOD_CHOICES = ("all",) + tuple(m.lower() for m in METHODS)


class _Parser(argparse.ArgumentParser):
    """argparse reserves exit code 2 for usage errors; we want 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _parse_methods(value: str) -> list[str] | None:
    names = [v.strip() for v in value.split(",") if v.strip()]
    if not names or "all" in names:
        return None
    return names


def _solver_config(args) -> SolverConfig:
    kwargs = {}
    if getattr(args, "force_iterative", False):
        kwargs["force_iterative"] = True
    return SolverConfig(**kwargs)


def _print_reports(reports, graph, args, extra=None):
    if args.format == "json":
        doc = {"n": graph.n, "m": graph.m,
               "reports": [rep.to_dict() for rep in reports]}
        if extra:
            doc.update(extra)
        print(json.dumps(doc, indent=2))
    else:
        print(f"graph: n={graph.n} m={graph.m}")
        for rep in reports:
            line = f"{rep.method:<5} k_hat={rep.k_hat:<3} threshold={rep.threshold:.6g}"
            if rep.t is not None:
                line += f" t={rep.t:g}"
            print(line)
            for w in rep.warnings:
                print(f"      warning: {w}")


def _cmd_estimate(args) -> int:
    g = load_edge_list(args.input)
    if args.lcc:
        g, _ = largest_connected_component(g)
    methods = None if args.method == "all" else [args.method]
    reports = estimate_all(g, methods, t=args.t, k_max=args.kmax,
                           cfg=_solver_config(args))
    _print_reports(reports, g, args)
    return 0


def _spec_from_args(args) -> BlockModelSpec:
    if args.spec:
        with open(args.spec, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        k = doc["K"]
        return BlockModelSpec(
            n=doc["n"], K=k,
            pi=tuple(doc.get("pi", [1.0 / k] * k)),
            w=tuple(doc.get("w", [1.0] * k)),
            beta=doc["beta"], lambda_n=doc["lambda_n"],
            gamma=doc.get("gamma", 0.0), theta_low=doc.get("theta_low", 0.2),
        )
    k = args.communities
    if args.size_ratio is not None and k >= 2:
        pi = size_ratio_proportions(k, args.size_ratio)
    else:
        pi = (1.0 / k,) * k
    w = tuple(float(x) for x in args.w.split(",")) if args.w else (1.0,) * k
    return BlockModelSpec(n=args.n, K=k, pi=pi, w=w, beta=args.beta,
                          lambda_n=args.lambda_n, gamma=args.gamma)


def _cmd_generate(args) -> int:
    spec = _spec_from_args(args)
    g, labels = sample(spec, args.seed)
    with open(args.out, "w", encoding="utf-8") as fh:
        for u, v in g.edges:
            fh.write(f"{u} {v}\n")
    labels_path = str(args.out) + ".labels"
    with open(labels_path, "w", encoding="utf-8") as fh:
        for lab in labels:
            fh.write(f"{lab + 1}\n")
    mean_degree = 2.0 * g.m / g.n
    print(f"generated graph: n={g.n} m={g.m} mean_degree={mean_degree:.4g} "
          f"K={spec.K} seed={args.seed}")
    print(f"edges written to {args.out}, labels to {labels_path}")
    return 0


def _cmd_bench(args) -> int:
    plan = load_plan(args.plan)

    def progress(done, total):
        if done % max(1, total // 20) == 0 or done == total:
            print(f"bench: {done}/{total} replications", file=sys.stderr)

    outcome = run_plan(plan, workers=args.workers, cfg=_solver_config(args),
                       progress=progress)
    export(outcome, args.format, args.out,
           include_timestamp=not args.no_timestamp)
    for w in outcome.warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(f"wrote {args.out} ({len(outcome.rows)} rows, "
          f"{outcome.runtime_seconds:.1f}s)", file=sys.stderr)
    return 0


def _cmd_eval_real(args) -> int:
    methods = _parse_methods(args.methods)
    rows = []
    for name in args.dataset or []:
        rows.append(eval_real(name, methods, k_max=args.kmax, t=args.t,
                              cfg=_solver_config(args)))
    for path in args.input or []:
        rows.append(eval_real(path, methods, k_max=args.kmax, t=args.t,
                              cfg=_solver_config(args), apply_lcc=args.lcc))
    if not rows:
        print("eval-real: nothing to evaluate (use --dataset or --input)",
              file=sys.stderr)
        return USAGE_EXIT
    if args.format == "json":
        print(json.dumps(rows, indent=2))
    else:
        header = ["dataset", "n", "m"] + [m for m in METHODS
                                          if any(m in r["estimates"] for r in rows)]
        print("  ".join(f"{h:>8}" for h in header) + "     truth")
        for r in rows:
            cells = [r["dataset"][:12], str(r["n"]), str(r["m"])]
            cells += [str(r["estimates"].get(m, "-")) for m in header[3:]]
            truth = r["truth"] if r["truth"] is not None else "?"
            print("  ".join(f"{c:>8}" for c in cells) + f"     {truth}")
            for w in r["warnings"]:
                print(f"  warning: {w}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kspec",
                     description="Spectral estimation of the number of "
                                 "communities in an undirected network.")
    parser.add_argument("--version", action="version", version=f"kspec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p_est = sub.add_parser("estimate", help="estimate K for an edge-list file")
    p_est.add_argument("--input", required=True, help="edge-list file path")
    p_est.add_argument("--method", default="all", choices=_METHOD_CHOICES,
                       help="method to run (default: all)")
    p_est.add_argument("--t", type=float, default=DEFAULT_T,
                       help="ratio-test tuning parameter (default: t=5)")
    p_est.add_argument("--kmax", type=int, default=DEFAULT_K_MAX,
                       help="largest candidate K (default: kmax=15)")
    p_est.add_argument("--format", default="text", choices=("text", "json"))
    p_est.add_argument("--lcc", action="store_true",
                       help="restrict to the largest connected component")
    p_est.add_argument("--force-iterative", action="store_true",
                       help="use the iterative eigensolvers regardless of size")
    p_est.set_defaults(func=_cmd_estimate)

    p_gen = sub.add_parser("generate", help="sample a block-model graph")
    p_gen.add_argument("--spec", help="JSON file with model fields "
                                      "(n, K, pi, w, beta, lambda_n, gamma)")
    p_gen.add_argument("--n", type=int, default=1200, help="node count (default: 1200)")
    p_gen.add_argument("--communities", type=int, default=2, metavar="K",
                       help="number of planted communities (default: 2)")
    p_gen.add_argument("--beta", type=float, default=0.2,
                       help="between-community weight (default: 0.2)")
    p_gen.add_argument("--lambda-n", type=float, default=15.0, dest="lambda_n",
                       help="target average degree (default: 15)")
    p_gen.add_argument("--gamma", type=float, default=0.0,
                       help="fraction of low-multiplier nodes (default: 0)")
    p_gen.add_argument("--w", help="comma-separated within-community weights")
    p_gen.add_argument("--size-ratio", type=float, default=None,
                       help="shrink/grow first/last community sizes")
    p_gen.add_argument("--seed", type=int, default=0, help="sampling seed (default: 0)")
    p_gen.add_argument("--out", required=True, help="output edge-list path")
    p_gen.set_defaults(func=_cmd_generate)

    p_bench = sub.add_parser("bench", help="run a replicated accuracy plan")
    p_bench.add_argument("--plan", required=True, help="JSON plan file")
    p_bench.add_argument("--workers", type=int, default=1,
                         help="parallel workers (default: 1); results are "
                              "identical for any worker count")
    p_bench.add_argument("--out", required=True, help="output table path")
    p_bench.add_argument("--format", default="csv", choices=("csv", "json"))
    p_bench.add_argument("--no-timestamp", action="store_true",
                         help="omit the timestamp header for byte-stable output")
    p_bench.add_argument("--force-iterative", action="store_true",
                         help=argparse.SUPPRESS)
    p_bench.set_defaults(func=_cmd_bench)

    p_real = sub.add_parser("eval-real", help="evaluate bundled or local datasets")
    p_real.add_argument("--dataset", action="append", choices=dataset_names(),
                        help="bundled dataset name (repeatable)")
    p_real.add_argument("--input", action="append",
                        help="edge-list file path (repeatable)")
    p_real.add_argument("--methods", default="all",
                        help="comma-separated method list (default: all)")
    p_real.add_argument("--t", type=float, default=DEFAULT_T,
                        help="ratio-test tuning parameter (default: t=5)")
    p_real.add_argument("--kmax", type=int, default=DEFAULT_K_MAX,
                        help="largest candidate K (default: kmax=15)")
    p_real.add_argument("--format", default="text", choices=("text", "json"))
    p_real.add_argument("--lcc", action="store_true",
                        help="largest connected component for --input files")
    p_real.add_argument("--force-iterative", action="store_true",
                        help=argparse.SUPPRESS)
    p_real.set_defaults(func=_cmd_eval_real)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PlanValidationError as exc:
        print(f"kspec: plan error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except (DatasetMissingError, FileNotFoundError) as exc:
        print(f"kspec: {exc}", file=sys.stderr)
        return RUNTIME_EXIT
    except (ValueError, RuntimeError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"kspec: error: {exc}", file=sys.stderr)
        return RUNTIME_EXIT


if __name__ == "__main__":
    sys.exit(main())
