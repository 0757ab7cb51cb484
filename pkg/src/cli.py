"""
Command-line front end.

Subcommands:
- validate PATH            check modelling assumptions (exit 1 on violations)
- generate KIND            write a generated network
- analyze PATH             full analysis report
- bounds PATH              bounds on the deviation from uniform weights
- cluster PATH A B         clustering trace and bound for one pair
- simulate PATH            Monte Carlo consensus weights or one spread trace

Exit codes: 0 ok, 1 domain violation or bad parameters, 2 unreadable or
malformed input. Errors are printed as {"error": {"type", "message"}}.
Output is JSON (sorted keys) or CSV on stdout, or in --out.

Used by: scripts/misinfo.py
"""

import argparse
import io
import json
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from src.analysis_report import ReportOptions, build_analysis_report, report_to_csv_rows, write_csv
from src.config import SETTINGS
from src.cuts_clustering import WeightedGraph, cluster_bound
from src.generators import GENERATORS, generate
from src.gossip_simulator import (
    SimulationConfig,
    estimate_consensus_weights,
    run_to_consensus,
    sample_consensus,
    trial_rng,
    RUNS_STREAM,
)
from src.influence_analysis import bounds_report
from src.models import AnalysisError
from src.network_model import ParseError, load, save, validate

EXIT_OK, EXIT_DOMAIN, EXIT_PARSE = 0, 1, 2


def _cut_mode(args) -> str:
    return "exact" if args.exact_cuts else args.cut_mode


def _dump(payload: Dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _csv(rows: List[List]) -> str:
    buffer = io.StringIO()
    write_csv(rows, buffer)
    return buffer.getvalue()


def _emit(args, payload: Dict, rows: Optional[List[List]] = None) -> None:
    text = _csv(rows) if args.format == "csv" and rows is not None else _dump(payload)
    if args.out:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    else:
        sys.stdout.write(text)


def cmd_validate(args) -> int:
    network = load(args.path)
    report = validate(network)
    rows = [["code", "message", "indices"]] + [
        [v.code, v.message, " ".join(str(i) for i in v.indices)] for v in report.violations
    ]
    _emit(args, report.to_dict(), rows)
    return EXIT_OK if report.ok else EXIT_DOMAIN


FORCEFUL_KINDS = ("complete", "ring", "path", "barbell", "bridged", "regular")


def _generator_params(args) -> Dict:
    kind = args.kind
    params = {
        "complete": {"n": args.n},
        "ring": {"n": args.n},
        "path": {"n": args.n},
        "barbell": {"n1": args.n1, "n2": args.n2},
        "bridged": {"sizes": args.sizes},
        "example2": {"case": args.case, "reverse": args.reverse},
        "hub-cycle": {"k": args.clusters},
        "regular": {"n": args.n, "degree": args.degree, "seed": args.seed},
        "random": {"n": args.n, "seed": args.seed},
        "random-bridged": {"n_left": args.n1, "n_right": args.n2, "seed": args.seed},
    }[kind]
    if args.epsilon is not None:
        params["epsilon"] = args.epsilon
    if args.forceful:
        if kind not in FORCEFUL_KINDS:
            raise ValueError(f"--forceful is not supported for {kind}; use one of {list(FORCEFUL_KINDS)}")
        params["forceful"] = [(int(i), int(j), float(a)) for i, j, a in args.forceful]
    return params


def cmd_generate(args) -> int:
    network = generate(args.kind, **_generator_params(args))
    if args.out:
        save(network, args.out)
    else:
        sys.stdout.write(_dump(network.to_dict()))
    return EXIT_OK


def cmd_analyze(args) -> int:
    network = load(args.path, strict=True)
    options = ReportOptions(
        x0=args.x0,
        cut_mode=_cut_mode(args),
        cluster_pairs=[tuple(pair) for pair in (args.cluster or [])],
        simulate_trials=args.simulate or 0,
        seed=args.seed,
        tolerance=args.tolerance,
        bound_clusters=not args.no_cluster_bounds,
    )
    report = build_analysis_report(network, options, verbose=args.verbose)
    _emit(args, report, report_to_csv_rows(report))
    return EXIT_OK


def cmd_bounds(args) -> int:
    network = load(args.path, strict=True)
    report = bounds_report(network, args.x0, _cut_mode(args), cluster=not args.no_cluster_bounds)
    rows = [["name", "norm", "value", "actual", "certified", "holds"]] + [
        [b.name, b.norm, "" if b.value is None else b.value, b.actual, b.certified, b.holds] for b in report.bounds
    ]
    _emit(args, report.to_dict(), rows)
    return EXIT_OK


def cmd_cluster(args) -> int:
    network = load(args.path, strict=True)
    trace = cluster_bound(WeightedGraph.from_network(network), args.a, args.b, _cut_mode(args), verbose=args.verbose)
    rows = [["k", "size", "rho", "mode", "separates", "disjoint_with_next", "increase_holds"]] + [
        [it.k, len(it.nodes), it.rho, it.mode, it.separates, it.disjoint_with_next, it.increase_holds]
        for it in trace.iterations
    ]
    _emit(args, trace.to_dict(), rows)
    return EXIT_OK


def cmd_simulate(args) -> int:
    network = load(args.path, strict=True)
    config = SimulationConfig(seed=args.seed, tolerance=args.tolerance, trials=args.trials,
                              max_events=args.max_events, workers=args.workers)
    if args.x0 is None:
        estimate = estimate_consensus_weights(network, config, verbose=args.verbose)
        rows = [["agent", "pi_hat", "se"]] + [
            [k, p, s] for k, (p, s) in enumerate(zip(estimate.pi_hat.tolist(), estimate.se.tolist()))
        ]
        _emit(args, estimate.to_dict(), rows)
        return EXIT_OK

    run = run_to_consensus(network, args.x0, config, trial_rng(config.seed, RUNS_STREAM, 0))
    values = sample_consensus(network, args.x0, config)
    payload = {
        "run": run.to_dict(),
        "consensus_mean": float(values.mean()),
        "consensus_se": float(values.std(ddof=1) / len(values) ** 0.5) if len(values) > 1 else None,
        "trials": len(values),
    }
    step = config.decimation
    rows = [["event", "spread"]] + [[k * step, s] for k, s in enumerate(run.trace)]
    _emit(args, payload, rows)
    return EXIT_OK


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    group = common.add_argument_group("Global Options")
    group.add_argument("--seed", type=int, default=0, help="Master random seed (default: 0)")
    group.add_argument("--tolerance", type=float, default=SETTINGS.tolerance,
                       help=f"Spread threshold for consensus (default: {SETTINGS.tolerance})")
    group.add_argument("--exact-cuts", action="store_true", help="Require exhaustive cut enumeration")
    group.add_argument("--cut-mode", choices=["auto", "exact", "heuristic"], default="auto",
                       help="Cut search mode (default: auto)")
    group.add_argument("--format", choices=["json", "csv"], default="json", help="Output format (default: json)")
    group.add_argument("--out", metavar="PATH", help="Write output to PATH instead of stdout")
    group.add_argument("--verbose", action="store_true", help="Print progress to stderr")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="misinfo",
        description="Misinformation analysis for gossip networks with forceful agents.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Check a network file
  python scripts/misinfo.py validate network.json

  # Generate the two-triangle example with the link over the bridge
  python scripts/misinfo.py generate example2 --case a --out tmp/example2a.json

  # Full report with simulation and a clustering trace
  python scripts/misinfo.py analyze tmp/example2a.json --simulate 10000 --cluster 0 1

  # Bounds table as CSV
  python scripts/misinfo.py bounds tmp/example2a.json --format csv

For more information, see project_docs/
        """,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="Check modelling assumptions")
    p.add_argument("path")
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("generate", parents=[common], help="Write a generated network")
    p.add_argument("kind", choices=sorted(GENERATORS))
    params = p.add_argument_group("Generator Parameters")
    params.add_argument("--n", type=int, default=4, help="Number of agents (default: 4)")
    params.add_argument("--n1", type=int, default=3, help="Bell / left cluster size (default: 3)")
    params.add_argument("--n2", type=int, default=0, help="Path length / right cluster size (default: 0)")
    params.add_argument("--sizes", type=int, nargs="+", default=[3, 3], help="Clique sizes for bridged")
    params.add_argument("--case", choices=["a", "b"], default="a", help="example2 case (default: a)")
    params.add_argument("--reverse", action="store_true", help="example2: swap the forceful endpoint")
    params.add_argument("--degree", type=int, default=6, help="regular: degree (default: 6)")
    params.add_argument("--clusters", type=int, default=4, help="hub-cycle: number of clusters (default: 4)")
    params.add_argument("--epsilon", type=float, default=None, help="Self-weight in (0, 1/2]")
    params.add_argument("--forceful", nargs=3, action="append", metavar=("I", "J", "ALPHA"),
                        help="Agent J influences agent I with probability ALPHA (repeatable)")
    p.set_defaults(handler=cmd_generate)

    p = sub.add_parser("analyze", parents=[common], help="Full analysis report")
    p.add_argument("path")
    p.add_argument("--x0", type=float, nargs="+", help="Initial beliefs for the consensus gap")
    p.add_argument("--simulate", type=int, metavar="TRIALS", help="Monte Carlo trials per agent")
    p.add_argument("--cluster", type=int, nargs=2, action="append", metavar=("A", "B"),
                   help="Clustering trace for pair A B (repeatable)")
    p.add_argument("--no-cluster-bounds", action="store_true", help="Skip clustering in the local cut bound")
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("bounds", parents=[common], help="Bounds on the deviation from uniform weights")
    p.add_argument("path")
    p.add_argument("--x0", type=float, nargs="+", help="Initial beliefs for the gap bound")
    p.add_argument("--no-cluster-bounds", action="store_true", help="Skip clustering in the local cut bound")
    p.set_defaults(handler=cmd_bounds)

    p = sub.add_parser("cluster", parents=[common], help="Clustering trace for one pair")
    p.add_argument("path")
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    p.set_defaults(handler=cmd_cluster)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo simulation")
    p.add_argument("path")
    p.add_argument("--x0", type=float, nargs="+", help="Simulate runs from x0 instead of estimating weights")
    p.add_argument("--trials", type=int, default=SETTINGS.trials, help=f"Trials (default: {SETTINGS.trials})")
    p.add_argument("--max-events", type=int, default=SETTINGS.max_events, help="Event cap per run")
    p.add_argument("--workers", type=int, default=SETTINGS.workers, help="Thread pool size")
    p.set_defaults(handler=cmd_simulate)
    return parser


def _error(exc: Exception) -> str:
    return _dump({"error": {"type": type(exc).__name__, "message": str(exc)}})


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ParseError, OSError) as e:
        sys.stdout.write(_error(e))
        return EXIT_PARSE
    except (AnalysisError, ValueError) as e:
        sys.stdout.write(_error(e))
        return EXIT_DOMAIN
