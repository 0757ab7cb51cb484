"""
Full analysis report for one network.

Composes validation, the consensus distribution (direct solve and the
perturbation identity), every applicable excess-influence route, bounds,
essential edges, optional clustering traces and an optional simulation
into one JSON-ready dictionary. Every bound carries its certified flag;
the provenance block records seed, modes and tolerances.

Used by: cli (analyze), scripts/run_experiments.py
Related: schemas/analysis_report.schema.json
"""

import csv
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, TextIO, Tuple

import numpy as np

from src.config import SETTINGS
from src.cuts_clustering import WeightedGraph, cluster_bound
from src.gossip_simulator import SimulationConfig, estimate_consensus_weights
from src.influence_analysis import (
    OverlappingForcefulEdges,
    bounds_report,
    essential_edges,
    excess_influence_disjoint,
    excess_influence_exact,
    excess_influence_mfpt,
    influence_context,
)
from src.markov_analysis import kemeny_constant, perturbed_stationary
from src.models import SocialNetwork
from src.network_model import NetworkValidationError, forceful_links, meeting_digraph, total_influence, validate

SCHEMA_VERSION = "1.0"


@dataclass
class ReportOptions:
    """What to include beyond the always-on sections."""

    x0: Optional[Sequence[float]] = None
    cut_mode: str = "auto"
    exact_cut_limit: Optional[int] = None
    cluster_pairs: List[Tuple[int, int]] = field(default_factory=list)
    simulate_trials: int = 0
    seed: int = 0
    tolerance: float = SETTINGS.tolerance
    bound_clusters: bool = True


def _step(verbose: bool, message: str) -> None:
    if verbose:
        print(message, file=sys.stderr)


def build_analysis_report(network: SocialNetwork, options: Optional[ReportOptions] = None,
                          verbose: bool = False) -> Dict:
    """
    Run every analysis on a network and collect the results.

    Args:
        network: Network to analyze; must pass validation
        options: Optional sections and modes
        verbose: Print step banners to stderr

    Returns:
        Report dictionary (schema version 1.0)

    Raises:
        NetworkValidationError: If the network breaks a modelling assumption
    """
    options = options or ReportOptions()
    limit = options.exact_cut_limit
    total_steps = 5 + bool(options.cluster_pairs) + bool(options.simulate_trials)

    _step(verbose, f"\n{'=' * 60}\nANALYZING: n={network.n}, epsilon={network.epsilon}\n{'=' * 60}\n")

    # -------------------------------------------------------------------------
    # STEP 1: Validate
    # -------------------------------------------------------------------------
    _step(verbose, f"[1/{total_steps}] Validating network...")
    validation = validate(network)
    if not validation.ok:
        raise NetworkValidationError(validation)
    digraph = meeting_digraph(network)
    _step(verbose, f"✓ Valid (diameter {digraph.diameter})")

    # -------------------------------------------------------------------------
    # STEP 2: Consensus distribution, two routes
    # -------------------------------------------------------------------------
    _step(verbose, f"[2/{total_steps}] Solving for the consensus distribution...")
    ctx = influence_context(network)
    T, D = ctx.decomposition.T, ctx.decomposition.D
    perturbed = perturbed_stationary(T, D, ctx.chain.stationary.pi, ctx.chain.fundamental.Y).pi
    consensus = {
        "pi_bar": ctx.pi_bar.tolist(),
        "pi_bar_perturbation": perturbed.tolist(),
        "discrepancy": float(np.max(np.abs(ctx.pi_bar - perturbed))),
        "lambda2": ctx.chain.spectral.lambda2,
        "kemeny": kemeny_constant(ctx.chain.fundamental.Y),
    }
    _step(verbose, f"✓ max |direct - perturbation| = {consensus['discrepancy']:.2e}")

    # -------------------------------------------------------------------------
    # STEP 3: Excess influence routes
    # -------------------------------------------------------------------------
    _step(verbose, f"[3/{total_steps}] Computing excess influence...")
    routes = {
        "exact": excess_influence_exact(network, options.x0, ctx),
        "mfpt": excess_influence_mfpt(network, options.x0, ctx),
    }
    skipped = {}
    try:
        routes["disjoint"] = excess_influence_disjoint(network, options.x0, ctx)
    except OverlappingForcefulEdges as e:
        skipped["disjoint"] = str(e)
    essential = essential_edges(network, ctx)
    if essential.closed_form is not None:
        routes["essential"] = essential.closed_form
    else:
        skipped["essential"] = "needs exactly one forceful ordered pair on an essential edge"
    exact = routes["exact"].vector
    route_discrepancy = max(float(np.max(np.abs(r.vector - exact))) for r in routes.values())
    _step(verbose, f"✓ {len(routes)} route(s), max discrepancy {route_discrepancy:.2e}")

    # -------------------------------------------------------------------------
    # STEP 4: Bounds
    # -------------------------------------------------------------------------
    _step(verbose, f"[4/{total_steps}] Evaluating bounds...")
    bounds = bounds_report(network, options.x0, options.cut_mode, limit, options.bound_clusters, ctx)
    _step(verbose, f"{'✓' if bounds.all_hold else '❌'} {len(bounds.bounds)} bound(s), cut mode {bounds.cut.mode}")

    # -------------------------------------------------------------------------
    # STEP 5: Essential edges
    # -------------------------------------------------------------------------
    _step(verbose, f"[5/{total_steps}] Essential edges: {len(essential.bridges)} bridge(s)")

    report = {
        "schema_version": SCHEMA_VERSION,
        "network": {
            "n": network.n,
            "epsilon": network.epsilon,
            "links": len(digraph.links),
            "diameter": digraph.diameter,
            "forceful": [link.to_dict() for link in forceful_links(network)],
            "total_influence": total_influence(network),
        },
        "validation": validation.to_dict(),
        "consensus": consensus,
        "excess_influence": {name: r.to_dict() for name, r in routes.items()},
        "skipped_routes": skipped,
        "route_discrepancy": route_discrepancy,
        "bounds": bounds.to_dict(),
        "essential_edges": essential.to_dict(),
        "clusters": [],
        "simulation": None,
    }

    step = 5
    if options.cluster_pairs:
        step += 1
        _step(verbose, f"[{step}/{total_steps}] Clustering {len(options.cluster_pairs)} pair(s)...")
        graph = WeightedGraph.from_network(network)
        for a, b in options.cluster_pairs:
            trace = cluster_bound(graph, a, b, options.cut_mode, limit, verbose=verbose)
            entry = trace.to_dict()
            entry["actual_commute"] = ctx.chain.passage.commute(a, b)
            report["clusters"].append(entry)

    if options.simulate_trials:
        step += 1
        _step(verbose, f"[{step}/{total_steps}] Simulating {options.simulate_trials} trial(s) per agent...")
        config = SimulationConfig(seed=options.seed, tolerance=options.tolerance, trials=options.simulate_trials)
        estimate = estimate_consensus_weights(network, config, verbose=verbose)
        simulation = estimate.to_dict()
        simulation["max_abs_diff"] = float(np.max(np.abs(estimate.pi_hat - ctx.pi_bar)))
        simulation["max_z"] = float(np.max(np.abs(estimate.pi_hat - ctx.pi_bar) / np.maximum(estimate.se, 1e-300)))
        report["simulation"] = simulation

    report["provenance"] = {
        "seed": options.seed,
        "cut_mode": options.cut_mode,
        "exact_cut_limit": SETTINGS.exact_cut_limit if limit is None else limit,
        "tolerance": options.tolerance,
        "simulate_trials": options.simulate_trials,
        "certified": all(b["certified"] for b in report["bounds"]["bounds"])
        and all(c["certified"] for c in report["clusters"]),
    }
    _step(verbose, "\n✓ Report complete")
    return report


CSV_HEADER = ["agent", "pi_bar", "excess_exact", "excess_mfpt", "excess_disjoint", "pi_hat", "se"]


def report_to_csv_rows(report: Dict) -> List[List]:
    """One row per agent; columns missing from the report are left empty."""
    excess = report["excess_influence"]
    simulation = report.get("simulation") or {}
    rows = [list(CSV_HEADER)]
    for k, pi in enumerate(report["consensus"]["pi_bar"]):
        rows.append([
            k,
            pi,
            excess["exact"]["vector"][k],
            excess["mfpt"]["vector"][k],
            excess["disjoint"]["vector"][k] if "disjoint" in excess else "",
            simulation["pi_hat"][k] if simulation else "",
            simulation["se"][k] if simulation else "",
        ])
    return rows


def write_csv(rows: List[List], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerows(rows)
