"""
Reproducible demonstrations on the example families.

- calibrate_example2: find the self-weight and link directions that
  reproduce the target consensus distributions of the two-triangle
  network
- barbell_scaling: growth of cross-bell vs within-bell commute times
- expander_trend: deviation from uniform weights for one locally forceful
  agent on random regular graphs of growing size
- location_demo: the same forceful strength inside a bell or over the
  bridge gives the same conductance bound but different deviations

Asymptotic statements are only shown as finite trends.

Used by: scripts/run_experiments.py, tests
"""

import sys
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.cuts_clustering import WeightedGraph, min_normalized_cut
from src.generators import barbell, barbell_graph, example2, regular, regular_graph
from src.influence_analysis import bound_conductance, excess_influence_exact, influence_context
from src.interaction_kernel import mean_interaction_matrix
from src.markov_analysis import commute_time_electrical, stationary

# Target consensus distributions of the two-triangle example
TARGET_CONSENSUS = {
    "a": np.array([1.25, 1.25, 1.25, 0.75, 0.75, 0.75]) / 6.0,
    "b": np.array([0.82, 1.18, 1.0, 1.0, 1.0, 1.0]) / 6.0,
}
CALIBRATION_EPSILONS = (0.1, 0.2, 0.3, 0.4, 0.5)


def _log(verbose: bool, message: str) -> None:
    if verbose:
        print(message, file=sys.stderr)


@dataclass
class CalibrationResult:
    """Best (epsilon, link directions) for the two-triangle example and its error per case."""

    epsilon: float
    reverse: Dict[str, bool]
    errors: Dict[str, float]
    tolerance: float
    table: List[Dict] = field(default_factory=list)

    @property
    def max_error(self) -> float:
        return max(self.errors.values())

    @property
    def matched(self) -> bool:
        return self.max_error <= self.tolerance

    def to_dict(self) -> Dict:
        data = asdict(self)
        data["max_error"] = self.max_error
        data["matched"] = self.matched
        return data


def calibrate_example2(epsilons: Sequence[float] = CALIBRATION_EPSILONS, tolerance: float = 0.005,
                       verbose: bool = False) -> CalibrationResult:
    """
    Search self-weights and both directions of each case's forceful link.

    For each epsilon the better direction is kept per case; the epsilon with
    the smallest worst-case componentwise error wins.
    """
    best: Optional[Tuple[float, float, Dict[str, bool], Dict[str, float]]] = None
    table = []
    for k, eps in enumerate(epsilons):
        directions, errors = {}, {}
        for case, target in TARGET_CONSENSUS.items():
            options = []
            for reverse in (False, True):
                pi = stationary(mean_interaction_matrix(example2(case, epsilon=eps, reverse=reverse))).pi
                error = float(np.max(np.abs(pi - target)))
                table.append({"epsilon": eps, "case": case, "reverse": reverse, "error": error})
                options.append((error, reverse))
            error, reverse = min(options)
            directions[case], errors[case] = reverse, error
        worst = max(errors.values())
        _log(verbose, f"[{k + 1}/{len(epsilons)}] epsilon={eps}: worst error {worst:.4f}")
        if best is None or worst < best[0]:
            best = (worst, eps, directions, errors)

    _, eps, directions, errors = best
    result = CalibrationResult(epsilon=eps, reverse=directions, errors=errors, tolerance=tolerance, table=table)
    _log(verbose, f"{'✓' if result.matched else '❌'} epsilon={eps} max error {result.max_error:.4f}")
    return result


def _slope(sizes: Sequence[int], values: Sequence[float]) -> float:
    return float(np.polyfit(np.log(sizes), np.log(values), 1)[0])


@dataclass
class ScalingResult:
    sizes: List[int]
    cross: List[float]
    within: List[float]
    cross_slope: float
    within_slope: float

    def to_dict(self) -> Dict:
        return asdict(self)


def barbell_scaling(sizes: Sequence[int] = (12, 24, 48), nu: float = 1.0 / 3.0) -> ScalingResult:
    """
    Commute times of the simple random walk on barbell graphs.

    Each size n gets two bells of round(nu n) nodes joined by a path of the
    remaining nodes. The cross pair is (0, n-1), the within pair (0, 1).
    Slopes are least-squares fits in log-log scale.
    """
    cross, within = [], []
    for n in sizes:
        bell = int(round(nu * n))
        if bell < 3 or n - 2 * bell < 0:
            raise ValueError(f"barbell of size {n} with nu={nu} needs bells of at least 3 nodes")
        W = WeightedGraph.from_graph(barbell_graph(bell, n - 2 * bell)).weights
        cross.append(commute_time_electrical(W, 0, n - 1))
        within.append(commute_time_electrical(W, 0, 1))
    return ScalingResult(
        sizes=list(sizes),
        cross=cross,
        within=within,
        cross_slope=_slope(sizes, cross),
        within_slope=_slope(sizes, within),
    )


@dataclass
class TrendResult:
    sizes: List[int]
    l2: List[float]
    sup: List[float]
    total_influence: float

    @property
    def decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.l2, self.l2[1:]))

    def to_dict(self) -> Dict:
        data = asdict(self)
        data["decreasing"] = self.decreasing
        return data


def expander_trend(sizes: Sequence[int] = (20, 40, 80), degree: int = 6, seed: int = 0, alpha: float = 0.5,
                   verbose: bool = False) -> TrendResult:
    """
    Agent 0 of a random degree-regular graph influences every neighbour with alpha.

    With p = 1/degree the total influence degree * alpha / degree = alpha is
    the same for every size.
    """
    l2, sup = [], []
    for k, n in enumerate(sizes):
        graph = regular_graph(n, degree, seed)
        forceful = [(int(v), 0, alpha) for v in sorted(graph.neighbors(0))]
        network = regular(n, degree, seed, forceful=forceful)
        excess = excess_influence_exact(network)
        l2.append(excess.l2_norm)
        sup.append(excess.sup_norm)
        _log(verbose, f"[{k + 1}/{len(sizes)}] n={n}: ||excess||_2 = {excess.l2_norm:.3e}")
    return TrendResult(sizes=list(sizes), l2=l2, sup=sup, total_influence=alpha)


@dataclass
class LocationResult:
    """Conductance bound and actual sup deviation for a forceful link inside a bell and over the bridge."""

    bound_inside: float
    bound_bridge: float
    actual_inside: float
    actual_bridge: float

    def to_dict(self) -> Dict:
        return asdict(self)


def location_demo(n1: int = 3, alpha: float = 0.5) -> LocationResult:
    """
    Barbell(n1, 0): bells {0..n1-1} and {n1..2n1-1}, bridge {n1-1, n1}.

    Inside: agent 0 influences the attachment node n1-1.
    Bridge: agent n1 influences n1-1. Both links have p = 1/n1, so total
    influence and T, hence the conductance bound, coincide.
    """
    attach = n1 - 1
    inside = barbell(n1, 0, forceful=[(attach, 0, alpha)])
    bridge = barbell(n1, 0, forceful=[(attach, n1, alpha)])
    results = {}
    for name, network in (("inside", inside), ("bridge", bridge)):
        ctx = influence_context(network)
        rho = min_normalized_cut(WeightedGraph.from_network(network), "exact")
        results[name] = bound_conductance(network, rho, context=ctx)
    return LocationResult(
        bound_inside=results["inside"].value,
        bound_bridge=results["bridge"].value,
        actual_inside=results["inside"].actual,
        actual_bridge=results["bridge"].actual,
    )
