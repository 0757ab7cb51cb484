"""
Excess influence of forceful agents and bounds on the spread of misinformation.

The excess influence pi_bar - e/n measures how far each agent's weight in
the expected consensus deviates from the information-aggregating benchmark.
It is computed three ways that must agree:
- exact: direct stationary solve of the mean interaction matrix
- mfpt: sum over forceful ordered pairs of p alpha ((1 - 2 eps) pi_bar_i + pi_bar_j)
  (m_ik - m_jk) / (2 n^2), using passage times of the social matrix T
- disjoint: rank-one update per forceful edge, valid when no two forceful
  edges share an agent

A forceful link over a bridge of the T-graph gives a closed form that is
constant on each side of the bridge. The bounds relate the deviation to
delta (positivity of W), to the spectral gap of T and to cut values.

Used by: analysis_report, experiments, cli
Related:
- src/markov_analysis.py: stationary, fundamental matrix, passage times
- src/cuts_clustering.py: cuts feeding the conductance and local bounds
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy import linalg

from src.cuts_clustering import (
    CommuteBound,
    CutResult,
    WeightedGraph,
    cluster_bound,
    commute_bound_normalized,
    commute_bounds_relative,
    min_normalized_cut,
    min_normalized_relative_cut,
)
from src.interaction_kernel import DegenerateDelta, InteractionDecomposition, decompose, eta_constants
from src.markov_analysis import ChainAnalysis, analyze_chain, stationary
from src.models import AnalysisError, SocialNetwork, as_vector
from src.network_model import total_influence

VALIDITY_SLACK = 1e-12


class OverlappingForcefulEdges(AnalysisError):
    """Raised when two forceful edges share an agent."""
    pass


class NotEssential(AnalysisError):
    """Raised when an edge is not a bridge of the T-graph."""
    pass


class NotApplicable(AnalysisError):
    """Raised when the single forceful bridge closed form does not apply."""
    pass


@dataclass(frozen=True, eq=False)
class InfluenceContext:
    """Shared intermediate results for one network: W = T + D, the T chain and pi_bar."""

    network: SocialNetwork
    decomposition: InteractionDecomposition
    chain: ChainAnalysis
    pi_bar: np.ndarray


def influence_context(network: SocialNetwork) -> InfluenceContext:
    decomposition = decompose(network)
    return InfluenceContext(
        network=network,
        decomposition=decomposition,
        chain=analyze_chain(decomposition.T),
        pi_bar=stationary(decomposition.W).pi,
    )


@dataclass(frozen=True, eq=False)
class ExcessInfluence:
    """
    Excess influence pi_bar - e/n and, for a given x(0), the expected
    consensus gap sum_i (pi_bar_i - 1/n) x_i(0).
    """

    vector: np.ndarray
    route: str
    gap: Optional[float] = None
    details: Dict = field(default_factory=dict)

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.vector)))

    @property
    def l2_norm(self) -> float:
        return float(np.linalg.norm(self.vector))

    def to_dict(self) -> Dict:
        return {
            "route": self.route,
            "vector": self.vector.tolist(),
            "sup_norm": self.sup_norm,
            "l2_norm": self.l2_norm,
            "gap": self.gap,
            "details": self.details,
        }


def _context(network: SocialNetwork, context: Optional[InfluenceContext]) -> InfluenceContext:
    return context if context is not None else influence_context(network)


def _excess(vector: np.ndarray, route: str, x0, n: int, details: Optional[Dict] = None) -> ExcessInfluence:
    x = as_vector(x0, n)
    gap = float(vector @ x) if x is not None else None
    return ExcessInfluence(vector=vector, route=route, gap=gap, details=details or {})


def excess_influence_exact(network: SocialNetwork, x0: Optional[Sequence[float]] = None,
                           context: Optional[InfluenceContext] = None) -> ExcessInfluence:
    """pi_bar - e/n from the direct stationary solve of W."""
    ctx = _context(network, context)
    return _excess(ctx.pi_bar - 1.0 / network.n, "exact", x0, network.n)


def expected_consensus_gap(network: SocialNetwork, x0: Sequence[float],
                           context: Optional[InfluenceContext] = None) -> float:
    """E[x_bar] - theta = sum_i (pi_bar_i - 1/n) x_i(0), theta the average initial belief."""
    return excess_influence_exact(network, x0, context).gap


def excess_influence_mfpt(network: SocialNetwork, x0: Optional[Sequence[float]] = None,
                          context: Optional[InfluenceContext] = None) -> ExcessInfluence:
    """
    Passage-time identity for the excess influence.

    For every ordered pair with alpha_ij > 0 (agent j influences agent i):
        excess_k += p_ij alpha_ij ((1 - 2 eps) pi_bar_i + pi_bar_j) (m_ik - m_jk) / (2 n^2)

    pi_bar is endogenous, so this is an identity check rather than an
    independent estimator.
    """
    ctx = _context(network, context)
    n, eps = network.n, network.epsilon
    M = ctx.chain.passage.M
    pi_bar = ctx.pi_bar
    vector = np.zeros(n)
    for i, j in network.edges():
        alpha = network.alpha[i, j]
        if alpha <= 0:
            continue
        weight = network.meeting[i, j] * alpha * ((1.0 - 2.0 * eps) * pi_bar[i] + pi_bar[j])
        vector += weight * (M[i] - M[j]) / (2.0 * n * n)
    return _excess(vector, "mfpt", x0, n)


@dataclass(frozen=True)
class ForcefulEdge:
    """
    Undirected edge {i, j} (i < j) carrying influence in at least one direction.

    a = p_ij alpha_ij (j influences i), b = p_ji alpha_ji (i influences j).
    """

    i: int
    j: int
    a: float
    b: float


def forceful_edges(network: SocialNetwork) -> List[ForcefulEdge]:
    strength = network.meeting * network.alpha * network.support
    edges = []
    rows, cols = np.nonzero(np.triu(strength + strength.T, 1) > 0)
    for i, j in zip(rows, cols):
        edges.append(ForcefulEdge(int(i), int(j), float(strength[i, j]), float(strength[j, i])))
    return edges


def _require_disjoint(edges: List[ForcefulEdge]) -> None:
    seen: Dict[int, Tuple[int, int]] = {}
    for edge in edges:
        for agent in (edge.i, edge.j):
            if agent in seen:
                other = seen[agent]
                raise OverlappingForcefulEdges(
                    f"forceful edges {other} and {(edge.i, edge.j)} share agent {agent}"
                )
            seen[agent] = (edge.i, edge.j)


def _rank_one_terms(edge: ForcefulEdge, n: int, eps: float, Y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    D restricted to {i, j} equals u (e_j - e_i)'; v = Y'(e_j - e_i), so that
    v_k = (m_ik - m_jk) / n for the doubly stochastic T.
    """
    u = np.zeros(n)
    u[edge.i] = edge.a * (0.5 - eps) - edge.b / 2.0
    u[edge.j] = edge.a / 2.0 - edge.b * (0.5 - eps)
    u /= n
    v = Y[edge.j] - Y[edge.i]
    return u, v


def excess_influence_disjoint(network: SocialNetwork, x0: Optional[Sequence[float]] = None,
                              context: Optional[InfluenceContext] = None, decoupled: bool = False) -> ExcessInfluence:
    """
    Excess influence from per-edge rank-one updates of the social matrix.

    Each forceful edge e = {i, j} contributes w_e v_e with
        s_e = (1 - eps)(a_e - b_e) / n^2
        zeta_e = [a/2 - b(1/2 - eps)] m_ij - [a(1/2 - eps) - b/2] m_ji
    and, for a single edge, w_e = s_e / (1 - zeta_e / n^2). Several edges
    couple through K[e, f] = v_e' u_f and w solves (I - K)' w = s; the
    diagonal of K is zeta_e / n^2.

    Args:
        network: Valid network whose forceful edges share no agent
        x0: Optional initial beliefs for the consensus gap
        context: Precomputed intermediates
        decoupled: Ignore cross-edge coupling (exact only for one forceful edge)

    Raises:
        OverlappingForcefulEdges: If two forceful edges share an agent
    """
    ctx = _context(network, context)
    n, eps = network.n, network.epsilon
    edges = forceful_edges(network)
    _require_disjoint(edges)
    if not edges:
        return _excess(np.zeros(n), "disjoint", x0, n, {"edges": []})

    Y = ctx.chain.fundamental.Y
    terms = [_rank_one_terms(edge, n, eps, Y) for edge in edges]
    U = np.array([u for u, _ in terms])
    V = np.array([v for _, v in terms])
    K = V @ U.T
    s = np.array([(1.0 - eps) * (edge.a - edge.b) / (n * n) for edge in edges])
    if decoupled:
        w = s / (1.0 - np.diag(K))
    else:
        w = linalg.solve((np.eye(len(edges)) - K).T, s)
    vector = w @ V

    details = {
        "edges": [
            {"i": e.i, "j": e.j, "a": e.a, "b": e.b, "zeta": float(n * n * K[k, k]), "weight": float(w[k])}
            for k, e in enumerate(edges)
        ],
        "coupled": not decoupled,
    }
    return _excess(vector, "disjoint", x0, n, details)


@dataclass(frozen=True)
class EssentialEdge:
    """A bridge {i, j} of the T-graph; size_i = |N(i, j)| is the component holding i."""

    i: int
    j: int
    size_i: int
    size_j: int
    weight: float
    forceful: bool

    def to_dict(self) -> Dict:
        return {
            "i": self.i,
            "j": self.j,
            "size_i": self.size_i,
            "size_j": self.size_j,
            "weight": self.weight,
            "forceful": self.forceful,
        }


@dataclass
class EssentialEdgeReport:
    """Bridges of the T-graph and, when it applies, the single forceful bridge closed form."""

    n: int
    bridges: List[EssentialEdge] = field(default_factory=list)
    closed_form: Optional[ExcessInfluence] = None

    def to_dict(self) -> Dict:
        return {
            "n": self.n,
            "bridges": [b.to_dict() for b in self.bridges],
            "closed_form": self.closed_form.to_dict() if self.closed_form is not None else None,
        }


def _t_graph(T: np.ndarray) -> nx.Graph:
    graph = nx.Graph()
    n = T.shape[0]
    graph.add_nodes_from(range(n))
    rows, cols = np.nonzero(np.triu(T, 1) > 0)
    graph.add_edges_from((int(i), int(j)) for i, j in zip(rows, cols))
    return graph


def _bridge_sides(graph: nx.Graph, i: int, j: int) -> Tuple[set, set]:
    cut = graph.copy()
    cut.remove_edge(i, j)
    side_i = nx.node_connected_component(cut, i)
    side_j = nx.node_connected_component(cut, j)
    if side_i & side_j or len(side_i) + len(side_j) != graph.number_of_nodes():
        raise NotEssential(f"removing {{{i}, {j}}} does not split the T-graph in two")
    return side_i, side_j


def essential_edges(network: SocialNetwork, context: Optional[InfluenceContext] = None) -> EssentialEdgeReport:
    """
    Bridges of the T-graph with the sizes of the two components each leaves.

    When the network has exactly one forceful ordered pair and it sits on a
    bridge, the report also carries the closed-form excess influence.
    """
    ctx = _context(network, context)
    T = ctx.decomposition.T
    graph = _t_graph(T)
    forceful = {(min(e.i, e.j), max(e.i, e.j)) for e in forceful_edges(network)}
    report = EssentialEdgeReport(n=network.n)
    for u, v in sorted((min(u, v), max(u, v)) for u, v in nx.bridges(graph)):
        side_u, side_v = _bridge_sides(graph, u, v)
        report.bridges.append(EssentialEdge(
            i=u, j=v, size_i=len(side_u), size_j=len(side_v), weight=float(T[u, v]), forceful=(u, v) in forceful,
        ))
    try:
        report.closed_form = essential_edge_excess(network, context=ctx)
    except NotApplicable:
        pass
    return report


def essential_edge_passage(network: SocialNetwork, i: int, j: int,
                           context: Optional[InfluenceContext] = None) -> Tuple[float, float]:
    """
    Passage times across a bridge: m_ij = |N(i, j)| / T_ij and m_ji = |N(j, i)| / T_ij.

    Raises:
        NotEssential: If {i, j} is not a bridge of the T-graph
    """
    ctx = _context(network, context)
    T = ctx.decomposition.T
    graph = _t_graph(T)
    if not graph.has_edge(i, j) or (min(i, j), max(i, j)) not in {(min(a, b), max(a, b)) for a, b in nx.bridges(graph)}:
        raise NotEssential(f"{{{i}, {j}}} is not an essential edge of the T-graph")
    side_i, side_j = _bridge_sides(graph, i, j)
    return len(side_i) / T[i, j], len(side_j) / T[i, j]


def essential_edge_excess(network: SocialNetwork, x0: Optional[Sequence[float]] = None,
                          context: Optional[InfluenceContext] = None) -> ExcessInfluence:
    """
    Closed form for a single forceful link over a bridge.

    With j influencing i, theta = p_ij alpha_ij / (p_ij (1 - gamma_ij) + p_ji (1 - gamma_ji))
    and Psi(k) = |N(i, j)| on j's side, -|N(j, i)| on i's side:
        excess_k = 2 (1 - eps) theta Psi(k) / n^2 / (1 - (theta / n)(|N(i, j)| - (1 - 2 eps)|N(j, i)|))

    Raises:
        NotApplicable: Unless exactly one ordered pair has alpha > 0 and its edge is a bridge
    """
    ctx = _context(network, context)
    n, eps = network.n, network.epsilon
    pairs = [(i, j) for i, j in network.edges() if network.alpha[i, j] > 0]
    if len(pairs) != 1:
        raise NotApplicable(f"closed form needs exactly one forceful ordered pair, found {len(pairs)}")
    i, j = pairs[0]
    graph = _t_graph(ctx.decomposition.T)
    bridges = {(min(a, b), max(a, b)) for a, b in nx.bridges(graph)}
    if (min(i, j), max(i, j)) not in bridges:
        raise NotApplicable(f"forceful edge {{{i}, {j}}} is not an essential edge")

    side_i, side_j = _bridge_sides(graph, i, j)
    P, gamma = network.meeting, network.gamma
    theta = P[i, j] * network.alpha[i, j] / (P[i, j] * (1.0 - gamma[i, j]) + P[j, i] * (1.0 - gamma[j, i]))
    psi = np.zeros(n)
    psi[sorted(side_j)] = len(side_i)
    psi[sorted(side_i)] = -len(side_j)
    denominator = 1.0 - theta / n * (len(side_i) - (1.0 - 2.0 * eps) * len(side_j))
    vector = 2.0 * (1.0 - eps) * theta * psi / (n * n) / denominator
    details = {
        "i": i,
        "j": j,
        "theta": float(theta),
        "size_i": len(side_i),
        "size_j": len(side_j),
        "psi": psi.tolist(),
        "denominator": float(denominator),
    }
    return _excess(vector, "essential", x0, n, details)


@dataclass
class BoundValue:
    """
    One bound on the deviation next to the quantity it bounds.

    value is None when the bound is vacuous. certified is False when an
    input (a cut value) came from a heuristic.
    """

    name: str
    norm: str  # "inf" | "l2" | "gap"
    value: Optional[float]
    actual: float
    certified: bool = True
    details: Dict = field(default_factory=dict)

    @property
    def vacuous(self) -> bool:
        return self.value is None

    @property
    def holds(self) -> bool:
        return bool(self.vacuous or self.value >= self.actual - VALIDITY_SLACK)

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "norm": self.norm,
            "value": self.value,
            "actual": self.actual,
            "certified": self.certified,
            "vacuous": self.vacuous,
            "holds": self.holds,
            "details": self.details,
        }


def bound_delta(network: SocialNetwork, context: Optional[InfluenceContext] = None) -> BoundValue:
    """||pi_bar - e/n||_inf <= sum p alpha / (2 n) / (1 - delta); vacuous when n chi^d > 1."""
    ctx = _context(network, context)
    actual = float(np.max(np.abs(ctx.pi_bar - 1.0 / network.n)))
    total = total_influence(network)
    try:
        constants = eta_constants(network, decomposition=ctx.decomposition)
    except DegenerateDelta as e:
        return BoundValue("delta", "inf", None, actual, details={"n_chi_d": e.value})
    value = total / (2.0 * network.n) / constants.one_minus_delta
    return BoundValue("delta", "inf", value, actual, details=constants.to_dict())


def bound_gap(network: SocialNetwork, x0: Sequence[float], context: Optional[InfluenceContext] = None) -> BoundValue:
    """|E[x_bar] - theta| <= sum p alpha / (2 n) / (1 - delta) * ||x(0)||_inf."""
    ctx = _context(network, context)
    x = as_vector(x0, network.n)
    delta = bound_delta(network, ctx)
    actual = abs(float((ctx.pi_bar - 1.0 / network.n) @ x))
    value = None if delta.vacuous else delta.value * float(np.max(np.abs(x)))
    return BoundValue("gap", "gap", value, actual, details=dict(delta.details))


def bound_l2(network: SocialNetwork, context: Optional[InfluenceContext] = None) -> BoundValue:
    """||pi_bar - e/n||_2 <= sum p alpha / n / (1 - lambda_2(T))."""
    ctx = _context(network, context)
    spectral = ctx.chain.spectral
    actual = float(np.linalg.norm(ctx.pi_bar - 1.0 / network.n))
    value = total_influence(network) / network.n / spectral.gap
    return BoundValue("l2", "l2", value, actual, details={"lambda2": spectral.lambda2, "gap": spectral.gap})


def bound_conductance(network: SocialNetwork, rho, certified: Optional[bool] = None,
                      context: Optional[InfluenceContext] = None) -> BoundValue:
    """
    ||pi_bar - e/n||_inf <= 2 sum p alpha / n * (1 + log n) / rho.

    Args:
        rho: Minimum normalized cut of T, a CutResult or a number
        certified: Override; a CutResult carries its own flag
    """
    ctx = _context(network, context)
    if isinstance(rho, CutResult):
        value, flag = rho.normalized, rho.certified
    else:
        value, flag = float(rho), True
    if certified is not None:
        flag = certified
    n = network.n
    actual = float(np.max(np.abs(ctx.pi_bar - 1.0 / n)))
    bound = 2.0 * total_influence(network) / n * (1.0 + math.log(n)) / value
    return BoundValue("conductance", "inf", bound, actual, certified=flag, details={"rho": value})


def pair_commute_bounds(graph: WeightedGraph, a: int, b: int, mode: str = "auto",
                        limit: Optional[int] = None, cluster: bool = True) -> List[CommuteBound]:
    """Every available upper bound on m_ab + m_ba for one pair."""
    _, upper = commute_bounds_relative(graph, a, b)
    bounds = [upper]
    rho_ab = min_normalized_relative_cut(graph, a, b, mode, limit)
    bounds.append(commute_bound_normalized(graph, a, b, rho_ab))
    if cluster:
        trace = cluster_bound(graph, a, b, mode, limit)
        bounds.append(CommuteBound("cluster", trace.final_bound, trace.certified, {"passes": len(trace.iterations)}))
    return bounds


def bound_cut_local(network: SocialNetwork, commute_bounds: Dict[Tuple[int, int], float],
                    certified: bool = True, context: Optional[InfluenceContext] = None) -> BoundValue:
    """
    ||pi_bar - e/n||_inf <= sum over forceful pairs of p_ij alpha_ij / (2 n^2) * C_ij,
    where C_ij bounds the commute time m_ij + m_ji from above.

    Args:
        commute_bounds: Maps the unordered pair (min, max) to C_ij
    """
    ctx = _context(network, context)
    n = network.n
    actual = float(np.max(np.abs(ctx.pi_bar - 1.0 / n)))
    value = 0.0
    for i, j in network.edges():
        alpha = network.alpha[i, j]
        if alpha <= 0:
            continue
        key = (min(i, j), max(i, j))
        if key not in commute_bounds:
            raise ValueError(f"no commute bound supplied for forceful pair {key}")
        value += network.meeting[i, j] * alpha / (2.0 * n * n) * commute_bounds[key]
    return BoundValue("cut_local", "inf", value, actual, certified=certified)


@dataclass
class BoundsReport:
    """All bounds for one network with the pair commute bounds that fed the local bound."""

    bounds: List[BoundValue] = field(default_factory=list)
    pair_commute: List[Dict] = field(default_factory=list)
    actual_sup: float = 0.0
    actual_l2: float = 0.0
    cut: Optional[CutResult] = None

    def by_name(self, name: str) -> BoundValue:
        for bound in self.bounds:
            if bound.name == name:
                return bound
        raise KeyError(name)

    @property
    def all_hold(self) -> bool:
        return all(b.holds for b in self.bounds if b.certified)

    def to_dict(self) -> Dict:
        return {
            "bounds": [b.to_dict() for b in self.bounds],
            "pair_commute": self.pair_commute,
            "actual_sup": self.actual_sup,
            "actual_l2": self.actual_l2,
            "cut": self.cut.to_dict() if self.cut is not None else None,
            "all_hold": self.all_hold,
        }


def bounds_report(network: SocialNetwork, x0: Optional[Sequence[float]] = None, cut_mode: str = "auto",
                  limit: Optional[int] = None, cluster: bool = True,
                  context: Optional[InfluenceContext] = None) -> BoundsReport:
    """
    Evaluate every bound against the exact deviation.

    The local cut bound takes, for each forceful pair, the smallest of the
    relative-cut, normalized-relative-cut and cluster commute bounds that
    is certified; the relative-cut bound is always certified.
    """
    ctx = _context(network, context)
    n = network.n
    excess = ctx.pi_bar - 1.0 / n
    graph = WeightedGraph.from_network(network)
    cut = min_normalized_cut(graph, cut_mode, limit)

    report = BoundsReport(actual_sup=float(np.max(np.abs(excess))), actual_l2=float(np.linalg.norm(excess)), cut=cut)
    report.bounds.append(bound_delta(network, ctx))
    if x0 is not None:
        report.bounds.append(bound_gap(network, x0, ctx))
    report.bounds.append(bound_l2(network, ctx))
    report.bounds.append(bound_conductance(network, cut, context=ctx))

    chosen: Dict[Tuple[int, int], float] = {}
    M = ctx.chain.passage.M
    for edge in forceful_edges(network):
        key = (edge.i, edge.j)
        candidates = pair_commute_bounds(graph, edge.i, edge.j, cut_mode, limit, cluster)
        certified = [c for c in candidates if c.certified]
        best = min(certified, key=lambda c: c.value)
        chosen[key] = best.value
        report.pair_commute.append({
            "i": edge.i,
            "j": edge.j,
            "actual": float(M[edge.i, edge.j] + M[edge.j, edge.i]),
            "chosen": best.name,
            "bounds": [c.to_dict() for c in candidates],
        })
    report.bounds.append(bound_cut_local(network, chosen, True, ctx))
    return report
