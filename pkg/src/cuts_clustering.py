"""
Cuts of the social network graph and cut-based commute-time bounds.

The undirected graph carries the symmetric weights of T (self-loops
included). On it this module computes:
- minimum relative cuts c_ab by max-flow (networkx.minimum_cut)
- minimum normalized cuts rho and normalized relative cuts rho_ab, either
  by exhaustive enumeration (exact, certified) or by a spectral sweep with
  one pass of single-node moves (heuristic, an upper bound on the minimum)
- subgraph restriction, folding the weight of dropped edges into self-loops
- the recursive clustering procedure that shrinks the node set around a
  pair (a, b) until the optimal cut separates them

Cut values are Laplacian quadratic forms x'Lx of the 0/1 membership
vector, so self-loops never contribute to a cut.

Used by: influence_analysis (bounds), analysis_report, cli
Related: src/markov_analysis.py (electrical commute times used as oracles)
"""

import math
import sys
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

import networkx as nx
import numpy as np
from scipy import linalg

from src.config import SETTINGS
from src.interaction_kernel import social_matrix
from src.markov_analysis import commute_time_electrical
from src.models import AnalysisError, SocialNetwork

TIE_TOLERANCE = 1e-12
CUT_MODES = ("exact", "heuristic", "auto")
_CHUNK_BITS = 16


class Disconnected(AnalysisError):
    """Raised when the weighted graph has more than one connected component."""
    pass


class TooLargeForExact(AnalysisError):
    """Raised when exhaustive cut enumeration is requested above the size limit."""
    pass


class SubgraphDisconnected(AnalysisError):
    """Raised when the graph induced on a node subset is not connected."""
    pass


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """
    Undirected graph given by a symmetric nonnegative weight matrix.

    weights[i, i] is the self-loop weight. For graphs built from a social
    matrix T every node total is 1 and the total weight equals n.
    """

    weights: np.ndarray

    def __post_init__(self):
        W = np.array(self.weights, dtype=float)
        if W.ndim != 2 or W.shape[0] != W.shape[1] or W.shape[0] < 2:
            raise ValueError(f"weights must be a square matrix with at least 2 nodes, got shape {W.shape}")
        if np.any(W < 0):
            raise ValueError("weights must be nonnegative")
        if not np.allclose(W, W.T, atol=1e-12, rtol=0.0):
            raise ValueError("weights must be symmetric")
        W = (W + W.T) / 2.0
        W.setflags(write=False)
        object.__setattr__(self, "weights", W)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def degrees(self) -> np.ndarray:
        """Per-node totals, self-loops included."""
        return self.weights.sum(axis=1)

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    @property
    def stationary(self) -> np.ndarray:
        return self.degrees / self.total

    @property
    def off_diagonal(self) -> np.ndarray:
        off = np.array(self.weights)
        np.fill_diagonal(off, 0.0)
        return off

    def laplacian(self) -> np.ndarray:
        off = self.off_diagonal
        return np.diag(off.sum(axis=1)) - off

    def to_networkx(self) -> nx.Graph:
        """Edges with positive off-diagonal weight, stored as 'capacity'."""
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        rows, cols = np.nonzero(np.triu(self.off_diagonal, 1) > 0)
        graph.add_weighted_edges_from(
            ((int(i), int(j), float(self.weights[i, j])) for i, j in zip(rows, cols)),
            weight="capacity",
        )
        return graph

    def is_connected(self) -> bool:
        return nx.is_connected(self.to_networkx())

    def has_unit_totals(self, tol: float = 1e-9) -> bool:
        return bool(np.allclose(self.degrees, 1.0, atol=tol, rtol=0.0))

    @classmethod
    def from_matrix(cls, weights) -> "WeightedGraph":
        return cls(weights=np.asarray(weights, dtype=float))

    @classmethod
    def from_network(cls, network: SocialNetwork) -> "WeightedGraph":
        """The T-graph of a network: weights T_ij, self-loops T_ii."""
        return cls(weights=social_matrix(network))

    @classmethod
    def from_graph(cls, graph: nx.Graph, weight: str = "weight") -> "WeightedGraph":
        """Adjacency of a networkx graph (missing weights count as 1), nodes in sorted order."""
        nodes = sorted(graph.nodes())
        return cls(weights=nx.to_numpy_array(graph, nodelist=nodes, weight=weight))


@dataclass(frozen=True)
class CutResult:
    """
    A cut (S, S^c) of a weighted graph.

    side is the canonical side: the one holding the smallest node, or the
    side holding a for relative cuts. mode is "exact" for exhaustive
    search, "maxflow" for relative cuts and "heuristic" for the spectral
    sweep; only heuristic values are uncertified.
    """

    side: Tuple[int, ...]
    value: float
    normalized: float
    mode: str

    @property
    def certified(self) -> bool:
        return self.mode != "heuristic"

    def to_dict(self) -> Dict:
        return {
            "side": list(self.side),
            "value": self.value,
            "normalized": self.normalized,
            "mode": self.mode,
            "certified": self.certified,
        }


@dataclass(frozen=True)
class CommuteBound:
    """An upper (or lower) bound on m_ab + m_ba with its provenance."""

    name: str
    value: float
    certified: bool = True
    details: Dict = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return {"name": self.name, "value": self.value, "certified": self.certified, "details": dict(self.details)}


def _side_mask(n: int, side: Iterable[int]) -> np.ndarray:
    mask = np.zeros(n, dtype=bool)
    idx = list(side)
    if any(not 0 <= s < n for s in idx):
        raise ValueError(f"cut side {sorted(idx)} has nodes outside [0, {n})")
    mask[idx] = True
    if not mask.any() or mask.all():
        raise ValueError("a cut side must be a nonempty proper subset of the nodes")
    return mask


def _check_pair(graph: WeightedGraph, a: int, b: int) -> None:
    if not (0 <= a < graph.n and 0 <= b < graph.n) or a == b:
        raise ValueError(f"(a, b) must be distinct nodes in [0, {graph.n}), got ({a}, {b})")


def _require_connected(graph: WeightedGraph) -> None:
    if not graph.is_connected():
        raise Disconnected("weighted graph is not connected")


def cut_value(graph: WeightedGraph, side: Iterable[int]) -> float:
    """Sum of w_ij over i in S, j not in S."""
    x = _side_mask(graph.n, side).astype(float)
    return float(x @ graph.laplacian() @ x)


def normalized_cut_value(graph: WeightedGraph, side: Iterable[int]) -> float:
    """
    Q(S, S^c) / (pi(S) pi(S^c)) with pi the degree distribution.

    Equals w * cut(S) / (vol(S) vol(S^c)); for T-graphs n * cut / (|S| |S^c|).
    """
    mask = _side_mask(graph.n, side)
    vol = float(graph.degrees[mask].sum())
    return graph.total * cut_value(graph, np.flatnonzero(mask)) / (vol * (graph.total - vol))


def min_relative_cut(graph: WeightedGraph, a: int, b: int) -> CutResult:
    """
    Minimum relative cut c_ab: the cheapest cut with a in S and b outside.

    Computed as a maximum flow from a to b with capacities w_ij.

    Raises:
        Disconnected: If the graph is not connected
    """
    _check_pair(graph, a, b)
    _require_connected(graph)
    value, (reachable, _) = nx.minimum_cut(graph.to_networkx(), a, b, capacity="capacity")
    side = tuple(sorted(int(v) for v in reachable))
    return CutResult(side=side, value=float(value), normalized=normalized_cut_value(graph, side), mode="maxflow")


def commute_bounds_relative(graph: WeightedGraph, a: int, b: int) -> Tuple[CommuteBound, CommuteBound]:
    """
    Sandwich n / c_ab <= m_ab + m_ba <= n^2 / c_ab.

    Requires unit node totals (a T-graph, whose walk has uniform stationary
    distribution).
    """
    if not graph.has_unit_totals():
        raise ValueError("relative-cut commute bounds need unit node totals (a social matrix graph)")
    cut = min_relative_cut(graph, a, b)
    n = graph.n
    details = {"a": a, "b": b, "c_ab": cut.value, "side": list(cut.side)}
    return (
        CommuteBound("relative_cut_lower", n / cut.value, True, details),
        CommuteBound("relative_cut_upper", n * n / cut.value, True, details),
    )


def _is_tie(value: float, best: float) -> bool:
    return value <= best + TIE_TOLERANCE * max(abs(best), 1e-300)


def _pick(candidates: np.ndarray, values: np.ndarray) -> Tuple[np.ndarray, float]:
    """Deterministic minimizer: smallest value, then smallest |S|, then lexicographic order."""
    best = float(values.min())
    tied = candidates[values <= best + TIE_TOLERANCE * max(abs(best), 1e-300)]
    keys = [-tied[:, col] for col in range(tied.shape[1] - 1, -1, -1)]
    keys.append(tied.sum(axis=1))
    choice = tied[np.lexsort(keys)[0]]
    return choice, best


def _enumerate_normalized(graph: WeightedGraph, fixed_in: int, fixed_out: Optional[int]) -> np.ndarray:
    """
    Exhaustive minimum of the normalized cut over S containing fixed_in
    (and excluding fixed_out when given). Returns the membership row.
    """
    n = graph.n
    L = graph.laplacian()
    degrees = graph.degrees
    total = graph.total
    free = [v for v in range(n) if v != fixed_in and v != fixed_out]
    k = len(free)
    count = 1 << k
    shifts = np.arange(k, dtype=np.int64)

    best_rows = None
    best_values = None
    for start in range(0, count, 1 << _CHUNK_BITS):
        codes = np.arange(start, min(count, start + (1 << _CHUNK_BITS)), dtype=np.int64)
        X = np.zeros((codes.size, n))
        X[:, fixed_in] = 1.0
        if k:
            X[:, free] = (codes[:, None] >> shifts) & 1
        if fixed_out is None:
            X = X[X.sum(axis=1) < n]
            if X.shape[0] == 0:
                continue
        cut = np.einsum("si,ij,sj->s", X, L, X)
        vol = X @ degrees
        values = total * cut / (vol * (total - vol))

        if best_values is not None:
            X = np.vstack([best_rows, X])
            values = np.concatenate([best_values, values])
        floor = values.min()
        keep = values <= floor + TIE_TOLERANCE * max(abs(floor), 1e-300)
        best_rows, best_values = X[keep], values[keep]

    choice, _ = _pick(best_rows, best_values)
    return choice.astype(bool)


def _fiedler_order(graph: WeightedGraph) -> np.ndarray:
    """Nodes sorted by the second eigenvector of D^-1/2 W D^-1/2, rescaled by D^-1/2."""
    scale = 1.0 / np.sqrt(graph.degrees)
    normalized = scale[:, None] * graph.weights * scale[None, :]
    _, vectors = linalg.eigh(normalized)
    fiedler = scale * vectors[:, -2]
    return np.argsort(fiedler, kind="stable")


def _sweep(graph: WeightedGraph, order: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """Best prefix cut order[:k] for k in [lo, hi]."""
    off = graph.off_diagonal[np.ix_(order, order)]
    into_prefix = np.triu(off, 1).sum(axis=0)
    cut = np.cumsum(off.sum(axis=1) - 2.0 * into_prefix)
    vol = np.cumsum(graph.degrees[order])
    sizes = np.arange(1, graph.n + 1)
    keep = (sizes >= lo) & (sizes <= hi)
    values = np.where(keep, graph.total * cut / (vol * np.maximum(graph.total - vol, 1e-300)), np.inf)
    k = int(np.argmin(values)) + 1
    mask = np.zeros(graph.n, dtype=bool)
    mask[order[:k]] = True
    return mask


def _refine(graph: WeightedGraph, mask: np.ndarray, fixed_in: Optional[int], fixed_out: Optional[int]) -> np.ndarray:
    """One pass of single-node moves, each kept only if it lowers the normalized cut."""
    mask = mask.copy()
    current = normalized_cut_value(graph, np.flatnonzero(mask))
    for v in range(graph.n):
        if v == fixed_in or v == fixed_out:
            continue
        mask[v] = not mask[v]
        if mask.any() and not mask.all():
            candidate = normalized_cut_value(graph, np.flatnonzero(mask))
            if candidate < current and not _is_tie(current, candidate):
                current = candidate
                continue
        mask[v] = not mask[v]
    return mask


def _heuristic_normalized(graph: WeightedGraph, a: Optional[int], b: Optional[int]) -> np.ndarray:
    order = _fiedler_order(graph)
    if a is None:
        mask = _sweep(graph, order, 1, graph.n - 1)
        return _refine(graph, mask, None, None)
    position = np.empty(graph.n, dtype=int)
    position[order] = np.arange(graph.n)
    if position[a] > position[b]:
        order = order[::-1]
        position[order] = np.arange(graph.n)
    mask = _sweep(graph, order, position[a] + 1, position[b])
    return _refine(graph, mask, a, b)


def _resolve_mode(graph: WeightedGraph, mode: str, limit: Optional[int]) -> str:
    if mode not in CUT_MODES:
        raise ValueError(f"cut mode must be one of {CUT_MODES}, got {mode!r}")
    limit = SETTINGS.exact_cut_limit if limit is None else limit
    if mode == "auto":
        return "exact" if graph.n <= limit else "heuristic"
    if mode == "exact" and graph.n > limit:
        raise TooLargeForExact(f"exact cut enumeration limited to n <= {limit}, got n = {graph.n}")
    return mode


def _result(graph: WeightedGraph, mask: np.ndarray, mode: str, anchor: int) -> CutResult:
    if not mask[anchor]:
        mask = ~mask
    side = tuple(int(v) for v in np.flatnonzero(mask))
    return CutResult(side=side, value=cut_value(graph, side), normalized=normalized_cut_value(graph, side), mode=mode)


def min_normalized_cut(graph: WeightedGraph, mode: str = "auto", limit: Optional[int] = None) -> CutResult:
    """
    Minimum normalized cut (conductance) rho of the graph.

    Args:
        graph: Connected weighted graph
        mode: "exact" (2^(n-1) subsets), "heuristic" (spectral sweep) or
            "auto" (exact up to the configured size limit)
        limit: Override for MISINFO_EXACT_CUT_LIMIT

    Returns:
        CutResult whose side holds node 0; ties broken by |S| then
        lexicographic order

    Raises:
        Disconnected: If the graph is not connected
        TooLargeForExact: mode="exact" above the size limit
    """
    _require_connected(graph)
    mode = _resolve_mode(graph, mode, limit)
    if mode == "exact":
        mask = _enumerate_normalized(graph, 0, None)
    else:
        mask = _heuristic_normalized(graph, None, None)
    return _result(graph, mask, mode, 0)


def min_normalized_relative_cut(graph: WeightedGraph, a: int, b: int, mode: str = "auto",
                                limit: Optional[int] = None) -> CutResult:
    """Minimum normalized cut over S with a in S and b not in S (rho_ab >= rho)."""
    _check_pair(graph, a, b)
    _require_connected(graph)
    mode = _resolve_mode(graph, mode, limit)
    if mode == "exact":
        mask = _enumerate_normalized(graph, a, b)
    else:
        mask = _heuristic_normalized(graph, a, b)
    return _result(graph, mask, mode, a)


def _rho(rho: Union[CutResult, float], certified: Optional[bool]) -> Tuple[float, bool]:
    if isinstance(rho, CutResult):
        return rho.normalized, rho.certified if certified is None else certified
    return float(rho), True if certified is None else certified


def commute_bound_normalized(graph: WeightedGraph, a: int, b: int, rho_ab: Union[CutResult, float],
                             certified: Optional[bool] = None) -> CommuteBound:
    """m_ab + m_ba <= 3 n log n / rho_ab (natural log)."""
    _check_pair(graph, a, b)
    value, certified = _rho(rho_ab, certified)
    n = graph.n
    return CommuteBound("normalized_relative_cut", 3.0 * n * math.log(n) / value, certified, {"a": a, "b": b, "rho_ab": value})


def commute_bound_global(graph: WeightedGraph, rho: Union[CutResult, float],
                         certified: Optional[bool] = None) -> CommuteBound:
    """Every commute time is at most 4 (1 + log n) / (rho min_k pi_k)."""
    value, certified = _rho(rho, certified)
    n = graph.n
    bound = 4.0 * (1.0 + math.log(n)) / (value * float(graph.stationary.min()))
    return CommuteBound("conductance_global", bound, certified, {"rho": value})


@dataclass(frozen=True, eq=False)
class SubgraphRestriction:
    """
    The graph restricted to a node subset S.

    Weight of every edge leaving S is folded into the self-loop of its
    endpoint in S, so node totals are preserved. graph is indexed locally;
    nodes[k] is the original label of local node k.
    """

    nodes: Tuple[int, ...]
    graph: WeightedGraph
    parent_n: int

    def local(self, node: int) -> int:
        try:
            return self.nodes.index(node)
        except ValueError:
            raise ValueError(f"node {node} is not in the restricted set {list(self.nodes)}")

    def to_parent(self, local_nodes: Iterable[int]) -> Tuple[int, ...]:
        return tuple(sorted(self.nodes[k] for k in local_nodes))


def restrict(graph: WeightedGraph, nodes: Iterable[int]) -> SubgraphRestriction:
    """
    Restrict to S with w_ii <- w_ii + sum over k outside S of w_ik.

    Raises:
        ValueError: If S has fewer than 2 nodes or nodes outside the graph
        SubgraphDisconnected: If the induced subgraph is not connected
    """
    S = tuple(sorted(set(int(v) for v in nodes)))
    if len(S) < 2:
        raise ValueError(f"restriction needs at least 2 nodes, got {list(S)}")
    if S[0] < 0 or S[-1] >= graph.n:
        raise ValueError(f"restriction nodes must lie in [0, {graph.n}), got {list(S)}")
    inside = np.zeros(graph.n, dtype=bool)
    inside[list(S)] = True
    W = np.array(graph.weights[np.ix_(inside, inside)])
    W[np.diag_indices(len(S))] += graph.weights[np.ix_(inside, ~inside)].sum(axis=1)
    restricted = WeightedGraph(weights=W)
    if not restricted.is_connected():
        raise SubgraphDisconnected(f"subgraph induced on {list(S)} is not connected")
    return SubgraphRestriction(nodes=S, graph=restricted, parent_n=graph.n)


def commute_bound_subgraph(graph: WeightedGraph, a: int, b: int, nodes: Iterable[int], mode: str = "auto",
                           limit: Optional[int] = None) -> CommuteBound:
    """
    m_ab + m_ba <= 3 n log|S| / rho_ab(S).

    rho_ab(S) is the minimum normalized relative cut of the restricted graph.
    With S = N this is the whole-graph normalized bound.
    """
    _check_pair(graph, a, b)
    restriction = restrict(graph, nodes)
    cut = min_normalized_relative_cut(restriction.graph, restriction.local(a), restriction.local(b), mode, limit)
    size = len(restriction.nodes)
    value = 3.0 * graph.n * math.log(size) / cut.normalized
    return CommuteBound(
        "subgraph_normalized_cut",
        value,
        cut.certified,
        {"a": a, "b": b, "nodes": list(restriction.nodes), "rho_ab": cut.normalized, "side": list(restriction.to_parent(cut.side))},
    )


def subgraph_commute_inequality(graph: WeightedGraph, a: int, b: int, nodes: Iterable[int]) -> Dict:
    """
    Compare the commute time on the graph with the scaled commute time on
    a restriction: m_ab + m_ba <= (w / w(S)) (m'_ab + m'_ba).
    """
    restriction = restrict(graph, nodes)
    lhs = commute_time_electrical(graph.weights, a, b)
    restricted = commute_time_electrical(restriction.graph.weights, restriction.local(a), restriction.local(b))
    rhs = graph.total / restriction.graph.total * restricted
    return {"lhs": lhs, "rhs": rhs, "holds": bool(lhs <= rhs * (1.0 + 1e-10))}


def cut_edges(graph: WeightedGraph, side: Iterable[int], within: Optional[Iterable[int]] = None) -> Set[Tuple[int, int]]:
    """Edges {u, v} (u < v) with one end in S and the other in within \\ S."""
    within_set = set(range(graph.n)) if within is None else set(int(v) for v in within)
    side_set = set(int(v) for v in side) & within_set
    rest = within_set - side_set
    off = graph.off_diagonal
    edges = set()
    for u in side_set:
        for v in rest:
            if off[u, v] > 0:
                edges.add((min(u, v), max(u, v)))
    return edges


@dataclass(frozen=True)
class ClusterIteration:
    """One pass: the node set, its optimal cut (side holding a) and whether it separates a from b."""

    k: int
    nodes: Tuple[int, ...]
    side: Tuple[int, ...]
    rho: float
    mode: str
    separates: bool
    disjoint_with_next: Optional[bool] = None
    increase_holds: Optional[bool] = None

    def to_dict(self) -> Dict:
        return {
            "k": self.k,
            "nodes": list(self.nodes),
            "side": list(self.side),
            "rho": self.rho,
            "mode": self.mode,
            "separates": self.separates,
            "disjoint_with_next": self.disjoint_with_next,
            "increase_holds": self.increase_holds,
        }


@dataclass
class ClusterTrace:
    """Full record of the clustering procedure for the pair (a, b)."""

    a: int
    b: int
    n: int
    iterations: List[ClusterIteration] = field(default_factory=list)

    @property
    def final(self) -> ClusterIteration:
        return self.iterations[-1]

    @property
    def final_bound(self) -> float:
        """3 n log|S_k| / rho_k at the terminating iteration."""
        return 3.0 * self.n * math.log(len(self.final.nodes)) / self.final.rho

    @property
    def initial_bound(self) -> float:
        return 3.0 * self.n * math.log(self.n) / self.iterations[0].rho

    @property
    def certified(self) -> bool:
        return all(it.mode == "exact" for it in self.iterations)

    def to_dict(self) -> Dict:
        return {
            "a": self.a,
            "b": self.b,
            "n": self.n,
            "iterations": [it.to_dict() for it in self.iterations],
            "final_bound": self.final_bound,
            "initial_bound": self.initial_bound,
            "certified": self.certified,
        }


def _mark_disjointness(graph: WeightedGraph, iterations: List[ClusterIteration]) -> List[ClusterIteration]:
    """
    For consecutive passes k, k+1 compare the cuts of S_{k+1} and S_{k+2}
    inside S_k, where S_{k+2} is the side of pass k+1 holding a. When no
    edge joins S_{k+2} to S_k \\ S_{k+1} the cuts are disjoint and rho must
    strictly increase.
    """
    marked = []
    for k, it in enumerate(iterations):
        if k + 1 >= len(iterations):
            marked.append(it)
            continue
        nxt = iterations[k + 1]
        outer = set(it.nodes)
        first = cut_edges(graph, nxt.nodes, outer)
        second = cut_edges(graph, nxt.side, outer)
        disjoint = not (first & second)
        marked.append(ClusterIteration(
            k=it.k,
            nodes=it.nodes,
            side=it.side,
            rho=it.rho,
            mode=it.mode,
            separates=it.separates,
            disjoint_with_next=disjoint,
            increase_holds=(nxt.rho > it.rho) if disjoint else None,
        ))
    return marked


def cluster_bound(graph: WeightedGraph, a: int, b: int, mode: str = "auto", limit: Optional[int] = None,
                  verbose: bool = False) -> ClusterTrace:
    """
    Shrink the node set around (a, b) by repeated minimum normalized cuts.

    Each pass restricts the graph to the current set S_k, finds its
    minimum normalized cut and keeps the side holding both a and b. The
    procedure stops at the first cut that separates them and reports
    3 n log|S_k| / rho_k.

    Args:
        graph: Connected T-graph
        a, b: The two marked nodes
        mode: Cut mode for every pass ("auto" picks exact per subgraph size)
        limit: Override for MISINFO_EXACT_CUT_LIMIT
        verbose: Print one progress line per pass to stderr

    Returns:
        ClusterTrace with disjointness flags between consecutive passes
    """
    _check_pair(graph, a, b)
    _require_connected(graph)
    nodes: Sequence[int] = tuple(range(graph.n))
    iterations: List[ClusterIteration] = []

    while True:
        k = len(iterations)
        restriction = restrict(graph, nodes)
        cut = min_normalized_cut(restriction.graph, mode, limit)
        side = restriction.to_parent(cut.side)
        rest = tuple(v for v in restriction.nodes if v not in side)
        if a not in side:
            side, rest = rest, side
        separates = b not in side
        iterations.append(ClusterIteration(k=k, nodes=restriction.nodes, side=side, rho=cut.normalized,
                                           mode=cut.mode, separates=separates))
        if verbose:
            _progress(f"[{k + 1}] |S|={len(restriction.nodes)} rho={cut.normalized:.6g} ({cut.mode})"
                      + (" ✓ separates a and b" if separates else ""))
        if separates:
            break
        nodes = side

    trace = ClusterTrace(a=a, b=b, n=graph.n, iterations=_mark_disjointness(graph, iterations))
    if verbose:
        _progress(f"✓ cluster bound {trace.final_bound:.6g} after {len(trace.iterations)} pass(es)")
    return trace


def _progress(message: str) -> None:
    print(message, file=sys.stderr)
