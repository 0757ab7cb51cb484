"""
Example topologies for misinformation experiments.

Graph-based kinds assign meeting probabilities inversely proportional to
degree (p_ij = 1/deg(i) over neighbours) with pure averaging (beta = 1)
on every link. Forceful links are then applied as (influenced i,
forceful j, alpha) triples: alpha_ij is set and beta_ij reduced to
1 - alpha - gamma.

Kinds:
- complete, ring, path, barbell, bridged (chain of cliques)
- example2: two triangles joined by a bridge, one forceful link
- hub-cycle: a hub clique with clusters arranged on a cycle, realized
  from explicit symmetric weights
- regular: random regular graph (expander-like family)
- random, random-bridged: randomized fixtures for identity checks

Used by: cli (generate), experiments, tests
Related: src/network_model.py (validation of generated networks)
"""

from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from src.models import AnalysisError, SocialNetwork

ForcefulSpec = Tuple[int, int, float]

# Example 2 fixture: self-weight chosen by calibration against the target
# consensus distributions (see experiments.calibrate_example2).
EXAMPLE2_EPSILON = 0.1
EXAMPLE2_ALPHA = 0.5
EXAMPLE2_LINKS = {
    "a": (3, 2),  # agent 2 (left cluster) influences agent 3 across the bridge
    "b": (0, 1),  # agent 1 influences agent 0 inside the left cluster
}


class BadParams(AnalysisError):
    """Raised when generator parameters are outside their valid range."""
    pass


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise BadParams(message)


def from_graph(
    graph: nx.Graph,
    epsilon: float = 0.5,
    forceful: Optional[Iterable[ForcefulSpec]] = None
) -> SocialNetwork:
    """
    Turn an undirected graph into a network with p_ij = 1/deg(i).

    Nodes must be labelled 0..n-1.

    Raises:
        BadParams: Isolated nodes, bad labels, epsilon outside (0, 1/2] or bad
            forceful specs
    """
    n = graph.number_of_nodes()
    _require(n >= 2, f"graph needs at least 2 nodes, got {n}")
    _require(set(graph.nodes()) == set(range(n)), "graph nodes must be labelled 0..n-1")
    _require(0.0 < epsilon <= 0.5, f"epsilon must be in (0, 1/2], got {epsilon}")
    meeting = np.zeros((n, n))
    for i in range(n):
        neighbours = [j for j in graph.neighbors(i) if j != i]
        _require(len(neighbours) > 0, f"agent {i} has no neighbours")
        meeting[i, neighbours] = 1.0 / len(neighbours)
    support = meeting > 0
    network = SocialNetwork(
        n=n,
        epsilon=epsilon,
        meeting=meeting,
        alpha=np.zeros((n, n)),
        beta=support.astype(float),
        gamma=np.zeros((n, n)),
    )
    return with_forceful(network, forceful or [])


def with_forceful(network: SocialNetwork, links: Iterable[ForcefulSpec]) -> SocialNetwork:
    """
    Return a copy of `network` where agent j influences agent i with probability alpha.

    Args:
        network: Base network
        links: (i, j, alpha) triples; i is influenced, j is forceful

    Raises:
        BadParams: Non-meeting pair or alpha outside (0, 1 - gamma_ij]
    """
    alpha = network.alpha.copy()
    beta = network.beta.copy()
    for i, j, a in links:
        _require(0 <= i < network.n and 0 <= j < network.n, f"forceful link ({i},{j}) out of range")
        _require(network.meeting[i, j] > 0, f"forceful link ({i},{j}) needs p_ij > 0")
        g = network.gamma[i, j]
        _require(0.0 < a <= 1.0 - g, f"alpha for ({i},{j}) must be in (0, {1.0 - g}], got {a}")
        alpha[i, j] = a
        beta[i, j] = 1.0 - a - g
    return SocialNetwork(
        n=network.n,
        epsilon=network.epsilon,
        meeting=network.meeting,
        alpha=alpha,
        beta=beta,
        gamma=network.gamma,
    )


def complete(n: int, epsilon: float = 0.5, forceful=None) -> SocialNetwork:
    _require(n >= 2, f"complete needs n >= 2, got {n}")
    return from_graph(nx.complete_graph(n), epsilon, forceful)


def ring(n: int, epsilon: float = 0.5, forceful=None) -> SocialNetwork:
    _require(n >= 3, f"ring needs n >= 3, got {n}")
    return from_graph(nx.cycle_graph(n), epsilon, forceful)


def path(n: int, epsilon: float = 0.5, forceful=None) -> SocialNetwork:
    _require(n >= 2, f"path needs n >= 2, got {n}")
    return from_graph(nx.path_graph(n), epsilon, forceful)


def barbell_graph(n1: int, n2: int) -> nx.Graph:
    """
    Two K_{n1} bells joined through a path of n2 nodes.

    Left bell is 0..n1-1 (attached at n1-1), the path is n1..n1+n2-1 and
    the right bell starts at n1+n2 (its attachment node).
    """
    _require(n1 >= 2, f"barbell needs n1 >= 2, got {n1}")
    _require(n2 >= 0, f"barbell needs n2 >= 0, got {n2}")
    return nx.barbell_graph(n1, n2)


def barbell(n1: int, n2: int, epsilon: float = 0.5, forceful=None) -> SocialNetwork:
    return from_graph(barbell_graph(n1, n2), epsilon, forceful)


def bridged_clusters_graph(sizes: Sequence[int]) -> nx.Graph:
    """Cliques in a chain; the last node of each clique links to the first node of the next."""
    _require(len(sizes) >= 2, f"bridged clusters need at least 2 clusters, got {len(sizes)}")
    _require(all(s >= 2 for s in sizes), f"cluster sizes must be >= 2, got {list(sizes)}")
    graph = nx.Graph()
    start = 0
    for idx, size in enumerate(sizes):
        members = range(start, start + size)
        graph.add_nodes_from(members)
        graph.add_edges_from((u, v) for u in members for v in members if u < v)
        if idx > 0:
            graph.add_edge(start - 1, start)
        start += size
    return graph


def bridged_clusters(sizes: Sequence[int], epsilon: float = 0.5, forceful=None) -> SocialNetwork:
    return from_graph(bridged_clusters_graph(sizes), epsilon, forceful)


def example2(case: str, epsilon: float = EXAMPLE2_EPSILON, reverse: bool = False,
             alpha: float = EXAMPLE2_ALPHA) -> SocialNetwork:
    """
    Two triangles {0,1,2} and {3,4,5} bridged by {2,3}, one forceful link.

    Case "a" puts the forceful link over the bridge (2 influences 3);
    case "b" keeps it inside the left triangle (1 influences 0).
    reverse=True swaps which endpoint is forceful.
    """
    _require(case in EXAMPLE2_LINKS, f"example2 case must be 'a' or 'b', got {case!r}")
    i, j = EXAMPLE2_LINKS[case]
    if reverse:
        i, j = j, i
    return bridged_clusters((3, 3), epsilon, [(i, j, alpha)])


def from_symmetric_weights(weights: np.ndarray, epsilon: float = 0.5) -> SocialNetwork:
    """
    Realize a symmetric weight matrix as a network whose T is proportional to it.

    With s_i = sum_{j != i} w_ij and c = 1/(n max_i s_i), the network uses
    p_ij = w_ij/s_i and beta_ij = n c s_i (gamma = 1 - beta), so that
    T_ij = c w_ij off the diagonal. Diagonal weights are ignored.

    Raises:
        BadParams: Asymmetric or negative weights, or an isolated node
    """
    W = np.array(weights, dtype=float)
    _require(W.ndim == 2 and W.shape[0] == W.shape[1] and W.shape[0] >= 2, "weights must be a square matrix with n >= 2")
    np.fill_diagonal(W, 0.0)
    _require(np.all(W >= 0), "weights must be nonnegative")
    _require(np.allclose(W, W.T, rtol=0, atol=1e-15), "weights must be symmetric")
    n = W.shape[0]
    s = W.sum(axis=1)
    _require(np.all(s > 0), "every node needs a positive weight")
    c = 1.0 / (n * s.max())
    meeting = W / s[:, None]
    support = meeting > 0
    beta = np.where(support, (n * c * s)[:, None], 0.0)
    gamma = np.where(support, 1.0 - beta, 0.0)
    return SocialNetwork(n=n, epsilon=epsilon, meeting=meeting, alpha=np.zeros((n, n)), beta=beta, gamma=gamma)


def hub_and_cycle_weights(
    k: int = 4,
    hub_size: int = 8,
    cluster_size: int = 2,
    h: float = 0.08,
    r: float = 0.06,
    hub_weight: float = 0.1,
    cluster_weight: float = 0.5
) -> np.ndarray:
    """
    Weights of a hub clique with k clique clusters arranged on a cycle.

    Hub nodes are 0..hub_size-1. Cluster c occupies the next cluster_size
    nodes; its first node attaches to hub node c (mod hub_size) with weight
    h and its last node links to the first node of cluster c+1 with weight r.
    """
    _require(k >= 3, f"hub-cycle needs k >= 3 clusters, got {k}")
    _require(hub_size >= 2 and cluster_size >= 1, "hub_size must be >= 2 and cluster_size >= 1")
    _require(min(h, r, hub_weight, cluster_weight) > 0, "all weights must be positive")
    n = hub_size + k * cluster_size
    W = np.zeros((n, n))
    W[:hub_size, :hub_size] = hub_weight
    first = [hub_size + c * cluster_size for c in range(k)]
    for c, start in enumerate(first):
        W[start:start + cluster_size, start:start + cluster_size] = cluster_weight
        hub_node = c % hub_size
        W[start, hub_node] = W[hub_node, start] = h
        last = start + cluster_size - 1
        nxt = first[(c + 1) % k]
        W[last, nxt] = W[nxt, last] = r
    np.fill_diagonal(W, 0.0)
    return W


def hub_and_cycle(epsilon: float = 0.5, **params) -> SocialNetwork:
    return from_symmetric_weights(hub_and_cycle_weights(**params), epsilon)


def regular_graph(n: int, degree: int, seed: int = 0, attempts: int = 100) -> nx.Graph:
    """Connected random regular graph; retries with successive seeds."""
    _require(n > degree >= 2 and (n * degree) % 2 == 0, f"no {degree}-regular graph on {n} nodes")
    for attempt in range(attempts):
        graph = nx.random_regular_graph(degree, n, seed=seed + attempt)
        if nx.is_connected(graph):
            return graph
    raise BadParams(f"no connected {degree}-regular graph on {n} nodes after {attempts} attempts")


def regular(n: int, degree: int = 6, seed: int = 0, epsilon: float = 0.5, forceful=None) -> SocialNetwork:
    return from_graph(regular_graph(n, degree, seed), epsilon, forceful)


def _random_connected_edges(nodes: List[int], rng: np.random.Generator, edge_prob: float) -> List[Tuple[int, int]]:
    order = list(rng.permutation(nodes))
    edges = set()
    for idx in range(1, len(order)):
        u, v = int(order[idx]), int(order[rng.integers(idx)])
        edges.add((min(u, v), max(u, v)))
    for a in range(len(nodes)):
        for b in range(a + 1, len(nodes)):
            if rng.random() < edge_prob:
                edges.add((nodes[a], nodes[b]))
    return sorted(edges)


def _randomized(n: int, edges: List[Tuple[int, int]], rng: np.random.Generator, epsilon: Optional[float]) -> SocialNetwork:
    meeting = np.zeros((n, n))
    for u, v in edges:
        meeting[u, v] = rng.uniform(0.2, 1.0)
        meeting[v, u] = rng.uniform(0.2, 1.0)
    meeting /= meeting.sum(axis=1, keepdims=True)
    support = meeting > 0
    gamma = np.where(support, rng.uniform(0.0, 0.3, size=(n, n)), 0.0)
    beta = np.where(support, 1.0 - gamma, 0.0)
    eps = float(rng.uniform(0.05, 0.5)) if epsilon is None else epsilon
    return SocialNetwork(n=n, epsilon=eps, meeting=meeting, alpha=np.zeros((n, n)), beta=beta, gamma=gamma)


def _random_alpha(network: SocialNetwork, i: int, j: int, rng: np.random.Generator) -> ForcefulSpec:
    return (i, j, float(rng.uniform(0.1, 1.0 - network.gamma[i, j])))


def random_network(
    n: int,
    seed: int = 0,
    forceful_pairs: int = 1,
    edge_prob: float = 0.4,
    epsilon: Optional[float] = None
) -> SocialNetwork:
    """
    Random strongly connected network with disjoint forceful edges.

    Forceful edges are drawn from a random matching of the support graph;
    each gets one direction, and with probability 1/4 both directions.
    """
    _require(n >= 2, f"random needs n >= 2, got {n}")
    _require(0.0 <= edge_prob <= 1.0, f"edge_prob must be in [0, 1], got {edge_prob}")
    _require(forceful_pairs >= 0, f"forceful_pairs must be >= 0, got {forceful_pairs}")
    rng = np.random.default_rng(seed)
    edges = _random_connected_edges(list(range(n)), rng, edge_prob)
    network = _randomized(n, edges, rng, epsilon)

    used = set()
    links = []
    for idx in rng.permutation(len(edges)):
        if len(links) >= forceful_pairs:
            break
        u, v = edges[idx]
        if u in used or v in used:
            continue
        used.update((u, v))
        i, j = (u, v) if rng.random() < 0.5 else (v, u)
        links.append(_random_alpha(network, i, j, rng))
        if rng.random() < 0.25:
            links.append(_random_alpha(network, j, i, rng))
    network = with_forceful(network, links)
    return network


def random_bridged(n_left: int, n_right: int, seed: int = 0, epsilon: Optional[float] = None) -> SocialNetwork:
    """
    Two random connected clusters joined by one bridge carrying one forceful link.

    Exactly one ordered pair is forceful, so the essential-edge closed form
    applies.
    """
    _require(n_left >= 2 and n_right >= 2, f"cluster sizes must be >= 2, got ({n_left}, {n_right})")
    rng = np.random.default_rng(seed)
    n = n_left + n_right
    left = list(range(n_left))
    right = list(range(n_left, n))
    edges = _random_connected_edges(left, rng, 0.5) + _random_connected_edges(right, rng, 0.5)
    u, v = int(rng.choice(left)), int(rng.choice(right))
    edges.append((u, v))
    network = _randomized(n, sorted(edges), rng, epsilon)
    i, j = (u, v) if rng.random() < 0.5 else (v, u)
    return with_forceful(network, [_random_alpha(network, i, j, rng)])


GENERATORS: Dict[str, Callable[..., SocialNetwork]] = {
    "complete": complete,
    "ring": ring,
    "path": path,
    "barbell": barbell,
    "bridged": bridged_clusters,
    "example2": example2,
    "hub-cycle": hub_and_cycle,
    "regular": regular,
    "random": random_network,
    "random-bridged": random_bridged,
}


def generate(kind: str, **params) -> SocialNetwork:
    """
    Build a network of the named kind.

    Example:
        >>> generate("barbell", n1=3, n2=0).n
        6

    Raises:
        BadParams: Unknown kind or invalid parameters
    """
    if kind not in GENERATORS:
        raise BadParams(f"unknown generator kind {kind!r}; choose from {sorted(GENERATORS)}")
    try:
        return GENERATORS[kind](**params)
    except TypeError as e:
        raise BadParams(f"bad parameters for {kind}: {e}")
    except nx.NetworkXError as e:
        raise BadParams(f"{kind}: {e}")
