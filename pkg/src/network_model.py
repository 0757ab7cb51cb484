"""
Social network validation, meeting digraph and JSON persistence.

A network is usable by the analytics only when its standing assumptions
hold: no self-meetings, stochastic meeting rows, consistent interaction
probabilities with alpha + beta > 0 on every link, epsilon in (0, 1/2],
and a strongly connected meeting digraph. validate() never aborts; it
lists every violation with the offending indices.

Used by: generators, analysis_report, cli
Related:
- src/models.py: SocialNetwork, ValidationReport, MeetingDigraph
- src/generators.py: example topologies
"""

import json
from pathlib import Path
from typing import List, Union

import networkx as nx
import numpy as np

from src.models import (
    AnalysisError,
    ForcefulLink,
    INTERACTION_TOLERANCE,
    MeetingDigraph,
    SocialNetwork,
    ValidationReport,
    Violation,
)

ROW_SUM_TOLERANCE = 1e-12


class ParseError(AnalysisError):
    """Raised when a network file cannot be read or decoded."""
    pass


class NetworkValidationError(AnalysisError):
    """Raised by strict loading when a network breaks its assumptions."""

    def __init__(self, report: ValidationReport):
        self.report = report
        super().__init__("; ".join(report.messages()))


class NotStronglyConnected(AnalysisError):
    """Raised when some agent cannot reach another along meeting links."""
    pass


def _digraph(network: SocialNetwork) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(range(network.n))
    graph.add_edges_from((i, j) for i, j in network.edges() if i != j)
    return graph


def validate(network: SocialNetwork) -> ValidationReport:
    """
    Check every modelling assumption and report all violations.

    Args:
        network: The network to check

    Returns:
        ValidationReport; empty (ok) when all assumptions hold

    Example:
        >>> validate(generate("complete", n=4)).ok
        True
    """
    report = ValidationReport()
    add = report.violations.append
    P = network.meeting

    if not 0.0 < network.epsilon <= 0.5:
        add(Violation("bad_epsilon", f"epsilon must be in (0, 1/2], got {network.epsilon}"))

    for i in range(network.n):
        if P[i, i] != 0.0:
            add(Violation("self_meeting", f"self-meeting at agent {i}", (i,)))

    for i, j in zip(*np.nonzero(P < 0)):
        add(Violation("negative_probability", f"negative meeting probability p[{i},{j}] = {P[i, j]}", (int(i), int(j))))

    row_sums = P.sum(axis=1)
    for i in np.flatnonzero(np.abs(row_sums - 1.0) > ROW_SUM_TOLERANCE):
        add(Violation("row_sum", f"meeting row {i} sums to {row_sums[i]!r}, expected 1", (int(i),)))

    for i, j in network.edges():
        a, b, g = network.alpha[i, j], network.beta[i, j], network.gamma[i, j]
        if min(a, b, g) < 0:
            add(Violation("negative_interaction", f"negative interaction probability on ({i},{j})", (i, j)))
        if abs(a + b + g - 1.0) > INTERACTION_TOLERANCE:
            add(Violation("interaction_sum", f"alpha + beta + gamma = {a + b + g!r} on ({i},{j})", (i, j)))
        if a + b <= 0:
            add(Violation("no_exchange", f"alpha + beta = 0 on link ({i},{j})", (i, j)))

    if not nx.is_strongly_connected(_digraph(network)):
        add(Violation("not_strongly_connected", "not strongly connected"))

    return report


def meeting_digraph(network: SocialNetwork) -> MeetingDigraph:
    """
    Build the directed meeting graph with all-pairs BFS distances.

    Raises:
        NotStronglyConnected: If some ordered pair has no directed path
    """
    graph = _digraph(network)
    if not nx.is_strongly_connected(graph):
        raise NotStronglyConnected("meeting digraph is not strongly connected")

    distances = np.zeros((network.n, network.n), dtype=int)
    for source, lengths in nx.all_pairs_shortest_path_length(graph):
        for target, length in lengths.items():
            distances[source, target] = length
    distances.setflags(write=False)
    return MeetingDigraph(
        n=network.n,
        links=tuple(sorted(graph.edges())),
        distances=distances,
        diameter=int(distances.max()),
    )


def forceful_links(network: SocialNetwork) -> List[ForcefulLink]:
    """All directed influence links, ordered by (target, source)."""
    links = []
    for i, j in network.edges():
        if network.alpha[i, j] > 0:
            links.append(ForcefulLink(source=j, target=i, strength=float(network.meeting[i, j] * network.alpha[i, j])))
    return links


def total_influence(network: SocialNetwork) -> float:
    """Sum of p_ij * alpha_ij over all ordered pairs."""
    return float(np.sum(network.meeting * network.alpha * network.support))


def simple_graph(network: SocialNetwork) -> nx.Graph:
    """Undirected support graph: {i, j} present when either agent meets the other."""
    graph = nx.Graph()
    graph.add_nodes_from(range(network.n))
    graph.add_edges_from((i, j) for i, j in network.edges() if i != j)
    return graph


def load(path: Union[str, Path], strict: bool = False) -> SocialNetwork:
    """
    Load a network from its JSON document.

    Args:
        path: File holding {n, epsilon, edges: [{i, j, p, alpha, beta, gamma}]}
        strict: Also run validate() and refuse networks that break assumptions

    Raises:
        ParseError: Unreadable file, malformed JSON or malformed fields,
            with line or field context in the message
        NetworkValidationError: strict=True and validation failed
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ParseError(f"{path}: cannot read network file ({e.strerror or e})")
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}:{e.lineno}:{e.colno}: {e.msg}")
    try:
        network = SocialNetwork.from_dict(document)
    except ValueError as e:
        raise ParseError(f"{path}: {e}")

    if strict:
        report = validate(network)
        if not report.ok:
            raise NetworkValidationError(report)
    return network


def save(network: SocialNetwork, path: Union[str, Path]) -> Path:
    """Write a network as JSON; floats are written with round-trip precision."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(network.to_dict(), indent=2) + "\n")
    return path
