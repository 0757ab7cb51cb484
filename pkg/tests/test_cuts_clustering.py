import itertools
import math

import numpy as np
import pytest

from src.cuts_clustering import (
    Disconnected,
    SubgraphDisconnected,
    TooLargeForExact,
    WeightedGraph,
    cluster_bound,
    commute_bound_global,
    commute_bound_normalized,
    commute_bound_subgraph,
    commute_bounds_relative,
    cut_edges,
    cut_value,
    min_normalized_cut,
    min_normalized_relative_cut,
    min_relative_cut,
    normalized_cut_value,
    restrict,
    subgraph_commute_inequality,
)
from src.generators import barbell, hub_and_cycle, random_network, ring
from src.influence_analysis import essential_edge_excess
from src.markov_analysis import commute_time_electrical


def _subsets(n, containing, excluding=None):
    others = [v for v in range(n) if v != containing and v != excluding]
    for r in range(len(others) + 1):
        for extra in itertools.combinations(others, r):
            side = (containing,) + extra
            if len(side) < n:
                yield side


def _graph(network):
    return WeightedGraph.from_network(network)


def test_dyad_cuts(forceful_dyad):
    graph = _graph(forceful_dyad)
    assert cut_value(graph, [0]) == pytest.approx(0.5)
    assert normalized_cut_value(graph, [0]) == pytest.approx(1.0)
    cut = min_normalized_cut(graph)
    assert cut.side == (0,)
    assert cut.normalized == pytest.approx(1.0)
    assert cut.certified


def test_t_graph_normalization(example2a):
    graph = _graph(example2a)
    side = [0, 1, 2]
    assert graph.total == pytest.approx(6.0)
    assert normalized_cut_value(graph, side) == pytest.approx(6 * cut_value(graph, side) / 9)


def test_weighted_graph_rejects_asymmetric():
    with pytest.raises(ValueError, match="symmetric"):
        WeightedGraph.from_matrix([[0.0, 1.0], [0.5, 0.0]])


def test_cut_side_must_be_proper(example2a):
    with pytest.raises(ValueError):
        cut_value(_graph(example2a), range(6))


def test_bridge_relative_cut():
    graph = _graph(barbell(3, 0))
    cut = min_relative_cut(graph, 2, 3)
    assert cut.value == pytest.approx(1 / 18)
    assert cut.side == (0, 1, 2)
    assert cut.mode == "maxflow"


def test_relative_cut_matches_enumeration(random_networks):
    for network in random_networks[:15]:
        graph = _graph(network)
        a, b = 0, network.n - 1
        brute = min(cut_value(graph, side) for side in _subsets(network.n, a, b))
        assert min_relative_cut(graph, a, b).value == pytest.approx(brute, rel=1e-9)


def test_normalized_cut_matches_enumeration(random_networks):
    for network in random_networks[:15]:
        graph = _graph(network)
        brute = min(normalized_cut_value(graph, side) for side in _subsets(network.n, 0))
        cut = min_normalized_cut(graph, "exact")
        assert cut.normalized == pytest.approx(brute, rel=1e-12)
        assert 0 in cut.side


def test_normalized_relative_cut_matches_enumeration(random_networks):
    for network in random_networks[:15]:
        graph = _graph(network)
        a, b = network.n - 1, 0
        brute = min(normalized_cut_value(graph, side) for side in _subsets(network.n, a, b))
        cut = min_normalized_relative_cut(graph, a, b, "exact")
        assert cut.normalized == pytest.approx(brute, rel=1e-12)
        assert a in cut.side and b not in cut.side
        assert cut.normalized >= min_normalized_cut(graph, "exact").normalized - 1e-15


def test_ties_prefer_smaller_side():
    # Every node of a triangle gives the same cut; the canonical answer is {0}.
    graph = _graph(ring(3))
    assert min_normalized_cut(graph, "exact").side == (0,)


def test_heuristic_is_upper_bound(random_networks):
    for network in random_networks[:15]:
        graph = _graph(network)
        heuristic = min_normalized_cut(graph, "heuristic")
        assert not heuristic.certified
        assert heuristic.normalized >= min_normalized_cut(graph, "exact").normalized * (1 - 1e-12)
        relative = min_normalized_relative_cut(graph, 0, network.n - 1, "heuristic")
        assert 0 in relative.side and network.n - 1 not in relative.side


def test_auto_mode_respects_limit(example2a):
    graph = _graph(example2a)
    assert min_normalized_cut(graph, "auto").mode == "exact"
    assert min_normalized_cut(graph, "auto", limit=4).mode == "heuristic"
    with pytest.raises(TooLargeForExact):
        min_normalized_cut(graph, "exact", limit=4)
    with pytest.raises(ValueError, match="cut mode"):
        min_normalized_cut(graph, "fast")


def test_disconnected_graph_rejected():
    W = np.zeros((4, 4))
    W[0, 1] = W[1, 0] = W[2, 3] = W[3, 2] = 0.5
    graph = WeightedGraph.from_matrix(W)
    with pytest.raises(Disconnected):
        min_normalized_cut(graph)
    with pytest.raises(Disconnected):
        min_relative_cut(graph, 0, 3)


def test_relative_sandwich_needs_unit_totals():
    graph = WeightedGraph.from_matrix([[0.0, 2.0], [2.0, 0.0]])
    with pytest.raises(ValueError, match="unit node totals"):
        commute_bounds_relative(graph, 0, 1)


def test_normalized_bound_on_ring(ring6):
    graph = _graph(ring6)
    T = graph.weights
    for a, b in itertools.combinations(range(6), 2):
        rho_ab = min_normalized_relative_cut(graph, a, b, "exact")
        bound = commute_bound_normalized(graph, a, b, rho_ab)
        assert bound.value >= commute_time_electrical(T, a, b)
        assert bound.certified


def test_global_bound_on_ring(ring6):
    graph = _graph(ring6)
    bound = commute_bound_global(graph, min_normalized_cut(graph, "exact"))
    worst = max(commute_time_electrical(graph.weights, a, b) for a, b in itertools.combinations(range(6), 2))
    assert bound.value >= worst


def test_dyad_normalized_bound(forceful_dyad):
    graph = _graph(forceful_dyad)
    bound = commute_bound_normalized(graph, 0, 1, min_normalized_relative_cut(graph, 0, 1))
    assert bound.value == pytest.approx(6 * math.log(2))


def test_restrict_preserves_totals():
    graph = _graph(barbell(3, 0))
    restriction = restrict(graph, [3, 4, 5])
    np.testing.assert_allclose(restriction.graph.degrees, 1.0)
    assert restriction.nodes == (3, 4, 5)
    assert restriction.local(4) == 1
    assert restriction.to_parent([0, 2]) == (3, 5)
    with pytest.raises(ValueError):
        restriction.local(0)


def test_restrict_rejects_disconnected_subset():
    with pytest.raises(SubgraphDisconnected):
        restrict(_graph(barbell(3, 0)), [0, 5])
    with pytest.raises(ValueError):
        restrict(_graph(barbell(3, 0)), [0])


def test_subgraph_bound_on_full_set_is_whole_graph_bound(example2a):
    graph = _graph(example2a)
    whole = commute_bound_normalized(graph, 0, 5, min_normalized_relative_cut(graph, 0, 5, "exact"))
    sub = commute_bound_subgraph(graph, 0, 5, range(6), "exact")
    assert sub.value == pytest.approx(whole.value, rel=1e-12)


def test_subgraph_commute_inequality(bridged_networks):
    for network in bridged_networks:
        graph = _graph(network)
        psi = np.array(essential_edge_excess(network).details["psi"])
        side = [int(v) for v in np.flatnonzero(psi < 0)]
        result = subgraph_commute_inequality(graph, side[0], side[-1], side)
        assert result["holds"], result


def test_cut_edges():
    graph = _graph(barbell(3, 0))
    assert cut_edges(graph, [0, 1, 2]) == {(2, 3)}
    assert cut_edges(graph, [0], within=[0, 1, 2]) == {(0, 1), (0, 2)}


def test_barbell_cluster_trace():
    graph = _graph(barbell(4, 2))
    trace = cluster_bound(graph, 0, 1, "exact")
    assert [it.nodes for it in trace.iterations] == [tuple(range(10)), (0, 1, 2, 3), (0, 1, 2)]
    assert [it.side for it in trace.iterations] == [(0, 1, 2, 3), (0, 1, 2), (0,)]
    assert trace.iterations[0].rho == pytest.approx(0.015625)
    assert trace.iterations[1].rho == pytest.approx(0.35 / 3)
    assert trace.iterations[2].rho == pytest.approx(0.1)
    assert trace.final.separates
    assert trace.final_bound == pytest.approx(30 * math.log(3) / 0.1)
    assert trace.initial_bound == pytest.approx(30 * math.log(10) / 0.015625)
    assert trace.final_bound < trace.initial_bound
    assert trace.certified


def test_barbell_disjoint_cuts_increase_rho():
    trace = cluster_bound(_graph(barbell(4, 2)), 0, 1, "exact")
    first, second, last = trace.iterations
    assert first.disjoint_with_next is True
    assert first.increase_holds is True
    assert second.disjoint_with_next is False
    assert second.increase_holds is None
    assert last.disjoint_with_next is None
    for it in trace.iterations:
        if it.disjoint_with_next:
            assert it.increase_holds


def test_trace_bound_covers_commute_time():
    graph = _graph(barbell(4, 2))
    trace = cluster_bound(graph, 0, 1)
    assert trace.final_bound >= commute_time_electrical(graph.weights, 0, 1)


def test_hub_and_cycle_rho_can_drop():
    graph = _graph(hub_and_cycle())
    trace = cluster_bound(graph, 8, 12, "exact")
    assert trace.iterations[0].nodes == tuple(range(16))
    assert trace.iterations[0].side == tuple(range(8, 16))
    assert trace.iterations[1].rho < trace.iterations[0].rho
    assert trace.final.separates
    assert trace.iterations[0].increase_holds is None


def test_trace_reports_progress(capsys):
    cluster_bound(_graph(barbell(3, 0)), 0, 5, verbose=True)
    err = capsys.readouterr().err
    assert "[1]" in err
    assert "✓ cluster bound" in err


def test_trace_serializes():
    data = cluster_bound(_graph(random_network(7, seed=4)), 0, 6).to_dict()
    assert set(data) == {"a", "b", "n", "iterations", "final_bound", "initial_bound", "certified"}
    assert data["iterations"][-1]["separates"] is True


def _connected_sets(graph, a, b):
    others = [v for v in range(graph.n) if v not in (a, b)]
    for r in range(len(others) + 1):
        for extra in itertools.combinations(others, r):
            nodes = (a, b) + extra
            try:
                restrict(graph, nodes)
            except SubgraphDisconnected:
                continue
            yield nodes


@pytest.mark.slow
def test_subgraph_bound_holds_on_random_networks(random_networks):
    instances = [network for network in random_networks if network.n >= 4][:50]
    for network in instances:
        graph = _graph(network)
        a, b = 0, network.n - 1
        actual = commute_time_electrical(graph.weights, a, b)
        for nodes in _connected_sets(graph, a, b):
            bound = commute_bound_subgraph(graph, a, b, nodes, "exact")
            assert bound.certified
            assert bound.value >= actual * (1 - 1e-9), (nodes, bound.value, actual)


@pytest.mark.parametrize("a,b", [(0, 1), (0, 2)])
def test_subgraph_bound_tighter_inside_a_bell(a, b):
    graph = _graph(barbell(3, 0))
    sub = commute_bound_subgraph(graph, a, b, (0, 1, 2), "exact")
    whole = commute_bound_normalized(graph, a, b, min_normalized_relative_cut(graph, a, b, "exact"))
    assert sub.value < whole.value
    assert sub.value >= commute_time_electrical(graph.weights, a, b)


def test_normalized_bound_below_global_bound(random_networks):
    for network in [network for network in random_networks if network.n >= 4][:50]:
        graph = _graph(network)
        rho = min_normalized_cut(graph, "exact")
        ceiling = commute_bound_global(graph, rho).value
        for b in range(1, network.n):
            pair = commute_bound_normalized(graph, 0, b, min_normalized_relative_cut(graph, 0, b, "exact"))
            assert pair.value <= ceiling * (1 + 1e-12)


def test_heuristic_relative_cut_never_beats_exact(random_networks):
    for network in [network for network in random_networks if network.n >= 4][:50]:
        graph = _graph(network)
        for b in range(1, network.n):
            heuristic = min_normalized_relative_cut(graph, 0, b, "heuristic")
            exact = min_normalized_relative_cut(graph, 0, b, "exact")
            assert heuristic.normalized >= exact.normalized * (1 - 1e-12)
