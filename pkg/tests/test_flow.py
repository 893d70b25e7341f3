import pytest

from monorelabel.flow import (
    ResidualNetwork,
    antichain_from_cut,
    build_flow_graph,
    kept_vertices,
    max_isotonic_set,
    minimum_flow,
)
from monorelabel.model import instance_from_ranks, instance_from_values
from monorelabel.oracle import brute_max_isotonic_set
from monorelabel.violator import build_violator_dag


def _is_f_isotonic(instance, kept):
    graph_pairs = set()
    for u in kept:
        stack, seen = list(instance.successors[u]), set()
        while stack:
            v = stack.pop()
            if v not in seen:
                seen.add(v)
                stack.extend(instance.successors[v])
        graph_pairs |= {(u, v) for v in seen}
    f = instance.values
    return all(f[u] <= f[v] for u, v in graph_pairs if v in kept)


def test_max_flow_small_network():
    net = ResidualNetwork(4)
    net.add_arc(0, 1, cap=3)
    net.add_arc(0, 2, cap=2)
    net.add_arc(1, 2, cap=1)
    net.add_arc(1, 3, cap=2)
    net.add_arc(2, 3, cap=3)
    assert net.max_flow(0, 3) == 5
    assert net.reachable_from(0) == [True, False, False, False]


def test_network_of_a_single_pair():
    network = build_flow_graph(build_violator_dag(instance_from_ranks([2, 1])))
    assert network.n_nodes == 6
    assert len(network.arcs) == 5
    unit = network.arcs[network.unit_arcs[0]]
    assert unit[2] == 1


def test_empty_violator_dag():
    network = build_flow_graph(build_violator_dag(instance_from_values([1, 2, 3])))
    assert network.n_nodes == 2
    assert network.arcs == []
    assert minimum_flow(network) == 0


def test_half_swap_network():
    network = build_flow_graph(build_violator_dag(instance_from_ranks([3, 4, 1, 2])))
    assert network.n_nodes == 10
    assert len(network.arcs) == 12
    assert len(network.unit_arcs) == 4
    assert len(network.edge_arcs) == 4
    assert len(network.source_arcs) + len(network.sink_arcs) == 4
    for u, v in network.edge_arcs:
        tail, head, lower, _, _ = network.arcs[network.edge_arcs[(u, v)]]
        assert (tail, head, lower) == (network.node_out[u], network.node_in[v], 0)


@pytest.mark.parametrize("values, expected", [
    ([2, 1], 1),
    ([2, 1, 4, 3, 6, 5], 3),
    ([3, 4, 1, 2], 2),
])
def test_minimum_flow_is_the_antichain_size(values, expected):
    network = build_flow_graph(build_violator_dag(instance_from_values(values)))
    assert minimum_flow(network) == expected
    assert len(antichain_from_cut(network)) == expected
    for tail, head, lower, cap, flow in network.arcs:
        assert lower <= flow <= cap


def test_no_required_vertices_gives_zero_flow():
    vdag = build_violator_dag(instance_from_values([2, 1, 4, 3]))
    network = build_flow_graph(vdag, required=[False] * 4)
    assert minimum_flow(network) == 0
    assert antichain_from_cut(network) == ()


def test_max_isotonic_set_examples():
    instance = instance_from_values([2, 2, 2, 0, 0, 1, 1])
    assert max_isotonic_set(instance) == (3, 4, 5, 6)

    instance = instance_from_values([0, 3, 1, -1, -2, -3, -4, 2])
    assert max_isotonic_set(instance) == (0, 2, 7)

    assert max_isotonic_set(instance_from_values([0, 1, 1, 4])) == ()


def test_kept_vertices_adds_non_violators():
    instance = instance_from_values([0, 2, 1, 5])
    vdag = build_violator_dag(instance)
    chosen = max_isotonic_set(instance, vdag)
    assert len(chosen) == 1
    assert kept_vertices(instance, vdag, chosen) == tuple(sorted({0, 3, *chosen}))


def test_required_mask_restricts_the_choice():
    instance = instance_from_values([2, 1, 4, 3])
    vdag = build_violator_dag(instance)
    chosen = max_isotonic_set(instance, vdag, required=[False, True, True, False])
    assert chosen == (1, 2)


@pytest.mark.parametrize("seed", range(1000))
def test_matches_brute_force(seed, linear_values, dag_values, point_values):
    for instance in (linear_values(seed, n=9), dag_values(seed, n=9), point_values(seed, n=8)):
        vdag = build_violator_dag(instance)
        kept = kept_vertices(instance, vdag, max_isotonic_set(instance, vdag))
        size, witnesses = brute_max_isotonic_set(instance)
        assert len(kept) == size
        assert kept in witnesses
        assert _is_f_isotonic(instance, set(kept))


@pytest.mark.parametrize("seed", range(1000))
def test_closure_and_reduction_need_the_same_flow(seed, linear_values, dag_values, point_values):
    for instance in (linear_values(seed, n=9), dag_values(seed, n=9), point_values(seed, n=8)):
        reduced = build_flow_graph(build_violator_dag(instance))
        closed = build_flow_graph(build_violator_dag(instance, reduce=False))
        assert minimum_flow(reduced) == minimum_flow(closed)
