import itertools

import networkx as nx
import pytest

from monorelabel.model import ObjectiveOrderError, OrderSpec, instance_from_ranks, instance_from_values, order_graph
from monorelabel.violator import (
    ViolatorDag,
    build_violator_dag,
    transitive_reduction,
    violating_pairs_dag,
    violating_pairs_linear,
    violating_pairs_points,
)


def _half_swap(n):
    half = n // 2
    return instance_from_ranks(list(range(half + 1, n + 1)) + list(range(1, half + 1)))


def _violating_pairs(instance):
    graph = order_graph(instance)
    f = instance.ranks
    return {(u, v) for u in range(instance.n) for v in nx.descendants(graph, u) if f[u] > f[v]}


def test_half_swap_closure_is_its_own_reduction():
    instance = _half_swap(4)
    closure = violating_pairs_dag(instance)
    assert closure.edges == ((0, 2), (0, 3), (1, 2), (1, 3))
    assert transitive_reduction(closure).edges == closure.edges
    assert violating_pairs_linear(instance).edges == closure.edges


@pytest.mark.parametrize("n", [4, 8, 16])
def test_half_swap_has_quadratic_edges(n):
    instance = _half_swap(n)
    closure = violating_pairs_dag(instance)
    assert closure.m == n * n // 4
    assert build_violator_dag(instance).edges == closure.edges


def test_isotonic_input_has_no_violators():
    vdag = build_violator_dag(instance_from_values([1, 1, 2, 5]))
    assert vdag.vertices == ()
    assert vdag.edges == ()


def test_pairs_family():
    vdag = violating_pairs_dag(instance_from_values([2, 1, 4, 3, 6, 5]))
    assert vdag.edges == ((0, 1), (2, 3), (4, 5))
    assert vdag.closure


def test_points():
    chain = instance_from_values([2, 1], OrderSpec.points([[1, 1], [2, 2]]))
    assert violating_pairs_points(chain).edges == ((0, 1),)
    antichain = instance_from_values([2, 1], OrderSpec.points([[1, 2], [2, 1]]))
    assert violating_pairs_points(antichain).edges == ()


def test_builders_reject_wrong_order_kind():
    points = instance_from_values([2, 1], OrderSpec.points([[1, 1], [2, 2]]))
    with pytest.raises(ObjectiveOrderError):
        violating_pairs_dag(points)
    with pytest.raises(ObjectiveOrderError):
        violating_pairs_linear(points)
    with pytest.raises(ObjectiveOrderError):
        violating_pairs_points(instance_from_values([2, 1]))


def test_reduction_of_a_chain_closure():
    closure = ViolatorDag(n=3, vertices=(0, 1, 2), edges=((0, 1), (0, 2), (1, 2)), closure=True)
    assert transitive_reduction(closure).edges == ((0, 1), (1, 2))


def test_linear_reduction_keeps_equal_values_apart():
    # 3 before both 1s: each is an immediate violator, the 1s are not related
    vdag = violating_pairs_linear(instance_from_values([3, 1, 1]))
    assert vdag.edges == ((0, 1), (0, 2))


@pytest.mark.parametrize("seed", range(1000))
def test_points_match_pairwise_loop(seed, point_values):
    instance = point_values(seed, n=5)
    coords, f = instance.order.coords, instance.ranks
    expected = {
        (u, v) for u, v in itertools.permutations(range(instance.n), 2)
        if coords[u] != coords[v] and all(a <= b for a, b in zip(coords[u], coords[v])) and f[u] > f[v]
    }
    assert set(violating_pairs_points(instance).edges) == expected


@pytest.mark.parametrize("seed", range(1000))
def test_reachability_is_the_violating_order(seed, linear_values, dag_values, point_values):
    for instance in (linear_values(seed, n=10), dag_values(seed, n=9), point_values(seed, n=8)):
        vdag = build_violator_dag(instance)
        graph = vdag.graph()
        expected = _violating_pairs(instance)
        reached = {(u, v) for u in vdag.vertices for v in nx.descendants(graph, u)}
        assert reached == expected
        assert set(vdag.vertices) == {v for pair in expected for v in pair}


@pytest.mark.parametrize("seed", range(1000))
def test_a_sequence_and_its_embedding_on_a_line_violate_alike(seed, linear_values):
    instance = linear_values(seed, n=10)
    line = instance_from_values(instance.values, OrderSpec.points([[k] for k in range(instance.n)]))
    assert violating_pairs_dag(instance).edges == violating_pairs_points(line).edges
