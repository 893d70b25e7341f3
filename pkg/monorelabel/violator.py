"""
Violator dags: the vertices that take part in some violating pair, with edges
whose reachability is the violating-pair order (u before v and f(u) > f(v)).

Three builders cover the order kinds. Explicit dags use a per-vertex
descendant search (the closure), point sets a pairwise dominance scan, and
linear orders a direct sweep that emits the transitive reduction.
"""
import logging
from dataclasses import dataclass
from functools import cached_property

import networkx as nx
import numpy as np

from monorelabel.model import DAG, LINEAR, POINTS, Instance, ObjectiveOrderError, dominance_matrix, order_graph

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ViolatorDag:
    n: int
    vertices: tuple
    edges: tuple
    closure: bool

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def successors(self) -> dict:
        out = {v: [] for v in self.vertices}
        for u, v in self.edges:
            out[u].append(v)
        return out

    @cached_property
    def predecessors(self) -> dict:
        inc = {v: [] for v in self.vertices}
        for u, v in self.edges:
            inc[v].append(u)
        return inc

    def graph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.vertices)
        graph.add_edges_from(self.edges)
        return graph


def _from_edges(n: int, edges, closure: bool) -> ViolatorDag:
    edges = tuple(sorted(edges))
    vertices = tuple(sorted({u for u, _ in edges} | {v for _, v in edges}))
    return ViolatorDag(n=n, vertices=vertices, edges=edges, closure=closure)


def violating_pairs_dag(instance: Instance) -> ViolatorDag:
    """Transitive closure of the violating-pair order by a search from every vertex."""
    if instance.kind not in (LINEAR, DAG):
        raise ObjectiveOrderError(f"violating_pairs_dag expects a linear order or dag, not {instance.kind}")
    graph = order_graph(instance)
    f = instance.ranks
    edges = []
    for u in instance.topo_order:
        edges.extend((u, v) for v in nx.descendants(graph, u) if f[u] > f[v])
    logger.debug("dag closure: %d violating pairs over %d vertices", len(edges), instance.n)
    return _from_edges(instance.n, edges, closure=True)


def violating_pairs_points(instance: Instance) -> ViolatorDag:
    """Edge (x, y) for every point y dominating x with f(x) > f(y); O(n^2) pair scan."""
    if instance.kind != POINTS:
        raise ObjectiveOrderError(f"violating_pairs_points expects points, not {instance.kind}")
    below = dominance_matrix(instance.order.coords)
    f = np.asarray(instance.ranks)
    violating = below & (f[:, None] > f[None, :])
    edges = [(int(u), int(v)) for u, v in np.argwhere(violating)]
    return _from_edges(instance.n, edges, closure=True)


def violating_pairs_linear(instance: Instance) -> ViolatorDag:
    """Reduction of the violating-pair order on a linear order.

    v is an immediate violator of u when f(v) < f(u) and no index between
    them has a value strictly inside (f(v), f(u)).
    """
    if instance.kind != LINEAR:
        raise ObjectiveOrderError(f"violating_pairs_linear expects a linear order, not {instance.kind}")
    f = np.asarray(instance.ranks)
    edges = []
    for u in range(instance.n - 1):
        tail = f[u + 1:]
        idx = np.flatnonzero(tail < f[u])
        if idx.size == 0:
            continue
        vals = tail[idx]
        seen = np.maximum.accumulate(vals)
        before = np.empty_like(seen)
        before[0] = vals[0]
        before[1:] = seen[:-1]
        for v in idx[vals >= before]:
            edges.append((u, u + 1 + int(v)))
    logger.debug("linear reduction: %d edges over %d indices", len(edges), instance.n)
    return _from_edges(instance.n, edges, closure=False)


def transitive_reduction(vdag: ViolatorDag) -> ViolatorDag:
    """Minimal edge set with the same reachability (unique for dags)."""
    reduced = nx.transitive_reduction(vdag.graph())
    return ViolatorDag(n=vdag.n, vertices=vdag.vertices, edges=tuple(sorted(reduced.edges())), closure=False)


def build_violator_dag(instance: Instance, reduce: bool = True) -> ViolatorDag:
    if instance.kind == LINEAR and reduce:
        return violating_pairs_linear(instance)
    if instance.kind == POINTS:
        vdag = violating_pairs_points(instance)
    else:
        vdag = violating_pairs_dag(instance)
    return transitive_reduction(vdag) if reduce else vdag
