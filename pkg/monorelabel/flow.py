"""
Lower-bounded flow networks and the maximum f-isotonic set.

A violator dag becomes a network with split vertices: each violator vertex u
gets u_in -> u_out with lower bound 1 (0 when u is not required), every
violator edge (u, v) becomes u_out -> v_in, the source feeds the minimal
vertices and the maximal vertices drain into the sink. A minimum flow is a
minimum path cover of the required vertices, and the cut it leaves behind
picks out a maximum antichain of the violating-pair order.
"""
import logging
from collections import deque
from typing import Optional, Sequence

import networkx as nx

from monorelabel.model import Instance
from monorelabel.violator import ViolatorDag, build_violator_dag

logger = logging.getLogger(__name__)

INFINITY: int = 10**18


class ResidualNetwork:
    """Arcs with lower bounds, capacities and flows, searched through their residuals.

    Each arc a is reachable from its tail through the reference 2a (room to
    increase, cap - flow) and from its head through 2a + 1 (room to cancel,
    flow - lower).
    """

    def __init__(self, n_nodes: int = 0):
        self.tail: list = []
        self.head: list = []
        self.lower: list = []
        self.cap: list = []
        self.flow: list = []
        self.adj: list = [[] for _ in range(n_nodes)]

    @property
    def n_nodes(self) -> int:
        return len(self.adj)

    @property
    def n_arcs(self) -> int:
        return len(self.tail)

    def add_node(self) -> int:
        self.adj.append([])
        return len(self.adj) - 1

    def add_arc(self, tail: int, head: int, *, lower: int = 0, cap: int = INFINITY, flow: int = 0) -> int:
        arc = len(self.tail)
        self.tail.append(tail)
        self.head.append(head)
        self.lower.append(lower)
        self.cap.append(cap)
        self.flow.append(flow)
        self.adj[tail].append(2 * arc)
        self.adj[head].append(2 * arc + 1)
        return arc

    def residual(self, ref: int) -> int:
        arc = ref >> 1
        if ref & 1:
            return self.flow[arc] - self.lower[arc]
        return self.cap[arc] - self.flow[arc]

    def endpoint(self, ref: int) -> int:
        return self.tail[ref >> 1] if ref & 1 else self.head[ref >> 1]

    def origin(self, ref: int) -> int:
        return self.head[ref >> 1] if ref & 1 else self.tail[ref >> 1]

    def push(self, ref: int, amount: int) -> None:
        if ref & 1:
            self.flow[ref >> 1] -= amount
        else:
            self.flow[ref >> 1] += amount

    def _levels(self, source: int) -> list:
        level = [-1] * self.n_nodes
        level[source] = 0
        queue = deque([source])
        while queue:
            node = queue.popleft()
            for ref in self.adj[node]:
                nxt = self.endpoint(ref)
                if level[nxt] < 0 and self.residual(ref) > 0:
                    level[nxt] = level[node] + 1
                    queue.append(nxt)
        return level

    def _blocking_flow(self, source: int, sink: int, level: list) -> int:
        it = [0] * self.n_nodes
        total = 0
        while True:
            path = []
            node = source
            while node != sink:
                refs = self.adj[node]
                while it[node] < len(refs):
                    ref = refs[it[node]]
                    nxt = self.endpoint(ref)
                    if level[nxt] == level[node] + 1 and self.residual(ref) > 0:
                        path.append(ref)
                        node = nxt
                        break
                    it[node] += 1
                else:
                    if not path:
                        return total
                    level[node] = -1
                    node = self.origin(path.pop())
                    it[node] += 1
            amount = min(self.residual(ref) for ref in path)
            for ref in path:
                self.push(ref, amount)
            total += amount

    def max_flow(self, source: int, sink: int) -> int:
        """Dinic: augment along blocking flows of the BFS level graph."""
        total = 0
        phases = 0
        while True:
            level = self._levels(source)
            if level[sink] < 0:
                break
            total += self._blocking_flow(source, sink, level)
            phases += 1
        logger.debug("max flow %d -> %d: value %d in %d phases", source, sink, total, phases)
        return total

    def reachable_from(self, source: int) -> list:
        seen = [False] * self.n_nodes
        seen[source] = True
        queue = deque([source])
        while queue:
            node = queue.popleft()
            for ref in self.adj[node]:
                nxt = self.endpoint(ref)
                if not seen[nxt] and self.residual(ref) > 0:
                    seen[nxt] = True
                    queue.append(nxt)
        return seen

    def reaching(self, target: int) -> list:
        """Nodes with a residual path to target."""
        seen = [False] * self.n_nodes
        seen[target] = True
        queue = deque([target])
        while queue:
            node = queue.popleft()
            for ref in self.adj[node]:
                nxt = self.endpoint(ref)
                if not seen[nxt] and self.residual(ref ^ 1) > 0:
                    seen[nxt] = True
                    queue.append(nxt)
        return seen


class FlowNetwork:
    """Split-vertex network of a violator dag.

    Node 0 is the source and node 1 the sink. `unit_arcs[v]` is the arc
    v_in -> v_out of violator vertex v.
    """

    source = 0
    sink = 1

    def __init__(self, vdag: ViolatorDag, required: Optional[Sequence[bool]] = None):
        self.vdag = vdag
        self.net = ResidualNetwork(2)
        self.node_in: dict = {}
        self.node_out: dict = {}
        self.unit_arcs: dict = {}
        self.edge_arcs: dict = {}
        self.source_arcs: dict = {}
        self.sink_arcs: dict = {}
        self.value: Optional[int] = None

        for v in vdag.vertices:
            self.node_in[v] = self.net.add_node()
            self.node_out[v] = self.net.add_node()
            need = 1 if required is None or required[v] else 0
            self.unit_arcs[v] = self.net.add_arc(self.node_in[v], self.node_out[v], lower=need)
        for u, v in vdag.edges:
            self.edge_arcs[(u, v)] = self.net.add_arc(self.node_out[u], self.node_in[v])
        for v in vdag.vertices:
            if not vdag.predecessors[v]:
                self.source_arcs[v] = self.net.add_arc(self.source, self.node_in[v])
            if not vdag.successors[v]:
                self.sink_arcs[v] = self.net.add_arc(self.node_out[v], self.sink)

    @property
    def n_nodes(self) -> int:
        return self.net.n_nodes

    @property
    def arcs(self) -> list:
        """(from, to, lower_bound, capacity, flow) for every arc."""
        net = self.net
        return [(net.tail[a], net.head[a], net.lower[a], net.cap[a], net.flow[a]) for a in range(net.n_arcs)]

    def is_required(self, v) -> bool:
        return self.net.lower[self.unit_arcs[v]] > 0

    def _feasible_flow(self) -> int:
        """One unit per required vertex, routed back along first predecessors and on along first successors."""
        vdag, net = self.vdag, self.net
        order = list(nx.lexicographical_topological_sort(vdag.graph()))
        need = {v: 1 if self.is_required(v) else 0 for v in order}
        first_pred = {v: min(vdag.predecessors[v], default=None) for v in order}
        first_succ = {v: min(vdag.successors[v], default=None) for v in order}

        back = dict(need)
        for v in reversed(order):
            if first_pred[v] is not None:
                back[first_pred[v]] += back[v]
        ahead = dict(need)
        for v in order:
            if first_succ[v] is not None:
                ahead[first_succ[v]] += ahead[v]

        for v in order:
            u = first_pred[v]
            arc = self.source_arcs[v] if u is None else self.edge_arcs[(u, v)]
            net.flow[arc] += back[v]
            w = first_succ[v]
            arc = self.sink_arcs[v] if w is None else self.edge_arcs[(v, w)]
            net.flow[arc] += ahead[v]
            net.flow[self.unit_arcs[v]] = back[v] + ahead[v] - need[v]
        return sum(need.values())


def build_flow_graph(vdag: ViolatorDag, required: Optional[Sequence[bool]] = None) -> FlowNetwork:
    return FlowNetwork(vdag, required)


def minimum_flow(network: FlowNetwork) -> int:
    """Feasible flow first, then cancel the excess with a max flow from sink to source."""
    feasible = network._feasible_flow()
    cancelled = network.net.max_flow(network.sink, network.source)
    network.value = feasible - cancelled
    logger.debug("min flow: feasible %d, cancelled %d, value %d", feasible, cancelled, network.value)
    return network.value


def antichain_from_cut(network: FlowNetwork) -> tuple:
    """Required vertices whose unit arc leaves the set of nodes that still reach the source."""
    side = network.net.reaching(network.source)
    chosen = tuple(
        v for v in network.vdag.vertices
        if network.is_required(v) and side[network.node_in[v]] and not side[network.node_out[v]]
    )
    assert len(chosen) == network.value, f"cut crosses {len(chosen)} unit arcs, flow is {network.value}"
    return chosen


def max_isotonic_set(instance: Instance, vdag: Optional[ViolatorDag] = None,
                     required: Optional[Sequence[bool]] = None) -> tuple:
    """Maximum antichain C of the violating-pair order among the required violator vertices.

    Vertices outside the violator dag are not part of C; see `kept_vertices`.
    """
    if vdag is None:
        vdag = build_violator_dag(instance)
    network = build_flow_graph(vdag, required)
    minimum_flow(network)
    return antichain_from_cut(network)


def kept_vertices(instance: Instance, vdag: ViolatorDag, chosen) -> tuple:
    """C together with every vertex that violates with no one."""
    in_violation = set(vdag.vertices)
    return tuple(sorted(set(chosen) | {v for v in range(instance.n) if v not in in_violation}))
