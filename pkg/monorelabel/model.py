"""
Core domain types shared by every solver: label scales, label functions,
order specifications, validated instances and regression results, plus the
distance metrics used to score a relabeling.

Labels are stored as ranks 1..l. Numeric label values are only consulted by
the Lp computations.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import networkx as nx
import numpy as np

logger = logging.getLogger(__name__)

LINEAR = "linear"
DAG = "dag"
POINTS = "points"


class ValidationError(ValueError):
    """Malformed instance: cycles, ranks out of range, shape mismatches."""


class ObjectiveOrderError(ValueError):
    """An objective was requested on an order kind it does not support."""


# ---------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class LabelScale:
    labels: tuple
    numeric_values: Optional[tuple] = None

    def __post_init__(self):
        if len(self.labels) == 0:
            raise ValidationError("a label scale needs at least one label")
        if len(set(self.labels)) != len(self.labels):
            raise ValidationError("labels must be unique")
        if self.numeric_values is not None:
            if len(self.numeric_values) != len(self.labels):
                raise ValidationError("numeric_values must have one entry per label")
            if any(b <= a for a, b in zip(self.numeric_values, self.numeric_values[1:])):
                raise ValidationError("numeric_values must be strictly increasing")

    @classmethod
    def from_numbers(cls, values: Sequence[float]) -> "LabelScale":
        distinct = tuple(sorted(set(values)))
        return cls(labels=distinct, numeric_values=distinct)

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def is_numeric(self) -> bool:
        return self.numeric_values is not None

    @cached_property
    def _rank_index(self) -> dict:
        return {label: k + 1 for k, label in enumerate(self.labels)}

    def rank_of(self, label) -> int:
        try:
            return self._rank_index[label]
        except KeyError:
            raise ValidationError(f"label {label!r} is not on the scale") from None

    def value_of(self, rank: int):
        if self.numeric_values is None:
            return rank
        return self.numeric_values[rank - 1]

    def label_of(self, rank: int):
        return self.labels[rank - 1]


@dataclass(frozen=True)
class LabelFunction:
    values: tuple

    @classmethod
    def from_labels(cls, labels: Sequence, scale: LabelScale) -> "LabelFunction":
        return cls(tuple(scale.rank_of(label) for label in labels))

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class OrderSpec:
    kind: str
    n: int
    edges: tuple = ()
    coords: Optional[tuple] = None
    d: int = 0

    @classmethod
    def linear(cls, n: int) -> "OrderSpec":
        return cls(kind=LINEAR, n=n)

    @classmethod
    def dag(cls, n: int, edges) -> "OrderSpec":
        return cls(kind=DAG, n=n, edges=tuple((int(u), int(v)) for u, v in edges))

    @classmethod
    def points(cls, coords, d: Optional[int] = None) -> "OrderSpec":
        rows = tuple(tuple(float(x) for x in row) for row in coords)
        if d is None:
            d = len(rows[0]) if rows else 0
        return cls(kind=POINTS, n=len(rows), coords=rows, d=d)

    @property
    def m(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class RegressionResult:
    g: tuple
    kept_set: tuple
    l0_distance: int
    stage_counts: Optional[tuple] = None
    lp_error: Optional[float] = None
    p: Optional[float] = None
    objective: Optional[float] = None
    trim_error: Optional[float] = None
    sum_squares: Optional[float] = None
    timings: dict = field(default_factory=dict, compare=False)


# ---------------------------------------------------------------------
# Validated instance
# ---------------------------------------------------------------------


class Instance:
    """An order, a label function and its scale, checked and normalised.

    Vertex ids stay as given; `topo_order` lists them in a topological
    numbering and `successors` / `predecessors` hold the direct relations
    the sweeps walk over.
    """

    def __init__(self, order: OrderSpec, f: LabelFunction, scale: LabelScale, topo_order: tuple):
        self.order = order
        self.f = f
        self.scale = scale
        self.topo_order = topo_order

    @property
    def n(self) -> int:
        return self.order.n

    @property
    def kind(self) -> str:
        return self.order.kind

    @property
    def ranks(self) -> tuple:
        return self.f.values

    @cached_property
    def values(self) -> tuple:
        """Label values in the instance's value space (numbers, or ranks for ordinal scales)."""
        return tuple(self.scale.value_of(r) for r in self.f.values)

    @property
    def lowest(self):
        return self.scale.value_of(1)

    @property
    def highest(self):
        return self.scale.value_of(self.scale.size)

    def require_numeric(self, what: str) -> None:
        if not self.scale.is_numeric:
            raise ValidationError(f"{what} needs numeric label values")

    def require_linear(self, what: str) -> None:
        if self.kind != LINEAR:
            raise ObjectiveOrderError(f"{what} is only defined on linear orders, not {self.kind}")

    @cached_property
    def successors(self) -> tuple:
        n = self.n
        if self.kind == LINEAR:
            return tuple((i + 1,) if i + 1 < n else () for i in range(n))
        if self.kind == DAG:
            out = [[] for _ in range(n)]
            for u, v in self.order.edges:
                out[u].append(v)
            return tuple(tuple(sorted(set(vs))) for vs in out)
        below = dominance_matrix(self.order.coords)
        return tuple(tuple(int(v) for v in np.flatnonzero(below[u])) for u in range(n))

    @cached_property
    def predecessors(self) -> tuple:
        inc = [[] for _ in range(self.n)]
        for u, vs in enumerate(self.successors):
            for v in vs:
                inc[v].append(u)
        return tuple(tuple(us) for us in inc)

    def relations(self):
        """Direct (u, v) pairs with u before v; their reachability is the order."""
        for u, vs in enumerate(self.successors):
            for v in vs:
                yield u, v

    def with_labels(self, ranks: Sequence[int]) -> "Instance":
        return Instance(self.order, LabelFunction(tuple(ranks)), self.scale, self.topo_order)


def dominance_matrix(coords) -> np.ndarray:
    """below[x, y] is True when point y dominates point x (x != y as points)."""
    pts = np.asarray(coords, dtype=float)
    if pts.size == 0:
        return np.zeros((len(coords), len(coords)), dtype=bool)
    le = np.all(pts[:, None, :] <= pts[None, :, :], axis=2)
    same = np.all(pts[:, None, :] == pts[None, :, :], axis=2)
    return le & ~same


def topological_order(n: int, edges) -> tuple:
    graph = nx.DiGraph()
    graph.add_nodes_from(range(n))
    graph.add_edges_from(edges)
    if not nx.is_directed_acyclic_graph(graph):
        cycle = nx.find_cycle(graph)
        raise ValidationError(f"cycle detected in dag edges: {cycle}")
    return tuple(nx.lexicographical_topological_sort(graph))


def validate(order: OrderSpec, f: LabelFunction, scale: LabelScale) -> Instance:
    if len(f) != order.n:
        raise ValidationError(f"label function has {len(f)} values for {order.n} vertices")
    bad = [r for r in f.values if not 1 <= r <= scale.size]
    if bad:
        raise ValidationError(f"rank out of range 1..{scale.size}: {bad[0]}")

    if order.kind == LINEAR:
        topo = tuple(range(order.n))
    elif order.kind == DAG:
        for u, v in order.edges:
            if not (0 <= u < order.n and 0 <= v < order.n):
                raise ValidationError(f"edge ({u},{v}) names a vertex outside 0..{order.n - 1}")
        topo = topological_order(order.n, order.edges)
    elif order.kind == POINTS:
        if any(len(row) != order.d for row in order.coords):
            raise ValidationError(f"dimension mismatch: expected {order.d} coordinates per point")
        # coordinate sums never decrease along dominance
        topo = tuple(sorted(range(order.n), key=lambda v: (sum(order.coords[v]), order.coords[v], v)))
    else:
        raise ValidationError(f"unknown order kind {order.kind!r}")

    logger.debug("validated %s instance n=%d labels=%d", order.kind, order.n, scale.size)
    return Instance(order, f, scale, topo)


def instance_from_values(values: Sequence[float], order: Optional[OrderSpec] = None) -> Instance:
    """Numeric instance whose scale is the sorted distinct data values."""
    scale = LabelScale.from_numbers(values)
    f = LabelFunction.from_labels(values, scale)
    return validate(order or OrderSpec.linear(len(values)), f, scale)


def instance_from_ranks(ranks: Sequence[int], n_labels: Optional[int] = None,
                        order: Optional[OrderSpec] = None) -> Instance:
    """Ordinal instance on labels 1..n_labels."""
    size = n_labels or max(ranks, default=1)
    scale = LabelScale(labels=tuple(range(1, size + 1)))
    return validate(order or OrderSpec.linear(len(ranks)), LabelFunction(tuple(ranks)), scale)


# ---------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------


def is_isotonic(instance: Instance, g: Sequence) -> bool:
    if len(g) != instance.n:
        raise ValidationError("g must have one value per vertex")
    return all(g[u] <= g[v] for u, v in instance.relations())


def hamming_distance(f: Sequence, g: Sequence) -> int:
    if len(f) != len(g):
        raise ValidationError("f and g have different lengths")
    return sum(1 for a, b in zip(f, g) if a != b)


def lp_error(f: Sequence[float], g: Sequence[float], p: float) -> float:
    """(sum |f-g|^p)^(1/p); p = inf gives the largest deviation."""
    if len(f) != len(g):
        raise ValidationError("f and g have different lengths")
    if p == math.inf:
        return max((abs(a - b) for a, b in zip(f, g)), default=0.0)
    if p < 1:
        raise ValidationError(f"p must be >= 1 (or inf), got {p}")
    total = sum(abs(a - b) ** p for a, b in zip(f, g))
    return total ** (1.0 / p)


def sum_squares(f: Sequence[float], g: Sequence[float]) -> float:
    return sum((a - b) ** 2 for a, b in zip(f, g))


def stage_counts(f_ranks: Sequence[int], g_ranks: Sequence[int], n_labels: int) -> tuple:
    counts = [0] * n_labels
    for a, b in zip(f_ranks, g_ranks):
        counts[abs(a - b)] += 1
    return tuple(counts)


def ranks_of(instance: Instance, g: Sequence) -> Optional[tuple]:
    """Ranks of g on the instance's scale, or None if g leaves the label grid."""
    lookup = {instance.scale.value_of(r): r for r in range(1, instance.scale.size + 1)}
    try:
        return tuple(lookup[x] for x in g)
    except KeyError:
        return None


def order_graph(instance: Instance) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(range(instance.n))
    graph.add_edges_from(instance.relations())
    return graph


def make_result(instance: Instance, g: Sequence, kept, p: Optional[float] = None,
                **extra) -> RegressionResult:
    """Assemble a RegressionResult, filling in the metrics derived from g."""
    g = tuple(g)
    g_ranks = ranks_of(instance, g)
    counts = stage_counts(instance.ranks, g_ranks, instance.scale.size) if g_ranks is not None else None
    error = squares = None
    if p is not None and instance.scale.is_numeric:
        error = lp_error(instance.values, g, p)
        if p == 2:
            squares = sum_squares(instance.values, g)
    return RegressionResult(
        g=g,
        kept_set=tuple(sorted(kept)),
        l0_distance=hamming_distance(instance.values, g),
        stage_counts=counts,
        lp_error=error,
        p=p,
        sum_squares=squares,
        **extra,
    )
