"""
Exhaustive references for small instances.

Nothing here shares code with the solvers beyond the Instance type: order
relations are re-derived by search, fills are enumerated over candidate
values, and L-infinity errors come from a threshold feasibility test.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from main import settings
from monorelabel.model import LINEAR, Instance

logger = logging.getLogger(__name__)


class BudgetExceeded(ValueError):
    """Instance is too large for exhaustive search."""


@dataclass(frozen=True)
class OracleBudget:
    max_n: int = 14
    max_labels: int = 6
    max_distinct_values: int = 12

    @classmethod
    def from_settings(cls) -> "OracleBudget":
        return cls(
            max_n=settings.oracle_max_n,
            max_labels=settings.oracle_max_labels,
            max_distinct_values=settings.oracle_max_values,
        )

    def check(self, instance: Instance, grid: bool = False) -> None:
        if instance.n > self.max_n:
            raise BudgetExceeded(f"oracle limited to {self.max_n} vertices, got {instance.n}")
        if grid and instance.scale.size > self.max_labels:
            raise BudgetExceeded(f"oracle limited to {self.max_labels} labels, got {instance.scale.size}")
        distinct = len(set(instance.values))
        if distinct > self.max_distinct_values:
            raise BudgetExceeded(f"oracle limited to {self.max_distinct_values} distinct values, got {distinct}")


@dataclass(frozen=True)
class Objective:
    """kind is one of l0, weak, strong, penalized, stages."""

    kind: str
    p: Optional[float] = None
    alpha: Optional[float] = None
    kept: Optional[tuple] = None


@dataclass(frozen=True)
class OracleAnswer:
    value: object
    g: tuple


# ---------------------------------------------------------------------
# Order relations and f-isotonic sets
# ---------------------------------------------------------------------


def _below(instance: Instance) -> list:
    """below[u] = every v with u strictly before v, by depth-first search."""
    out = []
    for u in range(instance.n):
        seen = set()
        stack = list(instance.successors[u])
        while stack:
            v = stack.pop()
            if v not in seen:
                seen.add(v)
                stack.extend(instance.successors[v])
        out.append(seen)
    return out


def _trim_errs(instance: Instance) -> list:
    f = instance.values
    after = _below(instance)
    before = [set() for _ in range(instance.n)]
    for u, vs in enumerate(after):
        for v in vs:
            before[v].add(u)
    return [
        max([0] + [f[u] - f[v] for u in before[v]] + [f[v] - f[w] for w in after[v]])
        for v in range(instance.n)
    ]


def _isotonic_subsets(instance: Instance):
    """Bitmasks of every f-isotonic vertex subset."""
    f = instance.values
    conflict = [0] * instance.n
    for u, vs in enumerate(_below(instance)):
        for v in vs:
            if f[u] > f[v]:
                conflict[u] |= 1 << v
                conflict[v] |= 1 << u
    for mask in range(1 << instance.n):
        if all(not (conflict[u] & mask) for u in range(instance.n) if mask >> u & 1):
            yield mask


def _members(mask: int, n: int) -> tuple:
    return tuple(v for v in range(n) if mask >> v & 1)


def brute_max_isotonic_set(instance: Instance, budget: Optional[OracleBudget] = None) -> tuple:
    """(size, witnesses): the largest f-isotonic size and every subset of that size, in lexical order."""
    (budget or OracleBudget.from_settings()).check(instance)
    best, witnesses = -1, []
    for mask in _isotonic_subsets(instance):
        size = bin(mask).count("1")
        if size > best:
            best, witnesses = size, [mask]
        elif size == best:
            witnesses.append(mask)
    return best, sorted(_members(mask, instance.n) for mask in witnesses)


def brute_min_trim_err(instance: Instance, budget: Optional[OracleBudget] = None) -> float:
    """Smallest largest trim-err over all maximum f-isotonic sets."""
    _, witnesses = brute_max_isotonic_set(instance, budget)
    r = _trim_errs(instance)
    return min(max((r[v] for v in kept), default=0) for kept in witnesses)


# ---------------------------------------------------------------------
# Fills
# ---------------------------------------------------------------------


def _assignments(instance: Instance, candidates: Sequence, fixed: Optional[dict] = None):
    """Every isotonic assignment from `candidates` (sorted), in lexical order along topo_order."""
    order, preds = instance.topo_order, instance.predecessors
    fixed = fixed or {}
    g: list = [None] * instance.n

    def extend(k):
        if k == len(order):
            yield tuple(g)
            return
        v = order[k]
        floor = max((g[u] for u in preds[v]), default=-math.inf)
        for x in ([fixed[v]] if v in fixed else candidates):
            if x >= floor:
                g[v] = x
                yield from extend(k + 1)
        g[v] = None

    yield from extend(0)


def _error(f: Sequence, g: Sequence, p: float) -> float:
    if p == math.inf:
        return max((abs(a - b) for a, b in zip(f, g)), default=0)
    return sum(abs(a - b) ** p for a, b in zip(f, g))


def _pava(values: Sequence[float]) -> list:
    """Unweighted L2 isotonic regression by repeated pooling."""
    blocks = [[x, 1] for x in values]
    merged = True
    while merged:
        merged = False
        for k in range(len(blocks) - 1):
            if blocks[k][0] / blocks[k][1] > blocks[k + 1][0] / blocks[k + 1][1]:
                blocks[k][0] += blocks[k + 1][0]
                blocks[k][1] += blocks[k + 1][1]
                del blocks[k + 1]
                merged = True
                break
    return [total / count for total, count in blocks for _ in range(count)]


def _fill_l2_linear(instance: Instance, kept: Sequence[int]) -> tuple:
    f = instance.values
    anchors = [-1, *sorted(kept), instance.n]
    g = list(f)
    for i, j in zip(anchors, anchors[1:]):
        lo = f[i] if i >= 0 else -math.inf
        hi = f[j] if j < instance.n else math.inf
        for v, x in zip(range(i + 1, j), _pava(f[i + 1:j])):
            g[v] = min(max(x, lo), hi)
    return _error(f, g, 2), tuple(g)


def _fill_linf(instance: Instance, kept: Sequence[int]) -> tuple:
    """Smallest t admitting an isotonic g with |g - f| <= t off `kept` and g = f on it."""
    f = instance.values
    keep = set(kept)
    gaps = {0} | {abs(a - b) for a in f for b in f} | {abs(a - b) / 2 for a in f for b in f}
    for t in sorted(gaps):
        g: list = [None] * instance.n
        feasible = True
        for v in instance.topo_order:
            lo, hi = (f[v], f[v]) if v in keep else (f[v] - t, f[v] + t)
            g[v] = max([lo] + [g[u] for u in instance.predecessors[v]])
            if g[v] > hi:
                feasible = False
                break
        if feasible:
            return _error(f, g, math.inf), tuple(g)
    raise AssertionError("no feasible threshold")


def _best_fill(instance: Instance, kept: Sequence[int], p: float) -> tuple:
    """(error, g): best isotonic g equal to f on `kept` under summed |.|^p (max for inf)."""
    if p == math.inf:
        return _fill_linf(instance, kept)
    if p == 2:
        if instance.kind != LINEAR:
            raise ValueError("the L2 oracle needs a linear order")
        return _fill_l2_linear(instance, kept)
    f = instance.values
    candidates = sorted(set(f))
    best = None
    for g in _assignments(instance, candidates, {v: f[v] for v in kept}):
        error = _error(f, g, p)
        if best is None or error < best[0]:
            best = (error, g)
    return best


def _changes(f: Sequence, g: Sequence) -> int:
    return sum(1 for a, b in zip(f, g) if a != b)


# ---------------------------------------------------------------------
# Objectives
# ---------------------------------------------------------------------


def brute_best_regression(instance: Instance, objective: Objective,
                          budget: Optional[OracleBudget] = None) -> OracleAnswer:
    """Optimal value and one optimizer (the first found in lexical order)."""
    budget = budget or OracleBudget.from_settings()
    kind, p = objective.kind, objective.p
    f = instance.values

    if kind in ("l0", "stages"):
        budget.check(instance, grid=True)
        grid = [instance.scale.value_of(r) for r in range(1, instance.scale.size + 1)]
        if kind == "l0":
            best = None
            for g in _assignments(instance, grid):
                changed = _changes(f, g)
                if best is None or changed < best.value:
                    best = OracleAnswer(changed, g)
            return best
        rank = {x: r for r, x in enumerate(grid, start=1)}
        best = None
        for g in _assignments(instance, grid):
            counts = [0] * instance.scale.size
            for a, b in zip(instance.ranks, g):
                counts[abs(a - rank[b])] += 1
            if best is None or tuple(counts) > best.value:
                best = OracleAnswer(tuple(counts), g)
        return best

    budget.check(instance)
    if kind == "weak":
        if objective.kept is None:
            raise ValueError("the weak objective needs a kept set")
        error, g = _best_fill(instance, objective.kept, p)
        return OracleAnswer(error, g)

    if kind == "strong":
        _, witnesses = brute_max_isotonic_set(instance, budget)
        best = None
        for kept in witnesses:
            error, g = _best_fill(instance, kept, p)
            if best is None or error < best.value:
                best = OracleAnswer(error, g)
        return best

    if kind == "penalized":
        alpha = objective.alpha
        if alpha is None or alpha <= 0:
            raise ValueError("the penalized objective needs a positive alpha")
        best = None
        if p == 1:
            for g in _assignments(instance, sorted(set(f))):
                score = _error(f, g, 1) + alpha * _changes(f, g)
                if best is None or score < best.value:
                    best = OracleAnswer(score, g)
            return best
        for mask in _isotonic_subsets(instance):
            error, g = _best_fill(instance, _members(mask, instance.n), p)
            score = error + alpha * _changes(f, g)
            if best is None or score < best.value:
                best = OracleAnswer(score, g)
        return best

    raise ValueError(f"unknown objective kind {kind!r}")
