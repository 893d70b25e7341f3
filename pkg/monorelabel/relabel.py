"""
Windows, trims and the L0 regressions built on a maximum f-isotonic set.

Every routine here works on any validated instance (linear order, explicit
dag or point set) by sweeping the order in topological numbering. The weak
L0,2 approximation is the one exception; it needs a linear order.
"""
import logging
import math
import time
from dataclasses import dataclass
from typing import Optional, Sequence

from monorelabel.flow import ResidualNetwork, kept_vertices, max_isotonic_set
from monorelabel.model import Instance, RegressionResult, ValidationError, make_result, ranks_of
from monorelabel.violator import ViolatorDag, build_violator_dag

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Windows:
    lo: tuple
    hi: tuple

    def __len__(self) -> int:
        return len(self.lo)


@dataclass(frozen=True)
class TrimErr:
    r: tuple

    def of_set(self, vertices) -> float:
        """trim-err(f, C): the largest trim-err over C (0 for an empty set)."""
        return max((self.r[v] for v in vertices), default=0)


# ---------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------


def _forward_max(instance: Instance, values: Sequence) -> list:
    """max{values(u): u before or equal to v}"""
    out = list(values)
    for v in instance.topo_order:
        for u in instance.predecessors[v]:
            if out[u] > out[v]:
                out[v] = out[u]
    return out


def _backward_min(instance: Instance, values: Sequence) -> list:
    """min{values(u): u after or equal to v}"""
    out = list(values)
    for v in reversed(instance.topo_order):
        for u in instance.successors[v]:
            if out[u] < out[v]:
                out[v] = out[u]
    return out


def _windows_from(instance: Instance, fixed: dict) -> Windows:
    lo = [None] * instance.n
    for v in instance.topo_order:
        below = max((lo[u] for u in instance.predecessors[v] if lo[u] is not None), default=None)
        if v in fixed:
            if below is not None and below > fixed[v]:
                raise ValidationError(f"kept set is not f-isotonic at vertex {v}")
            lo[v] = fixed[v]
        else:
            lo[v] = below
    hi = [None] * instance.n
    for v in reversed(instance.topo_order):
        above = min((hi[u] for u in instance.successors[v] if hi[u] is not None), default=None)
        hi[v] = fixed[v] if v in fixed else above
    bottom, top = instance.lowest, instance.highest
    return Windows(
        lo=tuple(bottom if x is None else x for x in lo),
        hi=tuple(top if x is None else x for x in hi),
    )


# ---------------------------------------------------------------------
# Windows and trims
# ---------------------------------------------------------------------


def windows(instance: Instance, kept) -> Windows:
    """[w_le(v), w_ge(v)] induced by keeping f fixed on `kept`."""
    values = instance.values
    return _windows_from(instance, {v: values[v] for v in kept})


def trim(values: Sequence, w: Windows) -> tuple:
    return tuple(min(max(x, lo), hi) for x, lo, hi in zip(values, w.lo, w.hi))


def trim_err(instance: Instance) -> TrimErr:
    """Largest forced deviation elsewhere if v keeps its own value."""
    f = instance.values
    above = _forward_max(instance, f)
    below = _backward_min(instance, f)
    return TrimErr(tuple(max(a - x, x - b) for x, a, b in zip(f, above, below)))


def fill_windows(instance: Instance, w: Windows) -> tuple:
    """Trim f into the windows, then raise each value to its predecessors' maximum.

    Trimming alone can leave two violators crossing (2,5,1,4 kept at 2 and 4
    trims to 2,4,2,4); the sweep stays inside every window since the upper
    bounds are isotonic.
    """
    return tuple(_forward_max(instance, trim(instance.values, w)))


def midpoint_regression(instance: Instance, values: Optional[Sequence] = None) -> tuple:
    """L-infinity isotonic regression: halfway between the running max from below and min from above."""
    if values is None:
        values = instance.values
    above = _forward_max(instance, values)
    below = _backward_min(instance, values)
    return tuple((a + b) / 2 for a, b in zip(above, below))


# ---------------------------------------------------------------------
# L1 isotonic regression on a dag
# ---------------------------------------------------------------------


def _split_at(instance: Instance, members: list, values, weights, bounds, z_low, z_high) -> list:
    """Members that go to z_high in an optimal two-level solution (minimal such set)."""
    net = ResidualNetwork(2)
    source, sink = 0, 1
    node = {v: net.add_node() for v in members}
    for v in members:
        if bounds is not None and bounds.hi[v] <= z_low:
            net.add_arc(node[v], sink)
        elif bounds is not None and bounds.lo[v] >= z_high:
            net.add_arc(source, node[v])
        elif values[v] >= z_high:
            net.add_arc(source, node[v], cap=weights[v])
        else:
            net.add_arc(node[v], sink, cap=weights[v])
        for u in instance.successors[v]:
            if u in node:
                net.add_arc(node[v], node[u])
    net.max_flow(source, sink)
    side = net.reachable_from(source)
    return [v for v in members if side[node[v]]]


def l1_isotonic_dag(instance: Instance, values: Sequence, weights: Optional[Sequence] = None,
                    bounds: Optional[Windows] = None) -> tuple:
    """Weighted L1 isotonic regression by recursive median partitioning.

    The sorted candidate values are split at their median; a minimum cut
    decides which vertices lie above the split, and each side recurses on its
    half of the candidates. Ties go to the lower value.
    """
    n = instance.n
    if weights is None:
        weights = [1] * n
    if any(wt <= 0 for wt in weights):
        raise ValueError("weights must be positive")
    pool = set(values)
    if bounds is not None:
        pool |= set(bounds.lo) | set(bounds.hi)
    candidates = sorted(pool)
    # capacities stay exact for integral weights: each vertex pays its weight on the wrong side
    fitted = [None] * n
    tasks = [(list(range(n)), 0, len(candidates) - 1)]
    while tasks:
        members, a, b = tasks.pop()
        if not members:
            continue
        if a == b:
            for v in members:
                fitted[v] = candidates[a]
            continue
        mid = (a + b) // 2
        high = set(_split_at(instance, members, values, weights, bounds, candidates[mid], candidates[mid + 1]))
        tasks.append(([v for v in members if v not in high], a, mid))
        tasks.append(([v for v in members if v in high], mid + 1, b))
    return tuple(fitted)


# ---------------------------------------------------------------------
# L0 regressions
# ---------------------------------------------------------------------


def l0_regression(instance: Instance, vdag: Optional[ViolatorDag] = None) -> RegressionResult:
    """Violator dag, minimum flow, then fill the windows of the kept set."""
    started = time.perf_counter()
    if vdag is None:
        vdag = build_violator_dag(instance)
    built = time.perf_counter()
    chosen = max_isotonic_set(instance, vdag)
    solved = time.perf_counter()
    kept = kept_vertices(instance, vdag, chosen)
    g = fill_windows(instance, windows(instance, kept))
    logger.debug("l0 regression: %d violators, kept %d of them", len(vdag.vertices), len(chosen))
    return make_result(
        instance, g, kept,
        timings={"violator_s": built - started, "flow_s": solved - built, "fill_s": time.perf_counter() - solved},
    )


def weak_l01(instance: Instance, kept) -> RegressionResult:
    """Trim f to the windows of `kept`, then take an L1 isotonic regression inside them."""
    instance.require_numeric("weak L0,1")
    w = windows(instance, kept)
    g = l1_isotonic_dag(instance, trim(instance.values, w), bounds=w)
    return make_result(instance, g, kept, p=1)


def optimize_then_trim_l1(instance: Instance, kept) -> RegressionResult:
    instance.require_numeric("L1 regression")
    g = trim(l1_isotonic_dag(instance, instance.values), windows(instance, kept))
    return make_result(instance, g, kept, p=1)


def weak_l0inf(instance: Instance, kept) -> RegressionResult:
    """Midpoint L-infinity regression of f trimmed to the windows of `kept`."""
    instance.require_numeric("weak L0,inf")
    g = trim(midpoint_regression(instance), windows(instance, kept))
    return make_result(instance, g, kept, p=math.inf, trim_error=trim_err(instance).of_set(kept))


def trim_then_optimize_linf(instance: Instance, kept) -> RegressionResult:
    instance.require_numeric("L-infinity regression")
    g = midpoint_regression(instance, trim(instance.values, windows(instance, kept)))
    return make_result(instance, g, kept, p=math.inf)


def strong_l0inf(instance: Instance) -> RegressionResult:
    """Smallest trim-err threshold that still admits a maximum f-isotonic set, then weak L0,inf on it."""
    instance.require_numeric("strong L0,inf")
    vdag = build_violator_dag(instance)
    size = len(max_isotonic_set(instance, vdag))
    r = trim_err(instance).r
    thresholds = sorted({r[v] for v in vdag.vertices})

    best = ()
    lo, hi = 0, len(thresholds) - 1
    while lo <= hi:
        mid = (lo + hi) // 2
        required = [r[v] <= thresholds[mid] for v in range(instance.n)]
        chosen = max_isotonic_set(instance, vdag, required)
        if len(chosen) == size:
            best = chosen
            hi = mid - 1
        else:
            lo = mid + 1
    kept = kept_vertices(instance, vdag, best)
    logger.debug("strong L0,inf: threshold %s over %d candidates", max((r[v] for v in best), default=0), len(thresholds))
    return weak_l0inf(instance, kept)


def weak_l00(instance: Instance, kept=None) -> RegressionResult:
    """Staged L0,0: pin, stage by stage, as many vertices as possible that move exactly d labels.

    `kept` is the stage-0 set (a maximum f-isotonic set); the canonical one
    from the minimum flow is used when it is not given. The result depends on
    that choice: on labels high, mid, low the canonical set is {0} and gives
    (high, high, high) with stage counts (1, 1, 1), while kept={1} gives
    (mid, mid, mid) with counts (1, 2, 0).
    """
    vdag = build_violator_dag(instance)
    if kept is None:
        kept = kept_vertices(instance, vdag, max_isotonic_set(instance, vdag))
    values, ranks = instance.values, instance.ranks
    pinned = {v: values[v] for v in kept}

    for d in range(1, instance.scale.size):
        g = trim(values, _windows_from(instance, pinned))
        g_ranks = ranks_of(instance, g)
        stage = [v for v in vdag.vertices if v not in pinned and abs(g_ranks[v] - ranks[v]) == d]
        if not stage:
            continue
        required = [False] * instance.n
        for v in stage:
            required[v] = True
        chosen = max_isotonic_set(instance, vdag, required)
        logger.debug("weak L0,0 stage %d: %d candidates, pinned %d", d, len(stage), len(chosen))
        for v in chosen:
            pinned[v] = g[v]

    g = fill_windows(instance, _windows_from(instance, pinned))
    return make_result(instance, g, kept)


def weighted_pava(values: Sequence[float], weights: Sequence[float]) -> list:
    """Weighted L2 isotonic regression on a linear order (pool adjacent violators)."""
    if len(values) != len(weights):
        raise ValueError("values and weights must have the same length")
    # blocks of [weighted sum, total weight, length]
    stack = []
    for x, wt in zip(values, weights):
        stack.append([x * wt, wt, 1])
        while len(stack) > 1 and stack[-2][0] / stack[-2][1] > stack[-1][0] / stack[-1][1]:
            top = stack.pop()
            stack[-1][0] += top[0]
            stack[-1][1] += top[1]
            stack[-1][2] += top[2]
    fitted = []
    for total, wt, length in stack:
        fitted.extend([total / wt] * length)
    return fitted


def weak_l02_approx(instance: Instance, kept, eps: float) -> RegressionResult:
    """Weighted L2 regression with heavy weight on `kept`, trimmed; each value within eps of weak L0,2.

    A pooled block holds at most n free values, each at most 2 max|f| from the
    kept values, so a kept weight of 2 n max|f| / eps moves no fitted value
    more than eps.
    """
    instance.require_linear("weak L0,2 approximation")
    instance.require_numeric("weak L0,2 approximation")
    if eps <= 0:
        raise ValueError("eps must be positive")
    values = instance.values
    alpha = 2 * instance.n * max(abs(x) for x in values) / eps or 1.0
    keep = set(kept)
    weights = [alpha if v in keep else 1.0 for v in range(instance.n)]
    g = trim(weighted_pava(values, weights), windows(instance, kept))
    return make_result(instance, g, kept, p=2)
