"""
Penalized isotonic regression on linear orders: minimize the Lp error plus
alpha times the number of changed values.

For p in (1, 2) a DP runs over every pair of kept vertices i < j with
f(j) >= f(i); the vertices between them take the isotonic regression of
their values clamped into [f(i), f(j)]. For p = inf the DP does not apply, so
the search runs over trim-err thresholds instead.
"""
import logging
import math
from bisect import bisect_right, insort
from typing import Optional, Sequence

from monorelabel.linear_strong import LevelStack, PrefixSums, extended_value
from monorelabel.model import Instance, RegressionResult, hamming_distance, lp_error, make_result
from monorelabel.relabel import midpoint_regression, trim, trim_err, windows

logger = logging.getLogger(__name__)


class PersistentStatTree:
    """Counts and sums of values[:k] for every prefix k, one version per prefix.

    The tree is laid out over the sorted distinct values, so it is perfectly
    balanced and never rotates; each insertion copies one root-to-leaf path.
    A range b..e-1 is read off versions e and b.
    """

    def __init__(self, values: Sequence[float]):
        self.keys = sorted(set(values))
        # node 0 is the shared empty node
        self.left = [0]
        self.right = [0]
        self.count = [0]
        self.total = [0]
        self.roots = [0]
        for x in values:
            self.roots.append(self._insert(self.roots[-1], bisect_right(self.keys, x) - 1, x))

    def __len__(self) -> int:
        return len(self.roots) - 1

    def _clone(self, node: int) -> int:
        self.left.append(self.left[node])
        self.right.append(self.right[node])
        self.count.append(self.count[node])
        self.total.append(self.total[node])
        return len(self.count) - 1

    def _insert(self, root: int, pos: int, value: float) -> int:
        new_root = node = self._clone(root)
        lo, hi = 0, len(self.keys)
        while True:
            self.count[node] += 1
            self.total[node] += value
            if hi - lo == 1:
                return new_root
            mid = (lo + hi) // 2
            if pos < mid:
                child = self._clone(self.left[node])
                self.left[node] = child
                hi = mid
            else:
                child = self._clone(self.right[node])
                self.right[node] = child
                lo = mid
            node = child

    def kth(self, b: int, e: int, k: int) -> float:
        """k-th smallest (0-based) of values[b:e]."""
        if not 0 <= k < e - b:
            raise IndexError(f"rank {k} outside a range of {e - b} values")
        upper, lower = self.roots[e], self.roots[b]
        lo, hi = 0, len(self.keys)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            in_left = self.count[self.left[upper]] - self.count[self.left[lower]]
            if k < in_left:
                upper, lower, hi = self.left[upper], self.left[lower], mid
            else:
                k -= in_left
                upper, lower, lo = self.right[upper], self.right[lower], mid
        return self.keys[lo]

    def stats_le(self, b: int, e: int, x: float) -> tuple:
        """(count, sum) of the values in values[b:e] that are <= x."""
        t = bisect_right(self.keys, x)
        upper, lower = self.roots[e], self.roots[b]
        lo, hi = 0, len(self.keys)
        cnt = tot = 0
        while lo < t:
            if hi <= t:
                cnt += self.count[upper] - self.count[lower]
                tot += self.total[upper] - self.total[lower]
                break
            mid = (lo + hi) // 2
            if t <= mid:
                upper, lower, hi = self.left[upper], self.left[lower], mid
            else:
                cnt += self.count[self.left[upper]] - self.count[self.left[lower]]
                tot += self.total[self.left[upper]] - self.total[self.left[lower]]
                upper, lower, lo = self.right[upper], self.right[lower], mid
        return cnt, tot

    def range_total(self, b: int, e: int) -> float:
        return self.total[self.roots[e]] - self.total[self.roots[b]]

    def abs_dev(self, b: int, e: int, x: float) -> float:
        """sum of |y - x| over values[b:e]"""
        cnt, tot = self.stats_le(b, e, x)
        above = self.range_total(b, e) - tot
        return cnt * x - tot + above - (e - b - cnt) * x


class LisTracker:
    """Longest nondecreasing subsequence of (position, value) points inserted in any order."""

    def __init__(self):
        self._points: list = []
        self._positions: set = set()
        self._length = 0
        self._dirty = False

    def __len__(self) -> int:
        return len(self._points)

    def insert(self, position, value) -> None:
        if position in self._positions:
            raise ValueError(f"duplicate position {position}")
        self._positions.add(position)
        insort(self._points, (position, value))
        self._dirty = True

    @property
    def length(self) -> int:
        if self._dirty:
            tails = []
            for _, x in self._points:
                t = bisect_right(tails, x)
                if t == len(tails):
                    tails.append(x)
                else:
                    tails[t] = x
            self._length = len(tails)
            self._dirty = False
        return self._length

    def chain(self) -> list:
        return longest_nondecreasing(self._points)


def longest_nondecreasing(points: Sequence[tuple]) -> list:
    """Positions of one longest nondecreasing run through (position, value) points sorted by position.

    Patience sorting; the run ending at the last pile is returned.
    """
    tail_values: list = []
    tail_index: list = []
    parent = [-1] * len(points)
    for k, (_, x) in enumerate(points):
        t = bisect_right(tail_values, x)
        parent[k] = tail_index[t - 1] if t > 0 else -1
        if t == len(tail_values):
            tail_values.append(x)
            tail_index.append(k)
        else:
            tail_values[t] = x
            tail_index[t] = k
    chain = []
    k = tail_index[-1] if tail_index else -1
    while k >= 0:
        chain.append(points[k][0])
        k = parent[k]
    return chain[::-1]


def lis_insert_only(stream) -> list:
    tracker = LisTracker()
    lengths = []
    for position, value in stream:
        tracker.insert(position, value)
        lengths.append(tracker.length)
    return lengths


# ---------------------------------------------------------------------
# Penalized Lp, p in (1, 2)
# ---------------------------------------------------------------------


def penalized_objective(f: Sequence[float], g: Sequence[float], alpha: float, p: float) -> float:
    """Summed |f-g|^p (the largest |f-g| for p = inf) plus alpha per changed value."""
    if p == math.inf:
        error = lp_error(f, g, math.inf)
    else:
        error = sum(abs(a - b) ** p for a, b in zip(f, g))
    return error + alpha * hamming_distance(f, g)


def segment_lp_penalized(i: int, j: int, values: Sequence[float], p: int,
                         sums: Optional[PrefixSums] = None, stats: Optional[PersistentStatTree] = None) -> float:
    """Best summed |.|^p on the positions strictly between i and j with g(i) = f(i), g(j) = f(j).

    Positions are extended: 0 and len(values)+1 are the sentinels.
    """
    if p not in (1, 2):
        raise ValueError(f"penalized segments support p in (1, 2), got {p}")
    a, b = extended_value(values, i), extended_value(values, j)
    if b < a:
        raise ValueError(f"f({j}) = {b} is below f({i}) = {a}")
    sums = sums or PrefixSums(values)
    if p == 1 and stats is None:
        stats = PersistentStatTree(values)
    stack = LevelStack(sums, p=p, stats=stats)
    for k in range(i, j - 1):
        stack.push(k)
    return stack.clamped_error(a, b)


def penalized_lp(instance: Instance, alpha: float, p: int) -> RegressionResult:
    instance.require_linear("penalized regression")
    instance.require_numeric("penalized regression")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if p not in (1, 2):
        raise ValueError(f"penalized_lp supports p in (1, 2), got {p}; use penalized_linf for inf")
    values = list(instance.values)
    n = len(values)
    sums = PrefixSums(values)
    stats = PersistentStatTree(values) if p == 1 else None

    cost = [math.inf] * (n + 2)
    back = [-1] * (n + 2)
    cost[0] = 0
    for i in range(n + 1):
        a = extended_value(values, i)
        stack = LevelStack(sums, p=p, stats=stats)
        for j in range(i + 1, n + 2):
            if j > i + 1:
                stack.push(j - 2)
            b = extended_value(values, j)
            if b < a:
                continue
            cand = cost[i] + alpha * (j - i - 1) + stack.clamped_error(a, b)
            # ties go to the later kept predecessor
            if cand <= cost[j]:
                cost[j] = cand
                back[j] = i

    g: list = [None] * n
    kept = []
    j = n + 1
    while j > 0:
        i = back[j]
        if i > 0:
            g[i - 1] = values[i - 1]
            kept.append(i - 1)
        stack = LevelStack(sums, p=p, stats=stats)
        for k in range(i, j - 1):
            stack.push(k)
        g[i:j - 1] = stack.clamped_fill(extended_value(values, i), extended_value(values, j))
        j = i
    objective = penalized_objective(values, g, alpha, p)
    logger.debug("penalized L%d alpha=%s: objective %s (table %s)", p, alpha, objective, cost[n + 1])
    return make_result(instance, g, kept, p=p, objective=objective)


# ---------------------------------------------------------------------
# Penalized L-infinity
# ---------------------------------------------------------------------


def penalized_linf(instance: Instance, alpha: float) -> RegressionResult:
    """Best trim-err threshold eps: keep a longest nondecreasing run among vertices with trim-err <= eps."""
    instance.require_linear("penalized regression")
    instance.require_numeric("penalized regression")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    values = list(instance.values)
    n = len(values)
    fitted = midpoint_regression(instance)
    spread = lp_error(values, fitted, math.inf)
    r = trim_err(instance).r

    best_score, best_eps = spread + alpha * n, None
    tracker = LisTracker()
    order = sorted(range(n), key=lambda v: (r[v], v))
    for k, v in enumerate(order):
        tracker.insert(v, values[v])
        if k + 1 < n and r[order[k + 1]] == r[v]:
            continue
        score = max(spread, r[v]) + alpha * (n - tracker.length)
        if score < best_score:
            best_score, best_eps = score, r[v]

    if best_eps is None:
        kept = []
    else:
        kept = longest_nondecreasing([(v, values[v]) for v in range(n) if r[v] <= best_eps])
    g = trim(fitted, windows(instance, kept))
    objective = penalized_objective(values, g, alpha, math.inf)
    logger.debug("penalized Linf alpha=%s: eps %s, kept %d, objective %s", alpha, best_eps, len(kept), objective)
    return make_result(
        instance, g, kept, p=math.inf, objective=objective,
        trim_error=0 if best_eps is None else best_eps,
    )


def splice_objective(values: Sequence[float], first: Sequence[float], second: Sequence[float],
                     alpha: float) -> float:
    """Penalized L-infinity objective of `first` followed by `second`, which share one vertex.

    `first` fits values[:len(first)] and `second` fits the rest starting at
    that shared vertex.
    """
    if len(first) + len(second) - 1 != len(values):
        raise ValueError("the two fits must cover the values with one shared vertex")
    if first[-1] != second[0]:
        raise ValueError(f"fits disagree on the shared vertex: {first[-1]} vs {second[0]}")
    g = list(first) + list(second[1:])
    if any(x > y for x, y in zip(g, g[1:])):
        raise ValueError("spliced function is not isotonic")
    return penalized_objective(values, g, alpha, math.inf)
