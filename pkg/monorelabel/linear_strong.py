"""
Strong secondary optimality on linear orders.

strong_l0p_linear runs the potential-successor DP: every maximum f-isotonic
set is a chain of potential successors between the sentinels f(0) = -inf and
f(n+1) = +inf, and each table cell holds the best (count, error) pair that
reaches it. strong_l0inf_linear is a longest nondecreasing subsequence that
breaks length ties on the largest trim-err. strong_l0_ordinal makes the vector
of per-distance change counts lexically largest, one distance at a time.
"""
import logging
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from itertools import accumulate
from typing import Optional, Sequence

from monorelabel.model import Instance, RegressionResult, make_result
from monorelabel.relabel import trim_err, weak_l0inf

logger = logging.getLogger(__name__)

NEG_INF = float("-inf")
POS_INF = float("inf")


# ---------------------------------------------------------------------
# Cost pairs
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class CostPair:
    c: int
    s: float
    back: int = -1

    def key(self) -> tuple:
        return self.c, -self.s, -self.back


def maxmin(a: CostPair, b: CostPair) -> CostPair:
    """Larger count wins, then smaller error, then the smaller predecessor."""
    return a if a.key() >= b.key() else b


# ---------------------------------------------------------------------
# Prefix sums and level-set stacks
# ---------------------------------------------------------------------


class PrefixSums:
    def __init__(self, values: Sequence[float]):
        self.values = list(values)
        self.s1 = [0, *accumulate(self.values)]
        self.s2 = [0, *accumulate(x * x for x in self.values)]

    def total(self, b: int, e: int) -> float:
        return self.s1[e] - self.s1[b]

    def squares(self, b: int, e: int) -> float:
        return self.s2[e] - self.s2[b]

    def mean(self, b: int, e: int) -> float:
        return self.total(b, e) / (e - b)

    def sse(self, b: int, e: int, x: float) -> float:
        """sum of (y - x)^2 over values[b:e]"""
        if e <= b:
            return 0
        return self.squares(b, e) - 2 * x * self.total(b, e) + x * x * (e - b)


class LevelStack:
    """Pool-adjacent-violators stack over a growing run of positions.

    Level k covers positions starts[k]..ends[k]-1 at value centers[k];
    cum_err[k] is the error of levels below k. p = 2 uses block means and
    squared error; p = 1 uses lower medians and absolute error, answered by
    `stats` (a PersistentStatTree over the same values).
    """

    def __init__(self, sums: PrefixSums, p: int = 2, stats=None):
        if p == 1 and stats is None:
            raise ValueError("an L1 level stack needs order statistics")
        self.sums = sums
        self.p = p
        self.stats = stats
        self.starts: list = []
        self.ends: list = []
        self.centers: list = []
        self.cum_err: list = [0]

    def __len__(self) -> int:
        return len(self.centers)

    @property
    def end(self) -> Optional[int]:
        return self.ends[-1] if self.ends else None

    def _center(self, b: int, e: int) -> float:
        if self.p == 2:
            return self.sums.mean(b, e)
        return self.stats.kth(b, e, (e - b - 1) // 2)

    def range_cost(self, b: int, e: int, x: float) -> float:
        if e <= b:
            return 0
        if self.p == 2:
            return self.sums.sse(b, e, x)
        return self.stats.abs_dev(b, e, x)

    def push(self, idx: int) -> None:
        if self.ends and idx != self.ends[-1]:
            raise ValueError(f"positions must be pushed in order; expected {self.ends[-1]}, got {idx}")
        b, e = idx, idx + 1
        c = self.sums.values[idx]
        while self.centers and self.centers[-1] > c:
            b = self.starts.pop()
            self.ends.pop()
            self.centers.pop()
            self.cum_err.pop()
            c = self._center(b, e)
        self.starts.append(b)
        self.ends.append(e)
        self.centers.append(c)
        self.cum_err.append(self.cum_err[-1] + self.range_cost(b, e, c))

    def _split(self, lo: float, hi: float) -> tuple:
        return bisect_left(self.centers, lo), bisect_right(self.centers, hi)

    def clamped_error(self, lo: float, hi: float) -> float:
        """Error of the stack's regression once it is clamped into [lo, hi]."""
        if not self.centers:
            return 0
        below, above = self._split(lo, hi)
        error = self.cum_err[above] - self.cum_err[below]
        if below > 0:
            error += self.range_cost(self.starts[0], self.ends[below - 1], lo)
        if above < len(self.centers):
            error += self.range_cost(self.starts[above], self.ends[-1], hi)
        return error

    def clamped_fill(self, lo: float, hi: float) -> list:
        fill = []
        for b, e, c in zip(self.starts, self.ends, self.centers):
            fill.extend([min(max(c, lo), hi)] * (e - b))
        return fill


# ---------------------------------------------------------------------
# Segment errors between potential successors
# ---------------------------------------------------------------------


def extended_value(values: Sequence[float], i: int) -> float:
    """Value at extended position i (0 and n+1 are the sentinels)."""
    if i == 0:
        return NEG_INF
    if i == len(values) + 1:
        return POS_INF
    return values[i - 1]


def _successor_errors(values: Sequence[float], sums: PrefixSums, i: int, p: int):
    """Yield (j, error) for every potential successor j of extended position i."""
    n = len(values)
    a = extended_value(values, i)
    stack = LevelStack(sums) if p == 2 else None
    dev = 0
    best_suffix = 0
    bound = POS_INF
    for j in range(i + 1, n + 2):
        if j > i + 1:
            k = j - 2
            if stack is not None:
                stack.push(k)
            elif i > 0:
                x = values[k]
                dev += abs(x - a)
                best_suffix = min(0, best_suffix + (1 if x < a else -1))
        b = extended_value(values, j)
        # the right sentinel follows i only when no interior value >= a lies between
        if a <= b < bound or (j == n + 1 and bound == POS_INF):
            if p == 2:
                error = stack.clamped_error(a, b)
            elif i == 0:
                error = sums.total(0, j - 1) - (j - 1) * b if j <= n else 0
            elif j == n + 1:
                error = dev
            else:
                error = dev + (b - a) * best_suffix
            yield j, error
            if b == a:
                break
        if j <= n and b >= a:
            bound = min(bound, b)


def segment_lp_errors(i: int, values: Sequence[float], p: int) -> dict:
    """Optimal Lp error (summed |.|^p) of the fill between i and each potential successor.

    Positions are extended: 0 and len(values)+1 are the sentinels.
    """
    if p not in (1, 2):
        raise ValueError(f"segment errors are defined for p in (1, 2), got {p}")
    return dict(_successor_errors(values, PrefixSums(values), i, p))


def _segment_fill(values: Sequence[float], sums: PrefixSums, i: int, j: int, p: int) -> list:
    n = len(values)
    a, b = extended_value(values, i), extended_value(values, j)
    interior = values[i:j - 1]
    if not interior:
        return []
    if p == 2:
        stack = LevelStack(sums)
        for k in range(i, j - 1):
            stack.push(k)
        return stack.clamped_fill(a, b)
    if i == 0:
        return [b] * len(interior)
    if j == n + 1:
        return [a] * len(interior)
    # the shortest suffix with the most negative (low - high) tally moves up to b
    split, best, run = len(interior), 0, 0
    for k in range(len(interior) - 1, -1, -1):
        run += 1 if interior[k] < a else -1
        if run < best:
            split, best = k, run
    return [a] * split + [b] * (len(interior) - split)


def strong_l0p_linear(instance: Instance, p: int) -> RegressionResult:
    """Maximum kept set and fill minimizing the summed Lp error, p in (1, 2)."""
    instance.require_linear(f"strong L0,{p}")
    instance.require_numeric(f"strong L0,{p}")
    if p not in (1, 2):
        raise ValueError(f"strong L0,p on linear orders supports p in (1, 2), got {p}")
    values = list(instance.values)
    n = len(values)
    sums = PrefixSums(values)

    best: list = [None] * (n + 2)
    best[0] = CostPair(0, 0)
    for i in range(n + 1):
        if best[i] is None:
            continue
        for j, error in _successor_errors(values, sums, i, p):
            cand = CostPair(best[i].c + 1, best[i].s + error, i)
            best[j] = cand if best[j] is None else maxmin(best[j], cand)

    g: list = [None] * n
    kept = []
    j = n + 1
    while j > 0:
        i = best[j].back
        if i > 0:
            g[i - 1] = values[i - 1]
            kept.append(i - 1)
        g[i:j - 1] = _segment_fill(values, sums, i, j, p)
        j = i
    logger.debug("strong L0,%d: kept %d of %d, error %s", p, len(kept), n, best[n + 1].s)
    return make_result(instance, g, kept, p=p, objective=best[n + 1].s)


# ---------------------------------------------------------------------
# Strong L0,inf
# ---------------------------------------------------------------------


class SegmentTree:
    """Array with O(log n) updates and range reductions under an associative operation."""

    def __init__(self, capacity: int, operation, neutral_element):
        assert capacity > 0 and capacity & (capacity - 1) == 0, "capacity must be positive and a power of 2."
        self._capacity = capacity
        self._value = [neutral_element] * (2 * capacity)
        self._operation = operation
        self._neutral_element = neutral_element

    def reduce(self, start: int = 0, end: Optional[int] = None):
        """operation over items start..end-1"""
        if end is None:
            end = self._capacity
        result = self._neutral_element
        start += self._capacity
        end += self._capacity
        while start < end:
            if start & 1:
                result = self._operation(result, self._value[start])
                start += 1
            if end & 1:
                end -= 1
                result = self._operation(result, self._value[end])
            start >>= 1
            end >>= 1
        return result

    def __setitem__(self, idx: int, val) -> None:
        idx += self._capacity
        self._value[idx] = val
        idx >>= 1
        while idx >= 1:
            self._value[idx] = self._operation(self._value[2 * idx], self._value[2 * idx + 1])
            idx >>= 1

    def __getitem__(self, idx: int):
        assert 0 <= idx < self._capacity
        return self._value[self._capacity + idx]


def strong_l0inf_linear(instance: Instance) -> RegressionResult:
    """Longest nondecreasing subsequence with the smallest largest trim-err, then the weak L0,inf fill."""
    instance.require_linear("strong L0,inf (linear)")
    instance.require_numeric("strong L0,inf")
    r = trim_err(instance).r
    capacity = 1
    while capacity < instance.scale.size + 1:
        capacity *= 2
    # entries are (length, -largest trim-err, -index); the empty chain is (0, 0, 1)
    tree = SegmentTree(capacity, max, (0, 0, 1))
    back = [-1] * instance.n
    top = (0, 0, 1)
    for i, rank in enumerate(instance.ranks):
        length, neg_err, neg_idx = tree.reduce(0, rank + 1)
        entry = (length + 1, min(neg_err, -r[i]), -i)
        back[i] = -neg_idx
        if entry > tree[rank]:
            tree[rank] = entry
        top = max(top, entry)

    kept = []
    i = -top[2]
    while i >= 0:
        kept.append(i)
        i = back[i]
    logger.debug("strong L0,inf (linear): kept %d, trim-err %s", len(kept), -top[1])
    return weak_l0inf(instance, sorted(kept))


# ---------------------------------------------------------------------
# Strong L0 on ordinal labels
# ---------------------------------------------------------------------


@dataclass
class StageTable:
    """Stage s of the ordinal solver over the rows start..start+len(labels)-1.

    Scores pack the change counts for distances 0..s into one integer, most
    significant digit first, so comparing scores compares the stage vectors
    lexically. A cell (i, labels[i][t]) with T[i][t] < m is dead from here on.
    Positions passed to the methods are global.
    """

    s: int
    labels: list
    A: list
    B: list
    T: list
    m: int
    start: int = 0

    def _column(self, i: int, j: int) -> Optional[int]:
        r = i - self.start
        if not 0 <= r < len(self.labels):
            return None
        t = bisect_left(self.labels[r], j)
        return t if t < len(self.labels[r]) and self.labels[r][t] == j else None

    def is_live(self, i: int, j: int) -> bool:
        t = self._column(i, j)
        return t is not None and self.T[i - self.start][t] == self.m

    def predecessor_interval(self, i: int, j: int) -> Optional[tuple]:
        """Lowest and highest labels at i-1 that continue an optimal path through (i, j)."""
        if i == self.start or not self.is_live(i, j):
            return None
        r = i - self.start
        after = self.B[r][self._column(i, j)]
        fits = [k for k, a in zip(self.labels[r - 1], self.A[r - 1]) if k <= j and a >= 0 and a + after == self.m]
        return (fits[0], fits[-1]) if fits else None

    def rows(self, a: int, b: int) -> "StageTable":
        """The same stage restricted to its rows a..b-1 (local indices)."""
        return StageTable(
            s=self.s, labels=self.labels[a:b], A=self.A[a:b], B=self.B[a:b], T=self.T[a:b],
            m=self.m, start=self.start + a,
        )


class StrongOrdinalSolver:
    """Staged DP over (position, label) cells.

    Each stage keeps only the cells on some optimal path. A row left with a
    single live cell is settled, since every optimal path runs through it; the
    runs of unsettled rows between settled ones are solved on their own from
    then on.
    """

    def __init__(self, ranks: Sequence[int], n_labels: int, keep_tables: bool = False):
        self.ranks = list(ranks)
        self.n_labels = n_labels
        self.base = len(self.ranks) + 1
        self.keep_tables = keep_tables
        self.tables: list = []
        self.stages_run: list = []

    def weights(self, s: int) -> list:
        return [self.base ** (s - d) if d <= s else 0 for d in range(self.n_labels)]

    def _forward(self, ranks: list, labels: list, wt: list) -> list:
        A = []
        for i, (row, fi) in enumerate(zip(labels, ranks)):
            if i == 0:
                A.append([wt[abs(j - fi)] for j in row])
                continue
            prev = labels[i - 1]
            best = list(accumulate(A[-1], max))
            out = []
            for j in row:
                t = bisect_right(prev, j) - 1
                out.append(best[t] + wt[abs(j - fi)] if t >= 0 and best[t] >= 0 else -1)
            A.append(out)
        return A

    def _backward(self, ranks: list, labels: list, wt: list) -> list:
        n = len(labels)
        B = [None] * n
        for i in range(n - 1, -1, -1):
            row, fi = labels[i], ranks[i]
            if i == n - 1:
                B[i] = [wt[abs(j - fi)] for j in row]
                continue
            nxt = labels[i + 1]
            best = list(accumulate(reversed(B[i + 1]), max))[::-1]
            out = []
            for j in row:
                t = bisect_left(nxt, j)
                out.append(best[t] + wt[abs(j - fi)] if t < len(nxt) and best[t] >= 0 else -1)
            B[i] = out
        return B

    def _stage(self, s: int, start: int, labels: list) -> tuple:
        ranks = self.ranks[start:start + len(labels)]
        wt = self.weights(s)
        A = self._forward(ranks, labels, wt)
        B = self._backward(ranks, labels, wt)
        T = [
            [a + b - wt[abs(j - fi)] if a >= 0 and b >= 0 else -1 for j, a, b in zip(row, ar, br)]
            for row, fi, ar, br in zip(labels, ranks, A, B)
        ]
        m = max(max(row) for row in T)
        live = [[j for j, t in zip(row, trow) if t == m] for row, trow in zip(labels, T)]
        return StageTable(s=s, labels=labels, A=A, B=B, T=T, m=m, start=start), live

    def _has_distance(self, start: int, labels: list, s: int) -> bool:
        return any(abs(j - self.ranks[start + r]) == s for r, row in enumerate(labels) for j in row)

    def _settle(self, table: StageTable, live: list, g: list) -> list:
        """Write settled rows into g; return the unsettled runs as (start, labels, table)."""
        segments = []
        run = None
        for r, row in enumerate(live + [[None]]):
            if len(row) > 1:
                if run is None:
                    run = r
                continue
            if run is not None:
                segments.append((table.start + run, live[run:r], table.rows(run, r)))
                run = None
            if r < len(live):
                g[table.start + r] = row[0]
        return segments

    def solve(self) -> list:
        """Ranks of the lexically best isotonic relabeling."""
        g: list = [None] * len(self.ranks)
        pending = [(0, [list(range(1, self.n_labels + 1)) for _ in self.ranks], None)] if self.ranks else []
        for s in range(self.n_labels):
            if not pending:
                break
            carried = []
            ran = False
            for start, labels, table in pending:
                if table is not None and not self._has_distance(start, labels, s):
                    carried.append((start, labels, table))
                    continue
                table, live = self._stage(s, start, labels)
                ran = True
                if self.keep_tables:
                    self.tables.append(table)
                carried.extend(self._settle(table, live, g))
            if ran:
                self.stages_run.append(s)
            pending = carried
            logger.debug("ordinal stage %d: %d unsettled runs", s, len(pending))
        for start, _, table in pending:
            g[start:start + len(table.labels)] = self._reconstruct(table)
        return g

    def _reconstruct(self, table: StageTable) -> list:
        wt = self.weights(table.s)
        ranks = self.ranks[table.start:table.start + len(table.labels)]
        t0 = next(t for t, v in enumerate(table.T[0]) if v == table.m)
        g = [table.labels[0][t0]]
        score = table.A[0][t0]
        for r in range(1, len(ranks)):
            for k, after in zip(table.labels[r], table.B[r]):
                if k >= g[-1] and after >= 0 and score + after == table.m:
                    break
            else:
                raise AssertionError(f"no optimal continuation at index {table.start + r}")
            g.append(k)
            score += wt[abs(k - ranks[r])]
        return g


def strong_l0_ordinal(instance: Instance, keep_tables: bool = False) -> RegressionResult:
    """Isotonic relabeling whose counts of 0, 1, 2, ... label changes are lexically largest."""
    instance.require_linear("strong L0 (ordinal)")
    solver = StrongOrdinalSolver(instance.ranks, instance.scale.size, keep_tables=keep_tables)
    ranks = solver.solve()
    g = [instance.scale.value_of(r) for r in ranks]
    kept = [v for v, (a, b) in enumerate(zip(instance.ranks, ranks)) if a == b]
    result = make_result(instance, g, kept)
    logger.debug("strong L0 (ordinal): stages %s, counts %s", solver.stages_run, result.stage_counts)
    return result
