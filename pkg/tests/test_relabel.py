import math
import random

import pytest

from monorelabel.flow import kept_vertices, max_isotonic_set
from monorelabel.model import (
    LabelFunction,
    LabelScale,
    ObjectiveOrderError,
    OrderSpec,
    ValidationError,
    instance_from_values,
    is_isotonic,
    lp_error,
    validate,
)
from monorelabel.oracle import Objective, brute_best_regression, brute_min_trim_err
from monorelabel.relabel import (
    fill_windows,
    l0_regression,
    l1_isotonic_dag,
    midpoint_regression,
    optimize_then_trim_l1,
    strong_l0inf,
    trim,
    trim_err,
    trim_then_optimize_linf,
    weak_l00,
    weak_l01,
    weak_l02_approx,
    weak_l0inf,
    weighted_pava,
    windows,
)
from monorelabel.violator import build_violator_dag

L1_CASE = [0, 3, 1, -1, -2, -3, -4, 2]
LINF_CASE = [0, 0, 8, -2, 2, 2]


def _canonical_kept(instance):
    vdag = build_violator_dag(instance)
    return kept_vertices(instance, vdag, max_isotonic_set(instance, vdag))


def _sml():
    scale = LabelScale(labels=("s", "m", "l"))
    return validate(OrderSpec.linear(3), LabelFunction.from_labels(["l", "m", "s"], scale), scale)


def test_windows():
    instance = instance_from_values(L1_CASE)
    w = windows(instance, (0, 2, 7))
    assert (w.lo[1], w.hi[1]) == (0, 1)
    assert w.lo[3:7] == (1, 1, 1, 1)
    assert w.hi[3:7] == (2, 2, 2, 2)
    assert (w.lo[0], w.hi[0]) == (0, 0)

    empty = windows(instance, ())
    assert set(empty.lo) == {-4}
    assert set(empty.hi) == {3}

    isotonic = instance_from_values([1, 2, 2, 5])
    full = windows(isotonic, range(4))
    assert full.lo == full.hi == (1, 2, 2, 5)


def test_windows_are_isotonic(linear_values, dag_values):
    for seed in range(20):
        for instance in (linear_values(seed, n=8), dag_values(seed)):
            w = windows(instance, _canonical_kept(instance))
            assert is_isotonic(instance, w.lo)
            assert is_isotonic(instance, w.hi)
            assert all(lo <= hi for lo, hi in zip(w.lo, w.hi))


def test_windows_reject_a_set_that_is_not_f_isotonic():
    with pytest.raises(ValidationError, match="not f-isotonic"):
        windows(instance_from_values([2, 1]), (0, 1))


def test_trim():
    instance = instance_from_values(L1_CASE)
    w = windows(instance, (0, 2, 7))
    assert trim(instance.values, w) == (0, 1, 1, 1, 1, 1, 1, 2)
    assert trim(trim(instance.values, w), w) == trim(instance.values, w)

    instance = instance_from_values(LINF_CASE)
    fitted = midpoint_regression(instance)
    assert trim(fitted, windows(instance, (0, 1, 4, 5))) == (0, 0, 2, 2, 2, 2)


def test_trim_err():
    assert trim_err(instance_from_values(LINF_CASE)).r == (2, 2, 10, 10, 6, 6)
    assert trim_err(instance_from_values([1, 2, 3])).r == (0, 0, 0)
    assert trim_err(instance_from_values([5, 1])).r == (4, 4)
    assert trim_err(instance_from_values(LINF_CASE)).of_set((0, 1, 4, 5)) == 6


def test_fill_windows_repairs_crossing_trims():
    instance = instance_from_values([2, 5, 1, 4])
    w = windows(instance, (0, 3))
    assert trim(instance.values, w) == (2, 4, 2, 4)
    assert fill_windows(instance, w) == (2, 4, 4, 4)


def test_l0_regression():
    result = l0_regression(instance_from_values([2, 2, 2, 0, 0, 1, 1]))
    assert result.g == (0, 0, 0, 0, 0, 1, 1)
    assert result.l0_distance == 3
    assert set(result.timings) == {"violator_s", "flow_s", "fill_s"}

    isotonic = l0_regression(instance_from_values([1, 1, 3]))
    assert isotonic.g == (1, 1, 3)
    assert isotonic.l0_distance == 0

    pair = l0_regression(instance_from_values([2, 1]))
    assert pair.l0_distance == 1
    assert pair.g[0] == pair.g[1]


@pytest.mark.parametrize("seed", range(1000))
def test_l0_regression_matches_brute_force(seed, linear_values, dag_values, point_values):
    for instance in (linear_values(seed, n=7, low=0, high=3), dag_values(seed, n=7, high=3),
                     point_values(seed, n=6, high=3)):
        result = l0_regression(instance)
        assert is_isotonic(instance, result.g)
        assert result.l0_distance == brute_best_regression(instance, Objective("l0")).value


def test_weak_l01_beats_optimize_then_trim():
    instance = instance_from_values(L1_CASE)
    kept = (0, 2, 7)
    weak = weak_l01(instance, kept)
    baseline = optimize_then_trim_l1(instance, kept)
    assert weak.g == (0, 1, 1, 1, 1, 1, 1, 2)
    assert baseline.g == (0, 0, 1, 1, 1, 1, 1, 2)
    assert weak.lp_error == 16
    assert baseline.lp_error == 17


def test_weak_l01_on_isotonic_input():
    instance = instance_from_values([0, 1, 1, 3])
    result = weak_l01(instance, range(4))
    assert result.g == (0, 1, 1, 3)
    assert result.lp_error == 0


def test_l1_isotonic_dag():
    instance = instance_from_values(L1_CASE)
    assert l1_isotonic_dag(instance, instance.values) == (-1, -1, -1, -1, -1, -1, -1, 2)
    assert l1_isotonic_dag(instance, sorted(L1_CASE)) == tuple(sorted(L1_CASE))
    with pytest.raises(ValueError):
        l1_isotonic_dag(instance, instance.values, weights=[1, 1, 1, 0, 1, 1, 1, 1])


@pytest.mark.parametrize("seed", range(1000))
def test_l1_isotonic_dag_matches_brute_force(seed, dag_values, point_values):
    for instance in (dag_values(seed, n=7, high=3), point_values(seed, n=6, high=3)):
        g = l1_isotonic_dag(instance, instance.values)
        assert is_isotonic(instance, g)
        best = brute_best_regression(instance, Objective("weak", p=1, kept=()))
        assert lp_error(instance.values, g, 1) == best.value


@pytest.mark.parametrize("seed", range(1000))
def test_weak_l01_matches_brute_force(seed, linear_values, dag_values):
    for instance in (linear_values(seed, n=7), dag_values(seed, n=7)):
        kept = _canonical_kept(instance)
        result = weak_l01(instance, kept)
        assert is_isotonic(instance, result.g)
        assert all(result.g[v] == instance.values[v] for v in kept)
        assert result.lp_error == brute_best_regression(instance, Objective("weak", p=1, kept=kept)).value


def test_weak_l0inf_beats_trim_then_optimize():
    instance = instance_from_values(LINF_CASE)
    kept = (0, 1, 4, 5)
    weak = weak_l0inf(instance, kept)
    assert weak.g == (0, 0, 2, 2, 2, 2)
    assert weak.lp_error == 6
    assert weak.trim_error == 6
    assert trim_then_optimize_linf(instance, kept).lp_error == 7


@pytest.mark.parametrize("seed", range(1000))
def test_weak_l0inf_matches_brute_force(seed, linear_values, dag_values, point_values):
    for instance in (linear_values(seed, n=8), dag_values(seed, n=8), point_values(seed, n=7)):
        kept = _canonical_kept(instance)
        result = weak_l0inf(instance, kept)
        assert is_isotonic(instance, result.g)
        assert result.lp_error == brute_best_regression(instance, Objective("weak", p=math.inf, kept=kept)).value


def test_strong_l0inf():
    result = strong_l0inf(instance_from_values(LINF_CASE))
    assert result.kept_set == (0, 1, 4, 5)
    assert result.g == (0, 0, 2, 2, 2, 2)
    assert result.trim_error == 6

    isotonic = strong_l0inf(instance_from_values([0, 2, 2]))
    assert isotonic.trim_error == 0
    assert isotonic.g == (0, 2, 2)


@pytest.mark.parametrize("seed", range(1000))
def test_strong_l0inf_matches_brute_force(seed, linear_values, dag_values):
    for instance in (linear_values(seed, n=9), dag_values(seed, n=8)):
        result = strong_l0inf(instance)
        assert result.trim_error == brute_min_trim_err(instance)
        assert result.lp_error == brute_best_regression(instance, Objective("strong", p=math.inf)).value


@pytest.mark.parametrize("seed", range(1000))
def test_trimming_an_isotonic_fit_costs_at_most_the_trim_error(seed, linear_values, dag_values, point_values):
    rng = random.Random(seed)
    for instance in (linear_values(seed, n=9), dag_values(seed, n=8), point_values(seed, n=7)):
        kept = _canonical_kept(instance)
        bound = trim_err(instance).of_set(kept)
        w = windows(instance, kept)
        g = midpoint_regression(instance, [rng.randint(-4, 8) for _ in range(instance.n)])
        trimmed = trim(g, w)
        assert is_isotonic(instance, trimmed)
        assert lp_error(instance.values, trimmed, math.inf) <= max(lp_error(instance.values, g, math.inf), bound)

        mid = midpoint_regression(instance)
        assert lp_error(instance.values, trim(mid, w), math.inf) == max(lp_error(instance.values, mid, math.inf), bound)


@pytest.mark.parametrize("seed", range(1000))
def test_weak_fits_never_lose_to_the_two_step_baselines(seed, linear_values, dag_values, point_values):
    for instance in (linear_values(seed, n=9), dag_values(seed, n=8), point_values(seed, n=7)):
        kept = _canonical_kept(instance)
        assert weak_l01(instance, kept).lp_error <= optimize_then_trim_l1(instance, kept).lp_error
        assert weak_l0inf(instance, kept).lp_error <= trim_then_optimize_linf(instance, kept).lp_error


def test_weak_l00():
    result = weak_l00(instance_from_values([2, 2, 2, 0, 0, 1, 1]))
    assert result.g == (0, 0, 0, 0, 0, 1, 1)
    assert result.stage_counts == (4, 0, 3)

    pinned = weak_l00(_sml(), kept=(1,))
    assert pinned.g == (2, 2, 2)
    assert pinned.stage_counts == (1, 2, 0)

    isotonic = weak_l00(instance_from_values([0, 1, 1, 2]))
    assert isotonic.stage_counts == (4, 0, 0)


def test_weak_l00_default_kept_set_is_isotonic():
    result = weak_l00(_sml())
    assert is_isotonic(_sml(), result.g)
    assert result.kept_set == (0,)
    assert result.g == (3, 3, 3)
    assert result.stage_counts == (1, 1, 1)
    # kept=(1,) pins the middle label instead and gives (2, 2, 2) with counts (1, 2, 0)
    assert result.l0_distance == 2


@pytest.mark.parametrize("seed", range(1000))
def test_weak_l00_keeps_a_maximum_isotonic_set(seed, linear_ranks, dag_values):
    for instance in (linear_ranks(seed, n=9), dag_values(seed, n=8)):
        vdag = build_violator_dag(instance)
        largest = len(max_isotonic_set(instance, vdag))
        result = weak_l00(instance)
        assert is_isotonic(instance, result.g)
        assert result.stage_counts[0] == largest + instance.n - len(vdag.vertices)
        assert result.stage_counts[0] == instance.n - l0_regression(instance).l0_distance


def test_weighted_pava():
    assert weighted_pava([3, 1], [1, 1]) == [2, 2]
    assert weighted_pava([3, 1], [3, 1]) == [2.5, 2.5]
    assert weighted_pava([1, 2, 3], [1, 1, 1]) == [1, 2, 3]


def test_weak_l02_approx():
    instance = instance_from_values([2, 0])
    result = weak_l02_approx(instance, (0,), 1e-6)
    assert result.g == pytest.approx((2, 2), abs=1e-6)

    isotonic = instance_from_values([0, 1, 4])
    for eps in (1e-3, 1.0):
        assert weak_l02_approx(isotonic, (1,), eps).g == pytest.approx((0, 1, 4))

    with pytest.raises(ValueError):
        weak_l02_approx(instance, (0,), 0)
    dag = instance_from_values([2, 0], OrderSpec.dag(2, [(0, 1)]))
    with pytest.raises(ObjectiveOrderError):
        weak_l02_approx(dag, (0,), 1e-6)


@pytest.mark.parametrize("seed", range(1000))
def test_weak_l02_approx_is_near_the_weak_optimum(seed, linear_values):
    instance = linear_values(seed, n=7)
    kept = _canonical_kept(instance)
    eps = 1e-4
    result = weak_l02_approx(instance, kept, eps)
    assert is_isotonic(instance, result.g)
    best = brute_best_regression(instance, Objective("weak", p=2, kept=kept))
    assert result.g == pytest.approx(best.g, abs=eps)
