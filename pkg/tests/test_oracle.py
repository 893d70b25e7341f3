import math

import pytest

from monorelabel.model import instance_from_ranks, instance_from_values
from monorelabel.oracle import (
    BudgetExceeded,
    Objective,
    OracleBudget,
    brute_best_regression,
    brute_max_isotonic_set,
    brute_min_trim_err,
)


def test_max_isotonic_set_witnesses():
    size, witnesses = brute_max_isotonic_set(instance_from_values([2, 1, 4, 3, 6, 5]))
    assert size == 3
    assert len(witnesses) == 8
    assert witnesses[0] == (0, 2, 4)

    size, witnesses = brute_max_isotonic_set(instance_from_values([1, 2, 2, 3]))
    assert (size, witnesses) == (4, [(0, 1, 2, 3)])

    size, witnesses = brute_max_isotonic_set(instance_from_values([0, 3, 1, -1, -2, -3, -4, 2]))
    assert (size, witnesses) == (3, [(0, 2, 7)])


def test_strong_l1_reference():
    answer = brute_best_regression(instance_from_values([0, 5, 5, -1, 3, 3]), Objective("strong", p=1))
    assert answer.g == (0, 3, 3, 3, 3, 3)
    assert answer.value == 8


def test_weak_linf_reference():
    instance = instance_from_values([0, 0, 8, -2, 2, 2])
    answer = brute_best_regression(instance, Objective("weak", p=math.inf, kept=(0, 1, 4, 5)))
    assert answer.value == 6
    assert brute_min_trim_err(instance) == 6


def test_l0_of_isotonic_input():
    instance = instance_from_values([1, 2, 3])
    answer = brute_best_regression(instance, Objective("l0"))
    assert answer.value == 0
    assert answer.g == (1, 2, 3)


def test_stage_vector_reference():
    answer = brute_best_regression(instance_from_values([2, 2, 2, 0, 0, 1, 1]), Objective("stages"))
    assert answer.value == (4, 0, 3)
    assert answer.g == (0, 0, 0, 0, 0, 1, 1)


@pytest.mark.parametrize("seed", range(1000))
def test_max_set_size_is_n_minus_distance(seed, linear_values, dag_values):
    for instance in (linear_values(seed, n=7, low=0, high=4), dag_values(seed, n=7)):
        size, _ = brute_max_isotonic_set(instance)
        assert size == instance.n - brute_best_regression(instance, Objective("l0")).value


def test_budget():
    with pytest.raises(BudgetExceeded):
        brute_max_isotonic_set(instance_from_values(list(range(15))))
    small = OracleBudget(max_n=3, max_labels=2, max_distinct_values=2)
    with pytest.raises(BudgetExceeded):
        small.check(instance_from_values([1, 2, 3, 4]))
    with pytest.raises(BudgetExceeded):
        small.check(instance_from_ranks([1, 3], n_labels=3), grid=True)
    with pytest.raises(BudgetExceeded):
        small.check(instance_from_values([1, 2, 3]))
    small.check(instance_from_values([1, 2]), grid=True)


def test_budget_reads_settings():
    budget = OracleBudget.from_settings()
    assert budget.max_n >= 1
    assert budget.max_labels >= 1


def test_objective_arguments():
    instance = instance_from_values([2, 1])
    with pytest.raises(ValueError):
        brute_best_regression(instance, Objective("weak", p=1))
    with pytest.raises(ValueError):
        brute_best_regression(instance, Objective("penalized", p=1, alpha=0))
    with pytest.raises(ValueError):
        brute_best_regression(instance, Objective("nonsense"))
