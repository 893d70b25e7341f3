import random
import time

import pytest

from monorelabel.cli import family_instance
from monorelabel.linear_strong import strong_l0_ordinal
from monorelabel.model import instance_from_values, is_isotonic
from monorelabel.penalized import penalized_lp
from monorelabel.relabel import l0_regression

pytestmark = pytest.mark.slow


def _timed(fn, *args):
    started = time.perf_counter()
    result = fn(*args)
    return result, time.perf_counter() - started


def test_strong_ordinal_on_a_hundred_thousand_labels():
    instance = family_instance("random", 100_000, random.Random(0), labels=10)
    result, elapsed = _timed(strong_l0_ordinal, instance)
    assert elapsed < 10
    assert is_isotonic(instance, result.g)
    assert sum(result.stage_counts) == instance.n


def test_l0_regression_when_every_vertex_violates():
    instance = family_instance("pairs", 20_000, random.Random(0))
    result, elapsed = _timed(l0_regression, instance)
    assert elapsed < 60
    assert result.l0_distance == instance.n // 2
    assert is_isotonic(instance, result.g)


def test_penalized_on_three_thousand_values():
    rng = random.Random(0)
    instance = instance_from_values([rng.randint(-50, 50) for _ in range(3000)])
    result, elapsed = _timed(penalized_lp, instance, 1.0, 2)
    assert elapsed < 60
    assert is_isotonic(instance, result.g)
