import random

import pytest

from monorelabel.model import OrderSpec, instance_from_ranks, instance_from_values


def _random_edges(rng, n, prob):
    # edges only go forward in a hidden numbering, so the graph is acyclic
    perm = list(range(n))
    rng.shuffle(perm)
    return [(perm[a], perm[b]) for a in range(n) for b in range(a + 1, n) if rng.random() < prob]


@pytest.fixture
def linear_values():
    """seed -> numeric linear instance with small integer values."""
    def make(seed, n=None, low=-3, high=3):
        rng = random.Random(seed)
        size = n or rng.randint(1, 8)
        return instance_from_values([rng.randint(low, high) for _ in range(size)])
    return make


@pytest.fixture
def linear_ranks():
    """seed -> ordinal linear instance on labels 1..n_labels."""
    def make(seed, n=None, n_labels=4):
        rng = random.Random(seed)
        size = n or rng.randint(1, 7)
        return instance_from_ranks([rng.randint(1, n_labels) for _ in range(size)], n_labels=n_labels)
    return make


@pytest.fixture
def dag_values():
    def make(seed, n=None, prob=0.35, low=0, high=4):
        rng = random.Random(seed)
        size = n or rng.randint(2, 8)
        order = OrderSpec.dag(size, _random_edges(rng, size, prob))
        return instance_from_values([rng.randint(low, high) for _ in range(size)], order)
    return make


@pytest.fixture
def point_values():
    def make(seed, n=None, d=2, grid=4, low=0, high=4):
        rng = random.Random(seed)
        size = n or rng.randint(2, 8)
        coords = [[rng.randint(0, grid) for _ in range(d)] for _ in range(size)]
        return instance_from_values([rng.randint(low, high) for _ in range(size)], OrderSpec.points(coords))
    return make
