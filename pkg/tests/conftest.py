import numpy as np
import pytest

from flownet import TimeSlice


def make_slice(weights, nodes=None, year=2014):
    """Build a slice from an edge->weight dict, inferring the roster."""
    if nodes is None:
        nodes = {n for edge in weights for n in edge}
    return TimeSlice.from_weights(year, nodes, weights)


@pytest.fixture
def slice_factory():
    return make_slice


def random_digraph(rng: np.random.Generator, max_nodes=6, max_weight=4):
    """Random weighted digraph as an edge dict, guaranteed at least one edge."""
    n = int(rng.integers(2, max_nodes + 1))
    names = [f"N{i}" for i in range(n)]
    weights = {}
    p = rng.uniform(0.2, 0.7)
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < p:
                weights[(names[i], names[j])] = int(rng.integers(1, max_weight + 1))
    if not weights:
        i, j = rng.choice(n, size=2, replace=False)
        weights[(names[i], names[j])] = int(rng.integers(1, max_weight + 1))
    return names, weights
