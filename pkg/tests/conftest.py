"""Shared helpers for the test suite."""

import pytest

from cubic_sudoku import generate_graph
from cubic_sudoku import verification as _vf
from cubic_sudoku.experiments import _complete_partial
from cubic_sudoku.rng import DeterministicRandomSource


def cubic_as_generic(g):
    return _vf.graph_from_cubic(g)


def any_proper_colouring(graph, k=3):
    """First proper k-colouring found, or None."""
    return _complete_partial(graph, [0] * (graph.n + 1), k)


def random_subset(n, rng: DeterministicRandomSource, p=0.5):
    return [v for v in range(1, n + 1) if rng.uniform() < p]


@pytest.fixture
def rng():
    return DeterministicRandomSource(123456)


def sample_small_triples(count=200, seed=9):
    """(graph, subset, colouring) triples on cubic multigraphs with n <= 12."""
    triples = []
    rng = DeterministicRandomSource(seed)
    trial = 0
    while len(triples) < count:
        n = (4, 6, 8, 10, 12)[trial % 5]
        g = cubic_as_generic(generate_graph(n, seed * 100_003 + trial))
        trial += 1
        colouring = any_proper_colouring(g, 3)
        if colouring is None:
            continue
        triples.append((g, random_subset(n, rng), colouring))
    return triples
