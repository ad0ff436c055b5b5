import numpy as np
import pytest

from src.core.graph_generator import BipartiteMultigraph, sample_graph


@pytest.fixture
def k33():
    """K_{3,3} as three disjoint perfect matchings (cyclic shifts)."""
    return BipartiteMultigraph(n=3, d=3, matchings=np.array([[0, 1, 2], [1, 2, 0], [2, 0, 1]]))


@pytest.fixture
def triple_edge():
    """n = 1, d = 3: one V1 vertex joined to one V2 vertex by three parallel edges."""
    return BipartiteMultigraph(n=1, d=3, matchings=np.zeros((3, 1), dtype=int))


@pytest.fixture
def small_graph():
    return sample_graph(6, 3, seed=11, index=0)
