import math

import pytest

from chainlift.covers import GroupHom, build_cover
from chainlift.groups import cyclic_group
from chainlift.homotopy import presentation_at_scale
from chainlift.space import build_scale_graph, sample_circle, wedge_graph_space


def chord(n: int, k: int, radius: float = 1.0) -> float:
    """Closed-form chord length between k-th neighbors on the n-circle."""
    return 2.0 * radius * math.sin(k * math.pi / n)


@pytest.fixture(scope="session")
def circle12():
    return sample_circle(12, 1.0)


@pytest.fixture(scope="session")
def cycle_graph(circle12):
    """The 12-cycle: scale graph of the circle sample below the second chord."""
    return build_scale_graph(circle12, 0.6, 0)


@pytest.fixture(scope="session")
def cycle_presentation(cycle_graph):
    return presentation_at_scale(cycle_graph)


@pytest.fixture(scope="session")
def figure_eight():
    return wedge_graph_space([6, 6])


@pytest.fixture(scope="session")
def eight_graph(figure_eight):
    return build_scale_graph(figure_eight, 1.5, 0)


@pytest.fixture(scope="session")
def eight_presentation(eight_graph):
    return presentation_at_scale(eight_graph)


@pytest.fixture(scope="session")
def cycle_cover_z2(cycle_graph, cycle_presentation):
    hom = GroupHom(cycle_presentation, cyclic_group(2), [1])
    return build_cover(cycle_graph, cycle_presentation, hom)


@pytest.fixture(scope="session")
def cycle_cover_z3(cycle_graph, cycle_presentation):
    hom = GroupHom(cycle_presentation, cyclic_group(3), [1])
    return build_cover(cycle_graph, cycle_presentation, hom)


@pytest.fixture(scope="session")
def cycle_cover_z4(cycle_graph, cycle_presentation):
    hom = GroupHom(cycle_presentation, cyclic_group(4), [1])
    return build_cover(cycle_graph, cycle_presentation, hom)


@pytest.fixture(scope="session")
def eight_cover_z2(eight_graph, eight_presentation):
    hom = GroupHom(eight_presentation, cyclic_group(2), [1, 1])
    return build_cover(eight_graph, eight_presentation, hom)


def bfs_dist(n_vertices, edges, src):
    """Independent hop-distance oracle over an explicit edge list."""
    adjacency = [[] for _ in range(n_vertices)]
    for a, b in edges:
        adjacency[a].append(b)
        adjacency[b].append(a)
    dist = [-1] * n_vertices
    dist[src] = 0
    frontier = [src]
    while frontier:
        nxt = []
        for a in frontier:
            for b in adjacency[a]:
                if dist[b] < 0:
                    dist[b] = dist[a] + 1
                    nxt.append(b)
        frontier = nxt
    return dist


def winding_oracle(presentation, n):
    """Winding-number map on generators of a circle-sample presentation.

    Computed from signed angular steps, independently of any matrix
    algebra; asserts every relator has winding zero.
    """

    def step(p, q):
        d = (q - p) % n
        return d - n if d > n // 2 else d

    degrees = []
    for i in range(presentation.rank):
        loop = presentation.generator_loop(i)
        total = sum(step(a, b) for a, b in zip(loop, loop[1:]))
        assert total % n == 0
        degrees.append(total // n)
    for rel in presentation.relators:
        assert sum(e * degrees[s] for s, e in rel.letters) == 0
    return degrees
