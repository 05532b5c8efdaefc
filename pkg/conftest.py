"""
Shared fixtures, brute-force oracles and hypothesis strategies.

The oracles enumerate every object pair directly from the raw input, with
no grid, no adjacency structure and no numpy, so they share nothing with
the code under test except the definitions.
"""

import math
from typing import Dict, List, Sequence, Tuple

import networkx as nx
import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from graph_space import WeightedGraph, build_graph, from_networkx

settings.register_profile("sampler", deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("sampler")


def brute_force_graph_scores(labels: Sequence[str], edges: Sequence[Tuple[str, str, float]]) -> Tuple[List[int], List[int]]:
    index = {label: i for i, label in enumerate(labels)}
    n = len(labels)
    weight: Dict[Tuple[int, int], float] = {}
    for u, v, w in edges:
        weight[(index[u], index[v])] = w
        weight[(index[v], index[u])] = w
    degree = [0] * n
    rank = [0] * n
    for o in range(n):
        neighbors = [x for x in range(n) if (o, x) in weight]
        degree[o] = len(neighbors)
        if neighbors:
            best = max(weight[(o, x)] for x in neighbors)
            for x in neighbors:
                if weight[(o, x)] == best:
                    rank[x] += 1
    return degree, rank


def brute_force_point_scores(points: Sequence[Sequence[float]], radius: float, step: float) -> Tuple[List[int], List[int]]:
    n = len(points)
    degree = [0] * n
    rank = [0] * n
    for o in range(n):
        neighbors = []
        for x in range(n):
            if x == o:
                continue
            d2 = sum((a - b) ** 2 for a, b in zip(points[o], points[x]))
            if d2 <= radius * radius:
                neighbors.append((math.floor(math.sqrt(d2) / step) * step, x))
        degree[o] = len(neighbors)
        if neighbors:
            best = min(disc for disc, _ in neighbors)
            for disc, x in neighbors:
                if disc == best:
                    rank[x] += 1
    return degree, rank


@st.composite
def weighted_graphs(draw, max_nodes: int = 50, max_weight: int = 5):
    """(labels, edges): small integer weights so ties at the maximum are common"""
    n = draw(st.integers(min_value=1, max_value=max_nodes))
    labels = [f"n{i}" for i in range(n)]
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=min(len(pairs), 4 * n))) if pairs else []
    edges = [(labels[u], labels[v], float(draw(st.integers(1, max_weight)))) for u, v in chosen]
    return labels, edges


@st.composite
def point_sets(draw, max_points: int = 200):
    """
    (rows, radius, step) on a small box so neighborhoods and duplicates occur.

    Coordinates, radius and step are integer multiples of one spacing; with
    a fractional spacing many pairs sit on the radius and on cell edges up to
    rounding.
    """
    dim = draw(st.integers(min_value=1, max_value=3))
    n = draw(st.integers(min_value=0, max_value=max_points))
    extent = draw(st.integers(min_value=5, max_value=200))
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    spacing = draw(st.sampled_from([1.0, 0.1, 0.3, 0.7, 1.1]))
    rows = (np.random.default_rng(seed).integers(-extent, extent + 1, size=(n, dim)) * spacing).tolist()
    radius = draw(st.integers(min_value=1, max_value=60)) * spacing
    step = draw(st.integers(min_value=1, max_value=30)) * spacing
    return rows, radius, step


def graph_from(labels, edges) -> WeightedGraph:
    return build_graph(edges, nodes=labels)


@pytest.fixture
def four_node_edges():
    return [("a", "b", 3.0), ("b", "c", 1.0), ("c", "d", 2.0), ("a", "c", 1.0)]


@pytest.fixture
def four_node_graph(four_node_edges) -> WeightedGraph:
    return build_graph(four_node_edges)


@pytest.fixture
def three_points():
    return [[0.0, 0.0], [0.0, 40.0], [0.0, 90.0]]


@pytest.fixture(scope="session")
def lesmis() -> WeightedGraph:
    return from_networkx(nx.les_miserables_graph())
