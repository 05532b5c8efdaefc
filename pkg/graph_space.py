"""
Weighted undirected graphs as a neighborhood provider.

Adjacency is proximity and the edge weight is similarity: the neighborhood
of a node is the set of its adjacent nodes and its nearest neighbors are
the adjacent nodes joined by the heaviest incident edge (all of them on a
tie).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from errors import InputError
from sampler import NeighborhoodProvider, SamplerConfig

logger = logging.getLogger(__name__)

Edge = Tuple[str, str, float]
Adjacency = Tuple[Tuple[int, float], ...]


def _check_label(label, position: int) -> str:
    if not isinstance(label, str) or not label.strip():
        raise InputError("node labels must be non-empty strings", line=position, content=str(label))
    if label != label.strip() or any(c in label for c in "\t\r\n"):
        raise InputError("node labels may not contain tabs, line breaks or surrounding spaces",
                         line=position, content=label)
    return label


@dataclass(frozen=True)
class WeightedGraph:
    """Immutable undirected graph with positive edge weights and dense node ids"""

    labels: Tuple[str, ...]
    adjacency: Tuple[Adjacency, ...]
    _index: Dict[str, int] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self._index is None:
            object.__setattr__(self, "_index", {label: i for i, label in enumerate(self.labels)})

    @property
    def node_count(self) -> int:
        return len(self.labels)

    @property
    def edge_count(self) -> int:
        return sum(len(adj) for adj in self.adjacency) // 2

    def validate_id(self, o: int) -> int:
        if isinstance(o, bool) or not isinstance(o, (int, np.integer)) or not 0 <= o < len(self.labels):
            raise InputError(f"unknown node id {o!r}")
        return int(o)

    def label_of(self, o: int) -> str:
        return self.labels[self.validate_id(o)]

    def id_of(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise InputError(f"unknown node label {label!r}") from None

    def degree(self, o: int) -> int:
        return len(self.adjacency[self.validate_id(o)])

    def degrees(self) -> List[int]:
        return [len(adj) for adj in self.adjacency]

    def edges(self) -> Iterator[Tuple[int, int, float]]:
        """Each undirected edge once as (u, v, weight) with u < v, ascending"""
        for u, adj in enumerate(self.adjacency):
            for v, w in adj:
                if u < v:
                    yield u, v, w

    def weights(self) -> List[float]:
        return [w for _, _, w in self.edges()]

    def neighborhood(self, o: int) -> FrozenSet[int]:
        return frozenset(v for v, _ in self.adjacency[self.validate_id(o)])

    def nearest_neighbors(self, o: int) -> FrozenSet[int]:
        adj = self.adjacency[self.validate_id(o)]
        if not adj:
            return frozenset()
        best = max(w for _, w in adj)
        return frozenset(v for v, w in adj if w == best)

    def induced_subgraph(self, nodes: Iterable[int]) -> "WeightedGraph":
        """Subgraph on nodes keeping every edge with both endpoints inside; ids follow ascending order"""
        keep = sorted({self.validate_id(o) for o in nodes})
        remap = {old: new for new, old in enumerate(keep)}
        adjacency = tuple(
            tuple((remap[v], w) for v, w in self.adjacency[old] if v in remap)
            for old in keep
        )
        return WeightedGraph(labels=tuple(self.labels[o] for o in keep), adjacency=adjacency)

    def as_provider(self, config: Optional[SamplerConfig] = None) -> "GraphSpace":
        return GraphSpace(self)


def build_graph(edges: Iterable[Edge], nodes: Sequence[str] = ()) -> WeightedGraph:
    """
    Build a WeightedGraph from (label, label, weight) triples.

    Labels listed in nodes get ids first, in order (this is how isolated
    nodes enter a graph); the remaining labels get ids in order of first
    appearance in edges. Errors name the 1-based position of the edge.
    """
    index: Dict[str, int] = {}
    labels: List[str] = []
    neighbors: List[Dict[int, float]] = []

    def intern(label: str, position: int) -> int:
        label = _check_label(label, position)
        if label not in index:
            index[label] = len(labels)
            labels.append(label)
            neighbors.append({})
        return index[label]

    for position, label in enumerate(nodes, 1):
        intern(label, position)

    for position, edge in enumerate(edges, 1):
        try:
            source, target, weight = edge
        except (TypeError, ValueError):
            raise InputError("expected a (source, target, weight) triple", line=position, content=repr(edge)) from None
        try:
            weight = float(weight)
        except (TypeError, ValueError):
            raise InputError("edge weight is not a number", line=position, content=repr(weight)) from None
        if not (math.isfinite(weight) and weight > 0):
            raise InputError("edge weight must be a finite positive number", line=position, content=repr(weight))
        u = intern(source, position)
        v = intern(target, position)
        if u == v:
            raise InputError("self-loop", line=position, content=source)
        if v in neighbors[u]:
            raise InputError("duplicate edge", line=position, content=f"{source} - {target}")
        neighbors[u][v] = weight
        neighbors[v][u] = weight

    adjacency = tuple(tuple(sorted(adj.items())) for adj in neighbors)
    graph = WeightedGraph(labels=tuple(labels), adjacency=adjacency, _index=index)
    logger.debug("built graph with %d nodes and %d edges", graph.node_count, graph.edge_count)
    return graph


def from_networkx(g: nx.Graph, weight: str = "weight") -> WeightedGraph:
    """WeightedGraph from a networkx graph; node order is preserved, missing weights count as 1"""
    if g.is_directed():
        raise InputError("directed graphs are not supported")
    edges = ((str(u), str(v), data.get(weight, 1.0)) for u, v, data in g.edges(data=True))
    return build_graph(edges, nodes=[str(n) for n in g.nodes])


def to_networkx(graph: WeightedGraph) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(graph.labels)
    g.add_weighted_edges_from((graph.labels[u], graph.labels[v], w) for u, v, w in graph.edges())
    return g


class GraphSpace(NeighborhoodProvider):
    """NeighborhoodProvider over a WeightedGraph"""

    def __init__(self, graph: WeightedGraph):
        self.graph = graph
        self._max_weight = [max((w for _, w in adj), default=0.0) for adj in graph.adjacency]

    @property
    def size(self) -> int:
        return self.graph.node_count

    def validate_id(self, o: int) -> int:
        return self.graph.validate_id(o)

    def neighborhood(self, o: int) -> FrozenSet[int]:
        return self.graph.neighborhood(o)

    def nearest_neighbors(self, o: int) -> FrozenSet[int]:
        return self.graph.nearest_neighbors(o)

    def label_of(self, o: int) -> str:
        return self.graph.label_of(o)

    def id_of(self, label: str) -> int:
        return self.graph.id_of(label)

    def subgraph(self, members: Sequence[int]) -> WeightedGraph:
        return self.graph.induced_subgraph(members)

    def accumulate(self, objects: np.ndarray, degree: np.ndarray, rank: np.ndarray) -> None:
        adjacency = self.graph.adjacency
        max_weight = self._max_weight
        for o in objects.tolist():
            adj = adjacency[o]
            degree[o] += len(adj)
            best = max_weight[o]
            for v, w in adj:
                if w == best:
                    rank[v] += 1
