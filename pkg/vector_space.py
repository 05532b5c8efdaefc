"""
n-dimensional point data as a neighborhood provider.

Proximity is Euclidean distance within a fixed radius (boundary included);
the nearest neighbors of a point are the neighbors at the smallest
discretized distance, so near-equal neighbors tie. Radius queries go
through a uniform grid whose cells are a hair wider than the radius:
everything within the radius of a point lies in the 3^n block of cells
around its own cell, rounding included.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from errors import ConfigurationError, InputError
from graph_space import WeightedGraph, build_graph
from sampler import NeighborhoodProvider, SamplerConfig

logger = logging.getLogger(__name__)

Cell = Tuple[int, ...]

# Upper bound on query-by-candidate pairs held in memory at once by the blocked scan
BLOCK_PAIRS = 1 << 21

# Relative widening of grid cells over the radius
CELL_MARGIN = 1e-9


def _clean_label(label) -> bool:
    return isinstance(label, str) and bool(label) and not any(c in label for c in ",\r\n")


@dataclass(frozen=True, eq=False)
class PointSet:
    """N points with n float64 coordinates each, optionally carrying external ids"""

    coordinates: np.ndarray
    labels: Optional[Tuple[str, ...]] = None
    _index: Optional[Dict[str, int]] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        coords = np.array(self.coordinates, dtype=np.float64)
        if coords.ndim != 2:
            raise InputError(f"points must form a 2-D array, got shape {coords.shape}")
        if len(coords) and coords.shape[1] < 1:
            raise InputError("points need at least one coordinate")
        bad = np.flatnonzero(~np.isfinite(coords).all(axis=1))
        if len(bad):
            raise InputError(f"point {int(bad[0])} has a non-finite coordinate", content=str(coords[bad[0]].tolist()))
        coords.setflags(write=False)
        object.__setattr__(self, "coordinates", coords)
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != len(coords):
                raise InputError(f"{len(labels)} labels for {len(coords)} points")
            bad_label = next((label for label in labels if not _clean_label(label)), None)
            if bad_label is not None:
                raise InputError("point ids must be non-empty, without commas or line breaks", content=repr(bad_label))
            index = {label: i for i, label in enumerate(labels)}
            if len(index) != len(labels):
                raise InputError("point ids must be unique")
            object.__setattr__(self, "labels", labels)
            object.__setattr__(self, "_index", index)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]], labels: Optional[Sequence[str]] = None) -> "PointSet":
        if len(rows) == 0:
            return cls(np.empty((0, 0)), labels=tuple(labels) if labels is not None else None)
        return cls(np.asarray(rows, dtype=np.float64), labels=tuple(labels) if labels is not None else None)

    @property
    def size(self) -> int:
        return len(self.coordinates)

    @property
    def dimension(self) -> int:
        return self.coordinates.shape[1]

    def validate_id(self, o: int) -> int:
        if isinstance(o, bool) or not isinstance(o, (int, np.integer)) or not 0 <= o < self.size:
            raise InputError(f"unknown point id {o!r}")
        return int(o)

    def label_of(self, o: int) -> str:
        o = self.validate_id(o)
        return self.labels[o] if self.labels is not None else str(o)

    def id_of(self, label: str) -> int:
        if self._index is not None:
            try:
                return self._index[label]
            except KeyError:
                raise InputError(f"unknown point id {label!r}") from None
        try:
            return self.validate_id(int(label))
        except ValueError:
            raise InputError(f"unknown point id {label!r}") from None

    def subset(self, ids: Sequence[int]) -> "PointSet":
        ids = list(ids)
        labels = tuple(self.label_of(o) for o in ids)
        if not ids:
            return PointSet(np.empty((0, self.dimension)), labels=labels)
        return PointSet(self.coordinates[ids], labels=labels)

    def as_provider(self, config: SamplerConfig) -> "VectorSpace":
        radius, step = config.require_vector_parameters()
        return as_provider(self, radius, step)


@dataclass(frozen=True, eq=False)
class GridIndex:
    """
    Uniform grid with cells a rounding margin wider than the query radius.

    Points are grouped by cell in `order`; when the occupied cell range fits
    in 62 bits each cell is also packed into a single integer key, so whole
    batches of block lookups become one searchsorted call.
    """

    radius: float
    cell_size: float
    point_cells: np.ndarray
    order: np.ndarray
    cell_starts: np.ndarray
    cell_counts: np.ndarray
    point_keys: Optional[np.ndarray] = None
    cell_keys: Optional[np.ndarray] = None
    offset_keys: Optional[np.ndarray] = None

    @property
    def packed(self) -> bool:
        return self.cell_keys is not None

    @cached_property
    def cells(self) -> Dict[Cell, np.ndarray]:
        return {
            tuple(self.point_cells[self.order[start]].tolist()): self.order[start:start + count]
            for start, count in zip(self.cell_starts.tolist(), self.cell_counts.tolist())
        }

    def cell_of(self, o: int) -> Cell:
        return tuple(self.point_cells[o].tolist())

    def block(self, cell: Cell) -> Iterator[Cell]:
        """The cell and its 3^n - 1 adjacent cells"""
        for offset in itertools.product((-1, 0, 1), repeat=len(cell)):
            yield tuple(c + d for c, d in zip(cell, offset))

    def candidates(self, cell: Cell) -> np.ndarray:
        """Ascending ids of every point in the block around cell"""
        found = [self.cells[c] for c in self.block(cell) if c in self.cells]
        if not found:
            return np.empty(0, dtype=np.int64)
        return np.sort(np.concatenate(found))

    def lookup(self, keys: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Positions in cell_keys of the packed keys, and which of them are occupied"""
        pos = np.searchsorted(self.cell_keys, keys)
        np.minimum(pos, len(self.cell_keys) - 1, out=pos)
        return pos, self.cell_keys[pos] == keys


def _cell_size(coordinates: np.ndarray, radius: float) -> float:
    # floor(x / size) carries a rounding error of a few ulps of x / size; the
    # margin keeps two points within the radius at most one cell apart
    scale = float(np.abs(coordinates).max()) / radius if coordinates.size else 0.0
    return radius * (1.0 + CELL_MARGIN + 4.0 * np.finfo(np.float64).eps * scale)


def _packing(point_cells: np.ndarray) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """(origin, strides) of a row-major key over the occupied range plus one cell each side"""
    origin = point_cells.min(axis=0) - 1
    spans = (point_cells.max(axis=0) - origin + 2).tolist()
    strides = []
    total = 1
    for span in reversed(spans):
        strides.append(total)
        total *= int(span)
    if total >= 1 << 62:
        return None
    return origin, np.array(strides[::-1], dtype=np.int64)


def build_grid_index(ps: PointSet, radius: float) -> GridIndex:
    if not (math.isfinite(radius) and radius > 0):
        raise ConfigurationError(f"radius must be a finite positive number, got {radius}")
    empty = np.empty(0, dtype=np.int64)
    if ps.size == 0:
        return GridIndex(radius=radius, cell_size=radius, point_cells=np.empty((0, ps.dimension), dtype=np.int64),
                         order=empty, cell_starts=empty, cell_counts=empty)

    cell_size = _cell_size(ps.coordinates, radius)
    point_cells = np.floor(ps.coordinates / cell_size).astype(np.int64)
    order = np.lexsort(point_cells.T[::-1])
    sorted_cells = point_cells[order]
    starts = np.concatenate(([0], np.flatnonzero(np.any(np.diff(sorted_cells, axis=0) != 0, axis=1)) + 1))
    counts = np.diff(np.append(starts, ps.size))

    keys = {}
    packing = _packing(point_cells)
    if packing is not None:
        origin, strides = packing
        point_keys = (point_cells - origin) @ strides
        offsets = np.array(list(itertools.product((-1, 0, 1), repeat=ps.dimension)), dtype=np.int64)
        keys = {
            "point_keys": point_keys,
            "cell_keys": point_keys[order[starts]],
            "offset_keys": offsets @ strides,
        }
    else:
        logger.debug("grid range too wide to pack; scanning cell by cell")

    logger.debug("grid index: %d points in %d cells (cell size %s)", ps.size, len(starts), cell_size)
    return GridIndex(radius=radius, cell_size=cell_size, point_cells=point_cells, order=order,
                     cell_starts=starts, cell_counts=counts, **keys)


def discretize_distance(dist: float, step: float) -> float:
    """Floor dist to a multiple of step"""
    return math.floor(dist / step) * step


def _squared_distances(ps: PointSet, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    diff = ps.coordinates[rows][:, None, :] - ps.coordinates[cols][None, :, :]
    return np.square(diff).sum(axis=2)


def _discretize(d2: np.ndarray, step: float) -> np.ndarray:
    return np.floor(np.sqrt(d2) / step) * step


def _query(ps: PointSet, idx: GridIndex, o: int) -> Tuple[np.ndarray, np.ndarray]:
    o = ps.validate_id(o)
    candidates = idx.candidates(idx.cell_of(o))
    d2 = _squared_distances(ps, np.array([o]), candidates)[0]
    close = (d2 <= idx.radius * idx.radius) & (candidates != o)
    return candidates[close], d2[close]


def neighborhood(ps: PointSet, idx: GridIndex, o: int) -> FrozenSet[int]:
    """Every other point within the index radius of o"""
    ids, _ = _query(ps, idx, o)
    return frozenset(ids.tolist())


def nearest_neighbors(ps: PointSet, idx: GridIndex, o: int, step: float) -> FrozenSet[int]:
    """Neighbors of o whose discretized distance is the smallest in its neighborhood"""
    ids, d2 = _query(ps, idx, o)
    if len(ids) == 0:
        return frozenset()
    disc = _discretize(d2, step)
    return frozenset(ids[disc == disc.min()].tolist())


def as_provider(ps: PointSet, radius: float, step: float) -> "VectorSpace":
    return VectorSpace(ps, radius, step)


class VectorSpace(NeighborhoodProvider):
    """
    Points as the nodes of an implicit network whose edges join every pair
    within the radius; the edge list is never materialized.
    """

    def __init__(self, points: PointSet, radius: float, step: float):
        if not (math.isfinite(step) and step > 0):
            raise ConfigurationError(f"step must be a finite positive number, got {step}")
        self.points = points
        self.radius = float(radius)
        self.step = float(step)
        self.index = build_grid_index(points, self.radius)

    @property
    def size(self) -> int:
        return self.points.size

    def validate_id(self, o: int) -> int:
        return self.points.validate_id(o)

    def neighborhood(self, o: int) -> FrozenSet[int]:
        return neighborhood(self.points, self.index, o)

    def nearest_neighbors(self, o: int) -> FrozenSet[int]:
        return nearest_neighbors(self.points, self.index, o, self.step)

    def label_of(self, o: int) -> str:
        return self.points.label_of(o)

    def id_of(self, label: str) -> int:
        return self.points.id_of(label)

    def coordinates_of(self, o: int) -> List[float]:
        return self.points.coordinates[o].tolist()

    def partition(self, objects: np.ndarray, parts: int) -> List[np.ndarray]:
        # Keep points of one cell together so each chunk reuses its candidate blocks
        cells = self.index.point_cells[objects]
        ordered = objects[np.lexsort(cells.T[::-1])]
        return [chunk for chunk in np.array_split(ordered, parts) if len(chunk)]

    def accumulate(self, objects: np.ndarray, degree: np.ndarray, rank: np.ndarray) -> None:
        if len(objects) == 0:
            return
        if not self.index.packed:
            self._accumulate_by_cell(objects, degree, rank)
            return
        idx = self.index
        objects = objects[np.argsort(idx.point_keys[objects], kind="stable")]
        keys = idx.point_keys[objects]

        pairs = np.zeros(len(objects), dtype=np.int64)
        for offset in idx.offset_keys:
            pos, found = idx.lookup(keys + offset)
            pairs[found] += idx.cell_counts[pos[found]]
        ends = np.cumsum(pairs)

        begin = 0
        while begin < len(objects):
            done = ends[begin - 1] if begin else 0
            end = max(begin + 1, int(np.searchsorted(ends, done + BLOCK_PAIRS, side="right")))
            self._scan_rows(objects[begin:end], keys[begin:end], degree, rank)
            begin = end

    def _scan_rows(self, rows: np.ndarray, keys: np.ndarray, degree: np.ndarray, rank: np.ndarray) -> None:
        """Degree and rank contributions of rows, every query-candidate pair in one batch"""
        idx = self.index
        queries, cells = [], []
        for offset in idx.offset_keys:
            pos, found = idx.lookup(keys + offset)
            queries.append(np.flatnonzero(found))
            cells.append(pos[found])
        query = np.concatenate(queries)
        cell = np.concatenate(cells)

        # expand (query, cell) into (query, candidate) pairs
        counts = idx.cell_counts[cell]
        total = int(counts.sum())
        first = np.repeat(idx.cell_starts[cell] - (np.cumsum(counts) - counts), counts)
        candidate = idx.order[first + np.arange(total)]
        query = np.repeat(query, counts)

        d2 = np.square(self.points.coordinates[rows[query]] - self.points.coordinates[candidate]).sum(axis=1)
        close = (d2 <= self.radius * self.radius) & (rows[query] != candidate)
        query, candidate, d2 = query[close], candidate[close], d2[close]
        degree[rows] += np.bincount(query, minlength=len(rows))

        disc = _discretize(d2, self.step)
        best = np.full(len(rows), np.inf)
        np.minimum.at(best, query, disc)
        nearest = disc == best[query]
        rank += np.bincount(candidate[nearest], minlength=len(rank))

    def _accumulate_by_cell(self, objects: np.ndarray, degree: np.ndarray, rank: np.ndarray) -> None:
        r2 = self.radius * self.radius
        cells = self.index.point_cells[objects]
        order = np.lexsort(cells.T[::-1])
        ordered = objects[order]
        sorted_cells = cells[order]
        starts = np.flatnonzero(np.any(np.diff(sorted_cells, axis=0) != 0, axis=1)) + 1

        for group in np.split(ordered, starts):
            candidates = self.index.candidates(self.index.cell_of(int(group[0])))
            rows_per_block = max(1, BLOCK_PAIRS // max(1, len(candidates)))
            for begin in range(0, len(group), rows_per_block):
                rows = group[begin:begin + rows_per_block]
                d2 = _squared_distances(self.points, rows, candidates)
                close = (d2 <= r2) & (rows[:, None] != candidates[None, :])
                degree[rows] += close.sum(axis=1)
                disc = np.where(close, _discretize(d2, self.step), np.inf)
                nearest = close & (disc == disc.min(axis=1, keepdims=True))
                np.add.at(rank, candidates[np.nonzero(nearest)[1]], 1)


def to_weighted_graph(space: VectorSpace) -> WeightedGraph:
    """
    The network form of a point space: one edge per pair within the radius,
    weighted by the similarity 1 / (1 + discretized distance).
    """
    edges = []
    for o in range(space.size):
        ids, d2 = _query(space.points, space.index, o)
        disc = _discretize(d2, space.step)
        for v, dv in zip(ids.tolist(), disc.tolist()):
            if o < v:
                edges.append((space.label_of(o), space.label_of(v), 1.0 / (1.0 + dv)))
    nodes = [space.label_of(o) for o in range(space.size)]
    return build_graph(edges, nodes=nodes)
