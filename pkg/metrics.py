"""
How well a sample keeps the structure of the original: cumulative degree
and edge-weight distributions, Kolmogorov-Smirnov distance between them,
per-cell point densities and retention percentages.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import spearmanr

from errors import ConfigurationError, InputError, UndefinedRatioError, UnsupportedDimensionError
from graph_space import WeightedGraph
from utils import round_half_up_percent
from vector_space import PointSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CumulativeDistribution:
    """Ascending values, each with the fraction of the population at or above it"""

    values: Tuple[float, ...]
    fractions: Tuple[float, ...]
    population: int

    @classmethod
    def from_values(cls, data: Iterable[float]) -> "CumulativeDistribution":
        data = np.asarray(list(data), dtype=np.float64)
        if len(data) == 0:
            return cls(values=(), fractions=(), population=0)
        values, counts = np.unique(data, return_counts=True)
        at_or_above = np.cumsum(counts[::-1])[::-1]
        fractions = at_or_above / len(data)
        return cls(values=tuple(values.tolist()), fractions=tuple(fractions.tolist()), population=len(data))

    def __len__(self) -> int:
        return len(self.values)

    def entries(self) -> List[Tuple[float, float]]:
        return list(zip(self.values, self.fractions))

    def at(self, points: Sequence[float]) -> np.ndarray:
        """Fraction of the population with value >= each point"""
        values = np.asarray(self.values, dtype=np.float64)
        curve = np.append(np.asarray(self.fractions, dtype=np.float64), 0.0)
        return curve[np.searchsorted(values, np.asarray(points, dtype=np.float64), side="left")]


@dataclass(frozen=True)
class RetentionStats:
    """Integer percentages of objects (and edges, for graphs) kept by a sample"""

    objects: int
    edges: Optional[int] = None


def cumulative_degree_distribution(g: WeightedGraph) -> CumulativeDistribution:
    return CumulativeDistribution.from_values(g.degrees())


def cumulative_weight_distribution(g: WeightedGraph) -> CumulativeDistribution:
    return CumulativeDistribution.from_values(g.weights())


def _percent(part: int, whole: int, what: str) -> int:
    if whole <= 0:
        raise UndefinedRatioError(f"cannot compute {what} retention against an original of {whole}")
    if part < 0 or part > whole:
        raise InputError(f"sample {what} count {part} is outside 0..{whole}")
    return round_half_up_percent(part, whole)


def retention_stats(original_counts: Sequence[int], sample_counts: Sequence[int]) -> RetentionStats:
    """
    Percentages kept, rounded half up.

    Counts are (objects,) or (nodes, edges).
    """
    if len(original_counts) != len(sample_counts):
        raise InputError("original and sample counts must describe the same quantities")
    objects = _percent(sample_counts[0], original_counts[0], "object")
    edges = None
    if len(original_counts) > 1:
        edges = _percent(sample_counts[1], original_counts[1], "edge")
    return RetentionStats(objects=objects, edges=edges)


def ks_distance(a: CumulativeDistribution, b: CumulativeDistribution) -> float:
    """Largest gap between the two cumulative curves over the union of their values"""
    if not len(a) or not len(b):
        raise InputError("cannot compare an empty distribution")
    points = np.union1d(a.values, b.values)
    return float(np.max(np.abs(a.at(points) - b.at(points))))


def grid_density_histogram(ps: PointSet, cell: float) -> Dict[Tuple[int, int], int]:
    """Number of points in each occupied square cell of side cell"""
    if not (math.isfinite(cell) and cell > 0):
        raise ConfigurationError(f"cell size must be a finite positive number, got {cell}")
    if ps.size == 0:
        return {}
    if ps.dimension != 2:
        raise UnsupportedDimensionError(f"density histograms need 2-D points, got dimension {ps.dimension}")
    cells = np.floor(ps.coordinates / cell).astype(np.int64)
    occupied, counts = np.unique(cells, axis=0, return_counts=True)
    return {(int(x), int(y)): int(n) for (x, y), n in zip(occupied.tolist(), counts.tolist())}


def density_rank_correlation(original: Dict[Tuple[int, int], int], sample: Dict[Tuple[int, int], int]) -> float:
    """Spearman correlation of per-cell counts over the cells occupied in the original"""
    cells = sorted(original)
    if len(cells) < 2:
        raise InputError("rank correlation needs at least two occupied cells")
    before = [original[c] for c in cells]
    after = [sample.get(c, 0) for c in cells]
    return float(spearmanr(before, after)[0])


def sample_report(original: WeightedGraph, sample: WeightedGraph) -> Dict[str, object]:
    """Retention and distribution distances of a sampled network against its original"""
    original_degrees = cumulative_degree_distribution(original)
    sample_degrees = cumulative_degree_distribution(sample)
    original_weights = cumulative_weight_distribution(original)
    sample_weights = cumulative_weight_distribution(sample)

    counts = (original.node_count, original.edge_count) if original.edge_count else (original.node_count,)
    kept = (sample.node_count, sample.edge_count)[:len(counts)]
    report = {
        "retention": retention_stats(counts, kept),
        "degree_distribution": (original_degrees, sample_degrees),
        "weight_distribution": (original_weights, sample_weights),
        "ks_degree": None,
        "ks_weight": None,
    }
    if len(original_degrees) and len(sample_degrees):
        report["ks_degree"] = ks_distance(original_degrees, sample_degrees)
    if len(original_weights) and len(sample_weights):
        report["ks_weight"] = ks_distance(original_weights, sample_weights)
    logger.info("sample report: %s", {k: v for k, v in report.items() if k.startswith(("ks", "retention"))})
    return report
