"""
NN-representative sampling.

Every object is scored by how many neighborhoods contain it (proximity
degree d) and by how many objects count it among their nearest neighbors
(proximity rank k). Representativeness r = k / log_x(d) is then compared
against a threshold and every object at or above it is a representative.

The scoring pass works on any NeighborhoodProvider; graph_space and
vector_space supply the two concrete ones.
"""

from __future__ import annotations

import logging
import math
import time
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from errors import ConfigurationError, ContractError, InputError

if TYPE_CHECKING:
    from graph_space import WeightedGraph

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SamplerConfig:
    """Log base and threshold of the selection rule plus vector-space parameters"""

    log_base: float
    threshold: float = 1.0
    radius: Optional[float] = None
    step: Optional[float] = None

    def __post_init__(self):
        if not (math.isfinite(self.log_base) and self.log_base > 1):
            raise ConfigurationError(f"log base must be a finite number greater than 1, got {self.log_base}")
        if not (math.isfinite(self.threshold) and self.threshold >= 0):
            raise ConfigurationError(f"threshold must be a finite non-negative number, got {self.threshold}")
        for name in ("radius", "step"):
            value = getattr(self, name)
            if value is not None and not (math.isfinite(value) and value > 0):
                raise ConfigurationError(f"{name} must be a finite positive number, got {value}")

    def require_vector_parameters(self) -> Tuple[float, float]:
        if self.radius is None or self.step is None:
            raise ConfigurationError("point sampling needs both a radius and a discretization step")
        return self.radius, self.step

    def to_dict(self) -> Dict[str, float]:
        data = {"log_base": self.log_base, "threshold": self.threshold}
        if self.radius is not None:
            data["radius"] = self.radius
        if self.step is not None:
            data["step"] = self.step
        return data


class NeighborhoodProvider(ABC):
    """
    Proximity structure over the objects 0..size-1.

    Implementations must be symmetric (o' in neighborhood(o) iff o in
    neighborhood(o')), never list an object as its own neighbor, and return
    nearest neighbors that are a subset of the neighborhood. Providers are
    read-only once built and may be queried from several threads.
    """

    @property
    @abstractmethod
    def size(self) -> int:
        """Number of objects in the universe"""

    @abstractmethod
    def neighborhood(self, o: int) -> FrozenSet[int]:
        """All objects close to o"""

    @abstractmethod
    def nearest_neighbors(self, o: int) -> FrozenSet[int]:
        """Neighbors of o at maximal similarity, ties included"""

    def validate_id(self, o: int) -> int:
        if isinstance(o, bool) or not isinstance(o, (int, np.integer)) or not 0 <= o < self.size:
            raise InputError(f"unknown object id {o!r}")
        return int(o)

    def label_of(self, o: int) -> str:
        return str(o)

    def id_of(self, label: str) -> int:
        try:
            return self.validate_id(int(label))
        except ValueError:
            raise InputError(f"unknown object id {label!r}") from None

    def subgraph(self, members: Sequence[int]) -> Optional["WeightedGraph"]:
        """Network carried alongside a sample; only graph providers have one"""
        return None

    def partition(self, objects: np.ndarray, parts: int) -> List[np.ndarray]:
        """Split objects into work chunks; any split yields the same scores"""
        return [chunk for chunk in np.array_split(objects, parts) if len(chunk)]

    def accumulate(self, objects: np.ndarray, degree: np.ndarray, rank: np.ndarray) -> None:
        """Scan each object in objects once, adding its d and k contributions"""
        for o in objects.tolist():
            degree[o] += len(self.neighborhood(o))
            for y in self.nearest_neighbors(o):
                rank[y] += 1


def representativeness(k: int, d: int, log_base: float) -> float:
    """r = k / log_x(d), with r = 0 for d = 0 and r = k for d = 1"""
    if not log_base > 1:
        raise ConfigurationError(f"log base must be greater than 1, got {log_base}")
    if k < 0 or d < 0:
        raise ContractError(f"proximity rank and degree must be non-negative, got k={k}, d={d}")
    if d == 0:
        return 0.0
    if d == 1:
        return float(k)
    return k * math.log(log_base) / math.log(d)


def _representativeness_array(rank: np.ndarray, degree: np.ndarray, log_base: float) -> np.ndarray:
    # Same IEEE operations as representativeness(), one math.log per distinct degree
    if not log_base > 1:
        raise ConfigurationError(f"log base must be greater than 1, got {log_base}")
    result = np.zeros(len(degree), dtype=np.float64)
    single = degree == 1
    result[single] = rank[single]
    many = degree >= 2
    if many.any():
        values, inverse = np.unique(degree[many], return_inverse=True)
        logs = np.array([math.log(v) for v in values.tolist()], dtype=np.float64)
        result[many] = rank[many] * math.log(log_base) / logs[inverse]
    return result


@dataclass(frozen=True)
class ScoreTable:
    """Per-object proximity degree, proximity rank and (once a base is known) representativeness"""

    degree: np.ndarray
    rank: np.ndarray
    log_base: Optional[float] = None
    representativeness: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return len(self.degree)

    def with_log_base(self, log_base: float) -> "ScoreTable":
        if self.log_base == log_base and self.representativeness is not None:
            return self
        r = _representativeness_array(self.rank, self.degree, log_base)
        return replace(self, log_base=log_base, representativeness=r)

    def check_invariants(self) -> None:
        if self.degree.shape != self.rank.shape:
            raise ContractError("degree and rank arrays differ in length")
        if (self.degree < 0).any() or (self.rank < 0).any():
            raise ContractError("negative proximity counts")
        broken = np.flatnonzero(self.rank > self.degree)
        if len(broken):
            o = int(broken[0])
            raise ContractError(
                f"object {o} has proximity rank {int(self.rank[o])} above its degree {int(self.degree[o])}; "
                "the provider is not symmetric"
            )
        if self.representativeness is not None and (self.representativeness[self.degree == 0] != 0).any():
            raise ContractError("isolated objects must have zero representativeness")

    def row(self, o: int) -> Tuple[int, int, Optional[float]]:
        r = None if self.representativeness is None else float(self.representativeness[o])
        return int(self.degree[o]), int(self.rank[o]), r

    def equals(self, other: "ScoreTable") -> bool:
        return np.array_equal(self.degree, other.degree) and np.array_equal(self.rank, other.rank)


@dataclass(frozen=True)
class SampleResult:
    """Representatives in ascending id order with the scores and settings that produced them"""

    members: Tuple[int, ...]
    scores: ScoreTable
    config: SamplerConfig
    total: int
    space: Optional[NeighborhoodProvider] = None
    subgraph: Optional["WeightedGraph"] = None
    provenance: Dict[str, str] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.members)

    @property
    def member_set(self) -> FrozenSet[int]:
        return frozenset(self.members)

    def labels(self) -> List[str]:
        if self.space is None:
            return [str(o) for o in self.members]
        return [self.space.label_of(o) for o in self.members]


def _scan(provider: NeighborhoodProvider, objects: np.ndarray, workers: int) -> Tuple[np.ndarray, np.ndarray]:
    n = provider.size
    degree = np.zeros(n, dtype=np.int64)
    if len(objects) == 0:
        return degree, np.zeros(n, dtype=np.int64)

    workers = max(1, min(int(workers), len(objects)))
    chunks = provider.partition(objects, workers)
    started = time.perf_counter()

    if len(chunks) == 1:
        rank = np.zeros(n, dtype=np.int64)
        provider.accumulate(chunks[0], degree, rank)
    else:
        # Each object is scanned by exactly one chunk, so degree writes never
        # overlap; rank is accumulated per chunk and summed afterwards.
        def run(chunk: np.ndarray) -> np.ndarray:
            local_rank = np.zeros(n, dtype=np.int64)
            provider.accumulate(chunk, degree, local_rank)
            logger.debug("scanned chunk of %d objects", len(chunk))
            return local_rank

        with ThreadPoolExecutor(max_workers=len(chunks)) as executor:
            partial_ranks = list(executor.map(run, chunks))
        rank = np.sum(partial_ranks, axis=0, dtype=np.int64)

    logger.info(
        "scanned %d of %d objects with %d worker(s) in %.3fs",
        len(objects), n, len(chunks), time.perf_counter() - started,
    )
    return degree, rank


def score(provider: NeighborhoodProvider, log_base: Optional[float] = None, workers: int = 1) -> ScoreTable:
    """Proximity degree and rank of every object; identical for any worker count"""
    objects = np.arange(provider.size, dtype=np.int64)
    degree, rank = _scan(provider, objects, workers)
    table = ScoreTable(degree=degree, rank=rank)
    table.check_invariants()
    if log_base is not None:
        table = table.with_log_base(log_base)
    return table


def select(scores: ScoreTable, config: SamplerConfig) -> SampleResult:
    scores = scores.with_log_base(config.log_base)
    members = np.flatnonzero(scores.representativeness >= config.threshold)
    return SampleResult(
        members=tuple(int(o) for o in members),
        scores=scores,
        config=config,
        total=len(scores),
    )


def _finish(result: SampleResult, provider: NeighborhoodProvider, dataset_id: Optional[str]) -> SampleResult:
    provenance = dict(result.provenance)
    if dataset_id:
        provenance["dataset"] = dataset_id
    return replace(result, space=provider, subgraph=provider.subgraph(result.members), provenance=provenance)


def sample(dataset, config: SamplerConfig, workers: int = 1, dataset_id: Optional[str] = None) -> SampleResult:
    """
    Representative sample of a WeightedGraph or PointSet.

    Graph results also carry the subgraph induced by the representatives.
    """
    provider = dataset if isinstance(dataset, NeighborhoodProvider) else dataset.as_provider(config)
    scores = score(provider, log_base=config.log_base, workers=workers)
    result = select(scores, config)
    logger.info("selected %d of %d objects (log base %s, threshold %s)",
                len(result), result.total, config.log_base, config.threshold)
    return _finish(result, provider, dataset_id)


def sweep(
    provider: NeighborhoodProvider,
    scores: ScoreTable,
    bases: Iterable[float],
    threshold: float = 1.0,
) -> Dict[float, SampleResult]:
    """Samples for several log bases from a single scoring pass, in the given base order"""
    results = {}
    for base in bases:
        config = SamplerConfig(log_base=base, threshold=threshold)
        results[base] = _finish(select(scores, config), provider, None)
    return results


def local_sample(
    provider: NeighborhoodProvider,
    region: Iterable[int],
    config: SamplerConfig,
    workers: int = 1,
) -> SampleResult:
    """
    Representatives inside region, equal to the global sample restricted to it.

    Under symmetric proximity every contribution to d(o) and k(o) comes from
    o's own neighborhood, so only region plus its one-hop closure is scanned.
    Scores outside the region are left at zero in the returned table.
    """
    region_ids = sorted({provider.validate_id(o) for o in region})
    closure = set(region_ids)
    for o in region_ids:
        closure.update(provider.neighborhood(o))
    objects = np.fromiter(sorted(closure), dtype=np.int64, count=len(closure))
    logger.info("local sample: region of %d objects, closure of %d", len(region_ids), len(objects))

    degree, rank = _scan(provider, objects, workers)
    in_region = np.zeros(provider.size, dtype=bool)
    in_region[region_ids] = True
    degree[~in_region] = 0
    rank[~in_region] = 0
    scores = ScoreTable(degree=degree, rank=rank)
    scores.check_invariants()

    result = select(scores, config)
    return _finish(result, provider, None)
