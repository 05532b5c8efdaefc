"""
Dataset and result files.

Edge lists and point tables are delimited UTF-8 text (tab or comma,
detected from the first data line; '#' starts a comment line). Sample files
carry a `key: value` header block, a blank line, then one representative
per line. Distribution tables are `value,cumulative_fraction` CSV.
"""

import io
import logging
import math
import os
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple

from errors import ConfigurationError, InputError
from graph_space import Edge, GraphSpace, WeightedGraph, build_graph
from metrics import CumulativeDistribution
from sampler import SampleResult, SamplerConfig
from utils import format_number, sha256_bytes
from vector_space import PointSet, VectorSpace

logger = logging.getLogger(__name__)

SAMPLE_FORMAT = "nn-sample/1"
DISTRIBUTION_HEADER = "value,cumulative_fraction"


def _lines(source) -> Iterator[Tuple[int, str]]:
    """(1-based line number, text without line ending) for bytes or text streams"""
    for number, raw in enumerate(source, 1):
        if isinstance(raw, bytes):
            try:
                raw = raw.decode("utf-8")
            except UnicodeDecodeError:
                raise InputError("not valid UTF-8", line=number) from None
        if number == 1:
            raw = raw.lstrip("\ufeff")
        yield number, raw.rstrip("\r\n")


def _data_lines(source) -> Iterator[Tuple[int, str]]:
    for number, line in _lines(source):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        yield number, line


def _detect_delimiter(line: str) -> Optional[str]:
    if "\t" in line:
        return "\t"
    if "," in line:
        return ","
    return None


def _split(line: str, delimiter: Optional[str]) -> List[str]:
    if delimiter is None:
        return line.split()
    return [field.strip() for field in line.split(delimiter)]


def _parse_float(text: str, number: int, line: str, what: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise InputError(f"{what} is not a number", line=number, content=line) from None
    if not math.isfinite(value):
        raise InputError(f"{what} is not finite", line=number, content=line)
    return value


def _writer(sink):
    if isinstance(sink, io.TextIOBase):
        return sink.write
    return lambda text: sink.write(text.encode("utf-8"))


def read_edge_list(source) -> List[Edge]:
    """(source, target, weight) triples in file order"""
    edges, _ = _read_edge_lines(source)
    return edges


def _read_edge_lines(source) -> Tuple[List[Edge], List[int]]:
    edges: List[Edge] = []
    line_numbers: List[int] = []
    delimiter = None
    for number, line in _data_lines(source):
        if delimiter is None:
            delimiter = "\t" if "\t" in line else ","
        fields = _split(line, delimiter)
        if len(fields) != 3:
            raise InputError(f"expected 3 fields, found {len(fields)}", line=number, content=line)
        source_label, target_label, weight_text = fields
        if not source_label or not target_label:
            raise InputError("empty node label", line=number, content=line)
        weight = _parse_float(weight_text, number, line, "weight")
        if weight <= 0:
            raise InputError("weight must be positive", line=number, content=line)
        edges.append((source_label, target_label, weight))
        line_numbers.append(number)
    return edges, line_numbers


def read_graph(source) -> WeightedGraph:
    """Edge list straight to a WeightedGraph; graph errors point at file lines"""
    edges, line_numbers = _read_edge_lines(source)
    try:
        return build_graph(edges)
    except InputError as error:
        if error.line is None:
            raise
        raise InputError(error.reason, line=line_numbers[error.line - 1], content=error.content) from None


def read_points(source) -> PointSet:
    """
    Point table; the dimension comes from the first data line.

    A first line with no numeric field is a header, and a header whose first
    field is `id` marks a leading id column. Ids may not contain commas,
    which separate the fields of a sample file.
    """
    rows: List[List[float]] = []
    labels: List[str] = []
    delimiter = None
    width = None
    has_id = False

    for number, line in _data_lines(source):
        if width is None:
            delimiter = _detect_delimiter(line)
            fields = _split(line, delimiter)
            width = len(fields)
            if not _any_numeric(fields):
                has_id = fields[0].lower() == "id"
                if has_id and width < 2:
                    raise InputError("id column without coordinates", line=number, content=line)
                continue
        fields = _split(line, delimiter)
        if len(fields) != width:
            raise InputError(f"expected {width} fields, found {len(fields)}", line=number, content=line)
        if has_id:
            if "," in fields[0] or not fields[0]:
                raise InputError("point id must be non-empty and free of commas", line=number, content=line)
            labels.append(fields[0])
            fields = fields[1:]
        rows.append([_parse_float(text, number, line, "coordinate") for text in fields])

    if has_id and len(set(labels)) != len(labels):
        raise InputError("point ids must be unique")
    return PointSet.from_rows(rows, labels=labels if has_id else None)


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def _any_numeric(fields: List[str]) -> bool:
    return any(_is_number(field) for field in fields)


def read_id_list(source) -> List[str]:
    """One object label per line (region files)"""
    return [line.strip() for _, line in _data_lines(source)]


def write_edge_list(graph: WeightedGraph, sink) -> None:
    write = _writer(sink)
    write(f"# nodes: {graph.node_count}\n# edges: {graph.edge_count}\n")
    for u, v, w in graph.edges():
        write(f"{graph.labels[u]}\t{graph.labels[v]}\t{format_number(w)}\n")


def _sample_header(result: SampleResult) -> List[Tuple[str, str]]:
    config = result.config
    is_points = isinstance(result.space, VectorSpace)
    header = [
        ("format", SAMPLE_FORMAT),
        ("space", "points" if is_points else "graph"),
        ("log_base", format_number(config.log_base)),
        ("threshold", format_number(config.threshold)),
    ]
    if is_points:
        header.append(("radius", format_number(result.space.radius)))
        header.append(("step", format_number(result.space.step)))
    for key in sorted(result.provenance):
        header.append((key, result.provenance[key]))
    header.append(("objects", str(result.total)))
    header.append(("selected", str(len(result.members))))
    if result.subgraph is not None and isinstance(result.space, GraphSpace):
        header.append(("edges", str(result.space.graph.edge_count)))
        header.append(("sample_edges", str(result.subgraph.edge_count)))
    return header


def write_sample(result: SampleResult, sink) -> None:
    write = _writer(sink)
    for key, value in _sample_header(result):
        write(f"{key}: {value}\n")
    write("\n")
    is_points = isinstance(result.space, VectorSpace)
    for o, label in zip(result.members, result.labels()):
        if is_points:
            coords = ",".join(format_number(x) for x in result.space.coordinates_of(o))
            write(f"{label},{coords}\n")
        else:
            write(f"{label}\n")


@dataclass(frozen=True)
class SampleFile:
    header: Dict[str, str]
    members: Tuple[str, ...]
    coordinates: Optional[Tuple[Tuple[float, ...], ...]] = None

    def config(self) -> SamplerConfig:
        try:
            return SamplerConfig(
                log_base=float(self.header["log_base"]),
                threshold=float(self.header["threshold"]),
                radius=float(self.header["radius"]) if "radius" in self.header else None,
                step=float(self.header["step"]) if "step" in self.header else None,
            )
        except (KeyError, ValueError) as error:
            raise ConfigurationError(f"sample file header is incomplete: {error}") from None


def read_sample(source) -> SampleFile:
    header: Dict[str, str] = {}
    members: List[str] = []
    coordinates: List[Tuple[float, ...]] = []
    in_header = True
    for number, line in _lines(source):
        if in_header:
            if not line.strip():
                in_header = False
                continue
            key, sep, value = line.partition(": ")
            if not sep:
                raise InputError("expected 'key: value' in sample header", line=number, content=line)
            header[key] = value
            continue
        if not line:
            continue
        if header.get("space") == "points":
            label, *fields = line.split(",")
            coordinates.append(tuple(_parse_float(f, number, line, "coordinate") for f in fields))
            members.append(label)
        else:
            members.append(line)
    if header.get("format") != SAMPLE_FORMAT:
        raise InputError(f"not a sample file (format {header.get('format')!r})")
    return SampleFile(
        header=header,
        members=tuple(members),
        coordinates=tuple(coordinates) if header.get("space") == "points" else None,
    )


def is_sample_file(path: str) -> bool:
    with open(path, "rb") as f:
        return f.readline().strip() == f"format: {SAMPLE_FORMAT}".encode()


def write_distribution(d: CumulativeDistribution, sink) -> None:
    write = _writer(sink)
    write(DISTRIBUTION_HEADER + "\n")
    for value, fraction in d.entries():
        write(f"{format_number(value)},{format_number(fraction)}\n")


def read_distribution(source) -> List[Tuple[float, float]]:
    entries = []
    for number, line in _lines(source):
        if number == 1:
            if line.strip() != DISTRIBUTION_HEADER:
                raise InputError("missing distribution header", line=number, content=line)
            continue
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != 2:
            raise InputError(f"expected 2 fields, found {len(fields)}", line=number, content=line)
        entries.append(tuple(_parse_float(f, number, line, "value") for f in fields))
    return entries


@contextmanager
def atomic_output(path, binary: bool = False):
    """
    Open a temp file next to path and move it over path only on success,
    so an interrupted run never leaves a partial output.
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        if binary:
            handle = os.fdopen(fd, "wb")
        else:
            handle = os.fdopen(fd, "w", encoding="utf-8", newline="\n")
        with handle:
            yield handle
        os.replace(tmp_name, target)
        logger.debug("wrote %s", target)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def load_bytes(path) -> Tuple[bytes, str]:
    """File contents and their SHA-256"""
    data = Path(path).read_bytes()
    return data, sha256_bytes(data)
