#!/usr/bin/env python3
"""
Command-line front door: representative samples of weighted networks and
point datasets, and metrics comparing a sample with its original.

    python cli.py sample-graph lesmis.csv --log-base 3 -o lesmis.sample
    python cli.py sample-points birch3.txt --preset birch3-r50 -o birch3.sample
    python cli.py local-sample lesmis.csv --region ids.txt --log-base 2
    python cli.py metrics lesmis.csv lesmis.sample --output-prefix out/lesmis

Exit status: 0 success, 1 data error, 2 usage error.
"""

import argparse
import io
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

from errors import ConfigurationError, ContractError, InputError, SamplingError, UndefinedRatioError, UnsupportedDimensionError
from graph_space import WeightedGraph
from io_formats import (
    atomic_output,
    is_sample_file,
    load_bytes,
    read_graph,
    read_id_list,
    read_points,
    read_sample,
    write_distribution,
    write_edge_list,
    write_sample,
)
from metrics import (
    cumulative_degree_distribution,
    cumulative_weight_distribution,
    density_rank_correlation,
    grid_density_histogram,
    retention_stats,
    sample_report,
)
from presets_manager import DEFAULT_PRESETS_FILE, PresetsManager
from sampler import SampleResult, SamplerConfig, local_sample, sample
from utils import configure_logging, default_workers, format_number, format_summary
from vector_space import PointSet

logger = logging.getLogger("cli")

EXIT_OK = 0
EXIT_DATA_ERROR = 1
EXIT_USAGE_ERROR = 2


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-v", "--verbose", action="count", default=0, help="More log output (repeat for debug)")
    parser.add_argument("-q", "--quiet", action="store_true", help="Only log errors")


def _add_sampling(parser: argparse.ArgumentParser, points: bool) -> None:
    parser.add_argument("input", help="Edge list or point table")
    parser.add_argument("-o", "--output", help="Sample file to write")
    parser.add_argument("--log-base", type=float, help="Base x of r = k / log_x(d), greater than 1")
    parser.add_argument("--threshold", type=float, help="Minimal representativeness (default: 1)")
    parser.add_argument("--preset", help="Named configuration from the presets file")
    parser.add_argument("--config", "-c", default=DEFAULT_PRESETS_FILE,
                        help=f"Presets file (default: {DEFAULT_PRESETS_FILE})")
    parser.add_argument("--threads", type=_positive_int, help="Scoring threads (default: all cores)")
    parser.add_argument("--emit-metrics", action="store_true",
                        help="Write distribution tables next to the output file")
    if points:
        parser.add_argument("--radius", type=float, help="Neighborhood radius in data units")
        parser.add_argument("--step", type=float, help="Distance discretization step in data units")
    _add_common(parser)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cli.py",
        description="Deterministic NN-representative sampling of weighted networks and point data",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    graph = commands.add_parser("sample-graph", help="Sample a weighted network")
    _add_sampling(graph, points=False)
    graph.add_argument("--sample-edges", help="Also write the sampled network as an edge list")

    points = commands.add_parser("sample-points", help="Sample an n-dimensional point table")
    _add_sampling(points, points=True)

    local = commands.add_parser("local-sample", help="Representatives inside a region only")
    _add_sampling(local, points=True)
    local.add_argument("--region", required=True, help="File with one object id per line")
    local.add_argument("--space", choices=("graph", "points"), default="graph", help="Input kind (default: graph)")
    local.add_argument("--sample-edges", help="Also write the sampled network as an edge list (graphs)")

    metrics = commands.add_parser("metrics", help="Compare a sample with its original")
    metrics.add_argument("original", help="Original edge list or point table")
    metrics.add_argument("sample", help="Sample file, or the sampled network as an edge list")
    metrics.add_argument("--output-prefix", required=True, help="Prefix of the distribution tables to write")
    metrics.add_argument("--space", choices=("graph", "points"), default="graph", help="Input kind (default: graph)")
    metrics.add_argument("--cell", type=float, help="Density cell size for point samples")
    _add_common(metrics)
    return parser


def parse_arguments(argv: Optional[List[str]] = None):
    return build_parser().parse_args(argv)


def _space_of(args) -> str:
    if args.command == "sample-graph":
        return "graph"
    if args.command == "sample-points":
        return "points"
    return args.space


def build_config(args) -> SamplerConfig:
    """Validate flags into a SamplerConfig before any input is read"""
    space = _space_of(args)
    if space == "graph" and (getattr(args, "radius", None) is not None or getattr(args, "step", None) is not None):
        raise ConfigurationError("--radius and --step only apply to point data")
    if space == "points" and getattr(args, "sample_edges", None):
        raise ConfigurationError("--sample-edges only applies to graphs")
    if args.emit_metrics and not args.output:
        raise ConfigurationError("--emit-metrics needs --output")

    overrides = {
        "log_base": args.log_base,
        "threshold": args.threshold,
        "radius": getattr(args, "radius", None),
        "step": getattr(args, "step", None),
    }
    if args.preset:
        manager = PresetsManager(config_file=args.config)
        preset_space = manager.get_preset(args.preset).get("space", space)
        if preset_space != space:
            raise ConfigurationError(f"preset {args.preset!r} is for {preset_space} data")
        config = manager.get_config(args.preset, **overrides)
    else:
        if args.log_base is None:
            raise ConfigurationError("--log-base is required (or use --preset)")
        config = SamplerConfig(
            log_base=args.log_base,
            threshold=1.0 if args.threshold is None else args.threshold,
            radius=overrides["radius"],
            step=overrides["step"],
        )
    if space == "points":
        config.require_vector_parameters()
    return config


def _load_dataset(path: str, space: str):
    data, checksum = load_bytes(path)
    dataset = read_graph(io.BytesIO(data)) if space == "graph" else read_points(io.BytesIO(data))
    return dataset, {"dataset": Path(path).name, "dataset_sha256": checksum}


def _write_result(result: SampleResult, args) -> None:
    if args.output:
        with atomic_output(args.output) as f:
            write_sample(result, f)
    if getattr(args, "sample_edges", None) and result.subgraph is not None:
        with atomic_output(args.sample_edges) as f:
            write_edge_list(result.subgraph, f)
    if args.emit_metrics:
        _emit_metrics(result, args.output)


def _emit_metrics(result: SampleResult, output: str) -> None:
    if result.subgraph is not None:
        original = result.space.graph
        tables = {
            "degrees": (cumulative_degree_distribution(original), cumulative_degree_distribution(result.subgraph)),
            "weights": (cumulative_weight_distribution(original), cumulative_weight_distribution(result.subgraph)),
        }
        for name, (before, after) in tables.items():
            with atomic_output(f"{output}.original.{name}.csv") as f:
                write_distribution(before, f)
            with atomic_output(f"{output}.sample.{name}.csv") as f:
                write_distribution(after, f)
        return
    points = result.space.points
    cell = result.space.radius
    before = grid_density_histogram(points, cell)
    after = grid_density_histogram(points.subset(result.members), cell)
    with atomic_output(f"{output}.density.csv") as f:
        f.write("x,y,original,sample\n")
        for (x, y), count in sorted(before.items()):
            f.write(f"{x},{y},{count},{after.get((x, y), 0)}\n")


def run(args) -> int:
    """sample-graph, sample-points and local-sample"""
    config = build_config(args)
    space = _space_of(args)
    workers = args.threads or default_workers()

    dataset, provenance = _load_dataset(args.input, space)
    if args.emit_metrics and space == "points" and dataset.size and dataset.dimension != 2:
        # before any output is written
        raise UnsupportedDimensionError(f"--emit-metrics needs 2-D points, got dimension {dataset.dimension}")
    if args.command == "local-sample":
        provider = dataset.as_provider(config)
        with open(args.region, "rb") as f:
            region = [provider.id_of(label) for label in read_id_list(f)]
        result = local_sample(provider, region, config, workers=workers)
        result = replace(result, provenance={**provenance, "region": Path(args.region).name})
        total = len(set(region))
    else:
        result = sample(dataset, config, workers=workers)
        result = replace(result, provenance=provenance)
        total = result.total

    _write_result(result, args)
    print(format_summary(len(result), total))
    return EXIT_OK


def _load_sample_graph(original: WeightedGraph, path: str) -> WeightedGraph:
    if is_sample_file(path):
        with open(path, "rb") as f:
            members = read_sample(f).members
        return original.induced_subgraph(original.id_of(label) for label in members)
    with open(path, "rb") as f:
        return read_graph(f)


def _load_sample_points(original: PointSet, path: str) -> PointSet:
    if is_sample_file(path):
        with open(path, "rb") as f:
            members = read_sample(f).members
        return original.subset([original.id_of(label) for label in members])
    with open(path, "rb") as f:
        return read_points(f)


def run_metrics(args) -> int:
    if args.space == "points" and not args.cell:
        raise ConfigurationError("--cell is required for point metrics")
    if args.space == "graph" and args.cell is not None:
        raise ConfigurationError("--cell only applies to point data")
    prefix = args.output_prefix
    lines = []

    if args.space == "graph":
        with open(args.original, "rb") as f:
            original = read_graph(f)
        sampled = _load_sample_graph(original, args.sample)
        report = sample_report(original, sampled)
        for name in ("degree", "weight"):
            before, after = report[f"{name}_distribution"]
            with atomic_output(f"{prefix}.original.{name}s.csv") as f:
                write_distribution(before, f)
            with atomic_output(f"{prefix}.sample.{name}s.csv") as f:
                write_distribution(after, f)
        retention = report["retention"]
        lines.append(f"nodes: {sampled.node_count}/{original.node_count} ({retention.objects}%)")
        if retention.edges is not None:
            lines.append(f"edges: {sampled.edge_count}/{original.edge_count} ({retention.edges}%)")
        for key in ("ks_degree", "ks_weight"):
            value = report[key]
            lines.append(f"{key}: {'n/a' if value is None else format_number(value)}")
    else:
        with open(args.original, "rb") as f:
            original = read_points(f)
        sampled = _load_sample_points(original, args.sample)
        retention = retention_stats((original.size,), (sampled.size,))
        lines.append(f"points: {sampled.size}/{original.size} ({retention.objects}%)")
        before = grid_density_histogram(original, args.cell)
        after = grid_density_histogram(sampled, args.cell)
        lines.append(f"density_rank_correlation: {format_number(density_rank_correlation(before, after))}")

    with atomic_output(f"{prefix}.summary.txt") as f:
        f.write("\n".join(lines) + "\n")
    print("; ".join(lines))
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    level = logging.WARNING
    if args.quiet:
        level = logging.ERROR
    elif args.verbose:
        level = logging.INFO if args.verbose == 1 else logging.DEBUG
    configure_logging(level)

    try:
        if args.command == "metrics":
            return run_metrics(args)
        return run(args)
    except ConfigurationError as e:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return EXIT_USAGE_ERROR
    except (InputError, UndefinedRatioError, ContractError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA_ERROR
    except SamplingError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
