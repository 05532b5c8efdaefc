#!/usr/bin/env python3
"""
Scaling Benchmark

Times the point-space scoring pass on synthetic data of constant density:
doubling the number of points (on a proportionally larger area) must not
more than about double the time. Also checks that every thread count
produces the same scores, and stands in for the Czech address points with
a clustered 2,000,000-point dataset.

    python scaling_benchmark.py
    python scaling_benchmark.py --sizes 100000 200000 400000 --threads 4
"""

import argparse
import logging
import sys
import threading
import time
from typing import Dict, List, Optional

import numpy as np
import psutil

from sampler import SamplerConfig, score, select
from utils import configure_logging, default_workers, describe_system
from vector_space import PointSet, as_provider

logger = logging.getLogger("scaling_benchmark")

DEFAULT_SIZES = (250_000, 500_000, 1_000_000, 2_000_000)
QUICK_SIZES = (25_000, 50_000, 100_000, 200_000)
# Points per square unit; about 3 neighbors within radius 50 on uniform data
DENSITY = 0.0004
RADIUS = 50.0
STEP = 10.0
LOG_BASE = 1.3
MAX_DOUBLING_RATIO = 2.5
SUBSTITUTE_SIZE = 2_000_000
SUBSTITUTE_SECONDS = 60.0


class ResourceMonitor:
    """Samples CPU and memory use on a background thread"""

    def __init__(self, interval: float = 0.5):
        self.interval = interval
        self.monitoring = False
        self.cpu_usage: List[float] = []
        self.memory_usage: List[float] = []
        self.rss_mb: List[float] = []
        self._process = psutil.Process()

    def start_monitoring(self):
        self.monitoring = True
        self.monitor_thread = threading.Thread(target=self._monitor_loop, daemon=True)
        self.monitor_thread.start()

    def stop_monitoring(self):
        self.monitoring = False
        if hasattr(self, "monitor_thread"):
            self.monitor_thread.join(timeout=self.interval * 4)

    def _monitor_loop(self):
        while self.monitoring:
            try:
                self.cpu_usage.append(psutil.cpu_percent(interval=0.1))
                self.memory_usage.append(psutil.virtual_memory().percent)
                self.rss_mb.append(self._process.memory_info().rss / (1024 ** 2))
                time.sleep(self.interval)
            except psutil.Error:
                logger.exception("resource monitoring stopped")
                break

    def get_stats(self) -> Optional[Dict[str, float]]:
        if not self.cpu_usage:
            return None
        return {
            "avg_cpu": sum(self.cpu_usage) / len(self.cpu_usage),
            "max_cpu": max(self.cpu_usage),
            "max_memory": max(self.memory_usage),
            "max_rss_mb": max(self.rss_mb),
            "samples": len(self.cpu_usage),
        }


def synthetic_points(n: int, density: float = DENSITY, clustered: bool = False, seed: int = 0) -> PointSet:
    """n points on a square whose area keeps n / area equal to density"""
    rng = np.random.default_rng(seed)
    side = float(np.sqrt(n / density))
    if not clustered:
        return PointSet(rng.uniform(0.0, side, size=(n, 2)))
    # half the points in gaussian clusters, half as uniform background
    clusters = max(1, n // 20_000)
    centers = rng.uniform(0.0, side, size=(clusters, 2))
    members = rng.integers(0, clusters, size=n // 2)
    spread = side / (4 * np.sqrt(clusters))
    clustered_part = centers[members] + rng.normal(0.0, spread, size=(n // 2, 2))
    background = rng.uniform(0.0, side, size=(n - n // 2, 2))
    return PointSet(np.concatenate([clustered_part, background]))


class ScalingBenchmark:
    def __init__(self, workers: int):
        self.workers = workers
        self.results: List[Dict[str, float]] = []
        self.monitor = ResourceMonitor()

    def time_scoring(self, points: PointSet) -> Dict[str, float]:
        started = time.perf_counter()
        space = as_provider(points, RADIUS, STEP)
        indexed = time.perf_counter()
        table = score(space, log_base=LOG_BASE, workers=self.workers)
        finished = time.perf_counter()
        selected = len(select(table, SamplerConfig(log_base=LOG_BASE)))
        return {
            "points": points.size,
            "index_s": indexed - started,
            "score_s": finished - indexed,
            "total_s": finished - started,
            "selected": selected,
        }

    def scaling_test(self, sizes) -> bool:
        print("\n📈 LINEAR SCALING TEST")
        print("=" * 40)
        print(f"Density {DENSITY} points/unit², radius {RADIUS:g}, step {STEP:g}, {self.workers} worker(s)")

        self.monitor.start_monitoring()
        for n in sizes:
            result = self.time_scoring(synthetic_points(n, seed=n))
            self.results.append(result)
            print(f"   {n:>9,} points: index {result['index_s']:6.2f}s, score {result['score_s']:6.2f}s, "
                  f"{result['selected']:,} selected")
        self.monitor.stop_monitoring()

        ok = True
        for before, after in zip(self.results, self.results[1:]):
            growth = after["points"] / before["points"]
            ratio = after["total_s"] / max(before["total_s"], 1e-9)
            allowed = MAX_DOUBLING_RATIO * growth / 2
            verdict = "ok" if ratio <= allowed else "TOO SLOW"
            ok &= ratio <= allowed
            print(f"   {before['points']:,} -> {after['points']:,}: x{ratio:.2f} (allowed x{allowed:.2f}) {verdict}")

        stats = self.monitor.get_stats()
        if stats:
            print("\n💻 SYSTEM RESOURCE USAGE:")
            print(f"   Average CPU: {stats['avg_cpu']:.1f}%  Peak CPU: {stats['max_cpu']:.1f}%")
            print(f"   Peak memory: {stats['max_memory']:.1f}%  Peak RSS: {stats['max_rss_mb']:.0f}MB")
        return ok

    def determinism_test(self, n: int) -> bool:
        print("\n🔁 THREAD DETERMINISM TEST")
        print("=" * 40)
        space = as_provider(synthetic_points(n, clustered=True, seed=1), RADIUS, STEP)
        reference = score(space, workers=1)
        ok = True
        for workers in sorted({2, 4, self.workers}):
            same = reference.equals(score(space, workers=workers))
            ok &= same
            print(f"   1 vs {workers} worker(s): {'identical' if same else 'DIFFERENT'}")
        return ok

    def substitute_test(self) -> bool:
        print("\n🗺️  CLUSTERED SUBSTITUTE DATASET")
        print("=" * 40)
        result = self.time_scoring(synthetic_points(SUBSTITUTE_SIZE, clustered=True, seed=2))
        ok = result["total_s"] < SUBSTITUTE_SECONDS
        print(f"   {SUBSTITUTE_SIZE:,} points scored in {result['total_s']:.1f}s "
              f"(limit {SUBSTITUTE_SECONDS:.0f}s), {result['selected']:,} selected")
        return ok


def parse_arguments(argv: Optional[List[str]] = None):
    parser = argparse.ArgumentParser(description="Scaling and determinism benchmark for point scoring")
    parser.add_argument("--sizes", type=int, nargs="+", help="Point counts to time (default: 250k to 2M)")
    parser.add_argument("--quick", action="store_true", help="Use 25k to 200k points and skip the 2M dataset")
    parser.add_argument("--threads", type=int, help="Scoring threads (default: all cores)")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser.parse_args(argv)


def main(argv: Optional[List[str]] = None) -> int:
    args = parse_arguments(argv)
    configure_logging(logging.INFO if args.verbose else logging.WARNING)
    sizes = args.sizes or (QUICK_SIZES if args.quick else DEFAULT_SIZES)

    print("⏱️  SCALING BENCHMARK")
    print(f"System: {describe_system() or 'unknown'}")
    benchmark = ScalingBenchmark(args.threads or default_workers())

    checks = {
        "linear scaling": benchmark.scaling_test(sizes),
        "thread determinism": benchmark.determinism_test(min(sizes)),
    }
    if not args.quick:
        checks["2M clustered substitute"] = benchmark.substitute_test()

    print("\n📋 RESULTS")
    for name, ok in checks.items():
        print(f"   {'✅' if ok else '❌'} {name}")
    return 0 if all(checks.values()) else 1


if __name__ == "__main__":
    sys.exit(main())
