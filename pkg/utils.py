import hashlib
import logging
import sys
from typing import Optional

import psutil

LOG_FORMAT = "[%(asctime)s] %(levelname)s %(name)s: %(message)s"
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def configure_logging(level: int = logging.WARNING, stream=None) -> None:
    """Send log records to stderr; stdout carries only the run summary"""
    handler = logging.StreamHandler(stream or sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT, LOG_DATE_FORMAT))
    root = logging.getLogger()
    for existing in list(root.handlers):
        root.removeHandler(existing)
    root.addHandler(handler)
    root.setLevel(level)


def default_workers() -> int:
    """All logical cores"""
    return psutil.cpu_count(logical=True) or 1


def round_half_up_percent(part: int, whole: int) -> int:
    """100 * part / whole rounded half up, in exact integer arithmetic"""
    return (200 * part + whole) // (2 * whole)


def format_summary(selected: int, total: int) -> str:
    """Summary line of a sampling run, e.g. '31/77 objects (40%)'"""
    pct = round_half_up_percent(selected, total) if total else 0
    return f"{selected}/{total} objects ({pct}%)"


def format_number(value: float) -> str:
    """Shortest round-trip decimal; integral values without a fractional part"""
    value = float(value)
    if value.is_integer():
        return str(int(value))
    return repr(value)


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def file_checksum(path: str, chunk_size: int = 1 << 20) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(chunk_size), b""):
            digest.update(chunk)
    return digest.hexdigest()


def describe_system() -> Optional[str]:
    """CPU and memory line for benchmark reports"""
    try:
        memory_gb = psutil.virtual_memory().total / (1024 ** 3)
        return f"{psutil.cpu_count()} CPUs, {memory_gb:.1f}GB RAM"
    except Exception:
        return None
