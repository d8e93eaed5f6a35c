"""Fan a range kernel out over vertex chunks with threads (kernels release the GIL)."""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("ALPHAGRAPH_THREADS", "1")))
    except ValueError:
        return 1


def chunks(n: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, n))
    bounds = np.linspace(0, n, parts + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def map_ranges(fn, n: int, threads: int | None = None) -> list:
    """Call ``fn(lo, hi)`` over a partition of ``range(n)``; results in range order."""
    threads = default_threads() if threads is None else max(1, threads)
    ranges = chunks(n, threads)
    if len(ranges) <= 1:
        return [fn(lo, hi) for lo, hi in ranges]
    with ThreadPoolExecutor(len(ranges)) as ex:
        return list(ex.map(lambda r: fn(*r), ranges))
