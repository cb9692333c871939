"""Optional thread parallelism controlled by the FCT_THREADS environment variable."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def thread_count() -> int:
    """Worker cap from FCT_THREADS; 0 or unset means serial."""
    raw = os.environ.get("FCT_THREADS", "0").strip() or "0"
    try:
        return max(0, int(raw))
    except ValueError:
        return 0


def parallel_map(fn: Callable[[T], R], items: Iterable[T]) -> list:
    """``list(map(fn, items))`` with results in input order."""
    items = list(items)
    workers = thread_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
