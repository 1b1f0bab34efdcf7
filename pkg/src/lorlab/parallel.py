"""Deterministic seeding and a thread-capped map."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "LORLAB_THREADS"


def max_workers() -> int:
    """Worker cap: ``LORLAB_THREADS`` if set, else the CPUs this process may use."""
    cap = os.environ.get(THREADS_ENV)
    if cap:
        try:
            return max(1, int(cap))
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {cap!r}") from None
    if hasattr(os, "sched_getaffinity"):
        return len(os.sched_getaffinity(0)) or 1
    return os.cpu_count() or 1


def spawn_seeds(seed: int, count: int) -> list[np.random.SeedSequence]:
    """Independent per-task seeds derived from ``(seed, task index)``."""
    return np.random.SeedSequence(seed).spawn(count)


def parallel_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Order-preserving map over at most :func:`max_workers` threads."""
    items = list(items)
    workers = min(max_workers(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
