"""Ordered worker pool for CPU-bound fits."""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from typing import TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class WorkerPool:
    """Fan tasks out to workers and collect the results in input order.

    ``max_workers <= 1`` runs everything inline, which keeps tracebacks simple
    and is what tests use. Processes are the default for more workers because
    the fits hold the GIL in numpy-light Python loops.
    """

    def __init__(self, max_workers: int = 1, use_processes: bool = True) -> None:
        self._max_workers = max(1, max_workers)
        self._use_processes = use_processes

    @property
    def max_workers(self) -> int:
        return self._max_workers

    def map_ordered(self, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
        """Apply ``fn`` to every item; result ``i`` belongs to item ``i``.

        Tasks are expected to turn estimation failures into result records;
        anything else escaping a task is logged and re-raised.
        """
        work: Sequence[T] = list(items)
        if self._max_workers == 1 or len(work) <= 1:
            return [fn(item) for item in work]

        with self._executor() as pool:
            futures = [pool.submit(fn, item) for item in work]
            results: list[R] = []
            for i, future in enumerate(futures):
                try:
                    results.append(future.result())
                except Exception as e:
                    logger.error("Task %d failed: %s", i, e)
                    raise
        return results

    def _executor(self) -> Executor:
        if self._use_processes:
            return ProcessPoolExecutor(max_workers=self._max_workers)
        return ThreadPoolExecutor(max_workers=self._max_workers)
