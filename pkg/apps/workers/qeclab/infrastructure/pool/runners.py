"""
Sweep-point dispatch.
- SerialRunner evaluates in the calling process.
- ProcessPoolRunner fans out to worker processes; each worker runs single-threaded
  (the entrypoint pins the BLAS thread variables and workers inherit them).
Both return results in input order.
"""
from __future__ import annotations

import asyncio
from concurrent.futures import ProcessPoolExecutor
from logging import getLogger
from typing import Callable, Optional, Sequence, TypeVar

from qeclab.domain.ports import PointRunner

logger = getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class SerialRunner(PointRunner):
    async def map(self, fn: Callable[[T], R], items: Sequence[T]) -> list[R]:
        return [fn(item) for item in items]

    async def close(self) -> None:
        return None


class ProcessPoolRunner(PointRunner):
    def __init__(self, jobs: int):
        if jobs < 1:
            raise ValueError(f"jobs must be at least 1, got {jobs}")
        self.jobs = jobs
        self._executor: Optional[ProcessPoolExecutor] = None

    def _pool(self) -> ProcessPoolExecutor:
        if self._executor is None:
            self._executor = ProcessPoolExecutor(max_workers=self.jobs)
            logger.info(f"🧵 process pool with {self.jobs} worker(s)")
        return self._executor

    async def map(self, fn: Callable[[T], R], items: Sequence[T]) -> list[R]:
        if len(items) <= 1:
            return [fn(item) for item in items]
        loop = asyncio.get_running_loop()
        pool = self._pool()
        futures = [loop.run_in_executor(pool, fn, item) for item in items]
        # gather keeps the submission order
        return list(await asyncio.gather(*futures))

    async def close(self) -> None:
        if self._executor is not None:
            await asyncio.to_thread(self._executor.shutdown, True)
            self._executor = None
