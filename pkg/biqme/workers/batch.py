from __future__ import annotations

import asyncio
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Sequence, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class BatchRunner:
    """Runs a per-item callable over an ordered batch with up to `jobs` worker threads.

    Results come back in input order regardless of completion order. The
    first failing item's exception propagates after every item has finished.
    """

    def __init__(self, jobs: int = 1) -> None:
        self.jobs = max(1, int(jobs))

    def map(self, func: Callable[[T], R], items: Sequence[T]) -> List[R]:
        if self.jobs == 1 or len(items) <= 1:
            return [func(item) for item in items]
        return asyncio.run(self._run(func, items))

    async def _run(self, func: Callable[[T], R], items: Sequence[T]) -> List[R]:
        loop = asyncio.get_running_loop()
        with ThreadPoolExecutor(max_workers=self.jobs, thread_name_prefix="biqme-batch") as pool:
            futures = [loop.run_in_executor(pool, self._guarded, func, index, item) for index, item in enumerate(items)]
            results = await asyncio.gather(*futures, return_exceptions=True)
        for result in results:
            if isinstance(result, BaseException):
                raise result
        return list(results)

    @staticmethod
    def _guarded(func: Callable[[T], R], index: int, item: T) -> R:
        try:
            return func(item)
        except Exception as exc:
            logger.exception("Batch item %d failed: %s", index, exc)
            raise


__all__ = ["BatchRunner"]
