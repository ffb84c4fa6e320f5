"""
Bounded parallel execution helpers for blocking client calls.
"""
import asyncio
from typing import Callable, List, Sequence, TypeVar, Union

import structlog

logger = structlog.get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


async def parallel_map(
    items: Sequence[T], worker: Callable[[T], R], concurrency: int
) -> List[Union[R, BaseException]]:
    """
    Run ``worker`` over ``items`` in threads, at most ``concurrency`` at once.

    Results keep the order of ``items``; a failing item yields its exception
    instead of cancelling the others.
    """
    semaphore = asyncio.Semaphore(max(1, concurrency))

    async def run(item: T) -> R:
        async with semaphore:
            return await asyncio.to_thread(worker, item)

    tasks = [asyncio.create_task(run(item)) for item in items]
    return await asyncio.gather(*tasks, return_exceptions=True)


def run_parallel(
    items: Sequence[T], worker: Callable[[T], R], concurrency: int
) -> List[Union[R, BaseException]]:
    """Synchronous entry point for ``parallel_map``."""
    if not items:
        return []
    if concurrency <= 1:
        results: List[Union[R, BaseException]] = []
        for item in items:
            try:
                results.append(worker(item))
            except Exception as exc:
                results.append(exc)
        return results
    logger.debug("parallel_batch_started", items=len(items), concurrency=concurrency)
    return asyncio.run(parallel_map(items, worker, concurrency))
