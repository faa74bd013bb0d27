import os
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, List, Optional, Sequence, TypeVar

from loguru import logger
from tqdm import tqdm

T = TypeVar("T")
R = TypeVar("R")


def default_workers() -> int:
    return os.cpu_count() or 1


def ordered_map(
    fn: Callable[[T], R],
    items: Sequence[T],
    max_workers: Optional[int] = None,
    desc: str = "points",
) -> List[R]:
    """
    Run fn over items on a thread pool; results come back in item order
    whatever the completion order.
    """
    workers = max_workers or default_workers()
    results: List[Optional[R]] = [None] * len(items)
    if not items:
        return []

    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(fn, item): idx for idx, item in enumerate(items)}
        for future in tqdm(as_completed(futures), total=len(items), desc=desc, unit="pt", leave=False):
            results[futures[future]] = future.result()

    logger.debug(f"Finished {len(items)} {desc} on {workers} workers")
    return results
