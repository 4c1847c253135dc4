from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from tqdm import tqdm

from utils.logger import logger

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(
    fn: Callable[[T], R],
    items: Iterable[T],
    threads: int = 1,
    progress: bool = False,
    desc: Optional[str] = None,
) -> List[R]:
    """
    Apply fn to every item on a thread pool

    Results come back in input order whatever the worker count, so any
    reduction over them is deterministic.
    """
    items = list(items)
    threads = max(1, min(threads, len(items) or 1))

    if threads == 1:
        iterator = tqdm(items, desc=desc, disable=not progress, leave=False)
        return [fn(item) for item in iterator]

    logger.debug(f"Dispatching {len(items)} shards to {threads} workers")
    with ThreadPoolExecutor(max_workers=threads) as executor:
        mapped = executor.map(fn, items)
        return list(
            tqdm(mapped, total=len(items), desc=desc, disable=not progress, leave=False)
        )
