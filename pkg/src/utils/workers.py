"""Order-preserving task runner for independent checks"""

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def run_tasks(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> List[R]:
    """Apply ``fn`` to every item; results come back in input order.

    ``fn`` must be a module-level function when ``workers > 1``.
    """
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
