import typing
from concurrent.futures import ProcessPoolExecutor

T = typing.TypeVar("T")
R = typing.TypeVar("R")


def map_work_items(
    worker: typing.Callable[[T], R],
    work_items: typing.Sequence[T],
    threads: int = 1,
) -> list[R]:
    """Run ``worker`` over ``work_items`` and return results in item order.

    ``worker`` must be a module level function so it can be pickled into
    the worker processes. Results never depend on ``threads``: every work
    item carries its own seed token.
    """
    if threads <= 1 or len(work_items) <= 1:
        return [worker(item) for item in work_items]

    max_workers = min(threads, len(work_items))
    with ProcessPoolExecutor(max_workers=max_workers) as executor:
        return list(executor.map(worker, work_items))
