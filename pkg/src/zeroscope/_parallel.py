import os
from concurrent.futures import ThreadPoolExecutor


def default_workers():
    env = os.environ.get("ZEROSCOPE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def pmap(fn, items, workers=1):
    """Ordered map, optionally on a thread pool.

    Output order always follows ``items`` so reductions over the result are
    independent of the worker count.
    """
    items = list(items)
    if workers is None:
        workers = default_workers()
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))
