import os
from concurrent.futures import ProcessPoolExecutor


def thread_count() -> int:
    """Worker cap from ``CAPLAB_THREADS``; sequential when unset."""
    raw = os.environ.get("CAPLAB_THREADS", "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def parallel_map(fn, items):
    """Order-preserving map, fanned out over processes when more than one worker is allowed."""
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))
