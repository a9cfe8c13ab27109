"""Optional thread parallelism, capped by the FRINGECAL_THREADS variable.

Worker counts default to 1 (serial) so results are reproducible byte for
byte unless the user opts in. All parallel loops in the package write to
disjoint output slices, so threading never changes the arithmetic, only
the wall-clock time.
"""

import os
from concurrent.futures import ThreadPoolExecutor

from .errors import ParameterError


def thread_count() -> int:
    """Worker count from FRINGECAL_THREADS; 1 when unset."""
    raw = os.environ.get("FRINGECAL_THREADS", "")
    if not raw.strip():
        return 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise ParameterError(f"FRINGECAL_THREADS must be an integer, got {raw!r}") from exc
    if n < 1:
        raise ParameterError(f"FRINGECAL_THREADS must be >= 1, got {n}")
    return n


def run_indexed(n_items, worker, n_threads=None):
    """Run worker(i) for i in range(n_items), optionally on a thread pool.

    The worker must only touch state owned by index i. Results are
    returned as a list ordered by index.
    """
    if n_threads is None:
        n_threads = thread_count()
    if n_threads <= 1 or n_items <= 1:
        return [worker(i) for i in range(n_items)]
    with ThreadPoolExecutor(max_workers=min(n_threads, n_items)) as pool:
        return list(pool.map(worker, range(n_items)))
