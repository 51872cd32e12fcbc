"""Index-ordered parallel map shared by restart and sampling loops.

Results merge by index, so thread count never changes an outcome, only
wall time.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor


def parallel_map(fn, count: int, threads: int | None) -> list:
    if threads is not None and threads > 1 and count > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, range(count)))
    return [fn(i) for i in range(count)]
