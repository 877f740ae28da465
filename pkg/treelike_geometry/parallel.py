from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

import numpy as np

from treelike_geometry.callbacks.base import AnalysisCallbackHandler, notify

logger = logging.getLogger(__name__)

BlockFn = Callable[[int, int], np.ndarray]


def map_blocks(
    fn: BlockFn,
    total: int,
    *,
    workers: int = 1,
    block_size: int = 8192,
    analysis: str = "",
    callbacks: Sequence[AnalysisCallbackHandler] | None = None,
) -> np.ndarray:
    """Evaluate ``fn(start, stop)`` over fixed blocks of ``range(total)``.

    Each block owns the slots ``[start, stop)`` of the returned array, so the
    result is bitwise identical for any ``workers``.
    """
    out = np.empty(total, dtype=np.float64)
    starts = list(range(0, total, block_size))
    logger.debug("%s: %d items in %d block(s), %d worker(s)", analysis, total, len(starts), workers)

    def run(start: int) -> int:
        stop = min(start + block_size, total)
        out[start:stop] = fn(start, stop)
        return stop - start

    done = 0
    if workers <= 1 or len(starts) <= 1:
        results = map(run, starts)
        for size in results:
            done += size
            notify(callbacks, "on_analysis_progress", analysis, done, total)
        return out

    with ThreadPoolExecutor(max_workers=workers) as pool:
        for size in pool.map(run, starts):
            done += size
            notify(callbacks, "on_analysis_progress", analysis, done, total)
    return out
