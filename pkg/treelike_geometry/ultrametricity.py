"""Ultrametricity violation statistics.

The violation of a triple is the largest of its three sides minus the second
largest; it is zero exactly when ``d(x, z) <= max(d(x, y), d(y, z))`` holds for
every labeling of the triple. Statistics are taken over violating triples
(violation > epsilon) only; ``avg_over_all_triples`` averages over every
evaluated triple instead.
"""

from __future__ import annotations

import logging
import math
from typing import Literal, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from treelike_geometry.callbacks.base import AnalysisCallbackHandler, notify
from treelike_geometry.core_types import DistanceMatrix, check_seed, require_valid
from treelike_geometry.errors import InvalidInputError
from treelike_geometry.hyperbolicity import combinations_array
from treelike_geometry.parallel import map_blocks
from treelike_geometry.rng import CounterStream, Stream

logger = logging.getLogger(__name__)

# Below this ratio of population to requested samples, unique triples are taken
# from a shuffled enumeration rather than by rejection.
_REJECTION_RATIO = 4


class UltraStats(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_violation: float
    avg_violation: float
    std_violation: float
    num_violations: int
    total_triples: int
    epsilon: float
    mode: Literal["sampled", "exact"]
    seed: int | None = None
    avg_over_all_triples: float = 0.0


def _violations(d: np.ndarray, triples: np.ndarray) -> np.ndarray:
    i, j, k = triples.T
    d_ij, d_jk, d_ik = d[i, j], d[j, k], d[i, k]
    v1 = d_ik - np.maximum(d_ij, d_jk)
    v2 = d_ij - np.maximum(d_ik, d_jk)
    v3 = d_jk - np.maximum(d_ij, d_ik)
    return np.maximum(np.maximum(v1, v2), np.maximum(v3, 0.0))


def triple_violation(matrix: DistanceMatrix, i: int, j: int, k: int) -> float:
    n = matrix.n
    for index in (i, j, k):
        if not 0 <= index < n:
            raise InvalidInputError(f"index {index} out of range for {n} points")
    if len({i, j, k}) != 3:
        raise InvalidInputError(f"triple indices must be distinct, got {(i, j, k)}")
    return float(_violations(matrix.entries, np.array([[i, j, k]], dtype=np.int64))[0])


def _require_points(matrix: DistanceMatrix, epsilon: float) -> None:
    if matrix.n < 3:
        raise InvalidInputError(f"need at least 3 points, got {matrix.n}")
    if epsilon < 0:
        raise InvalidInputError(f"epsilon must be >= 0, got {epsilon}")


def _summarize(
    values: np.ndarray, epsilon: float, mode: Literal["sampled", "exact"], seed: int | None
) -> UltraStats:
    violating = values[values > epsilon]
    if violating.size:
        max_v, avg_v, std_v = float(violating.max()), float(violating.mean()), float(violating.std())
    else:
        max_v = avg_v = std_v = 0.0
    return UltraStats(
        max_violation=max_v,
        avg_violation=avg_v,
        std_violation=std_v,
        num_violations=int(violating.size),
        total_triples=int(values.size),
        epsilon=epsilon,
        mode=mode,
        seed=seed,
        avg_over_all_triples=float(values.mean()) if values.size else 0.0,
    )


def _evaluate(
    matrix: DistanceMatrix,
    triples: np.ndarray,
    workers: int,
    block_size: int,
    callbacks: Sequence[AnalysisCallbackHandler] | None,
) -> np.ndarray:
    d = matrix.entries
    return map_blocks(
        lambda start, stop: _violations(d, triples[start:stop]),
        len(triples),
        workers=workers,
        block_size=block_size,
        analysis="ultra",
        callbacks=callbacks,
    )


def exact_ultrametricity(
    matrix: DistanceMatrix,
    epsilon: float = 1e-9,
    *,
    workers: int = 1,
    block_size: int = 8192,
    callbacks: Sequence[AnalysisCallbackHandler] | None = None,
) -> UltraStats:
    matrix = require_valid(matrix)
    _require_points(matrix, epsilon)
    notify(callbacks, "on_analysis_start", "ultra", {"mode": "exact", "epsilon": epsilon})
    values = _evaluate(matrix, combinations_array(matrix.n, 3), workers, block_size, callbacks)
    stats = _summarize(values, epsilon, "exact", None)
    notify(callbacks, "on_analysis_end", "ultra", stats.model_dump())
    return stats


def _triple_keys(triples: np.ndarray, n: int) -> np.ndarray:
    return (triples[:, 0] * n + triples[:, 1]) * n + triples[:, 2]


def draw_unique_triples(n: int, samples: int, seed: int) -> np.ndarray:
    """``samples`` distinct sorted triples of ``range(n)``, deterministic in ``seed``.

    When the population is small relative to ``samples`` the enumeration is
    ordered by a per-triple random key and truncated. Otherwise sample ``i`` is
    drawn from counter ``i``; a duplicate of an earlier sample id is redrawn
    with the next draw number until every triple is unique.
    """
    population = math.comb(n, 3)
    if samples > population:
        raise InvalidInputError(f"cannot draw {samples} unique triples from {population}")

    if population <= _REJECTION_RATIO * samples:
        triples = combinations_array(n, 3)
        keys = CounterStream(seed, Stream.TRIPLE_ORDER).bits(np.arange(population))
        return triples[np.argsort(keys, kind="stable")[:samples]]

    stream = CounterStream(seed, Stream.TRIPLES)
    ids = np.arange(samples, dtype=np.uint64)
    draws = np.zeros(samples, dtype=np.uint64)
    triples = np.empty((samples, 3), dtype=np.int64)
    pending = np.arange(samples)
    while pending.size:
        for position in range(3):
            triples[pending, position] = stream.integers(ids[pending], draws[pending], n)
            draws[pending] += np.uint64(1)
        triples[pending] = np.sort(triples[pending], axis=1)
        distinct = (triples[:, 0] != triples[:, 1]) & (triples[:, 1] != triples[:, 2])
        _, first = np.unique(_triple_keys(triples, n), return_index=True)
        unique_first = np.zeros(samples, dtype=bool)
        unique_first[first] = True
        # np.unique reports the lowest sample id of every key, so earlier ids win.
        pending = np.flatnonzero(~(distinct & unique_first))
    return triples


def sample_ultrametricity(
    matrix: DistanceMatrix,
    samples: int,
    epsilon: float,
    seed: int,
    *,
    workers: int = 1,
    block_size: int = 8192,
    callbacks: Sequence[AnalysisCallbackHandler] | None = None,
) -> UltraStats:
    """Violation statistics over ``samples`` unique triples drawn without replacement."""
    matrix = require_valid(matrix)
    _require_points(matrix, epsilon)
    seed = check_seed(seed)
    if samples < 1:
        raise InvalidInputError(f"sample count must be >= 1, got {samples}")

    if samples >= math.comb(matrix.n, 3):
        logger.info("%d samples cover all triples of %d points; enumerating", samples, matrix.n)
        stats = exact_ultrametricity(
            matrix, epsilon, workers=workers, block_size=block_size, callbacks=callbacks
        )
        return stats.model_copy(update={"seed": seed})

    notify(
        callbacks,
        "on_analysis_start",
        "ultra",
        {"mode": "sampled", "samples": samples, "epsilon": epsilon, "seed": seed},
    )
    triples = draw_unique_triples(matrix.n, samples, seed)
    values = _evaluate(matrix, triples, workers, block_size, callbacks)
    stats = _summarize(values, epsilon, "sampled", seed)
    notify(callbacks, "on_analysis_end", "ultra", stats.model_dump())
    return stats


def is_ultrametric(matrix: DistanceMatrix, epsilon: float = 1e-9) -> bool:
    return exact_ultrametricity(matrix, epsilon).num_violations == 0
