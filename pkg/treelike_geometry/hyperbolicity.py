"""Gromov δ-hyperbolicity: Gromov products, per-quadruple δ, sampled and exact estimators.

Two per-quadruple formulas are offered:

``four_point``
    Half the gap between the two largest of the three pairwise sums. It is
    invariant under relabeling of the quadruple and is the default.

``paper_slack``
    ``max(0, min([a,b]_w, [b,c]_w) - [a,c]_w)`` for one labeled role assignment,
    i.e. the smallest δ satisfying ``[a,c]_w >= min([a,b]_w, [b,c]_w) - δ``.
    The maximum over all 24 role assignments equals ``four_point``.
"""

from __future__ import annotations

import itertools
import logging
import math
from typing import Literal, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from treelike_geometry.callbacks.base import AnalysisCallbackHandler, notify
from treelike_geometry.core_types import DistanceMatrix, check_seed, require_valid
from treelike_geometry.errors import InvalidInputError
from treelike_geometry.parallel import map_blocks
from treelike_geometry.rng import CounterStream, Stream

logger = logging.getLogger(__name__)

QuadrupleDeltaFormula = Literal["four_point", "paper_slack"]

PAPER_SLACK_NOTE = (
    "paper_slack uses min([a,b]_w,[b,c]_w) - [a,c]_w clamped at 0, the sign that makes "
    "the four-point inequality hold; the opposite sign is negative for most quadruples"
)

# Role assignments (a, b, c, w) of one unordered quadruple.
_ROLE_PERMUTATIONS = np.array(list(itertools.permutations(range(4))), dtype=np.int64)


class DeltaStats(BaseModel):
    model_config = ConfigDict(frozen=True)

    delta_max: float
    delta_avg: float
    delta_std: float
    samples_evaluated: int
    mode: Literal["sampled", "exact"]
    formula: QuadrupleDeltaFormula
    seed: int | None = None


def _check_index(n: int, *indices: int) -> None:
    for index in indices:
        if not 0 <= index < n:
            raise InvalidInputError(f"index {index} out of range for {n} points")


def gromov_product(matrix: DistanceMatrix, a: int, b: int, w: int) -> float:
    """``[a, b]_w = (d(a, w) + d(b, w) - d(a, b)) / 2``."""
    _check_index(matrix.n, a, b, w)
    d = matrix.entries
    return 0.5 * (d[a, w] + d[b, w] - d[a, b])


def _four_point(d: np.ndarray, quads: np.ndarray) -> np.ndarray:
    a, b, c, w = quads.T
    sums = np.stack((d[a, b] + d[c, w], d[a, c] + d[b, w], d[a, w] + d[b, c]), axis=1)
    sums.sort(axis=1)
    return (sums[:, 2] - sums[:, 1]) / 2.0


def _paper_slack(d: np.ndarray, quads: np.ndarray) -> np.ndarray:
    a, b, c, w = quads.T
    ab = 0.5 * (d[a, w] + d[b, w] - d[a, b])
    bc = 0.5 * (d[b, w] + d[c, w] - d[b, c])
    ac = 0.5 * (d[a, w] + d[c, w] - d[a, c])
    return np.maximum(np.minimum(ab, bc) - ac, 0.0)


_KERNELS = {"four_point": _four_point, "paper_slack": _paper_slack}


def _kernel(formula: str):
    try:
        return _KERNELS[formula]
    except KeyError:
        raise InvalidInputError(f"unknown δ formula {formula!r}") from None


def quadruple_delta(
    matrix: DistanceMatrix,
    a: int,
    b: int,
    c: int,
    w: int,
    formula: QuadrupleDeltaFormula = "four_point",
) -> float:
    _check_index(matrix.n, a, b, c, w)
    if len({a, b, c, w}) != 4:
        raise InvalidInputError(f"quadruple indices must be distinct, got {(a, b, c, w)}")
    quad = np.array([[a, b, c, w]], dtype=np.int64)
    return float(_kernel(formula)(matrix.entries, quad)[0])


def _stats(values: np.ndarray) -> tuple[float, float, float]:
    if values.size == 0:
        return 0.0, 0.0, 0.0
    return float(values.max()), float(values.mean()), float(values.std())


def _require_points(matrix: DistanceMatrix) -> None:
    if matrix.n < 4:
        raise InvalidInputError(f"need at least 4 points, got {matrix.n}")


def combinations_array(n: int, r: int) -> np.ndarray:
    """All ``r``-subsets of ``range(n)`` in lexicographic order, one per row."""
    count = math.comb(n, r)
    flat = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(n), r)),
        dtype=np.int64,
        count=count * r,
    )
    return flat.reshape(count, r)


def total_quadruples(n: int, formula: QuadrupleDeltaFormula) -> int:
    """Evaluations performed by exhaustive enumeration for ``formula``."""
    unordered = math.comb(n, 4)
    return unordered * len(_ROLE_PERMUTATIONS) if formula == "paper_slack" else unordered


def exact_delta(
    matrix: DistanceMatrix,
    formula: QuadrupleDeltaFormula = "four_point",
    *,
    workers: int = 1,
    block_size: int = 8192,
    callbacks: Sequence[AnalysisCallbackHandler] | None = None,
) -> DeltaStats:
    """δ statistics over every quadruple (every labeled role assignment for ``paper_slack``)."""
    matrix = require_valid(matrix)
    _require_points(matrix)
    kernel = _kernel(formula)
    d = matrix.entries
    quads = combinations_array(matrix.n, 4)
    if formula == "paper_slack":
        quads = quads[:, _ROLE_PERMUTATIONS].reshape(-1, 4)

    notify(callbacks, "on_analysis_start", "delta", {"mode": "exact", "formula": formula})
    values = map_blocks(
        lambda start, stop: kernel(d, quads[start:stop]),
        len(quads),
        workers=workers,
        block_size=block_size,
        analysis="delta",
        callbacks=callbacks,
    )
    delta_max, delta_avg, delta_std = _stats(values)
    stats = DeltaStats(
        delta_max=delta_max,
        delta_avg=delta_avg,
        delta_std=delta_std,
        samples_evaluated=int(values.size),
        mode="exact",
        formula=formula,
    )
    notify(callbacks, "on_analysis_end", "delta", stats.model_dump())
    return stats


def draw_quadruples(n: int, seed: int, start: int, stop: int) -> np.ndarray:
    """Quadruples of distinct indices for sample ids ``[start, stop)``.

    Sample ``i`` reads the counter stream at counter ``i`` only, drawing until
    each position holds an index not used by an earlier position, so its
    quadruple depends on ``(seed, i)`` alone.
    """
    stream = CounterStream(seed, Stream.QUADRUPLES)
    ids = np.arange(start, stop, dtype=np.uint64)
    draws = np.zeros(stop - start, dtype=np.uint64)
    quads = np.empty((stop - start, 4), dtype=np.int64)
    for position in range(4):
        pending = np.arange(stop - start)
        while pending.size:
            candidates = stream.integers(ids[pending], draws[pending], n)
            draws[pending] += np.uint64(1)
            collides = (quads[pending, :position] == candidates[:, None]).any(axis=1)
            accepted = pending[~collides]
            quads[accepted, position] = candidates[~collides]
            pending = pending[collides]
    return quads


def sample_delta(
    matrix: DistanceMatrix,
    samples: int,
    seed: int,
    formula: QuadrupleDeltaFormula = "four_point",
    *,
    workers: int = 1,
    block_size: int = 8192,
    callbacks: Sequence[AnalysisCallbackHandler] | None = None,
) -> DeltaStats:
    """δ statistics over ``samples`` random quadruples, drawn with replacement.

    When ``samples`` reaches the number of exhaustive evaluations, every
    quadruple is enumerated instead and the result is reported in exact mode.
    """
    matrix = require_valid(matrix)
    _require_points(matrix)
    seed = check_seed(seed)
    if samples < 1:
        raise InvalidInputError(f"sample count must be >= 1, got {samples}")
    kernel = _kernel(formula)

    if samples >= total_quadruples(matrix.n, formula):
        logger.info("%d samples cover all quadruples of %d points; enumerating", samples, matrix.n)
        stats = exact_delta(
            matrix, formula, workers=workers, block_size=block_size, callbacks=callbacks
        )
        return stats.model_copy(update={"seed": seed})

    d = matrix.entries
    n = matrix.n
    notify(
        callbacks,
        "on_analysis_start",
        "delta",
        {"mode": "sampled", "formula": formula, "samples": samples, "seed": seed},
    )
    values = map_blocks(
        lambda start, stop: kernel(d, draw_quadruples(n, seed, start, stop)),
        samples,
        workers=workers,
        block_size=block_size,
        analysis="delta",
        callbacks=callbacks,
    )
    delta_max, delta_avg, delta_std = _stats(values)
    stats = DeltaStats(
        delta_max=delta_max,
        delta_avg=delta_avg,
        delta_std=delta_std,
        samples_evaluated=samples,
        mode="sampled",
        formula=formula,
        seed=seed,
    )
    notify(callbacks, "on_analysis_end", "delta", stats.model_dump())
    return stats
