"""Neighbor-Joining Q-matrix statistics as a tree-likeness score (no tree is built)."""

from __future__ import annotations

import logging
from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from treelike_geometry.callbacks.base import AnalysisCallbackHandler, notify
from treelike_geometry.core_types import DistanceMatrix, require_valid
from treelike_geometry.errors import InvalidInputError

logger = logging.getLogger(__name__)


class NjStats(BaseModel):
    model_config = ConfigDict(frozen=True)

    nj_max: float
    nj_avg: float
    nj_std: float
    n: int


def q_matrix(matrix: DistanceMatrix) -> np.ndarray:
    """``Q(i,j) = (n-2) D(i,j) - sum_k D(i,k) - sum_k D(j,k)``, zero diagonal.

    The upper triangle is computed once and mirrored, so ``Q`` is exactly symmetric.
    """
    matrix = require_valid(matrix)
    n = matrix.n
    if n < 3:
        raise InvalidInputError(f"Q-matrix needs at least 3 points, got {n}")
    d = matrix.entries
    row_sums = d.sum(axis=1)
    i, j = np.triu_indices(n, k=1)
    upper = (n - 2) * d[i, j] - row_sums[i] - row_sums[j]
    q = np.zeros((n, n), dtype=np.float64)
    q[i, j] = upper
    q[j, i] = upper
    return q


def nj_scores(
    matrix: DistanceMatrix,
    *,
    callbacks: Sequence[AnalysisCallbackHandler] | None = None,
) -> NjStats:
    """Max, mean and population std of ``|Q(i,j)|`` over ``i < j``; all zero when n < 3."""
    notify(callbacks, "on_analysis_start", "nj", {"n": matrix.n})
    if matrix.n < 3:
        stats = NjStats(nj_max=0.0, nj_avg=0.0, nj_std=0.0, n=matrix.n)
    else:
        q = q_matrix(matrix)
        values = np.abs(q[np.triu_indices(matrix.n, k=1)])
        stats = NjStats(
            nj_max=float(values.max()),
            nj_avg=float(values.mean()),
            nj_std=float(values.std()),
            n=matrix.n,
        )
    notify(callbacks, "on_analysis_end", "nj", stats.model_dump())
    return stats


def argmin_q_pair(matrix: DistanceMatrix) -> tuple[int, int]:
    """Lexicographically smallest pair ``(i, j)``, ``i < j``, minimizing Q."""
    q = q_matrix(matrix)
    i, j = np.triu_indices(matrix.n, k=1)
    best = int(np.argmin(q[i, j]))
    return int(i[best]), int(j[best])
