"""Euclidean and Poincaré-ball distances and distance-matrix construction."""

from __future__ import annotations

import logging
from typing import Literal

import numpy as np
from scipy.spatial.distance import pdist

from treelike_geometry.core_types import DistanceMatrix, EmbeddingSet
from treelike_geometry.errors import DomainError, ShapeError

logger = logging.getLogger(__name__)

MetricKind = Literal["euclidean", "poincare"]
METRIC_KINDS: tuple[MetricKind, ...] = ("euclidean", "poincare")


def _pair(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ShapeError(f"vectors must be 1-D with equal length, got {x.shape} and {y.shape}")
    return x, y


def _arcosh_one_plus(u: np.ndarray) -> np.ndarray:
    # arcosh(1 + u) for u >= 0, accurate for small u.
    u = np.maximum(u, 0.0)
    return np.log1p(u + np.sqrt(u * (u + 2.0)))


def euclidean_distance(x: np.ndarray, y: np.ndarray) -> float:
    x, y = _pair(x, y)
    return float(np.sqrt(np.sum((x - y) ** 2)))


def poincare_distance(x: np.ndarray, y: np.ndarray) -> float:
    x, y = _pair(x, y)
    sq_x = float(x @ x)
    sq_y = float(y @ y)
    for name, sq in (("x", sq_x), ("y", sq_y)):
        if sq >= 1.0:
            raise DomainError(f"{name} lies outside the open unit ball (norm {np.sqrt(sq):.6g})")
    diff = x - y
    u = 2.0 * float(diff @ diff) / ((1.0 - sq_x) * (1.0 - sq_y))
    return float(_arcosh_one_plus(np.asarray(u)))


def build_distance_matrix(embeddings: EmbeddingSet, kind: MetricKind = "euclidean") -> DistanceMatrix:
    """Pairwise distances; the upper triangle is computed once and mirrored."""
    rows = embeddings.rows
    n = embeddings.n
    if kind == "euclidean":
        condensed = pdist(rows, metric="euclidean") if n > 1 else np.empty(0)
        return DistanceMatrix.from_condensed(condensed, n, "euclidean")
    if kind != "poincare":
        raise ValueError(f"unknown metric {kind!r}")

    squared_norms = np.einsum("ij,ij->i", rows, rows)
    outside = np.flatnonzero(squared_norms >= 1.0)
    if outside.size:
        listed = ", ".join(str(i) for i in outside[:10])
        more = "" if outside.size <= 10 else f" (+{outside.size - 10} more)"
        raise DomainError(f"rows outside the open unit ball: {listed}{more}; rescale first")
    if n == 1:
        return DistanceMatrix.from_condensed(np.empty(0), 1, "poincare")

    i, j = np.triu_indices(n, k=1)
    squared = pdist(rows, metric="sqeuclidean")
    denom = (1.0 - squared_norms[i]) * (1.0 - squared_norms[j])
    condensed = _arcosh_one_plus(2.0 * squared / denom)
    return DistanceMatrix.from_condensed(condensed, n, "poincare")
