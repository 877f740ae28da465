"""Embedding preprocessing: pad/flatten, optional PCA, rescale into the unit ball."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from treelike_geometry.core_types import EmbeddingSet
from treelike_geometry.errors import DegenerateDataError, InvalidInputError

logger = logging.getLogger(__name__)

DEFAULT_BALL_NORM = 0.9
# Cumulative variance fractions are compared with this slack so that a target of
# 1.0 is reachable despite rounding in the eigenvalue sum.
_VARIANCE_SLACK = 1e-12


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray
    retained_fraction: float

    @property
    def out_dim(self) -> int:
        return int(self.components.shape[0])

    def transform(self, rows: np.ndarray) -> np.ndarray:
        return (np.asarray(rows, dtype=np.float64) - self.mean) @ self.components.T


def pad_and_flatten(
    raw: Sequence[Sequence[float] | np.ndarray], pad_value: float = 0.0
) -> EmbeddingSet:
    """Flatten every item and right-pad to the longest length."""
    if len(raw) == 0:
        raise InvalidInputError("no embeddings to pad")
    flat = [np.ravel(np.asarray(item, dtype=np.float64)) for item in raw]
    for index, row in enumerate(flat):
        if row.size == 0:
            raise InvalidInputError(f"embedding {index} is empty")
        if not np.isfinite(row).all():
            raise InvalidInputError(f"non-finite value in embedding {index}")

    dim = max(row.size for row in flat)
    rows = np.full((len(flat), dim), pad_value, dtype=np.float64)
    for index, row in enumerate(flat):
        rows[index, : row.size] = row
    return EmbeddingSet(rows=rows)


def _fix_signs(components: np.ndarray) -> np.ndarray:
    # Largest-magnitude entry of every component is made positive.
    pivots = np.argmax(np.abs(components), axis=1)
    signs = np.sign(components[np.arange(components.shape[0]), pivots])
    signs[signs == 0] = 1.0
    return components * signs[:, None]


def pca_fit_transform(
    embeddings: EmbeddingSet, variance_target: float = 0.99
) -> tuple[EmbeddingSet, PcaModel]:
    """Project onto the fewest principal directions reaching ``variance_target``.

    The symmetric eigenproblem is solved on whichever of the covariance
    (dim x dim) or Gram (n x n) matrix is smaller.
    """
    if not 0.0 < variance_target <= 1.0:
        raise InvalidInputError(f"variance target must be in (0, 1], got {variance_target}")
    if embeddings.n < 2:
        raise InvalidInputError("PCA needs at least 2 embeddings")

    rows = embeddings.rows
    mean = rows.mean(axis=0)
    centered = rows - mean
    scale = embeddings.n - 1

    if embeddings.n < embeddings.dim:
        eigvals, eigvecs = np.linalg.eigh(centered @ centered.T)
        order = np.argsort(eigvals)[::-1]
        eigvals = np.clip(eigvals[order], 0.0, None)
        positive = eigvals > eigvals[0] * np.finfo(np.float64).eps * embeddings.n
        eigvals = eigvals[positive]
        components = (centered.T @ eigvecs[:, order][:, positive] / np.sqrt(eigvals)).T
    else:
        eigvals, eigvecs = np.linalg.eigh(centered.T @ centered)
        order = np.argsort(eigvals)[::-1]
        eigvals = np.clip(eigvals[order], 0.0, None)
        components = eigvecs[:, order].T

    total = float(eigvals.sum())
    if total <= 0.0:
        raise DegenerateDataError("degenerate data: all embeddings are identical")

    fractions = np.cumsum(eigvals) / total
    k = int(np.searchsorted(fractions, variance_target - _VARIANCE_SLACK)) + 1
    k = min(k, eigvals.size)
    components = _fix_signs(components[:k])
    explained = eigvals[:k] / scale

    model = PcaModel(
        mean=mean,
        components=components,
        explained_variance=explained,
        retained_fraction=float(fractions[k - 1]),
    )
    logger.info("PCA kept %d of %d dimensions (%.6f of variance)", k, embeddings.dim, model.retained_fraction)
    return embeddings.with_rows(model.transform(rows)), model


def rescale_to_ball(
    embeddings: EmbeddingSet, target_max_norm: float = DEFAULT_BALL_NORM
) -> tuple[EmbeddingSet, float]:
    """Multiply every row by one scalar so the largest norm equals ``target_max_norm``.

    Returns the rescaled set and the scalar that was applied.
    """
    if not 0.0 < target_max_norm < 1.0:
        raise InvalidInputError(f"target norm must be in (0, 1), got {target_max_norm}")
    max_norm = float(np.linalg.norm(embeddings.rows, axis=1).max())
    if max_norm == 0.0:
        raise DegenerateDataError("cannot rescale an all-zero embedding set")
    scalar = target_max_norm / max_norm
    return embeddings.with_rows(embeddings.rows * scalar), scalar
