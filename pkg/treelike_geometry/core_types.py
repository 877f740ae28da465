"""Shared domain types: embedding sets, distance matrices and seeds."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from treelike_geometry.errors import InvalidInputError, ShapeError

logger = logging.getLogger(__name__)

MetricTag = Literal["euclidean", "poincare", "graph_shortest_path", "external"]
ViolationKind = Literal["asymmetry", "nonzero diagonal", "negative", "non-finite"]

SEED_LIMIT = 2**64


def check_seed(value: int) -> int:
    """Return ``value`` if it fits in an unsigned 64-bit integer."""
    value = int(value)
    if not 0 <= value < SEED_LIMIT:
        raise InvalidInputError(f"seed must be in [0, 2**64), got {value}")
    return value


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.float64, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class EmbeddingSet:
    rows: np.ndarray
    ids: list[str] | None = None
    labels: list[str] | None = None

    def __post_init__(self) -> None:
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim != 2:
            raise ShapeError(f"embedding rows must form a 2-D matrix, got {rows.ndim} dimension(s)")
        n, dim = rows.shape
        if n < 1 or dim < 1:
            raise ShapeError(f"embedding set must have n >= 1 and dim >= 1, got {n}x{dim}")
        bad_rows = np.flatnonzero(~np.isfinite(rows).all(axis=1))
        if bad_rows.size:
            raise InvalidInputError(f"non-finite entry in row {int(bad_rows[0])}")
        for name in ("ids", "labels"):
            values = getattr(self, name)
            if values is not None and len(values) != n:
                raise ShapeError(f"{name} has length {len(values)}, expected {n}")
        object.__setattr__(self, "rows", _frozen(rows))

    @property
    def n(self) -> int:
        return int(self.rows.shape[0])

    @property
    def dim(self) -> int:
        return int(self.rows.shape[1])

    def with_rows(self, rows: np.ndarray) -> EmbeddingSet:
        """Same items (ids, labels) carried by new coordinates."""
        return EmbeddingSet(rows=rows, ids=self.ids, labels=self.labels)


@dataclass(frozen=True)
class DistanceMatrix:
    """Square matrix of pairwise distances.

    Only the shape is checked on construction. Matrices built inside the package
    satisfy the metric invariants by construction; externally loaded ones are
    tagged ``external`` and must go through :func:`validate_distance_matrix`
    before any analysis uses them (see :func:`require_valid`).
    """

    entries: np.ndarray
    metric_tag: MetricTag = "external"
    validated: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=np.float64)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ShapeError(f"distance matrix must be square, got shape {entries.shape}")
        if entries.shape[0] < 1:
            raise ShapeError("distance matrix must have at least one row")
        object.__setattr__(self, "entries", _frozen(entries))

    @property
    def n(self) -> int:
        return int(self.entries.shape[0])

    @classmethod
    def from_condensed(cls, condensed: np.ndarray, n: int, metric_tag: MetricTag) -> DistanceMatrix:
        """Mirror an upper-triangle vector (``pdist`` order) into a full matrix."""
        entries = np.zeros((n, n), dtype=np.float64)
        upper = np.triu_indices(n, k=1)
        entries[upper] = condensed
        entries.T[upper] = condensed
        return cls(entries=entries, metric_tag=metric_tag, validated=True)

    def subset(self, indices: Sequence[int]) -> DistanceMatrix:
        idx = np.asarray(indices, dtype=np.int64)
        return DistanceMatrix(
            entries=self.entries[np.ix_(idx, idx)],
            metric_tag=self.metric_tag,
            validated=self.validated,
        )

    def scaled(self, factor: float) -> DistanceMatrix:
        return DistanceMatrix(
            entries=self.entries * factor, metric_tag=self.metric_tag, validated=self.validated
        )


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    i: int
    j: int
    magnitude: float


def validate_distance_matrix(
    matrix: DistanceMatrix | np.ndarray, tol: float = 0.0
) -> list[Violation]:
    """List every violated distance-matrix invariant beyond ``tol``.

    Asymmetry is reported once per unordered pair ``(i, j)`` with ``i < j``.
    """
    entries = matrix.entries if isinstance(matrix, DistanceMatrix) else np.asarray(matrix, float)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise ShapeError(f"distance matrix must be square, got shape {entries.shape}")

    violations: list[Violation] = []
    finite = np.isfinite(entries)
    for i, j in zip(*np.nonzero(~finite)):
        violations.append(Violation("non-finite", int(i), int(j), float("inf")))

    safe = np.where(finite, entries, 0.0)
    diagonal = np.abs(np.diag(safe))
    for i in np.flatnonzero(diagonal > tol):
        violations.append(Violation("nonzero diagonal", int(i), int(i), float(diagonal[i])))

    gap = np.abs(safe - safe.T)
    for i, j in zip(*np.nonzero(np.triu(gap > tol, k=1))):
        violations.append(Violation("asymmetry", int(i), int(j), float(gap[i, j])))

    for i, j in zip(*np.nonzero(safe < -tol)):
        violations.append(Violation("negative", int(i), int(j), float(-safe[i, j])))
    return violations


def require_valid(matrix: DistanceMatrix, tol: float = 1e-9) -> DistanceMatrix:
    """Gate for analyses: external matrices must pass validation before use."""
    if matrix.metric_tag != "external" or matrix.validated:
        return matrix
    violations = validate_distance_matrix(matrix, tol)
    if violations:
        first = violations[0]
        raise InvalidInputError(
            f"{len(violations)} invariant violation(s); first: {first.kind} at "
            f"({first.i},{first.j}) magnitude {first.magnitude:.6g}"
        )
    return DistanceMatrix(entries=matrix.entries, metric_tag="external", validated=True)
