"""k-means clustering and internal validity indices.

The indices delegate to scikit-learn after checking the preconditions under
which each index is defined; undefined cases raise instead of returning a
placeholder value.
"""

from __future__ import annotations

import logging
from typing import Literal, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.spatial.distance import cdist, pdist
from sklearn.cluster import kmeans_plusplus
from sklearn.metrics import calinski_harabasz_score, davies_bouldin_score, silhouette_score

from treelike_geometry.callbacks.base import AnalysisCallbackHandler, notify
from treelike_geometry.core_types import DistanceMatrix, EmbeddingSet, check_seed
from treelike_geometry.distances import build_distance_matrix
from treelike_geometry.errors import DegenerateDataError, InvalidInputError

logger = logging.getLogger(__name__)


class ClusterResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: int
    assignments: list[int]
    centroids: list[list[float]]
    inertia: float
    iterations: int
    seed: int
    # None where an index is undefined for this clustering (e.g. k == n).
    silhouette: float | None = None
    calinski_harabasz: float | None = None
    davies_bouldin: float | None = None
    silhouette_metric: Literal["euclidean", "poincare"] = "euclidean"


class ClusterScores(BaseModel):
    """Index values from a clustering computed elsewhere (agglomerative, k-modes)."""

    silhouette: float | None = None
    calinski_harabasz: float | None = None
    davies_bouldin: float | None = None


def _labels(assignments: Sequence[int] | np.ndarray, n: int) -> tuple[np.ndarray, int]:
    labels = np.asarray(assignments)
    if labels.shape != (n,):
        raise InvalidInputError(f"expected {n} assignments, got {labels.shape[0]}")
    _, labels = np.unique(labels, return_inverse=True)
    return labels, int(labels.max()) + 1


def silhouette(matrix: DistanceMatrix, assignments: Sequence[int] | np.ndarray) -> float:
    """Mean silhouette from precomputed distances; singleton clusters score 0."""
    labels, k = _labels(assignments, matrix.n)
    if k < 2:
        raise InvalidInputError("silhouette needs at least 2 clusters")
    if k == matrix.n:
        return 0.0
    return float(silhouette_score(matrix.entries, labels, metric="precomputed"))


def _within_trace(rows: np.ndarray, labels: np.ndarray, k: int) -> float:
    total = 0.0
    for cluster in range(k):
        members = rows[labels == cluster]
        total += float(((members - members.mean(axis=0)) ** 2).sum())
    return total


def calinski_harabasz(embeddings: EmbeddingSet, assignments: Sequence[int] | np.ndarray) -> float:
    """Between/within dispersion ratio, ``[tr(B)/(k-1)] / [tr(W)/(n-k)]``."""
    labels, k = _labels(assignments, embeddings.n)
    if not 2 <= k < embeddings.n:
        raise InvalidInputError(f"Calinski-Harabasz needs 2 <= k < n, got k={k}, n={embeddings.n}")
    if _within_trace(embeddings.rows, labels, k) == 0.0:
        raise DegenerateDataError("Calinski-Harabasz is undefined: within-cluster dispersion is 0")
    return float(calinski_harabasz_score(embeddings.rows, labels))


def _centroids(rows: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    return np.stack([rows[labels == cluster].mean(axis=0) for cluster in range(k)])


def davies_bouldin(embeddings: EmbeddingSet, assignments: Sequence[int] | np.ndarray) -> float:
    """Mean over clusters of the worst ``(s_i + s_j) / d(c_i, c_j)``."""
    labels, k = _labels(assignments, embeddings.n)
    if k < 2:
        raise InvalidInputError("Davies-Bouldin needs at least 2 clusters")
    if np.any(pdist(_centroids(embeddings.rows, labels, k)) == 0.0):
        raise DegenerateDataError("Davies-Bouldin is undefined: two cluster centroids coincide")
    return float(davies_bouldin_score(embeddings.rows, labels))


def sklearn_random_state(seed: int) -> int:
    """32-bit scikit-learn state mixed from all 64 bits of ``seed``."""
    return int(np.random.SeedSequence(check_seed(seed)).generate_state(1)[0])


def _assign(rows: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    squared = cdist(rows, centroids, metric="sqeuclidean")
    labels = np.argmin(squared, axis=1)
    return labels, squared[np.arange(rows.shape[0]), labels]


def _reseed_empty(
    rows: np.ndarray, centroids: np.ndarray, labels: np.ndarray, costs: np.ndarray, k: int
) -> bool:
    """Move each empty centroid onto the point farthest from its own centroid."""
    empty = np.flatnonzero(np.bincount(labels, minlength=k) == 0)
    if not empty.size:
        return False
    costs = costs.copy()
    for cluster in empty:
        farthest = int(np.argmax(costs))
        logger.info("k-means: reseeding empty cluster %d at point %d", cluster, farthest)
        centroids[cluster] = rows[farthest]
        labels[farthest] = cluster
        costs[farthest] = -1.0
    return True


def kmeans(
    embeddings: EmbeddingSet,
    k: int,
    seed: int,
    max_iter: int = 300,
    tol: float = 1e-6,
    *,
    silhouette_matrix: DistanceMatrix | None = None,
    callbacks: Sequence[AnalysisCallbackHandler] | None = None,
) -> ClusterResult:
    """Seeded k-means++ initialization followed by Lloyd iterations.

    Stops once no centroid moves by ``tol`` or more, or after ``max_iter``
    iterations. The silhouette is computed on ``silhouette_matrix`` when given,
    else on the Euclidean distances of the rows.
    """
    n = embeddings.n
    if not 2 <= k <= n:
        raise InvalidInputError(f"k-means needs 2 <= k <= n, got k={k}, n={n}")
    seed = check_seed(seed)
    rows = embeddings.rows
    notify(callbacks, "on_analysis_start", "cluster", {"k": k, "seed": seed})

    centroids, _ = kmeans_plusplus(rows, k, random_state=sklearn_random_state(seed))
    centroids = centroids.astype(np.float64, copy=True)
    labels, costs = _assign(rows, centroids)
    _reseed_empty(rows, centroids, labels, costs, k)
    inertia = float(costs.sum())

    iterations = 0
    for iterations in range(1, max_iter + 1):
        counts = np.bincount(labels, minlength=k).astype(np.float64)
        sums = np.zeros_like(centroids)
        np.add.at(sums, labels, rows)
        updated = centroids.copy()
        filled = counts > 0
        updated[filled] = sums[filled] / counts[filled, None]
        shift = float(np.linalg.norm(updated - centroids, axis=1).max())
        centroids = updated

        labels, costs = _assign(rows, centroids)
        _reseed_empty(rows, centroids, labels, costs, k)
        new_inertia = float(((rows - centroids[labels]) ** 2).sum())
        assert new_inertia <= inertia + 1e-9 * max(1.0, inertia), "k-means inertia increased"
        inertia = new_inertia
        notify(callbacks, "on_analysis_progress", "cluster", iterations, max_iter)
        if shift < tol:
            break

    result = _score(embeddings, labels, centroids, inertia, iterations, seed, silhouette_matrix)
    notify(
        callbacks,
        "on_analysis_end",
        "cluster",
        result.model_dump(exclude={"assignments", "centroids"}),
    )
    return result


def _score(
    embeddings: EmbeddingSet,
    labels: np.ndarray,
    centroids: np.ndarray,
    inertia: float,
    iterations: int,
    seed: int,
    silhouette_matrix: DistanceMatrix | None,
) -> ClusterResult:
    k = centroids.shape[0]
    matrix = silhouette_matrix
    if matrix is None:
        matrix = build_distance_matrix(embeddings, "euclidean")
    metric = "poincare" if matrix.metric_tag == "poincare" else "euclidean"
    scores: dict[str, float | None] = {}
    for name, index in (
        ("silhouette", lambda: silhouette(matrix, labels)),
        ("calinski_harabasz", lambda: calinski_harabasz(embeddings, labels)),
        ("davies_bouldin", lambda: davies_bouldin(embeddings, labels)),
    ):
        try:
            scores[name] = index()
        except InvalidInputError as error:
            logger.warning("%s undefined for this clustering: %s", name, error)
            scores[name] = None
    return ClusterResult(
        k=k,
        assignments=[int(label) for label in labels],
        centroids=centroids.tolist(),
        inertia=inertia,
        iterations=iterations,
        seed=seed,
        silhouette_metric=metric,
        **scores,
    )
