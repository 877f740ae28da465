import numpy as np
import pytest
from sklearn.metrics import calinski_harabasz_score, davies_bouldin_score, silhouette_score

from treelike_geometry.cluster_validity import (
    calinski_harabasz,
    davies_bouldin,
    kmeans,
    silhouette,
    sklearn_random_state,
)
from treelike_geometry.core_types import EmbeddingSet
from treelike_geometry.distances import build_distance_matrix
from treelike_geometry.errors import DegenerateDataError, InvalidInputError


def two_blobs(separation: float, seed: int = 0, size: int = 100) -> tuple[EmbeddingSet, np.ndarray]:
    noise = np.random.default_rng(seed).normal(size=(2 * size, 2))
    noise[size:, 0] += separation
    return EmbeddingSet(rows=noise), np.repeat([0, 1], size)


def test_indices_agree_with_sklearn():
    embeddings, labels = two_blobs(3.0, seed=1)
    matrix = build_distance_matrix(embeddings, "euclidean")
    rows = embeddings.rows
    assert silhouette(matrix, labels) == pytest.approx(silhouette_score(rows, labels), rel=1e-6)
    assert calinski_harabasz(embeddings, labels) == pytest.approx(
        calinski_harabasz_score(rows, labels), rel=1e-9
    )
    assert davies_bouldin(embeddings, labels) == pytest.approx(
        davies_bouldin_score(rows, labels), rel=1e-9
    )


def test_silhouette_singletons_score_zero():
    embeddings = EmbeddingSet(rows=[[0.0], [1.0], [3.0]])
    assert silhouette(build_distance_matrix(embeddings), [0, 1, 2]) == 0.0


def test_single_cluster_is_invalid():
    embeddings, _ = two_blobs(5.0)
    matrix = build_distance_matrix(embeddings)
    with pytest.raises(InvalidInputError):
        silhouette(matrix, np.zeros(embeddings.n, dtype=int))
    with pytest.raises(InvalidInputError):
        davies_bouldin(embeddings, np.zeros(embeddings.n, dtype=int))


def test_calinski_harabasz_undefined_cases():
    embeddings = EmbeddingSet(rows=[[0.0], [1.0], [3.0]])
    with pytest.raises(InvalidInputError):
        calinski_harabasz(embeddings, [0, 1, 2])
    duplicated = EmbeddingSet(rows=[[0.0], [0.0], [5.0], [5.0]])
    with pytest.raises(DegenerateDataError):
        calinski_harabasz(duplicated, [0, 0, 1, 1])


def test_davies_bouldin_rejects_coincident_centroids():
    embeddings = EmbeddingSet(rows=[[-1.0], [1.0], [-2.0], [2.0]])
    with pytest.raises(DegenerateDataError):
        davies_bouldin(embeddings, [0, 0, 1, 1])


def test_assignment_length_must_match():
    embeddings, labels = two_blobs(5.0)
    with pytest.raises(InvalidInputError):
        calinski_harabasz(embeddings, labels[:-1])


def test_kmeans_separates_blobs():
    embeddings, truth = two_blobs(10.0, seed=3)
    result = kmeans(embeddings, k=2, seed=42)
    assignments = np.array(result.assignments)
    assert np.array_equal(assignments, truth) or np.array_equal(assignments, 1 - truth)
    assert result.silhouette >= 0.8
    assert result.davies_bouldin <= 0.3
    assert result.seed == 42 and result.iterations >= 1


def test_kmeans_is_deterministic_for_a_seed():
    embeddings, _ = two_blobs(2.0, seed=5)
    assert kmeans(embeddings, 3, seed=7) == kmeans(embeddings, 3, seed=7)


def test_kmeans_with_k_equal_n_leaves_undefined_indices_empty():
    embeddings = EmbeddingSet(rows=[[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]])
    result = kmeans(embeddings, k=3, seed=1)
    assert result.inertia == 0.0
    assert result.silhouette == 0.0
    assert result.calinski_harabasz is None


def test_kmeans_rejects_bad_k():
    embeddings, _ = two_blobs(5.0, size=3)
    with pytest.raises(InvalidInputError):
        kmeans(embeddings, k=1, seed=0)
    with pytest.raises(InvalidInputError):
        kmeans(embeddings, k=7, seed=0)


def test_silhouette_uses_supplied_metric():
    embeddings, _ = two_blobs(4.0, seed=2)
    scaled = embeddings.with_rows(embeddings.rows / 20.0)
    result = kmeans(scaled, 2, seed=0, silhouette_matrix=build_distance_matrix(scaled, "poincare"))
    assert result.silhouette_metric == "poincare"


def test_sklearn_state_uses_the_full_seed():
    low = sklearn_random_state(5)
    assert low == sklearn_random_state(5)
    assert low != sklearn_random_state(5 + 2**32)
    assert 0 <= sklearn_random_state(2**64 - 1) < 2**32


@pytest.mark.parametrize("seed", range(10))
def test_silhouette_is_bounded_for_random_assignments(seed):
    rng = np.random.default_rng(seed)
    embeddings = EmbeddingSet(rows=rng.normal(size=(40, 3)))
    labels = rng.integers(0, 4, size=40)
    labels[:2] = (0, 1)
    assert -1.0 <= silhouette(build_distance_matrix(embeddings), labels) <= 1.0


@pytest.mark.parametrize("seed", range(10))
def test_random_assignment_on_uniform_data_scores_near_zero(seed):
    rng = np.random.default_rng(seed)
    embeddings = EmbeddingSet(rows=rng.uniform(size=(200, 2)))
    labels = rng.integers(0, 2, size=200)
    assert abs(silhouette(build_distance_matrix(embeddings), labels)) <= 0.2


def test_indices_invariant_under_translation_and_relabeling():
    embeddings, labels = two_blobs(3.0, seed=4)
    moved = embeddings.with_rows(embeddings.rows + np.array([7.5, -3.25]))
    relabeled = 1 - labels
    base = (
        silhouette(build_distance_matrix(embeddings), labels),
        calinski_harabasz(embeddings, labels),
        davies_bouldin(embeddings, labels),
    )
    for rows, assignment in ((moved, labels), (embeddings, relabeled), (moved, relabeled)):
        values = (
            silhouette(build_distance_matrix(rows), assignment),
            calinski_harabasz(rows, assignment),
            davies_bouldin(rows, assignment),
        )
        assert values == pytest.approx(base, rel=1e-9, abs=1e-9)
