import numpy as np
import pytest

from tests.conftest import euclidean_metric
from treelike_geometry.core_types import DistanceMatrix
from treelike_geometry.errors import InvalidInputError
from treelike_geometry.neighbor_joining import argmin_q_pair, nj_scores, q_matrix
from treelike_geometry.synthetic import tree_metric_fixture


def test_q_matrix_definition_and_symmetry(small_metric):
    d = small_metric.entries
    q = q_matrix(small_metric)
    n = small_metric.n
    assert q[2, 7] == pytest.approx((n - 2) * d[2, 7] - d[2].sum() - d[7].sum())
    np.testing.assert_array_equal(q, q.T)
    np.testing.assert_array_equal(np.diag(q), 0.0)


def test_three_points_collapse_to_total_length():
    matrix = euclidean_metric(3, 4, seed=6)
    total = matrix.entries[np.triu_indices(3, k=1)].sum()
    stats = nj_scores(matrix)
    assert stats.nj_max == pytest.approx(total, abs=1e-12)
    assert stats.nj_avg == pytest.approx(total, abs=1e-12)
    assert stats.nj_std <= 1e-12


def test_two_points_return_zeros():
    stats = nj_scores(DistanceMatrix(entries=[[0.0, 1.0], [1.0, 0.0]], metric_tag="euclidean"))
    assert (stats.nj_max, stats.nj_avg, stats.nj_std) == (0.0, 0.0, 0.0)


def test_q_matrix_needs_three_points():
    with pytest.raises(InvalidInputError):
        q_matrix(DistanceMatrix(entries=[[0.0]], metric_tag="euclidean"))


def test_argmin_pair_is_a_cherry():
    fixture = tree_metric_fixture(8, seed=12)
    assert argmin_q_pair(fixture.matrix) in fixture.cherries


def test_argmin_prefers_lexicographically_smallest_tie():
    # Star tree with equal arms: every pair ties.
    entries = np.full((4, 4), 2.0)
    np.fill_diagonal(entries, 0.0)
    matrix = DistanceMatrix(entries=entries, metric_tag="graph_shortest_path")
    assert argmin_q_pair(matrix) == (0, 1)


def test_scaling_scales_statistics(small_metric):
    base = nj_scores(small_metric)
    doubled = nj_scores(small_metric.scaled(2.0))
    assert doubled.nj_max == pytest.approx(2 * base.nj_max)
    assert doubled.nj_avg == pytest.approx(2 * base.nj_avg)


def test_shifting_distances_shifts_q_by_minus_n_c(small_metric):
    n, c = small_metric.n, 0.75
    shifted = small_metric.entries + c
    np.fill_diagonal(shifted, 0.0)
    before = q_matrix(small_metric)
    after = q_matrix(DistanceMatrix(entries=shifted, metric_tag="euclidean"))
    off_diagonal = ~np.eye(n, dtype=bool)
    np.testing.assert_allclose(after[off_diagonal], before[off_diagonal] - n * c, atol=1e-9)
