import itertools
import math

import numpy as np
import pytest

from tests.conftest import euclidean_metric
from treelike_geometry.callbacks import CapturingCallbackHandler
from treelike_geometry.core_types import DistanceMatrix, EmbeddingSet
from treelike_geometry.distances import build_distance_matrix
from treelike_geometry.errors import InvalidInputError
from treelike_geometry.hyperbolicity import (
    draw_quadruples,
    exact_delta,
    gromov_product,
    quadruple_delta,
    sample_delta,
    total_quadruples,
)
from treelike_geometry.synthetic import tree_metric_fixture


def test_gromov_product_definition(small_metric):
    d = small_metric.entries
    assert gromov_product(small_metric, 0, 1, 2) == pytest.approx(0.5 * (d[0, 2] + d[1, 2] - d[0, 1]))


def test_square_cycle_has_half_unit_delta():
    # Four points on a unit 4-cycle: sums 2, 2 and 4.
    entries = np.array(
        [[0, 1, 2, 1], [1, 0, 1, 2], [2, 1, 0, 1], [1, 2, 1, 0]], dtype=float
    )
    matrix = DistanceMatrix(entries=entries, metric_tag="graph_shortest_path")
    assert quadruple_delta(matrix, 0, 1, 2, 3) == 1.0


def test_four_point_is_invariant_under_relabeling(small_metric):
    values = {
        quadruple_delta(small_metric, *perm) for perm in itertools.permutations((1, 4, 6, 9))
    }
    assert len(values) == 1


def test_paper_slack_max_over_roles_equals_four_point(small_metric):
    quad = (0, 3, 5, 8)
    slack = max(
        quadruple_delta(small_metric, *perm, formula="paper_slack")
        for perm in itertools.permutations(quad)
    )
    assert slack == pytest.approx(quadruple_delta(small_metric, *quad), abs=1e-12)


def test_quadruple_delta_rejects_repeated_or_out_of_range(small_metric):
    with pytest.raises(InvalidInputError):
        quadruple_delta(small_metric, 0, 0, 1, 2)
    with pytest.raises(InvalidInputError):
        quadruple_delta(small_metric, 0, 1, 2, 99)
    with pytest.raises(InvalidInputError):
        quadruple_delta(small_metric, 0, 1, 2, 3, formula="bogus")


def test_tree_metric_has_zero_delta():
    fixture = tree_metric_fixture(10, seed=5)
    stats = exact_delta(fixture.matrix)
    assert stats.delta_max <= 1e-9
    assert stats.samples_evaluated == math.comb(10, 4)
    assert stats.mode == "exact" and stats.seed is None


def test_exact_delta_paper_slack_counts_role_assignments(small_metric):
    stats = exact_delta(small_metric, "paper_slack")
    assert stats.samples_evaluated == 24 * math.comb(12, 4)
    assert stats.delta_max == pytest.approx(exact_delta(small_metric).delta_max, abs=1e-12)


def test_too_few_points():
    with pytest.raises(InvalidInputError, match="at least 4"):
        exact_delta(euclidean_metric(3, 2, seed=0))


def test_sample_delta_bounded_by_exact():
    matrix = euclidean_metric(15, 8, seed=11)
    sampled = sample_delta(matrix, samples=500, seed=7)
    assert sampled.mode == "sampled" and sampled.seed == 7
    assert sampled.samples_evaluated == 500
    assert sampled.delta_max <= exact_delta(matrix).delta_max


def test_sample_delta_falls_back_to_enumeration(small_metric):
    stats = sample_delta(small_metric, samples=total_quadruples(12, "four_point"), seed=3)
    exact = exact_delta(small_metric)
    assert stats.mode == "exact" and stats.seed == 3
    assert stats.delta_avg == exact.delta_avg


def test_sample_delta_independent_of_workers_and_block_size():
    matrix = euclidean_metric(40, 6, seed=2)
    runs = [
        sample_delta(matrix, 20_000, seed=42, workers=workers, block_size=block)
        for workers, block in ((1, 8192), (8, 8192), (4, 1000))
    ]
    assert runs[0] == runs[1] == runs[2]


def test_draw_quadruples_depend_only_on_sample_id():
    whole = draw_quadruples(30, seed=9, start=0, stop=100)
    part = draw_quadruples(30, seed=9, start=40, stop=60)
    np.testing.assert_array_equal(whole[40:60], part)
    assert all(len(set(row)) == 4 for row in whole.tolist())
    assert whole.min() >= 0 and whole.max() < 30


def test_sample_delta_rejects_zero_samples(small_metric):
    with pytest.raises(InvalidInputError):
        sample_delta(small_metric, samples=0, seed=1)


def test_exact_delta_reports_progress(small_metric):
    capture = CapturingCallbackHandler()
    exact_delta(small_metric, callbacks=[capture], block_size=100)
    kinds = [record["callback_type"] for record in capture.records]
    assert kinds[0] == "on_analysis_start" and kinds[-1] == "on_analysis_end"
    progress = [r["args"] for r in capture.records if r["callback_type"] == "on_analysis_progress"]
    assert progress[-1] == ["delta", math.comb(12, 4), math.comb(12, 4)]


def test_unit_square_delta():
    corners = EmbeddingSet(rows=[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    stats = exact_delta(build_distance_matrix(corners))
    assert stats.samples_evaluated == 1
    assert stats.delta_max == stats.delta_avg == pytest.approx(math.sqrt(2) - 1, abs=1e-12)
    assert stats.delta_std == 0.0


def test_four_point_scales_linearly(small_metric):
    doubled = small_metric.scaled(2.0)
    for quad in itertools.combinations(range(12), 4):
        assert quadruple_delta(doubled, *quad) == pytest.approx(
            2.0 * quadruple_delta(small_metric, *quad), abs=1e-12
        )


def test_delta_std_is_population_std(small_metric):
    values = [quadruple_delta(small_metric, *quad) for quad in itertools.combinations(range(12), 4)]
    mean = sum(values) / len(values)
    std = math.sqrt(sum((value - mean) ** 2 for value in values) / len(values))
    stats = exact_delta(small_metric)
    assert stats.delta_avg == pytest.approx(mean, abs=1e-12)
    assert stats.delta_std == pytest.approx(std, abs=1e-12)


def test_exhaustive_sampling_reproduces_exact_on_ten_points():
    matrix = euclidean_metric(10, 3, seed=21)
    sampled = sample_delta(matrix, samples=math.comb(10, 4), seed=5)
    exact = exact_delta(matrix)
    assert sampled.mode == "exact"
    assert sampled.delta_max == pytest.approx(exact.delta_max, abs=1e-12)
    assert sampled.delta_avg == pytest.approx(exact.delta_avg, abs=1e-12)
    assert sampled.delta_std == pytest.approx(exact.delta_std, abs=1e-12)
