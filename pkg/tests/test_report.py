import json

import pytest

from tests.conftest import euclidean_points
from treelike_geometry.analysis import analyze_embeddings, cluster_embeddings
from treelike_geometry.config import AnalysisSettings, ClusterSettings
from treelike_geometry.errors import InputParseError
from treelike_geometry.report import InputDescriptor, dumps_report, read_report, write_report

DESCRIPTOR = InputDescriptor(path="points.csv", format="csv", n=20, dim=5)


def _report(**overrides):
    settings = AnalysisSettings(**{"samples": 500, "workers": 1, **overrides})
    return analyze_embeddings(euclidean_points(20, 5, seed=1), DESCRIPTOR, settings)


def test_delta_only_report_omits_other_sections(tmp_path):
    report = _report(analyses=("delta",))
    path = tmp_path / "r.json"
    write_report(report, path)
    document = json.loads(path.read_text())
    assert "delta" in document
    assert "ultra" not in document and "nj" not in document and "timings" not in document
    assert document["schema_version"] == 1


def test_report_round_trips(tmp_path):
    report = _report(metric="poincare", pca_variance=0.95)
    path = tmp_path / "r.json"
    write_report(report, path)
    assert read_report(path) == report


def test_report_is_byte_deterministic():
    assert dumps_report(_report()) == dumps_report(_report(workers=4))


def test_key_order_follows_schema():
    keys = list(json.loads(dumps_report(_report())))
    assert keys[:5] == ["schema_version", "tool_version", "input", "preprocessing", "metric"]


def test_stochastic_results_record_seed_and_samples():
    report = _report(seed=9)
    assert report.delta.seed == 9 and report.delta.samples_evaluated == 500
    assert report.ultra.seed == 9


def test_poincare_report_records_rescale_and_pca():
    report = _report(metric="poincare", pca_variance=0.95)
    assert report.preprocessing.rescale.enabled
    assert report.preprocessing.rescale.target_max_norm == 0.9
    assert report.preprocessing.pca.enabled and report.preprocessing.pca.out_dim <= 5
    assert any("scaled by" in note for note in report.notes)


def test_paper_slack_note():
    report = _report(formula="paper_slack", analyses=("delta",))
    assert any("paper_slack" in note for note in report.notes)


def test_cluster_report(tmp_path):
    report = cluster_embeddings(
        euclidean_points(30, 3, seed=2), DESCRIPTOR, AnalysisSettings(workers=1), ClusterSettings(k=3)
    )
    assert report.cluster.k == 3 and len(report.cluster.assignments) == 30
    path = tmp_path / "c.json"
    write_report(report, path)
    assert read_report(path) == report


def test_read_report_rejects_other_documents(write_text):
    with pytest.raises(InputParseError):
        read_report(write_text("x.json", '{"hello": 1}'))


def test_reals_are_written_with_seventeen_significant_digits():
    text = dumps_report(_report(metric="poincare"))
    assert '"epsilon": 1.0000000000000001e-09' in text
    assert '"target_max_norm": 0.90000000000000002' in text
    assert '"enabled": true' in text
    document = json.loads(text)
    assert document["ultra"]["epsilon"] == 1e-9
    assert document["preprocessing"]["rescale"]["target_max_norm"] == 0.9


def test_whole_reals_keep_a_decimal_point():
    report = _report(analyses=("delta",)).model_copy(update={"timings": {"delta": 2.0}})
    assert '"delta": 2.0\n' in dumps_report(report)
    assert json.loads(dumps_report(report)) == json.loads(
        json.dumps(report.model_dump(mode="json", exclude_none=True))
    )
