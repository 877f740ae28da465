import logging

from tests.conftest import euclidean_metric
from treelike_geometry.callbacks import (
    AnalysisCallbackHandler,
    CapturingCallbackHandler,
    LoggingCallbackHandler,
    playback_callbacks,
)
from treelike_geometry.callbacks.capturing_callback_handler import load_records_from_file
from treelike_geometry.hyperbolicity import exact_delta
from treelike_geometry.neighbor_joining import nj_scores


class RecordingHandler(AnalysisCallbackHandler):
    def __init__(self):
        self.events = []

    def on_analysis_start(self, analysis, params):
        self.events.append(("start", analysis))

    def on_analysis_progress(self, analysis, done, total):
        self.events.append(("progress", analysis))

    def on_analysis_end(self, analysis, result):
        self.events.append(("end", analysis))

    def on_analysis_error(self, analysis, error):
        self.events.append(("error", analysis))


def _captured_run() -> tuple[CapturingCallbackHandler, dict]:
    capture = CapturingCallbackHandler()
    matrix = euclidean_metric(10, 3, seed=1)
    delta = exact_delta(matrix, callbacks=[capture], block_size=50)
    nj = nj_scores(matrix, callbacks=[capture])
    return capture, {"delta": delta.model_dump(), "nj": nj.model_dump()}


def test_capture_records_timings_per_analysis():
    capture, _ = _captured_run()
    timings = capture.timings()
    assert set(timings) == {"delta", "nj"}
    assert all(seconds >= 0.0 for seconds in timings.values())
    assert capture.records[0]["time_delta"] == 0


def test_playback_replays_events_and_returns_results(tmp_path):
    capture, expected = _captured_run()
    path = tmp_path / "events.json"
    capture.dump_records_to_file(str(path))
    assert load_records_from_file(str(path)) == capture.records

    recorder = RecordingHandler()
    results = playback_callbacks([recorder], str(path), max_pause_time=0)
    assert results == expected
    assert recorder.events[0] == ("start", "delta")
    assert recorder.events[-1] == ("end", "nj")
    assert ("progress", "delta") in recorder.events


def test_logging_handler_logs_lifecycle(caplog):
    handler = LoggingCallbackHandler()
    with caplog.at_level(logging.INFO):
        handler.on_analysis_start("delta", {"mode": "exact"})
        handler.on_analysis_error("delta", "boom")
    assert "delta started" in caplog.text
    assert "delta failed: boom" in caplog.text
