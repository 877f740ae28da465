"""Callback Handler captures all analysis events in a run for timing and later playback."""

from __future__ import annotations

import json
import time
from collections import defaultdict
from typing import Any, TypedDict

from treelike_geometry.callbacks.base import AnalysisCallbackHandler


# Plain string constants so that records stay JSON-serializable.
class CallbackType:
    ON_ANALYSIS_START = "on_analysis_start"
    ON_ANALYSIS_PROGRESS = "on_analysis_progress"
    ON_ANALYSIS_END = "on_analysis_end"
    ON_ANALYSIS_ERROR = "on_analysis_error"


# All of this class's members should be basic Python types.
class CallbackRecord(TypedDict):
    callback_type: str
    args: list[Any]
    time_delta: float  # Number of seconds between this record and the previous one


def load_records_from_file(path: str) -> list[CallbackRecord]:
    """Load the list of CallbackRecords from a JSON file at the given path."""
    with open(path, encoding="utf-8") as file:
        records = json.load(file)

    if not isinstance(records, list):
        raise RuntimeError(f"Bad CallbackRecord data in {path}")
    return records


def playback_callbacks(
    handlers: list[AnalysisCallbackHandler],
    records_or_filename: list[CallbackRecord] | str,
    max_pause_time: float,
) -> dict[str, dict[str, Any]]:
    """Replay recorded events into ``handlers``; returns the final result per analysis."""
    if isinstance(records_or_filename, list):
        records = records_or_filename
    else:
        records = load_records_from_file(records_or_filename)

    results: dict[str, dict[str, Any]] = {}
    for record in records:
        pause_time = min(record["time_delta"], max_pause_time)
        if pause_time > 0:
            time.sleep(pause_time)

        callback_type = record["callback_type"]
        args = record["args"]
        for handler in handlers:
            if callback_type == CallbackType.ON_ANALYSIS_START:
                handler.on_analysis_start(*args)
            elif callback_type == CallbackType.ON_ANALYSIS_PROGRESS:
                handler.on_analysis_progress(*args)
            elif callback_type == CallbackType.ON_ANALYSIS_END:
                handler.on_analysis_end(*args)
            elif callback_type == CallbackType.ON_ANALYSIS_ERROR:
                handler.on_analysis_error(*args)
        if callback_type == CallbackType.ON_ANALYSIS_END:
            results[args[0]] = args[1]

    return results


class CapturingCallbackHandler(AnalysisCallbackHandler):
    def __init__(self) -> None:
        self._records: list[CallbackRecord] = []
        self._last_time: float | None = None
        self._started: dict[str, float] = {}
        self._elapsed: dict[str, float] = defaultdict(float)

    @property
    def records(self) -> list[CallbackRecord]:
        return list(self._records)

    def timings(self) -> dict[str, float]:
        """Wall-clock seconds per finished analysis."""
        return dict(self._elapsed)

    def dump_records_to_file(self, path: str) -> None:
        """Write the list of CallbackRecords to a JSON file at the given path."""
        with open(path, "w", encoding="utf-8") as file:
            json.dump(self._records, file, indent=1)

    def _append_record(self, type: str, args: list[Any]) -> float:
        time_now = time.perf_counter()
        time_delta = time_now - self._last_time if self._last_time is not None else 0
        self._last_time = time_now
        self._records.append(CallbackRecord(callback_type=type, args=args, time_delta=time_delta))
        return time_now

    def on_analysis_start(self, analysis: str, params: dict[str, Any]) -> None:
        self._started[analysis] = self._append_record(
            CallbackType.ON_ANALYSIS_START, [analysis, params]
        )

    def on_analysis_progress(self, analysis: str, done: int, total: int) -> None:
        self._append_record(CallbackType.ON_ANALYSIS_PROGRESS, [analysis, done, total])

    def on_analysis_end(self, analysis: str, result: dict[str, Any]) -> None:
        now = self._append_record(CallbackType.ON_ANALYSIS_END, [analysis, result])
        if analysis in self._started:
            self._elapsed[analysis] += now - self._started.pop(analysis)

    def on_analysis_error(self, analysis: str, error: str) -> None:
        self._append_record(CallbackType.ON_ANALYSIS_ERROR, [analysis, error])
        self._started.pop(analysis, None)
