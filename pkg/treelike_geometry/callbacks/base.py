"""Progress hooks for long-running analyses."""

from __future__ import annotations

import logging
from typing import Any, Sequence

logger = logging.getLogger(__name__)


class AnalysisCallbackHandler:
    """No-op base; subclasses override the events they care about."""

    def on_analysis_start(self, analysis: str, params: dict[str, Any]) -> None:
        pass

    def on_analysis_progress(self, analysis: str, done: int, total: int) -> None:
        pass

    def on_analysis_end(self, analysis: str, result: dict[str, Any]) -> None:
        pass

    def on_analysis_error(self, analysis: str, error: str) -> None:
        pass


class LoggingCallbackHandler(AnalysisCallbackHandler):
    def __init__(self, log: logging.Logger | None = None) -> None:
        self.log = log or logger

    def on_analysis_start(self, analysis: str, params: dict[str, Any]) -> None:
        self.log.info("%s started %s", analysis, params)

    def on_analysis_progress(self, analysis: str, done: int, total: int) -> None:
        self.log.debug("%s: %d/%d", analysis, done, total)

    def on_analysis_end(self, analysis: str, result: dict[str, Any]) -> None:
        self.log.info("%s finished %s", analysis, result)

    def on_analysis_error(self, analysis: str, error: str) -> None:
        self.log.error("%s failed: %s", analysis, error)


def notify(
    handlers: Sequence[AnalysisCallbackHandler] | None, event: str, *args: Any
) -> None:
    for handler in handlers or ():
        getattr(handler, event)(*args)
