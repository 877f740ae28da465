from treelike_geometry.callbacks.base import (
    AnalysisCallbackHandler,
    LoggingCallbackHandler,
    notify,
)
from treelike_geometry.callbacks.capturing_callback_handler import (
    CapturingCallbackHandler,
    playback_callbacks,
)

__all__ = [
    "AnalysisCallbackHandler",
    "CapturingCallbackHandler",
    "LoggingCallbackHandler",
    "notify",
    "playback_callbacks",
]
