"""JSON report schema and (de)serialization.

Reports are written with a fixed key order (model field order), ``None``
fields omitted and reals at 17 significant digits, so identical inputs and
seeds give byte-identical files.
"""

from __future__ import annotations

import json
import logging
import math
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from treelike_geometry import __version__
from treelike_geometry.cluster_validity import ClusterResult, ClusterScores
from treelike_geometry.errors import GeometryError, InputParseError
from treelike_geometry.hyperbolicity import DeltaStats
from treelike_geometry.neighbor_joining import NjStats
from treelike_geometry.ultrametricity import UltraStats

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

ReportMetric = Literal["euclidean", "poincare", "external"]


class _Record(BaseModel):
    model_config = ConfigDict(frozen=True)


class InputDescriptor(_Record):
    path: str
    format: Literal["csv", "raw_f64", "synthetic"]
    kind: Literal["embeddings", "distance_matrix"] = "embeddings"
    n: int
    dim: int | None = None
    symmetrized: bool = False


class PcaRecord(_Record):
    enabled: bool = False
    variance_target: float | None = None
    out_dim: int | None = None
    retained_fraction: float | None = None


class RescaleRecord(_Record):
    enabled: bool = False
    scalar: float | None = None
    target_max_norm: float | None = None


class PreprocessRecord(_Record):
    pad: bool = False
    pca: PcaRecord = Field(default_factory=PcaRecord)
    rescale: RescaleRecord = Field(default_factory=RescaleRecord)


class GeometryReport(_Record):
    schema_version: int = SCHEMA_VERSION
    tool_version: str = __version__
    input: InputDescriptor
    preprocessing: PreprocessRecord = Field(default_factory=PreprocessRecord)
    metric: ReportMetric
    delta: DeltaStats | None = None
    ultra: UltraStats | None = None
    nj: NjStats | None = None
    cluster: ClusterResult | None = None
    notes: list[str] = Field(default_factory=list)
    timings: dict[str, float] | None = None
    external_clusterings: dict[str, ClusterScores] | None = None


class ComparisonReport(_Record):
    schema_version: int = SCHEMA_VERSION
    tool_version: str = __version__
    rows: list[GeometryReport]


class SpaceSummary(_Record):
    space: Literal["sphere", "dense_graph", "poincare_disk"]
    delta_avg_mean: float
    delta_avg_std: float
    delta_avg_per_seed: list[float]


class SyntheticTable(_Record):
    schema_version: int = SCHEMA_VERSION
    tool_version: str = __version__
    n: int
    dim: int
    p: float
    seeds: list[int]
    spaces: list[SpaceSummary]
    poincare_smallest: bool


AnyReport = GeometryReport | ComparisonReport | SyntheticTable


def _format_float(value: float) -> str:
    if not math.isfinite(value):
        return json.dumps(value)
    text = f"{value:.17g}"
    if "." not in text and "e" not in text:
        text += ".0"
    return text


def _encode(value: Any, indent: str = "") -> str:
    """``json.dumps(indent=2)`` layout with reals at 17 significant digits."""
    if isinstance(value, float):
        return _format_float(value)
    inner = indent + "  "
    if isinstance(value, dict) and value:
        items = (f"{inner}{json.dumps(key)}: {_encode(item, inner)}" for key, item in value.items())
        return "{\n" + ",\n".join(items) + f"\n{indent}}}"
    if isinstance(value, list) and value:
        return "[\n" + ",\n".join(f"{inner}{_encode(item, inner)}" for item in value) + f"\n{indent}]"
    return json.dumps(value)


def dumps_report(report: AnyReport) -> str:
    return _encode(report.model_dump(mode="json", exclude_none=True)) + "\n"


def write_report(report: AnyReport, path: str | Path) -> None:
    try:
        Path(path).write_text(dumps_report(report), encoding="utf-8")
    except OSError as error:
        raise GeometryError(f"cannot write report to {path}: {error}") from error
    logger.info("wrote %s to %s", type(report).__name__, path)


def read_report(path: str | Path) -> GeometryReport:
    try:
        return GeometryReport.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except OSError as error:
        raise InputParseError(f"cannot read report {path}: {error}") from error
    except ValidationError as error:
        raise InputParseError(f"{path} is not a geometry report: {error.error_count()} error(s)") from error
