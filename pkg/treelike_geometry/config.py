"""Defaults shared by the CLI and the Streamlit explorer."""

from __future__ import annotations

import os
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

MetricName = Literal["euclidean", "poincare"]
AnalysisName = Literal["delta", "ultra", "nj"]
FormulaName = Literal["four_point", "paper_slack"]


def default_workers() -> int:
    return os.cpu_count() or 1


class AnalysisSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    samples: int = Field(default=100_000, ge=1)
    epsilon: float = Field(default=1e-9, ge=0.0)
    seed: int = Field(default=42, ge=0, lt=2**64)
    metric: MetricName = "euclidean"
    analyses: tuple[AnalysisName, ...] = ("delta", "ultra", "nj")
    formula: FormulaName = "four_point"
    exact: bool = False
    ball_norm: float = Field(default=0.9, gt=0.0, lt=1.0)
    pca_variance: float | None = Field(default=None, gt=0.0, le=1.0)
    validation_tol: float = Field(default=1e-9, ge=0.0)
    workers: int = Field(default_factory=default_workers, ge=1)
    # Fixed block size keeps the work partition independent of the worker count.
    block_size: int = Field(default=8192, ge=1)


class SynthSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(default=50, ge=4)
    dim: int = Field(default=10, ge=2)
    p: float = Field(default=0.8, gt=0.0, le=1.0)
    seeds: int = Field(default=10, ge=1)
    seed: int = Field(default=42, ge=0, lt=2**64)


class ClusterSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: int = Field(default=2, ge=2)
    max_iter: int = Field(default=300, ge=1)
    tol: float = Field(default=1e-6, ge=0.0)
    seed: int = Field(default=42, ge=0, lt=2**64)
