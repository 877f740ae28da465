from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from treelike_geometry.core_types import DistanceMatrix, EmbeddingSet
from treelike_geometry.distances import build_distance_matrix


def euclidean_points(n: int, dim: int, seed: int) -> EmbeddingSet:
    return EmbeddingSet(rows=np.random.default_rng(seed).normal(size=(n, dim)))


def euclidean_metric(n: int, dim: int, seed: int) -> DistanceMatrix:
    return build_distance_matrix(euclidean_points(n, dim, seed), "euclidean")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def small_metric() -> DistanceMatrix:
    return euclidean_metric(12, 5, seed=3)


@pytest.fixture
def write_text(tmp_path: Path):
    def write(name: str, text: str) -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return write
