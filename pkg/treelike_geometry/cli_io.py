"""Reading and writing embeddings and distance matrices (CSV and raw little-endian f64)."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Literal

import numpy as np
import pandas as pd

from treelike_geometry.core_types import (
    DistanceMatrix,
    EmbeddingSet,
    require_valid,
    validate_distance_matrix,
)
from treelike_geometry.errors import InputParseError, InvalidInputError, ShapeError
from treelike_geometry.preprocess import pad_and_flatten

logger = logging.getLogger(__name__)

FileFormat = Literal["csv", "raw_f64"]
FILE_FORMATS: tuple[FileFormat, ...] = ("csv", "raw_f64")

_RAW_HEADER = np.dtype("<u8")
_RAW_VALUE = np.dtype("<f8")


def _csv_cells(path: Path, header: bool) -> list[tuple[int, list[str]]]:
    """Non-blank CSV records as ``(line_number, cells)``, trailing empty cells dropped."""
    try:
        with open(path, encoding="utf-8") as file:
            width = max((line.count(",") + 1 for line in file if line.strip()), default=0)
    except OSError as error:
        raise InputParseError(f"cannot read {path}: {error}") from error
    if width == 0:
        raise InputParseError(f"{path} is empty")

    frame = pd.read_csv(
        path,
        header=None,
        names=list(range(width)),
        dtype=str,
        keep_default_na=False,
        skip_blank_lines=False,
        skipinitialspace=True,
    )
    records = []
    for offset, values in enumerate(frame.itertuples(index=False)):
        if header and offset == 0:
            continue
        cells = ["" if pd.isna(value) else str(value).strip() for value in values]
        while cells and cells[-1] == "":
            cells.pop()
        if cells:
            records.append((offset + 1, cells))
    return records


def _parse_floats(line: int, cells: list[str], first_column: int) -> list[float]:
    values = []
    for column, cell in enumerate(cells, start=first_column + 1):
        try:
            values.append(float(cell))
        except ValueError:
            raise InputParseError(f"line {line}, column {column}: malformed number {cell!r}") from None
    return values


def _read_raw(path: Path) -> np.ndarray:
    try:
        data = path.read_bytes()
    except OSError as error:
        raise InputParseError(f"cannot read {path}: {error}") from error
    if len(data) < 16:
        raise InputParseError(f"{path}: raw_f64 header needs 16 bytes, got {len(data)}")
    n, dim = (int(value) for value in np.frombuffer(data[:16], dtype=_RAW_HEADER))
    expected = 16 + 8 * n * dim
    if len(data) != expected:
        raise InputParseError(f"{path}: header declares {n}x{dim} values, expected {expected} bytes, got {len(data)}")
    return np.frombuffer(data[16:], dtype=_RAW_VALUE).reshape(n, dim).astype(np.float64)


def load_embeddings(
    path: str | Path,
    file_format: FileFormat = "csv",
    *,
    header: bool = False,
    id_column: bool = False,
    label_column: bool = False,
    pad: bool = False,
) -> EmbeddingSet:
    """One embedding per row.

    CSV rows may start with an id column and then a label column. Rows of
    unequal length are an error unless ``pad`` is set, in which case they go
    through :func:`pad_and_flatten`.
    """
    path = Path(path)
    if file_format == "raw_f64":
        if header or id_column or label_column:
            raise InputParseError("header/id/label options apply to CSV input only")
        return EmbeddingSet(rows=_read_raw(path))
    if file_format != "csv":
        raise InputParseError(f"unknown format {file_format!r}")

    skip = int(id_column) + int(label_column)
    ids: list[str] = []
    labels: list[str] = []
    rows: list[list[float]] = []
    for line, cells in _csv_cells(path, header):
        if len(cells) <= skip:
            raise InputParseError(f"line {line}: expected values after {skip} leading column(s)")
        if id_column:
            ids.append(cells[0])
        if label_column:
            labels.append(cells[int(id_column)])
        rows.append(_parse_floats(line, cells[skip:], skip))
    if not rows:
        raise InputParseError(f"{path} holds no embeddings")

    lengths = {len(row) for row in rows}
    if len(lengths) > 1 and not pad:
        raise InputParseError(
            f"{path}: rows have lengths {sorted(lengths)}; pass --pad to zero-pad them"
        )
    padded = pad_and_flatten(rows)
    return EmbeddingSet(
        rows=padded.rows, ids=ids if id_column else None, labels=labels if label_column else None
    )


def load_distance_matrix(
    path: str | Path,
    file_format: FileFormat = "csv",
    *,
    force: bool = False,
    tol: float = 1e-9,
) -> tuple[DistanceMatrix, bool]:
    """Load and validate an external matrix.

    Returns the matrix and whether it was symmetrized. With ``force``, an
    asymmetric matrix is replaced by ``(D + D^T) / 2``; other violations remain errors.
    """
    path = Path(path)
    if file_format == "raw_f64":
        entries = _read_raw(path)
    elif file_format == "csv":
        records = _csv_cells(path, header=False)
        entries_list = [_parse_floats(line, cells, 0) for line, cells in records]
        if len({len(row) for row in entries_list}) > 1:
            raise ShapeError(f"{path}: matrix rows have unequal lengths")
        entries = np.array(entries_list, dtype=np.float64)
    else:
        raise InputParseError(f"unknown format {file_format!r}")

    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise ShapeError(f"{path}: distance matrix must be square, got shape {entries.shape}")

    symmetrized = False
    violations = validate_distance_matrix(entries, tol)
    if force and any(v.kind == "asymmetry" for v in violations):
        logger.warning("%s: symmetrizing %d asymmetric pair(s)", path, sum(v.kind == "asymmetry" for v in violations))
        upper = np.triu_indices(entries.shape[0], k=1)
        mean = (entries[upper] + entries.T[upper]) / 2.0
        entries = entries.copy()
        entries[upper] = mean
        entries.T[upper] = mean
        symmetrized = True
    matrix = DistanceMatrix(entries=entries, metric_tag="external")
    try:
        return require_valid(matrix, tol), symmetrized
    except InvalidInputError as error:
        raise InvalidInputError(f"{path}: {error}") from None


def write_embeddings(embeddings: EmbeddingSet, path: str | Path, file_format: FileFormat = "csv") -> None:
    _write_matrix(embeddings.rows, Path(path), file_format)


def write_distance_matrix(matrix: DistanceMatrix, path: str | Path, file_format: FileFormat = "csv") -> None:
    _write_matrix(matrix.entries, Path(path), file_format)


def _write_matrix(values: np.ndarray, path: Path, file_format: FileFormat) -> None:
    if file_format == "csv":
        np.savetxt(path, values, fmt="%.17g", delimiter=",")
        return
    header = np.array(values.shape, dtype=_RAW_HEADER)
    with open(path, "wb") as file:
        file.write(header.tobytes())
        file.write(np.ascontiguousarray(values, dtype=_RAW_VALUE).tobytes())
