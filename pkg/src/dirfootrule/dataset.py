"""Observation matrices and their CSV representation.

CSV layout: one header row of column names, then one row per observation,
numbers written with 17 significant digits so floats round-trip exactly.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

import numpy as np

from .errors import DataError, DimensionError


@dataclass(frozen=True)
class Dataset:
    values: np.ndarray
    column_names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 2:
            raise DimensionError(f"dataset must be a 2-D matrix, got shape {vals.shape}")
        n, d = vals.shape
        if n < 1 or d < 2:
            raise DimensionError(f"dataset needs n >= 1 rows and d >= 2 columns, got {n}x{d}")
        if not np.all(np.isfinite(vals)):
            raise DataError("dataset contains non-finite values")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        names = tuple(self.column_names) or tuple(f"U{i + 1}" for i in range(d))
        if len(names) != d:
            raise DimensionError(f"{len(names)} column names for {d} columns")
        object.__setattr__(self, "column_names", names)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


def format_number(x: float) -> str:
    return f"{x:.17g}"


def write_csv(data: Dataset, target: str | Path | TextIO) -> None:
    if isinstance(target, (str, Path)):
        with open(target, "w", newline="", encoding="utf-8") as fh:
            write_csv(data, fh)
        return
    writer = csv.writer(target, lineterminator="\n")
    writer.writerow(data.column_names)
    for row in data.values:
        writer.writerow([format_number(x) for x in row])


def dataset_to_csv_text(data: Dataset) -> str:
    buf = io.StringIO()
    write_csv(data, buf)
    return buf.getvalue()


def read_csv(source: str | Path | TextIO) -> Dataset:
    """Parse a dataset CSV; errors name the offending row and column (1-based data rows)."""
    if isinstance(source, (str, Path)):
        try:
            with open(source, newline="", encoding="utf-8") as fh:
                return read_csv(fh)
        except OSError as exc:
            raise DataError(f"cannot read {source}: {exc}") from exc
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("empty CSV input") from None
    header = [h.strip() for h in header]
    rows = []
    for lineno, row in enumerate(reader, start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise DataError(f"row {lineno}: expected {len(header)} fields, got {len(row)}")
        parsed = []
        for col, cell in enumerate(row):
            try:
                x = float(cell)
            except ValueError:
                raise DataError(
                    f"row {lineno}, column {col + 1} ({header[col]!r}): not a number: {cell!r}"
                ) from None
            if not np.isfinite(x):
                raise DataError(f"row {lineno}, column {col + 1} ({header[col]!r}): non-finite value")
            parsed.append(x)
        rows.append(parsed)
    if not rows:
        raise DataError("CSV has a header but no data rows")
    return Dataset(np.array(rows), tuple(header))
