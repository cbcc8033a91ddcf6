"""CSV reading and writing for N x T matrices with optional missing cells."""
from __future__ import annotations

import csv
import io
import os
from typing import IO, Union

import numpy as np

__all__ = ["CsvFormatError", "parse_matrix_csv", "write_matrix_csv", "format_matrix_csv"]

Source = Union[str, os.PathLike, bytes, IO]

_MISSING = {"", "nan", "NaN", "NAN"}


class CsvFormatError(ValueError):
    """Malformed matrix CSV; the message carries the 1-based row and column."""


def _read_text(source: Source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8", newline="") as fh:
            return fh.read()
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def parse_matrix_csv(source: Source, header: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Parse a comma-separated matrix; rows are sensors, columns timestamps.

    Empty cells and ``NaN`` mark missing entries: they come back as ``0.0``
    in the matrix and ``False`` in the returned observation mask. Trailing
    blank lines are ignored unless the matrix has a single column.
    """
    rows = list(csv.reader(io.StringIO(_read_text(source), newline="")))
    offset = 1
    if header and rows:
        rows = rows[1:]
        offset = 2
    # an empty line is a single missing cell, which only makes sense for one-column data
    numbered = [(i + offset, r or [""]) for i, r in enumerate(rows)]
    if all(r == [""] for _, r in numbered):
        raise CsvFormatError("empty file: no data rows")
    width = len(numbered[0][1])
    if width > 1:
        while numbered and numbered[-1][1] == [""]:
            numbered.pop()
    values = np.zeros((len(numbered), width))
    mask = np.ones((len(numbered), width), dtype=bool)
    for out_row, (line, cells) in enumerate(numbered):
        if len(cells) != width:
            raise CsvFormatError(
                f"row {line}: expected {width} columns, found {len(cells)}"
            )
        for col, cell in enumerate(cells):
            cell = cell.strip()
            if cell in _MISSING:
                mask[out_row, col] = False
                continue
            try:
                v = float(cell)
            except ValueError:
                raise CsvFormatError(
                    f"row {line}, column {col + 1}: non-numeric value {cell!r}"
                ) from None
            if not np.isfinite(v):
                raise CsvFormatError(f"row {line}, column {col + 1}: non-finite value {cell!r}")
            values[out_row, col] = v
    return values, mask


def _fmt(v) -> str:
    return "%.17g" % v


def format_matrix_csv(matrix, mask=None) -> str:
    matrix = np.atleast_2d(np.asarray(matrix))
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
    lines = []
    for i, row in enumerate(matrix):
        if mask is None:
            cells = [_fmt(v) for v in row]
        else:
            cells = [_fmt(v) if ok else "" for v, ok in zip(row, mask[i])]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def write_matrix_csv(path, matrix, mask=None) -> None:
    """Write ``matrix`` with 17 significant digits; cells outside ``mask`` are left empty."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_matrix_csv(matrix, mask))
