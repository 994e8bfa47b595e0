"""CSV reading and writing.

Dialect: comma separator, ``.`` decimal point, optional single header row,
lines starting with ``#`` (and blank lines) ignored.  Floats are written
with 17 significant digits so every emitted file re-reads to the exact
in-memory values.
"""

from __future__ import annotations

import numpy as np

from .errors import CsvParseError

__all__ = [
    "read_csv_matrix",
    "read_series_csv",
    "read_table_csv",
    "format_value",
    "write_csv",
]


def _try_float(token: str):
    try:
        return float(token)
    except ValueError:
        return None


def read_csv_matrix(path):
    """Parse a CSV file into ``(header, data)``.

    ``header`` is a list of column names or None when the first content row
    is already numeric.  Raises :class:`CsvParseError` with the offending
    line (and column) for malformed cells or ragged rows.
    """
    header = None
    rows = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            fields = [f.strip() for f in text.split(",")]
            if width is None and header is None:
                parsed = [_try_float(f) for f in fields]
                if any(p is None for p in parsed):
                    header = fields
                    width = len(fields)
                    continue
                width = len(fields)
                rows.append(parsed)
                continue
            if len(fields) != width:
                raise CsvParseError(
                    path, line_no,
                    f"expected {width} columns, found {len(fields)}",
                )
            parsed = []
            for col_no, f in enumerate(fields, start=1):
                v = _try_float(f)
                if v is None:
                    raise CsvParseError(
                        path, line_no, f"cannot parse {f!r} as a number", col_no
                    )
                parsed.append(v)
            rows.append(parsed)
    if not rows:
        raise CsvParseError(path, 0, "no data rows")
    return header, np.asarray(rows, dtype=float)


def read_series_csv(path):
    """A single numeric column as a 1-d array."""
    _, data = read_csv_matrix(path)
    if data.shape[1] != 1:
        raise CsvParseError(
            path, 0, f"expected one column for a series, found {data.shape[1]}"
        )
    return data[:, 0]


def read_table_csv(path):
    """An ``n x (d+1)`` table: first column response, the rest predictors."""
    _, data = read_csv_matrix(path)
    if data.shape[1] < 2:
        raise CsvParseError(
            path, 0, "expected a response column plus at least one predictor"
        )
    return data[:, 0], data[:, 1:]


def format_value(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def write_csv(path, header, rows, comments=()):
    """Write rows of numbers, preceded by optional ``#`` comment lines."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for c in comments:
            fh.write(f"# {c}\n")
        if header:
            fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format_value(v) for v in row) + "\n")
