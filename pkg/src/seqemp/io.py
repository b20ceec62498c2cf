"""CSV persistence for series, regression samples and process paths.

Formats (UTF-8, comma separated, header line, newline-terminated rows):

* univariate series: ``t,y`` with ``t = 0..n``
* regression sample: ``t,y,x1,...,xd`` with ``t = 1..n``
* process path: ``s,z,value`` (``s,z1,...,zd,value`` for ``d > 1``), long format
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .exceptions import CsvFormatError
from .seriesgen import RegressionSample, UnivariateSeries


def fmt(v) -> str:
    # shortest repr that round-trips
    return repr(float(v))


def write_series_csv(series: UnivariateSeries, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("t,y\n")
        for t, v in enumerate(series.values):
            fh.write(f"{t},{fmt(v)}\n")


def write_regression_csv(sample: RegressionSample, path) -> None:
    d = sample.d
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(["t", "y"] + [f"x{j + 1}" for j in range(d)]) + "\n")
        for t in range(sample.n):
            row = [str(t + 1), fmt(sample.responses[t])] + [fmt(v) for v in sample.regressors[t]]
            fh.write(",".join(row) + "\n")


def _read_rows(path):
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise CsvFormatError("empty file", 1)
    return [c.strip() for c in rows[0]], rows[1:]


def _parse_row(row, width, lineno):
    if len(row) != width:
        raise CsvFormatError(f"expected {width} fields, found {len(row)}", lineno)
    out = []
    for cell in row:
        try:
            v = float(cell)
        except ValueError:
            raise CsvFormatError(f"not a number: {cell!r}", lineno) from None
        if not math.isfinite(v):
            raise CsvFormatError(f"non-finite value: {cell!r}", lineno)
        out.append(v)
    return out


def read_series_csv(path) -> UnivariateSeries:
    header, rows = _read_rows(path)
    if header != ["t", "y"]:
        raise CsvFormatError(f"expected header 't,y', found {','.join(header)!r}", 1)
    vals = [_parse_row(r, 2, i + 2)[1] for i, r in enumerate(rows) if r]
    if len(vals) < 2:
        raise CsvFormatError("need at least two observations", len(rows) + 1)
    return UnivariateSeries(np.array(vals), {"source": "ingested", "path": str(path)})


def read_regression_csv(path) -> RegressionSample:
    header, rows = _read_rows(path)
    d = len(header) - 2
    expected = ["t", "y"] + [f"x{j + 1}" for j in range(d)]
    if d < 1 or header != expected:
        raise CsvFormatError(f"expected header 't,y,x1,...,xd', found {','.join(header)!r}", 1)
    data = [_parse_row(r, d + 2, i + 2) for i, r in enumerate(rows) if r]
    if not data:
        raise CsvFormatError("no observations", 2)
    arr = np.array(data)
    return RegressionSample(arr[:, 1], arr[:, 2:], {"source": "ingested", "path": str(path)})
