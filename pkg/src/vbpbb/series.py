"""The unit-spaced time series container and its CSV round trip."""

from __future__ import annotations

import csv
import io
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ParameterError, ShapeError


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Real-valued series sampled at unit spacing.

    Element ``i`` (0-based) sits at time ``start_index + i``. The default
    origin is 1 so that times match the ``t = 1, ..., T`` convention used in
    all formulas of this package. The value array is copied and frozen on
    construction.
    """

    values: np.ndarray
    start_index: int = 1

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=float, copy=True)
        if arr.ndim != 1:
            raise ShapeError(f"series values must be 1-D, got shape {arr.shape}", "values")
        if arr.size < 1:
            raise ParameterError("series must contain at least one value", "values")
        if not np.all(np.isfinite(arr)):
            raise ParameterError("series values must be finite", "values")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "start_index", int(self.start_index))

    def __len__(self) -> int:
        return self.values.size

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.start_index, self.start_index + len(self), dtype=np.int64)

    def with_values(self, values: np.ndarray) -> "TimeSeries":
        """Same time axis, new values."""
        return TimeSeries(values, self.start_index)

    def equals(self, other: "TimeSeries") -> bool:
        """Bit-exact equality of origin and values."""
        return self.start_index == other.start_index and np.array_equal(self.values, other.values)

    def check_aligned(self, other: "TimeSeries", what: str = "series") -> None:
        if len(self) != len(other) or self.start_index != other.start_index:
            raise ShapeError(
                f"{what} not aligned: length {len(self)}@{self.start_index} "
                f"vs {len(other)}@{other.start_index}"
            )

    @classmethod
    def zeros(cls, length: int, start_index: int = 1) -> "TimeSeries":
        return cls(np.zeros(length), start_index)


def fmt(x: float) -> str:
    """Shortest decimal string that round-trips to the same double."""
    return repr(float(x))


def atomic_write_text(path: str | os.PathLike, text: str) -> Path:
    """Write ``text`` via a temp file in the same directory and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_table(path: str | os.PathLike, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """Write a CSV table; floats use the round-trip format, everything else ``str``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) if isinstance(v, (float, np.floating)) else str(v) for v in row])
    return atomic_write_text(path, buf.getvalue())


def read_table(path: str | os.PathLike) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, [row for row in reader if row]


def write_series_csv(path: str | os.PathLike, series: TimeSeries) -> Path:
    """Serialize as ``t,value`` with 1-based (absolute) times."""
    return write_table(
        path, ["t", "value"], zip(series.times.tolist(), series.values.tolist())
    )


def read_series_csv(path: str | os.PathLike, column: str = "value") -> TimeSeries:
    """Load a ``t,<column>`` CSV. Times must be consecutive integers."""
    header, rows = read_table(path)
    if "t" not in header or column not in header:
        raise ParameterError(f"{path}: expected columns 't' and '{column}', got {header}", column)
    ti, vi = header.index("t"), header.index(column)
    times = np.array([int(r[ti]) for r in rows], dtype=np.int64)
    if times.size and np.any(np.diff(times) != 1):
        raise ParameterError(f"{path}: time column must be consecutive integers", "t")
    values = np.array([float(r[vi]) for r in rows])
    return TimeSeries(values, int(times[0]) if times.size else 1)
