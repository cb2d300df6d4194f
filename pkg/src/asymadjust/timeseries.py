"""Dated level series: CSV ingestion, gap repair, alignment and elementary transforms."""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, replace
from datetime import datetime
from typing import IO, Iterable, Union

import numpy as np

MIN_SAMPLE = 30


class SeriesError(ValueError):
    """Raised for malformed input data or violated series preconditions."""


@dataclass(frozen=True, eq=False)
class PriceSeries:
    """An evenly spaced, dated observation sequence.

    Missing observations are stored as NaN until :func:`fill_missing` repairs
    them; ``imputed_mask`` marks the indices that were filled in.
    """

    label: str
    timestamps: np.ndarray  # datetime64[D]
    values: np.ndarray
    imputed_mask: np.ndarray

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype="datetime64[D]")
        vals = np.asarray(self.values, dtype=float)
        mask = np.asarray(self.imputed_mask, dtype=bool)
        if not (len(ts) == len(vals) == len(mask)):
            raise SeriesError("timestamps, values and imputed_mask must have equal length")
        if len(ts) > 1 and np.any(np.diff(ts) <= np.timedelta64(0, "D")):
            raise SeriesError("timestamps must be strictly increasing")
        if np.any(np.isinf(vals)):
            raise SeriesError("values must be finite")
        for name, arr in (("timestamps", ts), ("values", vals), ("imputed_mask", mask)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PriceSeries):
            return NotImplemented
        return (
            self.label == other.label
            and np.array_equal(self.timestamps, other.timestamps)
            and np.array_equal(self.values, other.values, equal_nan=True)
            and np.array_equal(self.imputed_mask, other.imputed_mask)
        )

    @property
    def gaps(self) -> np.ndarray:
        return np.isnan(self.values)

    @property
    def has_gaps(self) -> bool:
        return bool(self.gaps.any())

    def to_csv(self) -> str:
        """Repaired-series CSV with columns ``date,value,imputed``."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["date", "value", "imputed"])
        for t, v, m in zip(self.timestamps, self.values, self.imputed_mask):
            writer.writerow([str(t), "" if math.isnan(v) else repr(float(v)), int(m)])
        return buf.getvalue()


@dataclass(frozen=True, eq=False)
class AlignedPair:
    y: np.ndarray
    x: np.ndarray
    timestamps: np.ndarray

    def __post_init__(self):
        if not (len(self.y) == len(self.x) == len(self.timestamps)):
            raise SeriesError("aligned sequences must have equal length")
        if len(self.y) < MIN_SAMPLE:
            raise SeriesError(
                f"aligned sample has {len(self.y)} observations; at least {MIN_SAMPLE} required"
            )

    def __len__(self) -> int:
        return len(self.y)


def _read_text(source: Union[str, bytes, IO]) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8-sig")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8-sig") if isinstance(data, bytes) else data


def ingest_csv(
    source,
    date_column: str = "date",
    value_column: str = "value",
    date_format: str = "%Y-%m-%d",
    label: str | None = None,
) -> PriceSeries:
    """Parse a delimited text stream into a :class:`PriceSeries`.

    ``source`` may be bytes, a str holding the file content, or a binary/text
    file object. Empty value cells become gaps. Rows are sorted by date;
    duplicate dates are rejected. Row numbers in error messages count the
    header as row 1.
    """
    text = _read_text(source)
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise SeriesError("CSV has no header row")
    fields = [f.strip() for f in reader.fieldnames]
    reader.fieldnames = fields
    for col in (date_column, value_column):
        if col not in fields:
            raise SeriesError(f"column {col!r} not found in header {fields}")

    dates, values = [], []
    for rownum, row in enumerate(reader, start=2):
        raw_date = (row.get(date_column) or "").strip()
        raw_value = (row.get(value_column) or "").strip()
        if not raw_date and not raw_value:
            continue
        try:
            day = datetime.strptime(raw_date, date_format).date()
        except ValueError:
            raise SeriesError(f"row {rownum}: cannot parse date {raw_date!r}") from None
        if raw_value == "" or raw_value.upper() in ("NA", "NAN"):
            value = math.nan
        else:
            try:
                value = float(raw_value)
            except ValueError:
                raise SeriesError(f"row {rownum}: cannot parse value {raw_value!r}") from None
            if not math.isfinite(value):
                raise SeriesError(f"row {rownum}: value {raw_value!r} is not finite")
        dates.append(np.datetime64(day, "D"))
        values.append(value)

    if not dates:
        raise SeriesError("CSV contains no usable rows")
    ts = np.array(dates, dtype="datetime64[D]")
    vals = np.array(values, dtype=float)
    order = np.argsort(ts, kind="stable")
    ts, vals = ts[order], vals[order]
    dup = np.flatnonzero(np.diff(ts) == np.timedelta64(0, "D"))
    if dup.size:
        raise SeriesError(f"duplicate timestamp {ts[dup[0]]}")
    if np.all(np.isnan(vals)):
        raise SeriesError("CSV contains no usable values")
    _check_spacing(ts)
    return PriceSeries(label or value_column, ts, vals, np.zeros(len(vals), dtype=bool))


def _check_spacing(ts: np.ndarray) -> None:
    if len(ts) < 3:
        return
    steps = np.diff(ts).astype(int)
    values, counts = np.unique(steps, return_counts=True)
    modal = values[np.argmax(counts)]
    irregular = int(np.sum(steps != modal))
    if irregular:
        warnings.warn(
            f"{irregular} of {len(steps)} date steps differ from the modal spacing of {modal} days",
            stacklevel=3,
        )


def fill_missing(series: PriceSeries) -> PriceSeries:
    """Linearly interpolate interior gaps from their nearest observed neighbours.

    Consecutive gaps are filled as one straight segment. Observed values are
    left untouched bit-for-bit.
    """
    vals = np.array(series.values, dtype=float)
    gaps = np.isnan(vals)
    if not gaps.any():
        return series
    if gaps[0] or gaps[-1]:
        raise SeriesError(f"{series.label}: gap at series boundary; extrapolation refused")
    observed = np.flatnonzero(~gaps)
    if observed.size < 2:
        raise SeriesError(f"{series.label}: need at least two observed values")
    missing = np.flatnonzero(gaps)
    vals[missing] = np.interp(missing, observed, vals[observed])
    return replace(series, values=vals, imputed_mask=series.imputed_mask | gaps)


def log_series(series: PriceSeries) -> PriceSeries:
    """Element-wise natural logarithm."""
    vals = series.values
    bad = np.flatnonzero(~(vals > 0))
    if bad.size:
        i = int(bad[0])
        raise SeriesError(f"{series.label}: non-positive or missing value {vals[i]} at index {i}")
    return replace(series, values=np.log(vals))


def diff_series(series: PriceSeries) -> PriceSeries:
    """First differences, stamped with the later date of each pair."""
    if len(series) < 2:
        raise SeriesError(f"{series.label}: need at least two observations to difference")
    mask = series.imputed_mask[1:] | series.imputed_mask[:-1]
    return PriceSeries(series.label, series.timestamps[1:], np.diff(series.values), mask)


def align(a: PriceSeries, b: PriceSeries) -> AlignedPair:
    """Restrict two repaired series to their common dates (``a`` becomes ``y``)."""
    for s in (a, b):
        if s.has_gaps:
            raise SeriesError(f"{s.label}: series has unrepaired gaps")
    common, ia, ib = np.intersect1d(a.timestamps, b.timestamps, assume_unique=True, return_indices=True)
    if len(common) < MIN_SAMPLE:
        raise SeriesError(
            f"{a.label}/{b.label}: only {len(common)} common dates; at least {MIN_SAMPLE} required"
        )
    return AlignedPair(np.asarray(a.values[ia]), np.asarray(b.values[ib]), common)


def from_values(values: Iterable[float], label: str = "series", start: str = "2000-01-03", step_days: int = 7) -> PriceSeries:
    """Build a weekly series from raw values (mainly for synthetic data)."""
    vals = np.asarray(list(values), dtype=float)
    ts = np.datetime64(start, "D") + np.arange(len(vals)) * np.timedelta64(step_days, "D")
    return PriceSeries(label, ts, vals, np.zeros(len(vals), dtype=bool))
