"""Tick-data ingestion: CSV to price tables to log-return increment series.

CSV format: header ``timestamp,price1,price2``, one row per tick, UTF-8,
decimal point, missing values as empty fields.  Timestamps are monotone
reals or ISO-8601 strings.  Floats are rendered with shortest round-trip
decimals, so a write/read cycle is bit-exact.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from datetime import datetime

import numpy as np

from .schemes import AsynchronousScheme, IrregularScheme
from .sim import IncrementSeries

__all__ = [
    "IngestError",
    "InsufficientDataError",
    "CleaningReport",
    "TickTable",
    "read_ticks",
    "write_ticks",
    "to_increments",
    "prices_from_increments",
]


class IngestError(RuntimeError):
    pass


class InsufficientDataError(IngestError):
    pass


@dataclass
class CleaningReport:
    rows_in: int = 0
    rows_kept: int = 0
    dropped_empty: int = 0
    dropped_duplicate_timestamp: int = 0
    nonpositive_prices: int = 0
    missing_prices: int = 0
    reordered: bool = False

    def as_dict(self) -> dict:
        return dict(self.__dict__)

    def summary(self) -> str:
        return (f"ticks in={self.rows_in} kept={self.rows_kept} "
                f"dropped_empty={self.dropped_empty} "
                f"dropped_duplicate={self.dropped_duplicate_timestamp} "
                f"nonpositive={self.nonpositive_prices} missing={self.missing_prices} "
                f"reordered={self.reordered}")


@dataclass(frozen=True)
class TickTable:
    """Cleaned tick rows; NaN marks a missing price for that component."""

    times: np.ndarray
    price1: np.ndarray
    price2: np.ndarray
    report: CleaningReport = field(default_factory=CleaningReport)


def _parse_timestamp(text: str, line: int) -> float:
    try:
        return float(text)
    except ValueError:
        pass
    try:
        return datetime.fromisoformat(text).timestamp()
    except ValueError:
        raise IngestError(f"line {line}: cannot parse timestamp {text!r}")


def _parse_price(text: str, line: int, report: CleaningReport) -> float:
    if text.strip() == "":
        report.missing_prices += 1
        return math.nan
    try:
        price = float(text)
    except ValueError:
        raise IngestError(f"line {line}: cannot parse price {text!r}")
    if not price > 0 or math.isinf(price):
        report.nonpositive_prices += 1
        return math.nan
    return price


def read_ticks(path) -> TickTable:
    """Read and clean a tick CSV.

    Cleaning: prices that are missing or not strictly positive become NaN;
    rows with no usable price are dropped; rows are sorted by timestamp and
    duplicated timestamps keep the last occurrence.  Everything is counted
    in the attached report.
    """
    report = CleaningReport()
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError(f"{path}: empty file")
        if [h.strip().lower() for h in header] != ["timestamp", "price1", "price2"]:
            raise IngestError(f"{path}: expected header 'timestamp,price1,price2', got {header}")
        for line, row in enumerate(reader, start=2):
            if not row or all(c.strip() == "" for c in row):
                continue
            if len(row) != 3:
                raise IngestError(f"line {line}: expected 3 fields, got {len(row)}")
            report.rows_in += 1
            t = _parse_timestamp(row[0], line)
            p1 = _parse_price(row[1], line, report)
            p2 = _parse_price(row[2], line, report)
            if math.isnan(p1) and math.isnan(p2):
                report.dropped_empty += 1
                continue
            rows.append((t, p1, p2))

    if len(rows) < 2:
        raise InsufficientDataError(f"{path}: fewer than 2 usable rows after cleaning")
    times = np.array([r[0] for r in rows])
    order = np.argsort(times, kind="stable")
    if not np.array_equal(order, np.arange(len(rows))):
        report.reordered = True
        rows = [rows[i] for i in order]
        times = times[order]
    # duplicate timestamps: keep the last occurrence
    keep = np.ones(len(rows), dtype=bool)
    keep[:-1] = np.diff(times) > 0
    report.dropped_duplicate_timestamp = int((~keep).sum())
    rows = [r for r, k in zip(rows, keep) if k]
    if len(rows) < 2:
        raise InsufficientDataError(f"{path}: fewer than 2 usable rows after cleaning")
    report.rows_kept = len(rows)
    arr = np.array(rows, dtype=float)
    return TickTable(times=arr[:, 0], price1=arr[:, 1], price2=arr[:, 2], report=report)


def write_ticks(path, table: TickTable) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["timestamp", "price1", "price2"])
        for t, p1, p2 in zip(table.times, table.price1, table.price2):
            w.writerow([repr(float(t)),
                        "" if math.isnan(p1) else repr(float(p1)),
                        "" if math.isnan(p2) else repr(float(p2))])


def to_increments(table: TickTable, mode: str = "synchronous",
                  k_n: float | None = None) -> IncrementSeries:
    """Log-return increments from a cleaned tick table.

    Synchronous mode uses the rows where both prices are present; the time
    axis is shifted so the first such row sits at the origin and, when
    ``k_n`` is given, rescaled so the horizon equals ``k_n`` (this is how a
    span of so-many trading days becomes the estimator normalizer).

    Asynchronous mode builds one observation grid per component from the
    rows where that component is present, truncated to the common final
    time.
    """
    for prices in (table.price1, table.price2):
        bad = ~np.isnan(prices) & ~(prices > 0)
        if np.any(bad):
            raise ValueError("non-positive price in tick table; clean the data first")
    if mode == "synchronous":
        ok = ~np.isnan(table.price1) & ~np.isnan(table.price2)
        times, p1, p2 = table.times[ok], table.price1[ok], table.price2[ok]
        if times.size < 2:
            raise InsufficientDataError("need >= 2 rows with both prices for synchronous mode")
        rel = times - times[0]
        if k_n is not None:
            rel = rel * (k_n / rel[-1])
        scheme = IrregularScheme(times=rel[1:])
        return IncrementSeries(times1=rel[1:], values1=np.diff(np.log(p1)),
                               times2=rel[1:], values2=np.diff(np.log(p2)),
                               scheme=scheme)

    if mode == "asynchronous":
        comp = []
        for prices in (table.price1, table.price2):
            ok = ~np.isnan(prices)
            comp.append((table.times[ok], prices[ok]))
        if comp[0][0].size < 2 or comp[1][0].size < 2:
            raise InsufficientDataError("need >= 2 rows per component for asynchronous mode")
        t_end = min(comp[0][0][-1], comp[1][0][-1])
        comp = [(t[t <= t_end], p[t <= t_end]) for t, p in comp]
        if comp[0][0].size < 2 or comp[1][0].size < 2:
            raise InsufficientDataError("fewer than 2 rows per component before the common end")
        origin = min(comp[0][0][0], comp[1][0][0])
        rel = [(t - origin) for t, _ in comp]
        if k_n is not None:
            span = t_end - origin
            rel = [r * (k_n / span) for r in rel]
        scheme = AsynchronousScheme(times1=rel[0][1:], times2=rel[1][1:],
                                    start1=float(rel[0][0]), start2=float(rel[1][0]))
        return IncrementSeries(
            times1=rel[0][1:], values1=np.diff(np.log(comp[0][1])),
            times2=rel[1][1:], values2=np.diff(np.log(comp[1][1])),
            scheme=scheme)

    raise ValueError(f"mode must be 'synchronous' or 'asynchronous', got {mode!r}")


_LOG_PRICE_BUDGET = 700.0  # exp() overflows just past 709


def prices_from_increments(series: IncrementSeries, base_price: float = 100.0) -> TickTable:
    """Exponentiate cumulative increments into a tick table (the export format
    of simulated paths; re-ingesting reproduces the price arrays bit-exactly).

    Heavy-tailed pure-jump paths over long horizons can exceed the exponential
    price representation; such series are rejected rather than clipped.
    """
    if not base_price > 0:
        raise ValueError("base_price must be > 0")
    for vals in (series.values1, series.values2):
        walk = np.cumsum(vals)
        if walk.size and np.max(np.abs(walk)) + abs(math.log(base_price)) > _LOG_PRICE_BUDGET:
            raise ValueError(
                "cumulative increments exceed the representable log-price range; "
                "shorten the horizon or damp the process before exporting as prices")
    logp0 = math.log(base_price)
    if series.synchronous:
        times = np.concatenate([[0.0], series.times1])
        p1 = np.exp(logp0 + np.concatenate([[0.0], np.cumsum(series.values1)]))
        p2 = np.exp(logp0 + np.concatenate([[0.0], np.cumsum(series.values2)]))
        return TickTable(times=times, price1=p1, price2=p2)
    start1 = series.scheme.start1 if series.scheme is not None else 0.0
    start2 = series.scheme.start2 if series.scheme is not None else 0.0
    t1 = np.concatenate([[start1], series.times1])
    t2 = np.concatenate([[start2], series.times2])
    p1 = np.exp(logp0 + np.concatenate([[0.0], np.cumsum(series.values1)]))
    p2 = np.exp(logp0 + np.concatenate([[0.0], np.cumsum(series.values2)]))
    times = np.unique(np.concatenate([t1, t2]))
    col1 = np.full(times.size, math.nan)
    col2 = np.full(times.size, math.nan)
    col1[np.searchsorted(times, t1)] = p1
    col2[np.searchsorted(times, t2)] = p2
    return TickTable(times=times, price1=col1, price2=col2)
