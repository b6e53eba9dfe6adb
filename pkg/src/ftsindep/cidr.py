"""Intraday price ingestion: parse per-day price records, build cumulative
intraday return (CIDR) curves, resample them onto a common grid, and run
all pairwise independence tests.

A CIDR curve rescales a day's prices as ``100 * (ln P(t_j) - ln P(t_1))``,
so every curve starts at zero and the level non-stationarity of raw prices
is removed.  Days are mapped to [0, 1] by their own trading window (or by
a panel-wide window on request), gaps are bridged by linear interpolation,
and days with fewer than two observations are dropped and counted.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import AlignmentError, DaySkipped, InvalidPrice, ParseError
from .functional import FunctionalSample, Grid, make_uniform_grid
from .statistic import TestConfig, TestResult, independence_test

__all__ = [
    "PriceDay",
    "PricePanel",
    "CidrSample",
    "PairwiseReport",
    "parse_price_csv",
    "cidr_transform",
    "resample_to_grid",
    "build_cidr_sample",
    "pairwise_matrix",
]

_COLUMNS = ("date", "time", "price")


@dataclass(frozen=True, eq=False)
class PriceDay:
    """One trading day: times as fractions of the window, positive prices."""

    date: str
    times: np.ndarray
    prices: np.ndarray


@dataclass(frozen=True, eq=False)
class PricePanel:
    """Per-day price records of one ticker, in chronological order."""

    ticker: str
    days: tuple[PriceDay, ...]
    window: str  # "per_day" or "fixed"


def _parse_minutes(token: str, line_no: int) -> float:
    parts = token.strip().split(":")
    if len(parts) not in (2, 3):
        raise ParseError(f"cannot parse time {token!r}", line_no)
    try:
        h, mnt = int(parts[0]), int(parts[1])
        sec = int(parts[2]) if len(parts) == 3 else 0
    except ValueError:
        raise ParseError(f"cannot parse time {token!r}", line_no) from None
    if not (0 <= h < 24 and 0 <= mnt < 60 and 0 <= sec < 60):
        raise ParseError(f"time {token!r} out of range", line_no)
    return 60.0 * h + mnt + sec / 60.0


def parse_price_csv(path, ticker: str | None = None, window: str = "per_day") -> PricePanel:
    """Read a ``date,time,price`` CSV into a panel of per-day records.

    Dates are ISO strings, times are HH:MM (seconds tolerated), prices must
    be strictly positive.  Times must be strictly increasing within each
    day; any violation raises with the offending line number.  Days are
    ordered chronologically.  ``window`` selects how times map to [0, 1]:
    each day's own first/last observation ("per_day", the default) or the
    panel-wide earliest/latest time of day ("fixed").
    """
    if window not in ("per_day", "fixed"):
        raise ValueError("window must be 'per_day' or 'fixed'")
    name = ticker if ticker is not None else str(path)
    by_date: dict[str, list[tuple[float, float]]] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty file, expected a date,time,price header", 1) from None
        cols = [c.strip().lower() for c in header]
        if sorted(cols) != sorted(_COLUMNS):
            raise ParseError(
                f"expected header with columns {_COLUMNS}, got {header}", 1
            )
        idx = {c: cols.index(c) for c in _COLUMNS}
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not tok.strip() for tok in row):
                continue
            if len(row) != len(cols):
                raise ParseError(f"expected {len(cols)} fields, got {len(row)}", line_no)
            date = row[idx["date"]].strip()
            if not date:
                raise ParseError("missing date", line_no)
            minutes = _parse_minutes(row[idx["time"]], line_no)
            tok = row[idx["price"]].strip()
            try:
                price = float(tok)
            except ValueError:
                raise ParseError(f"cannot parse price {tok!r}", line_no) from None
            if not math.isfinite(price) or price <= 0.0:
                raise InvalidPrice(f"price must be strictly positive, got {tok}", line_no)
            day = by_date.setdefault(date, [])
            if day and minutes <= day[-1][0]:
                raise ParseError(
                    f"times within day {date} must be strictly increasing", line_no
                )
            day.append((minutes, price))
    if not by_date:
        raise ParseError("file contains a header but no data rows", 2)

    if window == "fixed":
        lo = min(recs[0][0] for recs in by_date.values())
        hi = max(recs[-1][0] for recs in by_date.values())
        span = hi - lo if hi > lo else 1.0
    days = []
    for date in sorted(by_date):
        recs = by_date[date]
        minutes = np.array([m for m, _ in recs])
        prices = np.array([p for _, p in recs])
        if window == "per_day":
            if minutes.size > 1:
                times = (minutes - minutes[0]) / (minutes[-1] - minutes[0])
            else:
                times = np.zeros(1)
        else:
            times = (minutes - lo) / span
        days.append(PriceDay(date, times, prices))
    return PricePanel(name, tuple(days), window)


def cidr_transform(panel: PricePanel) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per-day raw CIDR points: ``100 * ln(P(t_j) / P(t_1))`` at the day's times.

    The first point of every day is exactly zero, and rescaling all of a
    day's prices by a common factor leaves the output unchanged.
    """
    out = []
    for day in panel.days:
        returns = 100.0 * np.log(day.prices / day.prices[0])
        out.append((day.times, returns))
    return out


def resample_to_grid(times: np.ndarray, values: np.ndarray, grid: Grid) -> np.ndarray:
    """Evaluate a day's piecewise-linear interpolant on the common grid.

    Queries before the first (after the last) observation hold the first
    (last) observed value.  Days with fewer than two points cannot be
    interpolated and raise :class:`DaySkipped`.
    """
    if len(times) < 2:
        raise DaySkipped(f"day has {len(times)} observation(s), need at least 2")
    return np.interp(grid.points, times, values)


@dataclass(frozen=True, eq=False)
class CidrSample:
    """CIDR curves of one ticker on a common grid, plus the drop count."""

    ticker: str
    sample: FunctionalSample
    skipped_days: int


def build_cidr_sample(panel: PricePanel, grid: Grid | None = None) -> CidrSample:
    """Full pipeline: CIDR transform, then resample every usable day."""
    grid = grid or make_uniform_grid(100)
    curves = []
    skipped = 0
    for times, values in cidr_transform(panel):
        try:
            curves.append(resample_to_grid(times, values, grid))
        except DaySkipped:
            skipped += 1
    if not curves:
        raise AlignmentError(f"panel {panel.ticker!r} has no day with >= 2 observations")
    return CidrSample(panel.ticker, FunctionalSample(np.asarray(curves), grid), skipped)


@dataclass(frozen=True, eq=False)
class PairwiseReport:
    """All-pairs test results: symmetric p-value matrix plus summaries."""

    tickers: tuple[str, ...]
    p_values: np.ndarray
    v_stats: np.ndarray
    pairs: tuple[dict, ...]
    frac_below_05: float
    n: int
    config: dict

    def to_json_dict(self) -> dict:
        return {
            "tickers": list(self.tickers),
            "n": self.n,
            "pairs": list(self.pairs),
            "frac_below_0.05": self.frac_below_05,
            "config": self.config,
            "p_matrix": [
                [None if math.isnan(v) else v for v in row] for row in self.p_values
            ],
        }

    def matrix_csv(self) -> str:
        lines = ["ticker," + ",".join(self.tickers)]
        for name, row in zip(self.tickers, self.p_values):
            cells = ["" if math.isnan(v) else f"{v:.17g}" for v in row]
            lines.append(name + "," + ",".join(cells))
        return "\n".join(lines) + "\n"


def pairwise_matrix(
    samples: list[CidrSample], config: TestConfig | None = None, threads: int = 1
) -> PairwiseReport:
    """Independence tests for every unordered pair of tickers.

    All samples must share the day count and the grid.  The matrix is
    symmetric (each unordered pair is tested once) with the diagonal left
    out; the summary records the fraction of pairs with p below 0.05.
    Pairs are independent, so they may run on ``threads`` workers; the
    result is assembled in pair order and does not depend on the count.
    """
    if len(samples) < 2:
        raise AlignmentError("need at least two tickers for a pairwise comparison")
    first = samples[0].sample
    for s in samples[1:]:
        if s.sample.n != first.n:
            raise AlignmentError(
                f"ticker {s.ticker!r} has {s.sample.n} days, expected {first.n}"
            )
        if not s.sample.grid.same_as(first.grid):
            raise AlignmentError(f"ticker {s.ticker!r} is on a different grid")
    config = config or TestConfig()
    k = len(samples)
    index_pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]

    def one(ij: tuple[int, int]) -> TestResult:
        i, j = ij
        return independence_test(samples[i].sample, samples[j].sample, config)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, index_pairs))
    else:
        results = [one(ij) for ij in index_pairs]

    p = np.full((k, k), np.nan)
    v = np.full((k, k), np.nan)
    pairs = []
    resolved: dict = {}
    for (i, j), res in zip(index_pairs, results):
        p[i, j] = p[j, i] = res.p_value
        v[i, j] = v[j, i] = res.v_stat
        resolved = res.config
        pairs.append(
            {
                "a": samples[i].ticker,
                "b": samples[j].ticker,
                "v": res.v_stat,
                "p": res.p_value,
            }
        )
    upper = p[np.triu_indices(k, 1)]
    frac = float(np.mean(upper < 0.05))
    return PairwiseReport(
        tickers=tuple(s.ticker for s in samples),
        p_values=p,
        v_stats=v,
        pairs=tuple(pairs),
        frac_below_05=frac,
        n=first.n,
        config=resolved,
    )
