"""Daily sentiment aggregates, volume series, and spike detection.

The per-(date, country) score (n_pos - n_neg) / total is the scalar the map
colors with: +1 all positive, -1 all negative, neutral mass pulls toward 0.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import date as date_t, timedelta
from pathlib import Path

from .labeling import LabeledRecord, Sentiment

ALL = "ALL"
UNRESOLVED = "UNRESOLVED"


@dataclass(frozen=True)
class DailyAggregate:
    date: date_t
    country: str  # ISO alpha-2, ALL, or UNRESOLVED
    n_pos: int
    n_neu: int
    n_neg: int

    @property
    def total(self) -> int:
        return self.n_pos + self.n_neu + self.n_neg

    @property
    def score(self) -> float:
        return (self.n_pos - self.n_neg) / self.total


@dataclass(frozen=True)
class VolumeSeries:
    dates: tuple[date_t, ...]  # contiguous, one entry per day
    counts: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.dates)


def aggregate_daily(labeled: list[LabeledRecord]) -> list[DailyAggregate]:
    """One aggregate per (date, country) with data, plus per-date ALL rollups.

    Output is ordered by (date, country); ALL sorts with the plain string
    ordering like any other key.
    """
    if not labeled:
        raise ValueError("cannot aggregate zero records")
    cells: dict[tuple[date_t, str], list[int]] = {}
    for lr in labeled:
        day = lr.record.date
        country = lr.country if lr.country is not None else UNRESOLVED
        for key in ((day, country), (day, ALL)):
            counts = cells.setdefault(key, [0, 0, 0])
            if lr.sentiment is Sentiment.POS:
                counts[0] += 1
            elif lr.sentiment is Sentiment.NEU:
                counts[1] += 1
            else:
                counts[2] += 1
    return [
        DailyAggregate(date=day, country=country, n_pos=c[0], n_neu=c[1], n_neg=c[2])
        for (day, country), c in sorted(cells.items())
    ]


def volume_series(
    labeled: list[LabeledRecord],
    country: str | None = None,
    sentiment: Sentiment | None = None,
) -> VolumeSeries:
    """Daily record counts after optional filters, zero-filled over the range.

    The date range always spans the unfiltered input, so an empty filter
    result is an all-zero series rather than an empty one.
    """
    if not labeled:
        return VolumeSeries(dates=(), counts=())
    lo = min(lr.record.date for lr in labeled)
    hi = max(lr.record.date for lr in labeled)
    days = (hi - lo).days + 1
    counts = [0] * days
    for lr in labeled:
        if country is not None:
            rec_country = lr.country if lr.country is not None else UNRESOLVED
            if country != ALL and rec_country != country:
                continue
        if sentiment is not None and lr.sentiment is not sentiment:
            continue
        counts[(lr.record.date - lo).days] += 1
    dates = tuple(lo + timedelta(days=i) for i in range(days))
    return VolumeSeries(dates=dates, counts=tuple(counts))


def detect_peaks(
    series: VolumeSeries, trailing_window: int = 7, factor: float = 1.5
) -> list[date_t]:
    """Dates that rise above their neighborhood and their trailing mean.

    Day d is a peak iff count(d) > count(d-1), count(d) >= count(d+1) (absent
    next day counts as satisfied), and count(d) > factor * mean of up to
    trailing_window preceding days (at least one required).
    """
    if trailing_window < 1:
        raise ValueError(f"trailing_window must be >= 1, got {trailing_window}")
    if factor <= 1:
        raise ValueError(f"factor must be > 1, got {factor}")
    if len(series) < 3:
        return []
    counts = series.counts
    peaks = []
    for i in range(1, len(counts)):
        if counts[i] <= counts[i - 1]:
            continue
        if i + 1 < len(counts) and counts[i] < counts[i + 1]:
            continue
        window = counts[max(0, i - trailing_window) : i]
        if counts[i] > factor * (sum(window) / len(window)):
            peaks.append(series.dates[i])
    return peaks


def trailing_mean(series: VolumeSeries, day: date_t, trailing_window: int) -> float:
    """Mean count over up to trailing_window days preceding the given day."""
    i = series.dates.index(day)
    if i == 0:
        raise ValueError("no preceding days")
    window = series.counts[max(0, i - trailing_window) : i]
    return sum(window) / len(window)


def write_csv(aggregates: list[DailyAggregate], path: str | Path) -> None:
    """date,country,n_pos,n_neu,n_neg,score rows in deterministic order."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "country", "n_pos", "n_neu", "n_neg", "score"])
        for agg in aggregates:
            writer.writerow(
                [
                    agg.date.isoformat(),
                    agg.country,
                    agg.n_pos,
                    agg.n_neu,
                    agg.n_neg,
                    f"{agg.score:.6f}",
                ]
            )


def write_peak_report(
    series: VolumeSeries,
    path: str | Path,
    trailing_window: int = 7,
    factor: float = 1.5,
) -> list[date_t]:
    """One line per detected peak: date, count, trailing mean."""
    peaks = detect_peaks(series, trailing_window=trailing_window, factor=factor)
    lines = []
    for day in peaks:
        count = series.counts[series.dates.index(day)]
        mean = trailing_mean(series, day, trailing_window)
        lines.append(f"{day.isoformat()}\tcount={count}\ttrailing_mean={mean:.2f}")
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    return peaks
