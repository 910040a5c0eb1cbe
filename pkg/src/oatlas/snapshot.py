"""The immutable precomputed bundle the HTTP API serves.

Built once by the pipeline from the labeled corpus and the per-partition
topic summaries; the server only reads it. Persisted as deterministic JSON
(sorted keys) so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import date as date_t, timedelta
from pathlib import Path

from .labeling import LabeledRecord, Sentiment, distribution
from .timeseries import ALL, UNRESOLVED, DailyAggregate, aggregate_daily
from .topicmodel import TopicSummary

FORMAT = "oatlas-snapshot"
VERSION = 1


class SnapshotError(Exception):
    pass


@dataclass(frozen=True)
class Snapshot:
    records: int
    date_min: str
    date_max: str
    vocab_size: int
    distribution: dict[str, float]
    daily: tuple[DailyAggregate, ...]
    topics: dict[str, list[dict]]
    skipped_partitions: tuple[dict, ...] = ()
    countries: tuple[str, ...] = ()
    _daily_by_date: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        by_date: dict[str, list[DailyAggregate]] = {}
        for agg in self.daily:
            by_date.setdefault(agg.date.isoformat(), []).append(agg)
        object.__setattr__(self, "_daily_by_date", by_date)

    # -- query helpers used by the server ---------------------------------

    def summary_payload(self) -> dict:
        return {
            "records": self.records,
            "date_min": self.date_min,
            "date_max": self.date_max,
            "distribution": self.distribution,
        }

    def in_range(self, day: str) -> bool:
        return self.date_min <= day <= self.date_max

    def map_payload(self, day: str) -> dict:
        """Per-country score/count for one date; absent country = no data."""
        out = {}
        for agg in self._daily_by_date.get(day, []):
            if agg.country in (ALL, UNRESOLVED):
                continue
            out[agg.country] = {"score": agg.score, "count": agg.total}
        return out

    def topics_payload(self, key: str) -> list[dict]:
        return self.topics.get(key, [])

    def series_payload(self, country: str | None, sentiment: str | None) -> list[dict]:
        lo = date_t.fromisoformat(self.date_min)
        hi = date_t.fromisoformat(self.date_max)
        wanted = country if country is not None else ALL
        out = []
        day = lo
        while day <= hi:
            count = 0
            for agg in self._daily_by_date.get(day.isoformat(), []):
                if agg.country != wanted:
                    continue
                if sentiment is None:
                    count = agg.total
                elif sentiment == Sentiment.POS.value:
                    count = agg.n_pos
                elif sentiment == Sentiment.NEU.value:
                    count = agg.n_neu
                else:
                    count = agg.n_neg
            out.append({"date": day.isoformat(), "count": count})
            day += timedelta(days=1)
        return out


def _summaries_to_json(summaries: list[TopicSummary]) -> list[dict]:
    return [
        {"topic": s.topic, "words": [[w, p] for w, p in s.words]}
        for s in summaries
    ]


def build_snapshot(
    labeled: list[LabeledRecord],
    vocab_size: int,
    topics: dict[str, list[TopicSummary]],
    skipped: list[dict] | None = None,
) -> Snapshot:
    if not labeled:
        raise SnapshotError("cannot build a snapshot from zero records")
    daily = aggregate_daily(labeled)
    dist = {s.value: f for s, f in distribution(labeled).items()}
    dates = sorted(lr.record.date for lr in labeled)
    countries = sorted(
        {agg.country for agg in daily if agg.country not in (ALL, UNRESOLVED)}
    )
    return Snapshot(
        records=len(labeled),
        date_min=dates[0].isoformat(),
        date_max=dates[-1].isoformat(),
        vocab_size=vocab_size,
        distribution=dist,
        daily=tuple(daily),
        topics={k: _summaries_to_json(v) for k, v in sorted(topics.items())},
        skipped_partitions=tuple(skipped or ()),
        countries=tuple(countries),
    )


def save_snapshot(snap: Snapshot, path: str | Path) -> None:
    payload = {
        "format": FORMAT,
        "version": VERSION,
        "stats": {
            "records": snap.records,
            "date_min": snap.date_min,
            "date_max": snap.date_max,
            "vocab_size": snap.vocab_size,
            "distribution": snap.distribution,
        },
        "daily": [
            {
                "date": agg.date.isoformat(),
                "country": agg.country,
                "n_pos": agg.n_pos,
                "n_neu": agg.n_neu,
                "n_neg": agg.n_neg,
                "score": agg.score,
            }
            for agg in snap.daily
        ],
        "topics": snap.topics,
        "skipped_partitions": list(snap.skipped_partitions),
        "countries": list(snap.countries),
    }
    Path(path).write_text(
        json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=1) + "\n",
        encoding="utf-8",
    )


def load_snapshot(path: str | Path) -> Snapshot:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise SnapshotError(f"cannot load snapshot {path}: {exc}") from exc
    if payload.get("format") != FORMAT:
        raise SnapshotError(f"{path}: not a snapshot file")
    if payload.get("version") != VERSION:
        raise SnapshotError(f"{path}: unsupported snapshot version {payload.get('version')}")
    stats = payload["stats"]
    daily = tuple(
        DailyAggregate(
            date=date_t.fromisoformat(row["date"]),
            country=row["country"],
            n_pos=row["n_pos"],
            n_neu=row["n_neu"],
            n_neg=row["n_neg"],
        )
        for row in payload["daily"]
    )
    return Snapshot(
        records=stats["records"],
        date_min=stats["date_min"],
        date_max=stats["date_max"],
        vocab_size=stats["vocab_size"],
        distribution=stats["distribution"],
        daily=daily,
        topics=payload["topics"],
        skipped_partitions=tuple(payload.get("skipped_partitions", [])),
        countries=tuple(payload.get("countries", [])),
    )
