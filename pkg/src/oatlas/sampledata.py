"""Deterministic synthetic sample corpus with known ground truth.

The bundled 1,000-record fixture plants everything the end-to-end checks
need: exact sentiment fractions (10/40/50), two volume spikes, a keyword
frequency ladder with "putin" on top, and locations split between gazetteer
hits, absent, and unresolvable. The generator is pure stdlib-random with a
fixed seed, so regenerating always reproduces the shipped file byte for byte.
"""

from __future__ import annotations

import json
import random
import sys
from dataclasses import dataclass
from datetime import date, timedelta
from pathlib import Path

SAMPLE_SEED = 20220124

START_DATE = date(2022, 1, 1)
NUM_DAYS = 30
BASELINE_PER_DAY = 30
SPIKE_COUNT = 80
SPIKE_DATES = (date(2022, 1, 10), date(2022, 1, 24))

SENTIMENT_FRACTIONS = {"POS": 0.10, "NEU": 0.40, "NEG": 0.50}

# keyword -> record-index period; smaller period = more mentions.
KEYWORD_PERIODS = {"putin": 3, "biden": 5, "nato": 7, "zelensky": 11, "poland": 13}

_LOCATIONS: list[tuple[str | None, str | None]] = [
    ("Kyiv, Ukraine", "UA"),
    ("Lviv, Ukraine", "UA"),
    ("Washington, DC", "US"),
    ("Austin, TX, USA", "US"),
    ("London, UK", "GB"),
    ("Berlin, Germany", "DE"),
    ("Mumbai, India", "IN"),
    ("Moscow, Russia", "RU"),
    ("Warsaw, Poland", "PL"),
    ("Paris", "FR"),
    (None, None),
    ("somewhere over the rainbow", None),
]

# Polar anchors are in the shipped lexicon; theme pools are deliberately
# outside it (and outside the tag/emoticon maps) so NEU records abstain
# everywhere and POS/NEG records are never contradicted.
_POS_ANCHORS = ["love", "peace", "hope", "brave", "thank", "support", "grateful", "heroes"]
_NEG_ANCHORS = ["war", "attack", "crisis", "fear", "threat", "shelling", "invasion", "destruction"]
_POS_THEME = [
    "ukraine", "together", "solidarity", "volunteers", "donations",
    "humanitarian", "shelter", "community", "stand", "people",
]
_NEU_THEME = [
    "border", "statement", "report", "officials", "meeting", "talks", "update",
    "situation", "region", "security", "minister", "press", "summit", "agenda", "briefing",
]
_NEG_THEME = [
    "russian", "troops", "soldiers", "tanks", "frontline", "artillery",
    "convoy", "column", "offensive", "buildup",
]


@dataclass(frozen=True)
class PlantedTruth:
    daily_counts: dict[str, int]
    spike_dates: tuple[str, ...]
    fractions: dict[str, float]
    sentiments: dict[str, str]
    countries: dict[str, str | None]
    keyword_members: dict[str, tuple[str, ...]]


def _keywords_for(i: int) -> list[str]:
    return [kw for kw, period in KEYWORD_PERIODS.items() if i % period == 0]


def _content(i: int, sentiment: str, rng: random.Random) -> str:
    words: list[str] = []
    if i % 9 == 0:
        words.append("@frontdesk")
    keywords = _keywords_for(i)
    if sentiment == "POS":
        anchors = rng.sample(_POS_ANCHORS, 2)
        theme = rng.sample(_POS_THEME, 3)
        words += [anchors[0], theme[0], theme[1], *keywords, anchors[1], theme[2]]
        if i % 2 == 0:
            words.append("#StandWithUkraine")
        if i % 4 == 1:
            words.append(":)")
    elif sentiment == "NEG":
        anchors = rng.sample(_NEG_ANCHORS, 2)
        theme = rng.sample(_NEG_THEME, 3)
        words += [theme[0], anchors[0], theme[1], *keywords, anchors[1], theme[2]]
        if i % 2 == 0:
            words.append("#NoWar")
        if i % 4 == 1:
            words.append(":(")
    else:
        theme = rng.sample(_NEU_THEME, 5)
        words += [theme[0], theme[1], theme[2], *keywords, theme[3], theme[4]]
    if i % 6 == 0:
        words.append(f"https://example.com/{i}")
    return " ".join(words)


def _day_sentiments(n: int, rng: random.Random) -> list[str]:
    pos = n // 10
    neu = 4 * n // 10
    labels = ["POS"] * pos + ["NEU"] * neu + ["NEG"] * (n - pos - neu)
    rng.shuffle(labels)
    return labels


def generate() -> tuple[list[dict], PlantedTruth]:
    rng = random.Random(SAMPLE_SEED)
    rows: list[dict] = []
    sentiments: dict[str, str] = {}
    countries: dict[str, str | None] = {}
    keyword_members: dict[str, list[str]] = {kw: [] for kw in KEYWORD_PERIODS}
    daily_counts: dict[str, int] = {}

    i = 0
    for offset in range(NUM_DAYS):
        day = START_DATE + timedelta(days=offset)
        n = SPIKE_COUNT if day in SPIKE_DATES else BASELINE_PER_DAY
        daily_counts[day.isoformat()] = n
        for sentiment in _day_sentiments(n, rng):
            rec_id = f"t{i:06d}"
            location, country = _LOCATIONS[i % len(_LOCATIONS)]
            ts = f"{day.isoformat()}T{(i * 7) % 24:02d}:{(i * 13) % 60:02d}:{(i * 29) % 60:02d}Z"
            rows.append(
                {
                    "id": rec_id,
                    "date": ts,
                    "location": location,
                    "content": _content(i, sentiment, rng),
                    "user_id": f"u{i:04d}",
                }
            )
            sentiments[rec_id] = sentiment
            countries[rec_id] = country
            for kw in _keywords_for(i):
                keyword_members[kw].append(rec_id)
            i += 1

    truth = PlantedTruth(
        daily_counts=daily_counts,
        spike_dates=tuple(d.isoformat() for d in SPIKE_DATES),
        fractions=dict(SENTIMENT_FRACTIONS),
        sentiments=sentiments,
        countries=countries,
        keyword_members={kw: tuple(ids) for kw, ids in keyword_members.items()},
    )
    return rows, truth


def write_sample(path: str | Path) -> int:
    rows, _ = generate()
    lines = [json.dumps(row, ensure_ascii=False, sort_keys=True) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return len(rows)


if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "sample_corpus.jsonl"
    count = write_sample(out)
    print(f"wrote {count} records to {out}")
