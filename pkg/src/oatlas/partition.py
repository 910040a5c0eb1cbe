"""Slice the labeled corpus by aspect and run per-slice topic extraction.

Sentiment, date, and country slices are disjoint; keyword slices may overlap
(one record can mention several query tokens). Each selected slice gets its
own vocabulary and its own topic model, seeded stably from (seed, slice key),
so results do not depend on which slices are requested or in what order.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Sequence

from .corpus import CorpusError, build_vocabulary, encode, normalize, tokenize
from .labeling import LabeledRecord
from .topicmodel import LdaConfig, LdaModel, TopicSummary, derive_seed, top_words, train

log = logging.getLogger(__name__)

ASPECTS = ("sentiment", "date", "country", "keyword")
UNRESOLVED = "UNRESOLVED"
# Canonical component order inside composite keys.
_KEY_ORDER = ("date", "sentiment", "country", "keyword")


class PartitionError(Exception):
    pass


def canonical_key(
    date: str | None = None,
    sentiment: str | None = None,
    country: str | None = None,
    keyword: str | None = None,
) -> str:
    """Stable string form of a slice key, e.g. "date=2022-01-24|sentiment=NEG"."""
    values = {"date": date, "sentiment": sentiment, "country": country, "keyword": keyword}
    parts = [f"{a}={values[a]}" for a in _KEY_ORDER if values[a] is not None]
    return "|".join(parts) if parts else "all"


@dataclass(frozen=True)
class PartitionSet:
    aspect: str
    buckets: dict[str, tuple[str, ...]]  # aspect value -> record ids

    def counts(self) -> dict[str, int]:
        return {k: len(v) for k, v in self.buckets.items()}

    def keyed(self) -> dict[str, tuple[str, ...]]:
        """Buckets under their canonical composite keys."""
        return {canonical_key(**{self.aspect: value}): ids for value, ids in self.buckets.items()}


def partition_by(
    labeled: list[LabeledRecord],
    aspect: str,
    values: Sequence[str] | None = None,
    tokens_by_id: Mapping[str, Sequence[str]] | None = None,
) -> PartitionSet:
    """Bucket record ids by one aspect.

    sentiment/date/country place each record in exactly one bucket (a missing
    country goes to UNRESOLVED); keyword places a record in every bucket whose
    token appears in its tokenized content, so buckets may overlap. The
    keyword aspect requires values; tokens_by_id overrides the default
    tokenization (no stopwords, min_len=2).
    """
    if aspect not in ASPECTS:
        raise PartitionError(f"unknown aspect {aspect!r} (expected one of {ASPECTS})")
    buckets: dict[str, list[str]] = {}
    if aspect == "keyword":
        if not values:
            raise PartitionError("keyword aspect requires a list of keyword values")
        for kw in values:
            buckets[kw] = []
        for lr in labeled:
            rid = lr.record.id
            if tokens_by_id is not None:
                tokens = tokens_by_id[rid]
            else:
                tokens = tokenize(normalize(lr.record.content), frozenset())
            present = set(tokens)
            for kw in values:
                if kw in present:
                    buckets[kw].append(rid)
    else:
        for lr in labeled:
            if aspect == "sentiment":
                value = lr.sentiment.value
            elif aspect == "date":
                value = lr.record.date.isoformat()
            else:
                value = lr.country if lr.country is not None else UNRESOLVED
            buckets.setdefault(value, []).append(lr.record.id)
        if values is not None:
            wanted = set(values)
            buckets = {v: ids for v, ids in buckets.items() if v in wanted}
    return PartitionSet(
        aspect=aspect,
        buckets={v: tuple(ids) for v, ids in sorted(buckets.items())},
    )


def cross(a: PartitionSet, b: PartitionSet) -> dict[str, tuple[str, ...]]:
    """Intersect two disjoint-aspect partitions into composite-key buckets."""
    out: dict[str, tuple[str, ...]] = {}
    for va, ids_a in a.buckets.items():
        set_a = set(ids_a)
        for vb, ids_b in b.buckets.items():
            common = [rid for rid in ids_b if rid in set_a]
            if common:
                key = canonical_key(**{a.aspect: va, b.aspect: vb})
                out[key] = tuple(common)
    return out


# ---------------------------------------------------------------------------
# Per-partition topic extraction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PartitionRun:
    key: str
    doc_count: int
    status: str  # "processed" or "skipped"
    reason: str = ""


@dataclass
class PartitionTopics:
    summaries: dict[str, list[TopicSummary]]
    runs: list[PartitionRun]
    models: dict[str, LdaModel]

    def report(self) -> str:
        lines = []
        for run in self.runs:
            suffix = f" ({run.reason})" if run.reason else ""
            lines.append(f"{run.key}\t{run.doc_count} docs\t{run.status}{suffix}")
        return "\n".join(lines)


def _train_partition(key, ids, docs_by_id, config, n, min_df, max_df_ratio):
    docs = [list(docs_by_id[rid]) for rid in ids]
    try:
        vocab = build_vocabulary(docs, min_df=min_df, max_df_ratio=max_df_ratio)
        encoded = encode(docs, list(ids), vocab)
    except CorpusError as exc:
        return key, None, None, str(exc)
    run_config = replace(config, seed=derive_seed(config.seed, key))
    model = train(encoded.corpus, run_config, vocab=vocab)
    summaries = top_words(model, min(n, vocab.size))
    return key, summaries, model, ""


def topics_for_partitions(
    partitions: PartitionSet | Mapping[str, Sequence[str]],
    docs_by_id: Mapping[str, Sequence[str]],
    config: LdaConfig,
    n: int,
    min_docs: int = 20,
    min_df: int = 2,
    max_df_ratio: float = 0.95,
    max_workers: int | None = None,
) -> PartitionTopics:
    """Train one topic model per sufficiently large partition.

    Partitions below min_docs (or whose per-partition vocabulary comes out
    empty) are skipped and listed in the run report. Runs are independent,
    seeded by (config.seed, key), and may execute concurrently; output order
    is always canonical key order.
    """
    if isinstance(partitions, PartitionSet):
        buckets = partitions.keyed()
    else:
        buckets = {k: tuple(v) for k, v in partitions.items()}

    runs: list[PartitionRun] = []
    summaries: dict[str, list[TopicSummary]] = {}
    models: dict[str, LdaModel] = {}
    todo = []
    for key in sorted(buckets):
        ids = buckets[key]
        if len(ids) < min_docs:
            runs.append(
                PartitionRun(key, len(ids), "skipped", f"below minimum of {min_docs} docs")
            )
            continue
        todo.append((key, ids))

    if not todo:
        if not runs:
            raise PartitionError("no partitions to process")
        raise PartitionError(
            f"all {len(runs)} partitions fall below the minimum of {min_docs} docs"
        )

    def work(item):
        key, ids = item
        return _train_partition(key, ids, docs_by_id, config, n, min_df, max_df_ratio)

    if max_workers == 1 or len(todo) <= 1:
        results = [work(item) for item in todo]
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(work, todo))

    for (key, ids), (rkey, summary, model, reason) in zip(todo, results):
        assert key == rkey
        if summary is None:
            runs.append(PartitionRun(key, len(ids), "skipped", reason))
        else:
            runs.append(PartitionRun(key, len(ids), "processed"))
            summaries[key] = summary
            models[key] = model
    runs.sort(key=lambda r: r.key)
    return PartitionTopics(summaries=summaries, runs=runs, models=models)


def export_wordcloud(summaries: Sequence[TopicSummary], path: str | Path) -> None:
    """Write the slice's cloud as a JSON array of {word, weight}, heaviest first."""
    if not summaries:
        raise PartitionError("cannot export an empty summary list")
    entries = [
        {"word": word, "weight": weight}
        for summary in summaries
        for word, weight in summary.words
    ]
    entries.sort(key=lambda e: (-e["weight"], e["word"]))
    Path(path).write_text(
        json.dumps(entries, ensure_ascii=False, indent=1) + "\n", encoding="utf-8"
    )
