"""Pipeline orchestration: ingest | label | geocode | topics | timeseries | snapshot | serve.

Each stage reads its predecessor's fixed-name artifact from the workdir and
writes its own, so every intermediate is inspectable and diffable. Every flag
has an OATLAS_* environment equivalent and may also come from a key=value
config file; explicit flags win, then environment, then file, then defaults.
"""

from __future__ import annotations

import argparse
import logging
import os
import re
import signal
import sys
from pathlib import Path

from . import corpus as corpus_mod
from . import geo as geo_mod
from . import labeling as labeling_mod
from . import partition as partition_mod
from . import resources
from . import server as server_mod
from . import snapshot as snapshot_mod
from . import timeseries as timeseries_mod
from . import topicmodel as topicmodel_mod

log = logging.getLogger(__name__)

ENV_PREFIX = "OATLAS_"
DEFAULT_KEYWORDS = "putin,biden,nato,zelensky,poland"

# workdir artifact names, one per stage output
RECORDS_FILE = "records.jsonl"
CORPUS_FILE = "corpus.bin"
LABELED_FILE = "labeled.jsonl"
GEOCODED_FILE = "geocoded.jsonl"
TOPICS_DIR = "topics"
SUMMARIES_FILE = "topics/summaries.json"
TOPICS_REPORT_FILE = "topics/report.txt"
TIMESERIES_FILE = "timeseries.csv"
PEAKS_FILE = "peaks.txt"
SNAPSHOT_FILE = "snapshot.json"

_STAGE_FOR_ARTIFACT = {
    RECORDS_FILE: "ingest",
    CORPUS_FILE: "ingest",
    LABELED_FILE: "label",
    GEOCODED_FILE: "geocode",
    SUMMARIES_FILE: "topics",
    SNAPSHOT_FILE: "snapshot",
}


class StageError(Exception):
    pass


# ---------------------------------------------------------------------------
# Option resolution: flag > environment > config file > default
# ---------------------------------------------------------------------------

_DEFAULTS = {
    "format": "jsonl",
    "workdir": "work",
    "stopwords": None,
    "lexicon": None,
    "hashtags": None,
    "emoticons": None,
    "gazetteer": None,
    "cache": None,
    "geocoder_url": None,
    "rate_limit": 5.0,
    "min_len": 2,
    "min_df": 5,
    "max_df_ratio": 0.5,
    "tie_rule": "neutral",
    "tau": 0.0,
    "neg_window": 2,
    "seed": 0,
    "k": 10,
    "partition_k": 5,
    "alpha": None,
    "beta": 0.01,
    "burn_in": 100,
    "iterations": 200,
    "topn": 15,
    "min_partition_docs": 20,
    "partition_min_df": 2,
    "partition_max_df_ratio": 0.95,
    "keywords": DEFAULT_KEYWORDS,
    "workers": 4,
    "peak_window": 7,
    "peak_factor": 1.5,
    "port": 8080,
    "host": "127.0.0.1",
    "cors_origin": None,
    "snapshot": None,
    "input": None,
}

_TYPES = {
    "rate_limit": float,
    "min_len": int,
    "min_df": int,
    "max_df_ratio": float,
    "tau": float,
    "neg_window": int,
    "seed": int,
    "k": int,
    "partition_k": int,
    "alpha": float,
    "beta": float,
    "burn_in": int,
    "iterations": int,
    "topn": int,
    "min_partition_docs": int,
    "partition_min_df": int,
    "partition_max_df_ratio": float,
    "workers": int,
    "peak_window": int,
    "peak_factor": float,
    "port": int,
}


def _read_config_file(path: str) -> dict[str, str]:
    """TOML-style key = value lines; '#' starts a comment."""
    values: dict[str, str] = {}
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise StageError(f"config {path} line {line_no}: expected key = value")
        key, value = line.split("=", 1)
        key = key.strip().replace("-", "_")
        values[key] = value.strip().strip("\"'")
    return values


class Options:
    """Resolved option bag for one invocation."""

    def __init__(self, args: argparse.Namespace):
        self._flags = {k: v for k, v in vars(args).items() if not k.startswith("_")}
        config_path = self._flags.get("config") or os.environ.get(ENV_PREFIX + "CONFIG")
        self._file = _read_config_file(config_path) if config_path else {}

    def get(self, name: str):
        flag = self._flags.get(name)
        if flag is not None:
            return flag
        env = os.environ.get(ENV_PREFIX + name.upper())
        caster = _TYPES.get(name, str)
        if env is not None and env != "":
            return caster(env)
        if name in self._file:
            return caster(self._file[name])
        return _DEFAULTS.get(name)

    # shipped-data fallbacks
    def path(self, name: str, fallback) -> Path:
        value = self.get(name)
        return Path(value) if value is not None else fallback()


def _workdir(opts: Options) -> Path:
    wd = Path(opts.get("workdir"))
    wd.mkdir(parents=True, exist_ok=True)
    return wd


def _require(workdir: Path, artifact: str) -> Path:
    path = workdir / artifact
    if not path.exists():
        stage = _STAGE_FOR_ARTIFACT.get(artifact, "a previous stage")
        raise StageError(
            f"missing {path}; run the '{stage}' stage first"
        )
    return path


def _tokenizer_parts(opts: Options):
    stopwords = corpus_mod.load_stopwords(opts.path("stopwords", resources.stopwords_path))
    min_len = opts.get("min_len")
    return stopwords, min_len


def _tokens_by_id(labeled, stopwords, min_len) -> dict[str, list[str]]:
    return {
        lr.record.id: corpus_mod.tokenize(
            corpus_mod.normalize(lr.record.content), stopwords, min_len=min_len
        )
        for lr in labeled
    }


# ---------------------------------------------------------------------------
# Stages
# ---------------------------------------------------------------------------


def stage_ingest(opts: Options) -> int:
    workdir = _workdir(opts)
    input_path = opts.get("input")
    if input_path is None:
        raise StageError("ingest requires --input (or OATLAS_INPUT)")
    result = corpus_mod.ingest(input_path, format=opts.get("format"))
    records = corpus_mod.dedup(result.records)
    removed = len(result.records) - len(records)
    stopwords, min_len = _tokenizer_parts(opts)
    docs = [
        corpus_mod.tokenize(corpus_mod.normalize(r.content), stopwords, min_len=min_len)
        for r in records
    ]
    vocab = corpus_mod.build_vocabulary(
        docs, min_df=opts.get("min_df"), max_df_ratio=opts.get("max_df_ratio")
    )
    encoded = corpus_mod.encode(docs, [r.id for r in records], vocab)
    corpus_mod.write_records_jsonl(records, workdir / RECORDS_FILE)
    corpus_mod.save_corpus(encoded.corpus, vocab, workdir / CORPUS_FILE)
    print(result.report())
    print(f"dedup removed {removed} records; {len(records)} remain")
    print(
        f"vocabulary {vocab.size} words; encoded {encoded.corpus.num_docs} docs "
        f"({len(encoded.dropped_ids)} dropped empty)"
    )
    return 0


def stage_label(opts: Options) -> int:
    workdir = _workdir(opts)
    records_path = _require(workdir, RECORDS_FILE)
    records = corpus_mod.ingest(records_path, format="jsonl").records
    labelers = labeling_mod.default_labelers(
        opts.path("lexicon", resources.lexicon_path),
        opts.path("hashtags", resources.hashtags_path),
        opts.path("emoticons", resources.emoticons_path),
        neg_window=opts.get("neg_window"),
        tau=opts.get("tau"),
    )
    stopwords, min_len = _tokenizer_parts(opts)
    report = labeling_mod.LabelReport()
    labeled = labeling_mod.label_corpus(
        records,
        labelers,
        tie_rule=opts.get("tie_rule"),
        stopwords=stopwords,
        min_len=min_len,
        report=report,
    )
    labeling_mod.write_labeled_jsonl(labeled, workdir / LABELED_FILE)
    fractions = labeling_mod.distribution(labeled)
    print(f"labeled {len(labeled)} records with {len(labelers)} labelers "
          f"({report.failure_count} labeler failures)")
    print(labeling_mod.format_distribution(fractions))
    return 0


def stage_geocode(opts: Options) -> int:
    workdir = _workdir(opts)
    labeled = labeling_mod.read_labeled_jsonl(_require(workdir, LABELED_FILE))
    gz = geo_mod.load_gazetteer(opts.path("gazetteer", resources.gazetteer_path))
    cache_path = opts.get("cache") or (workdir / "geo_cache.jsonl")
    cache = geo_mod.GeoCache(cache_path)
    client = None
    url = opts.get("geocoder_url")
    if url:
        client = geo_mod.HttpGeocoderClient(url, max_per_sec=opts.get("rate_limit"))
    report = geo_mod.GeocodeReport()
    geocoded = geo_mod.geocode_corpus(labeled, gz, cache, client=client, report=report)
    labeling_mod.write_labeled_jsonl(geocoded, workdir / GEOCODED_FILE)
    print(f"geocoded {len(geocoded)} records: {report.summary()}")
    return 0


def _lda_config(opts: Options, k: int) -> topicmodel_mod.LdaConfig:
    return topicmodel_mod.LdaConfig(
        k=k,
        alpha=opts.get("alpha"),
        beta=opts.get("beta"),
        burn_in=opts.get("burn_in"),
        iterations=opts.get("iterations"),
        seed=opts.get("seed"),
    )


def _safe_filename(key: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]", "_", key.replace("|", "__").replace("=", "-"))


def stage_topics(opts: Options) -> int:
    import json as json_mod

    workdir = _workdir(opts)
    labeled = labeling_mod.read_labeled_jsonl(_require(workdir, GEOCODED_FILE))
    stopwords, min_len = _tokenizer_parts(opts)
    tokens = _tokens_by_id(labeled, stopwords, min_len)
    keywords = [kw.strip() for kw in str(opts.get("keywords")).split(",") if kw.strip()]

    by_sentiment = partition_mod.partition_by(labeled, "sentiment")
    by_date = partition_mod.partition_by(labeled, "date")
    by_country = partition_mod.partition_by(labeled, "country")
    by_keyword = partition_mod.partition_by(labeled, "keyword", values=keywords, tokens_by_id=tokens)

    buckets: dict[str, tuple[str, ...]] = {"all": tuple(lr.record.id for lr in labeled)}
    for pset in (by_sentiment, by_date, by_country, by_keyword):
        buckets.update(pset.keyed())
    buckets.update(partition_mod.cross(by_date, by_sentiment))
    buckets.update(partition_mod.cross(by_date, by_country))

    # The whole-corpus run uses the full topic count; slices use the smaller one.
    partition_config = _lda_config(opts, opts.get("partition_k"))
    whole_config = _lda_config(opts, opts.get("k"))
    whole_bucket = {"all": buckets.pop("all")}

    result = partition_mod.topics_for_partitions(
        buckets,
        tokens,
        partition_config,
        opts.get("topn"),
        min_docs=opts.get("min_partition_docs"),
        min_df=opts.get("partition_min_df"),
        max_df_ratio=opts.get("partition_max_df_ratio"),
        max_workers=opts.get("workers"),
    )
    whole = partition_mod.topics_for_partitions(
        whole_bucket,
        tokens,
        whole_config,
        opts.get("topn"),
        min_docs=1,
        min_df=opts.get("min_df"),
        max_df_ratio=opts.get("max_df_ratio"),
        max_workers=1,
    )
    result.summaries.update(whole.summaries)
    result.models.update(whole.models)
    result.runs.extend(whole.runs)
    result.runs.sort(key=lambda r: r.key)

    topics_dir = workdir / TOPICS_DIR
    (topics_dir / "models").mkdir(parents=True, exist_ok=True)
    (topics_dir / "wordclouds").mkdir(parents=True, exist_ok=True)
    for key in sorted(result.summaries):
        safe = _safe_filename(key)
        topicmodel_mod.save_model(result.models[key], topics_dir / "models" / f"{safe}.lda")
        partition_mod.export_wordcloud(
            result.summaries[key], topics_dir / "wordclouds" / f"{safe}.json"
        )

    payload = {
        "summaries": {
            key: [{"topic": s.topic, "words": [[w, p] for w, p in s.words]} for s in summaries]
            for key, summaries in sorted(result.summaries.items())
        },
        "skipped": [
            {"key": r.key, "docs": r.doc_count, "reason": r.reason}
            for r in result.runs
            if r.status == "skipped"
        ],
    }
    (workdir / SUMMARIES_FILE).write_text(
        json_mod.dumps(payload, ensure_ascii=False, sort_keys=True, indent=1) + "\n",
        encoding="utf-8",
    )
    (workdir / TOPICS_REPORT_FILE).write_text(result.report() + "\n", encoding="utf-8")
    processed = sum(1 for r in result.runs if r.status == "processed")
    skipped = len(result.runs) - processed
    print(f"topics: {processed} partitions processed, {skipped} skipped")
    return 0


def stage_timeseries(opts: Options) -> int:
    workdir = _workdir(opts)
    labeled = labeling_mod.read_labeled_jsonl(_require(workdir, GEOCODED_FILE))
    aggregates = timeseries_mod.aggregate_daily(labeled)
    timeseries_mod.write_csv(aggregates, workdir / TIMESERIES_FILE)
    series = timeseries_mod.volume_series(labeled)
    peaks = timeseries_mod.write_peak_report(
        series,
        workdir / PEAKS_FILE,
        trailing_window=opts.get("peak_window"),
        factor=opts.get("peak_factor"),
    )
    print(f"timeseries: {len(aggregates)} aggregates, {len(peaks)} peak dates")
    return 0


def stage_snapshot(opts: Options) -> int:
    import json as json_mod

    workdir = _workdir(opts)
    labeled = labeling_mod.read_labeled_jsonl(_require(workdir, GEOCODED_FILE))
    _, vocab = corpus_mod.load_corpus(_require(workdir, CORPUS_FILE))
    summaries_payload = json_mod.loads(_require(workdir, SUMMARIES_FILE).read_text("utf-8"))
    topics = {
        key: [
            partition_mod.TopicSummary(
                topic=s["topic"], words=tuple((w, p) for w, p in s["words"])
            )
            for s in summaries
        ]
        for key, summaries in summaries_payload["summaries"].items()
    }
    snap = snapshot_mod.build_snapshot(
        labeled, vocab.size, topics, skipped=summaries_payload.get("skipped", [])
    )
    snapshot_mod.save_snapshot(snap, workdir / SNAPSHOT_FILE)
    print(
        f"snapshot: {snap.records} records, {snap.date_min}..{snap.date_max}, "
        f"{len(snap.topics)} topic partitions, {len(snap.countries)} countries"
    )
    return 0


def stage_serve(opts: Options) -> int:
    workdir = Path(opts.get("workdir"))
    snap_path = opts.get("snapshot") or (workdir / SNAPSHOT_FILE)
    snap_path = Path(snap_path)
    if not snap_path.exists():
        raise StageError(f"missing {snap_path}; run the 'snapshot' stage first")
    snap = snapshot_mod.load_snapshot(snap_path)
    httpd = server_mod.make_server(
        snap,
        port=opts.get("port"),
        host=opts.get("host"),
        cors_origin=opts.get("cors_origin"),
    )
    if hasattr(signal, "SIGHUP"):
        signal.signal(signal.SIGHUP, lambda *_: httpd.reload_snapshot(snap_path))
    host, port = httpd.server_address[:2]
    print(f"serving snapshot {snap_path} on http://{host}:{port} (SIGHUP reloads)")
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        httpd.server_close()
    return 0


_STAGES = {
    "ingest": stage_ingest,
    "label": stage_label,
    "geocode": stage_geocode,
    "topics": stage_topics,
    "timeseries": stage_timeseries,
    "snapshot": stage_snapshot,
    "serve": stage_serve,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oatlas",
        description="Label, geocode, topic-model, and serve a short-text corpus.",
    )
    parser.add_argument("--verbose", action="store_true", help="log at INFO level")
    sub = parser.add_subparsers(dest="stage", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--workdir", help="artifact directory (default: work)")
    common.add_argument("--config", help="key=value config file")
    common.add_argument("--seed", type=int, help="global RNG seed")
    common.add_argument("--stopwords", help="stopword file path")
    common.add_argument("--min-len", dest="min_len", type=int, help="minimum token length")

    p = sub.add_parser("ingest", parents=[common], help="read, dedup, and encode the corpus")
    p.add_argument("--input", help="input JSONL/CSV file")
    p.add_argument("--format", choices=["jsonl", "csv"], help="input format (default jsonl)")
    p.add_argument("--min-df", dest="min_df", type=int, help="vocabulary min doc frequency")
    p.add_argument("--max-df-ratio", dest="max_df_ratio", type=float,
                   help="vocabulary max doc-frequency ratio")

    p = sub.add_parser("label", parents=[common], help="vote sentiments onto records")
    p.add_argument("--lexicon", help="word<TAB>score lexicon file")
    p.add_argument("--hashtags", help="tag<TAB>sentiment file")
    p.add_argument("--emoticons", help="emoticon<TAB>sentiment file")
    p.add_argument("--tie-rule", dest="tie_rule", choices=list(labeling_mod.TIE_RULES),
                   help="majority-vote tie rule")
    p.add_argument("--tau", type=float, help="lexicon polarity threshold")
    p.add_argument("--neg-window", dest="neg_window", type=int, help="negation window")

    p = sub.add_parser("geocode", parents=[common], help="resolve locations to countries")
    p.add_argument("--gazetteer", help="key<TAB>CC gazetteer file")
    p.add_argument("--cache", help="geo cache JSONL path")
    p.add_argument("--geocoder-url", dest="geocoder_url", help="remote geocoder endpoint")
    p.add_argument("--rate-limit", dest="rate_limit", type=float,
                   help="remote lookups per second")

    p = sub.add_parser("topics", parents=[common], help="train per-partition topic models")
    p.add_argument("--k", type=int, help="topic count for the whole corpus")
    p.add_argument("--partition-k", dest="partition_k", type=int, help="topic count per slice")
    p.add_argument("--alpha", type=float, help="doc-topic prior (default 50/K)")
    p.add_argument("--beta", type=float, help="topic-word prior")
    p.add_argument("--burn-in", dest="burn_in", type=int, help="burn-in sweeps")
    p.add_argument("--iterations", type=int, help="post-burn-in sweeps")
    p.add_argument("--topn", type=int, help="top words per topic")
    p.add_argument("--min-partition-docs", dest="min_partition_docs", type=int,
                   help="skip slices smaller than this")
    p.add_argument("--partition-min-df", dest="partition_min_df", type=int)
    p.add_argument("--partition-max-df-ratio", dest="partition_max_df_ratio", type=float)
    p.add_argument("--min-df", dest="min_df", type=int, help="whole-corpus vocab min df")
    p.add_argument("--max-df-ratio", dest="max_df_ratio", type=float)
    p.add_argument("--keywords", help="comma-separated keyword slice tokens")
    p.add_argument("--workers", type=int, help="concurrent partition chains")

    p = sub.add_parser("timeseries", parents=[common], help="daily aggregates and peaks")
    p.add_argument("--peak-window", dest="peak_window", type=int, help="trailing mean window")
    p.add_argument("--peak-factor", dest="peak_factor", type=float, help="peak ratio threshold")

    p = sub.add_parser("snapshot", parents=[common], help="bundle artifacts for the server")

    p = sub.add_parser("serve", parents=[common], help="serve the snapshot over HTTP")
    p.add_argument("--snapshot", help="snapshot file (default workdir/snapshot.json)")
    p.add_argument("--port", type=int, help="listen port (default 8080)")
    p.add_argument("--host", help="bind address (default 127.0.0.1)")
    p.add_argument("--cors-origin", dest="cors_origin", help="Access-Control-Allow-Origin value")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    opts = Options(args)
    try:
        return _STAGES[args.stage](opts)
    except (
        StageError,
        corpus_mod.CorpusError,
        labeling_mod.LabelingError,
        geo_mod.GeoError,
        partition_mod.PartitionError,
        snapshot_mod.SnapshotError,
        OSError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
