"""Corpus ingestion, cleanup, tokenization, and the indexed document-term store.

Everything downstream (labeling, topic models, aggregates) consumes the types
built here. All types are immutable after construction and safe to share
across threads; every builder is deterministic for identical input.
"""

from __future__ import annotations

import csv
import io
import json
import re
import struct
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from pathlib import Path


class CorpusError(Exception):
    """Fatal corpus-level failure (unreadable input, empty vocabulary, ...)."""


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Record:
    """One raw tweet-shaped document."""

    id: str
    timestamp: datetime
    content: str
    location: str | None = None
    user_id: str | None = None

    @property
    def date(self) -> date:
        return self.timestamp.date()


@dataclass
class IngestResult:
    records: list[Record]
    skipped: list[tuple[int, str]] = field(default_factory=list)

    @property
    def skip_count(self) -> int:
        return len(self.skipped)

    def report(self) -> str:
        lines = [f"ingested {len(self.records)} records, skipped {self.skip_count}"]
        for line_no, reason in self.skipped:
            lines.append(f"  line {line_no}: {reason}")
        return "\n".join(lines)


def _parse_timestamp(raw: str) -> datetime:
    # ISO-8601; bare dates parse to midnight. Python 3.10 fromisoformat
    # rejects a trailing "Z", so map it to an explicit UTC offset.
    ts = datetime.fromisoformat(raw.strip().replace("Z", "+00:00"))
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def _row_to_record(row: dict, line_no: int) -> Record:
    rec_id = str(row.get("id") or "").strip()
    if not rec_id:
        raise ValueError("missing id")
    raw_date = row.get("date")
    if raw_date is None or str(raw_date).strip() == "":
        raise ValueError("missing date")
    try:
        ts = _parse_timestamp(str(raw_date))
    except ValueError:
        raise ValueError(f"unparsable date {raw_date!r}") from None
    content = str(row.get("content") or "")
    if not content.strip():
        raise ValueError("empty content")
    location = row.get("location")
    location = str(location) if location not in (None, "") else None
    user_id = row.get("user_id")
    user_id = str(user_id) if user_id not in (None, "") else None
    return Record(id=rec_id, timestamp=ts, content=content, location=location, user_id=user_id)


def ingest(path: str | Path, format: str = "jsonl") -> IngestResult:
    """Read records from a JSONL or CSV file.

    Invalid rows (bad JSON, unparsable date, empty content, missing id) are
    skipped and tallied; an unreadable file or unknown format is fatal.
    """
    path = Path(path)
    if format not in ("jsonl", "csv"):
        raise CorpusError(f"unknown input format {format!r} (expected jsonl or csv)")
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read input file {path}: {exc}") from exc

    records: list[Record] = []
    skipped: list[tuple[int, str]] = []

    if format == "jsonl":
        for line_no, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
                if not isinstance(row, dict):
                    raise ValueError("row is not an object")
                records.append(_row_to_record(row, line_no))
            except ValueError as exc:
                skipped.append((line_no, str(exc)))
    else:
        reader = csv.DictReader(io.StringIO(text))
        for line_no, row in enumerate(reader, start=2):  # header is line 1
            try:
                records.append(_row_to_record(row, line_no))
            except ValueError as exc:
                skipped.append((line_no, str(exc)))

    return IngestResult(records=records, skipped=skipped)


def write_records_jsonl(records: list[Record], path: str | Path) -> None:
    """Persist records in the input JSONL schema."""
    lines = []
    for rec in records:
        row = {
            "id": rec.id,
            "date": rec.timestamp.isoformat().replace("+00:00", "Z"),
            "location": rec.location,
            "content": rec.content,
            "user_id": rec.user_id,
        }
        lines.append(json.dumps(row, ensure_ascii=False, sort_keys=True))
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def dedup(records: list[Record]) -> list[Record]:
    """Drop repeated (user_id, normalized content) posts, keeping the earliest.

    Earliest means smallest timestamp, ties broken by file order. Records
    without a user_id are never removed.
    """
    best: dict[tuple[str, str], tuple[datetime, int]] = {}
    for idx, rec in enumerate(records):
        if rec.user_id is None:
            continue
        key = (rec.user_id, normalize(rec.content))
        cand = (rec.timestamp, idx)
        if key not in best or cand < best[key]:
            best[key] = cand
    keep_idx = {idx for _, idx in best.values()}
    return [
        rec
        for idx, rec in enumerate(records)
        if rec.user_id is None or idx in keep_idx
    ]


# ---------------------------------------------------------------------------
# Text normalization and tokenization
# ---------------------------------------------------------------------------

MENTION_TOKEN = "<user>"

_URL_RE = re.compile(r"(?:https?://|www\.)\S+")
_MENTION_RE = re.compile(r"@\w+")
_HASHTAG_RE = re.compile(r"#(\w+)")
_JUNK_RE = re.compile(r"[^a-z0-9<>']+")
# An apostrophe survives only between two alphanumerics ("don't", "putin's").
_LONE_APOSTROPHE_RE = re.compile(r"(?<![a-z0-9])'|'(?![a-z0-9])")


def normalize(content: str) -> str:
    """Lowercase tweet text and squash it to plain word material.

    URLs are removed, @mentions collapse to the sentinel token "<user>",
    hashtags keep their inner text, and everything that is not alphanumeric,
    a sentinel bracket, or an intra-word apostrophe becomes a space.
    Idempotent on its own output.
    """
    s = content.lower()
    s = _URL_RE.sub(" ", s)
    s = _MENTION_RE.sub(f" {MENTION_TOKEN} ", s)
    s = _HASHTAG_RE.sub(r"\1", s)
    s = _JUNK_RE.sub(" ", s)
    s = _LONE_APOSTROPHE_RE.sub(" ", s)
    return " ".join(s.split())


def tokenize(normalized: str, stopwords: set[str] | frozenset[str], min_len: int = 2) -> list[str]:
    """Whitespace-split normalized text, dropping stopwords and short tokens."""
    return [
        tok
        for tok in normalized.split()
        if len(tok) >= min_len and tok not in stopwords
    ]


def load_stopwords(path: str | Path) -> frozenset[str]:
    """Load the one-word-per-line stopword file; '#' lines are comments."""
    words = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        word = line.strip()
        if word and not word.startswith("#"):
            words.add(word)
    return frozenset(words)


# ---------------------------------------------------------------------------
# Vocabulary and encoded corpus
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Vocabulary:
    """Bijection word <-> id, ids 0..V-1 in (doc_freq desc, word asc) order."""

    word_to_id: dict[str, int]
    id_to_word: tuple[str, ...]
    doc_freq: dict[str, int]

    @property
    def size(self) -> int:
        return len(self.id_to_word)

    def __contains__(self, word: str) -> bool:
        return word in self.word_to_id


def build_vocabulary(docs: list[list[str]], min_df: int = 5, max_df_ratio: float = 0.5) -> Vocabulary:
    """Count document frequencies and keep words with min_df <= df <= max_df_ratio*D.

    Id assignment is deterministic: descending doc_freq, ties broken by the
    word's lexicographic order.
    """
    if min_df < 1:
        raise ValueError(f"min_df must be >= 1, got {min_df}")
    if not (0 < max_df_ratio <= 1):
        raise ValueError(f"max_df_ratio must be in (0, 1], got {max_df_ratio}")
    df: dict[str, int] = {}
    for doc in docs:
        for word in set(doc):
            df[word] = df.get(word, 0) + 1
    limit = max_df_ratio * len(docs)
    kept = {w: c for w, c in df.items() if min_df <= c <= limit}
    if not kept:
        raise CorpusError(
            f"empty vocabulary: no word satisfies min_df={min_df}, "
            f"max_df_ratio={max_df_ratio} over {len(docs)} docs"
        )
    ordered = sorted(kept, key=lambda w: (-kept[w], w))
    word_to_id = {w: i for i, w in enumerate(ordered)}
    return Vocabulary(word_to_id=word_to_id, id_to_word=tuple(ordered), doc_freq=kept)


@dataclass(frozen=True)
class DocTermCorpus:
    """Documents as token-id sequences, parallel to their record ids."""

    docs: tuple[tuple[int, ...], ...]
    doc_ids: tuple[str, ...]
    vocab_size: int

    @property
    def num_docs(self) -> int:
        return len(self.docs)

    @property
    def num_tokens(self) -> int:
        return sum(len(d) for d in self.docs)


@dataclass
class EncodeResult:
    corpus: DocTermCorpus
    dropped_ids: list[str] = field(default_factory=list)


def encode(docs: list[list[str]], doc_ids: list[str], vocab: Vocabulary) -> EncodeResult:
    """Map tokenized docs to id sequences, dropping OOV tokens and empty docs."""
    if len(docs) != len(doc_ids):
        raise ValueError("docs and doc_ids must be parallel")
    out_docs: list[tuple[int, ...]] = []
    out_ids: list[str] = []
    dropped: list[str] = []
    w2i = vocab.word_to_id
    for doc, doc_id in zip(docs, doc_ids):
        encoded = tuple(w2i[t] for t in doc if t in w2i)
        if encoded:
            out_docs.append(encoded)
            out_ids.append(doc_id)
        else:
            dropped.append(doc_id)
    if not out_docs:
        raise CorpusError("all documents empty after out-of-vocabulary filtering")
    corpus = DocTermCorpus(docs=tuple(out_docs), doc_ids=tuple(out_ids), vocab_size=vocab.size)
    return EncodeResult(corpus=corpus, dropped_ids=dropped)


def decode(corpus: DocTermCorpus, vocab: Vocabulary) -> list[list[str]]:
    """Inverse of encode for retained docs (OOV tokens stay gone)."""
    return [[vocab.id_to_word[i] for i in doc] for doc in corpus.docs]


# ---------------------------------------------------------------------------
# Corpus file (magic OATL1)
# ---------------------------------------------------------------------------

_MAGIC = b"OATL1"


def save_corpus(corpus: DocTermCorpus, vocab: Vocabulary, path: str | Path) -> None:
    """Write the versioned binary corpus file: header, vocab table, id arrays."""
    buf = io.BytesIO()
    buf.write(_MAGIC)
    buf.write(struct.pack("<III", 0, vocab.size, corpus.num_docs))  # flags, V, D
    for word in vocab.id_to_word:
        raw = word.encode("utf-8")
        buf.write(struct.pack("<HI", len(raw), vocab.doc_freq[word]))
        buf.write(raw)
    for doc_id, doc in zip(corpus.doc_ids, corpus.docs):
        raw = doc_id.encode("utf-8")
        buf.write(struct.pack("<HI", len(raw), len(doc)))
        buf.write(raw)
        buf.write(struct.pack(f"<{len(doc)}I", *doc))
    Path(path).write_bytes(buf.getvalue())


def load_corpus(path: str | Path) -> tuple[DocTermCorpus, Vocabulary]:
    data = Path(path).read_bytes()
    if data[: len(_MAGIC)] != _MAGIC:
        raise CorpusError(f"{path}: not a corpus file (bad magic)")
    off = len(_MAGIC)
    _flags, v, d = struct.unpack_from("<III", data, off)
    off += 12
    words: list[str] = []
    doc_freq: dict[str, int] = {}
    for _ in range(v):
        wlen, freq = struct.unpack_from("<HI", data, off)
        off += 6
        word = data[off : off + wlen].decode("utf-8")
        off += wlen
        words.append(word)
        doc_freq[word] = freq
    docs: list[tuple[int, ...]] = []
    doc_ids: list[str] = []
    for _ in range(d):
        ilen, n = struct.unpack_from("<HI", data, off)
        off += 6
        doc_ids.append(data[off : off + ilen].decode("utf-8"))
        off += ilen
        docs.append(struct.unpack_from(f"<{n}I", data, off))
        off += 4 * n
    vocab = Vocabulary(
        word_to_id={w: i for i, w in enumerate(words)},
        id_to_word=tuple(words),
        doc_freq=doc_freq,
    )
    corpus = DocTermCorpus(docs=tuple(docs), doc_ids=tuple(doc_ids), vocab_size=v)
    return corpus, vocab
