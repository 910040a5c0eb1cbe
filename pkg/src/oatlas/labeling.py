"""Weak-supervision sentiment labeling: labeling functions plus majority vote.

Each labeling function is a cheap, noisy view of a record that emits POS,
NEU, NEG, or abstains. An ordered ensemble of them votes on every record and
the plurality label (with a declared tie rule) becomes the record's sentiment.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

from .corpus import Record, _URL_RE, _parse_timestamp, normalize, tokenize

log = logging.getLogger(__name__)


class Sentiment(str, Enum):
    POS = "POS"
    NEU = "NEU"
    NEG = "NEG"


ABSTAIN = "ABSTAIN"

TIE_RULES = ("neutral", "priority-order")
# NEG-heavy corpora: when ties go to the pessimists, this is the order.
_PRIORITY = (Sentiment.NEG, Sentiment.NEU, Sentiment.POS)


@dataclass(frozen=True)
class Vote:
    labeler_name: str
    label: Sentiment | str  # a Sentiment or ABSTAIN


@dataclass(frozen=True)
class LabeledRecord:
    record: Record
    votes: tuple[Vote, ...]
    sentiment: Sentiment
    country: str | None = None

    def with_country(self, country: str | None) -> "LabeledRecord":
        return replace(self, country=country)


class LabelingError(Exception):
    pass


# ---------------------------------------------------------------------------
# Labeling functions
# ---------------------------------------------------------------------------

NEGATORS = frozenset({"not", "no", "never"})


def _is_negator(token: str) -> bool:
    return token in NEGATORS or token.endswith("n't")


def lexicon_label(
    tokens: list[str],
    lexicon: dict[str, float],
    neg_window: int = 2,
    tau: float = 0.0,
    name: str = "lexicon",
) -> Vote:
    """Sum polarity of matched tokens, flipping sign inside a negation window.

    total > tau -> POS, total < -tau -> NEG, |total| <= tau with at least one
    match -> NEU, no matches at all -> ABSTAIN.
    """
    if not lexicon:
        raise LabelingError("lexicon must be non-empty")
    if neg_window < 0:
        raise LabelingError("neg_window must be >= 0")
    total = 0.0
    matches = 0
    last_negator = None
    for i, tok in enumerate(tokens):
        if _is_negator(tok):
            last_negator = i
            continue
        score = lexicon.get(tok)
        if score is None:
            continue
        matches += 1
        if last_negator is not None and 0 < i - last_negator <= neg_window:
            score = -score
        total += score
    if matches == 0:
        return Vote(name, ABSTAIN)
    if total > tau:
        return Vote(name, Sentiment.POS)
    if total < -tau:
        return Vote(name, Sentiment.NEG)
    return Vote(name, Sentiment.NEU)


def hashtag_label(tokens: list[str], tag_map: dict[str, Sentiment], name: str = "hashtag") -> Vote:
    """Vote the sentiment of the first mapped tag present, else abstain."""
    for tok in tokens:
        hit = tag_map.get(tok)
        if hit is not None:
            return Vote(name, hit)
    return Vote(name, ABSTAIN)


def emoticon_label(content: str, emo_map: dict[str, Sentiment], name: str = "emoticon") -> Vote:
    """Vote from the earliest emoticon in the raw text, else abstain.

    Runs on the raw content (normalization destroys emoticons); URLs are
    removed first so "://" never reads as a frown.
    """
    text = _URL_RE.sub(" ", content)
    best_pos = None
    best_label = None
    for emo, label in emo_map.items():
        idx = text.find(emo)
        if idx >= 0 and (best_pos is None or idx < best_pos):
            best_pos = idx
            best_label = label
    if best_label is None:
        return Vote(name, ABSTAIN)
    return Vote(name, best_label)


# ---------------------------------------------------------------------------
# Labeler ensemble
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Labeler:
    """A named labeling function: (record, tokens) -> Vote."""

    name: str
    fn: object  # Callable[[Record, list[str]], Vote]

    def vote(self, record: Record, tokens: list[str]) -> Vote:
        # The registry name is authoritative on the emitted vote.
        return replace(self.fn(record, tokens), labeler_name=self.name)


def make_lexicon_labeler(lexicon: dict[str, float], neg_window: int = 2, tau: float = 0.0) -> Labeler:
    return Labeler(
        "lexicon",
        lambda rec, toks: lexicon_label(toks, lexicon, neg_window=neg_window, tau=tau),
    )


def make_hashtag_labeler(tag_map: dict[str, Sentiment]) -> Labeler:
    return Labeler("hashtag", lambda rec, toks: hashtag_label(toks, tag_map))


def make_emoticon_labeler(emo_map: dict[str, Sentiment]) -> Labeler:
    return Labeler("emoticon", lambda rec, toks: emoticon_label(rec.content, emo_map))


def load_lexicon(path: str | Path) -> dict[str, float]:
    """Parse "word<TAB>score" lines; '#' lines are comments."""
    lexicon: dict[str, float] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        word, score = line.split("\t")
        lexicon[word] = float(score)
    return lexicon


def load_tag_map(path: str | Path) -> dict[str, Sentiment]:
    """Parse "tag<TAB>POS|NEU|NEG" lines; '#' lines are comments."""
    tag_map: dict[str, Sentiment] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        tag, label = line.split("\t")
        tag_map[tag] = Sentiment(label)
    return tag_map


def default_labelers(
    lexicon_path: str | Path,
    hashtags_path: str | Path,
    emoticons_path: str | Path,
    neg_window: int = 2,
    tau: float = 0.0,
) -> list[Labeler]:
    """The shipped three-view ensemble: polarity lexicon, hashtag map, emoticons."""
    return [
        make_lexicon_labeler(load_lexicon(lexicon_path), neg_window=neg_window, tau=tau),
        make_hashtag_labeler(load_tag_map(hashtags_path)),
        make_emoticon_labeler(load_tag_map(emoticons_path)),
    ]


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------


def majority_vote(votes: list[Vote], tie_rule: str = "neutral") -> Sentiment:
    """Plurality over non-abstaining votes; all-abstain falls back to NEU.

    Ties resolve to NEU under "neutral", or by NEG > NEU > POS under
    "priority-order".
    """
    if not votes:
        raise LabelingError("votes must be non-empty")
    if tie_rule not in TIE_RULES:
        raise LabelingError(f"unknown tie rule {tie_rule!r}")
    counts = Counter(v.label for v in votes if v.label != ABSTAIN)
    if not counts:
        return Sentiment.NEU
    top = max(counts.values())
    leaders = [s for s, c in counts.items() if c == top]
    if len(leaders) == 1:
        return leaders[0]
    if tie_rule == "neutral":
        return Sentiment.NEU
    for s in _PRIORITY:
        if s in leaders:
            return s
    raise AssertionError("unreachable")


@dataclass
class LabelReport:
    labeler_failures: Counter = field(default_factory=Counter)

    @property
    def failure_count(self) -> int:
        return sum(self.labeler_failures.values())


def label_corpus(
    records: list[Record],
    labelers: list[Labeler],
    tie_rule: str = "neutral",
    stopwords: frozenset[str] = frozenset(),
    min_len: int = 2,
    report: LabelReport | None = None,
) -> list[LabeledRecord]:
    """Run every labeler on every record and aggregate by majority vote.

    A labeler that raises on a record abstains for that record; the failure
    is tallied on the report.
    """
    if not labelers:
        raise LabelingError("at least one labeler must be registered")
    out: list[LabeledRecord] = []
    for rec in records:
        tokens = tokenize(normalize(rec.content), stopwords, min_len=min_len)
        votes = []
        for labeler in labelers:
            try:
                votes.append(labeler.vote(rec, tokens))
            except Exception as exc:
                if report is not None:
                    report.labeler_failures[labeler.name] += 1
                log.warning("labeler %s failed on record %s: %s", labeler.name, rec.id, exc)
                votes.append(Vote(labeler.name, ABSTAIN))
        sentiment = majority_vote(votes, tie_rule=tie_rule)
        out.append(LabeledRecord(record=rec, votes=tuple(votes), sentiment=sentiment))
    return out


def distribution(labeled: list[LabeledRecord]) -> dict[Sentiment, float]:
    """Fractions per sentiment class; they sum to 1 up to float rounding."""
    if not labeled:
        raise LabelingError("cannot compute a distribution of zero records")
    counts = Counter(lr.sentiment for lr in labeled)
    total = len(labeled)
    return {s: counts.get(s, 0) / total for s in Sentiment}


def format_distribution(fractions: dict[Sentiment, float]) -> str:
    """Two-decimal percentage report, POS/NEU/NEG order."""
    return "  ".join(f"{s.value} {100 * fractions[s]:.2f}%" for s in Sentiment)


# ---------------------------------------------------------------------------
# Labeled-corpus JSONL
# ---------------------------------------------------------------------------


def _labeled_to_row(lr: LabeledRecord) -> dict:
    rec = lr.record
    return {
        "id": rec.id,
        "date": rec.timestamp.isoformat().replace("+00:00", "Z"),
        "location": rec.location,
        "content": rec.content,
        "user_id": rec.user_id,
        "sentiment": lr.sentiment.value,
        "votes": [
            {
                "labeler": v.labeler_name,
                "label": v.label.value if isinstance(v.label, Sentiment) else v.label,
            }
            for v in lr.votes
        ],
        "country": lr.country,
    }


def write_labeled_jsonl(labeled: list[LabeledRecord], path: str | Path) -> None:
    """Input JSONL schema plus sentiment, votes, and (nullable) country."""
    lines = [json.dumps(_labeled_to_row(lr), ensure_ascii=False, sort_keys=True) for lr in labeled]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def read_labeled_jsonl(path: str | Path) -> list[LabeledRecord]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        row = json.loads(line)
        record = Record(
            id=row["id"],
            timestamp=_parse_timestamp(row["date"]),
            content=row["content"],
            location=row.get("location"),
            user_id=row.get("user_id"),
        )
        votes = tuple(
            Vote(v["labeler"], v["label"] if v["label"] == ABSTAIN else Sentiment(v["label"]))
            for v in row.get("votes", [])
        )
        out.append(
            LabeledRecord(
                record=record,
                votes=votes,
                sentiment=Sentiment(row["sentiment"]),
                country=row.get("country"),
            )
        )
    return out
