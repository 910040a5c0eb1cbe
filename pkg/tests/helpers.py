"""Shared test utilities: independent oracles and synthetic data builders.

Everything here is deliberately written against the naive definition of each
quantity (loops and dicts), not by calling back into the package, so tests
compare two genuinely different routes to the same answer.
"""

from __future__ import annotations

from datetime import datetime, timezone

import numpy as np

from oatlas.corpus import DocTermCorpus, Record
from oatlas.labeling import LabeledRecord, Sentiment, Vote


def make_record(rec_id, day, content="hello world", location=None, user_id=None, hour=12):
    ts = datetime(day.year, day.month, day.day, hour, tzinfo=timezone.utc)
    return Record(id=rec_id, timestamp=ts, content=content, location=location, user_id=user_id)


def make_labeled(rec_id, day, sentiment, country=None, content="hello world", location=None):
    rec = make_record(rec_id, day, content=content, location=location)
    return LabeledRecord(
        record=rec,
        votes=(Vote("fixture", sentiment),),
        sentiment=sentiment,
        country=country,
    )


def recount_from_assignments(corpus: DocTermCorpus, z_flat, k: int):
    """Count matrices rebuilt token by token with plain dict/list walking."""
    v = corpus.vocab_size
    n_dk = [[0] * k for _ in range(corpus.num_docs)]
    n_kw = [[0] * v for _ in range(k)]
    n_k = [0] * k
    pos = 0
    for d, doc in enumerate(corpus.docs):
        for w in doc:
            topic = int(z_flat[pos])
            n_dk[d][topic] += 1
            n_kw[topic][w] += 1
            n_k[topic] += 1
            pos += 1
    assert pos == len(z_flat)
    return n_dk, n_kw, n_k


def random_corpus(rng: np.random.Generator, max_docs=20, max_vocab=30, max_len=12):
    """A small random DocTermCorpus where every word id below V appears."""
    v = int(rng.integers(2, max_vocab + 1))
    d = int(rng.integers(1, max_docs + 1))
    docs = []
    for _ in range(d):
        n = int(rng.integers(1, max_len + 1))
        docs.append(tuple(int(x) for x in rng.integers(0, v, size=n)))
    return DocTermCorpus(
        docs=tuple(docs),
        doc_ids=tuple(f"d{i}" for i in range(d)),
        vocab_size=v,
    )


def planted_topic_model(k: int, v: int, own_mass: float = 0.97):
    """Near-disjoint planted word distributions: topic i owns v//k words."""
    per = v // k
    phi = np.full((k, v), (1.0 - own_mass) / (v - per))
    owned = []
    for i in range(k):
        idx = np.arange(i * per, (i + 1) * per)
        phi[i, idx] = own_mass / per
        owned.append(set(int(j) for j in idx))
    phi /= phi.sum(axis=1, keepdims=True)
    return phi, owned


def sample_synthetic_corpus(
    rng: np.random.Generator,
    phi_star: np.ndarray,
    num_docs: int,
    doc_len: int,
    alpha: float = 0.1,
):
    """Generative sampler: theta ~ Dir(alpha), token topics ~ Mult(theta), words ~ Mult(phi)."""
    k, v = phi_star.shape
    docs = []
    for _ in range(num_docs):
        theta = rng.dirichlet([alpha] * k)
        topics = rng.choice(k, size=doc_len, p=theta)
        words = [int(rng.choice(v, p=phi_star[t])) for t in topics]
        docs.append(tuple(words))
    return DocTermCorpus(
        docs=tuple(docs),
        doc_ids=tuple(f"s{i}" for i in range(num_docs)),
        vocab_size=v,
    )


def greedy_topic_match(learned_top_sets, true_sets):
    """Greedy maximum-overlap assignment of learned topics to planted ones."""
    remaining = dict(enumerate(true_sets))
    pairs = []
    for li, lset in enumerate(learned_top_sets):
        best_t, best_overlap = None, -1
        for ti, tset in remaining.items():
            overlap = len(lset & tset)
            if overlap > best_overlap:
                best_t, best_overlap = ti, overlap
        pairs.append((li, best_t, best_overlap))
        del remaining[best_t]
    return pairs


def majority_oracle(labels, tie_rule):
    """Independent plurality implementation for the vote enumeration check."""
    effective = [lab for lab in labels if lab != "ABSTAIN"]
    if not effective:
        return Sentiment.NEU
    tally = {}
    for lab in effective:
        tally[lab] = tally.get(lab, 0) + 1
    best = max(tally.values())
    winners = sorted(s for s, c in tally.items() if c == best)
    if len(winners) == 1:
        return Sentiment(winners[0])
    if tie_rule == "neutral":
        return Sentiment.NEU
    for name in ("NEG", "NEU", "POS"):
        if name in winners:
            return Sentiment(name)
    raise AssertionError
