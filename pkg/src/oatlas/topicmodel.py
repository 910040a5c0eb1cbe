"""Latent topic model trained by collapsed Gibbs sampling.

The word and topic mixtures are integrated out; each token's topic is
resampled from its full conditional

    p(z_i = k | z_-i, w) ∝ (n_dk + alpha) * (n_kw + beta) / (n_k + V*beta)

where the counts exclude token i. The inner loop runs over a flattened token
array in document-major order and is JIT-compiled with numba; the identical
function source runs under plain CPython as a fallback (OATLAS_NO_NUMBA=1),
consuming the same pregenerated uniform variates, so both paths produce
bit-identical chains for a given seed.
"""

from __future__ import annotations

import hashlib
import io
import logging
import os
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import DocTermCorpus, Vocabulary

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LdaConfig:
    """Sampler configuration; alpha defaults to the 50/K heuristic."""

    k: int
    alpha: float | None = None
    beta: float = 0.01
    burn_in: int = 100
    iterations: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.alpha is None:
            object.__setattr__(self, "alpha", 50.0 / self.k)
        if self.alpha <= 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if self.beta <= 0:
            raise ValueError(f"beta must be > 0, got {self.beta}")
        if self.burn_in < 0:
            raise ValueError(f"burn_in must be >= 0, got {self.burn_in}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")


def derive_seed(seed: int, label: str) -> int:
    """Stable 63-bit stream seed for (base seed, label) pairs."""
    digest = hashlib.sha256(f"{seed}:{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little") & 0x7FFF_FFFF_FFFF_FFFF


# ---------------------------------------------------------------------------
# Sampler kernels
# ---------------------------------------------------------------------------


def _sweep_impl(tokens, doc_of, z, n_dk, n_kw, n_k, alpha, beta, u, cum):
    n = tokens.shape[0]
    k_topics = n_dk.shape[1]
    vbeta = n_kw.shape[1] * beta
    for i in range(n):
        w = tokens[i]
        d = doc_of[i]
        k_old = z[i]
        n_dk[d, k_old] -= 1
        n_kw[k_old, w] -= 1
        n_k[k_old] -= 1
        total = 0.0
        for k in range(k_topics):
            total += (n_dk[d, k] + alpha) * (n_kw[k, w] + beta) / (n_k[k] + vbeta)
            cum[k] = total
        r = u[i] * total
        k_new = 0
        while k_new < k_topics - 1 and cum[k_new] <= r:
            k_new += 1
        z[i] = k_new
        n_dk[d, k_new] += 1
        n_kw[k_new, w] += 1
        n_k[k_new] += 1


def _foldin_impl(tokens, doc_of, z, n_dk, phi, alpha, u, cum):
    n = tokens.shape[0]
    k_topics = n_dk.shape[1]
    for i in range(n):
        w = tokens[i]
        d = doc_of[i]
        k_old = z[i]
        n_dk[d, k_old] -= 1
        total = 0.0
        for k in range(k_topics):
            total += (n_dk[d, k] + alpha) * phi[k, w]
            cum[k] = total
        r = u[i] * total
        k_new = 0
        while k_new < k_topics - 1 and cum[k_new] <= r:
            k_new += 1
        z[i] = k_new
        n_dk[d, k_new] += 1


if os.environ.get("OATLAS_NO_NUMBA"):
    _sweep = _sweep_impl
    _foldin = _foldin_impl
else:
    try:
        import numba

        _sweep = numba.njit(cache=True, nogil=True)(_sweep_impl)
        _foldin = numba.njit(cache=True, nogil=True)(_foldin_impl)
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _sweep = _sweep_impl
        _foldin = _foldin_impl


# ---------------------------------------------------------------------------
# State and training
# ---------------------------------------------------------------------------


@dataclass
class LdaState:
    """Mutable chain state: token-topic assignments plus count matrices."""

    tokens: np.ndarray  # int32, all tokens, document-major order
    doc_of: np.ndarray  # int32, owning document per token
    z: np.ndarray  # int32, current topic per token
    n_dk: np.ndarray  # int32 (D, K)
    n_kw: np.ndarray  # int32 (K, V)
    n_k: np.ndarray  # int64 (K,)
    n_d: np.ndarray  # int64 (D,)
    vocab_size: int
    rng: np.random.Generator
    _cum: np.ndarray = field(repr=False, default=None)

    @property
    def num_tokens(self) -> int:
        return int(self.tokens.shape[0])


def _flatten(corpus: DocTermCorpus) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    tokens = np.fromiter(
        (t for doc in corpus.docs for t in doc), dtype=np.int32, count=corpus.num_tokens
    )
    doc_of = np.repeat(
        np.arange(corpus.num_docs, dtype=np.int32),
        [len(doc) for doc in corpus.docs],
    ).astype(np.int32)
    n_d = np.array([len(doc) for doc in corpus.docs], dtype=np.int64)
    return tokens, doc_of, n_d


def init_state(corpus: DocTermCorpus, config: LdaConfig) -> LdaState:
    """Assign every token a uniform random topic and tally the count matrices."""
    if corpus.num_docs == 0:
        raise ValueError("corpus is empty")
    tokens, doc_of, n_d = _flatten(corpus)
    rng = np.random.default_rng(config.seed)
    z = rng.integers(0, config.k, size=tokens.shape[0], dtype=np.int32)
    n_dk = np.zeros((corpus.num_docs, config.k), dtype=np.int32)
    n_kw = np.zeros((config.k, corpus.vocab_size), dtype=np.int32)
    np.add.at(n_dk, (doc_of, z), 1)
    np.add.at(n_kw, (z, tokens), 1)
    n_k = n_kw.sum(axis=1, dtype=np.int64)
    return LdaState(
        tokens=tokens,
        doc_of=doc_of,
        z=z,
        n_dk=n_dk,
        n_kw=n_kw,
        n_k=n_k,
        n_d=n_d,
        vocab_size=corpus.vocab_size,
        rng=rng,
        _cum=np.empty(config.k, dtype=np.float64),
    )


def gibbs_sweep(state: LdaState, config: LdaConfig) -> LdaState:
    """Resample every token once, in (doc, position) order. Mutates state."""
    u = state.rng.random(state.num_tokens)
    _sweep(
        state.tokens,
        state.doc_of,
        state.z,
        state.n_dk,
        state.n_kw,
        state.n_k,
        float(config.alpha),
        float(config.beta),
        u,
        state._cum,
    )
    return state


def estimate_phi(n_kw: np.ndarray, n_k: np.ndarray, beta: float) -> np.ndarray:
    v = n_kw.shape[1]
    return (n_kw + beta) / (n_k[:, None] + v * beta)


def estimate_theta(n_dk: np.ndarray, n_d: np.ndarray, alpha: float) -> np.ndarray:
    k = n_dk.shape[1]
    return (n_dk + alpha) / (n_d[:, None] + k * alpha)


def corpus_log_likelihood(state: LdaState, config: LdaConfig) -> float:
    """Sum of per-token log p(w | theta-hat, phi-hat) under current counts."""
    phi = estimate_phi(state.n_kw, state.n_k, config.beta)
    theta = estimate_theta(state.n_dk, state.n_d, config.alpha)
    p = np.einsum("nk,kn->n", theta[state.doc_of], phi[:, state.tokens])
    return float(np.log(p).sum())


@dataclass
class LdaModel:
    """Trained model: final counts plus smoothed phi/theta estimates."""

    config: LdaConfig
    n_dk: np.ndarray
    n_kw: np.ndarray
    n_k: np.ndarray
    n_d: np.ndarray
    phi: np.ndarray
    theta: np.ndarray
    vocab: Vocabulary | None = None
    ll_history: list[float] = field(default_factory=list)
    z: np.ndarray | None = None

    @property
    def num_topics(self) -> int:
        return self.config.k

    @property
    def vocab_size(self) -> int:
        return int(self.n_kw.shape[1])

    @classmethod
    def from_counts(
        cls,
        config: LdaConfig,
        n_kw: np.ndarray,
        n_dk: np.ndarray,
        vocab: Vocabulary | None = None,
        ll_history: list[float] | None = None,
        z: np.ndarray | None = None,
    ) -> "LdaModel":
        n_kw = np.asarray(n_kw, dtype=np.int32)
        n_dk = np.asarray(n_dk, dtype=np.int32)
        n_k = n_kw.sum(axis=1, dtype=np.int64)
        n_d = n_dk.sum(axis=1, dtype=np.int64)
        return cls(
            config=config,
            n_dk=n_dk,
            n_kw=n_kw,
            n_k=n_k,
            n_d=n_d,
            phi=estimate_phi(n_kw, n_k, config.beta),
            theta=estimate_theta(n_dk, n_d, config.alpha),
            vocab=vocab,
            ll_history=list(ll_history or []),
            z=z,
        )


def train(corpus: DocTermCorpus, config: LdaConfig, vocab: Vocabulary | None = None) -> LdaModel:
    """Burn in, then sample; estimates come from the final counts.

    The corpus log-likelihood is tracked every sweep and logged every 10.
    """
    if config.k > corpus.vocab_size:
        log.warning(
            "k=%d exceeds vocabulary size %d; topics will be degenerate",
            config.k,
            corpus.vocab_size,
        )
    state = init_state(corpus, config)
    total_sweeps = config.burn_in + config.iterations
    ll_history: list[float] = []
    for sweep in range(1, total_sweeps + 1):
        gibbs_sweep(state, config)
        ll = corpus_log_likelihood(state, config)
        ll_history.append(ll)
        if sweep % 10 == 0 or sweep == total_sweeps:
            log.info("sweep %d/%d log-likelihood %.3f", sweep, total_sweeps, ll)
    return LdaModel.from_counts(
        config,
        state.n_kw,
        state.n_dk,
        vocab=vocab,
        ll_history=ll_history,
        z=state.z.copy(),
    )


# ---------------------------------------------------------------------------
# Summaries and evaluation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TopicSummary:
    topic: int
    words: tuple[tuple[str, float], ...]  # (word, probability), descending


def top_words(model: LdaModel, n: int) -> list[TopicSummary]:
    """The n most probable words per topic, ties broken by word id."""
    v = model.vocab_size
    if not (1 <= n <= v):
        raise ValueError(f"n must be in [1, {v}], got {n}")
    summaries = []
    for k in range(model.num_topics):
        row = model.phi[k]
        order = np.argsort(-row, kind="stable")[:n]
        words = tuple(
            (model.vocab.id_to_word[i] if model.vocab is not None else f"w{i}", float(row[i]))
            for i in order
        )
        summaries.append(TopicSummary(topic=k, words=words))
    return summaries


def fold_in_theta(model: LdaModel, heldout: DocTermCorpus, sweeps: int = 20) -> np.ndarray:
    """Estimate doc-topic mixtures for unseen docs, holding phi fixed.

    Runs the sampler on the held-out assignments only; deterministic given
    the model's configured seed.
    """
    _check_heldout(model, heldout)
    tokens, doc_of, n_d = _flatten(heldout)
    k = model.num_topics
    rng = np.random.default_rng([model.config.seed, derive_seed(model.config.seed, "fold-in")])
    z = rng.integers(0, k, size=tokens.shape[0], dtype=np.int32)
    n_dk = np.zeros((heldout.num_docs, k), dtype=np.int32)
    np.add.at(n_dk, (doc_of, z), 1)
    cum = np.empty(k, dtype=np.float64)
    for _ in range(sweeps):
        u = rng.random(tokens.shape[0])
        _foldin(tokens, doc_of, z, n_dk, model.phi, float(model.config.alpha), u, cum)
    return estimate_theta(n_dk, n_d, model.config.alpha)


def _check_heldout(model: LdaModel, heldout: DocTermCorpus) -> None:
    if heldout.num_docs == 0 or heldout.num_tokens == 0:
        raise ValueError("held-out corpus is empty")
    if heldout.vocab_size != model.vocab_size:
        raise ValueError(
            f"held-out corpus vocabulary size {heldout.vocab_size} "
            f"does not match the model's {model.vocab_size}"
        )


def perplexity(model: LdaModel, heldout: DocTermCorpus, foldin_sweeps: int = 20) -> float:
    """exp of negative mean per-token log-likelihood on held-out docs."""
    theta = fold_in_theta(model, heldout, sweeps=foldin_sweeps)
    tokens, doc_of, _ = _flatten(heldout)
    p = np.einsum("nk,kn->n", theta[doc_of], model.phi[:, tokens])
    return float(np.exp(-np.log(p).sum() / tokens.shape[0]))


# ---------------------------------------------------------------------------
# Model file (magic OALDA1)
# ---------------------------------------------------------------------------

_MAGIC = b"OALDA1"


def save_model(model: LdaModel, path: str | Path) -> None:
    """Versioned header plus raw count tables; phi/theta rebuild on load."""
    cfg = model.config
    k, v = model.n_kw.shape
    d = model.n_dk.shape[0]
    buf = io.BytesIO()
    buf.write(_MAGIC)
    buf.write(struct.pack("<I", 1))
    buf.write(struct.pack("<III", k, v, d))
    buf.write(struct.pack("<dd", cfg.alpha, cfg.beta))
    buf.write(struct.pack("<q", cfg.seed))
    buf.write(struct.pack("<II", cfg.burn_in, cfg.iterations))
    buf.write(np.ascontiguousarray(model.n_kw, dtype="<i4").tobytes())
    buf.write(np.ascontiguousarray(model.n_dk, dtype="<i4").tobytes())
    Path(path).write_bytes(buf.getvalue())


def load_model(path: str | Path, vocab: Vocabulary | None = None) -> LdaModel:
    data = Path(path).read_bytes()
    if data[: len(_MAGIC)] != _MAGIC:
        raise ValueError(f"{path}: not a model file (bad magic)")
    off = len(_MAGIC)
    (version,) = struct.unpack_from("<I", data, off)
    off += 4
    if version != 1:
        raise ValueError(f"{path}: unsupported model version {version}")
    k, v, d = struct.unpack_from("<III", data, off)
    off += 12
    alpha, beta = struct.unpack_from("<dd", data, off)
    off += 16
    (seed,) = struct.unpack_from("<q", data, off)
    off += 8
    burn_in, iterations = struct.unpack_from("<II", data, off)
    off += 8
    n_kw = np.frombuffer(data, dtype="<i4", count=k * v, offset=off).reshape(k, v)
    off += 4 * k * v
    n_dk = np.frombuffer(data, dtype="<i4", count=d * k, offset=off).reshape(d, k)
    config = LdaConfig(
        k=k, alpha=alpha, beta=beta, burn_in=burn_in, iterations=iterations, seed=seed
    )
    return LdaModel.from_counts(config, n_kw.copy(), n_dk.copy(), vocab=vocab)
