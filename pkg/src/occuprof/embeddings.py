"""Skip-gram word embeddings trained with negative sampling.

Center vectors live in `input_vectors` (the exported table), context
vectors in `output_vectors`.  A (center, context) pair is scored against
`negatives` noise words drawn from the unigram^0.75 distribution; the
per-pair loss is

    -log sigmoid(v . u_ctx) - sum_k log sigmoid(-v . u_k)

and both sides are updated by one exact gradient step.
"""

import math
import threading
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.special import expit

from .corpus import TokenizedDocument, Vocabulary

NOISE_EXPONENT = 0.75
NOISE_TABLE_SIZE = 1_000_000

# fixed stream ids so init and the training loop draw from distinct generators
_INIT_STREAM = 0
_TRAIN_STREAM = 1


@dataclass
class TrainConfig:
    dim: int = 200
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    lr_start: float = 0.025
    lr_min: float = 2.5e-6
    subsample_t: float = 1e-3
    seed: int = 1

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.negatives < 1:
            raise ValueError("negatives must be >= 1")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if not 0 < self.lr_min <= self.lr_start:
            raise ValueError("require 0 < lr_min <= lr_start")
        if self.subsample_t < 0:
            raise ValueError("subsample_t must be >= 0")


class EmbeddingMatrix:
    """Word vectors for a vocabulary; rows are addressed by vocabulary ordinal."""

    def __init__(
        self,
        vocab: Vocabulary,
        input_vectors: np.ndarray,
        output_vectors: np.ndarray | None = None,
    ):
        input_vectors = np.asarray(input_vectors, dtype=np.float64)
        if input_vectors.shape[0] != len(vocab):
            raise ValueError("row count does not match vocabulary size")
        self.vocab = vocab
        self.input_vectors = input_vectors
        self.output_vectors = output_vectors

    @property
    def dim(self) -> int:
        return self.input_vectors.shape[1]

    def __len__(self) -> int:
        return self.input_vectors.shape[0]

    def vector(self, term: str) -> np.ndarray:
        if term not in self.vocab:
            raise ValueError(f"out of vocabulary: {term!r}")
        return self.input_vectors[self.vocab.ordinal(term)]


def _stream_rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed & (2**64 - 1), stream]))


def init_matrices(vocab: Vocabulary, cfg: TrainConfig) -> EmbeddingMatrix:
    """Seeded uniform init in [-0.5/dim, 0.5/dim) for input rows, zeros for output."""
    if len(vocab) == 0:
        raise ValueError("empty vocabulary")
    rng = _stream_rng(cfg.seed, _INIT_STREAM)
    inp = (rng.random((len(vocab), cfg.dim)) - 0.5) / cfg.dim
    out = np.zeros((len(vocab), cfg.dim))
    return EmbeddingMatrix(vocab, inp, out)


def _log_sigmoid(x: np.ndarray | float) -> np.ndarray | float:
    # log sigmoid(x) = -log(1 + exp(-x)), stable for large |x|
    return -np.logaddexp(0.0, -np.asarray(x))


def sgns_loss(center: int, context: int, noise: Sequence[int], m: EmbeddingMatrix) -> float:
    """Loss of one (center, context) pair against the given noise ordinals."""
    v = m.input_vectors[center]
    s_pos = float(v @ m.output_vectors[context])
    loss = -float(_log_sigmoid(s_pos))
    if len(noise):
        s_neg = m.output_vectors[np.asarray(noise, dtype=np.intp)] @ v
        loss -= float(np.sum(_log_sigmoid(-s_neg)))
    return loss


def sgns_step(
    center: int,
    context: int,
    noise: Sequence[int],
    lr: float,
    m: EmbeddingMatrix,
) -> float:
    """Apply one gradient step in place and return the loss before the update.

    Gradients are computed from the pre-update state; repeated output rows
    (a noise draw equal to the context, or duplicated noise) accumulate
    their contributions, so the applied step matches the analytic gradient
    of the loss exactly.
    """
    if lr <= 0:
        raise ValueError("lr must be > 0")
    rows = np.empty(1 + len(noise), dtype=np.intp)
    rows[0] = context
    rows[1:] = noise
    v = m.input_vectors[center]
    u = m.output_vectors[rows]  # gathered copies: pre-update values
    s = u @ v
    loss = -float(_log_sigmoid(s[0])) - float(np.sum(_log_sigmoid(-s[1:])))
    g = -expit(s) * lr
    g[0] += lr  # positive pair has label 1
    np.add.at(m.output_vectors, rows, g[:, None] * v)
    m.input_vectors[center] += g @ u
    return loss


def sample_context(
    position: int,
    sentence: Sequence[int],
    window: int,
    rng: np.random.Generator,
) -> list[tuple[int, int]]:
    """Emit (center, context) pairs for one position under a dynamic window.

    A width b is drawn uniformly from [1, window], so distant offsets are
    sampled less often than adjacent ones.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    b = int(rng.integers(1, window + 1))
    center = sentence[position]
    lo = max(0, position - b)
    hi = min(len(sentence), position + b + 1)
    return [(center, sentence[j]) for j in range(lo, hi) if j != position]


def subsample_keep(
    term_frequency: int,
    total_tokens: int,
    t: float,
    rng: np.random.Generator,
) -> bool:
    """Keep a frequent-word occurrence with probability min(1, sqrt(t/f) + t/f)."""
    if not 1 <= term_frequency <= total_tokens:
        raise ValueError("require total_tokens >= term_frequency >= 1")
    f = term_frequency / total_tokens
    p = math.sqrt(t / f) + t / f
    return bool(rng.random() < p)


class NoiseTable:
    """Unigram^0.75 sampling table; slot counts are proportional to freq^0.75."""

    def __init__(self, entries: np.ndarray):
        if entries.size == 0:
            raise ValueError("empty noise table")
        self.entries = entries

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.entries[rng.integers(0, self.entries.size, size)]


def build_noise_table(vocab: Vocabulary, table_size: int = NOISE_TABLE_SIZE) -> NoiseTable:
    if len(vocab) == 0:
        raise ValueError("empty vocabulary")
    freqs = np.array([f for _, f in vocab.terms], dtype=np.float64)
    weights = freqs**NOISE_EXPONENT
    bounds = np.floor(np.cumsum(weights) / weights.sum() * table_size).astype(np.int64)
    counts = np.diff(bounds, prepend=0)
    return NoiseTable(np.repeat(np.arange(len(vocab), dtype=np.int64), counts))


def _keep_probabilities(vocab: Vocabulary, t: float) -> np.ndarray:
    freqs = np.array([f for _, f in vocab.terms], dtype=np.float64)
    rel = freqs / freqs.sum()
    return np.minimum(1.0, np.sqrt(t / rel) + t / rel)


def _encode(corpus: Iterable[TokenizedDocument], vocab: Vocabulary) -> list[np.ndarray]:
    index = vocab.index
    docs = []
    for doc in corpus:
        ords = [index[t] for t in doc.tokens if t in index]
        docs.append(np.asarray(ords, dtype=np.int64))
    return docs


def _train_shard(
    docs: list[np.ndarray],
    m: EmbeddingMatrix,
    cfg: TrainConfig,
    table: NoiseTable,
    keep_p: np.ndarray | None,
    rng: np.random.Generator,
) -> None:
    """Run `cfg.epochs` passes over `docs`, decaying the learning rate linearly."""
    scheduled = cfg.epochs * sum(d.size for d in docs)
    lr_span = cfg.lr_start - cfg.lr_min
    entries = table.entries
    table_size = entries.size
    negatives = cfg.negatives
    processed = 0
    for _ in range(cfg.epochs):
        for doc in docs:
            n = doc.size
            if n == 0:
                continue
            if keep_p is None:
                kept_idx = np.arange(n)
                sent = doc
            else:
                kept_idx = np.flatnonzero(rng.random(n) < keep_p[doc])
                sent = doc[kept_idx]
            for pos in range(sent.size):
                # lr follows the token's position in the full scheduled stream
                frac = (processed + kept_idx[pos]) / scheduled
                lr = max(cfg.lr_min, cfg.lr_start - lr_span * frac)
                for center, context in sample_context(pos, sent, cfg.window, rng):
                    cand = entries[rng.integers(0, table_size, negatives)]
                    noise = cand[cand != context]
                    sgns_step(center, context, noise, lr, m)
            processed += n


def train(
    corpus: Iterable[TokenizedDocument],
    vocab: Vocabulary,
    cfg: TrainConfig,
    workers: int = 1,
) -> EmbeddingMatrix:
    """Train skip-gram vectors over `corpus` (documents are the sentence unit).

    Single-worker runs are bit-reproducible for a fixed seed.  With more
    workers, document shards update the shared matrices concurrently
    without locking; only result quality is guaranteed in that mode.
    A `subsample_t` of 0 disables frequent-word subsampling.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    docs = [d for d in _encode(corpus, vocab) if d.size]
    if not docs:
        raise ValueError("no trainable tokens")
    m = init_matrices(vocab, cfg)
    if cfg.epochs == 0:
        return m
    table = build_noise_table(vocab)
    keep_p = _keep_probabilities(vocab, cfg.subsample_t) if cfg.subsample_t > 0 else None
    if workers == 1:
        _train_shard(docs, m, cfg, table, keep_p, _stream_rng(cfg.seed, _TRAIN_STREAM))
    else:
        shards = [docs[w::workers] for w in range(workers)]
        threads = [
            threading.Thread(
                target=_train_shard,
                args=(shard, m, cfg, table, keep_p, _stream_rng(cfg.seed, _TRAIN_STREAM + w)),
            )
            for w, shard in enumerate(shards)
            if shard
        ]
        for th in threads:
            th.start()
        for th in threads:
            th.join()
    if not np.all(np.isfinite(m.input_vectors)):
        raise ArithmeticError("training produced non-finite input vectors")
    return m


def _cosine_to_rows(target: np.ndarray, rows: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(rows, axis=1) * np.linalg.norm(target)
    sims = np.zeros(rows.shape[0])
    nonzero = norms > 0
    sims[nonzero] = (rows[nonzero] @ target) / norms[nonzero]
    return sims


def _rank(
    target: np.ndarray, m: EmbeddingMatrix, exclude: set[int], k: int
) -> list[tuple[str, float]]:
    sims = _cosine_to_rows(target, m.input_vectors)
    order = np.argsort(-sims, kind="stable")  # ties resolve to the lower ordinal
    out = []
    for i in order:
        if int(i) in exclude:
            continue
        out.append((m.vocab.term(int(i)), float(sims[i])))
        if len(out) == k:
            break
    return out


def nearest(term: str, m: EmbeddingMatrix, k: int) -> list[tuple[str, float]]:
    """The k terms whose input vectors are most cosine-similar to `term`'s."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if term not in m.vocab:
        raise ValueError(f"out of vocabulary: {term!r}")
    i = m.vocab.ordinal(term)
    return _rank(m.input_vectors[i], m, {i}, k)


def analogy(a: str, b: str, c: str, m: EmbeddingMatrix, k: int) -> list[tuple[str, float]]:
    """Rank terms by cosine to vector(b) - vector(a) + vector(c), excluding a, b, c."""
    if k < 1:
        raise ValueError("k must be >= 1")
    for term in (a, b, c):
        if term not in m.vocab:
            raise ValueError(f"out of vocabulary: {term!r}")
    ia, ib, ic = (m.vocab.ordinal(t) for t in (a, b, c))
    target = m.input_vectors[ib] - m.input_vectors[ia] + m.input_vectors[ic]
    return _rank(target, m, {ia, ib, ic}, k)


def save_embeddings(m: EmbeddingMatrix, path: str) -> None:
    """Write the input vectors in word2vec text format: header, then one term per line."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(m)} {m.dim}\n")
        for i in range(len(m)):
            values = " ".join(repr(float(x)) for x in m.input_vectors[i])
            fh.write(f"{m.vocab.term(i)} {values}\n")


def load_embeddings(path: str) -> EmbeddingMatrix:
    """Read a word2vec text file.  Frequencies are not stored in the format,
    so the reconstructed vocabulary keeps file order and unit counts."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: malformed header")
        count, dim = int(header[0]), int(header[1])
        terms: list[tuple[str, int]] = []
        matrix = np.empty((count, dim))
        for i in range(count):
            parts = fh.readline().split()
            if len(parts) != dim + 1:
                raise ValueError(f"{path}: line {i + 2}: expected term and {dim} values")
            terms.append((parts[0], 1))
            matrix[i] = [float(x) for x in parts[1:]]
    return EmbeddingMatrix(Vocabulary(terms), matrix)
