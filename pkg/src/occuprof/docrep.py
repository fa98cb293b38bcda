"""Document feature extraction: binary bag-of-words, mean word vector,
and histogram over a KMeans codebook of the embedding space."""

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .corpus import Label, TokenizedDocument, Vocabulary
from .embeddings import EmbeddingMatrix


class FeatureKind(Enum):
    BOW_BINARY = "bow"
    EMB_MEAN = "emb_mean"
    CLUSTER_HIST = "cluster_hist"


@dataclass(eq=False)
class FeatureVector:
    """One document's features.

    BOW_BINARY stores sorted presence indices in `indices`; the dense kinds
    store `values`.  `all_oov` marks a document with no in-vocabulary token,
    whose dense representation is the zero vector by convention.
    """

    kind: FeatureKind
    dim: int
    user_id: str = ""
    label: Label | None = None
    indices: tuple[int, ...] = ()
    values: np.ndarray | None = None
    all_oov: bool = False

    def dense(self) -> np.ndarray:
        if self.kind is FeatureKind.BOW_BINARY:
            out = np.zeros(self.dim)
            out[list(self.indices)] = 1.0
            return out
        return self.values


@dataclass
class Codebook:
    """KMeans centroids over word vectors, with the fit's inertia trace."""

    centroids: np.ndarray
    k: int
    inertia: float
    history: tuple[float, ...] = field(default_factory=tuple)


def bow_featurize(doc: TokenizedDocument, features: Vocabulary) -> FeatureVector:
    """Binary presence of each feature term; multiplicity and order ignored."""
    index = features.index
    hits = sorted({index[t] for t in doc.tokens if t in index})
    return FeatureVector(
        kind=FeatureKind.BOW_BINARY,
        dim=len(features),
        user_id=doc.user_id,
        label=doc.label,
        indices=tuple(hits),
    )


def embed_mean(doc: TokenizedDocument, m: EmbeddingMatrix) -> FeatureVector:
    """Mean of the word vectors of in-vocabulary tokens, occurrences counted."""
    index = m.vocab.index
    rows = [index[t] for t in doc.tokens if t in index]
    if rows:
        values = m.input_vectors[rows].mean(axis=0)
        all_oov = False
    else:
        values = np.zeros(m.dim)
        all_oov = True
    return FeatureVector(
        kind=FeatureKind.EMB_MEAN,
        dim=m.dim,
        user_id=doc.user_id,
        label=doc.label,
        values=values,
        all_oov=all_oov,
    )


def _sq_dists(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    d2 = (
        np.sum(points**2, axis=1)[:, None]
        - 2.0 * points @ centroids.T
        + np.sum(centroids**2, axis=1)[None, :]
    )
    return np.maximum(d2, 0.0)


def _kmeanspp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    centroids = np.empty((k, points.shape[1]))
    centroids[0] = points[rng.integers(n)]
    d2 = np.sum((points - centroids[0]) ** 2, axis=1)
    for i in range(1, k):
        total = d2.sum()
        if total > 0:
            # D^2 sampling: mass proportional to distance from the chosen set
            idx = int(np.searchsorted(np.cumsum(d2), rng.random() * total, side="right"))
            idx = min(idx, n - 1)
        else:
            idx = int(rng.integers(n))
        centroids[i] = points[idx]
        np.minimum(d2, np.sum((points - centroids[i]) ** 2, axis=1), out=d2)
    return centroids


def kmeans_fit(points: np.ndarray, k: int, max_iters: int = 100, seed: int = 0) -> Codebook:
    """Lloyd iteration from a k-means++ start, run to assignment fixpoint.

    An empty cluster is re-seeded to the point farthest from its assigned
    centroid.  Assignment ties go to the lowest centroid index.
    """
    points = np.asarray(points, dtype=np.float64)
    if k < 1:
        raise ValueError("k must be >= 1")
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    n = points.shape[0]
    if n < k:
        raise ValueError("fewer points than clusters")
    rng = np.random.default_rng(seed)
    centroids = _kmeanspp_init(points, k, rng)
    history: list[float] = []
    prev = None
    assign = np.zeros(n, dtype=np.int64)
    for _ in range(max_iters):
        d2 = _sq_dists(points, centroids)
        assign = d2.argmin(axis=1)
        assigned_d2 = d2[np.arange(n), assign]
        inertia = float(assigned_d2.sum())
        if history and inertia > history[-1] + 1e-9:
            raise AssertionError("inertia increased between iterations")
        history.append(inertia)
        if prev is not None and np.array_equal(assign, prev):
            break
        counts = np.bincount(assign, minlength=k).astype(np.float64)
        sums = np.zeros_like(centroids)
        np.add.at(sums, assign, points)
        nonempty = counts > 0
        centroids = centroids.copy()
        centroids[nonempty] = sums[nonempty] / counts[nonempty, None]
        spare = assigned_d2.copy()
        for c in np.flatnonzero(~nonempty):
            far = int(np.argmax(spare))
            centroids[c] = points[far]
            spare[far] = -1.0
        prev = assign
    return Codebook(centroids=centroids, k=k, inertia=history[-1], history=tuple(history))


def cluster_histogram(doc: TokenizedDocument, m: EmbeddingMatrix, cb: Codebook) -> FeatureVector:
    """Normalized distribution of the document's tokens over codebook cells."""
    index = m.vocab.index
    rows = [index[t] for t in doc.tokens if t in index]
    if rows:
        d2 = _sq_dists(m.input_vectors[rows], cb.centroids)
        assign = d2.argmin(axis=1)
        values = np.bincount(assign, minlength=cb.k).astype(np.float64) / len(rows)
        all_oov = False
    else:
        values = np.zeros(cb.k)
        all_oov = True
    return FeatureVector(
        kind=FeatureKind.CLUSTER_HIST,
        dim=cb.k,
        user_id=doc.user_id,
        label=doc.label,
        values=values,
        all_oov=all_oov,
    )


def featurize_corpus(
    docs: Iterable[TokenizedDocument],
    kind: FeatureKind,
    *,
    bow_features: Vocabulary | None = None,
    embedding: EmbeddingMatrix | None = None,
    codebook: Codebook | None = None,
) -> list[FeatureVector]:
    if kind is FeatureKind.BOW_BINARY:
        if bow_features is None:
            raise ValueError("bow featurization needs a feature vocabulary")
        return [bow_featurize(d, bow_features) for d in docs]
    if embedding is None:
        raise ValueError(f"{kind.value} featurization needs an embedding matrix")
    if kind is FeatureKind.EMB_MEAN:
        return [embed_mean(d, embedding) for d in docs]
    if codebook is None:
        raise ValueError("cluster_hist featurization needs a codebook")
    return [cluster_histogram(d, embedding, codebook) for d in docs]


def save_features(fvs: Sequence[FeatureVector], path: str) -> None:
    """JSONL export, one document per line; sparse rows for BOW, dense otherwise."""
    with open(path, "w", encoding="utf-8") as fh:
        for fv in fvs:
            row: dict = {
                "user_id": fv.user_id,
                "label": fv.label.value if fv.label is not None else None,
                "kind": fv.kind.value,
            }
            if fv.kind is FeatureKind.BOW_BINARY:
                row["sparse"] = [[int(i), 1] for i in fv.indices]
                row["dim"] = fv.dim
            else:
                row["dense"] = [float(x) for x in fv.values]
                row["all_oov"] = fv.all_oov
            fh.write(json.dumps(row) + "\n")


def load_features(path: str) -> list[FeatureVector]:
    out: list[FeatureVector] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: invalid JSON: {exc}") from None
            try:
                kind = FeatureKind(row.get("kind"))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: unknown kind {row.get('kind')!r}") from None
            raw_label = row.get("label")
            label = Label(raw_label) if raw_label is not None else None
            user_id = row.get("user_id", "")
            if kind is FeatureKind.BOW_BINARY:
                if "sparse" not in row or "dim" not in row:
                    raise ValueError(f"{path}:{lineno}: bow row needs 'sparse' and 'dim'")
                indices = tuple(int(pair[0]) for pair in row["sparse"])
                if any(i < 0 or i >= row["dim"] for i in indices):
                    raise ValueError(f"{path}:{lineno}: feature index out of range")
                out.append(
                    FeatureVector(
                        kind=kind,
                        dim=int(row["dim"]),
                        user_id=user_id,
                        label=label,
                        indices=indices,
                    )
                )
            else:
                if "dense" not in row:
                    raise ValueError(f"{path}:{lineno}: dense row needs 'dense'")
                values = np.asarray([float(x) for x in row["dense"]])
                out.append(
                    FeatureVector(
                        kind=kind,
                        dim=values.size,
                        user_id=user_id,
                        label=label,
                        values=values,
                        all_oov=bool(row.get("all_oov", False)),
                    )
                )
    return out


def save_codebook(cb: Codebook, path: str) -> None:
    """Same text layout as the embedding export, with cluster<i> as the term."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{cb.k} {cb.centroids.shape[1]}\n")
        for i in range(cb.k):
            values = " ".join(repr(float(x)) for x in cb.centroids[i])
            fh.write(f"cluster{i} {values}\n")


def load_codebook(path: str) -> Codebook:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: malformed header")
        k, dim = int(header[0]), int(header[1])
        centroids = np.empty((k, dim))
        for i in range(k):
            parts = fh.readline().split()
            if len(parts) != dim + 1:
                raise ValueError(f"{path}: line {i + 2}: expected name and {dim} values")
            centroids[i] = [float(x) for x in parts[1:]]
    # the text format does not carry the fit's inertia trace
    return Codebook(centroids=centroids, k=k, inertia=math.nan)
