"""Splitting, precision/recall/F1 computation, and the side-by-side
comparison of representation/classifier configurations on one shared split."""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .classify import (
    RandomForestParams,
    bnb_predict,
    bnb_train,
    gnb_predict,
    gnb_train,
    rf_predict,
    rf_train,
)
from .config import derive_seed
from .corpus import Label, TokenizedDocument, Vocabulary, build_vocabulary, top_k_terms
from .docrep import Codebook, FeatureKind, FeatureVector, featurize_corpus, kmeans_fit
from .embeddings import EmbeddingMatrix

logger = logging.getLogger(__name__)

CLASSIFIER_NAMES = ("bernoulli_nb", "gaussian_nb", "random_forest")

# the compared configurations, in report order
STANDARD_CONFIGS: tuple[tuple[FeatureKind, str], ...] = (
    (FeatureKind.BOW_BINARY, "bernoulli_nb"),
    (FeatureKind.EMB_MEAN, "gaussian_nb"),
    (FeatureKind.EMB_MEAN, "random_forest"),
    (FeatureKind.CLUSTER_HIST, "random_forest"),
)


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.8
    seed: int = 1

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must be within (0, 1)")


@dataclass(frozen=True)
class Metrics:
    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class EvalRow:
    representation: FeatureKind
    classifier: str
    metrics: Metrics


@dataclass(frozen=True)
class EvalReport:
    rows: tuple[EvalRow, ...]
    n_train: int
    n_test: int
    folds: int | None = None


def _require_labeled(docs: Sequence[TokenizedDocument]) -> None:
    for d in docs:
        if d.label is None:
            raise ValueError(f"unlabeled document: {d.user_id!r}")


def split(
    docs: Sequence[TokenizedDocument], split_spec: SplitSpec
) -> tuple[list[TokenizedDocument], list[TokenizedDocument]]:
    """Seeded shuffle; the first ceil(fraction * N) documents train."""
    docs = list(docs)
    if len(docs) < 2:
        raise ValueError("need at least 2 documents")
    _require_labeled(docs)
    if len({d.label for d in docs}) < 2:
        raise ValueError("both classes must be present")
    perm = np.random.default_rng(split_spec.seed).permutation(len(docs))
    n_train = math.ceil(split_spec.train_fraction * len(docs))
    train = [docs[i] for i in perm[:n_train]]
    test = [docs[i] for i in perm[n_train:]]
    for side, name in ((train, "train"), (test, "test")):
        if side and len({d.label for d in side}) < 2:
            logger.warning("%s side is single-class under seed %d", name, split_spec.seed)
    return train, test


def metrics_from_counts(tp: int, fp: int, fn: int, tn: int) -> Metrics:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return Metrics(tp=tp, fp=fp, fn=fn, tn=tn, precision=precision, recall=recall, f1=f1)


def metrics(
    pred: Sequence[Label], gold: Sequence[Label], positive: Label = Label.IT
) -> Metrics:
    if len(pred) != len(gold):
        raise ValueError("pred and gold length mismatch")
    if not pred:
        raise ValueError("need at least one prediction")
    tp = fp = fn = tn = 0
    for p, g in zip(pred, gold):
        if p is positive:
            if g is positive:
                tp += 1
            else:
                fp += 1
        elif g is positive:
            fn += 1
        else:
            tn += 1
    return metrics_from_counts(tp, fp, fn, tn)


def _featurize_sides(
    kind: FeatureKind,
    train_docs: Sequence[TokenizedDocument],
    test_docs: Sequence[TokenizedDocument],
    embedding: EmbeddingMatrix | None,
    codebook: Codebook | None,
    bow_k: int,
) -> tuple[list[FeatureVector], list[FeatureVector]]:
    if kind is FeatureKind.BOW_BINARY:
        # feature terms come from the training side only
        features = top_k_terms(build_vocabulary(train_docs, min_count=1), bow_k)
        return (
            featurize_corpus(train_docs, kind, bow_features=features),
            featurize_corpus(test_docs, kind, bow_features=features),
        )
    return (
        featurize_corpus(train_docs, kind, embedding=embedding, codebook=codebook),
        featurize_corpus(test_docs, kind, embedding=embedding, codebook=codebook),
    )


def _fit_and_predict(
    classifier: str,
    kind: FeatureKind,
    train_fvs: Sequence[FeatureVector],
    test_fvs: Sequence[FeatureVector],
    alpha: float,
    rf_params: RandomForestParams | None,
    rf_seed: int,
) -> list[Label]:
    y = [fv.label for fv in train_fvs]
    if classifier == "bernoulli_nb":
        if kind is not FeatureKind.BOW_BINARY:
            raise ValueError("bernoulli_nb requires bow features")
        model = bnb_train([fv.indices for fv in train_fvs], y, dim=train_fvs[0].dim, alpha=alpha)
        return [bnb_predict(model, fv.indices)[0] for fv in test_fvs]
    if kind is FeatureKind.BOW_BINARY:
        raise ValueError(f"{classifier} requires dense features")
    X_train = np.stack([fv.values for fv in train_fvs])
    X_test = [fv.values for fv in test_fvs]
    if classifier == "gaussian_nb":
        model = gnb_train(X_train, y)
        return [gnb_predict(model, x)[0] for x in X_test]
    if classifier == "random_forest":
        model = rf_train(X_train, y, params=rf_params, seed=rf_seed)
        return [rf_predict(model, x)[0] for x in X_test]
    raise ValueError(f"unknown classifier: {classifier}")


def _fold_sides(
    docs: list[TokenizedDocument], folds: int, seed: int
) -> list[tuple[list[TokenizedDocument], list[TokenizedDocument]]]:
    perm = np.random.default_rng(seed).permutation(len(docs))
    chunks = np.array_split(perm, folds)
    sides = []
    for i in range(folds):
        test_idx = set(chunks[i].tolist())
        train = [docs[j] for j in perm if j not in test_idx]
        test = [docs[int(j)] for j in chunks[i]]
        sides.append((train, test))
    return sides


def run_comparison(
    docs: Sequence[TokenizedDocument],
    split_spec: SplitSpec,
    embedding: EmbeddingMatrix | None = None,
    configs: Sequence[tuple[FeatureKind, str]] = STANDARD_CONFIGS,
    *,
    bow_k: int = 5000,
    cluster_k: int = 50,
    alpha: float = 1.0,
    rf_params: RandomForestParams | None = None,
    folds: int | None = None,
) -> EvalReport:
    """Evaluate every configuration on one shared split (or pooled folds).

    Dense configurations need a pretrained embedding; the cluster codebook
    is fitted once on its word vectors with a seed derived from the split
    seed.
    """
    docs = list(docs)
    if not configs:
        raise ValueError("no configurations to evaluate")
    dense_kinds = {k for k, _ in configs if k is not FeatureKind.BOW_BINARY}
    if dense_kinds and embedding is None:
        raise ValueError("dense configurations need an embedding")
    codebook = None
    if FeatureKind.CLUSTER_HIST in dense_kinds:
        codebook = kmeans_fit(
            embedding.input_vectors, cluster_k, seed=derive_seed(split_spec.seed, "codebook")
        )
    if folds is None:
        sides = [split(docs, split_spec)]
    else:
        if folds < 2:
            raise ValueError("folds must be >= 2")
        if folds > len(docs):
            raise ValueError("more folds than documents")
        _require_labeled(docs)
        sides = _fold_sides(docs, folds, split_spec.seed)
    rows = []
    for i, (kind, classifier) in enumerate(configs):
        tp = fp = fn = tn = 0
        for train_docs, test_docs in sides:
            train_fvs, test_fvs = _featurize_sides(
                kind, train_docs, test_docs, embedding, codebook, bow_k
            )
            pred = _fit_and_predict(
                classifier,
                kind,
                train_fvs,
                test_fvs,
                alpha,
                rf_params,
                derive_seed(split_spec.seed, f"forest:{i}"),
            )
            m = metrics(pred, [d.label for d in test_docs])
            tp, fp, fn, tn = tp + m.tp, fp + m.fp, fn + m.fn, tn + m.tn
        rows.append(EvalRow(kind, classifier, metrics_from_counts(tp, fp, fn, tn)))
    return EvalReport(
        rows=tuple(rows),
        n_train=len(sides[0][0]),
        n_test=len(sides[0][1]),
        folds=folds,
    )
