"""Binary classifiers over document features: Bernoulli Naive Bayes for
sparse binary vectors, Gaussian Naive Bayes and Random Forest for dense ones.

Class score order is fixed as (IT, NON_IT) and every argmax tie resolves
toward IT, the positive class.
"""

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .corpus import Label

MODEL_FORMAT = "occuprof-model-v1"
CLASSES = (Label.IT, Label.NON_IT)


@dataclass
class BernoulliNBModel:
    dim: int
    alpha: float
    class_log_prior: np.ndarray  # (2,)
    log_prob_one: np.ndarray  # (2, dim): log P(x_j = 1 | class)
    log_prob_zero: np.ndarray  # (2, dim): log P(x_j = 0 | class), kept for exact round-trips


@dataclass
class GaussianNBModel:
    dim: int
    var_floor: float
    class_log_prior: np.ndarray
    means: np.ndarray  # (2, dim)
    variances: np.ndarray  # (2, dim), clamped to var_floor


@dataclass
class RandomForestParams:
    n_trees: int = 100
    max_depth: int | None = None
    min_leaf: int = 1
    features_per_split: int | None = None  # None: ceil(sqrt(dim))

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")
        if self.min_leaf < 1:
            raise ValueError("min_leaf must be >= 1")
        if self.features_per_split is not None and self.features_per_split < 1:
            raise ValueError("features_per_split must be >= 1")


@dataclass
class RandomForestModel:
    dim: int
    params: RandomForestParams
    seed: int
    trees: list  # nested {"leaf", "counts"} / {"leaf", "feature", "threshold", "left", "right"}


def _check_labels(y: Sequence[Label]) -> np.ndarray:
    codes = np.array([CLASSES.index(label) for label in y], dtype=np.int64)
    if len(set(codes.tolist())) < 2:
        raise ValueError("degenerate labels")
    return codes


def bnb_train(
    X: Sequence[Iterable[int]], y: Sequence[Label], dim: int, alpha: float = 1.0
) -> BernoulliNBModel:
    """Fit per-class Bernoulli feature rates with Laplace smoothing alpha."""
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    if len(X) != len(y):
        raise ValueError("X and y length mismatch")
    codes = _check_labels(y)
    ones = np.zeros((2, dim))
    for row, c in zip(X, codes):
        idx = np.fromiter(row, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= dim):
            raise ValueError("feature index out of range")
        ones[c, idx] += 1.0
    n_class = np.bincount(codes, minlength=2).astype(np.float64)
    log_prob_one = np.log((ones + alpha) / (n_class[:, None] + 2.0 * alpha))
    log_prob_zero = np.log((n_class[:, None] - ones + alpha) / (n_class[:, None] + 2.0 * alpha))
    return BernoulliNBModel(
        dim=dim,
        alpha=alpha,
        class_log_prior=np.log(n_class / len(y)),
        log_prob_one=log_prob_one,
        log_prob_zero=log_prob_zero,
    )


def bnb_predict(model: BernoulliNBModel, x: Iterable[int]) -> tuple[Label, np.ndarray]:
    """Full Bernoulli log-likelihood: absent features contribute their
    log P(x_j = 0) terms.  Returns (label, per-class log-posterior + const.)."""
    idx = np.fromiter(x, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= model.dim):
        raise ValueError("feature index out of range")
    scores = model.class_log_prior + model.log_prob_zero.sum(axis=1)
    if idx.size:
        scores = scores + (model.log_prob_one[:, idx] - model.log_prob_zero[:, idx]).sum(axis=1)
    label = CLASSES[0] if scores[0] >= scores[1] else CLASSES[1]
    return label, scores


def gnb_train(
    X: np.ndarray, y: Sequence[Label], var_floor: float | None = None
) -> GaussianNBModel:
    """Per-class feature means and variances (population, not sample).

    var_floor defaults to 1e-9 times the largest pooled feature variance,
    falling back to an absolute 1e-9 when every feature is constant.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be a 2-d array")
    if X.shape[0] != len(y):
        raise ValueError("X and y length mismatch")
    codes = _check_labels(y)
    if var_floor is None:
        pooled_max = float(X.var(axis=0).max())
        var_floor = 1e-9 * pooled_max if pooled_max > 0 else 1e-9
    if var_floor <= 0:
        raise ValueError("var_floor must be > 0")
    means = np.empty((2, X.shape[1]))
    variances = np.empty((2, X.shape[1]))
    for c in range(2):
        rows = X[codes == c]
        means[c] = rows.mean(axis=0)
        variances[c] = np.maximum(rows.var(axis=0), var_floor)
    n_class = np.bincount(codes, minlength=2).astype(np.float64)
    return GaussianNBModel(
        dim=X.shape[1],
        var_floor=var_floor,
        class_log_prior=np.log(n_class / len(y)),
        means=means,
        variances=variances,
    )


def gnb_predict(model: GaussianNBModel, x: np.ndarray) -> tuple[Label, np.ndarray]:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.dim,):
        raise ValueError(f"expected {model.dim} features, got {x.shape}")
    log_density = -0.5 * (
        np.log(2.0 * math.pi * model.variances) + (x - model.means) ** 2 / model.variances
    )
    scores = model.class_log_prior + log_density.sum(axis=1)
    label = CLASSES[0] if scores[0] >= scores[1] else CLASSES[1]
    return label, scores


def _gini(it_count: np.ndarray, total: np.ndarray) -> np.ndarray:
    p = it_count / total
    return 2.0 * p * (1.0 - p)


def _best_split_for_feature(xcol: np.ndarray, it_mask: np.ndarray, min_leaf: int):
    """Best Gini-gain threshold for one feature, or None.

    Candidate thresholds are the midpoints between consecutive distinct
    sorted values; ties keep the lowest threshold.
    """
    order = np.argsort(xcol, kind="stable")
    xs = xcol[order]
    it_prefix = np.cumsum(it_mask[order].astype(np.float64))
    cuts = np.flatnonzero(xs[1:] != xs[:-1])
    if cuts.size == 0:
        return None
    n = xs.size
    n_left = (cuts + 1).astype(np.float64)
    n_right = n - n_left
    valid = (n_left >= min_leaf) & (n_right >= min_leaf)
    if not valid.any():
        return None
    it_left = it_prefix[cuts]
    it_total = it_prefix[-1]
    parent = 2.0 * (it_total / n) * (1.0 - it_total / n)
    gain = (
        parent
        - (n_left / n) * _gini(it_left, n_left)
        - (n_right / n) * _gini(it_total - it_left, n_right)
    )
    gain[~valid] = -np.inf
    best = int(np.argmax(gain))
    threshold = (xs[cuts[best]] + xs[cuts[best] + 1]) / 2.0
    return float(gain[best]), float(threshold)


def _grow_tree(
    X: np.ndarray,
    codes: np.ndarray,
    depth: int,
    params: RandomForestParams,
    mtry: int,
    rng: np.random.Generator,
) -> dict:
    counts = [int(np.sum(codes == 0)), int(np.sum(codes == 1))]
    n = codes.size
    if (
        min(counts) == 0
        or (params.max_depth is not None and depth >= params.max_depth)
        or n < 2 * params.min_leaf
    ):
        return {"leaf": True, "counts": counts}
    features = rng.choice(X.shape[1], size=mtry, replace=False)
    best_gain = 0.0
    best_feature = -1
    best_threshold = 0.0
    for j in features:
        found = _best_split_for_feature(X[:, j], codes == 0, params.min_leaf)
        if found is None:
            continue
        gain, threshold = found
        if gain > best_gain:  # strict: the first feature drawn wins ties
            best_gain, best_feature, best_threshold = gain, int(j), threshold
    if best_feature < 0:
        return {"leaf": True, "counts": counts}
    mask = X[:, best_feature] <= best_threshold
    return {
        "leaf": False,
        "feature": best_feature,
        "threshold": best_threshold,
        "left": _grow_tree(X[mask], codes[mask], depth + 1, params, mtry, rng),
        "right": _grow_tree(X[~mask], codes[~mask], depth + 1, params, mtry, rng),
    }


def rf_train(
    X: np.ndarray,
    y: Sequence[Label],
    params: RandomForestParams | None = None,
    seed: int = 0,
) -> RandomForestModel:
    """Bagged Gini trees; tree t draws everything from generator (seed, t)."""
    params = params or RandomForestParams()
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be a 2-d array")
    if X.shape[0] != len(y):
        raise ValueError("X and y length mismatch")
    codes = _check_labels(y)
    n, dim = X.shape
    mtry = params.features_per_split or math.ceil(math.sqrt(dim))
    mtry = min(mtry, dim)
    trees = []
    for t in range(params.n_trees):
        rng = np.random.default_rng(np.random.SeedSequence([seed & (2**64 - 1), t]))
        boot = rng.integers(0, n, n)
        trees.append(_grow_tree(X[boot], codes[boot], 0, params, mtry, rng))
    return RandomForestModel(dim=dim, params=params, seed=seed, trees=trees)


def _tree_vote(node: dict, x: np.ndarray) -> int:
    while not node["leaf"]:
        node = node["left"] if x[node["feature"]] <= node["threshold"] else node["right"]
    counts = node["counts"]
    return 0 if counts[0] >= counts[1] else 1


def rf_predict(model: RandomForestModel, x: np.ndarray) -> tuple[Label, float]:
    """Majority vote over trees; returns (label, fraction voting for it)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.dim,):
        raise ValueError(f"expected {model.dim} features, got {x.shape}")
    votes = [_tree_vote(tree, x) for tree in model.trees]
    it_votes = votes.count(0)
    n = len(votes)
    if 2 * it_votes >= n:
        return CLASSES[0], it_votes / n
    return CLASSES[1], (n - it_votes) / n


def _floats(a: np.ndarray) -> list:
    return [float(v) for v in np.asarray(a).ravel()]


def save_model(model, path: str) -> None:
    """One versioned JSON document; floats survive the round trip exactly."""
    if isinstance(model, BernoulliNBModel):
        doc = {
            "format": MODEL_FORMAT,
            "type": "bernoulli_nb",
            "dim": model.dim,
            "alpha": model.alpha,
            "classes": [c.value for c in CLASSES],
            "class_log_prior": _floats(model.class_log_prior),
            "log_prob_one": [_floats(row) for row in model.log_prob_one],
            "log_prob_zero": [_floats(row) for row in model.log_prob_zero],
        }
    elif isinstance(model, GaussianNBModel):
        doc = {
            "format": MODEL_FORMAT,
            "type": "gaussian_nb",
            "dim": model.dim,
            "var_floor": model.var_floor,
            "classes": [c.value for c in CLASSES],
            "class_log_prior": _floats(model.class_log_prior),
            "means": [_floats(row) for row in model.means],
            "variances": [_floats(row) for row in model.variances],
        }
    elif isinstance(model, RandomForestModel):
        doc = {
            "format": MODEL_FORMAT,
            "type": "random_forest",
            "dim": model.dim,
            "seed": model.seed,
            "classes": [c.value for c in CLASSES],
            "params": {
                "n_trees": model.params.n_trees,
                "max_depth": model.params.max_depth,
                "min_leaf": model.params.min_leaf,
                "features_per_split": model.params.features_per_split,
            },
            "trees": model.trees,
        }
    else:
        raise ValueError(f"unsupported model type: {type(model).__name__}")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_model(path: str):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise ValueError(f"{path}: not a {MODEL_FORMAT} document")
    kind = doc.get("type")
    if doc.get("classes") != [c.value for c in CLASSES]:
        raise ValueError(f"{path}: unexpected class order")
    if kind == "bernoulli_nb":
        return BernoulliNBModel(
            dim=doc["dim"],
            alpha=doc["alpha"],
            class_log_prior=np.asarray(doc["class_log_prior"]),
            log_prob_one=np.asarray(doc["log_prob_one"]),
            log_prob_zero=np.asarray(doc["log_prob_zero"]),
        )
    if kind == "gaussian_nb":
        return GaussianNBModel(
            dim=doc["dim"],
            var_floor=doc["var_floor"],
            class_log_prior=np.asarray(doc["class_log_prior"]),
            means=np.asarray(doc["means"]),
            variances=np.asarray(doc["variances"]),
        )
    if kind == "random_forest":
        p = doc["params"]
        return RandomForestModel(
            dim=doc["dim"],
            params=RandomForestParams(
                n_trees=p["n_trees"],
                max_depth=p["max_depth"],
                min_leaf=p["min_leaf"],
                features_per_split=p["features_per_split"],
            ),
            seed=doc["seed"],
            trees=doc["trees"],
        )
    raise ValueError(f"{path}: unknown model type {kind!r}")
