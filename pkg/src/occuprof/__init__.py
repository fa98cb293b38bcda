"""Job-category profiling of social-media timelines.

Pipeline pieces: timeline ingestion and tokenization (corpus), skip-gram
embedding training (embeddings), document representations (docrep),
classifiers (classify), profile linkage (linker), and the evaluation
harness (evaluation, report).  `occuprof --help` lists the CLI surface.
"""

from .classify import (
    BernoulliNBModel,
    GaussianNBModel,
    RandomForestModel,
    RandomForestParams,
    bnb_predict,
    bnb_train,
    gnb_predict,
    gnb_train,
    load_model,
    rf_predict,
    rf_train,
    save_model,
)
from .corpus import (
    Label,
    RawTimeline,
    TokenizedDocument,
    Vocabulary,
    build_vocabulary,
    concat_timeline,
    read_documents,
    read_timelines,
    tokenize,
    top_k_terms,
)
from .docrep import (
    Codebook,
    FeatureKind,
    FeatureVector,
    bow_featurize,
    cluster_histogram,
    embed_mean,
    kmeans_fit,
)
from .embeddings import (
    EmbeddingMatrix,
    TrainConfig,
    analogy,
    load_embeddings,
    nearest,
    save_embeddings,
    train,
)
from .evaluation import EvalReport, EvalRow, Metrics, SplitSpec, metrics, run_comparison, split
from .linker import MatchResult, ProfileRecord, Source, jaccard, match_profiles

__version__ = "0.1.0"

__all__ = [
    "BernoulliNBModel",
    "Codebook",
    "EmbeddingMatrix",
    "EvalReport",
    "EvalRow",
    "FeatureKind",
    "FeatureVector",
    "GaussianNBModel",
    "Label",
    "MatchResult",
    "Metrics",
    "ProfileRecord",
    "RandomForestModel",
    "RandomForestParams",
    "RawTimeline",
    "Source",
    "SplitSpec",
    "TokenizedDocument",
    "TrainConfig",
    "Vocabulary",
    "analogy",
    "bnb_predict",
    "bnb_train",
    "bow_featurize",
    "build_vocabulary",
    "cluster_histogram",
    "concat_timeline",
    "embed_mean",
    "gnb_predict",
    "gnb_train",
    "jaccard",
    "kmeans_fit",
    "load_embeddings",
    "load_model",
    "match_profiles",
    "metrics",
    "nearest",
    "read_documents",
    "read_timelines",
    "rf_predict",
    "rf_train",
    "run_comparison",
    "save_embeddings",
    "save_model",
    "split",
    "tokenize",
    "top_k_terms",
    "train",
]
