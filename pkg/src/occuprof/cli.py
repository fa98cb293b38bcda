"""Command-line pipeline: pretrain, featurize, train, evaluate, match,
analogy, nearest.

Settings resolve as flag > config file > default.  Every random draw in a
run descends from the single --seed through per-component derivation, so a
fixed seed reproduces output files byte for byte in single-worker mode.
Exit codes: 0 success, 2 usage or input errors, 1 anything else.
"""

import argparse
import sys

import numpy as np

from . import classify, config, corpus, docrep, embeddings, evaluation, linker, report


def _add_config_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value settings file")


def _add_seed_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, help=f"global seed (default {config.DEFAULT_SEED})")


def _file_values(args) -> dict[str, str]:
    return config.parse_config_file(args.config) if getattr(args, "config", None) else {}


def _resolved(args, values: dict[str, str], key: str, default, convert):
    return config.resolve(getattr(args, key, None), values.get(key), default, convert)


def _seed_of(args, values) -> int:
    return _resolved(args, values, "seed", config.DEFAULT_SEED, int)


def _train_config(args, values, seed: int) -> embeddings.TrainConfig:
    return embeddings.TrainConfig(
        dim=_resolved(args, values, "dim", 200, int),
        window=_resolved(args, values, "window", 5, int),
        negatives=_resolved(args, values, "negatives", 5, int),
        epochs=_resolved(args, values, "epochs", 5, int),
        lr_start=_resolved(args, values, "lr_start", 0.025, float),
        lr_min=_resolved(args, values, "lr_min", 2.5e-6, float),
        subsample_t=_resolved(args, values, "subsample_t", 1e-3, float),
        seed=config.derive_seed(seed, "embeddings"),
    )


def _rf_params(args, values) -> classify.RandomForestParams:
    return classify.RandomForestParams(
        n_trees=_resolved(args, values, "n_trees", 100, int),
        max_depth=_resolved(args, values, "max_depth", None, int),
        min_leaf=_resolved(args, values, "min_leaf", 1, int),
    )


def cmd_pretrain(args) -> int:
    values = _file_values(args)
    seed = _seed_of(args, values)
    cfg = _train_config(args, values, seed)
    min_count = _resolved(args, values, "min_count", config.DEFAULT_MIN_COUNT, int)
    workers = _resolved(args, values, "workers", 1, int)
    docs = list(corpus.read_documents(args.input))
    vocab = corpus.build_vocabulary(docs, min_count=min_count)
    matrix = embeddings.train(docs, vocab, cfg, workers=workers)
    embeddings.save_embeddings(matrix, args.output)
    if args.vocab_out:
        corpus.save_vocabulary(vocab, args.vocab_out)
    print(f"trained {len(vocab)} terms at dim {cfg.dim} -> {args.output}")
    return 0


def _load_embeddings_for(args) -> embeddings.EmbeddingMatrix:
    if not args.embeddings:
        raise ValueError("this action needs --embeddings")
    return embeddings.load_embeddings(args.embeddings)


def cmd_featurize(args) -> int:
    values = _file_values(args)
    seed = _seed_of(args, values)
    kind = docrep.FeatureKind(args.kind)
    docs = list(corpus.read_documents(args.input))
    if kind is docrep.FeatureKind.BOW_BINARY:
        bow_k = _resolved(args, values, "bow_k", config.DEFAULT_BOW_K, int)
        features = corpus.top_k_terms(corpus.build_vocabulary(docs, min_count=1), bow_k)
        if args.vocab_out:
            corpus.save_vocabulary(features, args.vocab_out)
        fvs = docrep.featurize_corpus(docs, kind, bow_features=features)
    elif kind is docrep.FeatureKind.EMB_MEAN:
        fvs = docrep.featurize_corpus(docs, kind, embedding=_load_embeddings_for(args))
    else:
        matrix = _load_embeddings_for(args)
        if args.codebook:
            codebook = docrep.load_codebook(args.codebook)
        else:
            cluster_k = _resolved(args, values, "cluster_k", config.DEFAULT_CLUSTER_K, int)
            codebook = docrep.kmeans_fit(
                matrix.input_vectors, cluster_k, seed=config.derive_seed(seed, "codebook")
            )
        if args.codebook_out:
            docrep.save_codebook(codebook, args.codebook_out)
        fvs = docrep.featurize_corpus(docs, kind, embedding=matrix, codebook=codebook)
    docrep.save_features(fvs, args.output)
    print(f"wrote {len(fvs)} {kind.value} rows -> {args.output}")
    return 0


def _labeled_features(fvs: list) -> list:
    if not fvs:
        raise ValueError("empty feature file")
    kinds = {fv.kind for fv in fvs}
    if len(kinds) > 1:
        raise ValueError("mixed feature kinds in one file")
    dims = {fv.dim for fv in fvs}
    if len(dims) > 1:
        raise ValueError("inconsistent feature dimensions")
    for fv in fvs:
        if fv.label is None:
            raise ValueError(f"unlabeled document: {fv.user_id!r}")
    return fvs


def cmd_train(args) -> int:
    values = _file_values(args)
    seed = _seed_of(args, values)
    fvs = _labeled_features(docrep.load_features(args.features))
    y = [fv.label for fv in fvs]
    kind = fvs[0].kind
    if args.classifier == "bernoulli_nb":
        if kind is not docrep.FeatureKind.BOW_BINARY:
            raise ValueError("bernoulli_nb requires bow features")
        alpha = _resolved(args, values, "alpha", 1.0, float)
        model = classify.bnb_train([fv.indices for fv in fvs], y, dim=fvs[0].dim, alpha=alpha)
    else:
        if kind is docrep.FeatureKind.BOW_BINARY:
            raise ValueError(f"{args.classifier} requires dense features")
        X = np.stack([fv.values for fv in fvs])
        if args.classifier == "gaussian_nb":
            model = classify.gnb_train(X, y)
        else:
            model = classify.rf_train(
                X, y, params=_rf_params(args, values), seed=config.derive_seed(seed, "forest")
            )
    classify.save_model(model, args.model)
    print(f"trained {args.classifier} on {len(fvs)} documents -> {args.model}")
    return 0


def cmd_evaluate(args) -> int:
    values = _file_values(args)
    seed = _seed_of(args, values)
    docs = list(corpus.read_documents(args.labeled))
    matrix = _load_embeddings_for(args)
    split_spec = evaluation.SplitSpec(
        train_fraction=_resolved(
            args, values, "train_fraction", config.DEFAULT_TRAIN_FRACTION, float
        ),
        seed=config.derive_seed(seed, "split"),
    )
    result = evaluation.run_comparison(
        docs,
        split_spec,
        matrix,
        bow_k=_resolved(args, values, "bow_k", config.DEFAULT_BOW_K, int),
        cluster_k=_resolved(args, values, "cluster_k", config.DEFAULT_CLUSTER_K, int),
        alpha=_resolved(args, values, "alpha", 1.0, float),
        rf_params=_rf_params(args, values),
        folds=args.folds,
    )
    paths = report.write_report_files(result, args.report_dir)
    sys.stdout.write(report.render_text_report(result))
    print(f"report files in {args.report_dir}: " + ", ".join(sorted(paths.values())))
    return 0


def cmd_match(args) -> int:
    values = _file_values(args)
    threshold = _resolved(args, values, "threshold", config.DEFAULT_THRESHOLD, float)
    pros = linker.read_profiles(args.professionals, linker.Source.PROFESSIONAL)
    socials = linker.read_profiles(args.socials, linker.Source.SOCIAL)
    candidates = linker.read_candidates(args.candidates)
    results = linker.match_profiles(pros, socials, candidates, threshold=threshold)
    linker.write_matches(results, args.output)
    accepted = sum(r.accepted for r in results)
    print(f"scored {len(results)} pairs, accepted {accepted} -> {args.output}")
    return 0


def cmd_analogy(args) -> int:
    matrix = _load_embeddings_for(args)
    for term, score in embeddings.analogy(args.a, args.b, args.c, matrix, args.k):
        print(f"{term}\t{score:.6f}")
    return 0


def cmd_nearest(args) -> int:
    matrix = _load_embeddings_for(args)
    for term, score in embeddings.nearest(args.term, matrix, args.k):
        print(f"{term}\t{score:.6f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="occuprof",
        description="Job-category profiling of social-media timelines.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pretrain", help="train word vectors on a timeline dump")
    p.add_argument("--input", required=True, help="JSONL timeline file")
    p.add_argument("--output", required=True, help="embedding text file to write")
    p.add_argument("--vocab-out", help="also export the training vocabulary")
    for flag in ("dim", "window", "negatives", "epochs", "min-count", "workers"):
        p.add_argument(f"--{flag}", type=int, dest=flag.replace("-", "_"))
    for flag in ("lr-start", "lr-min", "subsample-t"):
        p.add_argument(f"--{flag}", type=float, dest=flag.replace("-", "_"))
    _add_seed_flag(p)
    _add_config_flag(p)
    p.set_defaults(func=cmd_pretrain)

    p = sub.add_parser("featurize", help="convert documents to feature vectors")
    p.add_argument("--input", required=True, help="JSONL timeline file")
    p.add_argument("--kind", required=True, choices=[k.value for k in docrep.FeatureKind])
    p.add_argument("--output", required=True, help="JSONL feature file to write")
    p.add_argument("--embeddings", help="embedding text file (dense kinds)")
    p.add_argument("--codebook", help="reuse a fitted codebook")
    p.add_argument("--codebook-out", help="export the fitted codebook")
    p.add_argument("--vocab-out", help="export the bow feature vocabulary")
    p.add_argument("--bow-k", type=int, dest="bow_k")
    p.add_argument("--cluster-k", type=int, dest="cluster_k")
    _add_seed_flag(p)
    _add_config_flag(p)
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("train", help="fit a classifier on a feature file")
    p.add_argument("--features", required=True, help="JSONL feature file")
    p.add_argument("--model", required=True, help="model JSON to write")
    p.add_argument(
        "--classifier", required=True, choices=list(evaluation.CLASSIFIER_NAMES)
    )
    p.add_argument("--alpha", type=float)
    p.add_argument("--n-trees", type=int, dest="n_trees")
    p.add_argument("--max-depth", type=int, dest="max_depth")
    p.add_argument("--min-leaf", type=int, dest="min_leaf")
    _add_seed_flag(p)
    _add_config_flag(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="compare the standard configurations")
    p.add_argument("--labeled", required=True, help="labeled JSONL timeline file")
    p.add_argument("--embeddings", required=True, help="embedding text file")
    p.add_argument("--report-dir", required=True, help="directory for report files")
    p.add_argument("--train-fraction", type=float, dest="train_fraction")
    p.add_argument("--folds", type=int, help="pooled k-fold instead of one split")
    p.add_argument("--bow-k", type=int, dest="bow_k")
    p.add_argument("--cluster-k", type=int, dest="cluster_k")
    p.add_argument("--alpha", type=float)
    p.add_argument("--n-trees", type=int, dest="n_trees")
    p.add_argument("--max-depth", type=int, dest="max_depth")
    p.add_argument("--min-leaf", type=int, dest="min_leaf")
    _add_seed_flag(p)
    _add_config_flag(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("match", help="link professional and social profiles")
    p.add_argument("--professionals", required=True, help="JSONL profile file")
    p.add_argument("--socials", required=True, help="JSONL profile file")
    p.add_argument("--candidates", required=True, help="JSONL candidate map")
    p.add_argument("--output", required=True, help="CSV match file to write")
    p.add_argument("--threshold", type=float)
    _add_config_flag(p)
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("analogy", help="a is to b as c is to ?")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("c")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--k", type=int, default=5)
    p.set_defaults(func=cmd_analogy)

    p = sub.add_parser("nearest", help="most similar terms")
    p.add_argument("term")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--k", type=int, default=5)
    p.set_defaults(func=cmd_nearest)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - the CLI boundary maps everything to exit 1
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
