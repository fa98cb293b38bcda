import json
import logging
from collections import Counter

import numpy as np
import pytest

from occuprof.corpus import Label, TokenizedDocument, Vocabulary
from occuprof.docrep import FeatureKind
from occuprof.embeddings import EmbeddingMatrix
from occuprof.evaluation import (
    STANDARD_CONFIGS,
    EvalReport,
    EvalRow,
    Metrics,
    SplitSpec,
    metrics,
    metrics_from_counts,
    run_comparison,
    split,
)
from occuprof.report import (
    format_metrics_row,
    format_score,
    render_text_report,
    report_to_dict,
    write_report_files,
)

IT, NON = Label.IT, Label.NON_IT


def labeled_docs(n: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    it_terms = [f"it{i}" for i in range(8)]
    non_terms = [f"non{i}" for i in range(8)]
    docs = []
    for i in range(n):
        label = IT if i % 2 == 0 else NON
        own = it_terms if label is IT else non_terms
        tokens = tuple(str(t) for t in rng.choice(own, size=12))
        docs.append(TokenizedDocument(f"u{i}", tokens, label=label))
    return docs


def planted_embedding() -> EmbeddingMatrix:
    rng = np.random.default_rng(5)
    terms = sorted([f"it{i}" for i in range(8)] + [f"non{i}" for i in range(8)])
    vocab = Vocabulary([(t, 50) for t in terms])
    rows = np.empty((16, 6))
    for i, (term, _) in enumerate(vocab.terms):
        anchor = 1.0 if term.startswith("it") else -1.0
        rows[i] = np.concatenate(([anchor], rng.normal(0, 0.05, 5)))
    return EmbeddingMatrix(vocab, rows)


class TestSplit:
    def test_fraction_arithmetic(self):
        train, test = split(labeled_docs(10), SplitSpec(train_fraction=0.8, seed=1))
        assert len(train) == 8 and len(test) == 2

    def test_deterministic(self):
        docs = labeled_docs(20)
        a = split(docs, SplitSpec(seed=7))
        b = split(docs, SplitSpec(seed=7))
        assert [d.user_id for d in a[0]] == [d.user_id for d in b[0]]
        assert [d.user_id for d in a[1]] == [d.user_id for d in b[1]]

    def test_union_is_input_multiset(self):
        docs = labeled_docs(13)
        for seed in range(100):
            train, test = split(docs, SplitSpec(train_fraction=0.6, seed=seed))
            combined = Counter(d.user_id for d in train + test)
            assert combined == Counter(d.user_id for d in docs)

    def test_invalid_spec(self):
        with pytest.raises(ValueError):
            SplitSpec(train_fraction=0.0)
        with pytest.raises(ValueError):
            SplitSpec(train_fraction=1.0)

    def test_preconditions(self):
        with pytest.raises(ValueError, match="at least 2"):
            split(labeled_docs(1), SplitSpec())
        single = [TokenizedDocument("a", ("x",), IT), TokenizedDocument("b", ("y",), IT)]
        with pytest.raises(ValueError, match="both classes"):
            split(single, SplitSpec())
        unlabeled = [TokenizedDocument("a", ("x",), IT), TokenizedDocument("b", ("y",))]
        with pytest.raises(ValueError, match="unlabeled"):
            split(unlabeled, SplitSpec())

    def test_single_class_side_warns(self, caplog):
        docs = [
            TokenizedDocument("a", ("x",), IT),
            TokenizedDocument("b", ("x",), IT),
            TokenizedDocument("c", ("x",), IT),
            TokenizedDocument("d", ("x",), NON),
        ]
        with caplog.at_level(logging.WARNING, logger="occuprof.evaluation"):
            for seed in range(20):
                split(docs, SplitSpec(train_fraction=0.75, seed=seed))
        assert "single-class" in caplog.text


class TestMetrics:
    def test_perfect(self):
        m = metrics([IT, NON, IT], [IT, NON, IT])
        assert (m.precision, m.recall, m.f1) == (1.0, 1.0, 1.0)

    def test_formula_fixture(self):
        pred = [IT] * 4 + [NON] * 2
        gold = [IT, IT, IT, NON, IT, IT]
        m = metrics(pred, gold)
        assert (m.tp, m.fp, m.fn) == (3, 1, 2)
        assert m.precision == pytest.approx(0.75)
        assert m.recall == pytest.approx(0.6)
        assert m.f1 == pytest.approx(2 * 0.45 / 1.35)

    def test_zero_denominators(self):
        m = metrics([NON, NON], [NON, NON])
        assert (m.precision, m.recall, m.f1) == (0.0, 0.0, 0.0)

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            metrics([IT], [IT, NON])

    def test_swap_exchanges_fp_fn(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            pred = [IT if b else NON for b in rng.random(30) < 0.5]
            gold = [IT if b else NON for b in rng.random(30) < 0.5]
            a = metrics(pred, gold)
            b = metrics(gold, pred)
            assert (a.fp, a.fn) == (b.fn, b.fp)
            assert a.precision == b.recall and a.recall == b.precision

    def test_symmetric_confusion_equalizes(self):
        m = metrics_from_counts(tp=9, fp=4, fn=4, tn=9)
        assert m.precision == m.recall

    def test_counts_consistent_with_metrics(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            tp, fp, fn, tn = (int(v) for v in rng.integers(0, 40, 4))
            m = metrics_from_counts(tp, fp, fn, tn)
            if tp + fp:
                assert abs(m.precision - tp / (tp + fp)) <= 1e-12
            if tp + fn:
                assert abs(m.recall - tp / (tp + fn)) <= 1e-12
            if m.precision + m.recall:
                expected = 2 * m.precision * m.recall / (m.precision + m.recall)
                assert abs(m.f1 - expected) <= 1e-12


class TestRendering:
    def test_table_one_shape_counts(self):
        m = metrics_from_counts(tp=63, fp=20, fn=14, tn=100)
        assert format_metrics_row(m.precision, m.recall, m.f1) == "0.76 0.82 0.79"

    def test_half_up(self):
        assert format_score(0.785) == "0.79"
        assert format_score(0.745) == "0.75"
        assert format_score(0.5) == "0.50"
        assert format_score(1.0) == "1.00"

    def test_text_report_columns(self):
        report = EvalReport(
            rows=(
                EvalRow(FeatureKind.BOW_BINARY, "bernoulli_nb", metrics_from_counts(10, 3, 2, 9)),
                EvalRow(FeatureKind.EMB_MEAN, "random_forest", metrics_from_counts(11, 2, 1, 10)),
            ),
            n_train=80,
            n_test=24,
        )
        text = render_text_report(report)
        header = text.splitlines()[0]
        for column in ("Representation", "Classifier", "Precision", "Recall", "F1-Measure"):
            assert column in header
        assert "Bag of Words" in text
        assert "Word2Vec" in text

    def test_dict_keeps_unrounded_values(self):
        report = EvalReport(
            rows=(EvalRow(FeatureKind.BOW_BINARY, "bernoulli_nb", metrics_from_counts(1, 2, 3, 4)),),
            n_train=7,
            n_test=3,
        )
        doc = report_to_dict(report)
        row = doc["rows"][0]
        assert row["precision"] == 1 / 3
        assert row["tp"] == 1 and row["tn"] == 4


class TestRunComparison:
    def test_single_config(self):
        report = run_comparison(
            labeled_docs(40),
            SplitSpec(seed=3),
            configs=[(FeatureKind.BOW_BINARY, "bernoulli_nb")],
            bow_k=50,
        )
        assert len(report.rows) == 1
        assert report.rows[0].classifier == "bernoulli_nb"
        assert report.n_train == 32 and report.n_test == 8

    def test_standard_configs_on_planted_signal(self):
        report = run_comparison(
            labeled_docs(60),
            SplitSpec(seed=2),
            embedding=planted_embedding(),
            bow_k=50,
            cluster_k=4,
        )
        assert [r.representation for r in report.rows] == [k for k, _ in STANDARD_CONFIGS]
        for row in report.rows:
            assert row.metrics.f1 >= 0.9

    def test_deterministic(self):
        docs = labeled_docs(40)
        kwargs = dict(embedding=planted_embedding(), bow_k=30, cluster_k=3)
        a = run_comparison(docs, SplitSpec(seed=5), **kwargs)
        b = run_comparison(docs, SplitSpec(seed=5), **kwargs)
        assert a == b

    def test_dense_needs_embedding(self):
        with pytest.raises(ValueError, match="embedding"):
            run_comparison(
                labeled_docs(20),
                SplitSpec(seed=1),
                configs=[(FeatureKind.EMB_MEAN, "gaussian_nb")],
            )

    def test_fold_counts_cover_all_documents(self):
        docs = labeled_docs(30)
        report = run_comparison(
            docs,
            SplitSpec(seed=4),
            configs=[(FeatureKind.BOW_BINARY, "bernoulli_nb")],
            bow_k=40,
            folds=5,
        )
        m = report.rows[0].metrics
        assert m.tp + m.fp + m.fn + m.tn == len(docs)
        assert report.folds == 5

    def test_bad_folds(self):
        with pytest.raises(ValueError, match="folds"):
            run_comparison(
                labeled_docs(10),
                SplitSpec(seed=1),
                configs=[(FeatureKind.BOW_BINARY, "bernoulli_nb")],
                folds=1,
            )

    def test_mismatched_pairing_rejected(self):
        with pytest.raises(ValueError, match="bow"):
            run_comparison(
                labeled_docs(20),
                SplitSpec(seed=1),
                embedding=planted_embedding(),
                configs=[(FeatureKind.EMB_MEAN, "bernoulli_nb")],
            )


class TestReportFiles:
    def test_all_outputs_written(self, tmp_path):
        report = run_comparison(
            labeled_docs(40),
            SplitSpec(seed=9),
            embedding=planted_embedding(),
            bow_k=30,
            cluster_k=3,
        )
        paths = write_report_files(report, str(tmp_path / "out"))
        text = open(paths["text"], encoding="utf-8").read()
        assert "F1-Measure" in text
        doc = json.load(open(paths["json"], encoding="utf-8"))
        assert len(doc["rows"]) == 4
        for row in doc["rows"]:
            total = row["tp"] + row["fp"] + row["fn"] + row["tn"]
            assert total == doc["n_test"]
        csv_lines = open(paths["csv"], encoding="utf-8").read().splitlines()
        assert csv_lines[0].startswith("representation,classifier,tp")
        assert len(csv_lines) == 5
        with open(paths["chart"], "rb") as fh:
            assert fh.read(8) == b"\x89PNG\r\n\x1a\n"
