"""Report rendering for evaluation runs: an aligned text table, a JSON
document with raw counts and unrounded metrics, a CSV of the same rows, and
a grouped bar chart rendered to PNG."""

import csv
import json
import os
from decimal import ROUND_HALF_UP, Decimal

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .docrep import FeatureKind
from .evaluation import EvalReport

REPRESENTATION_NAMES = {
    FeatureKind.BOW_BINARY: "Bag of Words",
    FeatureKind.EMB_MEAN: "Word2Vec Mean",
    FeatureKind.CLUSTER_HIST: "Cluster Histogram",
}
CLASSIFIER_DISPLAY = {
    "bernoulli_nb": "BernoulliNB",
    "gaussian_nb": "GaussianNB",
    "random_forest": "RandomForest",
}
METRIC_COLUMNS = ("Precision", "Recall", "F1-Measure")


def format_score(x: float, places: int = 2) -> str:
    """Half-up decimal rounding of the value's shortest representation."""
    quantum = Decimal(1).scaleb(-places)
    return str(Decimal(repr(float(x))).quantize(quantum, rounding=ROUND_HALF_UP))


def format_metrics_row(precision: float, recall: float, f1: float) -> str:
    return " ".join(format_score(v) for v in (precision, recall, f1))


def render_text_report(report: EvalReport) -> str:
    """Aligned table, one row per evaluated configuration."""
    header = ["Representation", "Classifier", *METRIC_COLUMNS]
    body = []
    for row in report.rows:
        m = row.metrics
        body.append(
            [
                REPRESENTATION_NAMES.get(row.representation, row.representation.value),
                CLASSIFIER_DISPLAY.get(row.classifier, row.classifier),
                format_score(m.precision),
                format_score(m.recall),
                format_score(m.f1),
            ]
        )
    widths = [max(len(r[c]) for r in [header, *body]) for c in range(len(header))]
    lines = []
    for r in [header, *body]:
        left = [r[c].ljust(widths[c]) for c in range(2)]
        right = [r[c].rjust(widths[c]) for c in range(2, len(header))]
        lines.append("  ".join(left + right).rstrip())
    if report.folds:
        lines.append("")
        lines.append(f"pooled over {report.folds} folds, {report.n_train + report.n_test} documents")
    else:
        lines.append("")
        lines.append(f"train {report.n_train} / test {report.n_test}")
    return "\n".join(lines) + "\n"


def report_to_dict(report: EvalReport) -> dict:
    return {
        "n_train": report.n_train,
        "n_test": report.n_test,
        "folds": report.folds,
        "rows": [
            {
                "representation": row.representation.value,
                "classifier": row.classifier,
                "tp": row.metrics.tp,
                "fp": row.metrics.fp,
                "fn": row.metrics.fn,
                "tn": row.metrics.tn,
                "precision": row.metrics.precision,
                "recall": row.metrics.recall,
                "f1": row.metrics.f1,
            }
            for row in report.rows
        ],
    }


def _write_csv(report: EvalReport, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["representation", "classifier", "tp", "fp", "fn", "tn", "precision", "recall", "f1"]
        )
        for row in report.rows:
            m = row.metrics
            writer.writerow(
                [
                    row.representation.value,
                    row.classifier,
                    m.tp,
                    m.fp,
                    m.fn,
                    m.tn,
                    repr(m.precision),
                    repr(m.recall),
                    repr(m.f1),
                ]
            )


def _write_chart(report: EvalReport, path: str) -> None:
    labels = [
        f"{REPRESENTATION_NAMES.get(r.representation, r.representation.value)}\n"
        f"{CLASSIFIER_DISPLAY.get(r.classifier, r.classifier)}"
        for r in report.rows
    ]
    series = {
        "Precision": [r.metrics.precision for r in report.rows],
        "Recall": [r.metrics.recall for r in report.rows],
        "F1-Measure": [r.metrics.f1 for r in report.rows],
    }
    fig, ax = plt.subplots(figsize=(1.8 + 2.2 * len(labels), 4.5))
    width = 0.25
    for i, (name, values) in enumerate(series.items()):
        offset = (i - 1) * width
        ax.bar([x + offset for x in range(len(labels))], values, width, label=name)
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels)
    ax.set_ylim(0.0, 1.0)
    ax.set_ylabel("score")
    ax.legend(loc="lower right")
    fig.tight_layout()
    # a pinned Software field keeps repeated renders byte-identical
    fig.savefig(path, dpi=120, metadata={"Software": "occuprof"})
    plt.close(fig)


def write_report_files(report: EvalReport, out_dir: str) -> dict[str, str]:
    """Write report.txt, report.json, metrics.csv, and metrics.png; returns paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "text": os.path.join(out_dir, "report.txt"),
        "json": os.path.join(out_dir, "report.json"),
        "csv": os.path.join(out_dir, "metrics.csv"),
        "chart": os.path.join(out_dir, "metrics.png"),
    }
    with open(paths["text"], "w", encoding="utf-8") as fh:
        fh.write(render_text_report(report))
    with open(paths["json"], "w", encoding="utf-8") as fh:
        json.dump(report_to_dict(report), fh, indent=2)
        fh.write("\n")
    _write_csv(report, paths["csv"])
    _write_chart(report, paths["chart"])
    return paths
