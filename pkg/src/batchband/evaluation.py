"""Accuracy and average-error measurement over train or held-out tables.

Two measurements are reported per table: the mean absolute difference
between each row's winning output and its target (band-decided rows count
as zero, since a range match carries no numeric error), and the number of
rows whose predicted category equals the label.  Tied predictions are
counted even when the tie-broken answer happens to be right.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bands import BandGraph, band_classify
from .dataset import LabeledTable
from .errors import IngestError
from .forest import Forest, predict_batch


@dataclass(frozen=True)
class EvalReport:
    total: int
    correct: int
    accuracy: float
    avg_error: float
    ties: int
    by_source: dict[str, int]
    per_category: tuple[tuple[int, int], ...]  # (correct, total) per category id

    @property
    def percent_correct(self) -> float:
        return 100.0 * self.accuracy


def evaluate(
    forest: Forest, table: LabeledTable, graph: BandGraph | None = None
) -> EvalReport:
    """Score every row: bands first when present, classifier otherwise."""
    if table.n_columns != forest.n_columns:
        raise IngestError(
            f"table has {table.n_columns} columns, forest expects {forest.n_columns}"
        )
    n = table.n_rows
    predicted = np.empty(n, dtype=np.int64)
    errors = np.zeros(n, dtype=np.float64)
    tied = np.zeros(n, dtype=bool)
    from_band = np.zeros(n, dtype=bool)

    if graph is not None:
        for i in range(n):
            p = band_classify(graph, table.features[i])
            if p is not None:
                predicted[i] = p.category
                from_band[i] = True
    rest = np.flatnonzero(~from_band)
    if rest.size:
        cat, err, tie = predict_batch(forest, table.features[rest])
        predicted[rest] = cat
        errors[rest] = err
        tied[rest] = tie

    ok = predicted == table.labels
    k = table.n_categories
    per_category = tuple(
        (int(np.sum(ok & (table.labels == c))), int(np.sum(table.labels == c)))
        for c in range(k)
    )
    return EvalReport(
        total=n,
        correct=int(ok.sum()),
        accuracy=float(ok.sum()) / n,
        avg_error=float(errors.mean()),
        ties=int(tied.sum()),
        by_source={
            "band": int(from_band.sum()),
            "classifier": int(n - from_band.sum()),
        },
        per_category=per_category,
    )


def render_report_table(report: EvalReport, category_names=None) -> str:
    """Aligned text rendering with the usual benchmark columns."""
    lines = [
        f"{'average error':<22}{report.avg_error:.6g}",
        f"{'correctly classified':<22}{report.correct} from {report.total}",
        f"{'percent correct':<22}{report.percent_correct:.2f}",
        f"{'tied predictions':<22}{report.ties}",
        f"{'decided by bands':<22}{report.by_source['band']}",
        f"{'decided by classifier':<22}{report.by_source['classifier']}",
    ]
    for c, (good, total) in enumerate(report.per_category):
        name = category_names[c] if category_names else f"category {c}"
        lines.append(f"  {name:<20}{good} from {total}")
    return "\n".join(lines)


def render_report_kv(report: EvalReport, category_names=None) -> str:
    """Machine-readable key/value rendering, one metric per line."""
    lines = [
        f"total {report.total}",
        f"correct {report.correct}",
        f"accuracy {report.accuracy!r}",
        f"avg_error {report.avg_error!r}",
        f"ties {report.ties}",
        f"by_band {report.by_source['band']}",
        f"by_classifier {report.by_source['classifier']}",
    ]
    for c, (good, total) in enumerate(report.per_category):
        name = category_names[c] if category_names else str(c)
        lines.append(f"category {name} {good} {total}")
    return "\n".join(lines)
