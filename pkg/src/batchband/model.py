"""Trained model bundle: forest, optional band graph, and the ingest state
   (normalization statistics, nominal encoders, category names) needed to
   bring new files into the training coordinate system."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .bands import (
    DEFAULT_EPSILON,
    BandGraph,
    BandSplit,
    band_classify,
    build_graph,
    split_by_bands,
)
from .core import DEFAULT_MAX_ITERS, DEFAULT_TOL
from .dataset import ColumnStats, IngestOptions, LabeledTable, apply_stats, parse_delimited
from .errors import IngestError
from .evaluation import EvalReport, evaluate
from .forest import BranchLimits, Forest, Prediction, predict, train_forest


@dataclass(frozen=True)
class Provenance:
    source: str
    rows: int
    columns: int


@dataclass(frozen=True)
class TrainSettings:
    scheme: str = "centred"
    bands_enabled: bool = False
    residual_training: bool = True
    epsilon: float = DEFAULT_EPSILON
    max_iters: int = DEFAULT_MAX_ITERS
    tol: float = DEFAULT_TOL
    limits: BranchLimits = BranchLimits()


@dataclass
class Model:
    forest: Forest
    graph: BandGraph | None
    stats: tuple[ColumnStats, ...]
    encoders: tuple[dict[str, int] | None, ...]
    categories: tuple[str, ...]
    scheme: str
    provenance: Provenance

    def predict_row(self, row: np.ndarray) -> Prediction:
        if self.graph is not None:
            p = band_classify(self.graph, row)
            if p is not None:
                return p
        return predict(self.forest, row)

    def evaluate(self, table: LabeledTable) -> EvalReport:
        return evaluate(self.forest, table, self.graph)

    def load_test_table(self, path, options: IngestOptions = IngestOptions()) -> LabeledTable:
        raw = parse_delimited(path, options)
        return apply_stats(raw, self.stats, self.categories, self.encoders)


def train_model(
    table: LabeledTable,
    settings: TrainSettings = TrainSettings(),
    source: str = "<memory>",
) -> tuple[Model, BandSplit | None]:
    """Full training pipeline over an already-normalized table.

    With bands enabled, rows the bands decide are removed from the
    classifier's training set (unless residual_training is off); if the
    bands decide every row, the classifier falls back to the full table so
    the model can always answer.
    """
    graph = None
    split = None
    train_table = table
    if settings.bands_enabled:
        graph = build_graph(table, settings.epsilon)
        split = split_by_bands(graph, table)
        if settings.residual_training and split.residual.size > 0:
            train_table = _subset(table, split.residual)
    forest = train_forest(
        train_table,
        settings.scheme,
        settings.limits,
        settings.max_iters,
        settings.tol,
    )
    model = Model(
        forest=forest,
        graph=graph,
        stats=table.stats,
        encoders=table.encoders,
        categories=table.category_names,
        scheme=settings.scheme,
        provenance=Provenance(source=source, rows=table.n_rows, columns=table.n_columns),
    )
    return model, split


def _subset(table: LabeledTable, indices: np.ndarray) -> LabeledTable:
    if indices.size == 0:
        raise IngestError("cannot take an empty subset of a table")
    return replace(
        table,
        features=table.features[indices],
        labels=table.labels[indices],
    )
