"""batchband: a batch-averaged branching classifier with per-column value bands.

The library trains one prototype unit per category over normalized [0, 1]
features, grows child layers wherever a unit claims rows of other
categories, and can short-circuit classification entirely through linked
per-column value bands.  See the CLI (`batchband --help`) for the command
surface and the README for the benchmark harness.
"""

from .bands import Band, BandGraph, BandSplit, band_classify, build_bands, build_graph, split_by_bands
from .core import CategoryAverage, UnitClassifier, batch_average, score, train_unit
from .dataset import (
    ColumnStats,
    IngestOptions,
    LabeledTable,
    RawTable,
    apply_stats,
    encode_and_normalize,
    load_table,
    parse_delimited,
)
from .errors import (
    BatchBandError,
    ConfigError,
    IngestError,
    IntegrityError,
    ModelFormatError,
    VersionError,
)
from .evaluation import EvalReport, evaluate
from .forest import (
    BranchLimits,
    ClassifierNode,
    Forest,
    Prediction,
    assign_desired,
    predict,
    train_forest,
)
from .model import Model, Provenance, TrainSettings, train_model
from .persist import load, save

__version__ = "0.1.0"

__all__ = [
    "Band",
    "BandGraph",
    "BandSplit",
    "BatchBandError",
    "BranchLimits",
    "CategoryAverage",
    "ClassifierNode",
    "ColumnStats",
    "ConfigError",
    "EvalReport",
    "Forest",
    "IngestError",
    "IngestOptions",
    "IntegrityError",
    "LabeledTable",
    "Model",
    "ModelFormatError",
    "Prediction",
    "Provenance",
    "RawTable",
    "TrainSettings",
    "UnitClassifier",
    "VersionError",
    "apply_stats",
    "assign_desired",
    "band_classify",
    "batch_average",
    "build_bands",
    "build_graph",
    "encode_and_normalize",
    "evaluate",
    "load",
    "load_table",
    "parse_delimited",
    "predict",
    "save",
    "score",
    "split_by_bands",
    "train_forest",
    "train_model",
    "train_unit",
]
