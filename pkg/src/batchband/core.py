"""Per-category unit classifiers over batch-averaged feature values.

A unit collapses all training rows of one category into their per-column
mean, then learns additive per-column offsets that pull the aggregate
output (the arithmetic mean over columns) onto a desired target value.
Each offset picks its own sign: columns sitting below the target receive
the error, columns above give it up.  When every column starts on the
same side of the target a single correction lands exactly on it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import LabeledTable
from .errors import IngestError

DEFAULT_MAX_ITERS = 10
DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class CategoryAverage:
    """Column means of one category's rows."""

    category: int
    means: np.ndarray
    support: int


@dataclass(frozen=True)
class UnitClassifier:
    """A trained single-category classifier.

    residual is the training error left after the offset corrections:
    |mean(means + offsets) - desired|.
    """

    category: int
    means: np.ndarray
    offsets: np.ndarray
    desired: float
    residual: float


def batch_average(table: LabeledTable, category: int) -> CategoryAverage:
    """Average all rows of one category into a single prototype row."""
    rows = table.rows_of(category)
    if rows.shape[0] == 0:
        raise IngestError(f"no rows of category {category} to average")
    return CategoryAverage(
        category=category,
        means=rows.mean(axis=0),
        support=int(rows.shape[0]),
    )


def average_rows(rows: np.ndarray, category: int) -> CategoryAverage:
    """batch_average over an explicit row block (used by subset training)."""
    if rows.shape[0] == 0:
        raise IngestError(f"no rows of category {category} to average")
    return CategoryAverage(category=category, means=rows.mean(axis=0), support=int(rows.shape[0]))


def train_unit(
    avg: CategoryAverage,
    desired: float,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
) -> UnitClassifier:
    """Learn sign-selective additive offsets that drive the mean output to desired.

    Each iteration computes the shared error e = desired - mean(means + offsets)
    and moves every column by |e|, upward if the adjusted column value is at or
    below desired, downward otherwise.  Stops when |e| <= tol or after
    max_iters iterations.
    """
    means = np.asarray(avg.means, dtype=np.float64)
    offsets = np.zeros_like(means)
    for _ in range(max_iters):
        adjusted = means + offsets
        e = desired - float(np.mean(adjusted))
        if abs(e) <= tol:
            break
        below = adjusted <= desired
        offsets = np.where(below, offsets + abs(e), offsets - abs(e))
    # the error left at the final offsets, after the last correction
    residual = abs(desired - float(np.mean(means + offsets)))
    return UnitClassifier(
        category=avg.category,
        means=means,
        offsets=offsets,
        desired=float(desired),
        residual=residual,
    )


def score(unit: UnitClassifier, row: np.ndarray) -> float:
    """Absolute distance of the unit's output on this row from its target."""
    row = np.asarray(row, dtype=np.float64)
    if row.shape != unit.offsets.shape:
        raise IngestError(
            f"row has {row.shape[0] if row.ndim else 0} values, "
            f"unit expects {unit.offsets.shape[0]}"
        )
    return float(unit_scores(unit, row[np.newaxis, :])[0])


def unit_scores(unit: UnitClassifier, block: np.ndarray) -> np.ndarray:
    """score() applied to every row of a 2-D block; single code path for both."""
    return np.abs(np.mean(block + unit.offsets, axis=1) - unit.desired)
