"""Fixed value bands per feature column, linked across adjacent columns.

Each column's sorted training values are scanned into runs of unchanged
category; a run closes into an inclusive band at a category change unless
the boundary value is shared by both sides, in which case the runs merge
and the band carries every category involved.  Bands of adjacent columns
are linked whenever a training row occupies both.  A row whose per-column
bands form a fully linked chain with a single common category is
classified directly by the bands, with no numeric error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import LabeledTable
from .errors import IngestError, IntegrityError
from .forest import Prediction

DEFAULT_EPSILON = 1e-9


@dataclass(frozen=True)
class Band:
    """Inclusive value interval of one column and the categories inside it."""

    column: int
    low: float
    high: float
    categories: frozenset[int]


@dataclass(frozen=True)
class BandGraph:
    """Per-column band sequences plus the cross-column link relation.

    links holds triples (column j, band index in j, band index in j+1).
    """

    columns: tuple[tuple[Band, ...], ...]
    links: frozenset[tuple[int, int, int]]
    epsilon: float

    @property
    def n_columns(self) -> int:
        return len(self.columns)

    @property
    def n_bands(self) -> int:
        return sum(len(c) for c in self.columns)


def build_bands(
    table: LabeledTable, column: int, epsilon: float = DEFAULT_EPSILON
) -> tuple[Band, ...]:
    """Scan one column's sorted (value, label) pairs into bands."""
    if table.n_rows == 0:
        raise IngestError("cannot build bands for an empty table")
    values = table.features[:, column]
    order = np.argsort(values, kind="stable")
    pairs = [(float(values[i]), int(table.labels[i])) for i in order]

    runs: list[tuple[float, float, set[int]]] = []
    low, high = pairs[0][0], pairs[0][0]
    cats = {pairs[0][1]}
    prev_value, prev_label = pairs[0]
    for value, label in pairs[1:]:
        if label != prev_label and abs(value - prev_value) > epsilon:
            runs.append((low, high, cats))
            low, cats = value, {label}
        else:
            cats.add(label)
        high = value
        prev_value, prev_label = value, label
    runs.append((low, high, cats))

    # runs whose ranges touch collapse into one band
    merged: list[tuple[float, float, set[int]]] = []
    for low, high, cats in runs:
        if merged and low - merged[-1][1] <= epsilon:
            plow, phigh, pcats = merged[-1]
            merged[-1] = (plow, max(phigh, high), pcats | cats)
        else:
            merged.append((low, high, cats))
    return tuple(
        Band(column=column, low=low, high=high, categories=frozenset(cats))
        for low, high, cats in merged
    )


def build_graph(table: LabeledTable, epsilon: float = DEFAULT_EPSILON) -> BandGraph:
    """Build every column's bands and link them along each training row."""
    if table.n_rows == 0:
        raise IngestError("cannot build bands for an empty table")
    columns = tuple(
        build_bands(table, j, epsilon) for j in range(table.n_columns)
    )
    indices = np.empty((table.n_rows, table.n_columns), dtype=np.int64)
    for j, bands in enumerate(columns):
        idx = _locate(bands, table.features[:, j], epsilon)
        if np.any(idx < 0):
            raise IntegrityError(
                f"training value of column {j} falls inside no band"
            )
        indices[:, j] = idx
    links = set()
    for j in range(table.n_columns - 1):
        links.update(
            (j, int(a), int(b)) for a, b in zip(indices[:, j], indices[:, j + 1])
        )
    return BandGraph(columns=columns, links=frozenset(links), epsilon=epsilon)


def band_classify(graph: BandGraph, row: np.ndarray) -> Prediction | None:
    """Classify a row from its band path alone; None when undecidable."""
    row = np.asarray(row, dtype=np.float64)
    if row.ndim != 1 or row.shape[0] != graph.n_columns:
        raise IngestError(
            f"row has {row.shape[0] if row.ndim == 1 else row.ndim} values, "
            f"band graph expects {graph.n_columns}"
        )
    path = []
    for j, bands in enumerate(graph.columns):
        idx = int(_locate(bands, row[j : j + 1], graph.epsilon)[0])
        if idx < 0:
            return None
        path.append(idx)
    for j in range(len(path) - 1):
        if (j, path[j], path[j + 1]) not in graph.links:
            return None
    common = frozenset.intersection(
        *(graph.columns[j][idx].categories for j, idx in enumerate(path))
    )
    if len(common) != 1:
        return None
    (category,) = common
    return Prediction(
        category=category,
        error=0.0,
        tied=False,
        tie_set=frozenset((category,)),
        source="band",
    )


@dataclass(frozen=True)
class BandSplit:
    """Training rows partitioned by whether the bands decide them."""

    decided: np.ndarray  # row indices
    residual: np.ndarray  # row indices
    wrong: int  # decided rows whose band category differs from the label


def split_by_bands(graph: BandGraph, table: LabeledTable) -> BandSplit:
    """Partition a table into band-decided and residual rows."""
    decided, residual, wrong = [], [], 0
    for i in range(table.n_rows):
        p = band_classify(graph, table.features[i])
        if p is None:
            residual.append(i)
        else:
            decided.append(i)
            if p.category != int(table.labels[i]):
                wrong += 1
    return BandSplit(
        decided=np.array(decided, dtype=np.int64),
        residual=np.array(residual, dtype=np.int64),
        wrong=wrong,
    )


def render_band_report(graph: BandGraph, category_names=None, stats=None) -> str:
    """Text table of every band plus link counts between adjacent columns.

    With the training ColumnStats, bounds are also shown in the original
    units of the input file.
    """
    def cat_text(cats):
        if category_names is None:
            return ",".join(str(c) for c in sorted(cats))
        return ",".join(category_names[c] for c in sorted(cats))

    def orig(j, v):
        st = stats[j]
        return st.min + v * (st.max - st.min)

    header = f"{'column':>6}  {'band':>4}  {'low':>12}  {'high':>12}"
    if stats is not None:
        header += f"  {'file low':>12}  {'file high':>12}"
    lines = [header + "  categories"]
    for j, bands in enumerate(graph.columns):
        for i, b in enumerate(bands):
            row = f"{j:>6}  {i:>4}  {b.low:>12.6g}  {b.high:>12.6g}"
            if stats is not None:
                row += f"  {orig(j, b.low):>12.6g}  {orig(j, b.high):>12.6g}"
            lines.append(row + f"  {cat_text(b.categories)}")
    for j in range(graph.n_columns - 1):
        count = sum(1 for (c, _, _) in graph.links if c == j)
        lines.append(f"links column {j} -> {j + 1}: {count}")
    return "\n".join(lines)


def _locate(bands: tuple[Band, ...], values: np.ndarray, epsilon: float) -> np.ndarray:
    """Index of the band containing each value (inclusive within epsilon), or -1."""
    lows = np.array([b.low for b in bands])
    highs = np.array([b.high for b in bands])
    idx = np.searchsorted(lows, values + epsilon, side="right") - 1
    idx = np.clip(idx, 0, len(bands) - 1)
    inside = (values >= lows[idx] - epsilon) & (values <= highs[idx] + epsilon)
    return np.where(inside, idx, -1)
