"""Delimited-file ingestion, label/nominal encoding and min-max normalization.

A training file is parsed into a :class:`RawTable`, then encoded and scaled
into a :class:`LabeledTable` whose feature values all lie in [0, 1].  Test
files are mapped through the statistics and encoders captured from the
training table so that both share one coordinate system.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigError, IngestError


@dataclass(frozen=True)
class IngestOptions:
    """How to read a delimited text file.

    label_column accepts an integer index (negative counts from the end)
    or a header name.  category_order, when given, pins the label ids so
    that several files agree on the encoding.
    """

    delimiter: str = ","
    header: bool = False
    label_column: int | str = -1
    category_order: tuple[str, ...] | None = None


@dataclass(frozen=True)
class ColumnStats:
    """Training min/max of one feature column."""

    min: float
    max: float

    @property
    def is_constant(self) -> bool:
        return self.min == self.max


@dataclass(frozen=True)
class RawTable:
    """Verbatim cells of a delimited file, label column identified."""

    column_names: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]
    label_column: int

    @property
    def n_feature_columns(self) -> int:
        return len(self.column_names) - 1


@dataclass(frozen=True)
class LabeledTable:
    """Normalized numeric feature matrix with dense integer labels.

    encoders holds, per feature column, the token -> ordinal code mapping
    used for nominal columns (None for columns parsed as numbers); it is
    required to bring test files into the training coordinate system.
    """

    features: np.ndarray
    labels: np.ndarray
    category_names: tuple[str, ...]
    stats: tuple[ColumnStats, ...]
    encoders: tuple[dict[str, int] | None, ...] = field(default=())

    @property
    def n_rows(self) -> int:
        return int(self.features.shape[0])

    @property
    def n_columns(self) -> int:
        return int(self.features.shape[1])

    @property
    def n_categories(self) -> int:
        return len(self.category_names)

    def rows_of(self, category: int) -> np.ndarray:
        return self.features[self.labels == category]


def parse_delimited(source, options: IngestOptions = IngestOptions()) -> RawTable:
    """Parse a delimited byte or text stream (or a path) into a RawTable.

    Cell text is preserved verbatim and row order is kept.  Fully empty
    lines are skipped.  Ragged rows raise IngestError naming the line.
    """
    text = _read_text(source)
    reader = csv.reader(io.StringIO(text), delimiter=options.delimiter)
    records: list[tuple[str, ...]] = []
    line_numbers: list[int] = []
    for lineno, cells in enumerate(reader, start=1):
        if not cells or all(c.strip() == "" for c in cells):
            continue
        records.append(tuple(c.strip() for c in cells))
        line_numbers.append(lineno)
    if not records:
        raise IngestError("input contains no data rows")

    if options.header:
        header_cells = records[0]
        records = records[1:]
        line_numbers = line_numbers[1:]
        if not records:
            raise IngestError("input contains a header but no data rows")
    else:
        header_cells = None

    width = len(records[0])
    for cells, lineno in zip(records, line_numbers):
        if len(cells) != width:
            raise IngestError(
                f"ragged row at line {lineno}: expected {width} cells, got {len(cells)}"
            )

    label_idx = _resolve_label_column(options.label_column, width, header_cells)
    if header_cells is not None:
        if len(header_cells) != width:
            raise IngestError(
                f"header has {len(header_cells)} cells but rows have {width}"
            )
        names = header_cells
    else:
        names = tuple(f"col{j}" for j in range(width))
    return RawTable(column_names=names, rows=tuple(records), label_column=label_idx)


def encode_and_normalize(
    raw: RawTable, category_order: Sequence[str] | None = None
) -> LabeledTable:
    """Encode a training RawTable and scale every feature column to [0, 1].

    Numeric cells are parsed as reals; fully non-numeric columns are
    encoded ordinally in first-appearance order.  Columns mixing the two
    kinds are rejected.  Constant columns map to 0.0.
    """
    if not raw.rows:
        raise IngestError("cannot encode an empty table")
    feature_idx = [j for j in range(len(raw.column_names)) if j != raw.label_column]

    columns: list[np.ndarray] = []
    encoders: list[dict[str, int] | None] = []
    for j in feature_idx:
        cells = [row[j] for row in raw.rows]
        values, encoder = _encode_column(cells, raw.column_names[j])
        columns.append(values)
        encoders.append(encoder)

    label_cells = [row[raw.label_column] for row in raw.rows]
    categories = _category_list(label_cells, category_order)
    category_ids = {name: i for i, name in enumerate(categories)}
    labels = np.array([category_ids[c] for c in label_cells], dtype=np.int64)

    stats = tuple(ColumnStats(float(col.min()), float(col.max())) for col in columns)
    features = np.column_stack(
        [_scale(col, st) for col, st in zip(columns, stats)]
    ) if columns else np.empty((len(raw.rows), 0))
    return LabeledTable(
        features=features,
        labels=labels,
        category_names=categories,
        stats=stats,
        encoders=tuple(encoders),
    )


def apply_stats(
    raw: RawTable,
    stats: Sequence[ColumnStats],
    categories: Sequence[str],
    encoders: Sequence[dict[str, int] | None] = (),
) -> LabeledTable:
    """Normalize a test RawTable with statistics taken from training data.

    Values falling outside the training range are clamped to [0, 1].
    Labels must already appear in the training category list.
    """
    if not raw.rows:
        raise IngestError("cannot encode an empty table")
    feature_idx = [j for j in range(len(raw.column_names)) if j != raw.label_column]
    if len(feature_idx) != len(stats):
        raise IngestError(
            f"column count mismatch: table has {len(feature_idx)} feature columns, "
            f"stats describe {len(stats)}"
        )
    if not encoders:
        encoders = tuple(None for _ in stats)

    columns = []
    for k, j in enumerate(feature_idx):
        cells = [row[j] for row in raw.rows]
        encoder = encoders[k]
        if encoder is not None:
            values = np.array(
                [_lookup_nominal(encoder, c, raw.column_names[j]) for c in cells],
                dtype=np.float64,
            )
        else:
            values = _parse_numeric(cells, raw.column_names[j])
        scaled = np.clip(_scale(values, stats[k]), 0.0, 1.0)
        columns.append(scaled)

    category_ids = {name: i for i, name in enumerate(categories)}
    labels = []
    for row in raw.rows:
        cell = row[raw.label_column]
        if cell not in category_ids:
            raise IngestError(f"label {cell!r} does not occur in the training data")
        labels.append(category_ids[cell])
    return LabeledTable(
        features=np.column_stack(columns) if columns else np.empty((len(raw.rows), 0)),
        labels=np.array(labels, dtype=np.int64),
        category_names=tuple(categories),
        stats=tuple(stats),
        encoders=tuple(encoders),
    )


def load_table(path, options: IngestOptions = IngestOptions()) -> LabeledTable:
    """Convenience: parse and encode a training file in one step."""
    raw = parse_delimited(path, options)
    return encode_and_normalize(raw, options.category_order)


def normalize_feature_rows(
    cell_rows: Sequence[Sequence[str]],
    stats: Sequence[ColumnStats],
    encoders: Sequence[dict[str, int] | None] = (),
) -> np.ndarray:
    """Normalize label-free rows of cell text with training stats/encoders."""
    if not cell_rows:
        raise IngestError("no rows to normalize")
    if any(len(r) != len(stats) for r in cell_rows):
        raise IngestError(
            f"rows must have exactly {len(stats)} feature cells"
        )
    if not encoders:
        encoders = tuple(None for _ in stats)
    columns = []
    for j, st in enumerate(stats):
        cells = [str(r[j]).strip() for r in cell_rows]
        if encoders[j] is not None:
            values = np.array(
                [_lookup_nominal(encoders[j], c, f"col{j}") for c in cells]
            )
        else:
            values = _parse_numeric(cells, f"col{j}")
        columns.append(np.clip(_scale(values, st), 0.0, 1.0))
    return np.column_stack(columns)


# ---------------------------------------------------------------
# helpers
# ---------------------------------------------------------------

def _read_text(source) -> str:
    if isinstance(source, (str, Path)):
        try:
            data = Path(source).read_bytes()
        except OSError as exc:
            raise IngestError(f"cannot read {source}: {exc}") from exc
        return data.decode("utf-8")
    data = source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


def _resolve_label_column(spec, width: int, header: tuple[str, ...] | None) -> int:
    if isinstance(spec, str):
        stripped = spec.strip()
        if header is not None and stripped in header:
            return header.index(stripped)
        try:
            spec = int(stripped)
        except ValueError:
            raise ConfigError(f"label column {spec!r} not found in header") from None
    idx = spec + width if spec < 0 else spec
    if not 0 <= idx < width:
        raise ConfigError(f"label column {spec} out of range for {width} columns")
    return idx


def _encode_column(cells: list[str], name: str) -> tuple[np.ndarray, dict[str, int] | None]:
    numeric = []
    all_numeric = True
    any_numeric = False
    for c in cells:
        if c == "":
            raise IngestError(f"empty cell in column {name!r}; missing values are not supported")
        try:
            numeric.append(float(c))
            any_numeric = True
        except ValueError:
            all_numeric = False
            numeric.append(None)
    if all_numeric:
        return np.array(numeric, dtype=np.float64), None
    if any_numeric:
        raise IngestError(f"column {name!r} mixes numeric and non-numeric cells")
    encoder: dict[str, int] = {}
    for c in cells:
        if c not in encoder:
            encoder[c] = len(encoder)
    return np.array([encoder[c] for c in cells], dtype=np.float64), encoder


def _parse_numeric(cells: list[str], name: str) -> np.ndarray:
    out = []
    for c in cells:
        if c == "":
            raise IngestError(f"empty cell in column {name!r}; missing values are not supported")
        try:
            out.append(float(c))
        except ValueError:
            raise IngestError(
                f"column {name!r} was numeric in training but holds {c!r}"
            ) from None
    return np.array(out, dtype=np.float64)


def _lookup_nominal(encoder: dict[str, int], cell: str, name: str) -> float:
    if cell not in encoder:
        raise IngestError(f"value {cell!r} in column {name!r} was never seen in training")
    return float(encoder[cell])


def _scale(values: np.ndarray, stats: ColumnStats) -> np.ndarray:
    if stats.is_constant:
        return np.zeros_like(values)
    return (values - stats.min) / (stats.max - stats.min)


def _category_list(
    label_cells: list[str], category_order: Sequence[str] | None
) -> tuple[str, ...]:
    if category_order is not None:
        order = tuple(category_order)
        known = set(order)
        for c in label_cells:
            if c not in known:
                raise ConfigError(f"label {c!r} missing from the configured category order")
        return order
    seen: dict[str, None] = {}
    for c in label_cells:
        seen.setdefault(c)
    return tuple(seen)
