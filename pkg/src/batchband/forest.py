"""The branching classifier: one unit tree per category.

Training puts one unit per category at the first level, passes every
training row through the level and hands each row to the unit that scores
it best.  A node whose claimed rows include any foreign category gets a
child layer trained on exactly those rows, re-averaged per category; the
child layer then redistributes only that subset.  Recursion ends when a
node claims only its own rows, when a claim makes no progress (the child
layer would see the identical row multiset its own layer was trained on),
or at the depth limit.

Inference picks the first-level unit with the smallest score, then walks
down that root's children, always moving to the closest child, and
answers with the leaf's category and score.  Ties on the root score are
surfaced on the returned Prediction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    DEFAULT_MAX_ITERS,
    DEFAULT_TOL,
    UnitClassifier,
    average_rows,
    train_unit,
    unit_scores,
)
from .dataset import LabeledTable
from .errors import IngestError

SCHEMES = ("spread", "centred")


@dataclass
class ClassifierNode:
    """One unit plus the child layer spawned from its claimed rows."""

    unit: UnitClassifier
    depth: int
    children: dict[int, "ClassifierNode"] = field(default_factory=dict)


@dataclass
class Forest:
    """All root nodes of a trained branching classifier."""

    roots: dict[int, ClassifierNode]
    desired_scheme: str
    node_count: int
    max_depth: int
    n_columns: int

    @property
    def categories(self) -> list[int]:
        return sorted(self.roots)


@dataclass(frozen=True)
class Prediction:
    """Outcome for a single row."""

    category: int
    error: float
    tied: bool
    tie_set: frozenset[int]
    source: str  # "classifier" or "band"


@dataclass(frozen=True)
class BranchLimits:
    """Safety bounds on tree growth.  max_depth=None removes the cap."""

    max_depth: int | None = 50


def assign_desired(k: int, scheme: str) -> tuple[float, ...]:
    """Target output value for each of k categories.

    spread distributes categories evenly over [0, 1] (a single category
    gets 0.5); centred gives every category 0.5.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown desired-value scheme {scheme!r}")
    if scheme == "centred":
        return tuple(0.5 for _ in range(k))
    if k == 1:
        return (0.5,)
    return tuple(i / (k - 1) for i in range(k))


def train_forest(
    table: LabeledTable,
    scheme: str = "centred",
    limits: BranchLimits = BranchLimits(),
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
) -> Forest:
    """Build the branching classifier for a normalized training table."""
    if table.n_rows == 0:
        raise IngestError("cannot train on an empty table")
    roots: dict[int, ClassifierNode] = {}
    node_count = 0
    deepest = 0
    # work items: (children dict to fill, rows, labels, depth)
    stack: list[tuple[dict, np.ndarray, np.ndarray, int]] = [
        (roots, table.features, table.labels, 0)
    ]
    while stack:
        holder, rows, labels, depth = stack.pop()
        cats = [int(c) for c in np.unique(labels)]
        targets = dict(zip(cats, assign_desired(len(cats), scheme)))
        layer: dict[int, ClassifierNode] = {}
        for c in cats:
            unit = train_unit(
                average_rows(rows[labels == c], c), targets[c], max_iters, tol
            )
            layer[c] = ClassifierNode(unit=unit, depth=depth)
        holder.update(layer)
        node_count += len(cats)
        deepest = max(deepest, depth)

        scores = np.stack([unit_scores(layer[c].unit, rows) for c in cats])
        winners = np.argmin(scores, axis=0)  # first minimum: lowest category id
        for k, c in enumerate(cats):
            mask = winners == k
            claimed = int(mask.sum())
            if claimed == 0:
                continue
            claimed_labels = labels[mask]
            if not np.any(claimed_labels != c):
                continue  # claims only its own category
            if claimed == len(labels):
                continue  # identical multiset to this layer's input: no progress
            if limits.max_depth is not None and depth >= limits.max_depth:
                continue
            stack.append((layer[c].children, rows[mask], claimed_labels, depth + 1))
    return Forest(
        roots=roots,
        desired_scheme=scheme,
        node_count=node_count,
        max_depth=deepest,
        n_columns=table.n_columns,
    )


def predict(forest: Forest, row: np.ndarray) -> Prediction:
    """Classify one row: closest root, then closest child at each level."""
    row = np.asarray(row, dtype=np.float64)
    if row.ndim != 1 or row.shape[0] != forest.n_columns:
        raise IngestError(
            f"row has {row.shape[0] if row.ndim == 1 else row.ndim} values, "
            f"forest expects {forest.n_columns}"
        )
    block = row[np.newaxis, :]
    cats = forest.categories
    root_scores = [float(unit_scores(forest.roots[c].unit, block)[0]) for c in cats]
    best = min(root_scores)
    tying = [c for c, s in zip(cats, root_scores) if s == best]
    leaves = [_descend(forest.roots[c], block) for c in tying]
    tie_set = frozenset(leaf.unit.category for leaf in leaves)
    winner = leaves[0]
    return Prediction(
        category=winner.unit.category,
        error=float(unit_scores(winner.unit, block)[0]),
        tied=len(tie_set) > 1,
        tie_set=tie_set,
        source="classifier",
    )


def predict_batch(
    forest: Forest, rows: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized predict over a row block: (categories, errors, tied flags)."""
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[1] != forest.n_columns:
        raise IngestError("row block shape does not match the forest's column count")
    n = rows.shape[0]
    cats = forest.categories
    scores = np.stack([unit_scores(forest.roots[c].unit, rows) for c in cats])
    winners = np.argmin(scores, axis=0)
    tie_candidates = (scores == scores.min(axis=0)).sum(axis=0) > 1

    out_cat = np.empty(n, dtype=np.int64)
    out_err = np.empty(n, dtype=np.float64)
    out_tied = np.zeros(n, dtype=bool)
    plain = ~tie_candidates
    for k, c in enumerate(cats):
        idx = np.flatnonzero(plain & (winners == k))
        if idx.size:
            _descend_block(forest.roots[c], rows, idx, out_cat, out_err)
    for i in np.flatnonzero(tie_candidates):
        p = predict(forest, rows[i])
        out_cat[i] = p.category
        out_err[i] = p.error
        out_tied[i] = p.tied
    return out_cat, out_err, out_tied


def iter_nodes(forest: Forest):
    """Yield every node depth-first, children in category order."""
    stack = [forest.roots[c] for c in sorted(forest.roots, reverse=True)]
    while stack:
        node = stack.pop()
        yield node
        for c in sorted(node.children, reverse=True):
            stack.append(node.children[c])


def _descend(node: ClassifierNode, block: np.ndarray) -> ClassifierNode:
    while node.children:
        cats = sorted(node.children)
        child_scores = [
            float(unit_scores(node.children[c].unit, block)[0]) for c in cats
        ]
        node = node.children[cats[int(np.argmin(child_scores))]]
    return node


def _descend_block(node, rows, idx, out_cat, out_err):
    stack = [(node, idx)]
    while stack:
        nd, ii = stack.pop()
        if not nd.children:
            out_cat[ii] = nd.unit.category
            out_err[ii] = unit_scores(nd.unit, rows[ii])
            continue
        cats = sorted(nd.children)
        scores = np.stack([unit_scores(nd.children[c].unit, rows[ii]) for c in cats])
        w = np.argmin(scores, axis=0)
        for k, c in enumerate(cats):
            sub = ii[w == k]
            if sub.size:
                stack.append((nd.children[c], sub))
