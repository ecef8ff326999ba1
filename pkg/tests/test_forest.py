"""Branching classifier structure and inference tests."""

import numpy as np
import pytest

from batchband.errors import IngestError
from batchband.forest import (
    BranchLimits,
    assign_desired,
    iter_nodes,
    predict,
    predict_batch,
    train_forest,
)

from conftest import make_table


class TestAssignDesired:
    def test_three_spread(self):
        assert assign_desired(3, "spread") == (0.0, 0.5, 1.0)

    def test_three_centred(self):
        assert assign_desired(3, "centred") == (0.5, 0.5, 0.5)

    def test_single_category(self):
        assert assign_desired(1, "spread") == (0.5,)
        assert assign_desired(1, "centred") == (0.5,)

    def test_unknown_scheme(self):
        with pytest.raises(ValueError):
            assign_desired(2, "other")


class TestTrainForest:
    def test_separable_data_never_branches(self):
        t = make_table([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1])
        f = train_forest(t, "spread")
        assert set(f.roots) == {0, 1}
        assert all(not n.children for n in f.roots.values())
        assert f.node_count == 2 and f.max_depth == 0
        cats, _, _ = predict_batch(f, t.features)
        assert list(cats) == [0, 0, 1, 1]

    def test_misclaimed_rows_spawn_child_layers(self):
        # Root B claims only a foreign row (a one-node corrective layer);
        # root C claims a mixed pair and branches into a two-node layer.
        t = make_table(
            [[0.0, 0.2], [0.38, 0.6], [0.1, 0.95], [0.515, 0.515]],
            [0, 0, 1, 2],
        )
        f = train_forest(t, "spread")
        assert not f.roots[0].children
        assert list(f.roots[1].children) == [0]  # corrects for category A only
        assert sorted(f.roots[2].children) == [1, 2]
        assert f.node_count == 6 and f.max_depth == 1
        cats, _, _ = predict_batch(f, t.features)
        assert list(cats) == [0, 0, 1, 2]

    def test_duplicate_conflict_stalls_without_progress(self):
        # identical feature vectors under two labels cannot be separated;
        # the claim hands both rows to the lower category and stops
        # (dyadic values so the two unit scores tie bit-exactly)
        t = make_table([[0.25, 0.75], [0.25, 0.75]], [0, 1])
        f = train_forest(t, "spread")
        assert f.node_count == 2
        assert all(not n.children for n in f.roots.values())
        p = predict(f, np.array([0.25, 0.75]))
        assert p.category == 0 and p.tied and p.tie_set == {0, 1}

    def test_depth_limit_stops_branching(self):
        t = make_table(
            [[0.0, 0.2], [0.38, 0.6], [0.1, 0.95], [0.515, 0.515]],
            [0, 0, 1, 2],
        )
        f = train_forest(t, "spread", BranchLimits(max_depth=0))
        assert f.node_count == 3 and f.max_depth == 0

    def test_empty_table_rejected(self):
        t = make_table(np.empty((0, 2)), [])
        with pytest.raises(IngestError):
            train_forest(t)

    def test_single_category_table(self):
        t = make_table([0.2, 0.4], [0, 0])
        f = train_forest(t, "spread")
        assert f.node_count == 1
        assert predict(f, np.array([0.9])).category == 0

    def test_child_depths_and_single_child_categories(self):
        rng = np.random.default_rng(11)
        for _ in range(40):
            n = int(rng.integers(4, 25))
            ncols = int(rng.integers(1, 4))
            t = make_table(
                rng.uniform(0, 1, size=(n, ncols)),
                rng.integers(0, 3, size=n),
                names=("A", "B", "C"),
            )
            f = train_forest(t, "spread", BranchLimits(max_depth=None))
            for node in iter_nodes(f):
                for c, child in node.children.items():
                    assert child.depth == node.depth + 1
                    assert child.unit.category == c
                if len(node.children) == 1:
                    (only,) = node.children.values()
                    assert only.unit.category != node.unit.category

    def test_deterministic_structure(self):
        rng = np.random.default_rng(13)
        t = make_table(rng.uniform(0, 1, size=(40, 3)), rng.integers(0, 3, size=40))
        a = train_forest(t, "centred")
        b = train_forest(t, "centred")
        for na, nb in zip(iter_nodes(a), iter_nodes(b)):
            assert na.unit.category == nb.unit.category
            assert na.depth == nb.depth
            assert np.array_equal(na.unit.offsets, nb.unit.offsets)
            assert na.unit.residual == nb.unit.residual


class TestPredict:
    def test_separable_prediction(self):
        t = make_table([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1])
        f = train_forest(t, "spread")
        p = predict(f, np.array([0.15]))
        assert p.category == 0 and not p.tied and p.source == "classifier"
        assert p.error == pytest.approx(0.0, abs=1e-12)

    def test_equidistant_row_ties(self):
        # dyadic endpoints make both unit scores bit-identical at 0.5
        t = make_table([0.25, 0.75], [0, 1])
        f = train_forest(t, "spread")
        p = predict(f, np.array([0.5]))
        assert p.tied and p.tie_set == {0, 1} and p.category == 0
        assert p.error == 0.25

    def test_length_mismatch(self):
        t = make_table([0.1, 0.9], [0, 1])
        f = train_forest(t, "spread")
        with pytest.raises(IngestError):
            predict(f, np.array([0.1, 0.2]))

    def test_batch_matches_scalar(self):
        rng = np.random.default_rng(19)
        t = make_table(rng.uniform(0, 1, (30, 2)), rng.integers(0, 3, 30))
        f = train_forest(t, "spread")
        rows = rng.uniform(0, 1, (50, 2))
        cats, errs, tied = predict_batch(f, rows)
        for i in range(50):
            p = predict(f, rows[i])
            assert cats[i] == p.category
            assert errs[i] == p.error
            assert tied[i] == p.tied

    def test_training_rows_recover_their_claims(self):
        # conflict-free continuous tables classify their own training rows
        rng = np.random.default_rng(101)
        for _ in range(25):
            n = int(rng.integers(4, 30))
            t = make_table(
                rng.uniform(0, 1, size=(n, int(rng.integers(1, 5)))),
                rng.integers(0, int(rng.integers(2, 4)), size=n),
            )
            f = train_forest(t, "spread", BranchLimits(max_depth=None))
            cats, _, _ = predict_batch(f, t.features)
            assert np.array_equal(cats, t.labels)
