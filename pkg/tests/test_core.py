"""Unit classifier tests: averaging, offset training, scoring."""

import numpy as np
import pytest

from batchband.core import (
    CategoryAverage,
    batch_average,
    score,
    train_unit,
    unit_scores,
)
from batchband.errors import IngestError

from conftest import make_table


def offset_oracle(means, desired, max_iters=10, tol=1e-12):
    """Straight-line transliteration of the update rule, kept independent
    of the implementation under test.  The residual is the error of the
    final offsets."""
    offsets = [0.0] * len(means)
    for _ in range(max_iters):
        adjusted = [m + w for m, w in zip(means, offsets)]
        o = sum(adjusted) / len(adjusted)
        e = desired - o
        if abs(e) <= tol:
            break
        offsets = [
            w + abs(e) if a <= desired else w - abs(e)
            for w, a in zip(offsets, adjusted)
        ]
    final = [m + w for m, w in zip(means, offsets)]
    return offsets, abs(desired - sum(final) / len(final))


def unit_for(means, desired, **kw):
    avg = CategoryAverage(category=0, means=np.asarray(means, dtype=float), support=1)
    return train_unit(avg, desired, **kw)


class TestBatchAverage:
    def test_two_point_mean(self):
        t = make_table([[0.2, 0.4], [0.4, 0.6]], [0, 0])
        avg = batch_average(t, 0)
        np.testing.assert_allclose(avg.means, [0.3, 0.5])
        assert avg.support == 2

    def test_single_row_identity(self):
        t = make_table([[0.7, 0.1]], [0])
        avg = batch_average(t, 0)
        np.testing.assert_array_equal(avg.means, [0.7, 0.1])
        assert avg.support == 1

    def test_column_mean_of_clustered_values(self):
        # three values 0.1..0.3 of one category average to 0.2
        t = make_table([[0.1], [0.2], [0.3]], [0, 0, 0])
        avg = batch_average(t, 0)
        assert avg.means[0] == pytest.approx(0.2)

    def test_missing_category_errors(self):
        t = make_table([[0.5]], [0])
        with pytest.raises(IngestError):
            batch_average(t, 3)


class TestTrainUnit:
    def test_already_at_target(self):
        u = unit_for([0.3, 0.5], 0.4)
        np.testing.assert_allclose(u.offsets, [0.0, 0.0], atol=1e-12)
        assert u.residual == pytest.approx(0.0, abs=1e-12)

    def test_uniform_shift_below_target(self):
        u = unit_for([0.2, 0.2], 0.5)
        np.testing.assert_allclose(u.offsets, [0.3, 0.3], atol=1e-12)
        assert u.residual == pytest.approx(0.0, abs=1e-12)

    def test_mixed_sides_symmetric_stops_immediately(self):
        # oracle: mean(0.1, 0.9) is already 0.5, so no update happens
        expect_off, expect_res = offset_oracle([0.1, 0.9], 0.5)
        assert expect_off == [0.0, 0.0] and expect_res == 0.0
        u = unit_for([0.1, 0.9], 0.5)
        np.testing.assert_allclose(u.offsets, expect_off, atol=1e-12)
        assert u.residual == pytest.approx(expect_res, abs=1e-12)

    def test_mixed_sides_oscillation(self):
        # frozen from the oracle above: the lower column crosses the target
        # at iteration 7, unbalancing the corrections until the error closes
        expect_off, expect_res = offset_oracle([0.2, 0.9], 0.5)
        assert expect_off == [0.2500000000000002, -0.3500000000000003]
        assert expect_res == 0.0
        u = unit_for([0.2, 0.9], 0.5)
        np.testing.assert_allclose(u.offsets, expect_off, atol=1e-12)
        assert u.residual == pytest.approx(expect_res, abs=1e-12)

    def test_mixed_sides_three_columns(self):
        expect_off, expect_res = offset_oracle([0.1, 0.4, 0.9], 0.3)
        assert expect_off == [0.1296296296296296, -0.20370370370370366, -0.425925925925926]
        u = unit_for([0.1, 0.4, 0.9], 0.3)
        np.testing.assert_allclose(u.offsets, expect_off, atol=1e-12)
        assert u.residual == pytest.approx(expect_res, abs=1e-12)

    def test_one_sided_converges_in_single_iteration(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            desired = rng.uniform(0.5, 1.0)
            means = rng.uniform(0.0, desired - 1e-6, size=rng.integers(1, 6))
            u = unit_for(means, desired, max_iters=1)
            assert u.residual <= 1e-12

    def test_matches_oracle_on_random_inputs(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            n = int(rng.integers(1, 7))
            means = rng.uniform(0, 1, size=n)
            desired = float(rng.uniform(0, 1))
            expect_off, expect_res = offset_oracle(list(means), desired)
            u = unit_for(means, desired)
            np.testing.assert_allclose(u.offsets, expect_off, rtol=0, atol=1e-12)
            assert u.residual == pytest.approx(expect_res, abs=1e-12)

    def test_deterministic(self):
        a = unit_for([0.37, 0.91, 0.02], 0.62)
        b = unit_for([0.37, 0.91, 0.02], 0.62)
        assert np.array_equal(a.offsets, b.offsets)
        assert a.residual == b.residual


class TestScore:
    def test_exact_match(self):
        u = unit_for([0.5, 0.5], 0.5)
        np.testing.assert_allclose(u.offsets, [0, 0], atol=1e-12)
        assert score(u, np.array([0.5, 0.5])) == pytest.approx(0.0)

    def test_own_training_mean_scores_its_residual(self):
        u = unit_for([0.2, 0.2], 0.5)
        assert score(u, np.array([0.2, 0.2])) == pytest.approx(0.0, abs=1e-12)

    def test_shifted_row(self):
        u = unit_for([0.2, 0.2], 0.5)
        assert score(u, np.array([0.4, 0.4])) == pytest.approx(0.2)

    def test_length_mismatch(self):
        u = unit_for([0.2, 0.2], 0.5)
        with pytest.raises(IngestError):
            score(u, np.array([0.2, 0.2, 0.2]))

    def test_score_of_means_equals_residual(self):
        rng = np.random.default_rng(23)
        for _ in range(100):
            means = rng.uniform(0, 1, size=int(rng.integers(1, 6)))
            u = unit_for(means, float(rng.uniform(0, 1)))
            assert score(u, u.means) == pytest.approx(u.residual, abs=1e-15)

    def test_uniform_shift_moves_output_linearly(self):
        rng = np.random.default_rng(29)
        u = unit_for(rng.uniform(0, 1, size=4), 0.5)
        row = rng.uniform(0.2, 0.8, size=4)
        base = np.mean(row + u.offsets) - u.desired
        for delta in (0.01, -0.02, 0.05):
            shifted = score(u, row + delta)
            assert shifted == pytest.approx(abs(base + delta), abs=1e-12)

    def test_unit_scores_matches_scalar_score(self):
        rng = np.random.default_rng(31)
        u = unit_for(rng.uniform(0, 1, size=3), 0.7)
        block = rng.uniform(0, 1, size=(20, 3))
        vec = unit_scores(u, block)
        for i in range(20):
            assert vec[i] == score(u, block[i])
