import numpy as np
import pytest

from src.core.exponents import DensityPoint, OverlapPoint, is_in_region
from src.core.stationary_points import (
    bottleneck_exponent,
    characteristic_polynomial,
    find_stationary_points,
    maximize_phi1,
    newton_root,
    overlap_starts,
    phi1_landscape,
    unique_max_scan,
)
from src.core.tree_gibbs import semi_invariant_fixed_points, symmetric_fixed_point, tree_recursion

THIRD = DensityPoint(1 / 3, 1 / 3)


def test_characteristic_polynomial_of_diagonal():
    assert characteristic_polynomial(np.diag([1.0, 2.0])) == pytest.approx([1.0, -3.0, 2.0])


def test_newton_root_on_quadratic():
    result = newton_root(
        gradient=lambda x: 2 * (x - np.array([0.3, -0.2])),
        hessian=lambda x: 2 * np.eye(2),
        x0=np.array([1.0, 1.0]),
        feasible=lambda x: True,
    )
    assert result.converged
    assert result.x == pytest.approx([0.3, -0.2], abs=1e-12)


def test_newton_root_respects_feasibility():
    result = newton_root(
        gradient=lambda x: np.array([x[0] + 1.0]),
        hessian=lambda x: np.array([[1.0]]),
        x0=np.array([0.5]),
        feasible=lambda x: x[0] > 0,
    )
    assert not result.converged
    assert result.x[0] > 0


class TestOverlapStarts:
    def test_starts_lie_in_region(self):
        starts = overlap_starts(THIRD, 128, seed=0)
        assert starts.shape == (128, 3)
        assert all(is_in_region(THIRD, OverlapPoint.from_array(s)) for s in starts)

    def test_seeded(self):
        assert np.array_equal(overlap_starts(THIRD, 100, seed=4), overlap_starts(THIRD, 100, seed=4))


class TestFindStationaryPoints:
    def test_rejects_few_starts(self):
        with pytest.raises(ValueError):
            find_stationary_points(THIRD, 1.0, 3, n_starts=10)

    @pytest.mark.slow
    def test_unique_maximum_at_independent_overlap(self):
        report = find_stationary_points(THIRD, 1.0, 3, n_starts=100, seed=1)
        assert len(report.points) == 1
        assert report.is_max
        assert report.unique_in_region
        expected = OverlapPoint.independent(THIRD).as_array()
        assert report.point.as_array() == pytest.approx(expected, abs=1e-8)
        rows = report.as_rows()
        assert rows[0]["hits"] + len(report.failed_starts) == 100

    @pytest.mark.slow
    def test_threads_do_not_change_the_report(self):
        p = DensityPoint(0.3, 0.35)
        single = find_stationary_points(p, 1.0, 3, n_starts=100, seed=2, threads=1)
        pooled = find_stationary_points(p, 1.0, 3, n_starts=100, seed=2, threads=3)
        assert single.as_rows() == pooled.as_rows()


class TestMaximizePhi1:
    def test_symmetric_maximizer_below_lambda_c(self):
        result = maximize_phi1(1.0, 3)
        p_star = symmetric_fixed_point(1.0, 3)
        assert len(result.maximizers) == 1
        assert result.maximizers[0].alpha == pytest.approx(p_star, abs=1e-8)
        assert result.maximizers[0].beta == pytest.approx(p_star, abs=1e-8)
        assert not result.symmetric_is_saddle

    def test_two_tilted_maximizers_above_lambda_c(self):
        result = maximize_phi1(6.0, 3)
        fixed = semi_invariant_fixed_points(6.0, 3)
        assert len(result.maximizers) == 2
        low, high = result.maximizers
        assert (low.alpha, low.beta) == pytest.approx((fixed.p1, fixed.p2), abs=1e-7)
        assert (high.alpha, high.beta) == pytest.approx((fixed.p2, fixed.p1), abs=1e-7)
        assert tree_recursion(low.alpha, 6.0, 3) == pytest.approx(low.beta, abs=1e-8)
        assert result.symmetric_is_saddle
        assert low.value == pytest.approx(high.value, abs=1e-12)


def test_phi1_landscape_covers_the_triangle():
    rows = phi1_landscape(2.0, 3, grid_points=10)
    assert len(rows) == 66
    assert all(row["alpha"] + row["beta"] <= 1 + 1e-12 for row in rows)
    assert {"alpha", "beta", "phi1"} == set(rows[0])


def test_phi1_landscape_origin_is_zero():
    rows = phi1_landscape(2.0, 3, grid_points=4)
    origin = next(row for row in rows if row["alpha"] == 0.0 and row["beta"] == 0.0)
    assert origin["phi1"] == 0.0


class TestBottleneckExponent:
    def test_positive_above_lambda_c(self):
        exponent = bottleneck_exponent(6.0, 3, 0.01)
        assert exponent.alpha < exponent.beta
        assert exponent.epsilon > 0
        assert exponent.decay_base > 1

    def test_not_positive_in_uniqueness_regime(self):
        assert bottleneck_exponent(1.0, 3, 0.01).epsilon <= 0

    def test_rejects_non_positive_delta(self):
        with pytest.raises(ValueError):
            bottleneck_exponent(6.0, 3, 0.0)


def test_unique_max_scan_rejects_radius():
    with pytest.raises(ValueError):
        unique_max_scan(3, 0.5)


@pytest.mark.slow
def test_unique_max_scan_single_point():
    rows = unique_max_scan(3, 0.0, points_per_axis=1, n_starts=100, seed=0)
    assert len(rows) == 1
    assert rows[0]["unique_max"]
    assert rows[0]["distance_to_independent_overlap"] < 1e-8
