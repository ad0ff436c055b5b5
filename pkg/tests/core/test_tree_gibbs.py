import math

from hypothesis import given, settings
from hypothesis import strategies as st
import pytest

from src.core.tree_gibbs import (
    cavity_map,
    lambda_c,
    occupancy_from_cavity,
    phase_diagram,
    semi_invariant_fixed_points,
    symmetric_cavity_fixed_point,
    symmetric_fixed_point,
    tree_recursion,
    tree_recursion_raw,
)


@pytest.mark.parametrize(("d", "expected"), [(3, 4.0), (4, 27 / 16), (5, 256 / 243)])
def test_lambda_c(d, expected):
    assert lambda_c(d) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("d", [2, 3.5])
def test_lambda_c_rejects_degree(d):
    with pytest.raises(ValueError):
        lambda_c(d)


def test_recursion_at_critical_point():
    assert tree_recursion(1 / 3, 4.0, 3) == pytest.approx(1 / 3, abs=1e-15)


def test_recursion_clamps_at_zero():
    lam = 2.0
    x = 0.9
    assert tree_recursion_raw(x, lam, 3) < 0
    assert tree_recursion(x, lam, 3) == 0.0


def test_recursion_domain():
    with pytest.raises(ValueError):
        tree_recursion(1.0, 2.0, 3)


@pytest.mark.parametrize("d", [3, 4, 5, 6])
def test_symmetric_fixed_point_at_lambda_c(d):
    assert symmetric_fixed_point(lambda_c(d), d) == pytest.approx(1 / d, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(lam=st.floats(min_value=0.05, max_value=50.0), d=st.integers(min_value=3, max_value=8))
def test_symmetric_fixed_point_residual(lam, d):
    p_star = symmetric_fixed_point(lam, d)
    assert 0 < p_star < 1
    assert abs(tree_recursion(p_star, lam, d) - p_star) <= 1e-12


def test_cavity_fixed_point_gives_p_star():
    lam, d = 2.5, 4
    q_star = symmetric_cavity_fixed_point(lam, d)
    assert cavity_map(q_star, lam, d) == pytest.approx(q_star, abs=1e-14)
    assert occupancy_from_cavity(q_star, lam, d) == pytest.approx(symmetric_fixed_point(lam, d), abs=1e-12)


def test_p_star_increases_with_activity():
    values = [symmetric_fixed_point(lam, 3) for lam in (0.5, 1.0, 2.0, 4.0, 8.0)]
    assert values == sorted(values)


class TestSemiInvariantFixedPoints:
    def test_unique_below_lambda_c(self):
        fixed = semi_invariant_fixed_points(3.5, 3)
        assert fixed.is_unique
        assert fixed.p1 == fixed.p2 == fixed.p_star

    @pytest.mark.parametrize(("lam", "d"), [(6.0, 3), (4.5, 3), (3.0, 4), (2.0, 5)])
    def test_pitchfork_above_lambda_c(self, lam, d):
        fixed = semi_invariant_fixed_points(lam, d)
        assert not fixed.is_unique
        assert fixed.p1 < fixed.p_star < fixed.p2
        assert tree_recursion(fixed.p1, lam, d) == pytest.approx(fixed.p2, abs=1e-9)
        assert tree_recursion(fixed.p2, lam, d) == pytest.approx(fixed.p1, abs=1e-9)

    def test_row(self):
        row = semi_invariant_fixed_points(6.0, 3).as_row()
        assert set(row) == {"lambda", "d", "p_star", "p1", "p2", "is_unique"}
        assert row["lambda"] == 6.0

    def test_rejects_non_positive_activity(self):
        with pytest.raises(ValueError):
            semi_invariant_fixed_points(0.0, 3)


def test_phase_diagram_changes_regime_at_lambda_c():
    points = phase_diagram(3, [3.5, 3.9, 4.1, 5.0])
    assert [p.is_unique for p in points] == [True, True, False, False]
    assert all(math.isfinite(p.p_star) for p in points)
