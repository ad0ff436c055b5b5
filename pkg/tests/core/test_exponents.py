import math

from hypothesis import given, settings
from hypothesis import strategies as st
import numpy as np
import pytest

from src.core.exponents import (
    DensityPoint,
    OverlapPoint,
    check_region,
    entropy,
    eps_hat,
    g_fn,
    gamma_fn,
    grad_f,
    grad_g,
    h1,
    hessian_f,
    is_in_region,
    phi1,
    phi1_gradient,
    phi1_hessian,
    phi1_values,
    phi2,
    psi1,
    psi2,
    second_moment_f,
)
from src.utils.exceptions import RegionViolationError

THIRD = DensityPoint(1 / 3, 1 / 3)


def _numeric_gradient(func, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    grad = np.zeros_like(x)
    for i in range(len(x)):
        step = np.zeros_like(x)
        step[i] = h
        grad[i] = (func(x + step) - func(x - step)) / (2 * h)
    return grad


class TestEntropy:
    def test_end_points(self):
        assert entropy(0.0) == 0.0
        assert entropy(1.0) == 0.0

    def test_half(self):
        assert entropy(0.5) == pytest.approx(math.log(2), rel=1e-15)

    def test_vectorized(self):
        values = entropy(np.array([0.0, 0.25, 0.5]))
        assert values.shape == (3,)

    def test_outside_domain(self):
        with pytest.raises(ValueError):
            entropy(1.5)

    @settings(max_examples=50, deadline=None)
    @given(x=st.floats(min_value=0.0, max_value=1.0), y=st.floats(min_value=1e-3, max_value=1.0))
    def test_h1_is_scaled_entropy(self, x, y):
        x = x * y
        assert h1(x, y) == pytest.approx(y * entropy(min(x / y, 1.0)), abs=1e-12)

    def test_h1_rejects_x_above_y(self):
        with pytest.raises(ValueError):
            h1(0.5, 0.4)


class TestDensityPoint:
    def test_outside_triangle(self):
        with pytest.raises(ValueError):
            DensityPoint(0.6, 0.6)

    def test_from_counts(self):
        assert DensityPoint.from_counts(12, 4, 3) == DensityPoint(1 / 3, 0.25)

    def test_independent_overlap(self):
        o = OverlapPoint.independent(DensityPoint(0.2, 0.3))
        assert (o.gamma, o.delta, o.epsilon) == pytest.approx((0.04, 0.09, 0.1))


class TestFirstMoment:
    def test_psi1_at_one_third(self):
        assert psi1(THIRD) == pytest.approx(4 / 3 * math.log(2) - math.log(3), rel=1e-13)

    def test_gradient_vanishes_at_critical_point(self):
        assert np.allclose(phi1_gradient(THIRD, 4.0, 3), 0.0, atol=1e-13)

    def test_values_match_scalar(self):
        alphas = np.array([0.1, 0.2, 0.3])
        betas = np.array([0.5, 0.3, 0.1])
        expected = [phi1(DensityPoint(a, b), 2.0, 3) for a, b in zip(alphas, betas, strict=True)]
        assert phi1_values(alphas, betas, 2.0, 3) == pytest.approx(expected, rel=1e-13)

    def test_gradient_matches_finite_differences(self):
        numeric = _numeric_gradient(lambda x: phi1(DensityPoint(*x), 6.0, 3), [0.2, 0.4])
        assert phi1_gradient(DensityPoint(0.2, 0.4), 6.0, 3) == pytest.approx(numeric, rel=1e-6)

    def test_hessian_matches_finite_differences(self):
        numeric = np.array(
            [
                _numeric_gradient(lambda x, i=i: phi1_gradient(DensityPoint(*x), 6.0, 3)[i], [0.2, 0.4])
                for i in range(2)
            ]
        )
        assert phi1_hessian(DensityPoint(0.2, 0.4), 6.0, 3) == pytest.approx(numeric, rel=1e-5)


class TestSecondMoment:
    @pytest.mark.parametrize(("alpha", "beta"), [(1 / 3, 1 / 3), (0.2, 0.3), (0.25, 0.15)])
    def test_independent_overlap_doubles_first_moment(self, alpha, beta):
        p = DensityPoint(alpha, beta)
        o = OverlapPoint.independent(p)
        assert psi2(p, o) == pytest.approx(2 * psi1(p), abs=1e-13)
        assert gamma_fn(p, o, 3) == pytest.approx(0.0, abs=1e-13)
        assert phi2(p, o, 1.7, 3) == pytest.approx(2 * phi1(p, 1.7, 3), abs=1e-12)

    @pytest.mark.parametrize(
        "overlap", [(1 / 9, 1 / 9, 1 / 9), (0.05, 0.2, 0.2), (0.2, 0.05, 0.08), (0.15, 0.15, 0.12)]
    )
    def test_entropy_and_h1_forms_agree(self, overlap):
        o = OverlapPoint(*overlap)
        assert second_moment_f(THIRD, o, 2.0, 3) == pytest.approx(phi2(THIRD, o, 2.0, 3), abs=1e-12)

    def test_gradient_vanishes_at_independent_overlap(self):
        o = OverlapPoint.independent(THIRD)
        assert np.allclose(grad_f(THIRD, o, 1.0, 3), 0.0, atol=1e-12)

    def test_gradient_matches_finite_differences(self):
        x0 = [0.05, 0.2, 0.2]
        numeric = _numeric_gradient(lambda x: second_moment_f(THIRD, OverlapPoint(*x), 1.0, 3), x0)
        assert grad_f(THIRD, OverlapPoint(*x0), 1.0, 3) == pytest.approx(numeric, rel=1e-5, abs=1e-7)

    def test_hessian_matches_finite_differences(self):
        x0 = [0.05, 0.2, 0.2]
        numeric = np.array(
            [
                _numeric_gradient(lambda x, i=i: grad_f(THIRD, OverlapPoint(*x), 1.0, 3)[i], x0)
                for i in range(3)
            ]
        )
        assert hessian_f(THIRD, OverlapPoint(*x0), 1.0, 3) == pytest.approx(numeric, rel=1e-4, abs=1e-5)

    def test_three_regular_hessian(self):
        h = hessian_f(THIRD, OverlapPoint.independent(THIRD), 1.0, 3)
        expected = np.array([[-243 / 4, 81 / 2, -243 / 4], [81 / 2, -81 / 2, 81 / 2], [-243 / 4, 81 / 2, -405 / 4]])
        assert h == pytest.approx(expected, abs=1e-9)

    def test_derivatives_refuse_boundary(self):
        with pytest.raises(RegionViolationError):
            grad_f(THIRD, OverlapPoint(0.0, 1 / 9, 1 / 9), 1.0, 3)


class TestRegion:
    def test_independent_overlap_is_inside(self):
        assert is_in_region(THIRD, OverlapPoint.independent(THIRD), min_slack=1e-3)

    def test_violation_names_the_slack(self):
        with pytest.raises(RegionViolationError, match="alpha-gamma"):
            check_region(THIRD, OverlapPoint(0.4, 0.1, 0.0))

    def test_violation_is_a_value_error(self):
        with pytest.raises(ValueError):
            psi2(THIRD, OverlapPoint(-0.1, 0.1, 0.1))


class TestEpsilonElimination:
    def test_eps_hat_at_independent_overlap(self):
        assert eps_hat(THIRD, 1 / 9, 1 / 9) == pytest.approx(1 / 9, abs=1e-15)

    @pytest.mark.parametrize(("gamma", "delta"), [(0.05, 0.2), (0.15, 0.1), (0.1, 0.05)])
    def test_eps_hat_is_stationary_in_epsilon(self, gamma, delta):
        o = OverlapPoint(gamma, delta, eps_hat(THIRD, gamma, delta))
        assert grad_f(THIRD, o, 1.0, 3)[2] == pytest.approx(0.0, abs=1e-10)

    def test_grad_g_matches_finite_differences(self):
        numeric = _numeric_gradient(lambda x: g_fn(THIRD, x[0], x[1], 1.0, 3), [0.15, 0.1])
        assert grad_g(THIRD, 0.15, 0.1, 1.0, 3) == pytest.approx(numeric, rel=1e-5, abs=1e-7)
