"""
Exponential growth rates of the first and second moments of Z^{alpha,beta} over RG(n, d).

All exponents use natural logarithms. Boundary values follow the 0 * ln 0 = 0 convention; derivatives are only
evaluated strictly inside the overlap region, where every slack is at least REGION_SLACK_TOL.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.special import xlogy

from src.utils.constants import REGION_SLACK_TOL
from src.utils.exceptions import RegionViolationError


@dataclass(frozen=True)
class DensityPoint:
    """Densities (alpha, beta) of an independent set on V1 and V2, a point of the triangle T."""

    alpha: float
    beta: float

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0 or self.alpha + self.beta > 1 + 1e-15:
            raise ValueError(f"Density point ({self.alpha}, {self.beta}) lies outside the triangle T.")

    @classmethod
    def from_counts(cls, n: int, a: int, b: int) -> "DensityPoint":
        return cls(alpha=a / n, beta=b / n)


@dataclass(frozen=True)
class OverlapPoint:
    """Overlap (gamma, delta, epsilon) of two independent sets with the same densities."""

    gamma: float
    delta: float
    epsilon: float

    def as_array(self) -> np.ndarray:
        return np.array([self.gamma, self.delta, self.epsilon])

    @classmethod
    def from_array(cls, values) -> "OverlapPoint":
        return cls(gamma=float(values[0]), delta=float(values[1]), epsilon=float(values[2]))

    @classmethod
    def independent(cls, p: DensityPoint) -> "OverlapPoint":
        """The overlap of two independent uniformly chosen sets: (alpha^2, beta^2, alpha (1 - alpha - beta))."""
        return cls(gamma=p.alpha**2, delta=p.beta**2, epsilon=p.alpha * (1 - p.alpha - p.beta))


def region_slacks(p: DensityPoint, o: OverlapPoint) -> dict[str, float]:
    """
    Every quantity that must be non-negative for the second-moment exponent to be defined.

    Besides the defining constraints of the region this includes the domain conditions of each entropy term.
    """
    a, b = p.alpha, p.beta
    g, dl, e = o.gamma, o.delta, o.epsilon
    return {
        "gamma": g,
        "delta": dl,
        "epsilon": e,
        "alpha-gamma": a - g,
        "beta-delta": b - dl,
        "alpha-gamma-epsilon": a - g - e,
        "1-2beta+delta-gamma-epsilon": 1 - 2 * b + dl - g - e,
        "1-2alpha+gamma": 1 - 2 * a + g,
        "beta-delta-(alpha-gamma-epsilon)": b - dl - (a - g - e),
        "1-beta-gamma-epsilon": 1 - b - g - e,
        "1-alpha-beta-epsilon": 1 - a - b - e,
        "1-2beta+delta": 1 - 2 * b + dl,
    }


def check_region(p: DensityPoint, o: OverlapPoint, min_slack: float = 0.0):
    """
    Raises:
        RegionViolationError: If any slack is below `min_slack` (rounding noise of 1e-15 is tolerated at 0).
    """
    tolerance = 1e-15 if min_slack == 0.0 else 0.0
    violations = [
        f"{name} = {value:.3e}" for name, value in region_slacks(p, o).items() if value < min_slack - tolerance
    ]
    if violations:
        raise RegionViolationError(
            f"Overlap ({o.gamma}, {o.delta}, {o.epsilon}) at density ({p.alpha}, {p.beta}) violates: "
            + ", ".join(violations)
        )


def is_in_region(p: DensityPoint, o: OverlapPoint, min_slack: float = 0.0) -> bool:
    return min(region_slacks(p, o).values()) >= min_slack


def entropy(x):
    """Natural-log entropy -x ln x - (1-x) ln(1-x), with Ent(0) = Ent(1) = 0."""
    x = np.asarray(x, dtype=float)
    if np.any((x < 0) | (x > 1)):
        raise ValueError(f"entropy is defined on [0, 1], got {x}.")
    value = -xlogy(x, x) - xlogy(1 - x, 1 - x)
    return float(value) if value.ndim == 0 else value


def h1(x, y):
    """
    H1(x, y) = -x (ln x - ln y) + (x - y)(ln(y - x) - ln y), which equals y * Ent(x / y).

    Raises:
        ValueError: If x < 0 or x > y.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    rest = y - x
    if np.any(x < 0) or np.any(rest < -1e-15):
        raise ValueError(f"h1 needs 0 <= x <= y, got x={x}, y={y}.")
    rest = np.maximum(rest, 0.0)
    value = -(xlogy(x, x) - xlogy(x, y)) - (xlogy(rest, rest) - xlogy(rest, y))
    return float(value) if value.ndim == 0 else value


def _scaled_entropy(numerator: float, denominator: float) -> float:
    """denominator * Ent(numerator / denominator), zero when the denominator vanishes."""
    if denominator <= 0.0:
        return 0.0
    ratio = min(max(numerator / denominator, 0.0), 1.0)
    return denominator * entropy(ratio)


def psi1(p: DensityPoint) -> float:
    """Log-probability rate that one random matching avoids the set: (1-beta) Ent(alpha/(1-beta)) - Ent(alpha)."""
    return _scaled_entropy(p.alpha, 1 - p.beta) - entropy(p.alpha)


def phi1(p: DensityPoint, lam: float, d: int) -> float:
    """First-moment exponent: lim (1/n) ln E[Z^{alpha,beta}]."""
    return (p.alpha + p.beta) * math.log(lam) + entropy(p.alpha) + entropy(p.beta) + d * psi1(p)


def phi1_values(alpha, beta, lam: float, d: int) -> np.ndarray:
    """Vectorized Phi1 over arrays of densities inside the closed triangle."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    ent_alpha = entropy(alpha)
    return (alpha + beta) * math.log(lam) + ent_alpha + entropy(beta) + d * (h1(alpha, 1 - beta) - ent_alpha)


def phi1_gradient(p: DensityPoint, lam: float, d: int) -> np.ndarray:
    a, b = p.alpha, p.beta
    free = 1 - a - b
    return np.array(
        [
            math.log(lam) + math.log((1 - a) / a) + d * math.log(free / (1 - a)),
            math.log(lam) + math.log((1 - b) / b) + d * math.log(free / (1 - b)),
        ]
    )


def phi1_hessian(p: DensityPoint, lam: float, d: int) -> np.ndarray:
    a, b = p.alpha, p.beta
    free = 1 - a - b
    h_aa = -1 / (1 - a) - 1 / a + d * (1 / (1 - a) - 1 / free)
    h_bb = -1 / (1 - b) - 1 / b + d * (1 / (1 - b) - 1 / free)
    h_ab = -d / free
    return np.array([[h_aa, h_ab], [h_ab, h_bb]])


def psi2(p: DensityPoint, o: OverlapPoint) -> float:
    """
    Log-probability rate that two independent sets with overlap (gamma, delta, epsilon) stay independent when
    one random matching is added.

    Raises:
        RegionViolationError: If the overlap lies outside the region.
    """
    check_region(p, o)
    a, b = p.alpha, p.beta
    g, dl, e = o.gamma, o.delta, o.epsilon

    left_free = 1 - 2 * b + dl
    first = _scaled_entropy(g, left_free) - entropy(g)
    second = (
        _scaled_entropy(e, left_free - g) + _scaled_entropy(a - g - e, b - dl) - _scaled_entropy(a - g, 1 - g)
    )
    third = _scaled_entropy(a - g, 1 - b - g - e) - _scaled_entropy(a - g, 1 - a)
    return first + second + third


def phi2(p: DensityPoint, o: OverlapPoint, lam: float, d: int) -> float:
    """Second-moment exponent in its entropy form."""
    a, b = p.alpha, p.beta
    g, dl = o.gamma, o.delta
    right = entropy(a) + _scaled_entropy(g, a) + _scaled_entropy(a - g, 1 - a)
    left = entropy(b) + _scaled_entropy(dl, b) + _scaled_entropy(b - dl, 1 - b)
    return 2 * (a + b) * math.log(lam) + right + left + d * psi2(p, o)


def second_moment_f(p: DensityPoint, o: OverlapPoint, lam: float, d: int) -> float:
    """
    Second-moment exponent written with H1, the form whose derivatives are taken below.

    Algebraically identical to `phi2`.
    """
    check_region(p, o)
    a, b = p.alpha, p.beta
    g, dl, e = o.gamma, o.delta, o.epsilon

    left_free = 1 - 2 * b + dl
    matching_term = (
        h1(g, left_free)
        - entropy(g)
        + h1(e, left_free - g)
        + h1(a - g - e, b - dl)
        - h1(a - g, 1 - g)
        + h1(a - g, 1 - b - g - e)
        - h1(a - g, 1 - a)
    )
    return (
        2 * (a + b) * math.log(lam)
        + entropy(a)
        + h1(g, a)
        + h1(a - g, 1 - a)
        + entropy(b)
        + h1(dl, b)
        + h1(b - dl, 1 - b)
        + d * matching_term
    )


def gamma_fn(p: DensityPoint, o: OverlapPoint, d: int) -> float:
    """The deficiency 2 Phi1 - Phi2, coded from its own definition (it does not depend on lambda)."""
    a, b = p.alpha, p.beta
    g, dl = o.gamma, o.delta
    overlap_entropy = (
        _scaled_entropy(g, a) + _scaled_entropy(a - g, 1 - a) + _scaled_entropy(dl, b) + _scaled_entropy(b - dl, 1 - b)
    )
    return entropy(a) + entropy(b) - overlap_entropy + d * (2 * psi1(p) - psi2(p, o))


class _Slacks:
    """Named slacks of the overlap region used by the derivative formulas."""

    def __init__(self, p: DensityPoint, o: OverlapPoint):
        check_region(p, o, min_slack=REGION_SLACK_TOL)
        a, b = p.alpha, p.beta
        g, dl, e = o.gamma, o.delta, o.epsilon
        self.gamma, self.delta, self.epsilon = g, dl, e
        self.s1 = 1 - 2 * b + dl - g - e
        self.s2 = a - g - e
        self.s3 = 1 - 2 * a + g
        self.s4 = b - dl - (a - g - e)
        self.s5 = 1 - b - g - e
        self.s6 = a - g
        self.left_free = 1 - 2 * b + dl
        self.left_rest = b - dl
        self.both_free = 1 - a - b - e


def grad_f(p: DensityPoint, o: OverlapPoint, lam: float, d: int) -> np.ndarray:
    """
    Gradient of the second-moment exponent with respect to (gamma, delta, epsilon).

    Raises:
        RegionViolationError: If the point is within REGION_SLACK_TOL of the boundary.
    """
    s = _Slacks(p, o)
    log = math.log
    f_gamma = (
        d * log(s.s1)
        + d * log(s.s2)
        + (d - 1) * log(s.s3)
        - d * log(s.s5)
        - d * log(s.s4)
        - (d - 2) * log(s.s6)
        - log(s.gamma)
    )
    f_delta = d * log(s.s4) + (d - 1) * log(s.left_free) - d * log(s.s1) - (d - 2) * log(s.left_rest) - log(s.delta)
    f_epsilon = d * (
        log(s.s1) + log(s.s2) + log(s.both_free) - log(s.epsilon) - log(s.s4) - log(s.s5)
    )
    return np.array([f_gamma, f_delta, f_epsilon])


def hessian_f(p: DensityPoint, o: OverlapPoint, lam: float, d: int) -> np.ndarray:
    """Hessian of the second-moment exponent with respect to (gamma, delta, epsilon)."""
    s = _Slacks(p, o)
    h_gg = -d / s.s1 - d / s.s2 + (d - 1) / s.s3 + d / s.s5 - d / s.s4 + (d - 2) / s.s6 - 1 / s.gamma
    h_gd = d / s.s1 + d / s.s4
    h_ge = -d / s.s1 - d / s.s2 + d / s.s5 - d / s.s4
    h_dd = -d / s.s4 + (d - 1) / s.left_free - d / s.s1 + (d - 2) / s.left_rest - 1 / s.delta
    h_de = d / s.s4 + d / s.s1
    h_ee = d * (-1 / s.s1 - 1 / s.s2 - 1 / s.both_free - 1 / s.epsilon - 1 / s.s4 + 1 / s.s5)
    return np.array(
        [
            [h_gg, h_gd, h_ge],
            [h_gd, h_dd, h_de],
            [h_ge, h_de, h_ee],
        ]
    )


def _eps_hat_root(p: DensityPoint, gamma: float, delta: float) -> tuple[float, float]:
    a, b = p.alpha, p.beta
    if gamma > a or delta > b:
        raise RegionViolationError(f"eps_hat needs gamma <= alpha and delta <= beta, got ({gamma}, {delta}).")
    discriminant = (1 - a - b) ** 2 + 4 * (a - gamma) * (b - delta)
    assert discriminant >= 0.0, f"negative discriminant {discriminant}"
    root = math.sqrt(discriminant)
    return 0.5 * (1 + a - b - 2 * gamma - root), root


def eps_hat(p: DensityPoint, gamma: float, delta: float) -> float:
    """The epsilon maximising the second-moment exponent at fixed (gamma, delta)."""
    return _eps_hat_root(p, gamma, delta)[0]


def eps_hat_gradient(p: DensityPoint, gamma: float, delta: float) -> np.ndarray:
    """(d eps_hat / d gamma, d eps_hat / d delta)."""
    _, root = _eps_hat_root(p, gamma, delta)
    return np.array([-1 + (p.beta - delta) / root, (p.alpha - gamma) / root])


def g_fn(p: DensityPoint, gamma: float, delta: float, lam: float, d: int) -> float:
    """The second-moment exponent with epsilon eliminated: g(gamma, delta) = f(gamma, delta, eps_hat)."""
    o = OverlapPoint(gamma, delta, eps_hat(p, gamma, delta))
    return second_moment_f(p, o, lam, d)


def grad_g(p: DensityPoint, gamma: float, delta: float, lam: float, d: int) -> np.ndarray:
    o = OverlapPoint(gamma, delta, eps_hat(p, gamma, delta))
    return grad_f(p, o, lam, d)[:2]


def hessian_g(p: DensityPoint, gamma: float, delta: float, lam: float, d: int) -> np.ndarray:
    """Second derivatives of g via the chain rule through eps_hat, using d f / d epsilon = 0 there."""
    o = OverlapPoint(gamma, delta, eps_hat(p, gamma, delta))
    h = hessian_f(p, o, lam, d)
    e_gamma, e_delta = eps_hat_gradient(p, gamma, delta)
    g_gg = h[0, 0] + e_gamma * h[0, 2]
    g_gd = h[0, 1] + e_gamma * h[1, 2]
    g_dd = h[1, 1] + e_delta * h[1, 2]
    return np.array([[g_gg, g_gd], [g_gd, g_dd]])
