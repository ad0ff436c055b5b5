"""
Exact first and second moments of Z^{a,b} over RG(n, d) and the limiting ratio tau^{alpha,beta}(d).

Everything is computed in log space: binomials through log-gamma, sums through log-sum-exp. A log-value of
-inf stands for an exact zero.
"""

from dataclasses import dataclass
import logging
import math

import numpy as np
from scipy.integrate import dblquad, quad
from scipy.special import gammaln, logsumexp

from src.utils.constants import (
    QUADRATURE_EPSABS,
    QUADRATURE_EPSREL,
    QUADRATURE_FAIL_TOL,
    QUADRATURE_SIGMA_BOX,
)
from src.utils.exceptions import QuadratureError
from src.utils.utils import ordered_map

logger = logging.getLogger(__name__)

RATIO_SLACK = 1e-9


@dataclass(frozen=True)
class MomentPoint:
    """Exact log-moments of Z^{a,b} at one size n; the ratio is E[Z^2] / E[Z]^2."""

    n: int
    a: int
    b: int
    lam: float
    d: int
    log_EZ: float
    log_EZ2: float

    @property
    def ratio(self) -> float:
        if self.log_EZ == -math.inf:
            return math.nan
        return math.exp(self.log_EZ2 - 2 * self.log_EZ)

    def as_row(self) -> dict:
        return {
            "n": self.n,
            "a": self.a,
            "b": self.b,
            "lambda": self.lam,
            "d": self.d,
            "log_EZ": self.log_EZ,
            "log_EZ2": self.log_EZ2,
            "ratio": self.ratio,
        }


@dataclass(frozen=True)
class TauQuadrature:
    """The limiting ratio evaluated from its integral representation, next to the closed form."""

    alpha: float
    beta: float
    d: int
    closed_form: float
    gaussian: float
    inner_closed: float
    inner_closed_error: float
    nested: float
    nested_error: float

    @property
    def max_difference(self) -> float:
        values = [self.closed_form, self.gaussian, self.inner_closed, self.nested]
        return max(values) - min(values)

    def as_row(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "d": self.d,
            "tau": self.closed_form,
            "tau_gaussian": self.gaussian,
            "tau_inner_closed": self.inner_closed,
            "tau_inner_closed_error": self.inner_closed_error,
            "tau_nested": self.nested,
            "tau_nested_error": self.nested_error,
            "max_difference": self.max_difference,
        }


def log_binom(n, k):
    """ln C(n, k) for integer arrays, -inf outside 0 <= k <= n."""
    n = np.asarray(n, dtype=float)
    k = np.asarray(k, dtype=float)
    valid = (k >= 0) & (k <= n)
    safe_n = np.where(valid, n, 0.0)
    safe_k = np.where(valid, k, 0.0)
    value = gammaln(safe_n + 1) - gammaln(safe_k + 1) - gammaln(safe_n - safe_k + 1)
    value = np.where(valid, value, -np.inf)
    return float(value) if value.ndim == 0 else value


def _check_counts(n: int, a: int, b: int, lam: float, d: int):
    errors = []
    if n < 1:
        errors.append(f"n must be >= 1, got {n}.")
    if not 0 <= a <= n:
        errors.append(f"a must lie in [0, n], got a={a} with n={n}.")
    if not 0 <= b <= n:
        errors.append(f"b must lie in [0, n], got b={b} with n={n}.")
    if not lam > 0:
        errors.append(f"lambda must be positive, got {lam}.")
    if d < 1:
        errors.append(f"d must be >= 1, got {d}.")
    if errors:
        raise ValueError("\n".join(errors))


def expected_Z(n: int, a: int, b: int, lam: float, d: int) -> float:
    """
    ln E[Z^{a,b}] = ln [C(n,a) C(n,b) lam^(a+b) (C(n-b, a) / C(n, a))^d].

    Returns:
        float: The log-expectation, -inf when a > n - b.
    """
    _check_counts(n, a, b, lam, d)
    if a > n - b:
        return -math.inf
    return (
        log_binom(n, a)
        + log_binom(n, b)
        + (a + b) * math.log(lam)
        + d * (log_binom(n - b, a) - log_binom(n, a))
    )


def log_avoidance_term(n: int, a: int, b: int, c: int, e, k):
    """
    Log-probability of the k-th case in which one uniform matching keeps two independent sets independent.

    The sets have a vertices in V1 sharing c, and b vertices in V2 sharing e; k counts the vertices of the first
    set outside the second whose partners avoid both V2 sets. Divided by n it tends to Psi2 at (c, e, k) / n.
    """
    e = np.asarray(e, dtype=float)
    k = np.asarray(k, dtype=float)
    both_free = n - 2 * b + e
    common = log_binom(both_free, c) - log_binom(n, c)
    first_rest = log_binom(both_free - c, k) + log_binom(b - e, a - c - k) - log_binom(n - c, a - c)
    second_rest = log_binom(n - b - c - k, a - c) - log_binom(n - a, a - c)
    return common + first_rest + second_rest


def _log_second_moment_slice(n: int, a: int, b: int, d: int, c: int) -> float:
    """Contribution of V1-overlap c to ln E[Z^2] / lam^(2(a+b))."""
    e = np.arange(max(0, 2 * b - n), b + 1, dtype=float)[:, None]
    k = np.arange(0, a - c + 1, dtype=float)[None, :]

    with np.errstate(divide="ignore", invalid="ignore"):
        avoidance = logsumexp(log_avoidance_term(n, a, b, c, e, k), axis=1)
    avoidance = np.where(np.isnan(avoidance), -np.inf, avoidance)

    pairs_v1 = log_binom(n, a) + log_binom(a, c) + log_binom(n - a, a - c)
    pairs_v2 = log_binom(n, b) + log_binom(b, e[:, 0]) + log_binom(n - b, b - e[:, 0])
    terms = pairs_v1 + pairs_v2 + d * avoidance
    return float(logsumexp(terms)) if np.isfinite(terms).any() else -math.inf


def expected_Z2(n: int, a: int, b: int, lam: float, d: int, threads: int = 1) -> float:
    """
    ln E[(Z^{a,b})^2] as an exact sum over the overlaps of two independent sets.

    The outer sum runs over the V1 overlap c, the middle one over the V2 overlap e; for each (c, e) the
    per-matching avoidance probability is the exact sum over k, raised to the power d. Slices over c may be
    evaluated in parallel; they are reduced in order of c.

    Returns:
        float: The log second moment, -inf when no pair of sets survives.
    """
    _check_counts(n, a, b, lam, d)
    if a > n - b:
        return -math.inf

    overlaps = range(max(0, 2 * a - n), a + 1)
    slices = ordered_map(lambda c: _log_second_moment_slice(n, a, b, d, c), overlaps, threads=threads)
    finite = [value for value in slices if value > -math.inf]
    if not finite:
        return -math.inf
    return float(logsumexp(finite)) + 2 * (a + b) * math.log(lam)


def moment_point(n: int, a: int, b: int, lam: float, d: int, threads: int = 1) -> MomentPoint:
    point = MomentPoint(
        n=n,
        a=a,
        b=b,
        lam=lam,
        d=d,
        log_EZ=expected_Z(n, a, b, lam, d),
        log_EZ2=expected_Z2(n, a, b, lam, d, threads=threads),
    )
    if point.ratio < 1 - RATIO_SLACK:
        logger.warning(f"Moment ratio {point.ratio!r} below 1 at n={n}, a={a}, b={b}, d={d}")
    return point


def _divergence_margins(alpha: float, beta: float, d: int) -> tuple[float, float]:
    free = 1 - alpha - beta
    return free, free - (d - 2) * alpha * beta


def tau_diverges(alpha: float, beta: float, d: int) -> bool:
    """True where the limiting ratio is infinite: 1-alpha-beta <= 0 or 1-alpha-beta-(d-2) alpha beta <= 0."""
    return min(_divergence_margins(alpha, beta, d)) <= 0


def tau(alpha: float, beta: float, d: int) -> float:
    """
    The limit of E[(Z^{alpha n, beta n})^2] / E[Z^{alpha n, beta n}]^2.

    tau = ((1-alpha)(1-beta))^d / [(1-alpha-beta+2 alpha beta)^((d-1)/2) (1-alpha-beta)^((d-1)/2)
          sqrt(1-alpha-beta+d alpha beta) sqrt(1-alpha-beta-(d-2) alpha beta)]

    Returns:
        float: tau, or math.inf where it diverges (see `tau_diverges`).
    """
    if tau_diverges(alpha, beta, d):
        logger.warning(f"tau diverges at alpha={alpha}, beta={beta}, d={d}")
        return math.inf

    free, margin = _divergence_margins(alpha, beta, d)
    ab = alpha * beta
    log_numerator = d * (math.log1p(-alpha) + math.log1p(-beta))
    log_denominator = (
        0.5 * (d - 1) * (math.log(free + 2 * ab) + math.log(free))
        + 0.5 * math.log(free + d * ab)
        + 0.5 * math.log(margin)
    )
    return math.exp(log_numerator - log_denominator)


def star_hessian(alpha: float, beta: float, d: int) -> np.ndarray:
    """Closed-form Hessian of the second-moment exponent at the overlap (alpha^2, beta^2, alpha(1-alpha-beta))."""
    a, b = alpha, beta
    free = 1 - a - b
    h11 = (
        (a + d - 2) / (a * (a - 1) ** 2)
        - (b + d * a) / (a**2 * b)
        + d / ((1 - a) * (1 - b))
        - d / (b * (1 - b) * free)
    )
    h12 = d / (b * (1 - b) * free)
    h13 = -d * (1 - a - 2 * b + 2 * a * b + b**2) / (a * b * (1 - a) * (1 - b) * free)
    h22 = -(free + d * a * b) / (b**2 * (1 - b) ** 2 * free)
    h23 = d / (b * (1 - b) * free)
    h33 = -d * (free + 2 * a * b) / (a * b * (1 - a) * (1 - b) * free)
    return np.array(
        [
            [h11, h12, h13],
            [h12, h22, h23],
            [h13, h23, h33],
        ]
    )


def a_d(alpha: float, beta: float) -> float:
    """A_d = (1-alpha)(1-beta) / sqrt((1-alpha-beta+2 alpha beta)(1-alpha-beta))."""
    free = 1 - alpha - beta
    return (1 - alpha) * (1 - beta) / math.sqrt((free + 2 * alpha * beta) * free)


def epsilon_quadratic(hessian: np.ndarray, d: int, gamma: float, delta: float) -> tuple[float, float, float]:
    """Coefficients (A, B, C) of (1/2d) v^T H v = A e^2 + B e + C for v = (gamma, delta, e)."""
    h = hessian
    quad_a = h[2, 2] / (2 * d)
    quad_b = (h[0, 2] * gamma + h[1, 2] * delta) / d
    quad_c = (h[0, 0] * gamma**2 + 2 * h[0, 1] * gamma * delta + h[1, 1] * delta**2) / (2 * d)
    return quad_a, quad_b, quad_c


def b_d(hessian: np.ndarray, d: int, gamma: float, delta: float) -> float:
    """B_d = (B^2 - 4 A C) / (4 A)."""
    quad_a, quad_b, quad_c = epsilon_quadratic(hessian, d, gamma, delta)
    return (quad_b**2 - 4 * quad_a * quad_c) / (4 * quad_a)


def _overlap_precision(hessian: np.ndarray) -> np.ndarray:
    """-S where S is the Schur complement of the epsilon entry; exp(v^T S v / 2) is the (gamma, delta) weight."""
    h = hessian
    column = h[:2, 2]
    return -(h[:2, :2] - np.outer(column, column) / h[2, 2])


def _check_strict(label: str, error: float, strict: bool):
    if error > QUADRATURE_FAIL_TOL:
        message = f"{label} quadrature did not converge"
        if strict:
            raise QuadratureError(message, error)
        logger.warning(f"{message}; error estimate {error:.3e}")


def tau_by_quadrature(alpha: float, beta: float, d: int, strict: bool = False) -> TauQuadrature:
    """
    Evaluate the integral representation of tau at the star overlap in three ways.

    The Gaussian value integrates the (gamma, delta) weight analytically. `inner_closed` integrates
    (A_d exp(-B_d))^d numerically over a box of QUADRATURE_SIGMA_BOX standard deviations; `nested` also
    evaluates the epsilon integral numerically and raises it to the power d.

    Args:
        alpha (float): Density on V1.
        beta (float): Density on V2.
        d (int): Degree.
        strict (bool): Raise QuadratureError instead of reporting when an error estimate exceeds
            QUADRATURE_FAIL_TOL.

    Returns:
        TauQuadrature: All evaluations with their error estimates.

    Raises:
        ValueError: If the Hessian at the star overlap is not negative definite.
    """
    hessian = star_hessian(alpha, beta, d)
    if np.linalg.eigvalsh(hessian).max() >= 0:
        raise ValueError(f"Hessian at the star overlap is not negative definite at ({alpha}, {beta}), d={d}.")

    closed_form = tau(alpha, beta, d)
    a_const = a_d(alpha, beta)
    normaliser = 2 * math.pi * alpha * (1 - alpha) * beta * (1 - beta)

    precision = _overlap_precision(hessian)
    gaussian = a_const**d / (normaliser / (2 * math.pi) * math.sqrt(np.linalg.det(precision)))

    covariance = np.linalg.inv(precision)
    gamma_box = QUADRATURE_SIGMA_BOX * math.sqrt(covariance[0, 0])
    delta_box = QUADRATURE_SIGMA_BOX * math.sqrt(covariance[1, 1])

    def inner_closed_integrand(delta, gamma):
        return (a_const * math.exp(-b_d(hessian, d, gamma, delta))) ** d / normaliser

    inner_closed, inner_closed_error = dblquad(
        inner_closed_integrand,
        -gamma_box,
        gamma_box,
        -delta_box,
        delta_box,
        epsabs=QUADRATURE_EPSABS,
        epsrel=QUADRATURE_EPSREL,
    )
    _check_strict("closed-inner", inner_closed_error, strict)

    prefactor = math.sqrt((1 - alpha) * (1 - beta) / (alpha * beta)) / ((1 - alpha - beta) * math.sqrt(2 * math.pi))
    epsilon_sigma = math.sqrt(d / -hessian[2, 2])

    def epsilon_integral(gamma, delta):
        quad_a, quad_b, quad_c = epsilon_quadratic(hessian, d, gamma, delta)
        center = -quad_b / (2 * quad_a)
        width = QUADRATURE_SIGMA_BOX * epsilon_sigma
        value, _ = quad(
            lambda e: math.exp(quad_a * e * e + quad_b * e + quad_c),
            center - width,
            center + width,
            epsabs=QUADRATURE_EPSABS,
            epsrel=QUADRATURE_EPSREL,
        )
        return value

    def nested_integrand(delta, gamma):
        return (prefactor * epsilon_integral(gamma, delta)) ** d / normaliser

    nested, nested_error = dblquad(
        nested_integrand,
        -gamma_box,
        gamma_box,
        -delta_box,
        delta_box,
        epsabs=QUADRATURE_EPSABS,
        epsrel=QUADRATURE_EPSREL,
    )
    _check_strict("nested", nested_error, strict)

    result = TauQuadrature(
        alpha=alpha,
        beta=beta,
        d=d,
        closed_form=closed_form,
        gaussian=gaussian,
        inner_closed=inner_closed,
        inner_closed_error=inner_closed_error,
        nested=nested,
        nested_error=nested_error,
    )
    logger.debug(f"tau quadrature at ({alpha}, {beta}), d={d}: spread {result.max_difference:.3e}")
    return result


def density_counts(n: int, alpha: float, beta: float) -> tuple[int, int]:
    """(a, b) = (alpha n, beta n), which must be integers."""
    a, b = round(alpha * n), round(beta * n)
    if abs(a - alpha * n) > 1e-9 or abs(b - beta * n) > 1e-9:
        raise ValueError(f"n={n} does not give integer occupancies for alpha={alpha}, beta={beta}.")
    return a, b


def ratio_series(
    n_list: list[int], alpha: float, beta: float, lam: float, d: int, threads: int = 1
) -> list[dict]:
    """
    Exact E[Z^2] / E[Z]^2 along increasing n at fixed densities, next to its limit tau.

    Returns:
        list[dict]: One row per n with the columns of MomentPoint plus tau and abs_err.
    """
    limit = tau(alpha, beta, d)
    rows = []
    for n in n_list:
        a, b = density_counts(n, alpha, beta)
        point = moment_point(n, a, b, lam, d, threads=threads)
        logger.info(f"n={n}: ratio={point.ratio:.8f}, tau={limit:.8f}")
        rows.append({**point.as_row(), "tau": limit, "abs_err": abs(point.ratio - limit)})
    return rows
