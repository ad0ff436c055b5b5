from dataclasses import dataclass
import logging

from scipy.optimize import brentq

from src.utils.constants import (
    MAX_FIXED_POINT_ITERATIONS,
    ROOT_XTOL,
    UNIQUENESS_CUTOFF,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TreeFixedPoints:
    """Occupancy fixed points of the hard-core recursion on the infinite d-regular tree."""

    lam: float
    d: int
    p_star: float
    p1: float
    p2: float
    is_unique: bool

    def as_row(self) -> dict:
        return {
            "lambda": self.lam,
            "d": self.d,
            "p_star": self.p_star,
            "p1": self.p1,
            "p2": self.p2,
            "is_unique": self.is_unique,
        }


def _check_degree(d: int):
    if int(d) != d or d < 3:
        raise ValueError(f"Degree d must be an integer >= 3, got {d}.")


def _check_activity(lam: float):
    if not lam > 0:
        raise ValueError(f"Activity lambda must be positive, got {lam}.")


def lambda_c(d: int) -> float:
    """Uniqueness threshold (d-1)^(d-1) / (d-2)^d of the hard-core model on the d-regular tree."""
    _check_degree(d)
    return (d - 1) ** (d - 1) / (d - 2) ** d


def tree_recursion_raw(x: float, lam: float, d: int) -> float:
    """
    The recursion f(x) = (1-x) * (1 - (x / (lam (1-x)))^(1/d)) without clamping.

    The value is negative exactly when x > lam / (1 + lam).
    """
    if not 0 <= x < 1:
        raise ValueError(f"tree_recursion needs 0 <= x < 1, got x={x}.")
    _check_activity(lam)
    return (1 - x) * (1 - (x / (lam * (1 - x))) ** (1 / d))


def tree_recursion(x: float, lam: float, d: int) -> float:
    """The recursion f clamped at 0; see `tree_recursion_raw` for the unclamped value."""
    return max(tree_recursion_raw(x, lam, d), 0.0)


def cavity_map(q: float, lam: float, d: int) -> float:
    """Occupation probability of a vertex whose d-1 children are each occupied with probability q."""
    weight = lam * (1 - q) ** (d - 1)
    return weight / (1 + weight)


def occupancy_from_cavity(q: float, lam: float, d: int) -> float:
    """Occupation probability of a vertex all of whose d neighbours carry cavity occupancy q."""
    weight = lam * (1 - q) ** d
    return weight / (1 + weight)


def symmetric_fixed_point(lam: float, d: int) -> float:
    """
    The unique p* in [0, 1] with f(p*) = p*.

    f(x) - x is decreasing with value 1 at x = 0 and negative near x = 1, so a bracketing root finder
    always succeeds.
    """
    _check_degree(d)
    _check_activity(lam)

    upper = 1.0 - 1e-12
    p_star = brentq(lambda x: tree_recursion_raw(x, lam, d) - x, 0.0, upper, xtol=ROOT_XTOL)
    logger.debug(f"p*(lambda={lam}, d={d}) = {p_star!r}")
    return p_star


def symmetric_cavity_fixed_point(lam: float, d: int) -> float:
    """The fixed point q* of the cavity map; occupancy_from_cavity(q*) equals p*."""
    _check_degree(d)
    _check_activity(lam)
    return brentq(lambda q: cavity_map(q, lam, d) - q, 0.0, 1.0, xtol=ROOT_XTOL)


def _smallest_two_step_fixed_point(lam: float, d: int, q_star: float) -> float:
    """
    Smallest fixed point of the increasing map q -> cavity(cavity(q)).

    Iterating from 0 approaches it monotonically from below; the tail is finished by a bracketed root search
    below q*. If the two-step map has no fixed point left of q*, q* itself is returned.
    """

    def excess(q: float) -> float:
        return cavity_map(cavity_map(q, lam, d), lam, d) - q

    q = 0.0
    for _ in range(MAX_FIXED_POINT_ITERATIONS):
        q_next = cavity_map(cavity_map(q, lam, d), lam, d)
        if q_next - q < 1e-13 or q_next >= q_star:
            break
        q = q_next

    if excess(q) <= 0.0:
        return q

    gap = q_star - q
    h = gap / 2
    while h > 1e-14 * max(q_star, 1e-300):
        upper = q_star - h
        if excess(upper) < 0.0:
            return brentq(excess, q, upper, xtol=ROOT_XTOL)
        h /= 2

    logger.debug(f"No two-step fixed point below q*={q_star!r} at lambda={lam}, d={d}")
    return q_star


def semi_invariant_fixed_points(lam: float, d: int) -> TreeFixedPoints:
    """
    The symmetric fixed point together with the semi-translation-invariant pair (p1, p2).

    The pair is computed through the cavity map: its two-step iterate is increasing, its smallest fixed point
    q_a is the limit from 0 and q_b = cavity(q_a). The side whose neighbours carry q_b has occupancy p1 and the
    other side has p2, so that f(p1) = p2 and f(p2) = p1.

    Args:
        lam (float): Activity.
        d (int): Tree degree, at least 3.

    Returns:
        TreeFixedPoints: p*, p1 <= p* <= p2 and the uniqueness flag (|p2 - p1| <= 1e-9).
    """
    _check_degree(d)
    _check_activity(lam)

    p_star = symmetric_fixed_point(lam, d)
    q_star = symmetric_cavity_fixed_point(lam, d)

    q_a = _smallest_two_step_fixed_point(lam, d, q_star)
    q_b = cavity_map(q_a, lam, d)
    p1 = occupancy_from_cavity(q_b, lam, d)
    p2 = occupancy_from_cavity(q_a, lam, d)

    is_unique = abs(p2 - p1) <= UNIQUENESS_CUTOFF
    if is_unique:
        p1 = p2 = p_star

    return TreeFixedPoints(lam=lam, d=d, p_star=p_star, p1=p1, p2=p2, is_unique=is_unique)


def phase_diagram(d: int, lambdas: list[float]) -> list[TreeFixedPoints]:
    """Fixed points along a grid of activities."""
    logger.info(f"Computing tree fixed points for d={d} on {len(lambdas)} activities")
    return [semi_invariant_fixed_points(lam, d) for lam in lambdas]
