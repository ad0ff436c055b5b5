from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
import logging

from mpmath import iv
import numpy as np

from src.utils.constants import POLY_GRID_POINTS, POLY_MAX_BISECTIONS

logger = logging.getLogger(__name__)


class SignClaim(str, Enum):
    POSITIVE = "positive"
    NONVANISHING = "nonvanishing"
    POSITIVE_COEFFICIENTS = "positive-coefficients"


@dataclass(frozen=True)
class PolynomialClaim:
    """A sign claim about a univariate polynomial on a closed interval; coefficients highest degree first."""

    name: str
    coefficients: tuple[Fraction, ...]
    lower: Fraction
    upper: Fraction
    claim: SignClaim


@dataclass(frozen=True)
class PolynomialCheck:
    claim: PolynomialClaim
    grid_min: float
    grid_max: float
    grid_holds: bool
    certified: bool
    subintervals: int

    @property
    def holds(self) -> bool:
        return self.grid_holds and self.certified

    def as_row(self) -> dict:
        return {
            "polynomial": self.claim.name,
            "claim": self.claim.claim.value,
            "lower": float(self.claim.lower),
            "upper": float(self.claim.upper),
            "grid_min": self.grid_min,
            "grid_max": self.grid_max,
            "grid_holds": self.grid_holds,
            "certified": self.certified,
            "subintervals": self.subintervals,
        }


@dataclass(frozen=True)
class PolynomialReport:
    d: int
    checks: list[PolynomialCheck]

    @property
    def violations(self) -> list[str]:
        return [check.claim.name for check in self.checks if not check.holds]

    @property
    def all_hold(self) -> bool:
        return not self.violations


def _poly(*coefficients) -> tuple[Fraction, ...]:
    return tuple(Fraction(c) for c in coefficients)


def taylor_shift(coefficients: tuple[Fraction, ...], shift: Fraction) -> tuple[Fraction, ...]:
    """Exact coefficients of p(x + shift), highest degree first."""
    shifted = [Fraction(0)] * len(coefficients)
    for c in coefficients:
        # shifted <- shifted * (x + shift) + c, kept highest degree first
        carried = [*shifted[1:], Fraction(0)]
        shifted = [carried[k] + shift * shifted[k] for k in range(len(shifted))]
        shifted[-1] += c
    return tuple(shifted)


def three_regular_claims() -> list[PolynomialClaim]:
    """Sign claims that rule out interior stationary points other than 1/9 at d = 3, alpha = beta = 1/3."""
    third = Fraction(1, 3)
    p_delta = _poly(
        1549681956,
        2970223749,
        -157837977,
        -36669429,
        42830208,
        -35446896,
        -4331961,
        1160487,
        22734,
        47529,
        12720,
        64,
    )
    return [
        PolynomialClaim("27e^2-9e+1", _poly(27, -9, 1), Fraction(0), third, SignClaim.POSITIVE),
        PolynomialClaim(
            "81e^4-81e^3-27e^2+12e-1", _poly(81, -81, -27, 12, -1), Fraction(0), third, SignClaim.NONVANISHING
        ),
        PolynomialClaim(
            "1296e^4-1917e^3+840e^2-97e+6", _poly(1296, -1917, 840, -97, 6), Fraction(0), third, SignClaim.POSITIVE
        ),
        PolynomialClaim("1458t^3+405t^2+24t+1", _poly(1458, 405, 24, 1), Fraction(0), third, SignClaim.POSITIVE),
        PolynomialClaim("P(t)", p_delta, Fraction(0), third, SignClaim.POSITIVE),
        PolynomialClaim(
            "P(t+0.27)",
            taylor_shift(p_delta, Fraction(27, 100)),
            Fraction(0),
            Fraction(0),
            SignClaim.POSITIVE_COEFFICIENTS,
        ),
        PolynomialClaim(
            "6561g^5-5832g^4+1377g^3+18g^2-36g+8",
            _poly(6561, -5832, 1377, 18, -36, 8),
            Fraction(0),
            third,
            SignClaim.POSITIVE,
        ),
        PolynomialClaim(
            "6561g^2-5832g+1377-80", _poly(6561, -5832, 1377 - 80), Fraction(0), Fraction(1), SignClaim.POSITIVE
        ),
        PolynomialClaim("18g^2-36g+8", _poly(18, -36, 8), Fraction(0), Fraction(1, 4), SignClaim.POSITIVE),
        PolynomialClaim("80g^3+18g^2-36g+8", _poly(80, 18, -36, 8), Fraction(1, 4), third, SignClaim.POSITIVE),
    ]


def q1_coefficients(d: int) -> tuple[Fraction, ...]:
    """Q1(d, t) = 2 d^3 (d-3) t^2 - d (d-1)(d-2) t + (d-2)(d-3)."""
    return _poly(2 * d**3 * (d - 3), -d * (d - 1) * (d - 2), (d - 2) * (d - 3))


def q2_coefficients(d: int) -> tuple[Fraction, ...]:
    return _poly(
        8 * d**6,
        4 * d**5 * (d - 8),
        d**4 * (-6 * d**2 + 8 * d + 32),
        d**3 * (10 * d**2 - 20 * d - 8),
        d * (d - 2) * (d**3 - 9 * d**2 + 8 * d - 4),
        (d - 1) * (d - 2) ** 2,
    )


def q1_vertex(d: int) -> tuple[Fraction, Fraction]:
    """Location (d-1)(d-2) / (4 d^2 (d-3)) and value of the minimum of Q1(d, .) for d >= 4."""
    location = Fraction((d - 1) * (d - 2), 4 * d**2 * (d - 3))
    value = Fraction(-((d - 1) ** 2) * (d - 2) ** 2, 8 * d * (d - 3)) + (d - 2) * (d - 3)
    return location, value


def higher_degree_claims(d: int) -> list[PolynomialClaim]:
    return [
        PolynomialClaim(f"Q1({d},t)", q1_coefficients(d), Fraction(1, d**2), Fraction(1, d), SignClaim.POSITIVE),
        PolynomialClaim(f"Q2({d},t)", q2_coefficients(d), Fraction(0), Fraction(1, d**2), SignClaim.POSITIVE),
    ]


def _interval(lower: Fraction, upper: Fraction):
    """An interval enclosing [lower, upper] with outward rounding."""
    lo = iv.mpf(lower.numerator) / lower.denominator
    hi = iv.mpf(upper.numerator) / upper.denominator
    return lo + (hi - lo) * iv.mpf([0, 1])


def _horner(coefficients: tuple[Fraction, ...], x):
    value = iv.mpf(0)
    for c in coefficients:
        value = value * x + iv.mpf(c.numerator) / c.denominator
    return value


def certify_sign(coefficients: tuple[Fraction, ...], lower: Fraction, upper: Fraction) -> tuple[int, int]:
    """
    Bisect [lower, upper] until the interval Horner enclosure of the polynomial excludes 0 on every piece.

    Returns:
        tuple[int, int]: (sign, pieces) with sign +1 or -1 when one sign is certified on the whole interval and
        0 when a piece still straddles 0 at the maximal bisection depth or the signs disagree.
    """
    pending = [(lower, upper, 0)]
    signs = set()
    pieces = 0
    while pending:
        lo, hi, depth = pending.pop()
        enclosure = _horner(coefficients, _interval(lo, hi))
        if enclosure > 0:
            signs.add(1)
            pieces += 1
        elif enclosure < 0:
            signs.add(-1)
            pieces += 1
        elif depth >= POLY_MAX_BISECTIONS:
            return 0, pieces
        else:
            mid = (lo + hi) / 2
            pending.append((lo, mid, depth + 1))
            pending.append((mid, hi, depth + 1))
        if len(signs) > 1:
            return 0, pieces
    return signs.pop(), pieces


def check_claim(claim: PolynomialClaim, grid_points: int = POLY_GRID_POINTS) -> PolynomialCheck:
    coefficients = [float(c) for c in claim.coefficients]

    if claim.claim == SignClaim.POSITIVE_COEFFICIENTS:
        positive = all(c > 0 for c in claim.coefficients)
        return PolynomialCheck(
            claim=claim,
            grid_min=min(coefficients),
            grid_max=max(coefficients),
            grid_holds=positive,
            certified=positive,
            subintervals=0,
        )

    grid = np.linspace(float(claim.lower), float(claim.upper), grid_points)
    values = np.polyval(coefficients, grid)
    grid_min, grid_max = float(values.min()), float(values.max())
    sign, pieces = certify_sign(claim.coefficients, claim.lower, claim.upper)

    if claim.claim == SignClaim.POSITIVE:
        grid_holds, certified = grid_min > 0, sign == 1
    else:
        grid_holds, certified = grid_min > 0 or grid_max < 0, sign != 0

    if not (grid_holds and certified):
        logger.warning(f"Sign claim '{claim.name}' ({claim.claim.value}) not confirmed on the interval")

    return PolynomialCheck(
        claim=claim,
        grid_min=grid_min,
        grid_max=grid_max,
        grid_holds=grid_holds,
        certified=certified,
        subintervals=pieces,
    )


def verify_appendix_polynomials(d: int, grid_points: int = POLY_GRID_POINTS) -> PolynomialReport:
    """
    Check the polynomial sign claims behind the interior-maximum results for degree d.

    d = 3 uses the explicit family obtained by eliminating variables at alpha = beta = 1/3; d >= 4 uses the
    quadratic Q1 on [1/d^2, 1/d] and the quintic Q2 on [0, 1/d^2]. Each claim is checked on a dense grid and
    certified by interval arithmetic; failures are reported, never raised.
    """
    if d < 3:
        raise ValueError(f"Polynomial claims exist for d >= 3 only, got d={d}.")

    claims = three_regular_claims() if d == 3 else higher_degree_claims(d)
    checks = [check_claim(claim, grid_points=grid_points) for claim in claims]
    report = PolynomialReport(d=d, checks=checks)
    logger.info(f"Polynomial claims for d={d}: {len(checks) - len(report.violations)}/{len(checks)} confirmed")
    return report
