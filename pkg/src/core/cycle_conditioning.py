"""Short-cycle statistics of RG(n, d) and the quantities of small subgraph conditioning."""

from dataclasses import dataclass, field
from fractions import Fraction
import logging
import math

import numpy as np

from src.core.exact_enumeration import independent_set_count
from src.core.graph_generator import count_cycles, sample_graph
from src.core.moments import expected_Z
from src.utils.constants import MAX_SIZE_BIASED_N
from src.utils.exceptions import SizeCapExceededError
from src.utils.utils import ordered_map

logger = logging.getLogger(__name__)

JOINT_RELATIVE_TOLERANCE = 0.25


@dataclass(frozen=True)
class ConditioningSummary:
    """
    Poisson means lambda_i and tilts delta_i of the even cycle counts, with the partial sum of lambda_i delta_i^2
    and the closed form of the full sum.
    """

    d: int
    alpha: float
    beta: float
    lambdas: dict[int, float]
    deltas: dict[int, float]
    partial_sum: float
    tau_closed_form: float

    @property
    def exp_partial_sum(self) -> float:
        return math.exp(self.partial_sum)

    def as_rows(self) -> list[dict]:
        rows, running = [], 0.0
        for i, lam_i in self.lambdas.items():
            running += lam_i * self.deltas[i] ** 2
            rows.append(
                {
                    "i": i,
                    "lambda_i": lam_i,
                    "delta_i": self.deltas[i],
                    "partial_sum": running,
                    "exp_partial_sum": math.exp(running),
                    "tau_closed_form": self.tau_closed_form,
                }
            )
        return rows


@dataclass(frozen=True)
class CycleEstimate:
    """Monte Carlo estimate of a (possibly size-biased) cycle-count mean next to its targets."""

    length: int
    estimate: float
    std_err: float
    target: float
    exact_target: float = math.nan

    @property
    def z_score(self) -> float:
        return (self.estimate - self.target) / self.std_err if self.std_err > 0 else math.inf

    @property
    def exact_z_score(self) -> float:
        if math.isnan(self.exact_target):
            return math.nan
        return (self.estimate - self.exact_target) / self.std_err if self.std_err > 0 else math.inf

    def as_row(self) -> dict:
        return {
            "i": self.length,
            "estimate": self.estimate,
            "std_err": self.std_err,
            "target": self.target,
            "z_score": self.z_score,
            "exact_target": self.exact_target,
            "exact_z_score": self.exact_z_score,
        }


@dataclass(frozen=True)
class SizeBiasedReport:
    n: int
    a: int
    b: int
    d: int
    n_samples: int
    estimates: list[CycleEstimate] = field(default_factory=list)
    joint_estimate: float = math.nan
    joint_target: float = math.nan
    inconclusive: bool = False

    @property
    def joint_relative_error(self) -> float:
        return abs(self.joint_estimate - self.joint_target) / self.joint_target

    def as_rows(self) -> list[dict]:
        return [{"n": self.n, "a": self.a, "b": self.b, "d": self.d, **e.as_row()} for e in self.estimates]


@dataclass(frozen=True)
class LowerTailReport:
    """Fraction of sampled graphs with Z^{a,b} >= E[Z^{a,b}] / n."""

    n: int
    a: int
    b: int
    n_samples: int
    hits: int
    log_threshold: float

    @property
    def fraction(self) -> float:
        return self.hits / self.n_samples

    @property
    def std_err(self) -> float:
        p = self.fraction
        return math.sqrt(p * (1 - p) / self.n_samples)

    def as_row(self) -> dict:
        return {
            "n": self.n,
            "a": self.a,
            "b": self.b,
            "n_samples": self.n_samples,
            "fraction": self.fraction,
            "std_err": self.std_err,
            "log_threshold": self.log_threshold,
        }


def _check_length(i: int):
    if i < 2 or i % 2:
        raise ValueError(f"Cycle length must be an even integer >= 2, got {i}.")


def cycle_lambda(d: int, i: int) -> float:
    """Poisson mean ((d-1)^i + (d-1)) / i of the number of i-cycles in RG(n, d)."""
    _check_length(i)
    return ((d - 1) ** i + (d - 1)) / i


def cycle_delta(alpha: float, beta: float, i: int) -> float:
    """Relative tilt of the i-cycle mean under the Z^{alpha,beta}-biased measure."""
    _check_length(i)
    return (alpha * beta / ((1 - alpha) * (1 - beta))) ** (i / 2)


def _rho(x: float) -> float:
    return -0.5 * (math.log1p(-x) + math.log1p(x))


def conditioning_summary(alpha: float, beta: float, d: int, i_max: int) -> ConditioningSummary:
    """
    lambda_i and delta_i for even i <= i_max, with sum lambda_i delta_i^2 and its limit
    rho((d-1) x) + (d-1) rho(x), x = alpha beta / ((1-alpha)(1-beta)), rho(x) = -ln(1 - x^2) / 2.
    """
    _check_length(i_max)
    lengths = range(2, i_max + 1, 2)
    lambdas = {i: cycle_lambda(d, i) for i in lengths}
    deltas = {i: cycle_delta(alpha, beta, i) for i in lengths}
    partial_sum = math.fsum(lambdas[i] * deltas[i] ** 2 for i in lengths)

    x = alpha * beta / ((1 - alpha) * (1 - beta))
    if (d - 1) * x >= 1:
        tau_closed_form = math.inf
    else:
        tau_closed_form = math.exp(_rho((d - 1) * x) + (d - 1) * _rho(x))

    return ConditioningSummary(
        d=d,
        alpha=alpha,
        beta=beta,
        lambdas=lambdas,
        deltas=deltas,
        partial_sum=partial_sum,
        tau_closed_form=tau_closed_form,
    )


def cycle_statistics(
    n: int, d: int, i_max: int, n_samples: int, seed: int, threads: int = 1
) -> list[CycleEstimate]:
    """Monte Carlo means of X_i, i even <= i_max, over RG(n, d), against the Poisson means lambda_i."""
    _check_length(i_max)
    if n_samples < 2:
        raise ValueError(f"At least two samples are needed, got n_samples={n_samples}.")

    def census(index: int) -> list[int]:
        counts = count_cycles(sample_graph(n, d, seed, index), i_max)
        return [counts[i] for i in range(2, i_max + 1, 2)]

    logger.info(f"Counting cycles up to length {i_max} on {n_samples} graphs (n={n}, d={d})")
    table = np.array(ordered_map(census, range(n_samples), threads=threads), dtype=float)
    estimates = []
    for column, i in enumerate(range(2, i_max + 1, 2)):
        values = table[:, column]
        estimates.append(
            CycleEstimate(
                length=i,
                estimate=float(values.mean()),
                std_err=float(values.std(ddof=1) / math.sqrt(n_samples)),
                target=cycle_lambda(d, i),
            )
        )
    return estimates


def _falling(x: int, m: int) -> int:
    return math.perm(x, m) if 0 <= m <= x else 0


def exact_size_biased_two_cycles(n: int, a: int, b: int, d: int) -> float:
    """
    E[Y X_2] / E[Y] at finite n, where Y counts independent sets with a vertices in V1 and b in V2.

    A 2-cycle is a pair of matchings agreeing at some u; by linearity the ratio is
    C(d, 2) * sum_{u, v} q(u, v)^2 / P^2 with P = P(one matching keeps a fixed (S, T) independent) and
    q(u, v) = P(it does so and maps u to v).
    """
    if a + b > n:
        raise ValueError(f"No independent set has a + b > n, got a={a}, b={b}, n={n}.")
    if d < 2:
        return 0.0

    avoid = Fraction(_falling(n - b, a), _falling(n, a))
    if a > 0:
        inside = Fraction(_falling(n - b - 1, a - 1), n * _falling(n - 1, a - 1))
    else:
        inside = Fraction(0)
    outside_free = Fraction(_falling(n - b - 1, a), n * _falling(n - 1, a))
    outside_blocked = Fraction(_falling(n - b, a), n * _falling(n - 1, a))

    total = a * (n - b) * inside**2 + (n - a) * ((n - b) * outside_free**2 + b * outside_blocked**2)
    return float(math.comb(d, 2) * total / avoid**2)


def _size_biased_sample(n: int, a: int, b: int, d: int, lengths: list[int], seed: int, index: int):
    g = sample_graph(n, d, seed, index)
    census = count_cycles(g, max(lengths))
    return independent_set_count(g, a, b), [census[i] for i in lengths]


def size_biased_cycle_check(
    n: int,
    a: int,
    b: int,
    d: int,
    lengths: list[int],
    n_samples: int,
    seed: int,
    threads: int = 1,
) -> SizeBiasedReport:
    """
    Monte Carlo estimate of E[Y X_i] / E[Y] with Y the exact number of independent sets at occupancy (a, b).

    Each estimate carries the delta-method standard error of a ratio estimator and is compared with the limit
    lambda_i (1 + delta_i); for i = 2 the exact finite-n value is reported as well. The joint moment
    E[Y prod X_i] / E[Y] is compared with prod lambda_i (1 + delta_i).

    Raises:
        SizeCapExceededError: If n exceeds MAX_SIZE_BIASED_N.
    """
    if n > MAX_SIZE_BIASED_N:
        raise SizeCapExceededError(f"Size-biased check enumerates Y exactly and supports n <= {MAX_SIZE_BIASED_N}.")
    for i in lengths:
        _check_length(i)
    if n_samples < 2:
        raise ValueError(f"At least two samples are needed, got n_samples={n_samples}.")

    lengths = sorted(set(lengths))
    logger.info(f"Size-biased cycle check on {n_samples} graphs (n={n}, a={a}, b={b}, d={d}, lengths={lengths})")
    samples = ordered_map(
        lambda index: _size_biased_sample(n, a, b, d, lengths, seed, index), range(n_samples), threads=threads
    )
    weights = np.array([float(y) for y, _ in samples])
    counts = np.array([x for _, x in samples], dtype=float)

    if weights.sum() == 0:
        logger.warning("Every sampled graph has Y = 0; size-biased check inconclusive")
        return SizeBiasedReport(n=n, a=a, b=b, d=d, n_samples=n_samples, inconclusive=True)

    alpha, beta = a / n, b / n
    mean_weight = weights.mean()
    estimates = []
    for column, i in enumerate(lengths):
        ratio = float((weights * counts[:, column]).sum() / weights.sum())
        residual = weights * (counts[:, column] - ratio)
        std_err = float(residual.std(ddof=1) / (math.sqrt(n_samples) * mean_weight))
        estimates.append(
            CycleEstimate(
                length=i,
                estimate=ratio,
                std_err=std_err,
                target=cycle_lambda(d, i) * (1 + cycle_delta(alpha, beta, i)),
                exact_target=exact_size_biased_two_cycles(n, a, b, d) if i == 2 else math.nan,
            )
        )

    joint = float((weights * counts.prod(axis=1)).sum() / weights.sum())
    joint_target = math.prod(cycle_lambda(d, i) * (1 + cycle_delta(alpha, beta, i)) for i in lengths)
    return SizeBiasedReport(
        n=n,
        a=a,
        b=b,
        d=d,
        n_samples=n_samples,
        estimates=estimates,
        joint_estimate=joint,
        joint_target=joint_target,
    )


def aas_lower_tail(
    n: int, a: int, b: int, lam: float, d: int, n_samples: int, seed: int, threads: int = 1
) -> LowerTailReport:
    """
    Fraction of sampled graphs on which Z^{a,b} = lam^(a+b) Y reaches E[Z^{a,b}] / n.

    Raises:
        SizeCapExceededError: If n exceeds MAX_SIZE_BIASED_N.
    """
    if n > MAX_SIZE_BIASED_N:
        raise SizeCapExceededError(f"Lower-tail check enumerates Y exactly and supports n <= {MAX_SIZE_BIASED_N}.")
    if n_samples < 1:
        raise ValueError(f"n_samples must be positive, got {n_samples}.")

    log_threshold = expected_Z(n, a, b, lam, d) - math.log(n)

    def reaches(index: int) -> bool:
        y = independent_set_count(sample_graph(n, d, seed, index), a, b)
        return y > 0 and math.log(y) + (a + b) * math.log(lam) >= log_threshold

    hits = sum(ordered_map(reaches, range(n_samples), threads=threads))
    return LowerTailReport(n=n, a=a, b=b, n_samples=n_samples, hits=hits, log_threshold=log_threshold)
