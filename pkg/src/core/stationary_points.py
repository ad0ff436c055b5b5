from collections.abc import Callable
from dataclasses import dataclass, field
import logging

import numpy as np
from scipy.linalg import eigvalsh
from scipy.stats import qmc

from src.core.exponents import (
    DensityPoint,
    OverlapPoint,
    grad_f,
    hessian_f,
    is_in_region,
    phi1,
    phi1_gradient,
    phi1_hessian,
    phi1_values,
    second_moment_f,
)
from src.core.tree_gibbs import semi_invariant_fixed_points
from src.utils.constants import (
    CLUSTER_RADIUS,
    DEFAULT_N_STARTS,
    MAXIMUM_EIGENVALUE_CUTOFF,
    MIN_N_STARTS,
    NEWTON_MAX_ITERATIONS,
    PHI1_GRID_POINTS,
    REGION_SLACK_TOL,
    START_SHRINK,
    STATIONARY_GRADIENT_TOL,
)
from src.utils.utils import ordered_map

logger = logging.getLogger(__name__)

NEWTON_GRADIENT_TOL = 1e-11
ARMIJO = 1e-4
MIN_STEP = 1e-14


@dataclass(frozen=True)
class NewtonResult:
    x: np.ndarray
    gradient_norm: float
    iterations: int
    converged: bool
    status: str


@dataclass(frozen=True)
class StationaryPoint:
    """One cluster of converged starts."""

    point: OverlapPoint
    value: float
    gradient_norm: float
    hessian: np.ndarray
    eigenvalues: np.ndarray
    is_max: bool
    hits: int


@dataclass(frozen=True)
class FailedStart:
    start: np.ndarray
    status: str
    gradient_norm: float


@dataclass(frozen=True)
class StationaryReport:
    """
    Outcome of a multistart stationary-point search of the second-moment exponent over the overlap region.

    Points are ordered by decreasing value, so the attributes of the first point describe the best maximum.
    """

    density: DensityPoint
    points: list[StationaryPoint]
    failed_starts: list[FailedStart]
    n_starts: int
    unique_in_region: bool

    @property
    def point(self) -> OverlapPoint | None:
        return self.points[0].point if self.points else None

    @property
    def value(self) -> float:
        return self.points[0].value if self.points else float("nan")

    @property
    def gradient_norm(self) -> float:
        return self.points[0].gradient_norm if self.points else float("nan")

    @property
    def hessian(self) -> np.ndarray | None:
        return self.points[0].hessian if self.points else None

    @property
    def is_max(self) -> bool:
        return bool(self.points) and self.points[0].is_max

    def as_rows(self) -> list[dict]:
        rows = []
        for sp in self.points:
            eigs = sorted(sp.eigenvalues)
            rows.append(
                {
                    "alpha": self.density.alpha,
                    "beta": self.density.beta,
                    "gamma": sp.point.gamma,
                    "delta": sp.point.delta,
                    "epsilon": sp.point.epsilon,
                    "value": sp.value,
                    "grad_norm": sp.gradient_norm,
                    "eig1": eigs[0],
                    "eig2": eigs[1],
                    "eig3": eigs[2],
                    "is_max": sp.is_max,
                    "hits": sp.hits,
                }
            )
        return rows


@dataclass(frozen=True)
class Phi1Stationary:
    alpha: float
    beta: float
    value: float
    eigenvalues: np.ndarray
    is_max: bool


@dataclass(frozen=True)
class Phi1Maximization:
    """Stationary points and maximizers of the first-moment exponent over the triangle."""

    lam: float
    d: int
    stationary: list[Phi1Stationary]
    maximizers: list[Phi1Stationary]
    symmetric_eigenvalues: np.ndarray
    symmetric_is_saddle: bool
    failed_starts: int = field(default=0)


@dataclass(frozen=True)
class BottleneckExponent:
    """
    Exponent bookkeeping of the balanced-set bottleneck.

    `tilted_min` is the smallest Phi1 value on the delta-box around the tilted maximizer, `balanced_max` the
    largest Phi1 value on the strip |x - y| <= delta; a positive `epsilon` makes the balanced sets exponentially
    rarer, by at least a factor exp(-epsilon n / 4), than either tilted side.
    """

    lam: float
    d: int
    delta: float
    alpha: float
    beta: float
    tilted_min: float
    balanced_max: float
    epsilon: float
    decay_base: float


def characteristic_polynomial(matrix: np.ndarray) -> np.ndarray:
    """Coefficients of det(x I - matrix), leading coefficient first."""
    return np.poly(matrix)


def newton_root(
    gradient: Callable[[np.ndarray], np.ndarray],
    hessian: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    feasible: Callable[[np.ndarray], bool],
    max_iterations: int = NEWTON_MAX_ITERATIONS,
    tolerance: float = NEWTON_GRADIENT_TOL,
) -> NewtonResult:
    """
    Newton's method on gradient(x) = 0 with a backtracking line search on 0.5 |gradient|^2.

    Every trial point must satisfy `feasible`. When the Newton direction is unusable (singular Hessian or no
    acceptable step) a Levenberg-Marquardt step with growing damping is tried instead.
    """
    x = np.asarray(x0, dtype=float).copy()
    g = gradient(x)
    merit = 0.5 * float(g @ g)

    for iteration in range(1, max_iterations + 1):
        if np.sqrt(2 * merit) <= tolerance:
            return NewtonResult(x, float(np.sqrt(2 * merit)), iteration - 1, True, "gradient below tolerance")

        h = hessian(x)
        candidates = []
        try:
            candidates.append(np.linalg.solve(h, -g))
        except np.linalg.LinAlgError:
            pass
        scale = max(1.0, float(np.max(np.abs(h))))
        for damping in (1e-8, 1e-5, 1e-2, 1.0):
            mu = damping * scale
            candidates.append(np.linalg.solve(h.T @ h + mu * mu * np.eye(len(x)), -(h.T @ g)))

        accepted = False
        for direction in candidates:
            if not np.all(np.isfinite(direction)):
                continue
            step = 1.0
            while step >= MIN_STEP:
                trial = x + step * direction
                if feasible(trial):
                    g_trial = gradient(trial)
                    merit_trial = 0.5 * float(g_trial @ g_trial)
                    if merit_trial <= (1 - ARMIJO * step) * merit:
                        x, g, merit = trial, g_trial, merit_trial
                        accepted = True
                        break
                step /= 2
            if accepted:
                break

        if not accepted:
            norm = float(np.sqrt(2 * merit))
            status = "gradient below tolerance" if norm <= tolerance else "line search failed"
            return NewtonResult(x, norm, iteration, norm <= tolerance, status)

    norm = float(np.sqrt(2 * merit))
    converged = norm <= tolerance
    return NewtonResult(x, norm, max_iterations, converged, "iterations exceeded" if not converged else "ok")


def _cluster(points: list[np.ndarray], radius: float) -> list[list[int]]:
    """Greedy clustering in a fixed (lexicographic) order so that the result is deterministic."""
    order = sorted(range(len(points)), key=lambda i: tuple(points[i]))
    clusters: list[list[int]] = []
    for i in order:
        for cluster in clusters:
            if np.linalg.norm(points[i] - points[cluster[0]]) <= radius:
                cluster.append(i)
                break
        else:
            clusters.append([i])
    return clusters


def overlap_starts(p: DensityPoint, n_starts: int, seed: int) -> np.ndarray:
    """
    Quasi-random starting overlaps spread through the interior of the region.

    Sobol points in the unit cube are mapped coordinate by coordinate onto the admissible ranges of gamma,
    delta and epsilon, each shrunk away from its end points.
    """
    sampler = qmc.Sobol(d=3, scramble=True, seed=seed)
    unit = sampler.random_base2(m=max(int(np.ceil(np.log2(n_starts))), 0))[:n_starts]
    margin = (1 - START_SHRINK) / 2
    unit = margin + START_SHRINK * unit

    a, b = p.alpha, p.beta
    starts = np.empty_like(unit)
    for row, (u1, u2, u3) in enumerate(unit):
        gamma_lo = max(0.0, 2 * a - 1)
        gamma = gamma_lo + (a - gamma_lo) * u1
        delta_lo = max(0.0, 2 * b - 1)
        delta = delta_lo + (b - delta_lo) * u2
        eps_lo = max(0.0, (a - gamma) - (b - delta))
        eps_hi = min(a - gamma, 1 - 2 * b + delta - gamma, 1 - a - b)
        starts[row] = (gamma, delta, eps_lo + (eps_hi - eps_lo) * u3)
    return starts


def find_stationary_points(
    p: DensityPoint,
    lam: float,
    d: int,
    n_starts: int = DEFAULT_N_STARTS,
    seed: int = 0,
    threads: int = 1,
) -> StationaryReport:
    """
    Locate every stationary point of the second-moment exponent in the interior of the overlap region.

    Args:
        p (DensityPoint): Densities (alpha, beta).
        lam (float): Activity; it shifts the exponent by a constant and does not move stationary points.
        d (int): Degree.
        n_starts (int): Number of Sobol starts, at least 100.
        seed (int): Scrambling seed of the Sobol sequence.
        threads (int): Parallel Newton runs; results are aggregated in start order.

    Returns:
        StationaryReport: Distinct stationary points with Hessian classification, plus every failed start.
    """
    if n_starts < MIN_N_STARTS:
        raise ValueError(f"n_starts must be at least {MIN_N_STARTS}, got {n_starts}.")

    def gradient(x):
        return grad_f(p, OverlapPoint.from_array(x), lam, d)

    def hessian(x):
        return hessian_f(p, OverlapPoint.from_array(x), lam, d)

    def feasible(x):
        return is_in_region(p, OverlapPoint.from_array(x), min_slack=REGION_SLACK_TOL)

    starts = overlap_starts(p, n_starts, seed)

    def run(start):
        if not feasible(start):
            return NewtonResult(start, float("nan"), 0, False, "infeasible start")
        return newton_root(gradient, hessian, start, feasible)

    logger.info(f"Multistart search at alpha={p.alpha:.6f}, beta={p.beta:.6f}, d={d} with {n_starts} starts")
    results = ordered_map(run, starts, threads=threads)

    converged = [r for r in results if r.converged]
    failed = [
        FailedStart(start=s, status=r.status, gradient_norm=r.gradient_norm)
        for s, r in zip(starts, results, strict=True)
        if not r.converged
    ]
    if failed:
        logger.warning(f"{len(failed)} of {n_starts} starts did not converge")

    points = []
    for cluster in _cluster([r.x for r in converged], CLUSTER_RADIUS):
        best = min((converged[i] for i in cluster), key=lambda r: r.gradient_norm)
        overlap = OverlapPoint.from_array(best.x)
        h = hessian_f(p, overlap, lam, d)
        eigenvalues = eigvalsh(h)
        points.append(
            StationaryPoint(
                point=overlap,
                value=second_moment_f(p, overlap, lam, d),
                gradient_norm=best.gradient_norm,
                hessian=h,
                eigenvalues=eigenvalues,
                is_max=bool(np.all(eigenvalues < MAXIMUM_EIGENVALUE_CUTOFF)),
                hits=len(cluster),
            )
        )
    points.sort(key=lambda sp: -sp.value)

    unique = len(points) == 1 and points[0].is_max and points[0].gradient_norm <= STATIONARY_GRADIENT_TOL
    logger.info(f"Found {len(points)} stationary cluster(s); unique interior maximum: {unique}")
    return StationaryReport(density=p, points=points, failed_starts=failed, n_starts=n_starts, unique_in_region=unique)


def maximize_phi1(lam: float, d: int, grid_points: int = PHI1_GRID_POINTS // 5) -> Phi1Maximization:
    """
    Stationary points and maximizers of Phi1 over the interior of the triangle.

    Newton runs start from a uniform grid of interior points; converged points are clustered and classified by
    the eigenvalues of the Hessian. The Hessian at the symmetric point (p*, p*) is reported separately.
    """

    def gradient(x):
        return phi1_gradient(DensityPoint(x[0], x[1]), lam, d)

    def hessian(x):
        return phi1_hessian(DensityPoint(x[0], x[1]), lam, d)

    def feasible(x):
        return x[0] > 1e-300 and x[1] > 1e-300 and x[0] + x[1] < 1 - 1e-15

    axis = (np.arange(grid_points) + 0.5) / (grid_points + 1)
    starts = [np.array([x, y]) for x in axis for y in axis if x + y < 1 - 0.5 / (grid_points + 1)]

    results = [newton_root(gradient, hessian, s, feasible) for s in starts]
    converged = [r for r in results if r.converged]

    stationary = []
    for cluster in _cluster([r.x for r in converged], 1e-7):
        best = min((converged[i] for i in cluster), key=lambda r: r.gradient_norm)
        alpha, beta = (float(v) for v in best.x)
        point = DensityPoint(alpha, beta)
        eigenvalues = eigvalsh(phi1_hessian(point, lam, d))
        stationary.append(
            Phi1Stationary(
                alpha=alpha,
                beta=beta,
                value=phi1(point, lam, d),
                eigenvalues=eigenvalues,
                is_max=bool(np.all(eigenvalues < MAXIMUM_EIGENVALUE_CUTOFF)),
            )
        )

    local_maxima = [s for s in stationary if s.is_max]
    best_value = max((s.value for s in local_maxima), default=float("-inf"))
    maximizers = sorted(
        (s for s in local_maxima if s.value >= best_value - 1e-12), key=lambda s: (s.alpha, s.beta)
    )

    p_star = semi_invariant_fixed_points(lam, d).p_star
    symmetric_eigenvalues = eigvalsh(phi1_hessian(DensityPoint(p_star, p_star), lam, d))

    logger.debug(f"Phi1 at lambda={lam}, d={d}: {len(stationary)} stationary, {len(maximizers)} maximizer(s)")
    return Phi1Maximization(
        lam=lam,
        d=d,
        stationary=stationary,
        maximizers=maximizers,
        symmetric_eigenvalues=symmetric_eigenvalues,
        symmetric_is_saddle=bool(np.max(symmetric_eigenvalues) >= 0.0),
        failed_starts=len(results) - len(converged),
    )


def phi1_landscape(lam: float, d: int, grid_points: int = PHI1_GRID_POINTS) -> list[dict]:
    """Phi1 on a uniform grid of the closed triangle, one row per grid point."""
    axis = np.linspace(0.0, 1.0, grid_points + 1)
    alpha, beta = np.meshgrid(axis, axis, indexing="ij")
    inside = alpha + beta <= 1 + 1e-12
    values = phi1_values(alpha[inside], np.minimum(beta[inside], 1 - alpha[inside]), lam, d)
    return [
        {"alpha": float(a), "beta": float(b), "phi1": float(v)}
        for a, b, v in zip(alpha[inside], beta[inside], values, strict=True)
    ]


def unique_max_scan(
    d: int,
    radius: float,
    points_per_axis: int = 5,
    n_starts: int = MIN_N_STARTS,
    seed: int = 0,
    threads: int = 1,
) -> list[dict]:
    """
    Run the multistart search on an (alpha, beta) grid of half-width `radius` around (1/d, 1/d).

    Each row tells whether the second-moment exponent has exactly one interior stationary point there and
    whether it is a maximum.
    """
    if radius < 0 or radius >= 1 / d:
        raise ValueError(f"Scan radius must lie in [0, 1/d), got {radius}.")

    offsets = np.linspace(-radius, radius, points_per_axis) if points_per_axis > 1 else np.zeros(1)
    rows = []
    for da in offsets:
        for db in offsets:
            p = DensityPoint(1 / d + da, 1 / d + db)
            report = find_stationary_points(p, 1.0, d, n_starts=n_starts, seed=seed, threads=threads)
            star = OverlapPoint.independent(p)
            distance = (
                float(np.linalg.norm(report.point.as_array() - star.as_array())) if report.point else float("nan")
            )
            rows.append(
                {
                    "d": d,
                    "alpha": p.alpha,
                    "beta": p.beta,
                    "clusters": len(report.points),
                    "failed_starts": len(report.failed_starts),
                    "unique_max": report.unique_in_region,
                    "distance_to_independent_overlap": distance,
                }
            )
    return rows


def bottleneck_exponent(lam: float, d: int, delta: float, grid_points: int = 201) -> BottleneckExponent:
    """
    Compare Phi1 near the tilted maximizer (alpha < beta) with Phi1 on the balanced strip |x - y| <= delta.

    Args:
        lam (float): Activity.
        d (int): Degree.
        delta (float): Half-width of both the box around the maximizer and the balanced strip.
        grid_points (int): Grid resolution per axis for both extremal searches.

    Returns:
        BottleneckExponent: The two extremal values, their difference epsilon and exp(epsilon / 4).
    """
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}.")

    fixed = semi_invariant_fixed_points(lam, d)
    alpha, beta = fixed.p1, fixed.p2

    box = np.linspace(-delta, delta, grid_points)
    xs, ys = np.meshgrid(alpha + box, beta + box, indexing="ij")
    inside = (xs > 0) & (ys > 0) & (xs + ys < 1)
    tilted_min = float(np.min(phi1_values(xs[inside], ys[inside], lam, d)))

    x_axis = np.linspace(0.0, 1.0, 4 * grid_points)
    xs, offsets = np.meshgrid(x_axis, box, indexing="ij")
    ys = xs + offsets
    inside = (ys >= 0) & (xs + ys <= 1)
    balanced_max = float(np.max(phi1_values(xs[inside], ys[inside], lam, d)))

    epsilon = tilted_min - balanced_max
    return BottleneckExponent(
        lam=lam,
        d=d,
        delta=delta,
        alpha=alpha,
        beta=beta,
        tilted_min=tilted_min,
        balanced_max=balanced_max,
        epsilon=epsilon,
        decay_base=float(np.exp(epsilon / 4)),
    )
