"""
Exact per-graph quantities of the hard-core model by enumeration.

Summing over S subset of V1 suffices: V1 is independent in a bipartite graph, and given S every subset of the
n - |N(S)| free V2 vertices completes it to an independent set. All weights are kept as exact integer counts
until the final conversion to log space.
"""

from dataclasses import dataclass
import logging
import math

import numpy as np
from scipy.linalg import eigvalsh
from scipy.sparse import coo_matrix, diags
from scipy.sparse.linalg import eigsh
from scipy.special import logsumexp

from src.core.graph_generator import BipartiteMultigraph
from src.utils.constants import (
    DENSE_GAP_STATES,
    DETAILED_BALANCE_TOL,
    LOW_BLOCK_SIZE,
    MAX_ENUMERATION_N,
    MAX_GAP_STATES,
)
from src.utils.exceptions import SizeCapExceededError
from src.utils.utils import ordered_map

logger = logging.getLogger(__name__)

BRUTE_FORCE_MAX_N = 8
GRAY_CHUNK_BITS = 8


@dataclass(frozen=True)
class OccupancyProfile:
    """
    Weights W[a][b] of independent sets with a vertices in V1 and b in V2.

    `counts` holds the exact number of such sets; `log_weights` is ln(counts * lam^(a+b)), -inf marking an exact
    zero.
    """

    n: int
    lam: float
    counts: tuple[tuple[int, ...], ...]
    log_weights: np.ndarray

    @property
    def log_partition(self) -> float:
        return float(logsumexp(self.log_weights[np.isfinite(self.log_weights)]))

    def probabilities(self) -> np.ndarray:
        """mu[a][b], the Gibbs probability of each occupancy pair."""
        with np.errstate(under="ignore"):
            return np.exp(self.log_weights - self.log_partition)

    def as_rows(self) -> list[dict]:
        """One row per a; column b{k} is the log-weight of occupancy pair (a, k)."""
        return [
            {"a": a, **{f"b{b}": float(self.log_weights[a, b]) for b in range(self.n + 1)}} for a in range(self.n + 1)
        ]


@dataclass(frozen=True)
class BarrierMeasures:
    """Gibbs measure of the V1-tilted, V2-tilted and balanced (|a - b| <= t) independent sets."""

    tau_n: int
    mu_I1: float
    mu_I2: float
    mu_IB: float

    @property
    def bottleneck_ratio(self) -> float:
        smaller = min(self.mu_I1, self.mu_I2)
        return self.mu_IB / smaller if smaller > 0 else math.inf

    def as_row(self) -> dict:
        return {
            "t": self.tau_n,
            "mu_I1": self.mu_I1,
            "mu_I2": self.mu_I2,
            "mu_IB": self.mu_IB,
            "bottleneck_ratio": self.bottleneck_ratio,
        }


@dataclass(frozen=True)
class ConductanceBound:
    """Mixing-time lower bound mu[A] / (8 mu[B]) with A = one tilted lobe plus the barrier and B the barrier."""

    t: int
    lobe: str | None
    mu_A: float
    mu_B: float
    applicable: bool

    @property
    def bound(self) -> float:
        if not self.applicable:
            return math.nan
        return self.mu_A / (8 * self.mu_B) if self.mu_B > 0 else math.inf

    def as_row(self) -> dict:
        return {
            "t": self.t,
            "lobe": self.lobe or "",
            "mu_A": self.mu_A,
            "mu_B": self.mu_B,
            "applicable": self.applicable,
            "bound": self.bound,
        }


@dataclass(frozen=True)
class SpectralGap:
    n_states: int
    gap: float
    second_eigenvalue: float
    smallest_eigenvalue: float
    detailed_balance_residual: float

    def as_row(self) -> dict:
        return {
            "n_states": self.n_states,
            "gap": self.gap,
            "second_eigenvalue": self.second_eigenvalue,
            "smallest_eigenvalue": self.smallest_eigenvalue,
            "detailed_balance_residual": self.detailed_balance_residual,
        }


@dataclass(frozen=True)
class GlauberKernel:
    """The exact single-site heat-bath kernel on all independent sets, indexed like `states`."""

    states: list[tuple[int, int]]
    stationary: np.ndarray
    transition: object


def _check_size(g: BipartiteMultigraph, cap: int = MAX_ENUMERATION_N):
    if g.n > cap:
        raise SizeCapExceededError(f"Exact enumeration supports n <= {cap}, got n={g.n}.")


def _subset_masks(masks: list[int]) -> np.ndarray:
    """OR of neighborhood masks for every subset of the given vertices, indexed by the subset bitmask."""
    table = np.zeros(1 << len(masks), dtype=np.int64)
    for j, mask in enumerate(masks):
        size = 1 << j
        table[size : 2 * size] = table[:size] | mask
    return table


class _GrayBlock:
    """Walks the subsets of the high vertices in Gray-code order keeping per-V2 cover counts."""

    def __init__(self, g: BipartiteMultigraph, high: list[int]):
        self.neighbors = [g.v1_neighbors[u] for u in high]
        self.cover = np.zeros(g.n, dtype=np.int64)
        self.mask = 0
        self.size = 0

    def toggle(self, j: int, add: bool):
        step = 1 if add else -1
        for v in self.neighbors[j]:
            v = int(v)
            before = self.cover[v]
            self.cover[v] = before + step
            if before == 0:
                self.mask |= 1 << v
            elif before == 1 and not add:
                self.mask &= ~(1 << v)
        self.size += step

    def jump(self, subset: int):
        for j in range(len(self.neighbors)):
            if subset >> j & 1:
                self.toggle(j, add=True)


def _histogram_chunk(g: BipartiteMultigraph, low_masks: np.ndarray, low_sizes: np.ndarray, high, start, stop):
    n = g.n
    hist = np.zeros((n + 1) * (n + 1), dtype=np.int64)
    block = _GrayBlock(g, high)
    block.jump(start ^ (start >> 1))

    for i in range(start, stop):
        if i > start:
            flipped = (i ^ (i >> 1)) ^ ((i - 1) ^ ((i - 1) >> 1))
            j = flipped.bit_length() - 1
            block.toggle(j, add=bool((i ^ (i >> 1)) & flipped))
        covered = np.bitwise_count(low_masks | block.mask).astype(np.int64)
        index = (low_sizes + block.size) * (n + 1) + (n - covered)
        hist += np.bincount(index, minlength=hist.size)
    return hist


def subset_histogram(g: BipartiteMultigraph, threads: int = 1) -> np.ndarray:
    """
    hist[a][f]: number of S subset of V1 with |S| = a and n - |N(S)| = f.

    The first LOW_BLOCK_SIZE vertices of V1 are tabulated once; subsets of the remaining vertices are visited in
    Gray-code order, each step updating the V2 cover counts of a single vertex. Chunks of the Gray sequence run
    independently and their integer histograms are added in order.

    Raises:
        SizeCapExceededError: If n exceeds MAX_ENUMERATION_N.
    """
    _check_size(g)
    n = g.n
    low = list(range(min(n, LOW_BLOCK_SIZE)))
    high = list(range(len(low), n))

    low_masks = _subset_masks([g.v1_masks[u] for u in low])
    low_sizes = np.bitwise_count(np.arange(1 << len(low), dtype=np.int64)).astype(np.int64)

    total = 1 << len(high)
    chunk = 1 << min(len(high), GRAY_CHUNK_BITS)
    bounds = [(start, min(start + chunk, total)) for start in range(0, total, chunk)]
    partials = ordered_map(
        lambda bound: _histogram_chunk(g, low_masks, low_sizes, high, *bound), bounds, threads=threads
    )
    return np.sum(partials, axis=0).reshape(n + 1, n + 1)


def partition_function(g: BipartiteMultigraph, lam: float, threads: int = 1) -> float:
    """
    ln Z_{G,lam} = ln sum_{S subset V1} lam^|S| (1 + lam)^(n - |N(S)|).

    Raises:
        SizeCapExceededError: If n exceeds MAX_ENUMERATION_N.
    """
    if not lam > 0:
        raise ValueError(f"Activity lambda must be positive, got {lam}.")
    hist = subset_histogram(g, threads=threads)
    a, f = np.nonzero(hist)
    return float(logsumexp(np.log(hist[a, f].astype(float)) + a * math.log(lam) + f * math.log1p(lam)))


def occupancy_counts(hist: np.ndarray) -> list[list[int]]:
    """Exact counts N[a][b] = sum_f hist[a][f] C(f, b)."""
    size = hist.shape[0]
    counts = [[0] * size for _ in range(size)]
    for a in range(size):
        for f in range(size):
            multiplicity = int(hist[a, f])
            if multiplicity:
                for b in range(f + 1):
                    counts[a][b] += multiplicity * math.comb(f, b)
    return counts


def _profile_from_counts(n: int, lam: float, counts: list[list[int]]) -> OccupancyProfile:
    log_weights = np.full((n + 1, n + 1), -np.inf)
    for a in range(n + 1):
        for b in range(n + 1):
            if counts[a][b]:
                log_weights[a, b] = math.log(counts[a][b]) + (a + b) * math.log(lam)
    return OccupancyProfile(n=n, lam=lam, counts=tuple(tuple(row) for row in counts), log_weights=log_weights)


def occupancy_profile(g: BipartiteMultigraph, lam: float, threads: int = 1) -> OccupancyProfile:
    """
    W[a][b] = lam^(a+b) sum_{|S| = a} C(n - |N(S)|, b).

    Raises:
        SizeCapExceededError: If n exceeds MAX_ENUMERATION_N.
    """
    if not lam > 0:
        raise ValueError(f"Activity lambda must be positive, got {lam}.")
    counts = occupancy_counts(subset_histogram(g, threads=threads))
    return _profile_from_counts(g.n, lam, counts)


def brute_force_counts(g: BipartiteMultigraph) -> list[list[int]]:
    """Count independent sets by occupancy pair over all 2^(2n) vertex subsets; the oracle for tiny graphs."""
    _check_size(g, cap=BRUTE_FORCE_MAX_N)
    n = g.n
    counts = [[0] * (n + 1) for _ in range(n + 1)]
    for s in range(1 << n):
        for t in range(1 << n):
            if not any(s >> u & 1 and g.v1_masks[u] & t for u in range(n)):
                counts[s.bit_count()][t.bit_count()] += 1
    return counts


def brute_force_profile(g: BipartiteMultigraph, lam: float) -> OccupancyProfile:
    return _profile_from_counts(g.n, lam, brute_force_counts(g))


def barrier_from_profile(profile: OccupancyProfile, t: int) -> BarrierMeasures:
    if t < 0:
        raise ValueError(f"Barrier threshold t must be >= 0, got {t}.")
    mu = profile.probabilities()
    a, b = np.indices(mu.shape)
    tilt = a - b
    return BarrierMeasures(
        tau_n=t,
        mu_I1=float(mu[tilt > t].sum()),
        mu_I2=float(mu[tilt < -t].sum()),
        mu_IB=float(mu[np.abs(tilt) <= t].sum()),
    )


def barrier_measures(g: BipartiteMultigraph, lam: float, t: int, threads: int = 1) -> BarrierMeasures:
    """
    Measures of I1 = {a - b > t}, I2 = {b - a > t} and the barrier IB = {|a - b| <= t}.

    Raises:
        SizeCapExceededError: If n exceeds MAX_ENUMERATION_N.
    """
    return barrier_from_profile(occupancy_profile(g, lam, threads=threads), t)


def conductance_from_barrier(measures: BarrierMeasures) -> ConductanceBound:
    lobes = sorted([("I1", measures.mu_I1), ("I2", measures.mu_I2)], key=lambda lobe: lobe[1])
    for name, mu_lobe in lobes:
        mu_a = mu_lobe + measures.mu_IB
        if mu_a <= 0.5:
            return ConductanceBound(t=measures.tau_n, lobe=name, mu_A=mu_a, mu_B=measures.mu_IB, applicable=True)

    logger.debug(f"Conductance bound inapplicable at t={measures.tau_n}: both lobes exceed measure 1/2")
    return ConductanceBound(
        t=measures.tau_n, lobe=None, mu_A=lobes[0][1] + measures.mu_IB, mu_B=measures.mu_IB, applicable=False
    )


def conductance_lower_bound(g: BipartiteMultigraph, lam: float, t: int, threads: int = 1) -> ConductanceBound:
    """
    The lower bound mu[A] / (8 mu[B]) on the mixing time of any chain whose moves change a and b by at most t.

    A is the smaller tilted lobe together with the barrier, falling back to the larger lobe when that exceeds
    measure 1/2; if both do, the result is marked inapplicable.
    """
    return conductance_from_barrier(barrier_measures(g, lam, t, threads=threads))


def independent_sets(g: BipartiteMultigraph) -> list[tuple[int, int]]:
    """Every independent set as (S, T) bitmasks over V1 and V2, sorted."""
    n = g.n
    states = []
    for s in range(1 << n):
        covered = 0
        for u in range(n):
            if s >> u & 1:
                covered |= g.v1_masks[u]
        free = [v for v in range(n) if not covered >> v & 1]
        for pick in range(1 << len(free)):
            t = sum(1 << v for j, v in enumerate(free) if pick >> j & 1)
            states.append((s, t))
    return sorted(states)


def glauber_kernel(g: BipartiteMultigraph, lam: float) -> GlauberKernel:
    """
    Exact transition matrix of single-site heat-bath dynamics: pick one of the 2n vertices uniformly, occupy it
    with probability lam / (1 + lam) when none of its neighbours is occupied, vacate it otherwise.

    Raises:
        SizeCapExceededError: If the number of independent sets exceeds MAX_GAP_STATES.
    """
    if not lam > 0:
        raise ValueError(f"Activity lambda must be positive, got {lam}.")
    _check_size(g)
    n_states = int(sum(np.sum(subset_histogram(g), axis=0) * (2 ** np.arange(g.n + 1))))
    if n_states > MAX_GAP_STATES:
        raise SizeCapExceededError(f"{n_states} independent sets exceed the spectral-gap cap {MAX_GAP_STATES}.")

    n = g.n
    states = independent_sets(g)
    index = {state: i for i, state in enumerate(states)}
    v2_masks = [sum(1 << int(u) for u in set(row)) for row in g.v2_neighbors]
    occupy = lam / (1 + lam)
    pick = 1 / (2 * n)

    rows, cols, values = [], [], []
    for i, (s, t) in enumerate(states):
        for side, masks, own, other in ((0, g.v1_masks, s, t), (1, v2_masks, t, s)):
            for x in range(n):
                bit = 1 << x
                blocked = bool(masks[x] & other)
                filled = own | bit
                emptied = own & ~bit
                targets = [(emptied, 1.0)] if blocked else [(filled, occupy), (emptied, 1 - occupy)]
                for new_own, probability in targets:
                    state = (new_own, t) if side == 0 else (s, new_own)
                    rows.append(i)
                    cols.append(index[state])
                    values.append(pick * probability)

    transition = coo_matrix((values, (rows, cols)), shape=(len(states), len(states))).tocsr()
    sizes = np.array([s.bit_count() + t.bit_count() for s, t in states], dtype=float)
    log_weights = sizes * math.log(lam)
    stationary = np.exp(log_weights - logsumexp(log_weights))
    return GlauberKernel(states=states, stationary=stationary, transition=transition)


def detailed_balance_residual(kernel: GlauberKernel) -> float:
    flow = diags(kernel.stationary) @ kernel.transition
    return float(abs(flow - flow.T).max())


def exact_spectral_gap(g: BipartiteMultigraph, lam: float) -> SpectralGap:
    """
    1 - (second largest eigenvalue modulus) of the exact Glauber kernel.

    The kernel is symmetrised as D^(1/2) P D^(-1/2) with D = diag(mu); small state spaces use a dense symmetric
    eigensolver, larger ones Lanczos for the two extreme ends of the spectrum.

    Raises:
        SizeCapExceededError: If the number of independent sets exceeds MAX_GAP_STATES.
    """
    kernel = glauber_kernel(g, lam)
    residual = detailed_balance_residual(kernel)
    if residual > DETAILED_BALANCE_TOL:
        logger.warning(f"Detailed balance residual {residual:.3e} exceeds {DETAILED_BALANCE_TOL}")

    root = np.sqrt(kernel.stationary)
    symmetric = diags(root) @ kernel.transition @ diags(1 / root)
    symmetric = (symmetric + symmetric.T) / 2
    n_states = len(kernel.states)

    if n_states <= DENSE_GAP_STATES:
        eigenvalues = eigvalsh(symmetric.toarray())
        second, smallest = float(eigenvalues[-2]), float(eigenvalues[0])
    else:
        top = eigsh(symmetric, k=2, which="LA", return_eigenvectors=False)
        bottom = eigsh(symmetric, k=1, which="SA", return_eigenvectors=False)
        second, smallest = float(np.min(top)), float(bottom[0])

    gap = 1 - max(abs(second), abs(smallest))
    logger.info(f"Spectral gap on {n_states} states: {gap:.6e}")
    return SpectralGap(
        n_states=n_states,
        gap=gap,
        second_eigenvalue=second,
        smallest_eigenvalue=smallest,
        detailed_balance_residual=residual,
    )


def independent_set_count(g: BipartiteMultigraph, a: int, b: int) -> int:
    """Exact number of independent sets with a vertices in V1 and b in V2."""
    if not (0 <= a <= g.n and 0 <= b <= g.n):
        raise ValueError(f"Occupancies must lie in [0, {g.n}], got a={a}, b={b}.")
    hist = subset_histogram(g)
    return sum(int(hist[a, f]) * math.comb(f, b) for f in range(b, g.n + 1))
