"""
Glauber (single-site heat-bath) and block dynamics for the hard-core model on a bipartite multigraph.

Vertices are addressed by a global id in [0, 2n): ids below n are V1 vertices, ids n..2n-1 are V2 vertices.
"""

from dataclasses import dataclass, field
from functools import lru_cache
import logging
import math

import numpy as np

from src.core.graph_generator import BipartiteMultigraph
from src.utils.chain_init_enum import ChainInit
from src.utils.constants import DEFAULT_SAMPLE_EVERY, MAX_BLOCK_SIZE, RANDOM_BATCH_SIZE
from src.utils.exceptions import SizeCapExceededError
from src.utils.rng import stream
from src.utils.utils import ordered_map

logger = logging.getLogger(__name__)


@lru_cache(maxsize=64)
def _neighbor_lists(g: BipartiteMultigraph) -> tuple[list[list[int]], list[list[int]]]:
    """Neighbour lists with multiplicity: V1 -> V2 partners and V2 -> V1 partners."""
    return g.v1_neighbors.tolist(), g.v2_neighbors.tolist()


@dataclass
class ChainState:
    """
    An independent set with incrementally maintained blocked counts.

    blocked1[u] is the number of edge instances from u in V1 to occupied V2 vertices, blocked2 likewise.
    """

    occ1: list[bool]
    occ2: list[bool]
    blocked1: list[int]
    blocked2: list[int]
    size1: int = 0
    size2: int = 0

    @classmethod
    def empty(cls, n: int) -> "ChainState":
        return cls(occ1=[False] * n, occ2=[False] * n, blocked1=[0] * n, blocked2=[0] * n)

    @classmethod
    def from_occupied(cls, g: BipartiteMultigraph, occ1, occ2) -> "ChainState":
        """
        Build a state from occupation vectors.

        Raises:
            ValueError: If the vectors have the wrong length or do not describe an independent set.
        """
        occ1, occ2 = [bool(x) for x in occ1], [bool(x) for x in occ2]
        if len(occ1) != g.n or len(occ2) != g.n:
            raise ValueError(f"Occupation vectors must have length n={g.n}.")

        state = cls(occ1=occ1, occ2=occ2, blocked1=[], blocked2=[], size1=sum(occ1), size2=sum(occ2))
        state.blocked1, state.blocked2 = state.recount(g)
        conflicts = [u for u in range(g.n) if occ1[u] and state.blocked1[u]]
        if conflicts:
            raise ValueError(f"Not an independent set: V1 vertices {conflicts} have occupied neighbours.")
        return state

    @classmethod
    def from_masks(cls, g: BipartiteMultigraph, s: int, t: int) -> "ChainState":
        return cls.from_occupied(g, [s >> u & 1 for u in range(g.n)], [t >> v & 1 for v in range(g.n)])

    @property
    def magnetization(self) -> int:
        return self.size1 - self.size2

    @property
    def occupancy(self) -> int:
        return self.size1 + self.size2

    def key(self) -> tuple[int, int]:
        """(S, T) bitmasks, the state labels of the exact Glauber kernel."""
        s = sum(1 << u for u, x in enumerate(self.occ1) if x)
        t = sum(1 << v for v, x in enumerate(self.occ2) if x)
        return s, t

    def recount(self, g: BipartiteMultigraph) -> tuple[list[int], list[int]]:
        """Blocked counts recomputed from scratch."""
        v1, v2 = _neighbor_lists(g)
        blocked1 = [sum(self.occ2[v] for v in v1[u]) for u in range(g.n)]
        blocked2 = [sum(self.occ1[u] for u in v2[v]) for v in range(g.n)]
        return blocked1, blocked2

    def verify(self, g: BipartiteMultigraph):
        """
        Raises:
            ValueError: If the state is not independent or its incremental counts disagree with a recount.
        """
        blocked1, blocked2 = self.recount(g)
        errors = []
        if blocked1 != self.blocked1 or blocked2 != self.blocked2:
            errors.append("blocked counts disagree with a full recount")
        if self.size1 != sum(self.occ1) or self.size2 != sum(self.occ2):
            errors.append("occupancy sizes disagree with the occupation vectors")
        if any(self.occ1[u] and blocked1[u] for u in range(g.n)):
            errors.append("an occupied V1 vertex has an occupied neighbour")
        if errors:
            raise ValueError("\n".join(errors))

    def copy(self) -> "ChainState":
        return ChainState(
            occ1=self.occ1.copy(),
            occ2=self.occ2.copy(),
            blocked1=self.blocked1.copy(),
            blocked2=self.blocked2.copy(),
            size1=self.size1,
            size2=self.size2,
        )


@dataclass
class Trace:
    """Magnetization and occupancy at the sampled steps of one chain."""

    times: list[int] = field(default_factory=list)
    magnetization: list[int] = field(default_factory=list)
    occupancy: list[int] = field(default_factory=list)
    snapshots: list[tuple[int, int]] | None = None

    def record(self, step: int, state: ChainState):
        self.times.append(step)
        self.magnetization.append(state.magnetization)
        self.occupancy.append(state.occupancy)
        if self.snapshots is not None:
            self.snapshots.append(state.key())

    def as_rows(self) -> list[dict]:
        return [
            {"step": t, "m": m, "occupancy": o}
            for t, m, o in zip(self.times, self.magnetization, self.occupancy, strict=True)
        ]


@dataclass(frozen=True)
class CrossingSummary:
    """First times m_t <= 0 from the V1-filled start; None marks a run censored at max_steps."""

    n: int
    lam: float
    max_steps: int
    times: list[int | None]

    @property
    def censored(self) -> int:
        return sum(t is None for t in self.times)

    @property
    def censor_fraction(self) -> float:
        return self.censored / len(self.times) if self.times else 0.0

    @property
    def median(self) -> float:
        """Median with censored runs counted as infinitely long."""
        if not self.times:
            return math.nan
        return float(np.median([math.inf if t is None else t for t in self.times]))

    def as_rows(self) -> list[dict]:
        return [
            {"run": r, "crossing_time": "" if t is None else t, "censored": t is None} for r, t in enumerate(self.times)
        ]

    def as_row(self) -> dict:
        return {
            "n": self.n,
            "lambda": self.lam,
            "max_steps": self.max_steps,
            "runs": len(self.times),
            "median": self.median,
            "censored": self.censored,
            "censor_fraction": self.censor_fraction,
        }


def _set_vertex(state: ChainState, adjacency, x: int, occupied: bool):
    """Set vertex x to `occupied`, keeping counts and sizes current; the caller guarantees independence."""
    v1, v2 = adjacency
    n = len(v1)
    if x < n:
        if state.occ1[x] == occupied:
            return
        state.occ1[x] = occupied
        step = 1 if occupied else -1
        state.size1 += step
        for v in v1[x]:
            state.blocked2[v] += step
    else:
        v = x - n
        if state.occ2[v] == occupied:
            return
        state.occ2[v] = occupied
        step = 1 if occupied else -1
        state.size2 += step
        for u in v2[v]:
            state.blocked1[u] += step


def _is_blocked(state: ChainState, n: int, x: int) -> bool:
    return state.blocked1[x] > 0 if x < n else state.blocked2[x - n] > 0


def _heat_bath(state: ChainState, adjacency, x: int, uniform: float, occupy_probability: float):
    occupied = not _is_blocked(state, len(adjacency[0]), x) and uniform < occupy_probability
    _set_vertex(state, adjacency, x, occupied)


def glauber_step(state: ChainState, g: BipartiteMultigraph, lam: float, rng: np.random.Generator) -> ChainState:
    """
    One heat-bath update: a uniform vertex of V1 u V2 is occupied with probability lam / (1 + lam) when none of
    its neighbours is occupied, and vacated otherwise. The state is updated in place and returned.
    """
    x = int(rng.integers(2 * g.n))
    _heat_bath(state, _neighbor_lists(g), x, float(rng.random()), lam / (1 + lam))
    return state


def block_step(
    state: ChainState, g: BipartiteMultigraph, lam: float, block, rng: np.random.Generator
) -> ChainState:
    """
    Resample the vertices of `block` from the hard-core law conditioned on every other vertex.

    The admissible configurations of the block are enumerated exactly: after vacating the block, a block vertex
    may be occupied only if it has no occupied neighbour outside, and occupied block vertices must not be
    adjacent to each other.

    Raises:
        SizeCapExceededError: If the block has more than MAX_BLOCK_SIZE vertices.
        ValueError: If a vertex id is out of range or repeated.
    """
    block = [int(x) for x in block]
    if len(block) > MAX_BLOCK_SIZE:
        raise SizeCapExceededError(f"Block dynamics supports blocks of at most {MAX_BLOCK_SIZE} vertices.")
    if len(set(block)) != len(block) or any(not 0 <= x < 2 * g.n for x in block):
        raise ValueError(f"Block must list distinct vertex ids in [0, {2 * g.n}), got {block}.")

    n = g.n
    adjacency = _neighbor_lists(g)
    v1, v2 = adjacency
    for x in block:
        _set_vertex(state, adjacency, x, False)

    candidates = [x for x in block if not _is_blocked(state, n, x)]
    position = {x: j for j, x in enumerate(candidates)}
    conflicts = []
    for x in candidates:
        neighbors = [u + n for u in v1[x]] if x < n else v2[x - n]
        conflicts.append(sum(1 << position[y] for y in set(neighbors) if y in position))

    configurations = [(0, 0)]
    for j, mask in enumerate(conflicts):
        configurations += [(chosen | 1 << j, size + 1) for chosen, size in configurations if not chosen & mask]

    sizes = np.array([size for _, size in configurations], dtype=float)
    weights = np.exp((sizes - sizes.max()) * math.log(lam))
    cumulative = np.cumsum(weights)
    pick = int(np.searchsorted(cumulative, rng.random() * cumulative[-1], side="right"))
    chosen = configurations[min(pick, len(configurations) - 1)][0]

    for j, x in enumerate(candidates):
        if chosen >> j & 1:
            _set_vertex(state, adjacency, x, True)
    return state


def initial_state(g: BipartiteMultigraph, init: ChainInit, given: ChainState | None = None) -> ChainState:
    """
    Raises:
        ValueError: If `init` is GIVEN without a state.
    """
    init = ChainInit(init)
    if init == ChainInit.EMPTY:
        return ChainState.empty(g.n)
    if init == ChainInit.FILL_V1:
        return ChainState.from_occupied(g, [True] * g.n, [False] * g.n)
    if init == ChainInit.FILL_V2:
        return ChainState.from_occupied(g, [False] * g.n, [True] * g.n)
    if given is None:
        raise ValueError("init='given' requires an initial state.")
    return given.copy()


def run_chain(
    g: BipartiteMultigraph,
    lam: float,
    steps: int,
    init: ChainInit = ChainInit.EMPTY,
    sample_every: int = DEFAULT_SAMPLE_EVERY,
    seed: int = 0,
    run_index: int = 0,
    given: ChainState | None = None,
    block_size: int = 0,
    keep_snapshots: bool = False,
    verify: bool = False,
) -> Trace:
    """
    Run Glauber dynamics (or block dynamics with uniformly random blocks of `block_size` vertices).

    Args:
        g (BipartiteMultigraph): The graph.
        lam (float): Activity.
        steps (int): Number of updates.
        init (ChainInit): Starting state: empty, V1 filled, V2 filled or `given`.
        sample_every (int): Recording period; step 0 is always recorded.
        seed (int): Seed; the chain draws from stream(seed, run_index).
        run_index (int): Index of this chain within a batch of runs.
        given (ChainState | None): Starting state for init='given'.
        block_size (int): 0 for single-site updates, otherwise the size of the resampled block.
        keep_snapshots (bool): Also record the (S, T) bitmasks at every sampled step.
        verify (bool): Recount and check the state after every step.

    Returns:
        Trace: The sampled magnetization and occupancy.
    """
    errors = []
    if not lam > 0:
        errors.append(f"lambda must be positive, got {lam}.")
    if steps < 0:
        errors.append(f"steps must be >= 0, got {steps}.")
    if sample_every < 1:
        errors.append(f"sample_every must be >= 1, got {sample_every}.")
    if not 0 <= block_size <= 2 * g.n:
        errors.append(f"block_size must lie in [0, {2 * g.n}], got {block_size}.")
    if errors:
        raise ValueError("\n".join(errors))

    rng = stream(seed, run_index)
    state = initial_state(g, init, given)
    trace = Trace(snapshots=[] if keep_snapshots else None)
    trace.record(0, state)

    adjacency = _neighbor_lists(g)
    occupy_probability = lam / (1 + lam)
    step = 0
    while step < steps:
        batch = min(RANDOM_BATCH_SIZE, steps - step)
        if block_size:
            for _ in range(batch):
                block = rng.choice(2 * g.n, size=block_size, replace=False)
                block_step(state, g, lam, block, rng)
                step += 1
                _after_step(state, g, trace, step, sample_every, verify)
        else:
            vertices = rng.integers(2 * g.n, size=batch).tolist()
            uniforms = rng.random(batch).tolist()
            for x, uniform in zip(vertices, uniforms, strict=True):
                _heat_bath(state, adjacency, x, uniform, occupy_probability)
                step += 1
                _after_step(state, g, trace, step, sample_every, verify)
    return trace


def _after_step(state: ChainState, g: BipartiteMultigraph, trace: Trace, step: int, sample_every: int, verify: bool):
    if verify:
        state.verify(g)
    if step % sample_every == 0:
        trace.record(step, state)


def first_crossing(g: BipartiteMultigraph, lam: float, max_steps: int, seed: int, run_index: int) -> int | None:
    """First step at which m_t <= 0 from the V1-filled start, or None if it does not happen within max_steps."""
    rng = stream(seed, run_index)
    state = initial_state(g, ChainInit.FILL_V1)
    adjacency = _neighbor_lists(g)
    occupy_probability = lam / (1 + lam)

    step = 0
    while step < max_steps:
        batch = min(RANDOM_BATCH_SIZE, max_steps - step)
        vertices = rng.integers(2 * g.n, size=batch).tolist()
        uniforms = rng.random(batch).tolist()
        for x, uniform in zip(vertices, uniforms, strict=True):
            _heat_bath(state, adjacency, x, uniform, occupy_probability)
            step += 1
            if state.size1 <= state.size2:
                return step
    return None


def crossing_time(
    g: BipartiteMultigraph, lam: float, max_steps: int, n_runs: int, seed: int, threads: int = 1
) -> CrossingSummary:
    """
    Barrier-crossing times of `n_runs` independent chains started from the V1-filled state.

    Run r draws from stream(seed, r), so two graphs evaluated with the same seed use paired streams.
    """
    if max_steps < 0 or n_runs < 1:
        raise ValueError(f"crossing_time needs max_steps >= 0 and n_runs >= 1, got {max_steps}, {n_runs}.")

    times = ordered_map(lambda r: first_crossing(g, lam, max_steps, seed, r), range(n_runs), threads=threads)
    summary = CrossingSummary(n=g.n, lam=lam, max_steps=max_steps, times=times)
    logger.info(
        f"Crossing times at n={g.n}, lambda={lam}: median {summary.median}, "
        f"censored {summary.censored}/{n_runs}"
    )
    return summary
