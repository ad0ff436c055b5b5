from dataclasses import dataclass, field
from functools import cached_property
import logging
import os

import numpy as np

from src.utils.constants import MAX_CYCLE_LENGTH
from src.utils.rng import stream
from src.utils.utils import ordered_map

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BipartiteMultigraph:
    """
    A d-regular bipartite multigraph on V1 = {0..n-1} and V2 = {0..n-1} given by d perfect matchings.

    Row k of `matchings` maps u in V1 to its partner in V2 under matching k. Parallel edges are kept: two
    matchings that agree on u give u two distinct edge instances to the same partner.
    """

    n: int
    d: int
    matchings: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n < 1 or self.d < 1:
            raise ValueError(f"Graph needs n >= 1 and d >= 1, got n={self.n}, d={self.d}.")

        matchings = np.asarray(self.matchings, dtype=np.int64)
        if matchings.shape != (self.d, self.n):
            raise ValueError(f"Expected matchings of shape ({self.d}, {self.n}), got {matchings.shape}.")

        identity = np.arange(self.n)
        for k, row in enumerate(matchings):
            if not np.array_equal(np.sort(row), identity):
                raise ValueError(f"Matching {k} is not a permutation of 0..{self.n - 1}.")

        matchings.setflags(write=False)
        object.__setattr__(self, "matchings", matchings)

    @cached_property
    def v1_neighbors(self) -> np.ndarray:
        """(n, d) array: entry [u, k] is the V2 partner of u under matching k."""
        return np.ascontiguousarray(self.matchings.T)

    @cached_property
    def v2_neighbors(self) -> np.ndarray:
        """(n, d) array: entry [v, k] is the V1 partner of v under matching k."""
        inverse = np.empty_like(self.matchings)
        for k, row in enumerate(self.matchings):
            inverse[k, row] = np.arange(self.n)
        return np.ascontiguousarray(inverse.T)

    @cached_property
    def v1_masks(self) -> list[int]:
        """Neighborhood of each u in V1 as a bitmask over V2."""
        return [sum(1 << int(v) for v in set(row)) for row in self.v1_neighbors]

    def multiplicity(self, u: int, v: int) -> int:
        """Number of parallel edges between u in V1 and v in V2."""
        return int(np.count_nonzero(self.v1_neighbors[u] == v))

    def swapped(self) -> "BipartiteMultigraph":
        """The same graph with the roles of V1 and V2 exchanged."""
        return BipartiteMultigraph(n=self.n, d=self.d, matchings=self.v2_neighbors.T.copy())

    def __eq__(self, other) -> bool:
        if not isinstance(other, BipartiteMultigraph):
            return NotImplemented
        return self.n == other.n and self.d == other.d and np.array_equal(self.matchings, other.matchings)

    def __hash__(self) -> int:
        return hash((self.n, self.d, self.matchings.tobytes()))


@dataclass(frozen=True)
class CycleCensus:
    """Counts X_i of simple cycles of each even length i <= i_max."""

    counts: dict[int, int]

    def __post_init__(self):
        for length, count in self.counts.items():
            if length % 2 or length < 2:
                raise ValueError(f"Cycle counts are defined for even lengths only, got {length}.")
            if count < 0:
                raise ValueError(f"Negative cycle count {count} for length {length}.")

    def __getitem__(self, length: int) -> int:
        return self.counts[length]


def sample_graph(n: int, d: int, seed: int, index: int = 0) -> BipartiteMultigraph:
    """
    Sample a graph from RG(n, d): d independent uniformly random perfect matchings.

    Args:
        n (int): Vertices per side.
        d (int): Degree, i.e. number of matchings.
        seed (int): Seed of the computation.
        index (int): Sample index; (seed, index) fully determines the graph.

    Returns:
        BipartiteMultigraph: The sampled multigraph.
    """
    if n < 1 or d < 1:
        raise ValueError(f"sample_graph requires n >= 1 and d >= 1, got n={n}, d={d}.")

    rng = stream(seed, index)
    matchings = np.stack([rng.permutation(n) for _ in range(d)])
    return BipartiteMultigraph(n=n, d=d, matchings=matchings)


def sample_graphs(n: int, d: int, seed: int, count: int, threads: int = 1) -> list[BipartiteMultigraph]:
    """Sample graphs 0..count-1 of the (seed, index) family."""
    return ordered_map(lambda index: sample_graph(n, d, seed, index), range(count), threads=threads)


def count_cycles(g: BipartiteMultigraph, i_max: int) -> CycleCensus:
    """
    Count simple cycles of every even length up to `i_max`.

    A cycle uses distinct vertices and distinct edge instances, so two parallel edges form a 2-cycle. Each cycle
    is found from its smallest vertex (always in V1) in both orientations, hence the final halving.

    Raises:
        ValueError: If `i_max` is odd, below 2 or above the supported maximum.
    """
    if i_max % 2 or i_max < 2:
        raise ValueError(f"i_max must be an even integer >= 2, got {i_max}.")
    if i_max > MAX_CYCLE_LENGTH:
        raise ValueError(f"i_max={i_max} exceeds the supported maximum {MAX_CYCLE_LENGTH}.")

    n, d = g.n, g.d
    # V1 vertices are 0..n-1, V2 vertices are n..2n-1; edge instance (u, k) has id u*d + k.
    adjacency: list[list[tuple[int, int]]] = [[] for _ in range(2 * n)]
    for u in range(n):
        for k in range(d):
            v = n + int(g.v1_neighbors[u, k])
            edge_id = u * d + k
            adjacency[u].append((v, edge_id))
            adjacency[v].append((u, edge_id))

    closed = dict.fromkeys(range(2, i_max + 1, 2), 0)
    on_path = [False] * (2 * n)

    def extend(root: int, vertex: int, last_edge: int, length: int):
        for neighbor, edge_id in adjacency[vertex]:
            if edge_id == last_edge:
                continue
            if neighbor == root:
                closed[length + 1] += 1
            elif neighbor > root and not on_path[neighbor] and length + 1 < i_max:
                on_path[neighbor] = True
                extend(root, neighbor, edge_id, length + 1)
                on_path[neighbor] = False

    for root in range(n):
        on_path[root] = True
        extend(root, root, -1, 0)
        on_path[root] = False

    return CycleCensus(counts={length: count // 2 for length, count in closed.items()})


def write_graph(g: BipartiteMultigraph, file_path: str):
    """Write `g` as text: a line "n d" followed by one space-separated permutation per matching."""
    directory = os.path.dirname(file_path)
    if directory:
        os.makedirs(directory, exist_ok=True)

    with open(file_path, "w", encoding="utf-8") as file:
        file.write(f"{g.n} {g.d}\n")
        for row in g.matchings:
            file.write(" ".join(str(int(v)) for v in row) + "\n")

    logger.info(f"Wrote graph (n={g.n}, d={g.d}) to {file_path}")


def read_graph(file_path: str) -> BipartiteMultigraph:
    """
    Read a graph written by `write_graph`.

    Raises:
        ValueError: If the header or any matching line is malformed.
    """
    with open(file_path, encoding="utf-8") as file:
        lines = [line.split() for line in file if line.strip()]

    if not lines or len(lines[0]) != 2:
        raise ValueError(f"Graph file {file_path} must start with a line 'n d'.")

    n, d = (int(token) for token in lines[0])
    if len(lines) - 1 != d:
        raise ValueError(f"Graph file {file_path} declares d={d} but contains {len(lines) - 1} matchings.")

    matchings = np.array([[int(token) for token in line] for line in lines[1:]], dtype=np.int64).reshape(d, n)
    return BipartiteMultigraph(n=n, d=d, matchings=matchings)
