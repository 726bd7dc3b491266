"""Matching decoder for point-like (Z error) syndromes.

Syndrome vertices are paired by minimum-weight perfect matching on each
lattice restricted to two colors, with every vertex allowed to end on the
nearest remaining quasivertex.  The matched paths add up to a loop-like
syndrome that is handed to the X decoder.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Sequence

import networkx as nx

from .lattice import ALL_COLORS, Chain, Color, RestrictedGraph, twice_restricted_graph
from .xdecoder import DecodeOutcome, LiftConfig, decode_x

if TYPE_CHECKING:
    from .code import TetrahedralCode

INF = math.inf


@dataclass(frozen=True)
class MatchingProblem:
    """Complete graph on ``2 m`` nodes: ``m`` syndrome vertices then one virtual boundary node each.

    ``weights[i][j]`` is symmetric; real-real entries are hop distances,
    ``weights[i][m + i]`` the distance from vertex ``i`` to a quasivertex,
    virtual-virtual entries 0 and any other real-virtual entry infinite.
    """

    real: tuple[int, ...]
    weights: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        size = len(self.weights)
        if size % 2:
            raise ValueError("matching problem needs an even number of nodes")
        for i in range(size):
            if len(self.weights[i]) != size:
                raise ValueError("weight table must be square")
            for j in range(size):
                w = self.weights[i][j]
                if w != self.weights[j][i] or w < 0:
                    raise ValueError(f"weights must be symmetric and nonnegative ({i}, {j})")

    @property
    def size(self) -> int:
        return len(self.weights)

    @classmethod
    def from_distances(cls, real: Sequence[int], pair: Sequence[Sequence[float]], boundary: Sequence[float]) -> MatchingProblem:
        m = len(real)
        w = [[INF] * (2 * m) for _ in range(2 * m)]
        for i in range(m):
            for j in range(m):
                if i != j:
                    w[i][j] = pair[i][j]
            w[i][m + i] = w[m + i][i] = boundary[i]
            for j in range(m):
                w[m + i][m + j] = 0
        for i in range(2 * m):
            w[i][i] = 0
        return cls(tuple(real), tuple(tuple(r) for r in w))


@dataclass(frozen=True)
class Matching:
    pairs: tuple[tuple[int, int], ...]
    weight: float


def mwpm_exact(problem: MatchingProblem) -> Matching:
    """Minimum-weight perfect matching (Edmonds' blossom via networkx)."""
    n = problem.size
    if n % 2:
        raise ValueError("odd number of nodes has no perfect matching")
    if n == 0:
        return Matching((), 0)
    g = nx.Graph()
    g.add_nodes_from(range(n))
    finite = [w for row in problem.weights for w in row if not math.isinf(w)]
    top = max(finite) + 1 if finite else 1
    for i, j in itertools.combinations(range(n), 2):
        w = problem.weights[i][j]
        if not math.isinf(w):
            g.add_edge(i, j, weight=top - w)
    mate = nx.max_weight_matching(g, maxcardinality=True)
    pairs = tuple(sorted(tuple(sorted(p)) for p in mate))
    if 2 * len(pairs) != n:
        raise ValueError("problem has no perfect matching with finite weight")
    return Matching(pairs, sum(problem.weights[i][j] for i, j in pairs))


# restricted-graph geometry ---------------------------------------------------


def _bfs(graph: RestrictedGraph, sources: Iterable[int]) -> dict[int, int]:
    dist = {s: 0 for s in sources}
    queue = deque(sorted(dist))
    while queue:
        u = queue.popleft()
        for w in graph.adjacency[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def _descend(graph: RestrictedGraph, start: int, dist: dict[int, int]) -> list[int]:
    """Lexicographically smallest shortest path from ``start`` down a distance field."""
    path = [start]
    while dist[path[-1]]:
        u = path[-1]
        path.append(min(w for w in graph.adjacency[u] if dist.get(w, INF) == dist[u] - 1))
    return path


@dataclass(eq=False)
class _PairGeometry:
    graph: RestrictedGraph
    quasi: tuple[int, ...]
    to_boundary: dict[int, int]
    _fields: dict = field(default_factory=dict)

    def field_from(self, v: int) -> dict[int, int]:
        if v not in self._fields:
            self._fields[v] = _bfs(self.graph, [v])
        return self._fields[v]


def _pair_geometry(code: TetrahedralCode, keep: frozenset[Color]) -> _PairGeometry:
    key = ("pair", keep)
    if key not in code._cache:
        graph = twice_restricted_graph(code.lattice, keep)
        quasi = tuple(sorted(u for u in graph.nodes if code.lattice.is_quasi(u)))
        code._cache[key] = _PairGeometry(graph, quasi, _bfs(graph, quasi))
    return code._cache[key]


def extract_z_syndrome(code: TetrahedralCode, error: Iterable[int]) -> frozenset[int]:
    """Non-quasi vertices touching an odd number of erroneous tetrahedra."""
    lattice = code.lattice
    odd: set[int] = set()
    for t in error:
        for v in lattice.tetrahedra[t]:
            odd ^= {v}
    return frozenset(v for v in odd if not lattice.is_quasi(v))


def build_matching_graph(code: TetrahedralCode, keep: Iterable[Color], syndrome: Iterable[int]) -> MatchingProblem:
    keep = frozenset(Color.parse(c) for c in keep)
    geo = _pair_geometry(code, keep)
    lattice = code.lattice
    real = sorted(v for v in syndrome if lattice.color(v) in keep)
    for v in real:
        if lattice.is_quasi(v):
            raise ValueError(f"quasivertex {v} cannot be a syndrome vertex")
    pair = [[INF] * len(real) for _ in real]
    for i, u in enumerate(real):
        dist = geo.field_from(u)
        for j, w in enumerate(real):
            if i != j:
                pair[i][j] = dist.get(w, INF)
    boundary = [geo.to_boundary.get(u, INF) for u in real]
    return MatchingProblem.from_distances(real, pair, boundary)


def pairs_to_edge_chain(code: TetrahedralCode, matchings: Iterable[tuple[Iterable[Color], MatchingProblem, Matching]]) -> Chain:
    """Mod-2 sum of the matched paths over all restrictions.

    Real-real pairs contribute a shortest path between the two vertices,
    real-virtual pairs a shortest path to the nearest quasivertex.  Edges
    joining two quasivertices carry no check and are dropped.
    """
    lattice = code.lattice
    out: set[int] = set()
    for keep, problem, matching in matchings:
        geo = _pair_geometry(code, frozenset(Color.parse(c) for c in keep))
        m = len(problem.real)
        for i, j in matching.pairs:
            if i >= m and j >= m:
                continue
            if j < m:
                a, b = sorted((problem.real[i], problem.real[j]))
                path = _descend(geo.graph, a, geo.field_from(b))
            else:
                path = _descend(geo.graph, problem.real[i], geo.to_boundary)
            for u, w in zip(path, path[1:]):
                out ^= {geo.graph.edge_id(u, w)}
    return Chain(1, frozenset(e for e in out if not lattice.is_quasi_edge(e)))


def restriction_pairs(cfg: LiftConfig, all_pairs: bool = True) -> list[frozenset[Color]]:
    """Color pairs to match on: all six, or only the three containing the lift color."""
    pairs = [frozenset(p) for p in itertools.combinations(sorted(ALL_COLORS), 2)]
    if not all_pairs:
        pairs = [p for p in pairs if cfg.lift_color in p]
    return pairs


def decode_z(code: TetrahedralCode, syndrome: Iterable[int], cfg: LiftConfig = LiftConfig(),
             all_pairs: bool = True, check: bool = False) -> DecodeOutcome:
    syndrome = frozenset(syndrome)
    if not syndrome:
        return DecodeOutcome(Chain(3))
    matchings = []
    for keep in restriction_pairs(cfg, all_pairs):
        problem = build_matching_graph(code, keep, syndrome)
        matchings.append((keep, problem, mwpm_exact(problem)))
    sigma = pairs_to_edge_chain(code, matchings)
    outcome = decode_x(code, sigma, cfg)
    if check and not outcome.heralded_failure:
        if extract_z_syndrome(code, outcome.correction.members) != syndrome:
            raise AssertionError("Z correction does not reproduce the syndrome")
    return outcome
