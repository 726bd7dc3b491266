"""Restriction decoder for loop-like (X error) syndromes.

For each sweep color the restricted syndrome is filled in by a set of faces
missing that color (sweep rule, or a local GF(2) solve).  The union of those
faces is then lifted to tetrahedra one lift-colored vertex at a time by
peeling the link surface of the vertex.
"""

from __future__ import annotations

import heapq
import itertools
import math
import weakref
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Iterable, Sequence

from .gf2 import BitMatrix, gf2_solve, unpack
from .lattice import ALL_COLORS, Chain, Color, DualLattice, boundary_project, star

if TYPE_CHECKING:
    from .code import TetrahedralCode


class DecodeFailure(Exception):
    stage = "none"


class SweepFailure(DecodeFailure):
    stage = "sweep"


class LiftFailure(DecodeFailure):
    stage = "lift"


class LiftRefused(ValueError):
    """The exhaustive lift was asked to enumerate a star above its cap."""


class FailureStage(Enum):
    NONE = "none"
    SWEEP = "sweep"
    LIFT = "lift"


@dataclass(frozen=True)
class LiftConfig:
    """Decoder settings.

    ``sweep_schedule`` lists sweep directions; each entry is a signed facet
    color such as ``"-g"`` (pointing away from the g facet) or ``"away"``
    (away from the facet of the current sweep color).  The default cycles
    inward through all four tetrahedral axes.  Each direction is used for
    ``rounds_per_direction`` rounds (default ``ceil(d/2)``) before moving on.
    ``max_sweep_rounds`` defaults to ``32 * d``.  ``sweep_mode="gf2"`` swaps
    the cellular automaton for a local linear solve.
    """

    lift_color: Color = Color.R
    sweep_schedule: tuple[str, ...] = ("-r", "-g", "-b", "-y")
    max_sweep_rounds: int | None = None
    rounds_per_direction: int | None = None
    sweep_mode: str = "sweep"
    naive_cap: int = 24

    def __post_init__(self):
        object.__setattr__(self, "lift_color", Color.parse(self.lift_color))
        if self.sweep_mode not in ("sweep", "gf2"):
            raise ValueError(f"sweep_mode must be 'sweep' or 'gf2', got {self.sweep_mode!r}")
        if not self.sweep_schedule:
            raise ValueError("sweep schedule is empty")
        for label in self.sweep_schedule:
            _parse_direction(label)
        if self.max_sweep_rounds is not None and self.max_sweep_rounds < 1:
            raise ValueError("max_sweep_rounds must be positive")

    @property
    def sweep_colors(self) -> tuple[Color, ...]:
        return tuple(sorted(ALL_COLORS - {self.lift_color}))


@dataclass(frozen=True)
class DecodeOutcome:
    correction: Chain
    heralded_failure: bool = False
    failure_stage: FailureStage = FailureStage.NONE
    detail: str = ""

    def __post_init__(self):
        if not self.heralded_failure and self.failure_stage is not FailureStage.NONE:
            raise ValueError("a successful decode cannot carry a failure stage")

    @classmethod
    def failed(cls, err: DecodeFailure) -> DecodeOutcome:
        return cls(Chain(3), True, FailureStage(err.stage), str(err))


def _parse_direction(label: str) -> tuple[int, Color | None]:
    if label == "away":
        return -1, None
    if len(label) == 2 and label[0] in "+-":
        return (1 if label[0] == "+" else -1), Color.parse(label[1])
    raise ValueError(f"bad sweep direction {label!r}")


# syndromes -----------------------------------------------------------------


def extract_x_syndrome(code: TetrahedralCode, error: Iterable[int]) -> Chain:
    """Checked edges lying in an odd number of erroneous tetrahedra."""
    edges = boundary_project(code.lattice, Chain(3, frozenset(error)), 1)
    checked = code.is_z_check_edge
    return Chain(1, frozenset(e for e in edges.members if checked[e]))


# per-lattice geometry --------------------------------------------------------

_GEOMETRY: weakref.WeakKeyDictionary = weakref.WeakKeyDictionary()


class _Restricted:
    """Lattice with one color removed, prepared for the sweep rule."""

    def __init__(self, lattice: DualLattice, kappa: Color):
        self.lattice = lattice
        self.kappa = kappa
        color = [v.color for v in lattice.vertices]
        self.nbrs: dict[int, dict[int, int]] = {v.id: {} for v in lattice.vertices if v.color != kappa}
        for eid, (a, b) in enumerate(lattice.edges):
            if color[a] != kappa and color[b] != kappa:
                self.nbrs[a][b] = eid
                self.nbrs[b][a] = eid
        self.face_ids: list[int] = []
        self.face_pairs: dict[int, dict[tuple[int, int], int]] = {v: {} for v in self.nbrs}
        for fid, vs in enumerate(lattice.faces):
            if all(color[u] != kappa for u in vs):
                self.face_ids.append(fid)
                for u in vs:
                    w, x = (y for y in vs if y != u)
                    self.face_pairs[u][w, x] = fid
        self.measured = [not lattice.is_quasi_edge(e) for e in range(lattice.count(1))]
        self.quasi = {v.id for v in lattice.vertices if v.is_quasi and v.color != kappa}
        reals = [v.position for v in lattice.vertices if not v.is_quasi]
        self.centroid = tuple(sum(p[k] for p in reals) / len(reals) for k in range(3))
        self._future: dict[tuple[int, int, int], dict[int, frozenset[int]]] = {}

    def direction(self, label: str) -> tuple[int, int, int]:
        sign, col = _parse_direction(label)
        col = self.kappa if col is None else col
        q = self.lattice.quasivertices[col]
        pos = self.lattice.vertices[q].position
        normal = tuple(1 if pos[k] > self.centroid[k] else -1 for k in range(3))
        return tuple(sign * x for x in normal)

    def future(self, s: tuple[int, int, int]) -> dict[int, frozenset[int]]:
        if s not in self._future:
            verts = self.lattice.vertices
            fut = {}
            for v, ns in self.nbrs.items():
                if verts[v].is_quasi:
                    continue
                p = verts[v].position
                fut[v] = frozenset(
                    w for w in ns
                    if sum(s[k] * (verts[w].position[k] - p[k]) for k in range(3)) > 0
                )
            self._future[s] = fut
        return self._future[s]


def _restricted(lattice: DualLattice, kappa: Color) -> _Restricted:
    per = _GEOMETRY.setdefault(lattice, {})
    if kappa not in per:
        per[kappa] = _Restricted(lattice, kappa)
    return per[kappa]


# sweep -----------------------------------------------------------------------


def _bfs_path(adj: dict[int, list[int]], src: int, dst: int) -> list[int] | None:
    prev = {src: None}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        if u == dst:
            path = [u]
            while prev[path[-1]] is not None:
                path.append(prev[path[-1]])
            return path[::-1]
        for w in adj[u]:
            if w not in prev:
                prev[w] = u
                queue.append(w)
    return None


def _local_join(adj: dict[int, list[int]], terminals: list[int]) -> list[tuple[int, int]] | None:
    """Edge set of ``adj`` whose odd-degree vertices are exactly ``terminals``.

    Terminals are paired to minimize the total path length (exact for up to
    six terminals, greedy above).  None when some component holds an odd
    number of terminals.
    """
    if not terminals:
        return []
    paths = {}
    for a, b in itertools.combinations(terminals, 2):
        p = _bfs_path(adj, a, b)
        if p is not None:
            paths[a, b] = paths[b, a] = p

    def best(rest: tuple[int, ...]) -> tuple[float, list]:
        if not rest:
            return 0, []
        a = rest[0]
        top = (math.inf, [])
        for b in rest[1:]:
            if (a, b) not in paths:
                continue
            cost, pairs = best(tuple(x for x in rest[1:] if x != b))
            cost += len(paths[a, b]) - 1
            if cost < top[0]:
                top = (cost, [(a, b)] + pairs)
        return top

    if len(terminals) <= 6:
        cost, pairs = best(tuple(terminals))
        if math.isinf(cost):
            return None
    else:
        pairs = []
        left = list(terminals)
        while left:
            a = left.pop(0)
            options = [b for b in left if (a, b) in paths]
            if not options:
                return None
            b = min(options, key=lambda b: (len(paths[a, b]), b))
            left.remove(b)
            pairs.append((a, b))
    out: set[tuple[int, int]] = set()
    for a, b in pairs:
        p = paths[a, b]
        for u, w in zip(p, p[1:]):
            out ^= {(min(u, w), max(u, w))}
    return sorted(out)


def _sweep_rule(geo: _Restricted, sigma: set[int], schedule: Sequence[str], max_rounds: int, per_direction: int) -> set[int]:
    lattice = geo.lattice
    edges = lattice.edges
    gamma: set[int] = set()
    directions = [geo.direction(label) for label in schedule]
    idle = 0
    rnd = 0
    while sigma:
        if rnd >= max_rounds:
            raise SweepFailure(f"sweep color {geo.kappa}: {len(sigma)} syndrome edges left after {max_rounds} rounds")
        s = directions[(rnd // per_direction) % len(directions)]
        fut = geo.future(s)
        touched: dict[int, list[int]] = {}
        for e in sigma:
            a, b = edges[e]
            touched.setdefault(a, []).append(b)
            touched.setdefault(b, []).append(a)
        flips: list[int] = []
        for v in sorted(touched):
            fv = fut.get(v)
            if fv is None:
                continue
            if not all(w in fv for w in touched[v]):
                continue
            adj: dict[int, list[int]] = {w: [] for w in fv}
            pairs = geo.face_pairs[v]
            for (w, x), fid in pairs.items():
                if w in fv and x in fv:
                    adj[w].append(x)
                    adj[x].append(w)
            for w in adj:
                adj[w].sort()
            join = _local_join(adj, sorted(touched[v]))
            if join is None:
                continue
            flips.extend(pairs[w, x] for w, x in join)
        if flips:
            idle = 0
            for fid in flips:
                gamma ^= {fid}
                for e in lattice.faces_of(2, fid, 1):
                    if geo.measured[e]:
                        sigma ^= {e}
        else:
            idle += 1
            if idle >= len(directions) * per_direction:
                raise SweepFailure(f"sweep color {geo.kappa}: rule stuck with {len(sigma)} syndrome edges")
        rnd += 1
    return gamma


def _gf2_fill(geo: _Restricted, sigma: set[int]) -> set[int]:
    """Faces missing the sweep color bounding ``sigma``, found by a growing local solve."""
    lattice = geo.lattice
    if not sigma:
        return set()
    seeds = {u for e in sigma for u in lattice.edges[e]}
    ball = set(seeds)
    frontier = set(seeds)
    while True:
        faces = [f for f in geo.face_ids if all(u in ball for u in lattice.faces[f])]
        rows_edges = sorted({e for f in faces for e in lattice.faces_of(2, f, 1) if geo.measured[e]} | sigma)
        row_of = {e: i for i, e in enumerate(rows_edges)}
        rows = [0] * len(rows_edges)
        for j, f in enumerate(faces):
            for e in lattice.faces_of(2, f, 1):
                if geo.measured[e]:
                    rows[row_of[e]] |= 1 << j
        b = 0
        for e in sigma:
            b |= 1 << row_of[e]
        x = gf2_solve(BitMatrix(tuple(rows), len(faces)), b)
        if x is not None:
            return {faces[j] for j in unpack(x)}
        nxt = {w for u in frontier if u not in geo.quasi for w in geo.nbrs[u]} - ball
        if not nxt:
            raise SweepFailure(f"sweep color {geo.kappa}: restricted syndrome is not a boundary")
        ball |= nxt
        frontier = nxt


def sweep_find_faces(lattice: DualLattice, sigma_kappa: Chain | Iterable[int], kappa: Color,
                     cfg: LiftConfig = LiftConfig(), d: int = 3) -> Chain:
    """Faces missing ``kappa`` whose checked boundary edges are ``sigma_kappa``."""
    kappa = Color.parse(kappa)
    if kappa == cfg.lift_color:
        raise ValueError("the lift color is not a sweep color")
    geo = _restricted(lattice, kappa)
    sigma = set(sigma_kappa.members if isinstance(sigma_kappa, Chain) else sigma_kappa)
    for e in sigma:
        a, b = lattice.edges[e]
        if kappa in (lattice.color(a), lattice.color(b)):
            raise ValueError(f"edge {e} touches a {kappa} vertex")
    if cfg.sweep_mode == "gf2":
        gamma = _gf2_fill(geo, set(sigma))
    else:
        max_rounds = cfg.max_sweep_rounds or 32 * d
        per = cfg.rounds_per_direction or math.ceil(d / 2)
        gamma = _sweep_rule(geo, set(sigma), cfg.sweep_schedule, max_rounds, per)
    return Chain(2, frozenset(gamma))


# lift ------------------------------------------------------------------------


def _fix_quasi_rim(lattice: DualLattice, q: int, gamma_q: set[int]) -> set[int]:
    """Choose the quasivertex-only faces at ``q`` so its link syndrome closes up.

    Faces spanned by three quasivertices carry no checked edge, so the
    syndrome never constrains them; they are set here so that the projected
    edges on the link disc of ``q`` form a cycle.
    """
    quasi = sorted(lattice.quasivertices.values())
    others = [u for u in quasi if u != q]
    rim_faces = {lattice.index_of((q, a, b)): (a, b) for a, b in itertools.combinations(others, 2)}
    kept = {f for f in gamma_q if f not in rim_faces}
    parity = {u: 0 for u in others}
    for f in kept:
        for u in lattice.faces[f]:
            if u in parity:
                parity[u] ^= 1
    a, b, c = others
    # rim edges (a,b), (a,c), (b,c) with (b,c) left empty
    if parity[b]:
        kept.add(lattice.index_of((q, a, b)))
    if parity[c]:
        kept.add(lattice.index_of((q, a, c)))
    return kept


@dataclass
class PeelStats:
    iterations: int = 0


def _link_projection(lattice: DualLattice, v: int, gamma_v: Iterable[int]) -> set[int]:
    out = set()
    for f in gamma_v:
        vs = lattice.faces[f]
        if v not in vs:
            raise ValueError(f"face {f} does not contain vertex {v}")
        out ^= {lattice.index_of(u for u in vs if u != v)}
    return out


def lift_vertex_peel(lattice: DualLattice, v: int, gamma_v: Chain | Iterable[int],
                     stats: PeelStats | None = None) -> Chain:
    """Tetrahedra around ``v`` whose faces through ``v`` are exactly ``gamma_v``.

    Works on the link surface of ``v``: each face through ``v`` becomes an
    edge of the link, each tetrahedron a link face.  Faces are peeled off from
    edges that border a single remaining face; a bulk link (a sphere) is first
    punctured at its smallest face.  The smaller of the two complementary
    answers is returned.  At a quasivertex the faces spanned by quasivertices
    are unconstrained and get rechosen so the link syndrome closes up.
    """
    gamma = gamma_v.members if isinstance(gamma_v, Chain) else frozenset(gamma_v)
    if lattice.is_quasi(v):
        gamma = _fix_quasi_rim(lattice, v, set(gamma))
    tets = sorted(star(lattice, v, 3))
    face_tet = {}
    for t in tets:
        face_tet[lattice.index_of(u for u in lattice.tetrahedra[t] if u != v)] = t
    remaining = set(face_tet)
    syndrome = _link_projection(lattice, v, gamma)
    if not lattice.is_quasi(v) and remaining:
        remaining.discard(min(remaining))
    count: dict[int, int] = {}
    for f in remaining:
        for e in lattice.faces_of(2, f, 1):
            count[e] = count.get(e, 0) + 1
    heap = [e for e, c in count.items() if c == 1]
    heapq.heapify(heap)
    chosen: set[int] = set()
    while remaining:
        while heap and count[heap[0]] != 1:
            heapq.heappop(heap)
        if not heap:
            raise LiftFailure(f"link of vertex {v} cannot be peeled")
        e = heapq.heappop(heap)
        f = next(g for g in lattice.cofaces(1, e, 2) if g in remaining)
        if e in syndrome:
            chosen.add(f)
            for fe in lattice.faces_of(2, f, 1):
                syndrome ^= {fe}
        remaining.discard(f)
        for fe in lattice.faces_of(2, f, 1):
            count[fe] -= 1
            if count[fe] == 1:
                heapq.heappush(heap, fe)
        if stats is not None:
            stats.iterations += 1
    if syndrome:
        raise LiftFailure(f"vertex {v}: {len(syndrome)} link edges left unmatched")
    result = {face_tet[f] for f in chosen}
    if len(result) > len(tets) - len(result):
        result = set(tets) - result
    return Chain(3, frozenset(result))


def lift_vertex_naive(lattice: DualLattice, v: int, gamma_v: Chain | Iterable[int], cap: int = 24) -> Chain:
    """Exhaustive lift: smallest subset of the star of ``v`` with the required faces.

    Every subset is covered by a meet-in-the-middle split of the star.  Ties
    between equally small answers go to the one avoiding the tetrahedron over
    the smallest link face, then to the lexicographically smallest.  At a
    quasivertex the faces spanned by quasivertices are not constrained.
    """
    gamma = gamma_v.members if isinstance(gamma_v, Chain) else frozenset(gamma_v)
    tets = sorted(star(lattice, v, 3))
    if len(tets) > cap:
        raise LiftRefused(f"star of vertex {v} has {len(tets)} tetrahedra (cap {cap})")
    through = sorted(lattice.cofaces(0, v, 2))
    if lattice.is_quasi(v):
        # faces spanned by quasivertices carry no checked edge and are left free
        through = [f for f in through if not all(lattice.is_quasi(u) for u in lattice.faces[f])]
    around = {f: i for i, f in enumerate(through)}
    target = 0
    for f in gamma:
        if v not in lattice.faces[f]:
            raise ValueError(f"face {f} does not contain vertex {v}")
        if f in around:
            target ^= 1 << around[f]
    masks = []
    for t in tets:
        m = 0
        for f in lattice.faces_of(3, t, 2):
            if f in around:
                m |= 1 << around[f]
        masks.append(m)
    half = len(tets) // 2

    def table(ms: list[int]) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for sel in range(1 << len(ms)):
            acc = 0
            for i, m in enumerate(ms):
                if sel >> i & 1:
                    acc ^= m
            out.setdefault(acc, []).append(sel)
        return out

    left, right = table(masks[:half]), table(masks[half:])
    solutions = []
    for acc, sels in left.items():
        for r in right.get(acc ^ target, ()):
            for sel in sels:
                solutions.append(sel | (r << half))
    if not solutions:
        raise LiftFailure(f"vertex {v}: no subset of its star has the requested faces")
    puncture = None
    if not lattice.is_quasi(v):
        link = {lattice.index_of(u for u in lattice.tetrahedra[t] if u != v): i for i, t in enumerate(tets)}
        puncture = link[min(link)]

    def key(sel: int):
        members = [tets[i] for i in range(len(tets)) if sel >> i & 1]
        hits = 1 if puncture is not None and sel >> puncture & 1 else 0
        return (len(members), hits, members)

    best = min(solutions, key=key)
    return Chain(3, frozenset(tets[i] for i in range(len(tets)) if best >> i & 1))


# full decoder ------------------------------------------------------------------


def decode_x(code: TetrahedralCode, sigma: Chain | Iterable[int], cfg: LiftConfig = LiftConfig(),
             check: bool = False) -> DecodeOutcome:
    """Correction for a loop-like syndrome, or a heralded failure."""
    lattice = code.lattice
    sig = sigma.members if isinstance(sigma, Chain) else frozenset(sigma)
    checked = code.is_z_check_edge
    for e in sig:
        if not checked[e]:
            raise ValueError(f"edge {e} carries no Z check")
    if not sig:
        return DecodeOutcome(Chain(3))
    try:
        gamma: dict[int, int] = {}
        for kappa in cfg.sweep_colors:
            part = restrict_edges(lattice, sig, kappa)
            faces = sweep_find_faces(lattice, part, kappa, cfg, code.d)
            for f in faces.members:
                if f in gamma:
                    raise SweepFailure(f"face {f} produced by two sweep colors")
                gamma[f] = kappa
        lift = cfg.lift_color
        by_vertex: dict[int, set[int]] = {}
        for f in gamma:
            vs = [u for u in lattice.faces[f] if lattice.color(u) == lift]
            by_vertex.setdefault(vs[0], set()).add(f)
        tau: set[int] = set()
        for v in sorted(by_vertex):
            tau |= lift_vertex_peel(lattice, v, by_vertex[v]).members
    except DecodeFailure as err:
        return DecodeOutcome.failed(err)
    correction = Chain(3, frozenset(tau))
    if check and extract_x_syndrome(code, tau).members != sig:
        raise AssertionError("correction does not reproduce the syndrome")
    return DecodeOutcome(correction)


def restrict_edges(lattice: DualLattice, sig: Iterable[int], kappa: Color) -> frozenset[int]:
    color = lattice.color
    return frozenset(e for e in sig if color(lattice.edges[e][0]) != kappa and color(lattice.edges[e][1]) != kappa)
