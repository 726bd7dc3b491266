"""Colored simplicial complex underlying the tetrahedral color code.

Vertices are X stabilizers (except the four quasivertices), edges are Z
stabilizers and tetrahedra are qubits.  Everything here is geometric: no
decoding semantics live in this module.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, Iterator


class Color(IntEnum):
    R = 0
    G = 1
    B = 2
    Y = 3

    @property
    def letter(self) -> str:
        return "rgby"[self.value]

    @classmethod
    def parse(cls, text: str | Color) -> Color:
        if isinstance(text, Color):
            return text
        try:
            return cls("rgby".index(text.strip().lower()))
        except ValueError:
            raise ValueError(f"unknown color {text!r}; expected one of r, g, b, y") from None

    def __str__(self) -> str:
        return self.letter


ALL_COLORS = frozenset(Color)


@dataclass(frozen=True)
class Vertex:
    id: int
    color: Color
    is_quasi: bool
    position: tuple[int, int, int]


@dataclass(frozen=True)
class Chain:
    """Set of simplex ids of a single dimension, added mod 2."""

    dim: int
    members: frozenset[int] = frozenset()

    def __post_init__(self):
        if not 0 <= self.dim <= 3:
            raise ValueError(f"chain dimension must be 0..3, got {self.dim}")
        if not isinstance(self.members, frozenset):
            object.__setattr__(self, "members", frozenset(self.members))

    def __add__(self, other: Chain) -> Chain:
        if other.dim != self.dim:
            raise ValueError(f"cannot add chains of dimension {self.dim} and {other.dim}")
        return Chain(self.dim, self.members ^ other.members)

    __xor__ = __add__

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.members))

    def __contains__(self, item: object) -> bool:
        return item in self.members

    def __bool__(self) -> bool:
        return bool(self.members)


def _as_members(c: Chain | Iterable[int]) -> frozenset[int]:
    return c.members if isinstance(c, Chain) else frozenset(c)


@dataclass(frozen=True, eq=False)
class DualLattice:
    """Immutable colored simplicial complex with incidence maps.

    ``simplices[k]`` holds the sorted vertex tuples of the k-simplices; a
    simplex id is its index in that list.  Incidence maps are derived once in
    ``__post_init__``.
    """

    vertices: tuple[Vertex, ...]
    edges: tuple[tuple[int, int], ...]
    faces: tuple[tuple[int, int, int], ...]
    tetrahedra: tuple[tuple[int, int, int, int], ...]
    _index: list = field(init=False, repr=False)
    _cofaces: dict = field(init=False, repr=False)
    _down: dict = field(init=False, repr=False)

    def __post_init__(self):
        simplices = self.simplices
        index = [{(v.id,): v.id for v in self.vertices}]
        for k in (1, 2, 3):
            index.append({s: i for i, s in enumerate(simplices[k])})
            if len(index[k]) != len(simplices[k]):
                raise ValueError(f"duplicate {k}-simplices")
        down: dict[tuple[int, int], list[tuple[int, ...]]] = {}
        for n in (1, 2, 3):
            for m in range(n):
                table = []
                for s in simplices[n]:
                    table.append(tuple(index[m][sub] for sub in itertools.combinations(s, m + 1)))
                down[n, m] = table
        cofaces: dict[tuple[int, int], list[list[int]]] = {}
        for n in (1, 2, 3):
            for m in range(n):
                up: list[list[int]] = [[] for _ in simplices[m]]
                for i, subs in enumerate(down[n, m]):
                    for j in subs:
                        up[j].append(i)
                cofaces[m, n] = up
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_down", down)
        object.__setattr__(self, "_cofaces", cofaces)

    @property
    def simplices(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        return (tuple((v.id,) for v in self.vertices), self.edges, self.faces, self.tetrahedra)

    def count(self, dim: int) -> int:
        return len(self.simplices[dim])

    def index_of(self, vertex_ids: Iterable[int]) -> int | None:
        """Id of the simplex spanned by ``vertex_ids``, or None if absent."""
        key = tuple(sorted(vertex_ids))
        return self._index[len(key) - 1].get(key)

    def vertices_of(self, dim: int, sid: int) -> tuple[int, ...]:
        return self.simplices[dim][sid]

    def faces_of(self, dim: int, sid: int, m: int) -> tuple[int, ...]:
        """The m-dimensional faces of simplex ``sid`` of dimension ``dim``."""
        if m == dim:
            return (sid,)
        return self._down[dim, m][sid]

    def cofaces(self, dim: int, sid: int, n: int) -> list[int]:
        """The n-dimensional simplices containing simplex ``sid``."""
        return self._cofaces[dim, n][sid]

    def color(self, vid: int) -> Color:
        return self.vertices[vid].color

    def is_quasi(self, vid: int) -> bool:
        return self.vertices[vid].is_quasi

    @property
    def quasivertices(self) -> dict[Color, int]:
        return {v.color: v.id for v in self.vertices if v.is_quasi}

    def is_quasi_edge(self, eid: int) -> bool:
        """True when both endpoints are quasivertices (such edges carry no check)."""
        a, b = self.edges[eid]
        return self.vertices[a].is_quasi and self.vertices[b].is_quasi

    # serialization -----------------------------------------------------------

    def to_json(self) -> str:
        doc = {
            "vertices": [
                {"id": v.id, "color": v.color.letter, "quasi": v.is_quasi, "position": list(v.position)}
                for v in self.vertices
            ],
            "edges": [list(e) for e in self.edges],
            "faces": [list(f) for f in self.faces],
            "tetrahedra": [list(t) for t in self.tetrahedra],
        }
        return json.dumps(doc, indent=None, separators=(",", ":")) + "\n"

    @classmethod
    def from_json(cls, text: str) -> DualLattice:
        doc = json.loads(text)
        verts = []
        for i, v in enumerate(doc["vertices"]):
            if v["id"] != i:
                raise ValueError(f"vertex ids must equal array indices (got {v['id']} at {i})")
            verts.append(Vertex(i, Color.parse(v["color"]), bool(v["quasi"]), tuple(v["position"])))
        return cls(
            tuple(verts),
            tuple(tuple(e) for e in doc["edges"]),
            tuple(tuple(f) for f in doc["faces"]),
            tuple(tuple(t) for t in doc["tetrahedra"]),
        )

    @classmethod
    def from_tetrahedra(cls, vertices: Iterable[Vertex], tetrahedra: Iterable[Iterable[int]]) -> DualLattice:
        """Build the full complex (edges and faces included) from its 3-simplices."""
        verts = tuple(vertices)
        tets = sorted({tuple(sorted(t)) for t in tetrahedra})
        faces = sorted({f for t in tets for f in itertools.combinations(t, 3)})
        edges = sorted({e for t in tets for e in itertools.combinations(t, 2)})
        return cls(verts, tuple(edges), tuple(faces), tuple(tets))


def boundary_project(lattice: DualLattice, c: Chain, m: int) -> Chain:
    """Mod-2 projection of an n-chain onto its m-dimensional faces (m < n).

    Quasivertices and quasivertex-only simplices are kept; callers filter.
    """
    if not 0 <= m < c.dim:
        raise ValueError(f"cannot project a {c.dim}-chain to dimension {m}")
    out: set[int] = set()
    table = lattice._down[c.dim, m]
    for sid in c.members:
        for sub in table[sid]:
            if sub in out:
                out.remove(sub)
            else:
                out.add(sub)
    return Chain(m, frozenset(out))


def star(lattice: DualLattice, v: int, k: int) -> frozenset[int]:
    if k == 0:
        return frozenset((v,))
    return frozenset(lattice.cofaces(0, v, k))


def link_surface(lattice: DualLattice, v: int) -> frozenset[int]:
    """Faces of the tetrahedra around ``v`` that avoid ``v``.

    A sphere for an ordinary vertex, a disc for a quasivertex.
    """
    out = set()
    for t in lattice.cofaces(0, v, 3):
        rest = tuple(u for u in lattice.tetrahedra[t] if u != v)
        out.add(lattice._index[2][rest])
    return frozenset(out)


def edge_label(lattice: DualLattice, e: int) -> frozenset[Color]:
    a, b = lattice.edges[e]
    return ALL_COLORS - {lattice.color(a), lattice.color(b)}


def restrict_syndrome_by_sweep_color(lattice: DualLattice, sigma: Chain | Iterable[int], kappa: Color) -> Chain:
    """Syndrome edges with no endpoint of color ``kappa``."""
    members = _as_members(sigma)
    cols = lattice.vertices
    return Chain(1, frozenset(
        e for e in members
        if cols[lattice.edges[e][0]].color != kappa and cols[lattice.edges[e][1]].color != kappa
    ))


@dataclass(frozen=True)
class RestrictedGraph:
    """Unit-weight graph on the vertices of two colors."""

    keep: frozenset[Color]
    nodes: tuple[int, ...]
    adjacency: dict[int, tuple[int, ...]]
    edge_ids: dict[tuple[int, int], int]

    def weight(self, u: int, w: int) -> int:
        return 1

    def edge_id(self, u: int, w: int) -> int:
        return self.edge_ids[(u, w) if u < w else (w, u)]


def twice_restricted_graph(lattice: DualLattice, keep: Iterable[Color]) -> RestrictedGraph:
    keep = frozenset(Color.parse(c) for c in keep)
    if len(keep) != 2:
        raise ValueError(f"restriction needs exactly two colors, got {sorted(keep)}")
    nodes = tuple(v.id for v in lattice.vertices if v.color in keep)
    adj: dict[int, list[int]] = {u: [] for u in nodes}
    edge_ids = {}
    for eid, (a, b) in enumerate(lattice.edges):
        if lattice.color(a) in keep and lattice.color(b) in keep:
            adj[a].append(b)
            adj[b].append(a)
            edge_ids[a, b] = eid
    return RestrictedGraph(keep, nodes, {u: tuple(sorted(ns)) for u, ns in adj.items()}, edge_ids)
