"""Tetrahedral color codes carved out of the bcc tetrahedral honeycomb.

Vertices of the honeycomb are the bcc points: corners (all coordinates even)
and cube centers (all odd).  Each cell is a tetragonal disphenoid made of two
corners one lattice step apart and two centers one step apart.  The color of
a point is ``(x + y + z) mod 4`` up to relabelling, which makes every plane
``n . p = m`` with ``n`` a tetrahedral axis single-colored.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable

from .gf2 import PauliType, echelon_basis, pack
from .lattice import Color, DualLattice, Vertex

# Outward facet normals of the carved region.
FACET_NORMALS: tuple[tuple[int, int, int], ...] = ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1))

# (x + y + z) mod 4 -> color.  Corners give 0/2, centers 3/1.
_SUM_TO_COLOR = {0: Color.R, 2: Color.G, 3: Color.B, 1: Color.Y}


class CodeConstructionError(ValueError):
    pass


def _dot(n, p) -> int:
    return n[0] * p[0] + n[1] * p[1] + n[2] * p[2]


def bcc_color(p: tuple[int, int, int]) -> Color:
    """Color of a bcc point.

    Corners: ((x+y+z)/2) mod 2 picks r/g; centers: ((x+y+z-3)/2) mod 2 picks b/y.
    """
    parity = {c % 2 for c in p}
    if len(parity) != 1:
        raise ValueError(f"{p} is not a bcc point")
    return _SUM_TO_COLOR[sum(p) % 4]


def bcc_cells(lo: tuple[int, int, int], hi: tuple[int, int, int]) -> list[tuple[tuple[int, int, int], ...]]:
    """All honeycomb cells whose vertices lie in the box ``lo <= p <= hi``.

    Every cell has exactly one corner-corner edge, so cells are enumerated
    from those edges: four cells around each of them.
    """
    cells = []
    ranges = [range(lo[i] + (lo[i] % 2), hi[i] + 1, 2) for i in range(3)]
    for p in itertools.product(*ranges):
        for a in range(3):
            b, c = [i for i in range(3) if i != a]
            q = list(p)
            q[a] += 2
            if q[a] > hi[a]:
                continue
            ring = []
            for sb, sc in ((1, 1), (1, -1), (-1, -1), (-1, 1)):
                m = list(p)
                m[a] += 1
                m[b] += sb
                m[c] += sc
                ring.append(tuple(m))
            for i in range(4):
                u, w = ring[i], ring[(i + 1) % 4]
                if all(lo[k] <= u[k] <= hi[k] and lo[k] <= w[k] <= hi[k] for k in range(3)):
                    cells.append((p, tuple(q), u, w))
    return cells


def build_honeycomb(extent: int) -> DualLattice:
    """Tetrahedral honeycomb on the bcc points of the cube ``[-extent, extent]^3``."""
    if extent < 1:
        raise ValueError(f"extent {extent} contains no honeycomb cell")
    box = (-extent,) * 3, (extent,) * 3
    cells = bcc_cells(*box)
    if not cells:
        raise ValueError(f"extent {extent} contains no honeycomb cell")
    points = sorted({p for cell in cells for p in cell})
    ids = {p: i for i, p in enumerate(points)}
    verts = [Vertex(i, bcc_color(p), False, p) for i, p in enumerate(points)]
    return DualLattice.from_tetrahedra(verts, [[ids[p] for p in cell] for cell in cells])


@dataclass(frozen=True)
class CodeSpec:
    distance: int

    def __post_init__(self):
        d = self.distance
        if not isinstance(d, int) or d < 3 or d % 2 == 0:
            raise ValueError(f"distance must be an odd integer >= 3, got {d!r}")


@dataclass(frozen=True, eq=False)
class TetrahedralCode:
    """A carved lattice together with its stabilizer and logical supports.

    Qubits are tetrahedra (ids of ``lattice.tetrahedra``).  X checks sit on
    the non-quasi vertices listed in ``x_check_vertices``; Z checks sit on
    every edge with at least one non-quasi endpoint (``z_check_edges``).
    """

    lattice: DualLattice
    d: int
    x_check_vertices: tuple[int, ...]
    z_check_edges: tuple[int, ...]
    offsets: tuple[int, int, int, int] = (0, 0, 0, 0)
    facet_colors: tuple[Color, ...] = ()
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n_qubits(self) -> int:
        return self.lattice.count(3)

    @cached_property
    def x_stabilizers(self) -> list[frozenset[int]]:
        return [frozenset(self.lattice.cofaces(0, v, 3)) for v in self.x_check_vertices]

    @cached_property
    def z_stabilizers(self) -> list[frozenset[int]]:
        return [frozenset(self.lattice.cofaces(1, e, 3)) for e in self.z_check_edges]

    @cached_property
    def logical_x_support(self) -> frozenset[int]:
        return frozenset(range(self.n_qubits))

    @cached_property
    def logical_z_support(self) -> frozenset[int]:
        return frozenset(range(self.n_qubits))

    @cached_property
    def hx_rows(self) -> tuple[int, ...]:
        return tuple(pack(s) for s in self.x_stabilizers)

    @cached_property
    def hz_rows(self) -> tuple[int, ...]:
        return tuple(pack(s) for s in self.z_stabilizers)

    @cached_property
    def is_z_check_edge(self) -> list[bool]:
        flags = [False] * self.lattice.count(1)
        for e in self.z_check_edges:
            flags[e] = True
        return flags

    @cached_property
    def is_x_check_vertex(self) -> list[bool]:
        flags = [False] * self.lattice.count(0)
        for v in self.x_check_vertices:
            flags[v] = True
        return flags

    def row_basis(self, kind: PauliType | str) -> dict[int, int]:
        kind = PauliType.parse(kind)
        if kind not in self._cache:
            rows = self.hx_rows if kind is PauliType.X else self.hz_rows
            self._cache[kind] = echelon_basis(rows)
        return self._cache[kind]

    @property
    def rank_hx(self) -> int:
        return len(self.row_basis(PauliType.X))

    @property
    def rank_hz(self) -> int:
        return len(self.row_basis(PauliType.Z))

    @property
    def k(self) -> int:
        return self.n_qubits - self.rank_hx - self.rank_hz

    @cached_property
    def boundary_qubits(self) -> frozenset[int]:
        lat = self.lattice
        return frozenset(t for t, vs in enumerate(lat.tetrahedra) if any(lat.vertices[v].is_quasi for v in vs))

    def summary(self) -> str:
        return f"n={self.n_qubits} Sx={len(self.x_check_vertices)} Sz={len(self.z_check_edges)}"

    def to_dict(self) -> dict:
        beta = boundary_bulk_ratio(self)
        return {
            "d": self.d,
            "n": self.n_qubits,
            "beta": None if math.isinf(beta) else float(beta),
            "beta_fraction": None if math.isinf(beta) else f"{beta.numerator}/{beta.denominator}",
            "offsets": list(self.offsets),
            "x_stabilizers": [{"vertex": v, "qubits": sorted(s)} for v, s in zip(self.x_check_vertices, self.x_stabilizers)],
            "z_stabilizers": [{"edge": e, "qubits": sorted(s)} for e, s in zip(self.z_check_edges, self.z_stabilizers)],
        }


def code_from_lattice(lattice: DualLattice, d: int, offsets=(0, 0, 0, 0), facet_colors=()) -> TetrahedralCode:
    xv = tuple(v.id for v in lattice.vertices if not v.is_quasi)
    ze = tuple(e for e in range(lattice.count(1)) if not lattice.is_quasi_edge(e))
    return TetrahedralCode(lattice, d, xv, ze, tuple(offsets), tuple(facet_colors))


def _box_for(offsets, margin: int):
    # n0+n1 = 2x, n2+n3 = -2x, n0+n2 = 2y, n1+n3 = -2y, n0+n3 = 2z, n1+n2 = -2z
    a = [o + margin for o in offsets]
    hi = ((a[0] + a[1]) // 2, (a[0] + a[2]) // 2, (a[0] + a[3]) // 2)
    lo = (-((a[2] + a[3]) // 2), -((a[1] + a[3]) // 2), -((a[1] + a[2]) // 2))
    return lo, hi


def carve(offsets: tuple[int, int, int, int], d: int = 0) -> tuple[DualLattice, list[str]]:
    """Carve the region ``n_i . p <= offsets[i]`` and collapse each facet.

    Returns the lattice and a list of violated structural invariants (empty
    when the carving is a valid tetrahedral code lattice).
    """
    problems: list[str] = []
    layer_colors = [_SUM_TO_COLOR[(a + 1) % 4] for a in offsets]
    if len(set(layer_colors)) != 4:
        return None, [f"facet layers share colors: {[c.letter for c in layer_colors]}"]
    cells = bcc_cells(*_box_for(offsets, 6))

    def exterior_facet(p):
        viol = [i for i in range(4) if _dot(FACET_NORMALS[i], p) > offsets[i]]
        if not viol:
            return None
        if len(viol) == 1 and _dot(FACET_NORMALS[viol[0]], p) == offsets[viol[0]] + 1:
            return viol[0]
        return -1

    kept: dict[frozenset, tuple] = {}
    collapsed: dict[int, set[Color]] = {i: set() for i in range(4)}
    for cell in cells:
        image = []
        inside = 0
        for p in cell:
            f = exterior_facet(p)
            if f is None:
                image.append(p)
                inside += 1
            elif f < 0:
                break
            else:
                image.append(("q", f))
                collapsed[f].add(bcc_color(p))
        else:
            if inside == 0 or len(set(image)) < 4:
                continue
            key = frozenset(image)
            if key in kept:
                problems.append(f"two cells collapse onto {sorted(map(str, key))}")
            kept[key] = cell
    for f, cols in collapsed.items():
        if cols and cols != {layer_colors[f]}:
            problems.append(f"facet {f} collapses colors {sorted(c.letter for c in cols)}")

    interior = sorted({p for key in kept for p in key if p[0] != "q"})
    if not interior:
        return None, problems + ["no interior vertices"]
    centroid = tuple(sum(p[k] for p in interior) // len(interior) for k in range(3))
    reach = 16 * max(d, 3)
    verts = [Vertex(i, bcc_color(p), False, p) for i, p in enumerate(interior)]
    ids = {p: i for i, p in enumerate(interior)}
    for f in sorted(range(4), key=lambda f: layer_colors[f]):
        n = FACET_NORMALS[f]
        pos = tuple(centroid[k] + reach * n[k] for k in range(3))
        ids["q", f] = len(verts)
        verts.append(Vertex(len(verts), layer_colors[f], True, pos))
    lattice = DualLattice.from_tetrahedra(verts, [[ids[x] for x in key] for key in kept])
    problems += structural_problems(lattice)
    return lattice, problems


def structural_problems(lattice: DualLattice) -> list[str]:
    """Invariants every code lattice must satisfy; empty list when valid."""
    out = []
    quasi = lattice.quasivertices
    if sorted(quasi) != sorted(Color) or sum(v.is_quasi for v in lattice.vertices) != 4:
        out.append("expected exactly one quasivertex of each color")
    for t, vs in enumerate(lattice.tetrahedra):
        if len({lattice.color(v) for v in vs}) != 4:
            out.append(f"tetrahedron {t} does not carry four colors")
        if all(lattice.is_quasi(v) for v in vs):
            out.append("the all-quasivertex tetrahedron must not be a qubit")
    outer = set()
    for f, vs in enumerate(lattice.faces):
        k = len(lattice.cofaces(2, f, 3))
        if k > 2:
            out.append(f"face {f} lies in {k} tetrahedra")
        elif k == 1:
            outer.add(f)
    quasi_faces = {lattice.index_of(c) for c in itertools.combinations(sorted(quasi.values()), 3)}
    if outer != quasi_faces:
        out.append(f"boundary faces are not exactly the four quasivertex triangles ({len(outer)} found)")
    return out


def css_problems(code: TetrahedralCode) -> list[str]:
    out = []
    for i, xs in enumerate(code.hx_rows):
        for j, zs in enumerate(code.hz_rows):
            if (xs & zs).bit_count() & 1:
                out.append(f"X check {i} anticommutes with Z check {j}")
    if code.k != 1:
        out.append(f"code encodes k={code.k} logical qubits, expected 1")
    return out


def validate_code(code: TetrahedralCode) -> None:
    problems = structural_problems(code.lattice) + css_problems(code)
    if problems:
        raise CodeConstructionError("invalid code: " + "; ".join(problems[:10]))


def candidate_offsets(d: int) -> Iterable[tuple[int, int, int, int]]:
    """Offsets with total 2d, reduced modulo lattice translations.

    A bcc translation t shifts the offsets by (n_i . t), which spans the
    vectors 4 e_i - (1, 1, 1, 1); the last three offsets therefore only matter
    mod 4.
    """
    total = 2 * d
    for rest in itertools.product(range(4), repeat=3):
        yield (total - sum(rest),) + rest


def carve_tetrahedral_code(spec: CodeSpec | int) -> TetrahedralCode:
    """Smallest valid carving for distance ``d``.

    Candidates are tried in a fixed order; the first one whose lattice passes
    every structural and CSS check is returned.
    """
    if not isinstance(spec, CodeSpec):
        spec = CodeSpec(spec)
    d = spec.distance
    rejected = []
    for offsets in candidate_offsets(d):
        lattice, problems = carve(offsets, d)
        if lattice is None or problems:
            rejected.append((offsets, problems[:1]))
            continue
        code = code_from_lattice(lattice, d, offsets, [_SUM_TO_COLOR[(a + 1) % 4] for a in offsets])
        extra = css_problems(code)
        if extra:
            rejected.append((offsets, extra[:1]))
            continue
        return code
    raise CodeConstructionError(f"no valid carving for d={d}; rejected {rejected[:4]}")


def boundary_bulk_ratio(code: TetrahedralCode) -> Fraction | float:
    """Qubits touching a quasivertex over qubits touching none (inf if no bulk)."""
    boundary = len(code.boundary_qubits)
    bulk = code.n_qubits - boundary
    if bulk == 0:
        return math.inf
    return Fraction(boundary, bulk)
