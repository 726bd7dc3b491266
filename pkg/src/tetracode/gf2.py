"""Exact linear algebra over GF(2) with rows packed into Python ints.

Bit ``j`` of a row integer is column ``j``.  Used to validate codes, to
classify residual errors and as an independent check on the decoders.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Iterable, Sequence

if TYPE_CHECKING:
    from .code import TetrahedralCode


def pack(bits: Iterable[int]) -> int:
    """Set of column indices -> packed row."""
    out = 0
    for j in bits:
        out |= 1 << j
    return out


def unpack(row: int) -> list[int]:
    out = []
    j = 0
    while row:
        if row & 1:
            out.append(j)
        row >>= 1
        j += 1
    return out


@dataclass(frozen=True)
class BitMatrix:
    rows: tuple[int, ...]
    ncols: int

    def __post_init__(self):
        limit = 1 << self.ncols
        for r in self.rows:
            if r < 0 or r >= limit:
                raise ValueError(f"row {r:#x} does not fit in {self.ncols} columns")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @classmethod
    def from_supports(cls, supports: Iterable[Iterable[int]], ncols: int) -> BitMatrix:
        return cls(tuple(pack(s) for s in supports), ncols)

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence[int]]) -> BitMatrix:
        dense = [list(r) for r in dense]
        ncols = len(dense[0]) if dense else 0
        return cls(tuple(pack(j for j, x in enumerate(r) if x & 1) for r in dense), ncols)

    def to_dense(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.ncols)] for r in self.rows]

    def matvec(self, x: int) -> int:
        """M x for packed column vector ``x``; result packed over rows."""
        out = 0
        for i, r in enumerate(self.rows):
            if (r & x).bit_count() & 1:
                out |= 1 << i
        return out

    def transpose(self) -> BitMatrix:
        cols = [0] * self.ncols
        for i, r in enumerate(self.rows):
            for j in unpack(r):
                cols[j] |= 1 << i
        return BitMatrix(tuple(cols), self.nrows)


def echelon_basis(rows: Iterable[int]) -> dict[int, int]:
    """Basis of the row space keyed by pivot (highest set bit)."""
    basis: dict[int, int] = {}
    for r in rows:
        while r:
            top = r.bit_length() - 1
            b = basis.get(top)
            if b is None:
                basis[top] = r
                break
            r ^= b
    return basis


def gf2_rank(m: BitMatrix) -> int:
    return len(echelon_basis(m.rows))


def in_row_space(basis: dict[int, int], v: int) -> bool:
    while v:
        b = basis.get(v.bit_length() - 1)
        if b is None:
            return False
        v ^= b
    return True


def gf2_solve(m: BitMatrix, b: int) -> int | None:
    """Solve ``M x = b``.

    ``b`` is packed over rows, the answer over columns.  Returns None when the
    system is inconsistent.
    """
    if b < 0 or b >> m.nrows:
        raise ValueError(f"right-hand side has more than {m.nrows} bits")
    # Augmented rows: column bits, then the rhs bit at position ncols.
    aug = [r | (((b >> i) & 1) << m.ncols) for i, r in enumerate(m.rows)]
    pivots: list[tuple[int, int]] = []
    rank = 0
    for col in range(m.ncols):
        bit = 1 << col
        sel = next((i for i in range(rank, len(aug)) if aug[i] & bit), None)
        if sel is None:
            continue
        aug[rank], aug[sel] = aug[sel], aug[rank]
        piv = aug[rank]
        for i in range(len(aug)):
            if i != rank and aug[i] & bit:
                aug[i] ^= piv
        pivots.append((col, rank))
        rank += 1
    for i in range(rank, len(aug)):
        if aug[i] >> m.ncols:
            return None
    x = 0
    for col, i in pivots:
        if aug[i] >> m.ncols & 1:
            x |= 1 << col
    return x


class Membership(Enum):
    STABILIZER = "stabilizer"
    LOGICAL = "logical"
    OUTSIDE_NORMALIZER = "outside-normalizer"


class PauliType(Enum):
    X = "x"
    Z = "z"

    @classmethod
    def parse(cls, text: str | PauliType) -> PauliType:
        if isinstance(text, PauliType):
            return text
        return cls(text.strip().lower())


def stabilizer_membership(code: TetrahedralCode, residual: Iterable[int], kind: PauliType | str) -> Membership:
    """Classify a Pauli of a single type by its action on the code.

    An X-type residual is outside the normalizer when it anticommutes with a
    Z check; otherwise it is a stabilizer when it lies in the span of the X
    checks and a non-trivial logical when it does not.
    """
    kind = PauliType.parse(kind)
    r = pack(residual)
    opposite = code.hz_rows if kind is PauliType.X else code.hx_rows
    for row in opposite:
        if (row & r).bit_count() & 1:
            return Membership.OUTSIDE_NORMALIZER
    basis = code.row_basis(kind)
    return Membership.STABILIZER if in_row_space(basis, r) else Membership.LOGICAL


def min_logical_weight(code: TetrahedralCode, kind: PauliType | str, w_max: int) -> int | None:
    """Smallest weight of a non-trivial logical of the given type.

    Exhaustive over all supports of weight <= ``w_max``; returns None when no
    logical exists in that range (the distance then exceeds ``w_max``).
    """
    kind = PauliType.parse(kind)
    n = code.n_qubits
    checks = code.hz_rows if kind is PauliType.X else code.hx_rows
    basis = code.row_basis(kind)
    for w in range(1, w_max + 1):
        for support in itertools.combinations(range(n), w):
            r = pack(support)
            if any((row & r).bit_count() & 1 for row in checks):
                continue
            if not in_row_space(basis, r):
                return w
    return None
