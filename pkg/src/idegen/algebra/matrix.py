"""Small dense matrices of polynomials.

Determinants use division-free Laplace expansion over column subsets
(``O(n 2^n)`` states, zero entries skipped), which is exact and cheap for the
n <= 10 metrics handled here.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

from idegen.algebra.coords import CoordinateSystem
from idegen.algebra.poly import Polynomial
from idegen.errors import DimensionMismatch, NonConstantDeterminant, SingularMatrix


class PolyMatrix:
    __slots__ = ("coords", "rows", "cols", "_entries")

    def __init__(self, coords: CoordinateSystem, entries: Sequence[Sequence[Polynomial]]):
        rows = len(entries)
        cols = len(entries[0]) if rows else 0
        if any(len(r) != cols for r in entries):
            raise DimensionMismatch("ragged matrix")
        self.coords = coords
        self.rows = rows
        self.cols = cols
        self._entries = tuple(tuple(r) for r in entries)

    @classmethod
    def zeros(cls, coords: CoordinateSystem, rows: int, cols: int | None = None) -> "PolyMatrix":
        cols = rows if cols is None else cols
        z = Polynomial.zero(coords)
        return cls(coords, [[z] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, coords: CoordinateSystem, n: int) -> "PolyMatrix":
        z = Polynomial.zero(coords)
        one = Polynomial.constant(coords, 1)
        return cls(coords, [[one if i == j else z for j in range(n)] for i in range(n)])

    @classmethod
    def build(cls, coords: CoordinateSystem, rows: int, cols: int,
              fn: Callable[[int, int], Polynomial]) -> "PolyMatrix":
        return cls(coords, [[fn(i, j) for j in range(cols)] for i in range(rows)])

    def __getitem__(self, ij: tuple[int, int]) -> Polynomial:
        i, j = ij
        return self._entries[i][j]

    def row(self, i: int) -> tuple[Polynomial, ...]:
        return self._entries[i]

    def tolist(self) -> list[list[Polynomial]]:
        return [list(r) for r in self._entries]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_symmetric(self) -> bool:
        return self.is_square() and all(
            self._entries[i][j] == self._entries[j][i]
            for i in range(self.rows) for j in range(i + 1, self.cols)
        )

    def is_identity(self) -> bool:
        return self.is_square() and all(
            self._entries[i][j] == (1 if i == j else 0)
            for i in range(self.rows) for j in range(self.cols)
        )

    def is_constant(self) -> bool:
        return all(e.is_constant() for r in self._entries for e in r)

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(self.coords, [list(c) for c in zip(*self._entries)]) if self.rows else self

    def map(self, fn: Callable[[Polynomial], Polynomial]) -> "PolyMatrix":
        return PolyMatrix(self.coords, [[fn(e) for e in r] for r in self._entries])

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.shape == other.shape and self._entries == other._entries

    def __hash__(self):
        return hash(self._entries)

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} + {other.shape}")
        return PolyMatrix(self.coords, [
            [a + b for a, b in zip(ra, rb)] for ra, rb in zip(self._entries, other._entries)
        ])

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} - {other.shape}")
        return PolyMatrix(self.coords, [
            [a - b for a, b in zip(ra, rb)] for ra, rb in zip(self._entries, other._entries)
        ])

    def scale(self, c) -> "PolyMatrix":
        return self.map(lambda e: e * c)

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"{self.shape} @ {other.shape}")
        z = Polynomial.zero(self.coords)
        out = []
        for i in range(self.rows):
            ri = self._entries[i]
            row = []
            for j in range(other.cols):
                acc = z
                for t in range(self.cols):
                    a = ri[t]
                    if a:
                        b = other._entries[t][j]
                        if b:
                            acc = acc + a * b
                row.append(acc)
            out.append(row)
        return PolyMatrix(self.coords, out)

    def det(self) -> Polynomial:
        if not self.is_square():
            raise DimensionMismatch("determinant of a non-square matrix")
        if self.rows == 0:
            return Polynomial.constant(self.coords, 1)
        final = _expand_minors(self, range(self.rows))
        return final.get((1 << self.cols) - 1, Polynomial.zero(self.coords))

    def __str__(self) -> str:
        return "[" + ", ".join("[" + ", ".join(str(e) for e in r) + "]" for r in self._entries) + "]"

    def __repr__(self) -> str:
        return f"PolyMatrix({self})"


def _expand_minors(M: PolyMatrix, rows: Iterable[int]) -> dict[int, Polynomial]:
    """Signed determinants of ``rows`` x (every column subset of that size).

    Keys are column bitmasks; columns are taken in increasing order.
    """
    layer: dict[int, Polynomial] = {0: Polynomial.constant(M.coords, 1)}
    for r in rows:
        nxt: dict[int, Polynomial] = {}
        row = M.row(r)
        for mask, val in layer.items():
            for c, entry in enumerate(row):
                bit = 1 << c
                if mask & bit or not entry:
                    continue
                # inversions added: already-used columns to the right of c
                term = val * entry
                if bin(mask >> (c + 1)).count("1") & 1:
                    term = -term
                key = mask | bit
                prev = nxt.get(key)
                nxt[key] = term if prev is None else prev + term
        layer = {k: v for k, v in nxt.items() if v}
    return layer


def adjugate(M: PolyMatrix) -> PolyMatrix:
    n = M.rows
    if not M.is_square():
        raise DimensionMismatch("adjugate of a non-square matrix")
    full = (1 << n) - 1
    z = Polynomial.zero(M.coords)
    adj = [[z] * n for _ in range(n)]
    for i in range(n):
        minors = _expand_minors(M, [r for r in range(n) if r != i])
        for j in range(n):
            mnr = minors.get(full ^ (1 << j))
            if mnr is not None:
                # adj[j][i] = (-1)^(i+j) * minor(i, j)
                adj[j][i] = -mnr if (i + j) & 1 else mnr
    return PolyMatrix(M.coords, adj)


def mat_inverse_constdet(M: PolyMatrix) -> PolyMatrix:
    """Exact inverse of a square polynomial matrix whose determinant is a
    nonzero constant: ``adjugate(M) / det(M)``."""
    if not M.is_square():
        raise DimensionMismatch("inverse of a non-square matrix")
    d = M.det()
    if d.is_zero():
        raise SingularMatrix("matrix is singular")
    if not d.is_constant():
        raise NonConstantDeterminant(d)
    inv_d = 1 / d.constant_value()
    return adjugate(M).scale(inv_d)
