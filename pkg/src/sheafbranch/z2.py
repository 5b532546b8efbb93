"""Exact linear algebra over the two-element field.

Vectors are Python ints used as bitsets: bit ``i`` is coordinate ``i``.
Matrices store one int per row, so a row-vector product is an AND plus a
parity and a column operation is a single XOR.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


def bits(v: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``v`` in increasing order."""
    while v:
        low = v & -v
        yield low.bit_length() - 1
        v ^= low


def vector_from_bits(indices: Iterable[int]) -> int:
    v = 0
    for i in indices:
        v ^= 1 << i
    return v


def all_vectors(dim: int) -> range:
    """Every vector of a ``dim``-dimensional space, as ints."""
    return range(1 << dim)


@dataclass(frozen=True)
class Z2Matrix:
    """Bit-packed matrix over Z2 with ``rows`` x ``cols`` entries."""

    rows: int
    cols: int
    data: tuple[int, ...]

    def __post_init__(self):
        if len(self.data) != self.rows:
            raise ValueError(f"expected {self.rows} row words, got {len(self.data)}")
        limit = 1 << self.cols
        for r, word in enumerate(self.data):
            if word < 0 or word >= limit:
                raise ValueError(f"row {r} has bits outside {self.cols} columns")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> Z2Matrix:
        return cls(rows, cols, (0,) * rows)

    @classmethod
    def identity(cls, n: int) -> Z2Matrix:
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_lists(cls, entries: Sequence[Sequence[int]], cols: int | None = None) -> Z2Matrix:
        if cols is None:
            cols = len(entries[0]) if entries else 0
        data = []
        for row in entries:
            if len(row) != cols:
                raise ValueError("ragged matrix")
            data.append(vector_from_bits(c for c, x in enumerate(row) if x % 2))
        return cls(len(data), cols, tuple(data))

    @classmethod
    def from_columns(cls, columns: Sequence[int], rows: int) -> Z2Matrix:
        data = [0] * rows
        for c, col in enumerate(columns):
            for r in bits(col):
                if r >= rows:
                    raise ValueError(f"column {c} has bit {r} outside {rows} rows")
                data[r] |= 1 << c
        return cls(rows, len(columns), tuple(data))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def column(self, c: int) -> int:
        return vector_from_bits(r for r, word in enumerate(self.data) if word >> c & 1)

    def columns(self) -> list[int]:
        cols = [0] * self.cols
        for r, word in enumerate(self.data):
            for c in bits(word):
                cols[c] |= 1 << r
        return cols

    def apply(self, v: int) -> int:
        """Matrix-vector product; ``v`` and the result are bitsets."""
        out = 0
        for r, word in enumerate(self.data):
            if (word & v).bit_count() & 1:
                out |= 1 << r
        return out

    def __matmul__(self, other: Z2Matrix) -> Z2Matrix:
        if not isinstance(other, Z2Matrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        data = []
        for word in self.data:
            acc = 0
            for k in bits(word):
                acc ^= other.data[k]
            data.append(acc)
        return Z2Matrix(self.rows, other.cols, tuple(data))

    def __add__(self, other: Z2Matrix) -> Z2Matrix:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        return Z2Matrix(self.rows, self.cols, tuple(a ^ b for a, b in zip(self.data, other.data)))

    def transpose(self) -> Z2Matrix:
        return Z2Matrix(self.cols, self.rows, tuple(self.columns()))

    def rank(self) -> int:
        return EchelonBasis.spanning(self.data).rank

    def is_zero(self) -> bool:
        return not any(self.data)

    def to_lists(self) -> list[list[int]]:
        return [[word >> c & 1 for c in range(self.cols)] for word in self.data]

    def __str__(self) -> str:
        return "\n".join("".join(str(x) for x in row) for row in self.to_lists())


class EchelonBasis:
    """Incremental echelon form keyed by leading (highest) bit.

    Every stored row carries a tag recording which tagged inputs it is a
    combination of, so reducing a vector to zero also yields its
    coordinates in terms of those inputs.
    """

    def __init__(self):
        self._rows: dict[int, tuple[int, int]] = {}

    @classmethod
    def spanning(cls, vectors: Iterable[int]) -> EchelonBasis:
        basis = cls()
        for v in vectors:
            basis.add(v)
        return basis

    @property
    def rank(self) -> int:
        return len(self._rows)

    def reduce(self, v: int) -> tuple[int, int]:
        """Return ``(residue, tag)`` with ``v = residue + sum of rows in tag``."""
        tag = 0
        rows = self._rows
        while v:
            lead = v.bit_length() - 1
            hit = rows.get(lead)
            if hit is None:
                break
            v ^= hit[0]
            tag ^= hit[1]
        return v, tag

    def add(self, v: int, tag: int = 0) -> bool:
        """Insert ``v``; return False (and store nothing) if it is dependent."""
        residue, used = self.reduce(v)
        if not residue:
            return False
        self._rows[residue.bit_length() - 1] = (residue, tag ^ used)
        return True

    def contains(self, v: int) -> bool:
        return self.reduce(v)[0] == 0

    def solve(self, v: int) -> int | None:
        """Tag combination producing ``v``, or None when ``v`` is outside the span."""
        residue, tag = self.reduce(v)
        return None if residue else tag


def kernel_basis(columns: Sequence[int]) -> list[int]:
    """Basis of the null space of the matrix whose columns are ``columns``.

    Kernel vectors are returned as bitsets over column indices. The
    elimination visits columns left to right, so the basis is reproducible.
    """
    echelon = EchelonBasis()
    kernel = []
    for c, col in enumerate(columns):
        residue, used = echelon.reduce(col)
        if residue:
            echelon._rows[residue.bit_length() - 1] = (residue, used ^ (1 << c))
        else:
            kernel.append(used ^ (1 << c))
    return kernel


def column_rank(columns: Iterable[int]) -> int:
    return EchelonBasis.spanning(columns).rank
