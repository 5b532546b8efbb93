"""Cubical complexes of black pixels and their exact Z2 homology.

Each black pixel ``(x, y)`` is the closed unit square ``[x, x+1] x [y, y+1]``.
Two pixels that touch only at a corner share a vertex, so the black
pixels are 8-connected in this model. Many image libraries default to
4-connectivity, which gives different answers on diagonal contacts.

Chains are bitsets (ints) over the cells of one dimension, indexed in the
order ``(y, x, axis)``. This is the ground-truth homology used to check
the faster persistence code.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

from .errors import InclusionViolation, NestednessViolation, NotInSpan, ValidationError
from .z2 import EchelonBasis, Z2Matrix, bits, column_rank, kernel_basis

Pixel = tuple[int, int]

HORIZONTAL, VERTICAL = 0, 1


class Cell(NamedTuple):
    """A vertex, edge or square identified by its lower-left anchor.

    Edges carry an axis: ``HORIZONTAL`` joins ``(x, y)`` to ``(x+1, y)``,
    ``VERTICAL`` joins ``(x, y)`` to ``(x, y+1)``. Vertices and squares
    use axis 0.
    """

    dim: int
    x: int
    y: int
    axis: int = 0

    def sort_key(self) -> tuple[int, int, int, int]:
        return (self.y, self.x, self.dim, self.axis)

    def faces(self) -> tuple[Cell, ...]:
        x, y = self.x, self.y
        if self.dim == 2:
            return (
                Cell(1, x, y, HORIZONTAL),
                Cell(1, x, y + 1, HORIZONTAL),
                Cell(1, x, y, VERTICAL),
                Cell(1, x + 1, y, VERTICAL),
            )
        if self.dim == 1:
            if self.axis == HORIZONTAL:
                return (Cell(0, x, y), Cell(0, x + 1, y))
            return (Cell(0, x, y), Cell(0, x, y + 1))
        return ()


def square_closure(pixel: Pixel) -> tuple[Cell, ...]:
    """The square of ``pixel`` with its four edges and four corners."""
    sq = Cell(2, *pixel)
    edges = sq.faces()
    x, y = pixel
    corners = (Cell(0, x, y), Cell(0, x + 1, y), Cell(0, x, y + 1), Cell(0, x + 1, y + 1))
    return (sq, *edges, *corners)


@dataclass(frozen=True, eq=False)
class CubicalComplex:
    """Face-closed complex generated by the closed squares of a pixel set."""

    pixels: frozenset[Pixel]
    cells: tuple[tuple[Cell, ...], tuple[Cell, ...], tuple[Cell, ...]] = field(repr=False)

    def __eq__(self, other):
        return isinstance(other, CubicalComplex) and self.pixels == other.pixels

    def __hash__(self):
        return hash(self.pixels)

    @cached_property
    def index(self) -> tuple[dict[Cell, int], ...]:
        return tuple({c: i for i, c in enumerate(cells)} for cells in self.cells)

    def count(self, dim: int) -> int:
        return len(self.cells[dim])

    def __contains__(self, cell: Cell) -> bool:
        return cell in self.index[cell.dim]

    def boundary_columns(self, dim: int) -> list[int]:
        """Boundary of each ``dim``-cell as a bitset over ``dim - 1``-cells."""
        if dim == 0:
            return [0] * self.count(0)
        lower = self.index[dim - 1]
        return [sum(1 << lower[f] for f in c.faces()) for c in self.cells[dim]]

    def boundary_matrix(self, dim: int) -> Z2Matrix:
        rows = self.count(dim - 1) if dim > 0 else 0
        return Z2Matrix.from_columns(self.boundary_columns(dim), rows)

    @cached_property
    def boundary_ranks(self) -> tuple[int, int, int]:
        return (0, column_rank(self.boundary_columns(1)), column_rank(self.boundary_columns(2)))

    def euler_characteristic(self) -> int:
        return self.count(0) - self.count(1) + self.count(2)

    def dump(self) -> str:
        """One cell per line: ``dim x y axis``, in index order."""
        return "".join(f"{c.dim} {c.x} {c.y} {c.axis}\n" for cells in self.cells for c in cells)


def complex_of(pixels: Iterable[Pixel]) -> CubicalComplex:
    pixels = frozenset((int(x), int(y)) for x, y in pixels)
    found: tuple[set[Cell], ...] = (set(), set(), set())
    for p in pixels:
        for c in square_closure(p):
            found[c.dim].add(c)
    cells = tuple(tuple(sorted(s, key=Cell.sort_key)) for s in found)
    return CubicalComplex(pixels, cells)


def betti(K: CubicalComplex, q: int) -> int:
    """Rank of the q-th Z2 homology: dim ker of the q-boundary minus rank of the (q+1)-boundary."""
    if q not in (0, 1, 2):
        raise ValueError(f"dimension {q} not supported")
    ranks = (*K.boundary_ranks, 0)
    return K.count(q) - ranks[q] - ranks[q + 1]


@dataclass(frozen=True, eq=False)
class HomologyBasis:
    """Cycle representatives whose classes form a basis of H_q(complex).

    A class is named by its coordinate bitset: bit ``r`` set means
    ``reps[r]`` takes part.
    """

    q: int
    complex: CubicalComplex
    reps: tuple[int, ...]
    _echelon: EchelonBasis = field(repr=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.reps)

    def coordinates(self, cycle: int) -> int:
        """Coordinates of the homology class of ``cycle`` in this basis."""
        tag = self._echelon.solve(cycle)
        if tag is None:
            raise NotInSpan(f"chain is not a {self.q}-cycle of this complex")
        return tag

    def cycle(self, coords: int) -> int:
        """A representative chain of the class with the given coordinates."""
        chain = 0
        for r in bits(coords):
            chain ^= self.reps[r]
        return chain

    def cells_of(self, chain: int) -> list[Cell]:
        cells = self.complex.cells[self.q]
        return [cells[i] for i in bits(chain)]


def homology_basis(K: CubicalComplex, q: int) -> HomologyBasis:
    """Deterministic basis of H_q(K).

    Cycles are offered in index order and kept when independent of the
    boundaries and earlier picks, so for ``q = 0`` each representative is
    the first vertex of its connected component.
    """
    if q not in (0, 1):
        raise ValueError(f"dimension {q} not supported")
    echelon = EchelonBasis()
    for col in K.boundary_columns(q + 1):
        echelon.add(col)
    if q == 0:
        candidates: Sequence[int] = [1 << i for i in range(K.count(0))]
    else:
        candidates = kernel_basis(K.boundary_columns(1))
    reps = []
    for z in candidates:
        if echelon.add(z, 1 << len(reps)):
            reps.append(z)
    return HomologyBasis(q, K, tuple(reps), echelon)


def push_chain(chain: int, q: int, src: CubicalComplex, dst: CubicalComplex) -> int:
    """Re-index a q-chain of ``src`` as a chain of ``dst`` along the inclusion."""
    cells = src.cells[q]
    target = dst.index[q]
    out = 0
    for i in bits(chain):
        j = target.get(cells[i])
        if j is None:
            raise InclusionViolation(cells[i])
        out |= 1 << j
    return out


@dataclass(frozen=True, eq=False)
class InducedMap:
    """Map on homology induced by an inclusion; ``matrix`` is target-dim x source-dim."""

    source: HomologyBasis
    target: HomologyBasis
    matrix: Z2Matrix

    def __call__(self, coords: int) -> int:
        return self.matrix.apply(coords)


def induced_map(src: HomologyBasis, dst: HomologyBasis) -> InducedMap:
    if src.q != dst.q:
        raise ValidationError(f"cannot map H_{src.q} to H_{dst.q}")
    stray = src.complex.pixels - dst.complex.pixels
    if stray:
        raise InclusionViolation(Cell(2, *min(stray)))
    cols = [dst.coordinates(push_chain(rep, src.q, src.complex, dst.complex)) for rep in src.reps]
    return InducedMap(src, dst, Z2Matrix.from_columns(cols, dst.dim))


class PersistentHomology:
    """Homology of every level of a pixel filtration plus the maps between them.

    Level 0 is always the empty space; ``levels`` supplies levels 1..n.
    """

    def __init__(self, levels: Sequence[Iterable[Pixel]], q: int):
        self.q = q
        sets = [frozenset()] + [frozenset(s) for s in levels]
        for i in range(len(sets) - 1):
            if not sets[i] <= sets[i + 1]:
                raise NestednessViolation(i, min(sets[i] - sets[i + 1]))
        self.complexes = [complex_of(s) for s in sets]
        self.bases = [homology_basis(K, q) for K in self.complexes]
        self.steps = [induced_map(a, b) for a, b in zip(self.bases, self.bases[1:])]
        self._rho: dict[tuple[int, int], Z2Matrix] = {}
        self._images: dict[tuple[int, int], EchelonBasis] = {}

    @property
    def n(self) -> int:
        return len(self.bases) - 1

    def dim(self, level: int) -> int:
        return self.bases[level].dim

    def _check(self, *levels: int) -> None:
        for lv in levels:
            if not 0 <= lv <= self.n:
                raise ValidationError(f"level {lv} outside 0..{self.n}")

    def rho(self, i: int, j: int) -> Z2Matrix:
        """Composite map H_q(X_i) -> H_q(X_j) for ``i <= j``."""
        self._check(i, j)
        if i > j:
            raise ValidationError(f"no map from level {i} down to level {j}")
        key = (i, j)
        if key not in self._rho:
            m = Z2Matrix.identity(self.dim(i))
            for step in self.steps[i:j]:
                m = step.matrix @ m
            self._rho[key] = m
        return self._rho[key]

    def push(self, i: int, j: int, cls: int) -> int:
        return self.rho(i, j).apply(cls)

    def image_contains(self, i: int, j: int, cls: int) -> bool:
        """Whether ``cls`` in H_q(X_j) lies in the image of H_q(X_i)."""
        key = (i, j)
        if key not in self._images:
            self._images[key] = EchelonBasis.spanning(self.rho(i, j).columns())
        return self._images[key].contains(cls)


def persistent_homology(levels: Sequence[Iterable[Pixel]], q: int) -> PersistentHomology:
    return PersistentHomology(levels, q)
