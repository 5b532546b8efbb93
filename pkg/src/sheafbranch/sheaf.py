"""Cellular sheaves of Z2 vector spaces on finite posets.

A sheaf assigns a stalk dimension to every poset element and a
restriction matrix to every relation ``p <= q``. Sections over an up-closed
set are the families that agree under every restriction. That is enough
to express when two homology classes of a filtration end up equal:
build the three-element cospan ``left -> apex <- right`` and ask whether
the pair extends to a section.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Hashable, Iterable, Mapping, Sequence

from .cubical import PersistentHomology
from .errors import FunctorialityViolation, NotUpClosed, ValidationError
from .z2 import EchelonBasis, Z2Matrix, bits, kernel_basis

Element = Hashable

LEFT, RIGHT, APEX = "left", "right", "apex"


class FinitePoset:
    """Finite partial order; ``relation`` must contain every pair ``(p, q)`` with ``p <= q``."""

    def __init__(self, elements: Sequence[Element], relation: Iterable[tuple[Element, Element]]):
        self.elements = tuple(dict.fromkeys(elements))
        if not self.elements:
            raise ValidationError("a poset needs at least one element")
        self.relation = frozenset(relation)
        members = set(self.elements)
        for p, q in self.relation:
            if p not in members or q not in members:
                raise ValidationError(f"relation ({p!r}, {q!r}) mentions an unknown element")
        for p in self.elements:
            if (p, p) not in self.relation:
                raise ValidationError(f"not reflexive at {p!r}")
        above = {p: {q for a, q in self.relation if a == p} for p in self.elements}
        for p, q in self.relation:
            if p != q and (q, p) in self.relation:
                raise ValidationError(f"not antisymmetric: {p!r} and {q!r}")
            for r in above[q]:
                if (p, r) not in self.relation:
                    raise ValidationError(f"not transitive: {p!r} <= {q!r} <= {r!r}")
        self._above = above
        self._rank = {p: i for i, p in enumerate(self.elements)}

    @classmethod
    def from_covers(cls, elements: Sequence[Element], covers: Iterable[tuple[Element, Element]]) -> FinitePoset:
        """Reflexive-transitive closure of the given generating pairs."""
        elements = tuple(dict.fromkeys(elements))
        up = {p: {p} for p in elements}
        for p, q in covers:
            up[p].add(q)
        changed = True
        while changed:
            changed = False
            for p in elements:
                reach = set().union(*(up[q] for q in up[p]))
                if reach != up[p]:
                    up[p] = reach
                    changed = True
        return cls(elements, {(p, q) for p in elements for q in up[p]})

    def leq(self, p: Element, q: Element) -> bool:
        return (p, q) in self.relation

    def upset(self, p: Element) -> frozenset:
        return frozenset(self._above[p])

    def basic_open(self, p: Element) -> BasicOpen:
        return BasicOpen(p, self.upset(p))

    def covers(self) -> list[tuple[Element, Element]]:
        """Pairs ``p < q`` with nothing strictly between them."""
        out = []
        for p, q in self.relation:
            if p == q:
                continue
            if not any(r not in (p, q) and (p, r) in self.relation and (r, q) in self.relation for r in self.elements):
                out.append((p, q))
        return sorted(out, key=lambda pq: (self._rank[pq[0]], self._rank[pq[1]]))

    def sorted(self, items: Iterable[Element]) -> list[Element]:
        return sorted(items, key=self._rank.__getitem__)

    def check_up_closed(self, subset: Iterable[Element]) -> frozenset:
        subset = frozenset(subset)
        for p in self.sorted(subset):
            for q in self.sorted(self._above[p]):
                if q not in subset:
                    raise NotUpClosed(p, q)
        return subset

    def union_of_basic_opens(self, points: Iterable[Element]) -> frozenset:
        return frozenset().union(*(self.upset(p) for p in points))


@dataclass(frozen=True)
class BasicOpen:
    """The up-set of ``p``."""

    p: Element
    upset: frozenset


@dataclass(frozen=True, eq=False)
class CellularSheaf:
    poset: FinitePoset
    stalkdim: Mapping[Element, int]
    maps: Mapping[tuple[Element, Element], Z2Matrix] = field(repr=False)

    def restriction(self, p: Element, q: Element) -> Z2Matrix:
        if not self.poset.leq(p, q):
            raise ValidationError(f"{p!r} is not below {q!r}")
        return self.maps[(p, q)]

    def dump(self) -> str:
        lines = [f"{p!r}: dim {self.stalkdim[p]}" for p in self.poset.elements]
        for p, q in self.poset.covers():
            m = self.maps[(p, q)]
            rows = " ".join("".join(map(str, r)) for r in m.to_lists()) or "-"
            lines.append(f"{p!r} -> {q!r}: {rows}")
        return "\n".join(lines) + "\n"


def make_sheaf(
    poset: FinitePoset,
    stalkdim: Mapping[Element, int],
    restrictions: Mapping[tuple[Element, Element], Z2Matrix],
) -> CellularSheaf:
    """Assemble a sheaf from restriction maps on (at least) the covering relations.

    Maps for longer relations are composed along covers. Any map supplied
    for a non-cover relation must agree with that composite, and every
    triple ``p <= q <= r`` must satisfy the composition law; otherwise a
    FunctorialityViolation names a witnessing triple.
    """
    dims = {p: int(stalkdim[p]) for p in poset.elements}
    for (p, q), m in restrictions.items():
        if not poset.leq(p, q):
            raise ValidationError(f"restriction given for {p!r}, {q!r} which are not related")
        if m.shape != (dims[q], dims[p]):
            raise ValidationError(f"restriction {p!r} -> {q!r} has shape {m.shape}, expected {(dims[q], dims[p])}")
    maps: dict[tuple[Element, Element], Z2Matrix] = {(p, p): Z2Matrix.identity(dims[p]) for p in poset.elements}
    covers = poset.covers()
    for p, q in covers:
        if (p, q) not in restrictions:
            raise ValidationError(f"missing restriction for cover {p!r} <= {q!r}")
        maps[(p, q)] = restrictions[(p, q)]
    for p, q in restrictions:
        if p == q and restrictions[(p, q)] != maps[(p, q)]:
            raise FunctorialityViolation(p, p, p)
    # compose along covers, walking up from each element in order
    for p in poset.elements:
        frontier, seen = [p], {p}
        while frontier:
            q = frontier.pop(0)
            for a, r in covers:
                if a != q or r in seen:
                    continue
                seen.add(r)
                frontier.append(r)
                if (p, r) not in maps:
                    maps[(p, r)] = maps[(q, r)] @ maps[(p, q)]
    for (p, r), m in restrictions.items():
        if maps[(p, r)] != m:
            mid = next(q for q in poset.elements if (p, q) in maps and poset.leq(q, r) and q not in (p, r))
            raise FunctorialityViolation(p, mid, r)
    for p, q in poset.relation:
        for r in poset.sorted(poset.upset(q)):
            if maps[(q, r)] @ maps[(p, q)] != maps[(p, r)]:
                raise FunctorialityViolation(p, q, r)
    return CellularSheaf(poset, dims, maps)


@dataclass(frozen=True)
class SectionSpace:
    """All compatible families over an open set, given by a basis.

    ``basis[t][e]`` is the stalk vector (bitset) of the t-th basis section at
    ``open[e]``.
    """

    open: tuple[Element, ...]
    stalkdim: tuple[int, ...]
    basis: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def _pack(self, family: Sequence[int], positions: Sequence[int]) -> int:
        v, shift = 0, 0
        for e, s in zip(positions, family):
            v |= s << shift
            shift += self.stalkdim[e]
        return v

    def _projection(self, elements: Sequence[Element]) -> tuple[list[int], EchelonBasis]:
        positions = [self.open.index(e) for e in elements]
        return positions, EchelonBasis.spanning(self._pack([s[e] for e in positions], positions) for s in self.basis)

    def contains(self, family: Mapping[Element, int]) -> bool:
        """Whether ``family`` (one vector per element of the open set) is a section."""
        if set(family) != set(self.open):
            raise ValidationError("a full family assigns a vector to every element of the open set")
        return self.admits(family)

    def admits(self, partial: Mapping[Element, int]) -> bool:
        """Whether some section restricts to the given vectors on the named elements."""
        elements = list(partial)
        positions, span = self._projection(elements)
        return span.contains(self._pack([partial[e] for e in elements], positions))

    def sections(self):
        """Every section, as dicts; there are ``2 ** dim`` of them."""
        for coeffs in range(1 << self.dim):
            fam = [0] * len(self.open)
            for t in bits(coeffs):
                fam = [a ^ b for a, b in zip(fam, self.basis[t])]
            yield dict(zip(self.open, fam))


def sections(sheaf: CellularSheaf, open: Iterable[Element]) -> SectionSpace:
    """Basis of the space of families ``(s_p)`` over ``open`` with ``s_q = rho_pq(s_p)`` for ``p <= q``."""
    poset = sheaf.poset
    members = poset.sorted(poset.check_up_closed(open))
    dims = [sheaf.stalkdim[p] for p in members]
    offset = [sum(dims[:i]) for i in range(len(members))]
    at = {p: i for i, p in enumerate(members)}
    relations = [(p, q) for p in members for q in poset.sorted(poset.upset(p)) if q != p]
    # one constraint row per coordinate of every target stalk, per relation
    row_offset, rows = [], 0
    for p, q in relations:
        row_offset.append(rows)
        rows += sheaf.stalkdim[q]
    columns = [0] * sum(dims)
    for (p, q), base in zip(relations, row_offset):
        m = sheaf.restriction(p, q)
        for t, col in enumerate(m.columns()):
            columns[offset[at[p]] + t] ^= col << base
        for t in range(sheaf.stalkdim[q]):
            columns[offset[at[q]] + t] ^= 1 << (base + t)
    basis = []
    for v in kernel_basis(columns):
        basis.append(tuple((v >> offset[i]) & ((1 << dims[i]) - 1) for i in range(len(members))))
    return SectionSpace(tuple(members), tuple(dims), tuple(basis))


def cospan_sheaf(left: Z2Matrix, right: Z2Matrix) -> CellularSheaf:
    """Sheaf on ``left <= apex >= right`` with the two given maps into the apex stalk."""
    if left.rows != right.rows:
        raise ValidationError(f"maps land in spaces of dimension {left.rows} and {right.rows}")
    poset = FinitePoset.from_covers((LEFT, RIGHT, APEX), [(LEFT, APEX), (RIGHT, APEX)])
    dims = {LEFT: left.cols, RIGHT: right.cols, APEX: left.rows}
    return make_sheaf(poset, dims, {(LEFT, APEX): left, (RIGHT, APEX): right})


def cospan_sections(left: Z2Matrix, right: Z2Matrix) -> SectionSpace:
    sheaf = cospan_sheaf(left, right)
    return sections(sheaf, sheaf.poset.union_of_basic_opens([LEFT, RIGHT]))


def _check_levels(ph: PersistentHomology, i: int, j: int, k: int) -> None:
    # level 0 is the empty space; allowed so that comparisons against nothing work
    if not (0 <= i <= ph.n and 0 <= j <= ph.n):
        raise ValidationError(f"levels {i}, {j} must lie in 0..{ph.n}")
    if not max(i, j) <= k <= ph.n:
        raise ValidationError(f"level {k} must lie in {max(i, j)}..{ph.n}")


def coincide(ph: PersistentHomology, i: int, s_i: int, j: int, s_j: int, k: int) -> bool:
    """Whether classes ``s_i`` of level i and ``s_j`` of level j have the same image at level k."""
    _check_levels(ph, i, j, k)
    return ph.push(i, k, s_i) == ph.push(j, k, s_j)


def coincidence_as_section(ph: PersistentHomology, i: int, j: int, k: int) -> SectionSpace:
    """Sections of ``H_q(X_i) -> H_q(X_k) <- H_q(X_j)`` over all three nodes.

    A pair ``(s_i, s_j)`` coincides at k exactly when
    ``space.admits({LEFT: s_i, RIGHT: s_j})``.
    """
    _check_levels(ph, i, j, k)
    return cospan_sections(ph.rho(i, k), ph.rho(j, k))


def brute_force_sections(sheaf: CellularSheaf, open: Iterable[Element]) -> list[dict]:
    """Every compatible family over ``open``, by enumerating the whole product of stalks."""
    members = sheaf.poset.sorted(sheaf.poset.check_up_closed(open))
    dims = [sheaf.stalkdim[p] for p in members]
    found = []
    for family in product(*(range(1 << d) for d in dims)):
        fam = dict(zip(members, family))
        if all(
            sheaf.restriction(p, q).apply(fam[p]) == fam[q]
            for p in members
            for q in sheaf.poset.upset(p)
        ):
            found.append(fam)
    return found
