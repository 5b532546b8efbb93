"""Persistence diagrams of pixel filtrations in dimensions 0 and 1.

Two routes compute the same multisets:

* ``reduction``: standard Z2 column reduction of the filtered boundary
  matrix (squares first, so their pivot edges can be cleared), both
  dimensions at once.
* ``union-find``: each level is labelled into 8-connected components and
  the components are merged into the classes of the previous level under
  the elder rule. Among equally old classes the one whose first pixel is
  lexicographically smallest survives. Dimension 1 runs the same procedure
  on the 4-connected white complement with the levels reversed.

Levels are numbered from 1; level 0 is the empty space, so every bar is
born at 1 or later. Deaths are ints or ``math.inf``.
"""
from __future__ import annotations

import math
from itertools import chain
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import ndimage

from .cubical import Cell, PersistentHomology, square_closure
from .errors import NestednessViolation, ValidationError

Pixel = tuple[int, int]
INF = math.inf

_EIGHT = np.ones((3, 3), dtype=bool)
_FOUR = ndimage.generate_binary_structure(2, 1)


@dataclass(frozen=True, order=True)
class Bar:
    q: int
    birth: int
    death: float

    def __post_init__(self):
        if self.birth < 1:
            raise ValidationError(f"bar born at {self.birth}; births start at level 1")
        if not self.birth < self.death:
            raise ValidationError(f"bar ({self.birth}, {self.death}) has no positive length")

    def alive_at(self, level: int) -> bool:
        return self.birth <= level < self.death


@dataclass(frozen=True)
class PersistenceDiagram:
    q: int
    bars: tuple[Bar, ...]

    def __post_init__(self):
        object.__setattr__(self, "bars", tuple(sorted(self.bars)))

    @classmethod
    def from_pairs(cls, q: int, pairs: Iterable[tuple[int, float]]) -> PersistenceDiagram:
        return cls(q, tuple(Bar(q, b, d) for b, d in pairs))

    def pairs(self) -> list[tuple[int, float]]:
        return [(b.birth, b.death) for b in self.bars]

    def __len__(self) -> int:
        return len(self.bars)

    def alive_at(self, level: int) -> int:
        return sum(b.alive_at(level) for b in self.bars)

    def to_text(self) -> str:
        return "".join(f"{b.q} {b.birth} {_fmt_death(b.death)}\n" for b in self.bars)


def _fmt_death(d: float) -> str:
    return "inf" if d == INF else str(int(d))


def bars_with(diagram: PersistenceDiagram, birth: int, death: float) -> int:
    """Multiplicity of the bar ``(birth, death)``."""
    return sum(1 for b in diagram.bars if b.birth == birth and b.death == death)


def format_diagrams(diagrams: Sequence[PersistenceDiagram]) -> str:
    bars = sorted(b for d in diagrams for b in d.bars)
    return "".join(f"{b.q} {b.birth} {_fmt_death(b.death)}\n" for b in bars)


def parse_diagrams(text: str) -> dict[int, PersistenceDiagram]:
    found: dict[int, list[tuple[int, float]]] = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        q, b, d = line.split()
        found.setdefault(int(q), []).append((int(b), INF if d == "inf" else int(d)))
    return {q: PersistenceDiagram.from_pairs(q, pairs) for q, pairs in found.items()}


def filtration_levels(filt) -> list[frozenset[Pixel]]:
    """Pixel sets of levels 1..n from a filtration object or a plain sequence of sets."""
    if hasattr(filt, "pixel_sets"):
        sets = filt.pixel_sets()
    else:
        sets = [frozenset(s) for s in filt]
    for i in range(len(sets) - 1):
        missing = sets[i] - sets[i + 1]
        if missing:
            raise NestednessViolation(i + 1, min(missing))
    return sets


def pixel_levels(levels: Sequence[frozenset[Pixel]]) -> dict[Pixel, int]:
    """Level at which each pixel first appears."""
    first: dict[Pixel, int] = {}
    for i, s in enumerate(levels, start=1):
        for p in s:
            first.setdefault(p, i)
    return first


def filtered_cells(levels: Sequence[frozenset[Pixel]]) -> list[tuple[int, Cell]]:
    """Every cell with its entry level, in filtration order (level, dim, position).

    A face enters with the earliest of the squares containing it.
    """
    entry: dict[Cell, int] = {}
    for p, lv in pixel_levels(levels).items():
        for c in square_closure(p):
            if entry.get(c, lv + 1) > lv:
                entry[c] = lv
    return sorted(((lv, c) for c, lv in entry.items()), key=lambda t: (t[0], t[1].dim, t[1].sort_key()))


def reduction_diagrams(filt) -> dict[int, PersistenceDiagram]:
    """Diagrams in dimensions 0 and 1 by boundary-matrix reduction."""
    order = filtered_cells(filtration_levels(filt))
    position = {c: i for i, (_, c) in enumerate(order)}
    level = [lv for lv, _ in order]
    dims = [c.dim for _, c in order]

    pivot_of: dict[int, int] = {}  # lowest row -> reduced column owning it
    reduced: dict[int, int] = {}
    pairs: dict[int, list[tuple[int, float]]] = {0: [], 1: []}
    cleared: set[int] = set()
    for dim in (2, 1):
        for j, (_, c) in enumerate(order):
            if dims[j] != dim or j in cleared:
                continue
            col = 0
            for f in c.faces():
                col ^= 1 << position[f]
            while col:
                low = col.bit_length() - 1
                k = pivot_of.get(low)
                if k is None:
                    break
                col ^= reduced[k]
            if col:
                low = col.bit_length() - 1
                pivot_of[low] = j
                reduced[j] = col
                cleared.add(low)
                if level[low] < level[j]:
                    pairs[dim - 1].append((level[low], level[j]))
    for j, d in enumerate(dims):
        if d < 2 and j not in pivot_of and j not in reduced:
            pairs[d].append((level[j], INF))
    return {q: PersistenceDiagram.from_pairs(q, pairs[q]) for q in (0, 1)}


def _points(pixels: frozenset[Pixel]) -> np.ndarray:
    flat = np.fromiter(chain.from_iterable(pixels), dtype=np.int64, count=2 * len(pixels))
    return flat.reshape(-1, 2)


def _grid(levels: Sequence[frozenset[Pixel]]) -> tuple[np.ndarray, int, int]:
    """Level array over the bounding box (0 = never black), plus the box origin."""
    top = levels[-1] if levels else frozenset()
    if not top:
        return np.zeros((0, 0), dtype=np.int32), 0, 0
    pts = _points(top)
    x0, y0 = pts.min(axis=0)
    x1, y1 = pts.max(axis=0)
    grid = np.zeros((y1 - y0 + 1, x1 - x0 + 1), dtype=np.int32)
    for i in range(len(levels), 0, -1):
        if levels[i - 1]:
            pts = _points(levels[i - 1])
            grid[pts[:, 1] - y0, pts[:, 0] - x0] = i
    return grid, int(x0), int(y0)


class _ElderUnionFind:
    """Union-find over classes where a union keeps the older class as root."""

    def __init__(self):
        self.parent: list[int] = []
        self.key: list[tuple[int, int, int]] = []  # (birth, x, y) of the founding pixel

    def make(self, birth: int, pixel: Pixel) -> int:
        self.parent.append(len(self.parent))
        self.key.append((birth, pixel[0], pixel[1]))
        return len(self.parent) - 1

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> int | None:
        """Merge; return the root of the class that dies, or None if already joined."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return None
        if self.key[rb] < self.key[ra]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return rb


def _elder_pairs(grid: np.ndarray, n: int, structure: np.ndarray) -> list[tuple[int, float]]:
    """Dimension-0 bars of the grid filtration ``{grid in 1..lv}``, lv = 1..n.

    ``grid`` holds the level at which each cell appears (0 = never).
    Ties between equally old classes go to the founding cell with the
    smallest (x, y).
    """
    uf = _ElderUnionFind()
    pairs: list[tuple[int, float]] = []
    prev_labels = np.zeros(grid.shape, dtype=np.int32)
    prev_class: np.ndarray = np.zeros(1, dtype=np.int64)
    for lv in range(1, n + 1):
        mask = (grid > 0) & (grid <= lv)
        labels, count = ndimage.label(mask, structure=structure)
        cls = np.full(count + 1, -1, dtype=np.int64)
        if count:
            ys, xs = np.nonzero(labels)
            lab = labels[ys, xs]
            order = np.lexsort((ys, xs, lab))
            _, first = np.unique(lab[order], return_index=True)
            founders = order[first]
            old = prev_labels > 0
            width = len(uf.parent) + 1
            links = np.unique(labels[old].astype(np.int64) * width + prev_class[prev_labels[old]])
            inherited: dict[int, list[int]] = {}
            for c, k in zip((links // width).tolist(), (links % width).tolist()):
                inherited.setdefault(c, []).append(k)
            for c in range(1, count + 1):
                olds = inherited.get(c)
                if not olds:
                    f = founders[c - 1]
                    cls[c] = uf.make(lv, (int(xs[f]), int(ys[f])))
                    continue
                root = uf.find(olds[0])
                for k in olds[1:]:
                    dead = uf.union(root, k)
                    if dead is not None:
                        pairs.append((uf.key[dead][0], lv))
                        root = uf.find(root)
                cls[c] = root
        prev_labels, prev_class = labels, cls
    survivors = {uf.find(int(k)) for k in prev_class[1:]}
    pairs.extend((uf.key[r][0], INF) for r in survivors)
    return pairs


def union_find_diagram(filt) -> PersistenceDiagram:
    """Dimension-0 diagram by component tracking with the elder rule."""
    levels = filtration_levels(filt)
    grid, _, _ = _grid(levels)
    return PersistenceDiagram.from_pairs(0, _elder_pairs(grid, len(levels), _EIGHT))


def duality_diagram(filt) -> PersistenceDiagram:
    """Dimension-1 diagram from the white complement.

    Holes of closed black squares are the bounded 4-connected white regions.
    Running the white complement (padded by a white frame) backwards through
    the levels, with level 0 = all white appended at the end, a hole born at
    b and filled at d shows up as a white component born at n+2-d that
    merges into an older one at n+2-b. The frame component never dies and
    carries no hole.
    """
    levels = filtration_levels(filt)
    n = len(levels)
    grid, _, _ = _grid(levels)
    padded = np.pad(grid, 1)
    white = np.where(padded == 0, 1, n + 2 - padded)
    pairs = []
    for rb, rd in _elder_pairs(white, n + 1, _FOUR):
        if rd == INF:
            continue
        pairs.append((n + 2 - rd, INF if rb == 1 else n + 2 - rb))
    return PersistenceDiagram.from_pairs(1, pairs)


def persistence_diagram(filt, q: int, method: str = "auto") -> PersistenceDiagram:
    """Diagram of a filtration in dimension ``q``.

    ``filt`` is an ImageFiltration, a ShortFiltration, or a sequence of
    nested pixel sets for levels 1..n. ``method`` is ``auto`` (same as
    ``union-find``), ``union-find`` (black components for q = 0, white
    complement for q = 1) or ``reduction``.
    """
    if q not in (0, 1):
        raise ValueError(f"dimension {q} not supported")
    if method in ("auto", "union-find"):
        return union_find_diagram(filt) if q == 0 else duality_diagram(filt)
    if method == "reduction":
        return reduction_diagrams(filt)[q]
    raise ValueError(f"unknown method {method!r}")


def is_born_at(ph: PersistentHomology, level: int, cls: int) -> bool:
    """Whether class ``cls`` of H_q(X_level) is outside the image of the previous level."""
    return level >= 1 and not ph.image_contains(level - 1, level, cls)


def class_barcode(ph: PersistentHomology, level: int, cls: int) -> tuple[int, float] | None:
    """Birth and death of one homology class, or None if it is not born at ``level``.

    The class dies at the first level ``j`` where its image falls into the
    image of H_q(X_{level-1}), i.e. where it merges with something older.
    """
    if not is_born_at(ph, level, cls):
        return None
    for j in range(level + 1, ph.n + 1):
        if ph.image_contains(level - 1, j, ph.push(level, j, cls)):
            return level, j
    return level, INF
