"""Local branch numbers of window patches and the heat maps built from them.

For a patch ``(X1, X2)`` of a binary image with black set ``X`` the two
short filtrations are::

    G1: {} ⊆ X1 ⊆ X1 ∪ X2 ⊆ X
    G2: {} ⊆ X2 ⊆ X1 ∪ X2 ⊆ X

The local branch number ``b0(X1; X2)`` is the number of bars ``(2, 3)`` in
the dimension-0 diagram of G1: components of X2 that are joined to
something in X by the time the whole image is present. It counts every
such bar, including a component of X2 that merges with another component
of X2 through pixels outside ``X1 ∪ X2``.
"""
from __future__ import annotations

import io
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .cubical import complex_of, homology_basis, induced_map, persistent_homology
from .errors import HypothesisViolation, PatchMismatch, ValidationError
from .imageio import BinaryImage, Patch, Window, closure_disjoint, extract_patch, format_pgm, windows
from .persistence import PersistenceDiagram, bars_with, class_barcode, is_born_at, persistence_diagram
from .sheaf import RIGHT, cospan_sections
from .z2 import EchelonBasis, all_vectors

Pixel = tuple[int, int]


@dataclass(frozen=True)
class ShortFiltration:
    """Exactly four nested levels, the first one empty."""

    levels: tuple[frozenset[Pixel], frozenset[Pixel], frozenset[Pixel], frozenset[Pixel]]

    def __post_init__(self):
        levels = tuple(frozenset(s) for s in self.levels)
        if len(levels) != 4:
            raise ValidationError(f"a short filtration has 4 levels, got {len(levels)}")
        if levels[0]:
            raise ValidationError("level 0 of a short filtration must be empty")
        for i in range(3):
            if not levels[i] <= levels[i + 1]:
                raise ValidationError(f"level {i} is not contained in level {i + 1}")
        object.__setattr__(self, "levels", levels)

    @classmethod
    def of(cls, y1: Iterable[Pixel], y2: Iterable[Pixel], y3: Iterable[Pixel]) -> ShortFiltration:
        return cls((frozenset(), frozenset(y1), frozenset(y2), frozenset(y3)))

    def pixel_sets(self) -> list[frozenset[Pixel]]:
        return list(self.levels[1:])


def short_filtrations(patch: Patch, full: BinaryImage | Iterable[Pixel]) -> tuple[ShortFiltration, ShortFiltration]:
    black = _black(full)
    union = patch.x1set | patch.x2set
    if not union <= black:
        raise PatchMismatch(f"patch pixel {min(union - black)} is not black in the image")
    return ShortFiltration.of(patch.x1set, union, black), ShortFiltration.of(patch.x2set, union, black)


def _black(full) -> frozenset[Pixel]:
    return full.black if isinstance(full, BinaryImage) else frozenset(full)


def local_branch_number(patch: Patch, full: BinaryImage | Iterable[Pixel]) -> int:
    g1, _ = short_filtrations(patch, full)
    return bars_with(persistence_diagram(g1, 0), 2, 3)


@dataclass(frozen=True)
class Clause:
    name: str
    holds: bool
    detail: str = ""


@dataclass(frozen=True)
class PatchReport:
    """Outcome of ``verify_patch`` for one patch and one dimension."""

    q: int
    clauses: tuple[Clause, ...]
    exhaustive: bool
    diagram: PersistenceDiagram = field(repr=False)

    @property
    def passed(self) -> bool:
        return all(c.holds for c in self.clauses)

    def __getitem__(self, name: str) -> Clause:
        for c in self.clauses:
            if c.name == name:
                return c
        raise KeyError(name)


def _sample_classes(dim: int, limit: int, seed: int) -> tuple[Iterable[int], bool]:
    if dim <= limit:
        return all_vectors(dim), True
    rng = random.Random(seed)
    picks = {1 << r for r in range(dim)} | {rng.getrandbits(dim) for _ in range(1 << limit)}
    return sorted(picks), False


def verify_patch(patch: Patch, full: BinaryImage | Iterable[Pixel], q: int, max_enumeration: int = 12) -> PatchReport:
    """Check how the homology of ``X2`` shows up in the diagram of G1.

    For closure-disjoint pieces the following must hold, and each is
    checked against independently computed homology:

    ``sum_isomorphism``
        ``H_q(X1) ⊕ H_q(X2) -> H_q(X1 ∪ X2)``, ``(a, b) -> a + b`` is bijective.
    ``no_birth2_iff_trivial``
        G1 has no bar born at 2 exactly when ``H_q(X2) = 0``.
    ``nonzero_iff_born``
        the image of a class of ``X2`` in ``X1 ∪ X2`` is non-zero exactly
        when it is born at 2 in G1.
    ``section_iff_bar23``
        a non-zero class of ``X2`` pairs with some class of ``X1`` to a
        section of ``H_q(X1) -> H_q(X) <- H_q(X2)`` exactly when its image
        has bar ``(2, 3)`` in G1; the dimension of such classes equals the
        number of ``(2, 3)`` bars.

    Classes of ``X2`` are enumerated exhaustively up to ``max_enumeration``
    basis vectors and sampled beyond that.
    """
    if not closure_disjoint(patch.x1set, patch.x2set):
        raise HypothesisViolation("patch pieces touch: their closures intersect")
    g1, _ = short_filtrations(patch, full)
    ph = persistent_homology(g1.pixel_sets(), q)
    h2 = homology_basis(complex_of(patch.x2set), q)
    omega2 = induced_map(h2, ph.bases[2])
    rho2 = induced_map(h2, ph.bases[3])
    omega1 = ph.rho(1, 2)
    diagram = persistence_diagram(g1, q)
    clauses = []

    span = EchelonBasis.spanning(omega1.columns() + omega2.matrix.columns())
    iso = span.rank == ph.dim(2) == ph.dim(1) + h2.dim
    clauses.append(Clause("sum_isomorphism", iso, f"rank {span.rank}, dims {ph.dim(1)} + {h2.dim} -> {ph.dim(2)}"))

    births2 = sum(1 for b in diagram.bars if b.birth == 2)
    clauses.append(
        Clause("no_birth2_iff_trivial", (births2 == 0) == (h2.dim == 0), f"{births2} bars born at 2, dim H_q(X2) = {h2.dim}")
    )

    classes, exhaustive = _sample_classes(h2.dim, max_enumeration, seed=len(patch.x2set))
    classes = list(classes)
    bad_b = [s for s in classes if (omega2(s) != 0) != is_born_at(ph, 2, omega2(s))]
    clauses.append(
        Clause("nonzero_iff_born", not bad_b, f"counterexample {bad_b[0]:b}" if bad_b else f"{len(classes)} classes")
    )

    space = cospan_sections(ph.rho(1, 3), rho2.matrix)
    bad_c = [
        s
        for s in classes
        if s and space.admits({RIGHT: s}) != (class_barcode(ph, 2, omega2(s)) == (2, 3))
    ]
    attached = EchelonBasis.spanning(sec[space.open.index(RIGHT)] for sec in space.basis).rank
    bar23 = bars_with(diagram, 2, 3)
    holds = not bad_c and attached == bar23
    detail = f"counterexample {bad_c[0]:b}" if bad_c else f"{attached} attached classes, {bar23} bars (2,3)"
    clauses.append(Clause("section_iff_bar23", holds, detail))
    return PatchReport(q, tuple(clauses), exhaustive, diagram)


@dataclass(frozen=True)
class WindowResult:
    size: int
    window: Window
    branch_number: int
    has_content: bool


@dataclass(frozen=True, eq=False)
class HeatMap:
    """Summed branch numbers per pixel; ``mask`` marks the black pixels."""

    width: int
    height: int
    values: np.ndarray
    mask: np.ndarray
    windows: tuple[WindowResult, ...] = ()

    def __post_init__(self):
        if self.values.shape != (self.height, self.width) or self.mask.shape != (self.height, self.width):
            raise ValidationError("heat map arrays must match the image size")

    def __add__(self, other: HeatMap) -> HeatMap:
        if (self.width, self.height) != (other.width, other.height):
            raise ValidationError("cannot add heat maps of different sizes")
        return HeatMap(self.width, self.height, self.values + other.values, self.mask, self.windows + other.windows)

    def to_csv(self) -> str:
        return _int_csv(self.values)

    def mask_csv(self) -> str:
        return _int_csv(self.mask.astype(np.int64))

    def to_pgm(self) -> str:
        """Values scaled to 0..255 (largest value maps to 255); black pixels drawn as 0."""
        top = int(self.values.max()) if self.values.size else 0
        scaled = self.values * 255 // top if top else np.zeros_like(self.values)
        scaled = np.where(self.mask, 0, scaled)
        return format_pgm(scaled)


def _int_csv(values: np.ndarray) -> str:
    buf = io.StringIO()
    for row in values.tolist():
        buf.write(",".join(str(int(v)) for v in row) + "\n")
    return buf.getvalue()


def branch_windows(image: BinaryImage, size: int, stride: int | None = None) -> list[WindowResult]:
    """Branch number of every window of one size, row-major."""
    if size < 1:
        raise ValidationError(f"window size must be positive, got {size}")
    out = []
    for w in windows(image.width, image.height, size, stride):
        patch = extract_patch(image, w)
        content = len(patch.x2set) < len(image.black)
        # an empty window leaves X1 ∪ X2 = X, so nothing can die at level 3
        b0 = local_branch_number(patch, image) if content else 0
        out.append(WindowResult(size, w, b0, content))
    return out


def heat_map(image: BinaryImage, window_sizes: Sequence[int], stride: int | None = None) -> HeatMap:
    """Multi-scale heat map: per size, every window adds its branch number to all its pixels.

    ``stride=None`` tiles each scale with its own window size.
    """
    values = np.zeros((image.height, image.width), dtype=np.int64)
    results: list[WindowResult] = []
    for size in window_sizes:
        for r in branch_windows(image, size, stride):
            w = r.window
            values[w.y0 : w.y1 + 1, w.x0 : w.x1 + 1] += r.branch_number
            results.append(r)
    return HeatMap(image.width, image.height, values, image.to_array(), tuple(results))
