"""Randomized property suites over small filtrations and patches.

Every property here holds mathematically, not just statistically, so a suite
must pass for any seed. The suites compare independently computed
quantities: Betti numbers from boundary ranks, diagrams from reduction and
from union-find, coincidence by pushing classes forward, and sections by
solving the compatibility system of a sheaf.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .branch import ShortFiltration, verify_patch
from .cubical import betti, complex_of, persistent_homology
from .errors import FunctorialityViolation
from .imageio import BinaryImage, Patch, closure_disjoint, extract_patch, windows
from .persistence import bars_with, class_barcode, is_born_at, persistence_diagram, reduction_diagrams
from .sheaf import LEFT, RIGHT, FinitePoset, coincide, coincidence_as_section, make_sheaf
from .z2 import EchelonBasis, Z2Matrix, all_vectors

Pixel = tuple[int, int]


@dataclass
class SuiteResult:
    name: str
    trials: int = 0
    checked: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, msg: str) -> None:
        if len(self.failures) < 20:
            self.failures.append(msg)
        else:
            self.failures[-1] = f"... and more (last: {msg})"

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.trials} trials, {self.checked} checks, {len(self.failures)} failures"


def random_levels(
    rng: np.random.Generator, max_side: int = 8, max_levels: int = 5, density: float = 0.45, min_levels: int = 1
) -> list[frozenset[Pixel]]:
    """Nested pixel sets: each pixel gets a random entry level or stays white."""
    w, h = (int(v) for v in rng.integers(1, max_side + 1, size=2))
    n = int(rng.integers(min_levels, max_levels + 1))
    black = rng.random((h, w)) < density * rng.uniform(0.5, 1.0)
    entry = rng.integers(1, n + 1, size=(h, w))
    return [
        frozenset((x, y) for y in range(h) for x in range(w) if black[y, x] and entry[y, x] <= lv)
        for lv in range(1, n + 1)
    ]


def small_levels(rng: np.random.Generator, max_dim: int = 3, max_side: int = 6, max_levels: int = 4) -> list[frozenset[Pixel]]:
    """Random filtration whose homology has at most ``max_dim`` generators per level and dimension."""
    while True:
        levels = random_levels(rng, max_side, max_levels, density=0.5, min_levels=2)
        if all(betti(complex_of(s), q) <= max_dim for s in levels for q in (0, 1)):
            return levels


def random_patch(rng: np.random.Generator, max_side: int = 12) -> tuple[Patch, frozenset[Pixel]]:
    """A closure-disjoint patch and the black set containing it.

    Half the time a window patch of a random image, otherwise two random
    pieces kept apart plus random extra pixels.
    """
    w, h = (int(v) for v in rng.integers(3, max_side + 1, size=2))
    if rng.random() < 0.5:
        image = BinaryImage.from_array(rng.random((h, w)) < rng.uniform(0.2, 0.6))
        size = int(rng.integers(3, max(w, h) + 1))
        choices = windows(w, h, size, int(rng.integers(1, size + 1)))
        win = choices[int(rng.integers(len(choices)))]
        return extract_patch(image, win), image.black
    cells = [(x, y) for y in range(h) for x in range(w)]
    d1, d2, d3 = rng.uniform(0.1, 0.5, size=3)
    x1 = {p for p in cells if rng.random() < d1}
    x2 = {p for p in cells if rng.random() < d2 and closure_disjoint([p], x1)}
    extra = {p for p in cells if rng.random() < d3 * 0.5}
    return Patch(x1, x2), frozenset(x1 | x2 | extra)


def check_fundamental_consistency(rng, trials: int = 200) -> SuiteResult:
    """Bars alive at each level equal the Betti numbers of that level."""
    res = SuiteResult("fundamental-consistency")
    for t in range(trials):
        levels = random_levels(rng)
        res.trials += 1
        for q in (0, 1):
            pd = persistence_diagram(levels, q)
            for lv, s in enumerate(levels, start=1):
                res.checked += 1
                want = betti(complex_of(s), q)
                if pd.alive_at(lv) != want:
                    res.fail(f"trial {t} q={q} level {lv}: {pd.alive_at(lv)} bars alive, betti {want}")
    return res


def check_union_find_matches_reduction(rng, trials: int = 200) -> SuiteResult:
    res = SuiteResult("union-find-vs-reduction")
    for t in range(trials):
        levels = random_levels(rng)
        res.trials += 1
        reduced = reduction_diagrams(levels)
        for q in (0, 1):
            res.checked += 1
            a = persistence_diagram(levels, q, method="union-find")
            if a.pairs() != reduced[q].pairs():
                res.fail(f"trial {t} q={q}: union-find {a.pairs()} vs reduction {reduced[q].pairs()}")
    return res


def check_coincidence_is_section(rng, trials: int = 100) -> SuiteResult:
    """Coinciding pairs are exactly the projections of sections of the cospan sheaf."""
    res = SuiteResult("coincidence-iff-section")
    for t in range(trials):
        levels = small_levels(rng)
        res.trials += 1
        for q in (0, 1):
            ph = persistent_homology(levels, q)
            for k in range(1, ph.n + 1):
                for i in range(1, k + 1):
                    for j in range(1, k + 1):
                        space = coincidence_as_section(ph, i, j, k)
                        projected = {(s[LEFT], s[RIGHT]) for s in space.sections()}
                        for si in all_vectors(ph.dim(i)):
                            for sj in all_vectors(ph.dim(j)):
                                res.checked += 1
                                if coincide(ph, i, si, j, sj, k) != ((si, sj) in projected):
                                    res.fail(f"trial {t} q={q} (i,j,k)=({i},{j},{k}) pair ({si:b}, {sj:b})")
    return res


def check_death_bound(rng, trials: int = 100) -> SuiteResult:
    """A class coinciding at k with a class from an earlier level dies no later than k."""
    res = SuiteResult("coincidence-bounds-death")
    for t in range(trials):
        levels = small_levels(rng)
        res.trials += 1
        for q in (0, 1):
            ph = persistent_homology(levels, q)
            for j in range(1, ph.n + 1):
                for sj in all_vectors(ph.dim(j)):
                    bar = class_barcode(ph, j, sj)
                    if bar is None:
                        continue
                    death = bar[1]
                    for i in range(0, j):
                        for k in range(j, ph.n + 1):
                            for si in all_vectors(ph.dim(i)):
                                if coincide(ph, i, si, j, sj, k):
                                    res.checked += 1
                                    if not death <= k:
                                        res.fail(f"trial {t} q={q}: class {sj:b}@{j} dies {death} > {k}")
    return res


def check_bar23_iff_coincidence(rng, trials: int = 100) -> SuiteResult:
    """A class born at j meets some level-i class at k iff it has bar (2, 3) in (X_i, X_j, X_k)."""
    res = SuiteResult("bar23-iff-coincidence")
    for t in range(trials):
        levels = small_levels(rng)
        res.trials += 1
        for q in (0, 1):
            ph = persistent_homology(levels, q)
            sets = [frozenset()] + levels
            for k in range(1, ph.n + 1):
                for j in range(1, k):
                    for i in range(0, j):
                        short = ShortFiltration.of(sets[i], sets[j], sets[k])
                        g = persistent_homology(short.pixel_sets(), q)
                        if g.bases[2].reps != ph.bases[j].reps:
                            res.fail(f"trial {t}: level {j} basis differs between the filtrations")
                            continue
                        for sj in all_vectors(ph.dim(j)):
                            if not is_born_at(ph, j, sj):
                                continue
                            res.checked += 1
                            meets = any(coincide(ph, i, si, j, sj, k) for si in all_vectors(ph.dim(i)))
                            bar23 = class_barcode(g, 2, sj) == (2, 3)
                            if meets != bar23:
                                res.fail(f"trial {t} q={q} (i,j,k)=({i},{j},{k}) class {sj:b}: meets={meets} bar23={bar23}")
                        # the diagram counts the same subspace, modulo what already came from level i
                        attached = [s for s in all_vectors(ph.dim(j)) if g.image_contains(1, 3, g.push(2, 3, s))]
                        dim_attached = EchelonBasis.spanning(attached).rank
                        expected = dim_attached - g.rho(1, 2).rank()
                        found = bars_with(persistence_diagram(short, q, method="reduction"), 2, 3)
                        res.checked += 1
                        if found != expected:
                            res.fail(f"trial {t} q={q} (i,j,k)=({i},{j},{k}): {found} bars (2,3), expected {expected}")
    return res


def check_patches(rng, trials: int = 200) -> SuiteResult:
    res = SuiteResult("patch-clauses")
    for t in range(trials):
        patch, black = random_patch(rng)
        res.trials += 1
        for q in (0, 1):
            report = verify_patch(patch, black, q)
            res.checked += len(report.clauses)
            for c in report.clauses:
                if not c.holds:
                    res.fail(f"trial {t} q={q} {c.name}: {c.detail}")
    return res


def _square_sheaf_maps(rng, q: int):
    """Homology of a commuting square of pixel-set inclusions, as restriction maps."""
    from .cubical import homology_basis, induced_map

    base = random_levels(rng, max_side=6, max_levels=1)[0]
    w = 1 + max((x for x, _ in base), default=0)
    h = 1 + max((y for _, y in base), default=0)
    extra = lambda: {(x, y) for x in range(w) for y in range(h) if rng.random() < 0.3}
    a = base
    b = a | extra()
    c = a | extra()
    d = b | c | extra()
    nodes = {(0, 0): a, (0, 1): b, (1, 0): c, (1, 1): d}
    bases = {p: homology_basis(complex_of(s), q) for p, s in nodes.items()}
    maps = {
        (p, r): induced_map(bases[p], bases[r]).matrix
        for p in nodes
        for r in nodes
        if p != r and p[0] <= r[0] and p[1] <= r[1]
    }
    poset = FinitePoset.from_covers(list(nodes), [((0, 0), (0, 1)), ((0, 0), (1, 0)), ((0, 1), (1, 1)), ((1, 0), (1, 1))])
    return poset, {p: bases[p].dim for p in nodes}, maps


def check_functoriality(rng, trials: int = 50, corrupt: bool = False) -> SuiteResult:
    """Sheaves built from homology of a commuting square of inclusions compose.

    ``corrupt`` is a test hook: one bit of a supplied restriction is flipped
    first, and every resulting FunctorialityViolation is reported as a
    failure.
    """
    res = SuiteResult("functoriality" + ("-corrupted" if corrupt else ""))
    key = ((0, 0), (0, 1))
    for t in range(trials):
        poset, dims, maps = _square_sheaf_maps(rng, t % 2)
        res.trials += 1
        if corrupt:
            m = maps[key]
            if m.rows == 0 or m.cols == 0:
                continue
            maps[key] = Z2Matrix(m.rows, m.cols, (m.data[0] ^ 1,) + m.data[1:])
        res.checked += 1
        try:
            sheaf = make_sheaf(poset, dims, maps)
        except FunctorialityViolation as exc:
            res.fail(f"trial {t}: FunctorialityViolation: {exc}")
            continue
        for p, r in poset.relation:
            for mid in poset.elements:
                if poset.leq(p, mid) and poset.leq(mid, r):
                    if sheaf.restriction(mid, r) @ sheaf.restriction(p, mid) != sheaf.restriction(p, r):
                        res.fail(f"trial {t}: composition fails at {p} <= {mid} <= {r}")
    return res


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "fundamental-consistency": check_fundamental_consistency,
    "union-find-vs-reduction": check_union_find_matches_reduction,
    "coincidence-iff-section": check_coincidence_is_section,
    "coincidence-bounds-death": check_death_bound,
    "bar23-iff-coincidence": check_bar23_iff_coincidence,
    "patch-clauses": check_patches,
    "functoriality": check_functoriality,
}


def run_suites(seed: int = 0, scale: float = 1.0, corrupt: bool = False, names=None) -> list[SuiteResult]:
    """Run suites with trial counts multiplied by ``scale``; each suite gets its own seeded stream."""
    out = []
    for offset, (name, fn) in enumerate(SUITES.items()):
        if names and name not in names:
            continue
        rng = np.random.default_rng([seed, offset])
        default = fn.__defaults__[0]
        trials = max(1, int(round(default * scale)))
        if name == "functoriality":
            out.append(fn(rng, trials, corrupt=corrupt))
        else:
            out.append(fn(rng, trials))
    return out
