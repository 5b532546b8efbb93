"""Independent reference computations used only by the tests."""
import math
from itertools import product

import numpy as np
from scipy import ndimage


def to_grid(pixels, pad=1):
    if not pixels:
        return np.zeros((2 * pad, 2 * pad), dtype=bool), 0, 0
    xs = [p[0] for p in pixels]
    ys = [p[1] for p in pixels]
    x0, y0 = min(xs) - pad, min(ys) - pad
    g = np.zeros((max(ys) - y0 + 1 + pad, max(xs) - x0 + 1 + pad), dtype=bool)
    for x, y in pixels:
        g[y - y0, x - x0] = True
    return g, x0, y0


def components8(pixels):
    """Number of 8-connected components of a pixel set."""
    g, _, _ = to_grid(pixels)
    return ndimage.label(g, structure=np.ones((3, 3)))[1]


def holes(pixels):
    """Bounded 4-connected white regions: the 1-cycles of closed black squares."""
    g, _, _ = to_grid(pixels)
    return ndimage.label(~g)[1] - 1


def betti_oracle(pixels, q):
    return components8(pixels) if q == 0 else holes(pixels)


def rank_gf2(rows):
    """Rank over Z2 of a list of 0/1 lists, by plain row reduction."""
    m = [list(r) for r in rows]
    rank = 0
    cols = len(m[0]) if m else 0
    for c in range(cols):
        piv = next((r for r in range(rank, len(m)) if m[r][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][c]:
                m[r] = [a ^ b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def diagram_by_ranks(ph):
    """Bar multiset from ranks of the composite maps alone.

    The number of bars (b, d) is r(b, d-1) - r(b, d) - r(b-1, d-1) + r(b-1, d)
    where r(i, j) is the rank of H(X_i) -> H(X_j), r(0, .) = 0 and
    r(., n+1) = 0 stands in for d = infinity.
    """
    n = ph.n

    def r(i, j):
        if i == 0 or j == n + 1:
            return 0
        return rank_gf2(ph.rho(i, j).to_lists()) if ph.dim(i) and ph.dim(j) else 0

    bars = []
    for b in range(1, n + 1):
        for d in range(b + 1, n + 2):
            mult = r(b, d - 1) - r(b, d) - r(b - 1, d - 1) + r(b - 1, d)
            assert mult >= 0
            bars += [(b, math.inf if d == n + 1 else d)] * mult
    return sorted(bars)


def sections_by_enumeration(sheaf, members):
    """Every family over ``members`` compatible under all restrictions, by brute force."""
    dims = [sheaf.stalkdim[p] for p in members]
    out = []
    for family in product(*(range(1 << d) for d in dims)):
        fam = dict(zip(members, family))
        if all(
            sheaf.restriction(p, q).apply(fam[p]) == fam[q]
            for p in members
            for q in members
            if sheaf.poset.leq(p, q)
        ):
            out.append(fam)
    return out
