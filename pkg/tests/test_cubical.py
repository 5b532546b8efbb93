import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fixtures import BLOCK, RING, ai_parts
from oracles import components8, holes, rank_gf2
from sheafbranch.cubical import (
    Cell,
    betti,
    complex_of,
    homology_basis,
    induced_map,
    persistent_homology,
)
from sheafbranch.errors import InclusionViolation, NotInSpan
from sheafbranch.z2 import EchelonBasis, Z2Matrix

pixel_sets = st.frozensets(st.tuples(st.integers(0, 5), st.integers(0, 5)), max_size=20)


def test_empty_complex():
    K = complex_of([])
    assert [K.count(d) for d in range(3)] == [0, 0, 0]
    assert betti(K, 0) == betti(K, 1) == 0
    assert homology_basis(K, 0).dim == 0


def test_single_square():
    K = complex_of([(0, 0)])
    assert (K.count(2), K.count(1), K.count(0)) == (1, 4, 4)


def test_diagonal_pair_shares_a_corner():
    K = complex_of([(0, 0), (1, 1)])
    assert (K.count(2), K.count(1), K.count(0)) == (2, 8, 7)
    assert betti(K, 0) == 1


def test_a_and_i_complex():
    a, i, _ = ai_parts()
    K = complex_of(a | i)
    assert (betti(K, 0), betti(K, 1)) == (2, 1)


def test_pixel_ring():
    K = complex_of(RING)
    assert (betti(K, 0), betti(K, 1)) == (1, 1)
    d1 = K.boundary_matrix(1).to_lists()
    d2 = K.boundary_matrix(2).to_lists()
    # beta_1 = dim ker d1 - rank d2, by an independent rank computation
    assert K.count(1) - rank_gf2(d1) - rank_gf2(d2) == 1
    basis = homology_basis(K, 1)
    assert basis.dim == 1
    cycle = basis.cells_of(basis.reps[0])
    assert all(c.dim == 1 for c in cycle)
    assert K.boundary_matrix(1).apply(basis.reps[0]) == 0
    d2_span = EchelonBasis.spanning(K.boundary_columns(2))
    assert not d2_span.contains(basis.reps[0])


def test_two_isolated_pixels_vertex_reps():
    K = complex_of([(0, 0), (5, 5)])
    basis = homology_basis(K, 0)
    assert basis.dim == 2
    vertex_sets = [basis.cells_of(r) for r in basis.reps]
    assert all(len(v) == 1 and v[0].dim == 0 for v in vertex_sets)
    assert {v[0].x < 3 for v in vertex_sets} == {True, False}


def test_cell_faces():
    sq = Cell(2, 3, 4, 0)
    assert len(sq.faces()) == 4
    assert all(len(e.faces()) == 2 for e in sq.faces())
    assert Cell(0, 0, 0, 0).faces() == ()


@given(pixel_sets)
def test_boundary_of_boundary_vanishes(pixels):
    K = complex_of(pixels)
    assert (K.boundary_matrix(1) @ K.boundary_matrix(2)).is_zero()


@given(pixel_sets)
def test_betti_matches_image_oracles(pixels):
    K = complex_of(pixels)
    assert betti(K, 0) == components8(pixels)
    assert betti(K, 1) == holes(pixels)
    assert K.euler_characteristic() == betti(K, 0) - betti(K, 1)


@given(pixel_sets)
def test_basis_coordinates_roundtrip(pixels):
    for q in (0, 1):
        basis = homology_basis(complex_of(pixels), q)
        for coords in range(1 << min(basis.dim, 4)):
            assert basis.coordinates(basis.cycle(coords)) == coords


def test_non_cycle_has_no_coordinates():
    basis = homology_basis(complex_of([(0, 0)]), 1)
    with pytest.raises(NotInSpan):
        basis.coordinates(1)  # a single edge


def test_induced_identity():
    h = homology_basis(complex_of(RING), 1)
    assert induced_map(h, h).matrix == Z2Matrix.identity(1)


def test_merge_gives_all_ones_row():
    src = homology_basis(complex_of([(0, 0), (2, 0)]), 0)
    dst = homology_basis(complex_of([(0, 0), (1, 0), (2, 0)]), 0)
    assert induced_map(src, dst).matrix.to_lists() == [[1, 1]]


def test_induced_map_requires_inclusion():
    with pytest.raises(InclusionViolation):
        induced_map(homology_basis(complex_of([(0, 0)]), 0), homology_basis(complex_of([(3, 3)]), 0))


def test_ring_filled_kills_the_hole():
    m = induced_map(homology_basis(complex_of(RING), 1), homology_basis(complex_of(BLOCK), 1))
    assert m.matrix.shape == (0, 1)


@settings(max_examples=50)
@given(pixel_sets, pixel_sets, pixel_sets)
def test_functoriality(a, b, c):
    k, l, m = a, a | b, a | b | c
    for q in (0, 1):
        hk, hl, hm = (homology_basis(complex_of(s), q) for s in (k, l, m))
        assert induced_map(hk, hm).matrix == induced_map(hl, hm).matrix @ induced_map(hk, hl).matrix


def test_persistent_homology_composites():
    levels = [{(0, 0)}, {(0, 0), (2, 0)}, {(0, 0), (1, 0), (2, 0)}]
    ph = persistent_homology(levels, 0)
    assert ph.n == 3 and [ph.dim(i) for i in range(4)] == [0, 1, 2, 1]
    assert ph.rho(1, 3) == ph.rho(2, 3) @ ph.rho(1, 2)
    assert ph.rho(2, 2) == Z2Matrix.identity(2)
    assert ph.image_contains(1, 3, 1)
