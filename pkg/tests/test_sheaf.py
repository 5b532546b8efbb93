import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fixtures import ai_filtration, ai_parts
from oracles import sections_by_enumeration
from sheafbranch.checks import small_levels
from sheafbranch.cubical import complex_of, homology_basis, induced_map, persistent_homology
from sheafbranch.errors import FunctorialityViolation, NotUpClosed, ValidationError
from sheafbranch.sheaf import (
    APEX,
    LEFT,
    RIGHT,
    FinitePoset,
    brute_force_sections,
    coincide,
    coincidence_as_section,
    cospan_sheaf,
    make_sheaf,
    sections,
)
from sheafbranch.z2 import Z2Matrix, all_vectors

SQUARE = [(0, 0), (0, 1), (1, 0), (1, 1)]
SQUARE_COVERS = [((0, 0), (0, 1)), ((0, 0), (1, 0)), ((0, 1), (1, 1)), ((1, 0), (1, 1))]


def square_poset():
    return FinitePoset.from_covers(SQUARE, SQUARE_COVERS)


def constant_square():
    one = Z2Matrix.identity(1)
    return make_sheaf(square_poset(), {p: 1 for p in SQUARE}, {c: one for c in SQUARE_COVERS})


def test_poset_axioms_are_checked():
    with pytest.raises(ValidationError):
        FinitePoset(["a", "b"], [("a", "a")])  # not reflexive at b
    with pytest.raises(ValidationError):
        FinitePoset(["a", "b"], [("a", "a"), ("b", "b"), ("a", "b"), ("b", "a")])
    with pytest.raises(ValidationError):
        FinitePoset(["a", "b", "c"], [(p, p) for p in "abc"] + [("a", "b"), ("b", "c")])


def test_basic_opens_are_upsets():
    P = square_poset()
    assert P.upset((0, 1)) == {(0, 1), (1, 1)}
    assert P.basic_open((0, 0)).upset == set(SQUARE)
    assert sorted(P.covers()) == sorted(SQUARE_COVERS)
    with pytest.raises(NotUpClosed):
        P.check_up_closed([(0, 1)])


def test_one_point_sheaf():
    P = FinitePoset(["p"], [("p", "p")])
    F = make_sheaf(P, {"p": 3}, {})
    assert F.restriction("p", "p") == Z2Matrix.identity(3)
    assert sections(F, ["p"]).dim == 3


def test_constant_square_sheaf():
    F = constant_square()
    assert F.restriction((0, 0), (1, 1)) == Z2Matrix.identity(1)


def test_broken_square_is_rejected():
    one, zero = Z2Matrix.identity(1), Z2Matrix.zeros(1, 1)
    maps = {c: one for c in SQUARE_COVERS}
    maps[((0, 1), (1, 1))] = zero
    with pytest.raises(FunctorialityViolation) as exc:
        make_sheaf(square_poset(), {p: 1 for p in SQUARE}, maps)
    p, q, r = exc.value.witness
    assert square_poset().leq(p, q) and square_poset().leq(q, r)


def test_missing_cover_map():
    with pytest.raises(ValidationError):
        make_sheaf(square_poset(), {p: 1 for p in SQUARE}, {SQUARE_COVERS[0]: Z2Matrix.identity(1)})


def test_wrong_shape():
    maps = {c: Z2Matrix.identity(1) for c in SQUARE_COVERS}
    maps[SQUARE_COVERS[0]] = Z2Matrix.identity(2)
    with pytest.raises(ValidationError):
        make_sheaf(square_poset(), {p: 1 for p in SQUARE}, maps)


def test_sections_over_two_basic_opens():
    F = constant_square()
    U = F.poset.union_of_basic_opens([(0, 1), (1, 0)])
    space = sections(F, U)
    assert space.dim == 1
    assert space.contains({(0, 1): 1, (1, 0): 1, (1, 1): 1})
    assert not space.admits({(0, 1): 1, (1, 0): 0})


def test_sections_over_maximal_element():
    F = constant_square()
    assert sections(F, [(1, 1)]).dim == 1


@st.composite
def square_sheaves(draw):
    """Random sheaf on the square poset with commuting maps, stalk dims <= 2."""
    dims = {p: draw(st.integers(0, 2)) for p in SQUARE}

    def mat(r, c):
        return Z2Matrix.from_lists(draw(st.lists(st.lists(st.integers(0, 1), min_size=c, max_size=c), min_size=r, max_size=r)), cols=c)

    a = mat(dims[(0, 1)], dims[(0, 0)])
    b = mat(dims[(1, 1)], dims[(0, 1)])
    c = mat(dims[(1, 0)], dims[(0, 0)])
    # choose the last map so the square commutes when possible, else rely on a zero source
    d = mat(dims[(1, 1)], dims[(1, 0)])
    if not (b @ a == d @ c):
        a = Z2Matrix.zeros(dims[(0, 1)], dims[(0, 0)])
        c = Z2Matrix.zeros(dims[(1, 0)], dims[(0, 0)])
    maps = dict(zip(SQUARE_COVERS, [a, c, b, d]))
    return make_sheaf(square_poset(), dims, maps)


@settings(max_examples=80)
@given(square_sheaves(), st.sets(st.sampled_from(SQUARE), min_size=1))
def test_sections_match_enumeration(F, gens):
    U = F.poset.union_of_basic_opens(gens)
    space = sections(F, U)
    found = sections_by_enumeration(F, F.poset.sorted(U))
    assert 2 ** space.dim == len(found)
    assert all(space.contains(f) for f in found)
    assert sorted(map(sorted, (f.items() for f in space.sections()))) == sorted(map(sorted, (f.items() for f in found)))
    assert len(brute_force_sections(F, U)) == len(found)


def test_coincide_identity():
    ph = persistent_homology(ai_filtration().pixel_sets(), 0)
    for s in all_vectors(ph.dim(3)):
        assert coincide(ph, 3, s, 3, s, 3)


def _a_and_i_classes():
    a, i, full = ai_parts()
    ph = persistent_homology([a, a | i, full], 0)
    h_a = homology_basis(complex_of(a), 0)
    h_i = homology_basis(complex_of(i), 0)
    h3 = ph.bases[2]
    s_a = induced_map(h_a, h3)(1)
    s_i = induced_map(h_i, h3)(1)
    return ph, s_a, s_i


def test_a_and_i_coincide_at_the_last_level():
    ph, s_a, s_i = _a_and_i_classes()
    assert s_a != s_i
    assert not coincide(ph, 2, s_a, 2, s_i, 2)
    assert coincide(ph, 2, s_a, 2, s_i, 3)


def test_a_and_i_form_a_section():
    ph, s_a, s_i = _a_and_i_classes()
    space = coincidence_as_section(ph, 2, 2, 3)
    assert space.admits({LEFT: s_a, RIGHT: s_i})
    F = cospan_sheaf(ph.rho(2, 3), ph.rho(2, 3))
    assert 2 ** space.dim == len(sections_by_enumeration(F, [LEFT, RIGHT, APEX]))


def test_never_merging_components():
    levels = [{(0, 0), (5, 0)}, {(0, 0), (5, 0), (0, 1)}]
    ph = persistent_homology(levels, 0)
    assert not coincide(ph, 1, 0b01, 1, 0b10, 2)


def test_trivial_homology_gives_trivial_sections():
    ph = persistent_homology([{(0, 0)}, {(0, 0)}], 1)
    assert coincidence_as_section(ph, 1, 2, 2).dim == 0


def test_level_checks():
    ph = persistent_homology([{(0, 0)}, {(0, 0)}], 0)
    with pytest.raises(ValidationError):
        coincide(ph, 2, 1, 1, 1, 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_sections_are_exactly_coinciding_pairs(seed):
    levels = small_levels(np.random.default_rng(seed))
    for q in (0, 1):
        ph = persistent_homology(levels, q)
        for k in range(1, ph.n + 1):
            for i in range(1, k + 1):
                for j in range(1, k + 1):
                    space = coincidence_as_section(ph, i, j, k)
                    for s in all_vectors(ph.dim(i)):
                        for t in all_vectors(ph.dim(j)):
                            assert space.admits({LEFT: s, RIGHT: t}) == coincide(ph, i, s, j, t, k)
