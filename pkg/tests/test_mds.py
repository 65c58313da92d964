from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from conftest import load_fixture, slow
from moridream import abgroup as ag
from moridream import exactlin as el
from moridream.convexgeom import is_fan
from moridream.gitfan import chambers_within, eff_cone, git_fan, mov_cone
from moridream.mds import (
    DomainError,
    NonGenericClassError,
    NotCoxRingError,
    UnsupportedPresentationError,
    create_mds,
    graph_to_dot,
    graph_to_tikz,
    mds_from_spacefile,
    ring_from_spacefile,
)
from moridream.polyring import create_graded_ring


def toric(qcols, w, relations=(), torsion=()):
    k = len(qcols[0])
    r = len(qcols)
    Q = ag.create_hom(ag.create_group(r), ag.create_group(k, torsion), el.from_columns(qcols, k))
    return create_mds(create_graded_ring(list(relations), r, Q), w)


P2 = lambda: toric([(1,), (1,), (1,)], [1])
P1xP1 = lambda: toric([(1, 0), (1, 0), (0, 1), (0, 1)], [1, 1])


# small classical spaces --------------------------------------------------


def test_projective_plane():
    X = P2()
    assert str(X) == "MDS(3, 0, 2, [1, []])"
    assert X.covering_collection == [(1,), (2,), (3,)]
    assert X.is_smooth() and X.sing().strata == []
    assert X.pic() == X.K.full()
    assert X.intersection_number([[1], [1]]) == 1
    assert X.intersection_graph() == [(1, 2), (1, 3), (2, 3)]
    assert X.is_fano() and X.gorenstein_index() == 1
    assert X.anticanonical().coords == (3,)
    F = X.canonical_ambient_fan()
    assert is_fan(F) and len(F.rays) == 3 and str(F) == "FAN(2, 0, [0, 3])"
    assert sorted(X.local_class_group(F).order() for F in X.covering_collection) == [1, 1, 1]


def test_weighted_plane():
    X = toric([(1,), (1,), (2,)], [1])
    assert X.intersection_number([[1], [1]]) == Fraction(1, 2)
    assert not X.is_smooth() and X.is_quasismooth()
    assert X.sing().strata == [(3,)]


def test_p1xp1():
    X = P1xP1()
    assert X.intersection_graph() == [(1, 3), (1, 4), (2, 3), (2, 4)]
    assert X.self_intersections() == [0, 0, 0, 0]
    F = X.canonical_ambient_fan()
    assert str(F) == "FAN(2, 0, [0, 4])"
    assert len(X.irrelevant_ideal()) == 4


def test_affine_mode_covering_is_origin():
    Q = ag.create_hom(ag.create_group(2), ag.create_group(0, [2]), [[1, 1]])
    X = create_mds(create_graded_ring([], 2, Q), None)
    assert X.affine and X.covering_collection == [()]
    assert str(X) == "MDS(2, 0, 2, [0, [2]])"
    assert X.sing().strata == [()]


def test_errors():
    with pytest.raises(NonGenericClassError):
        toric([(1, 0), (1, 0), (0, 1), (0, 1)], [1, 0])
    # the ray (1, 0) spans the degree of T1 alone, so a class near it is outside Mov
    with pytest.raises(NotCoxRingError):
        toric([(1, 0), (0, 1), (0, 1), (1, 1)], [3, 1])
    with pytest.raises(DomainError):
        toric([(1,), (1,), (1,), (1,)], [1]).self_intersections()
    with pytest.raises(DomainError):
        P2().local_class_group(())


# fixtures from the worked examples ----------------------------------------


def test_quadric(spaces):
    X = spaces("quadric")
    assert str(X) == "MDS(6, 1, 3, [2, []])"
    K = X.K
    assert X.pic() == ag.Subgroup.generated(K, [(6, 0), (0, 3)])
    assert str(ag.factor_group(K, X.pic())) == "AG(0, [3, 6])"
    assert set(X.sing().strata) == {(1, 5, 6), (1, 2, 5, 6), (1, 2, 6), (2, 3), (1, 4), (1, 2, 5)}
    assert str(X.local_class_group((2, 3))) == "AG(0, [3])"
    assert str(X.local_class_group((1, 5, 6))) == "AG(0, [2])"
    assert X.anticanonical().coords == (0, 4)
    assert X.gorenstein_index() == 3 and not X.is_fano()
    assert X.covering_collection == [(1, 4), (2, 3), (1, 2, 5), (1, 2, 6), (1, 5, 6), (3, 4, 5), (3, 4, 6), (3, 5, 6)]
    F = X.canonical_ambient_fan()
    assert is_fan(F) and len(F.max_cones) == 8 and F.ambient_dim == 4


def test_quadric_singular_local_class_groups_match_sing(spaces):
    X = spaces("quadric")
    nontrivial = {F for F in X.relevant_faces if not X.local_class_group(F).is_trivial()}
    assert nontrivial == set(X.sing().strata)  # the quadric total space is smooth off 0


def test_fourfold(spaces):
    X = spaces("fourfold")
    assert str(X) == "MDS(8, 1, 4, [3, [2]])"
    assert str(X.pic().structure()) == "AG(3, [])"
    assert str(ag.factor_group(X.K, X.pic())) == "AG(0, [2, 12, 12, 24])"
    assert X.sample().descriptor() == (3, 3, 0, 8, 8)
    assert X.is_fano() and X.gorenstein_index() == 4
    assert X.is_qfactorial() and not X.is_factorial()


def test_e6a2_surface(spaces):
    X = spaces("e6a2_surface")
    assert str(X) == "MDS(4, 1, 2, [1, [3]])"
    assert not X.is_smooth() and not X.is_quasismooth()
    assert X.sing().strata == [(1,), (4,)]


def test_ci_surface(spaces):
    X = spaces("ci_surface")
    assert X.is_smooth() and X.is_fano() and X.gorenstein_index() == 1
    assert X.intersection_number([[1], [1], [1]]) == 2  # degree of a quadric threefold


def test_sing_generators_are_relations_plus_minors(spaces):
    X = spaces("e6a2_surface")
    gens = X.sing().ideal_generators()
    assert gens[0] == X.ring.relations[0]
    assert len(gens) == 1 + 4  # the four partial derivatives


def test_non_complete_intersection_rejected():
    Q = ag.create_hom(ag.create_group(4), ag.create_group(1), [[1, 1, 1, 1]])
    # twisted cubic cone: three quadrics, codimension two
    R = create_graded_ring(["T1*T3 - T2^2", "T2*T4 - T3^2", "T1*T4 - T2*T3"], 4, Q)
    X = create_mds(R, [1])
    with pytest.raises(UnsupportedPresentationError):
        X.anticanonical()


def test_x2_surface_intersections(spaces):
    X = spaces("e6a2_resolved")
    assert X.self_intersections() == [-1] * 4 + [-2] * 8
    assert X.intersection_graph() == [
        (1, 4), (1, 9), (1, 12), (2, 7), (2, 12), (3, 9), (3, 11), (4, 5), (5, 6), (6, 8), (6, 10), (7, 8), (9, 12), (10, 11)
    ]


def test_graph_exports():
    X = P2()
    dot = graph_to_dot(X.intersection_graph(), 3, [1, 1, 1])
    assert dot.startswith("graph") and "T1 -- T2;" in dot
    tikz = graph_to_tikz(X.intersection_graph(), 3)
    assert "\\draw (T1) -- (T3);" in tikz


def test_json_roundtrip(spaces):
    X = spaces("fourfold")
    Y = mds_from_spacefile(X.to_json())
    assert str(Y) == str(X) and Y.pic() == X.pic()


# properties ---------------------------------------------------------------


def test_pic_inside_every_relevant_face_group(spaces):
    for name in ("quadric", "fourfold", "e6a2_surface"):
        X = spaces(name)
        P = X.pic()
        for F in X.relevant_faces:
            assert P.is_subgroup_of(X.face_subgroup(F))
        finite = ag.factor_group(X.K, P).rank == 0
        assert finite == all(X.local_class_group(F).rank == 0 for F in X.relevant_faces)


def test_gorenstein_index_divides_exponent(spaces):
    for name in ("quadric", "fourfold"):
        X = spaces(name)
        fac = ag.factor_group(X.K, X.pic())
        assert fac.torsion[-1] % X.gorenstein_index() == 0
        assert (X.gorenstein_index() == 1) == (X.canonical() in X.pic())


def test_dim_matches_krull(spaces):
    for name in ("quadric", "fourfold", "e6a2_surface", "ci_surface"):
        X = spaces(name)
        assert X.dim == X.ring.krull_dimension - X.K.rank


def test_ample_top_power_positive(spaces):
    for name in ("quadric", "fourfold", "ci_surface", "e6a2_surface"):
        X = spaces(name)
        assert X.intersection_number([X.w] * X.dim) > 0


def fan_oracle(X):
    """Intersection matrix of a complete simplicial toric surface from its fan."""
    B = X.degree_lattice
    v = [tuple(col[i] for col in B) for i in range(X.r)]
    cones = {frozenset(i for i in range(X.r) if i + 1 not in G) for G in X.covering_collection}
    r = X.r
    M = [[Fraction(0)] * r for _ in range(r)]
    for i in range(r):
        for j in range(r):
            if i != j and frozenset((i, j)) in cones:
                M[i][j] = Fraction(1, abs(v[i][0] * v[j][1] - v[i][1] * v[j][0]))
    for i in range(r):
        m = v[i]
        s = sum((m[0] * v[l][0] + m[1] * v[l][1]) * M[l][i] for l in range(r) if l != i)
        M[i][i] = -Fraction(s) / (m[0] * m[0] + m[1] * m[1])
    return M


@st.composite
def toric_surfaces(draw):
    r = draw(st.integers(3, 5))
    k = r - 2
    col = st.lists(st.integers(-1, 2), min_size=k, max_size=k).filter(any).map(tuple)
    q = draw(st.lists(col, min_size=r, max_size=r))
    return q


def _projective_toric(q):
    k = len(q[0])
    Q = ag.create_hom(ag.create_group(len(q)), ag.create_group(k), el.from_columns(q, k))
    R = create_graded_ring([], len(q), Q)
    assume(el.rank(el.from_columns(q, k)) == k)
    assume(ag.is_full(ag.image(Q)))
    eff = eff_cone(R)
    assume(eff.is_pointed() and eff.is_full_dimensional())
    mov = mov_cone(R)
    assume(mov.is_full_dimensional())
    inside = chambers_within(git_fan(R), mov)
    assume(inside)
    return create_mds(R, inside[0].relint_point())


@pytest.mark.property
@settings(max_examples=200)
@given(toric_surfaces())
def test_toric_surface_intersections_match_fan_oracle(q):
    X = _projective_toric(q)
    qs = X.ring.free_degrees
    oracle = fan_oracle(X)
    for i in range(X.r):
        for j in range(i, X.r):
            assert X.intersection_number([qs[i], qs[j]]) == oracle[i][j]


@pytest.mark.property
@settings(max_examples=200)
@given(toric_surfaces(), st.data())
def test_bilinear_and_decomposition_independent(q, data):
    X = _projective_toric(q)
    k = X.K.rank
    cls = st.lists(st.integers(-3, 3), min_size=k, max_size=k).map(tuple)
    u, v, w = data.draw(cls), data.draw(cls), data.draw(cls)
    uv = tuple(a + b for a, b in zip(u, v))
    I = X.intersection_number
    assert I([uv, w]) == I([u, w]) + I([v, w])
    assert I([u, w]) == I([w, u])
    base = tuple(2 * a + b for a, b in zip(X.toric_chamber.relint_point(), X.toric_chamber.rays[0]))
    assert I([u, w], base=base, extra_doublings=1) == I([u, w])


def test_bilinearity_on_fixture_surfaces(spaces):
    for X in (spaces("e6a2_surface"), P1xP1()):
        k = X.K.rank
        import itertools

        vecs = [v for v in itertools.product(range(-2, 3), repeat=k)][:12]
        for u, v, w in itertools.product(vecs[:4], vecs[4:8], vecs[8:12]):
            uv = tuple(a + b for a, b in zip(u, v))
            assert X.intersection_number([uv, w]) == X.intersection_number([u, w]) + X.intersection_number([v, w])
