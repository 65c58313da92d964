import math

import pytest
from hypothesis import given, settings, strategies as st

from moridream import abgroup as ag


def test_create_group_normalizes_torsion():
    assert str(ag.create_group(1, [2, 3])) == "AG(1, [6])"
    assert str(ag.create_group(0, [2, 4, 2])) == "AG(0, [2, 2, 4])"
    with pytest.raises(ag.GroupError):
        ag.create_group(1, [1])


def test_element_arithmetic_mod_torsion():
    K = ag.create_group(1, [2])
    a = K.element([3, 1])
    assert (a + a).coords == (6, 0)
    assert (-a).coords == (-3, 1)
    assert K.element([1]).coords == (1, 0)


def test_hom_display_and_columns():
    Q = ag.create_hom(ag.create_group(3), ag.create_group(1, [3]), [[1, 1, 1], [0, 1, 2]])
    assert str(Q) == "AGH([3, []], [1, [3]])"
    assert Q.column(2).coords == (1, 2)
    assert Q([1, 1, 1]).coords == (3, 0)


def test_factor_group_quadric_pic():
    K = ag.create_group(2)
    S = ag.Subgroup.generated(K, [(6, 0), (0, 3)])
    assert str(ag.factor_group(K, S)) == "AG(0, [3, 6])"


def test_intersection_of_congruence_lattices():
    K = ag.create_group(2)
    a = ag.Subgroup.generated(K, [(1, -1), (3, 0)])  # x + y = 0 mod 3
    b = ag.Subgroup.generated(K, [(1, 1), (3, 0)])  # x = y mod 3
    c = ag.Subgroup.generated(K, [(2, 0), (0, 1)])  # x even
    S = ag.intersect(a, b, c)
    assert S == ag.Subgroup.generated(K, [(6, 0), (0, 3)])


def test_kernel_and_image():
    Q = ag.create_hom(ag.create_group(3), ag.create_group(1), [[1, 1, 1]])
    assert str(ag.kernel(Q).structure()) == "AG(2, [])"
    assert ag.is_full(ag.image(Q))


def test_element_order_mod():
    K = ag.create_group(2)
    S = ag.Subgroup.generated(K, [(6, 0), (0, 3)])
    assert ag.element_order_mod(K.element([0, -4]), S) == 3
    assert ag.element_order_mod(K.element([0, 3]), S) == 1
    assert ag.element_order_mod(K.element([1, 0]), ag.Subgroup.generated(K, [(0, 1)])) == math.inf


def test_subgroup_with_torsion_parent():
    K = ag.create_group(1, [2])
    S = ag.Subgroup.generated(K, [(2, 1)])
    assert K.element([0, 1]) not in S
    assert K.element([4, 0]) in S
    assert str(ag.factor_group(K, S)) == "AG(0, [4])"


def test_json_roundtrip():
    K = ag.create_group(3, [2])
    assert ag.AbelianGroup.from_json(K.to_json()) == K


parents = st.sampled_from([ag.create_group(2), ag.create_group(1, [4]), ag.create_group(2, [2]), ag.create_group(0, [2, 6])])


@st.composite
def subgroup_triples(draw):
    K = draw(parents)
    n = K.ngens

    def sub():
        gens = draw(st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=0, max_size=3))
        return ag.Subgroup.generated(K, gens)

    elem = draw(st.lists(st.integers(-12, 12), min_size=n, max_size=n))
    return K, sub(), sub(), sub(), K.element(elem)


@pytest.mark.property
@settings(max_examples=250)
@given(subgroup_triples())
def test_intersection_lattice_laws(data):
    K, A, B, C, x = data
    AB = ag.intersect(A, B)
    assert AB == ag.intersect(B, A)
    assert ag.intersect(AB, C) == ag.intersect(A, ag.intersect(B, C))
    assert ag.intersect(A, A) == A
    assert AB.is_subgroup_of(A) and AB.is_subgroup_of(B)
    assert (x in AB) == (x in A and x in B)
    # absorption with the join
    join = ag.Subgroup.generated(K, list(A.generators) + list(B.generators))
    assert ag.intersect(A, join) == A


@pytest.mark.property
@settings(max_examples=200)
@given(subgroup_triples())
def test_element_order_mod_is_least(data):
    K, A, _, _, x = data
    o = ag.element_order_mod(x, A)
    if o == math.inf:
        assert all((x * l) not in A for l in range(1, 30))
    else:
        assert (x * o) in A
        assert all((x * l) not in A for l in range(1, o))


@pytest.mark.property
@settings(max_examples=200)
@given(subgroup_triples())
def test_factor_group_order_is_index(data):
    K, A, _, _, _ = data
    Fq = ag.factor_group(K, A)
    if K.rank == 0:
        assert Fq.order() * A.structure().order() == K.order()
