"""Tests for the dense group engine."""
import numpy as np
import pytest

from mcdw.core.enumerate import faithful_action
from mcdw.core.group import (
    DenseCapError,
    DenseGroup,
    GroupError,
    NotAbelianError,
    NotNormalError,
    abc_factorization,
    abelian_invariants,
    build,
    center,
    class_sizes,
    conjugacy_class_reps,
    derived_subgroup,
    generates,
    is_abelian_subgroup,
    is_normal,
    minimal_generators,
    nilpotency_class,
    normal_closure,
    powers,
    quotient,
    subgroup_closure,
    subgroup_group,
    trivial_subgroup,
    upper_central_series,
    upper_central_terms,
    whole_group,
)
from mcdw.core.presentations import X, parse_presentation


def _dense(text, subgroup=None, name=""):
    return build(faithful_action(parse_presentation(text), subgroup=subgroup), name=name)


@pytest.fixture(scope="module")
def dihedral():
    return _dense("x, y | x^2, y^2, (x y)^4", subgroup=X, name="D8")


@pytest.fixture(scope="module")
def abelian():
    return _dense("x, y | x^4, y^2, [x, y]", name="C4xC2")


def test_build_from_coset_action(dihedral):
    assert dihedral.order == 8
    assert dihedral.product(0, 5) == 5
    x, y = dihedral.generators
    assert dihedral.element_order(x) == 2
    assert dihedral.element_order(dihedral.product(x, y)) == 4
    assert sorted(np.bincount(dihedral.element_orders())[1:].tolist()) == [0, 1, 2, 5]


def test_arithmetic_identities(dihedral):
    x, y = dihedral.generators
    xy = dihedral.product(x, y)
    assert dihedral.product(xy, dihedral.inverse(xy)) == 0
    assert dihedral.power(xy, 4) == 0
    assert dihedral.power(xy, -1) == dihedral.inverse(xy)
    assert dihedral.commutator(x, y) == dihedral.power(xy, 2)
    assert dihedral.conjugate(xy, x) == dihedral.inverse(xy)
    assert list(powers(dihedral, xy, 4)) == [0, xy, dihedral.power(xy, 2), dihedral.power(xy, 3)]


def test_format_element_round_trip(dihedral):
    for g in range(dihedral.order):
        current = 0
        for generator, exponent in dihedral.word(g):
            current = dihedral.product(current, dihedral.power(dihedral.generators[generator], exponent))
        assert current == g
    assert dihedral.format_element(0) == "1"


def test_non_permutation_table_rejected():
    with pytest.raises(GroupError, match="not a permutation"):
        DenseGroup([np.array([0, 0, 1])])


def test_build_requires_faithful_action():
    gens = faithful_action(parse_presentation("x, y | x^2, y^2, (x y)^4"), subgroup=X)
    with pytest.raises(DenseCapError):
        build(gens, cap=4)
    gens.faithful = False
    with pytest.raises(GroupError, match="faithful"):
        build(gens)


def test_subgroups(dihedral):
    x, y = dihedral.generators
    xy = dihedral.product(x, y)
    rotations = subgroup_closure(dihedral, [xy])
    assert rotations.order == 4
    assert is_normal(dihedral, rotations)
    assert not is_normal(dihedral, subgroup_closure(dihedral, [x]))
    assert normal_closure(dihedral, [x]).order == 4
    assert generates(dihedral, [x, y])
    assert not generates(dihedral, [xy])
    assert len(minimal_generators(dihedral, whole_group(dihedral))) == 2
    assert trivial_subgroup(dihedral).order == 1


def test_center_and_series(dihedral):
    Z = center(dihedral)
    assert Z.order == 2
    assert [t.order for t in upper_central_terms(dihedral)] == [2, 8]
    assert nilpotency_class(dihedral) == 2
    assert derived_subgroup(dihedral).same_as(Z)


def test_abelian_invariants(dihedral, abelian):
    assert abelian_invariants(abelian, whole_group(abelian)) == [2, 4]
    assert abelian_invariants(dihedral, whole_group(dihedral), derived_subgroup(dihedral)) == [2, 2]
    assert abelian_invariants(dihedral, trivial_subgroup(dihedral)) == []
    with pytest.raises(NotAbelianError):
        abelian_invariants(dihedral, whole_group(dihedral))


def test_quotient(dihedral):
    Q = quotient(dihedral, center(dihedral), name="D8/Z")
    assert Q.order == 4
    assert Q.is_abelian()
    assert Q.projection[0] == 0
    assert len(np.unique(Q.projection)) == 4
    with pytest.raises(NotNormalError):
        quotient(dihedral, subgroup_closure(dihedral, [dihedral.generators[0]]))


def test_conjugacy_classes(dihedral, abelian):
    sizes = class_sizes(dihedral)
    assert sorted(sizes.values()) == [1, 1, 2, 2, 2]
    assert conjugacy_class_reps(dihedral) == sorted(sizes)
    assert len(conjugacy_class_reps(abelian)) == 8


def test_subgroup_group(dihedral):
    x, y = dihedral.generators
    S = subgroup_group(dihedral, [dihedral.product(x, y)], name="rot")
    assert S.order == 4
    assert S.is_abelian()
    assert sorted(S.embedding.tolist()) == subgroup_closure(dihedral, [dihedral.product(x, y)]).elements.tolist()


def test_not_nilpotent():
    S3 = _dense("x, y | x^2, y^3, (x y)^2", name="S3")
    assert S3.order == 6
    with pytest.raises(GroupError, match="not nilpotent"):
        upper_central_terms(S3)


def test_abc_factorization_of_abelian_group(abelian):
    x, y = abelian.generators
    fac = abc_factorization(abelian, x, y, abelian.commutator(x, y))
    assert (fac.a_mod, fac.b_mod, fac.c_mod) == (4, 2, 1)
    assert fac.bijective
    triples = fac.triples()
    for g in range(abelian.order):
        a, b, _ = triples[g]
        assert abelian.product(abelian.power(x, a), abelian.power(y, b)) == g


def test_j2_of_order_16(j2_3):
    _, G = j2_3
    assert G.order == 16
    series = upper_central_series(G)
    assert series.nilpotency_class == 3
    assert series.terms[0].order == 2
    assert series.terms[-1].order == 16
    assert derived_subgroup(G).order == 4
    assert len(conjugacy_class_reps(G)) == 7
    assert nilpotency_class(quotient(G, center(G))) == 2
    assert is_abelian_subgroup(G, center(G))
