import random
from fractions import Fraction

import pytest

from linfty import fixtures as fx
from linfty.errors import NotClassical, NotInvertible
from linfty.linalg import GradedMap, GradedSpace, cohomology
from linfty.structures import (
    CurvedStructure,
    Morphism,
    check_morphism,
    check_relations,
    compose,
    etale_pair,
    gauge_conjugate,
    identity_morphism,
    invert_morphism_table,
    is_identity_table,
    morphism_from_linear,
    tangent_complex,
)
from linfty.transfer import transfer

F = Fraction


def test_fixture_relations():
    assert check_relations(fx.e1()).passed
    assert check_relations(fx.e2()).passed
    assert check_relations(fx.e4()).passed
    assert check_relations(fx.e5()).passed


def test_bogus_curvature_fails_at_arity_zero():
    e1 = fx.e1()
    ops = dict(e1.table)
    ops[()] = (F(1),)
    bad = CurvedStructure.make(e1.space, ops)
    rep = check_relations(bad)
    assert not rep.passed
    first = rep.first_failure
    assert first.arity == 0 and first.word == ()
    # the defect is the image of the curvature under the linear operation
    assert first.defect == (F(1),)


def test_identity_morphism_passes():
    for s in (fx.e1(), fx.e2(), fx.e4()):
        assert check_morphism(identity_morphism(s)).passed


def test_transfer_embedding_is_morphism_hand_check():
    tr = transfer(fx.e4(), fx.e4_contraction())
    rep = check_morphism(tr.embedding)
    assert rep.passed
    # arity two by hand: target side gives b + c plus the linear image of -m
    assert tr.embedding.table[((2, 0), (2, 0))] == (F(-1),)


def test_swap_morphism_fails_with_defect():
    sp = GradedSpace.make({1: 2, 2: 1})
    s = CurvedStructure.make(sp, {((1, 0),): (F(1),)})
    swap = GradedMap.make(sp, sp, 0, {
        1: ((F(0), F(1)), (F(1), F(0))), 2: ((F(1),),)})
    m = morphism_from_linear(s, s, swap)
    rep = check_morphism(m)
    assert not rep.passed
    assert rep.first_failure.arity == 1
    assert any(x for x in rep.first_failure.defect)


def test_compose_unit_and_projection_identity():
    tr = transfer(fx.e4(), fx.e4_contraction())
    phi = tr.embedding
    ident = identity_morphism(phi.target)
    assert compose(ident, phi).table == phi.table
    assert is_identity_table(compose(tr.projection_morphism, phi))


def test_compose_associativity_random_linear():
    rng = random.Random(21)
    sp = GradedSpace.make({1: 2, 2: 1})
    s = CurvedStructure.make(sp, {})

    def random_linear():
        comps = {}
        for d in sp.degrees():
            n = sp.dim(d)
            for i in range(n):
                vec = tuple(F(rng.randint(-2, 2)) for _ in range(n))
                if any(vec):
                    comps[((d, i),)] = vec
        return Morphism.make(s, s, comps)

    for _ in range(10):
        a, b, c = random_linear(), random_linear(), random_linear()
        assert compose(compose(a, b), c).table == compose(a, compose(b, c)).table


def test_tangent_complex_requires_classical():
    with pytest.raises(NotClassical):
        tangent_complex(fx.e2())
    cx = tangent_complex(fx.e1())
    assert {d: v[0] for d, v in cohomology(cx).items()} == {1: 0, 2: 0}


def test_etale_examples():
    e1 = fx.e1()
    assert etale_pair(identity_morphism(e1)).etale
    zero = fx.zero_structure()
    assert etale_pair(Morphism.make(e1, zero, {})).etale
    tr = transfer(fx.e4(), fx.e4_contraction())
    assert etale_pair(tr.embedding).etale
    # quasi-smooth zero map misses the cohomology in degree one
    sp = GradedSpace.make({1: 1})
    a = CurvedStructure.make(sp, {})
    assert not etale_pair(Morphism.make(a, a, {})).etale


def test_gauge_scaling_example():
    e1 = fx.e1()
    new, psi = gauge_conjugate(e1, {((1, 0),): (F(2),), ((2, 0),): (F(2),)})
    assert new.table == e1.table
    assert check_relations(new).passed
    assert check_morphism(psi).passed


def test_gauge_quadratic_example():
    e4 = fx.e4()
    comps = {}
    for d in e4.space.degrees():
        n = e4.space.dim(d)
        for i in range(n):
            comps[((d, i),)] = tuple(F(1) if j == i else F(0) for j in range(n))
    comps[((2, 0), (2, 0))] = (F(1),)
    new, psi = gauge_conjugate(e4, comps)
    assert check_relations(new).passed
    assert check_morphism(psi).passed
    inv = invert_morphism_table(psi)
    back, _ = gauge_conjugate(new, inv)
    assert back.table == e4.table


def test_gauge_requires_invertible_linear_part():
    e1 = fx.e1()
    with pytest.raises(NotInvertible):
        gauge_conjugate(e1, {((1, 0),): (F(0),), ((2, 0),): (F(1),)})


def test_conjugated_random_structures_pass_both_checks():
    rng = random.Random(31)
    for _ in range(10):
        s = fx.random_conjugated_structure(rng)
        assert check_relations(s).passed


def test_arity_bound_forced_structurally():
    # amplitude [1,2]: any arity-2 entry would need output degree >= 3
    sp = GradedSpace.make({1: 1, 2: 1})
    from linfty.errors import DegreeRuleViolation, NonCanonicalWord
    with pytest.raises(DegreeRuleViolation):
        CurvedStructure.make(sp, {((1, 0), (2, 0)): (F(1),)})
    with pytest.raises(NonCanonicalWord):
        CurvedStructure.make(sp, {((2, 0), (1, 0)): ()})
