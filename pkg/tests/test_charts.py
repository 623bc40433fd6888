import random
from fractions import Fraction

import pytest

from linfty import fixtures as fx
from linfty.charts import (
    BundleChart,
    BundleMorphism,
    chart_check_morphism,
    chart_check_relations,
    classical_check,
    etale_at,
    fiber_at,
    fibration_check,
    lastcase_split,
    recap_pipeline,
    tangent_at,
    tubular_psi,
)
from linfty.errors import (
    HypothesisFailed,
    NonConstantKernel,
    NotClassical,
    NotVanishingOnY,
    RegularityFails,
)
from linfty.linalg import GradedSpace, cohomology
from linfty.poly import Poly
from linfty.structures import check_relations

F = Fraction
X = Poly.var(("x",), "x")


def test_classical_locus_examples():
    b1 = fx.b1()
    assert classical_check(b1, {"x": F(0)})
    assert not classical_check(b1, {"x": F(1)})


def test_fiber_at_gives_curvature_free_structure():
    s = fiber_at(fx.b1(), {"x": F(0)})
    assert check_relations(s).passed
    assert not s.has_curvature()
    s1 = fiber_at(fx.b1(), {"x": F(1)})
    assert s1.has_curvature()


def test_tangent_examples():
    cx = tangent_at(fx.b1(), {"x": F(0)})
    assert {d: v[0] for d, v in cohomology(cx).items()} == {0: 0, 1: 0}
    with pytest.raises(NotClassical):
        tangent_at(fx.b1(), {"x": F(1)})
    # square curvature has vanishing jacobian at the origin
    sp = GradedSpace.make({1: 1}, {1: ("e",)})
    bq = BundleChart.make(("x",), sp, {(): (X * X,)})
    cxq = tangent_at(bq, {"x": F(0)})
    assert cohomology(cxq)[0][0] == 1


def test_etale_examples():
    m = fx.b1_to_point()
    assert etale_at(m, {"x": F(0)}).passed
    b1 = fx.b1()
    ident = BundleMorphism.make(b1, b1, (X,), {((1, 0),): (Poly.const(("x",), 1),)})
    assert etale_at(ident, {"x": F(0)}).passed
    sp = GradedSpace.make({1: 1}, {1: ("e",)})
    bq = BundleChart.make(("x",), sp, {(): (X * X,)})
    mq = BundleMorphism.make(bq, fx.point_bundle(), (), {})
    assert not etale_at(mq, {"x": F(0)}).passed


def test_fibration_examples():
    m = fx.b1_to_point()
    assert all(r.passed for r in fibration_check(m, [{"x": F(0)}, {"x": F(1)}]))
    # squared base map is not a submersion at the origin
    b1 = fx.b1()
    target = fx.point_bundle(("z",))
    sq = BundleMorphism.make(b1, target, (X * X,), {})
    rep = fibration_check(sq, [{"x": F(0)}])[0]
    assert not rep.passed and rep.rows[0][0] == "submersion"
    # zero linear part onto a nonzero fiber fails with the degree recorded
    tsp = GradedSpace.make({1: 1})
    tchart = BundleChart.make(("z",), tsp, {})
    zm = BundleMorphism.make(b1, tchart, (X,), {})
    rep2 = fibration_check(zm, [{"x": F(0)}])[0]
    failing = [name for name, ok, _ in rep2.rows if not ok]
    assert failing == ["linear-surjective-degree-1"]


def test_chart_checkers_are_polynomial_identities():
    assert chart_check_relations(fx.b1()).passed
    assert chart_check_morphism(fx.b1_to_point()).passed
    assert chart_check_morphism(fx.e5_chart_morphism()).passed


def test_lastcase_b1():
    res = lastcase_split(fx.b1_to_point(), [{"x": F(0)}])
    assert res.passed
    assert [str(p) for p in res.splitting.kernel_section] == ["1*x"]
    assert res.subbundle.e1_vectors == ()
    assert res.splitting.reconstruction_exact


def test_lastcase_identity_trivial():
    b1 = fx.b1()
    ident = BundleMorphism.make(b1, b1, (X,), {((1, 0),): (Poly.const(("x",), 1),)})
    res = lastcase_split(ident, [{"x": F(0)}])
    assert res.passed
    assert res.splitting.kernel_section == ()
    assert res.subbundle.e1_vectors == ((F(1),),)


def test_lastcase_regularity_failure():
    sp = GradedSpace.make({1: 1}, {1: ("e",)})
    bq = BundleChart.make(("x",), sp, {(): (X * X,)})
    mq = BundleMorphism.make(bq, fx.point_bundle(), (), {})
    with pytest.raises(RegularityFails):
        lastcase_split(mq, [{"x": F(0)}])


def test_lastcase_rejects_polynomial_components():
    b1 = fx.b1()
    m = BundleMorphism.make(b1, b1, (X,), {((1, 0),): (X,)})
    with pytest.raises(NonConstantKernel):
        lastcase_split(m, [{"x": F(0)}])


def test_recap_b1_section_is_inclusion_of_origin():
    res = recap_pipeline(fx.b1_to_point(), [{"x": F(0)}])
    assert res.passed
    assert res.section.status == "synthesized"
    assert [str(p) for p in res.section.base_map] == ["0"]
    assert dict(res.section.checks)["base-section-exact"]
    assert dict(res.section.checks)["base-retraction-mod-ideal"]


def test_recap_identity_trivial_certificates():
    b1 = fx.b1()
    ident = BundleMorphism.make(b1, b1, (X,), {((1, 0),): (Poly.const(("x",), 1),)})
    res = recap_pipeline(ident, [{"x": F(0)}])
    assert res.passed and res.section.status == "synthesized"
    assert [str(p) for p in res.section.base_map] == ["1*x"]


def test_recap_e5_chart_runs_reduction_then_splitting():
    res = recap_pipeline(fx.e5_chart_morphism(), [{"y": F(0)}, {"y": F(3)}])
    assert res.passed
    assert len(res.step_chain) == 1
    assert dict(res.reduced_chart.space.dims) == {1: 1}
    assert res.section.status == "synthesized"
    assert res.reduced_relations_pass and res.reduced_morphism_pass


def test_recap_b2_and_classical_bijection():
    res = recap_pipeline(fx.b2_to_line(), [{"x": F(0), "y": F(0)},
                                           {"x": F(0), "y": F(2)}])
    assert res.passed
    assert res.section.status == "synthesized"
    assert [str(p) for p in res.section.base_map] == ["0", "1*z"]
    assert res.classical_bijection[0]


def test_recap_nonlinear_kernel_skips_section():
    coords = ("x", "y")
    x = Poly.var(coords, "x")
    y = Poly.var(coords, "y")
    sp = GradedSpace.make({1: 2}, {1: ("e1", "e2")})
    chart = BundleChart.make(coords, sp, {(): (x + y * y, y)})
    m = BundleMorphism.make(chart, fx.point_bundle(), (), {})
    res = recap_pipeline(m, [{"x": F(0), "y": F(0)}])
    assert res.section.status == "skipped"
    assert "affine" in res.section.reason
    assert res.lastcase.passed
    assert res.passed


def test_tubular_psi_examples():
    coords = ("x",)
    x = Poly.var(coords, "x")
    r = tubular_psi((x,), 1, coords)
    assert [[str(q) for q in row] for row in r.matrix] == [["1"]]
    assert r.euler_identity and r.boundary_jacobian
    r2 = tubular_psi((x + x * x,), 1, coords)
    assert [[str(q) for q in row] for row in r2.matrix] == [["1 + 1*x"]]
    assert r2.euler_identity and r2.boundary_jacobian
    coords2 = ("x", "y")
    x2, y2 = Poly.var(coords2, "x"), Poly.var(coords2, "y")
    r3 = tubular_psi((y2 * x2,), 1, coords2)
    assert [[str(q) for q in row] for row in r3.matrix] == [["1*y"]]
    assert r3.euler_identity and r3.boundary_jacobian


def test_tubular_psi_requires_vanishing():
    coords = ("x", "y")
    y = Poly.var(coords, "y")
    with pytest.raises(NotVanishingOnY):
        tubular_psi((y,), 1, coords)


def test_tubular_psi_randomized():
    rng = random.Random(17)
    coords = ("x", "y", "z")
    for _ in range(10):
        k = rng.randint(1, 2)
        entries = []
        for _ in range(rng.randint(1, 2)):
            terms = {}
            for _ in range(rng.randint(1, 4)):
                exp = tuple(rng.randint(0, 2) for _ in coords)
                if sum(exp[:k]) == 0:
                    exp = (exp[0] + 1,) + exp[1:]
                terms[exp] = terms.get(exp, F(0)) + F(rng.randint(-3, 3))
            p = Poly(coords, terms)
            if not p:
                p = Poly.var(coords, "x")
            entries.append(p)
        res = tubular_psi(tuple(entries), k, coords)
        assert res.euler_identity and res.boundary_jacobian


def test_recap_requires_fibration():
    b1 = fx.b1()
    target = fx.point_bundle(("z",))
    sq = BundleMorphism.make(b1, target, (X * X,), {})
    with pytest.raises(HypothesisFailed):
        recap_pipeline(sq, [{"x": F(0)}])
