"""Acceptance gate: every criterion runs at tolerance zero (exact rational
arithmetic) and prints one pass/fail line.  Run with `pytest -s` to see the
lines; each criterion is also an ordinary assertion.
"""

import random
import time
from fractions import Fraction

from linfty import fixtures as fx
from linfty.cedga import (
    bigrading_audit,
    build_ce,
    ce_cohomology,
    heq_check,
    koszul_identity_check,
    q_square_check,
    quasi_iso_check,
)
from linfty.charts import (
    BundleMorphism,
    classical_check,
    fiber_at,
    lastcase_split,
    recap_pipeline,
    tubular_psi,
)
from linfty.cli import run_job
from linfty.docs import canonical_dumps, load_file
from linfty.linalg import GradedSpace
from linfty.poly import Poly
from linfty.structures import (
    CurvedStructure,
    Morphism,
    check_morphism,
    check_relations,
    etale_pair,
    identity_morphism,
)
from linfty.transfer import (
    certify_transfer,
    expansion_oracle,
    firstcase_reduce,
    step1_pipeline,
    transfer,
)
from linfty.words import enumerate_words, word_degree

from conftest import FIXTURE_DIR

F = Fraction


def _report(number, ok, description, elapsed=None):
    status = "PASS" if ok else "FAIL"
    timing = f" ({elapsed:.2f}s)" if elapsed is not None else ""
    print(f"ACCEPTANCE {number} {status}: {description}{timing}")
    assert ok, f"criterion {number} failed: {description}"


def test_criterion_1_relation_ce_duality():
    start = time.monotonic()
    rng = random.Random(101)
    catalog = [fx.e1(), fx.e2(), fx.e4(), fx.e5(), fx.zero_structure()]
    ok = all(check_relations(s).passed and q_square_check(build_ce(s)).passed
             for s in catalog)
    structures = [fx.random_conjugated_structure(rng, with_curvature=rng.random() < 0.3)
                  for _ in range(50)]
    for s in structures:
        ok = ok and check_relations(s).passed and q_square_check(build_ce(s)).passed
    # both directions: a mutated entry must flip both verdicts together
    for s in structures[:15]:
        sp = s.space
        words = [w for k in range(1, max(sp.amplitude[1] - 1, 1) + 1)
                 for w in enumerate_words(sp.basis(), k)
                 if sp.dim(word_degree(w) + 1)]
        if not words:
            continue
        w = words[rng.randrange(len(words))]
        od = word_degree(w) + 1
        ops = dict(s.table)
        vec = list(ops.get(w, (F(0),) * sp.dim(od)))
        vec[rng.randrange(len(vec))] += F(rng.randint(1, 2))
        ops[w] = tuple(vec)
        broken = CurvedStructure.make(sp, ops)
        ok = ok and (check_relations(broken).passed
                     == q_square_check(build_ce(broken)).passed)
    elapsed = time.monotonic() - start
    _report(1, ok and elapsed < 10,
            "structure identities equivalent to a square-zero dual derivation "
            "on the catalog plus 50 conjugated structures", elapsed)


def _transfer_instances():
    rng = random.Random(202)
    pairs = [(fx.e4(), fx.e4_contraction())]
    while len(pairs) < 26:
        pairs.append(fx.random_admissible_transfer_pair(rng))
    return pairs


def test_criterion_2_and_3_transfer_identities_and_oracle():
    start = time.monotonic()
    pairs = _transfer_instances()
    ok2 = True
    ok3 = True
    for s, c in pairs:
        tr = transfer(s, c)
        cert = certify_transfer(tr)
        ok2 = ok2 and cert.passed
        phi, mu = expansion_oracle(s, c, 3)
        ok3 = ok3 and ({w: v for w, v in tr.phi_table.items() if len(w) <= 3} == phi)
        ok3 = ok3 and ({w: v for w, v in tr.mu_table.items() if len(w) <= 3} == mu)
    elapsed = time.monotonic() - start
    _report(2, ok2 and elapsed < 30,
            "transfer identities hold exactly on the fixture and 25 randomized "
            "contraction pairs", elapsed)
    _report(3, ok3, "fixed-point transfer equals the tree expansion through arity 3")


def test_criterion_4_transfer_inclusions_are_etale():
    pairs = _transfer_instances()
    ok = True
    for s, c in pairs:
        if s.has_curvature():
            continue
        tr = transfer(s, c)
        ok = ok and etale_pair(tr.embedding).etale
    _report(4, ok, "every curvature-free transfer inclusion certifies as etale")


def test_criterion_5_reduction_pipeline():
    rng = random.Random(303)
    res = firstcase_reduce(fx.e5_morphism(), 3)
    ok = res.passed and dict(res.transfer_result.core.dims) == {1: 1}
    full = step1_pipeline(fx.e5_morphism())
    ok = ok and full.passed and len(full.chain) == 1
    for _ in range(10):
        m = fx.random_reduction_instance(rng)
        ok = ok and check_morphism(m).passed
        out = step1_pipeline(m)
        ok = ok and out.passed and all(step.passed for step in out.chain)
    _report(5, ok, "degreewise reduction yields linear morphisms, isomorphisms "
                   "from each level up, on the fixture and 10 random instances")


def test_criterion_6_splitting_and_sections():
    x = Poly.var(("x",), "x")
    one = Poly.const(("x",), 1)
    b1 = fx.b1()
    suite = [
        (fx.b1_to_point(), [{"x": F(0)}], True),
        (BundleMorphism.make(b1, b1, (x,), {((1, 0),): (one,)}), [{"x": F(0)}], True),
        (fx.b2_to_line(), [{"x": F(0), "y": F(0)}, {"x": F(0), "y": F(2)}], True),
        # the kernel tower needs the fiberwise reduction before the splitting
        (fx.e5_chart_morphism(), [{"y": F(0)}, {"y": F(3)}], False),
    ]
    ok = True
    for m, points, split_directly in suite:
        if split_directly:
            last = lastcase_split(m, points)
            ok = ok and last.splitting.reconstruction_exact and last.passed
        rec = recap_pipeline(m, points)
        ok = ok and rec.passed
        ok = ok and rec.lastcase.splitting.reconstruction_exact
        ok = ok and rec.section.status == "synthesized"
        ok = ok and all(flag for _, flag in rec.section.checks)
    # the non-affine kernel keeps certificate-only output without failing
    coords = ("x", "y")
    xx, yy = Poly.var(coords, "x"), Poly.var(coords, "y")
    sp = GradedSpace.make({1: 2}, {1: ("e1", "e2")})
    from linfty.charts import BundleChart
    chart = BundleChart.make(coords, sp, {(): (xx + yy * yy, yy)})
    rec = recap_pipeline(BundleMorphism.make(chart, fx.point_bundle(), (), {}),
                         [{"x": F(0), "y": F(0)}])
    ok = ok and rec.passed and rec.section.status == "skipped"
    _report(6, ok, "curvature splits exactly as kernel section plus pullback, "
                   "with regularity certificates and sections in affine cases")


def test_criterion_7_koszul_homotopy():
    start = time.monotonic()
    ok = True
    from linfty.cedga import KoszulChart
    for n in (1, 2, 3):
        for k in (1, 2):
            if k > n:
                continue
            coords = tuple("xyz"[:n])
            section = tuple(Poly.var(coords, coords[i]) for i in range(k))
            ok = ok and koszul_identity_check(KoszulChart(coords, k, section), 6).passed
    rng = random.Random(404)
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
            entries.append(p if p else Poly.var(coords, "x"))
        res = tubular_psi(tuple(entries), k, coords)
        ok = ok and res.euler_identity and res.boundary_jacobian
    elapsed = time.monotonic() - start
    _report(7, ok and elapsed < 60,
            "flow homotopy identity exhaustive to degree 6 and the tubular "
            "frame identities on 10 polynomial sections", elapsed)


def test_criterion_8_transfer_homotopy_and_bigrading():
    rng = random.Random(505)
    tr = transfer(fx.e4(), fx.e4_contraction())
    ok = heq_check(tr, 4).passed
    for _ in range(10):
        s, c = fx.random_admissible_transfer_pair(rng, flat=True)
        ok = ok and heq_check(transfer(s, c), 4).passed
    rep = bigrading_audit(build_ce(fx.e4()))
    ok = ok and rep.passed
    ok = ok and (1, (1, 0), True) in rep.buckets and (2, (2, -1), True) in rep.buckets
    _report(8, ok, "weight-divided homotopy identity to weight 4 and the "
                   "bidegree decomposition of the dual derivation")


def test_criterion_9_quasi_isomorphism_instances():
    rng = random.Random(606)
    ok = True
    weak_equivalences = [
        transfer(fx.e4(), fx.e4_contraction()).embedding,
        firstcase_reduce(fx.e5_morphism(), 3).transfer_result.embedding,
        Morphism.make(fx.e1(), fx.zero_structure(), {}),
        identity_morphism(fx.e1()),
    ]
    for _ in range(3):
        s, c = fx.random_admissible_transfer_pair(rng, flat=True)
        weak_equivalences.append(transfer(s, c).embedding)
    for m in weak_equivalences:
        ok = ok and quasi_iso_check(m, 4).passed
    # classical loci through the degree-zero cohomology, per supplied point
    chart_points = [(fx.b1(), [{"x": F(0)}, {"x": F(1)}]),
                    (fx.b2(), [{"x": F(0), "y": F(0)}, {"x": F(1), "y": F(0)}])]
    for chart, points in chart_points:
        classical = sum(1 for p in points if classical_check(chart, p))
        h0 = sum(ce_cohomology(build_ce(fiber_at(chart, p)), 1)[0][0]
                 for p in points)
        ok = ok and h0 == classical
    for s, count in ((fx.e1(), 1), (fx.e2(), 0)):
        ok = ok and ce_cohomology(build_ce(s), 1)[0][0] == count
    # amplitude-one fixtures: etale agrees with quasi-isomorphism both ways
    sp1 = GradedSpace.make({1: 1})
    sp2 = GradedSpace.make({1: 2})
    a1 = CurvedStructure.make(sp1, {})
    a2 = CurvedStructure.make(sp2, {})
    quasi_smooth = [
        Morphism.make(a1, a1, {((1, 0),): (F(1),)}),
        Morphism.make(a1, a1, {}),
        Morphism.make(a2, a2, {((1, 0),): (F(1), F(1)), ((1, 1),): (F(0), F(1))}),
        Morphism.make(a2, a1, {((1, 0),): (F(1),)}),
        Morphism.make(a2, a2, {((1, 0),): (F(1), F(0))}),
    ]
    for m in quasi_smooth:
        ok = ok and etale_pair(m).etale == quasi_iso_check(m, 3).passed
    _report(9, ok, "weak-equivalence fixtures induce exact cohomology "
                   "isomorphisms; degree-zero cohomology counts classical "
                   "points; quasi-smooth agreement holds both ways")


def test_criterion_10_cli_golden_and_exit_codes():
    start = time.monotonic()
    import copy
    ok = True
    job_files = sorted((FIXTURE_DIR / "jobs").glob("*.json"))
    ok = ok and len(job_files) >= 13
    for path in job_files:
        kind, job = load_file(path)
        report = run_job(job, path.parent)
        normalized = copy.deepcopy(report)
        normalized["timing"] = {"seconds": 0.0}
        golden = (FIXTURE_DIR / "golden" / path.name).read_text(encoding="utf-8")
        ok = ok and canonical_dumps(normalized) == golden
        expected_fail = path.stem.endswith("bogus")
        has_fail = report["payload"]["summary"]["fail"] > 0
        ok = ok and (has_fail == expected_fail)
    from linfty.cli import main
    ok = ok and main(["run", "--input",
                      str(FIXTURE_DIR / "jobs" / "check-relations-e1.json"),
                      "--out", "/dev/null"]) == 0
    ok = ok and main(["run", "--input",
                      str(FIXTURE_DIR / "jobs" / "check-relations-bogus.json"),
                      "--out", "/dev/null"]) == 1
    ok = ok and main(["run", "--input", str(FIXTURE_DIR / "no-such-file.json")]) == 2
    elapsed = time.monotonic() - start
    _report(10, ok and elapsed < 300,
            "golden reports byte-identical modulo timing and the exit-code "
            "contract holds for every shipped job", elapsed)
