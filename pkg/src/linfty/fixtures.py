"""The fixture catalog shipped with the repository, plus seeded random
instance generators used by the test suite.

E1  abelian two-term structure
E2  pure curvature on a line
E4  one higher operation feeding a contracted pair
E5  a kernel tower collapsed by one reduction step, with its linear morphism
B1  rank-one chart whose curvature cuts out the origin
B2  two-coordinate chart fibered over a line
"""

from __future__ import annotations

import random
from fractions import Fraction

from .charts import BundleChart, BundleMorphism
from .linalg import GradedMap, GradedSpace
from .poly import Poly
from .structures import (
    CurvedStructure,
    Morphism,
    check_relations,
    gauge_conjugate,
    structure_from_linear,
)
from .transfer import Contraction, FiltrationSpec
from .words import enumerate_words, word_degree

F = Fraction


def e1():
    sp = GradedSpace.make({1: 1, 2: 1}, {1: ("e1",), 2: ("e2",)})
    return CurvedStructure.make(sp, {((1, 0),): (F(1),)})


def e2():
    sp = GradedSpace.make({1: 1}, {1: ("e1",)})
    return CurvedStructure.make(sp, {(): (F(1),)})


def e4():
    sp = GradedSpace.make({2: 1, 4: 1, 5: 2}, {2: ("h",), 4: ("m",), 5: ("b", "c")})
    return CurvedStructure.make(sp, {
        ((4, 0),): (F(1), F(0)),
        ((2, 0), (2, 0)): (F(1), F(1)),
    })


def e4_contraction():
    sp = e4().space
    delta = GradedMap.make(sp, sp, 1, {4: ((F(1),), (F(0),))})
    eta = GradedMap.make(sp, sp, -1, {5: ((F(1), F(0)),)})
    return Contraction(sp, delta, eta, FiltrationSpec.natural())


def e5():
    sp = GradedSpace.make({1: 1, 2: 1, 3: 1}, {1: ("x",), 2: ("k2",), 3: ("k3",)})
    return CurvedStructure.make(sp, {((2, 0),): (F(1),)})


def e5_target():
    sp = GradedSpace.make({1: 1}, {1: ("x'",)})
    return CurvedStructure.make(sp, {})


def e5_morphism():
    return Morphism.make(e5(), e5_target(), {((1, 0),): (F(1),)})


def zero_structure():
    return CurvedStructure.make(GradedSpace.make({}), {})


def b1():
    coords = ("x",)
    x = Poly.var(coords, "x")
    sp = GradedSpace.make({1: 1}, {1: ("e",)})
    return BundleChart.make(coords, sp, {(): (x,)})


def point_bundle(coords=()):
    return BundleChart.make(coords, GradedSpace.make({}), {})


def b1_to_point():
    return BundleMorphism.make(b1(), point_bundle(), (), {})


def b2():
    coords = ("x", "y")
    x = Poly.var(coords, "x")
    sp = GradedSpace.make({1: 1}, {1: ("e",)})
    return BundleChart.make(coords, sp, {(): (x,)})


def b2_to_line():
    y = Poly.var(("x", "y"), "y")
    target = point_bundle(("z",))
    return BundleMorphism.make(b2(), target, (y,), {})


def e5_chart():
    coords = ("y",)
    one = Poly.const(coords, 1)
    return BundleChart.make(coords, e5().space, {((2, 0),): (one,)})


def e5_chart_morphism():
    coords = ("y",)
    y = Poly.var(coords, "y")
    one = Poly.const(coords, 1)
    target = BundleChart.make(("w",), e5_target().space, {})
    return BundleMorphism.make(e5_chart(), target, (y,), {((1, 0),): (one,)})


def koszul_bundle():
    """Euler-form rank-one chart over two coordinates for the homotopy checks."""
    coords = ("x", "y")
    x = Poly.var(coords, "x")
    sp = GradedSpace.make({1: 1}, {1: ("e",)})
    return BundleChart.make(coords, sp, {(): (x,)})


# ---------------------------------------------------------------------------
# seeded random generators

def random_abelian(rng, max_amplitude=5, max_total_dim=6, with_curvature=False):
    """Structure whose only operation is a matching-shaped differential; the
    optional curvature lands in the kernel of it."""
    n = rng.randint(2, max_amplitude)
    dims = {}
    total = 0
    for d in range(1, n + 1):
        room = max_total_dim - total
        m = rng.randint(0, min(2, room))
        if m:
            dims[d] = m
        total += m
    if total == 0:
        dims[1] = 1
        total = 1
    sp = GradedSpace.make(dims)
    blocks = {}
    matched_targets = set()
    for d in sp.degrees():
        rows, cols = sp.dim(d + 1), sp.dim(d)
        if not rows:
            continue
        mat = [[F(0)] * cols for _ in range(rows)]
        free_rows = list(range(rows))
        rng.shuffle(free_rows)
        for j in range(cols):
            if free_rows and rng.random() < 0.6:
                i = free_rows.pop()
                mat[i][j] = F(1)
                matched_targets.add((d + 1, i))
        blocks[d] = tuple(tuple(r) for r in mat)
    for d in list(blocks):
        rows, cols = sp.dim(d + 1), sp.dim(d)
        mat = [list(r) for r in blocks[d]]
        for j in range(cols):
            if (d, j) in matched_targets:
                for i in range(rows):
                    mat[i][j] = F(0)
        blocks[d] = tuple(tuple(r) for r in mat)
    lam1 = GradedMap.make(sp, sp, 1, blocks)
    ops = {}
    if with_curvature and sp.dim(1):
        from .linalg import kernel_basis
        ker = kernel_basis(lam1.block(1), sp.dim(2), sp.dim(1))
        if ker:
            ops[()] = ker[rng.randrange(len(ker))]
    s = structure_from_linear(sp, lam1, ops)
    assert check_relations(s).passed
    return s


def random_gauge_table(rng, s, higher_probability=0.25):
    sp = s.space
    comps = {}
    for d in sp.degrees():
        n = sp.dim(d)
        mat = [[F(1) if i == j else F(0) for j in range(n)] for i in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < 0.5:
                    mat[i][j] = F(rng.randint(-2, 2))
        for i in range(n):
            comps[((d, i),)] = tuple(mat[r][i] for r in range(n))
    basis = sp.basis()
    for k in (2, 3):
        for w in enumerate_words(basis, k):
            od = word_degree(w)
            if sp.dim(od) and rng.random() < higher_probability:
                vec = [F(0)] * sp.dim(od)
                vec[rng.randrange(sp.dim(od))] = F(rng.randint(-2, 2))
                if any(vec):
                    comps[w] = tuple(vec)
    return comps


def random_conjugated_structure(rng, max_amplitude=5, max_total_dim=6,
                                with_curvature=False):
    base = random_abelian(rng, max_amplitude, max_total_dim, with_curvature)
    conj, psi = gauge_conjugate(base, random_gauge_table(rng, base))
    return conj


def random_transfer_pair(rng, max_amplitude=5, max_total_dim=6):
    """Structure together with an admissible contraction.

    The differential is a matching; its reversal on a random sub-matching is
    the homotopy; extra linear entries from matched sources to other matched
    targets keep the square zero while making the deformed series nontrivial;
    higher operations come from linear-unit gauge conjugation, and an
    optional curvature sits in the kernel of the linear part.
    """
    n = rng.randint(2, max_amplitude)
    dims = {}
    total = 0
    pairs = []
    for d in range(1, n):
        room = max_total_dim - total
        if room < 2:
            break
        count = rng.randint(0, min(2, room // 2))
        for _ in range(count):
            i = dims.get(d, 0)
            j = dims.get(d + 1, 0)
            dims[d] = i + 1
            dims[d + 1] = j + 1
            total += 2
            pairs.append((d, i, j))
    room = max_total_dim - total
    for _ in range(rng.randint(0 if pairs else 1, max(room, 0))):
        d = rng.randint(1, n)
        dims[d] = dims.get(d, 0) + 1
        total += 1
    sp = GradedSpace.make(dims)

    delta_blocks = {}
    eta_blocks = {}
    for d, i, j in pairs:
        rows, cols = sp.dim(d + 1), sp.dim(d)
        mat = [list(r) for r in delta_blocks.get(d, [[F(0)] * cols for _ in range(rows)])]
        mat[j][i] = F(1)
        delta_blocks[d] = [list(r) for r in mat]
    for d, i, j in pairs:
        if rng.random() < 0.7:
            rows, cols = sp.dim(d), sp.dim(d + 1)
            mat = [list(r) for r in eta_blocks.get(d + 1, [[F(0)] * cols for _ in range(rows)])]
            mat[i][j] = F(1)
            eta_blocks[d + 1] = [list(r) for r in mat]
    delta = GradedMap.make(sp, sp, 1, {d: tuple(tuple(r) for r in m)
                                       for d, m in delta_blocks.items()})
    eta = GradedMap.make(sp, sp, -1, {d: tuple(tuple(r) for r in m)
                                      for d, m in eta_blocks.items()})

    lam_blocks = {d: [list(r) for r in delta.block(d)] for d in sp.degrees()
                  if sp.dim(d + 1)}
    by_degree = {}
    for d, i, j in pairs:
        by_degree.setdefault(d, []).append((i, j))
    for d, members in by_degree.items():
        if len(members) >= 2 and rng.random() < 0.7:
            (i1, _j1), (_i2, j2) = members[0], members[1]
            lam_blocks[d][j2][i1] += F(rng.randint(1, 2))
    lam1 = GradedMap.make(sp, sp, 1, {d: tuple(tuple(r) for r in m)
                                      for d, m in lam_blocks.items()})
    ops = {}
    if sp.dim(1) and rng.random() < 0.4:
        from .linalg import kernel_basis
        ker = kernel_basis(lam1.block(1), sp.dim(2), sp.dim(1))
        if ker:
            ops[()] = ker[rng.randrange(len(ker))]
    base = structure_from_linear(sp, lam1, ops)
    assert check_relations(base).passed
    conj, _psi = gauge_conjugate(base, random_gauge_table(rng, base, 0.3))
    return conj, Contraction(sp, delta, eta, FiltrationSpec.natural())


def random_admissible_transfer_pair(rng, attempts=60, flat=False):
    """Draw transfer pairs until the engine accepts one; draws it rejects are
    legitimately non-filtered.  With flat=True only curvature-free structures
    are returned (the homotopy-operator identity needs the linear parts of
    the embedding and projection to be chain maps, which curvature
    corrections can break)."""
    from .errors import NoConvergence
    from .transfer import transfer
    for _ in range(attempts):
        s, c = random_transfer_pair(rng)
        if flat and s.has_curvature():
            continue
        try:
            transfer(s, c)
        except NoConvergence:
            continue
        return s, c
    raise RuntimeError("no admissible transfer pair found")


def random_reduction_instance(rng):
    """Linear surjective morphism built as a target structure plus kernel
    pairs, conjugated by a linear automorphism; admissible for the pipeline."""
    tgt_amp = rng.randint(1, 3)
    tdims = {d: rng.randint(0, 1) for d in range(1, tgt_amp + 1)}
    tdims[1] = max(tdims.get(1, 0), 1)
    tsp = GradedSpace.make({d: m for d, m in tdims.items() if m})
    tgt = CurvedStructure.make(tsp, {})

    pair_count = rng.randint(1, 2)
    pair_degrees = sorted(rng.choice([2, 3, 4]) for _ in range(pair_count))
    dims = {d: tsp.dim(d) for d in tsp.degrees()}
    pairs = []
    for d in pair_degrees:
        i = dims.get(d, 0)
        j = dims.get(d + 1, 0)
        dims[d] = i + 1
        dims[d + 1] = j + 1
        pairs.append((d, i, j))
    sp = GradedSpace.make({d: m for d, m in dims.items() if m})
    blocks = {}
    for d, i, j in pairs:
        rows, cols = sp.dim(d + 1), sp.dim(d)
        mat = blocks.get(d, [[F(0)] * cols for _ in range(rows)])
        mat[j][i] = F(1)
        blocks[d] = mat
    lam1 = GradedMap.make(sp, sp, 1, {d: tuple(tuple(r) for r in m)
                                      for d, m in blocks.items()})
    src = structure_from_linear(sp, lam1)

    comps = {}
    for d in tsp.degrees():
        for i in range(tsp.dim(d)):
            vec = [F(0)] * tsp.dim(d)
            vec[i] = F(1)
            comps[((d, i),)] = tuple(vec)
    phi = Morphism.make(src, tgt, comps)

    table = random_gauge_table(rng, src, 0.0)
    conj, psi = gauge_conjugate(src, table)
    composed_comps = {}
    lin_psi = psi.linear_component()
    lin_phi = phi.linear_component()
    lin = lin_phi.compose(lin_psi)
    for d in conj.space.degrees():
        block = lin.block(d)
        rows = tsp.dim(d)
        for i in range(conj.space.dim(d)):
            vec = tuple(block[r][i] for r in range(rows))
            if any(vec):
                composed_comps[((d, i),)] = vec
    return Morphism.make(conj, tgt, composed_comps)
