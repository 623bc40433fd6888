"""The dual side: free graded-commutative presentations with a square-zero
degree +1 derivation built from a structure table, their cohomology at a
point, pullback along morphisms, quasi-isomorphism certificates, the exact
monomial homotopy for Euler-form Koszul complexes, and the weight-divided
transfer homotopy with its bigrading audit.

Dual generators carry degree minus the primal degree, so parity is
preserved and odd generators square to zero.  The derivation value on the
generator dual to y collects, for every table entry on a word w with output
coefficient c on y, the monomial of the dual letters of w weighted by
c / (product of letter multiplicities factorial); the factorials make the
derivation the coordinate form of the table, and the square-zero test is
then equivalent to the structure identities.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb, factorial

from .errors import ChartBase, MissingEtaTilde, NotAMorphism, NotEulerForm
from .linalg import (
    ChainComplex,
    GradedMap,
    GradedSpace,
    rank,
    solve_particular,
)
from .poly import Poly, PolyRing, RAT, RatRing
from .structures import check_morphism
from .words import canonicalize, coproduct, word_degree


# ---------------------------------------------------------------------------
# free graded-commutative elements over dual generators

def dual_space(space):
    dims = {-d: n for d, n in space.dims}
    labels = {-d: tuple(f"xi_{name}" for name in names) for d, names in space.labels}
    return GradedSpace.make(dims, labels)


def dual_letter(elem):
    return (-elem[0], elem[1])


def dual_word(word):
    """Canonical dual monomial of a primal word, with its reordering sign."""
    return canonicalize([dual_letter(e) for e in word])


def multiplicity_factor(word):
    counts = {}
    for e in word:
        counts[e] = counts.get(e, 0) + 1
    total = 1
    for c in counts.values():
        total *= factorial(c)
    return total


def elem_add(a, b):
    out = dict(a)
    for w, c in b.items():
        new = out.get(w, 0) + c
        if new:
            out[w] = new
        else:
            out.pop(w, None)
    return out


def elem_scale(c, a):
    if not c:
        return {}
    return {w: c * x for w, x in a.items()}


def elem_mul(a, b):
    out = {}
    for w1, c1 in a.items():
        for w2, c2 in b.items():
            cw, sign = canonicalize(list(w1) + list(w2))
            if cw is None:
                continue
            val = sign * c1 * c2
            new = out.get(cw, 0) + val
            if new:
                out[cw] = new
            else:
                out.pop(cw, None)
    return out


def elem_is_zero(a):
    return all(not c for c in a.values())


def elem_degree_parts(a):
    parts = {}
    for w, c in a.items():
        parts.setdefault(word_degree(w), {})[w] = c
    return parts


@dataclass(frozen=True)
class CEPresentation:
    """Generators with the derivation's value on each, plus the scalar ring."""

    space: GradedSpace          # the primal space
    gens: GradedSpace           # dual generators (negative degrees)
    q_values: tuple             # tuple of (generator, element-as-tuple) pairs
    ring: object = RAT

    @property
    def q_table(self):
        return {g: dict(v) for g, v in self.q_values}

    def q_on_gen(self, gen):
        return dict(dict(self.q_values).get(gen, ()))


def _freeze_elem(elem):
    return tuple(sorted(elem.items(), key=lambda kv: (len(kv[0]), kv[0])))


def build_ce(s):
    """Presentation of the free graded-commutative algebra with the derivation
    dual to the structure table (curvature pairs to the scalar part)."""
    gens = dual_space(s.space)
    ring = s.ring
    q = {}
    for word, vec in s.table.items():
        out_deg = word_degree(word) + 1
        dw, sign = dual_word(word)
        if dw is None:
            continue
        norm = Fraction(sign, multiplicity_factor(word))
        for i, c in enumerate(vec):
            if not c:
                continue
            gen = (-out_deg, i)
            cur = q.setdefault(gen, {})
            val = cur.get(dw, ring.zero) + norm * c
            if val:
                cur[dw] = val
            else:
                cur.pop(dw, None)
    q = {g: v for g, v in q.items() if v}
    return CEPresentation(s.space, gens,
                          tuple(sorted((g, _freeze_elem(v)) for g, v in q.items())),
                          ring)


def derivation_apply(q_on_gen, elem, ring):
    """Extend a generator assignment to monomials by the graded Leibniz rule
    for an odd operator."""
    out = {}
    for word, coeff in elem.items():
        prefix = 0
        for i, letter in enumerate(word):
            img = q_on_gen(letter)
            if img:
                sgn_prefix = -1 if prefix % 2 else 1
                for w2, c2 in img.items():
                    cw, s2 = canonicalize(list(word[:i]) + list(w2) + list(word[i + 1:]))
                    if cw is None:
                        continue
                    val = coeff * c2 * (sgn_prefix * s2)
                    new = out.get(cw, ring.zero) + val
                    if new:
                        out[cw] = new
                    else:
                        out.pop(cw, None)
            prefix += letter[0]
    return out


def q_apply(pres, elem):
    table = pres.q_table
    return derivation_apply(lambda g: table.get(g, {}), elem, pres.ring)


@dataclass(frozen=True)
class QSquareReport:
    passed: bool
    failures: tuple     # (generator, defect element frozen)


def q_square_check(pres):
    failures = []
    for gen in pres.gens.basis():
        val = pres.q_on_gen(gen)
        defect = q_apply(pres, val)
        if not elem_is_zero(defect):
            failures.append((gen, _freeze_elem(defect)))
    return QSquareReport(not failures, tuple(failures))


# ---------------------------------------------------------------------------
# cohomology at a point

def _monomials_of_degree(gens, degree):
    """Canonical dual words of the exact (nonpositive) total degree."""
    basis = sorted(gens.basis())
    out = []

    def rec(i, remaining, current):
        if remaining == 0:
            out.append(tuple(current))
            return
        if i == len(basis) or remaining > 0:
            return
        d = basis[i][0]
        if d >= 0:
            return
        rec(i + 1, remaining, current)
        max_mult = 1 if d % 2 else remaining // d
        m = 1
        while m <= max_mult and m * d >= remaining:
            current.extend([basis[i]] * m)
            rec(i + 1, remaining - m * d, current)
            del current[len(current) - m:]
            m += 1

    if degree == 0:
        return [()]
    rec(0, degree, [])
    return sorted(out, key=lambda w: (len(w), w))


def ce_to_complex(pres, depth):
    """Chain complex of the graded pieces in degrees -depth-1 .. 0."""
    if not isinstance(pres.ring, RatRing):
        raise ChartBase("cohomology over a chart base is not supported")
    degrees = list(range(-depth - 1, 1))
    bases = {d: _monomials_of_degree(pres.gens, d) for d in degrees}
    dims = {d: len(b) for d, b in bases.items() if b}
    space = GradedSpace.make(dims)
    index = {d: {w: i for i, w in enumerate(b)} for d, b in bases.items()}
    blocks = {}
    for d in degrees:
        if d + 1 not in dims or d not in dims:
            continue
        rows, cols = dims[d + 1], dims[d]
        mat = [[Fraction(0)] * cols for _ in range(rows)]
        for j, w in enumerate(bases[d]):
            img = q_apply(pres, {w: Fraction(1)})
            for w2, c in img.items():
                if word_degree(w2) != d + 1:
                    continue
                mat[index[d + 1][w2]][j] = c
        blocks[d] = tuple(tuple(row) for row in mat)
    diff = GradedMap.make(space, space, 1, blocks)
    return ChainComplex.make(space, diff), bases


def ce_cohomology(pres, depth):
    """Exact cohomology dimensions and representatives in degrees -depth .. 0."""
    cx, bases = ce_to_complex(pres, depth)
    from .linalg import cohomology as complex_cohomology
    raw = complex_cohomology(cx)
    out = {}
    for d in range(-depth, 1):
        if d in raw:
            dim, reps = raw[d]
            named = tuple(
                tuple((bases[d][i], c) for i, c in enumerate(vec) if c) for vec in reps)
            out[d] = (dim, named)
        else:
            out[d] = (0, ())
    return out


# ---------------------------------------------------------------------------
# pullback and quasi-isomorphism certificates

@dataclass(frozen=True)
class CEMap:
    """Algebra morphism determined by generator images (a pullback)."""

    source_pres: CEPresentation      # presentation being mapped FROM (target structure side)
    target_pres: CEPresentation      # presentation mapped INTO (source structure side)
    gen_images: tuple                # (generator of source_pres, element over target_pres gens)

    @property
    def images(self):
        return {g: dict(v) for g, v in self.gen_images}

    def apply(self, elem, ring):
        imgs = self.images
        out = {}
        for word, coeff in elem.items():
            acc = {(): ring.one}
            dead = False
            for letter in word:
                img = imgs.get(letter)
                if not img:
                    dead = True
                    break
                acc = elem_mul(acc, img)
                if not acc:
                    dead = True
                    break
            if dead:
                continue
            for w2, c2 in acc.items():
                new = out.get(w2, ring.zero) + coeff * c2
                if new:
                    out[w2] = new
                else:
                    out.pop(w2, None)
        return out


def ce_pullback(m, check=True):
    """Pullback of a morphism table: dual generators map to the dual of the
    component table, with the same factorial normalization as build_ce."""
    if check:
        rep = check_morphism(m)
        if not rep.passed:
            raise NotAMorphism("table does not satisfy the morphism identity")
    src_pres = build_ce(m.target)
    tgt_pres = build_ce(m.source)
    images = {}
    for word, vec in m.table.items():
        out_deg = word_degree(word)
        dw, sign = dual_word(word)
        if dw is None:
            continue
        norm = Fraction(sign, multiplicity_factor(word))
        for i, c in enumerate(vec):
            if not c:
                continue
            gen = (-out_deg, i)
            cur = images.setdefault(gen, {})
            val = cur.get(dw, m.ring.zero) + norm * c
            if val:
                cur[dw] = val
            else:
                cur.pop(dw, None)
    images = {g: v for g, v in images.items() if v}
    return CEMap(src_pres, tgt_pres,
                 tuple(sorted((g, _freeze_elem(v)) for g, v in images.items())))


def ce_chain_map_check(cemap):
    ring = cemap.target_pres.ring
    failures = []
    for gen in cemap.source_pres.gens.basis():
        lhs = q_apply(cemap.target_pres, cemap.apply({(gen,): ring.one}, ring))
        rhs = cemap.apply(cemap.source_pres.q_on_gen(gen), ring)
        defect = elem_add(lhs, elem_scale(-1, rhs))
        if not elem_is_zero(defect):
            failures.append((gen, _freeze_elem(defect)))
    return QSquareReport(not failures, tuple(failures))


@dataclass(frozen=True)
class QuasiIsoReport:
    passed: bool
    chain_map: bool
    dims: tuple          # (degree, dim_source_side, dim_target_side, induced_iso)


def quasi_iso_check(m, depth):
    """Compare cohomology in degrees -depth..0 and certify the induced map
    degreewise bijective."""
    cemap = ce_pullback(m)
    chain_ok = ce_chain_map_check(cemap).passed
    cx_from, bases_from = ce_to_complex(cemap.source_pres, depth)
    cx_to, bases_to = ce_to_complex(cemap.target_pres, depth)
    from .linalg import cohomology as complex_cohomology
    h_from = complex_cohomology(cx_from)
    h_to = complex_cohomology(cx_to)
    ring = cemap.target_pres.ring
    rows = []
    all_ok = chain_ok
    for d in range(-depth, 1):
        dim_f = h_from.get(d, (0, ()))[0]
        dim_t = h_to.get(d, (0, ()))[0]
        iso = dim_f == dim_t
        if iso and dim_f:
            reps_f = h_from[d][1]
            index_to = {w: i for i, w in enumerate(bases_to.get(d, []))}
            n_to = len(bases_to.get(d, []))
            prev = cx_to.differential.block(d - 1)
            cols_in = cx_to.space.dim(d - 1)
            img_cols = [tuple(prev[i][j] for i in range(n_to)) for j in range(cols_in)]
            rep_cols = [tuple(vec) for vec in h_to[d][1]]
            mapped = []
            for vec in reps_f:
                elem = {bases_from[d][i]: c for i, c in enumerate(vec) if c}
                img = cemap.apply(elem, ring)
                col = [Fraction(0)] * n_to
                for w, c in img.items():
                    col[index_to[w]] = c
                mapped.append(tuple(col))
            span = list(img_cols) + list(rep_cols)
            coeff_rows = []
            for col in mapped:
                mat = tuple(tuple(span[j][i] for j in range(len(span))) for i in range(n_to))
                coords = solve_particular(mat, col, n_to, len(span))
                if coords is None:
                    iso = False
                    break
                coeff_rows.append(coords[len(img_cols):])
            if iso:
                induced = tuple(tuple(row[i] for row in coeff_rows) for i in range(dim_t))
                iso = rank(induced, dim_t, dim_f) == dim_t
        rows.append((d, dim_f, dim_t, iso))
        all_ok = all_ok and iso
    return QuasiIsoReport(all_ok, chain_ok, tuple(rows))


# ---------------------------------------------------------------------------
# Koszul charts with the exact monomial homotopy

@dataclass(frozen=True)
class KoszulChart:
    """Odd generators against the first k coordinates, with contraction by a
    section as the differential."""

    coords: tuple
    fiber_count: int
    section: tuple      # one Poly per odd generator

    def is_euler(self):
        k = self.fiber_count
        for i, p in enumerate(self.section):
            if p != Poly.var(self.coords, self.coords[i]):
                return False
        return len(self.section) == k

    def require_euler(self):
        if not self.is_euler():
            raise NotEulerForm(
                "homotopy formulas need the section in Euler form; "
                "change frame with the tubular isomorphism first")


def koszul_iota(chart, elem):
    """Contraction with the chart's section, extended as an odd derivation."""
    vars = chart.coords
    out = {}
    for (exp, gens), coeff in elem.items():
        for pos, g in enumerate(gens):
            sign = -1 if pos % 2 else 1
            poly = chart.section[g] * Poly(vars, {exp: coeff * sign})
            rest = gens[:pos] + gens[pos + 1:]
            for e2, c2 in poly.terms.items():
                key = (e2, rest)
                new = out.get(key, Fraction(0)) + c2
                if new:
                    out[key] = new
                else:
                    out.pop(key, None)
    return out


def koszul_eta(chart, monomial):
    """Exact value of the flow homotopy on one monomial (Euler form only)."""
    chart.require_euler()
    k = chart.fiber_count
    exp, gens = monomial
    w = sum(exp[:k]) + len(gens)
    if w == 0:
        return {}
    out = {}
    for i in range(k):
        if exp[i] == 0 or i in gens:
            continue
        pos = sum(1 for g in gens if g < i)
        sign = -1 if pos % 2 else 1
        new_exp = tuple(e - 1 if j == i else e for j, e in enumerate(exp))
        new_gens = tuple(sorted(gens + (i,)))
        val = Fraction(exp[i] * sign, w)
        key = (new_exp, new_gens)
        new = out.get(key, Fraction(0)) + val
        if new:
            out[key] = new
        else:
            out.pop(key, None)
    return out


def _koszul_elem_apply(fn, elem):
    out = {}
    for key, coeff in elem.items():
        for k2, c2 in fn(key).items():
            new = out.get(k2, Fraction(0)) + coeff * c2
            if new:
                out[k2] = new
            else:
                out.pop(k2, None)
    return out


def _restrict_project(chart, monomial):
    exp, gens = monomial
    k = chart.fiber_count
    if gens or any(exp[:k]):
        return {}
    return {monomial: Fraction(1)}


def _euler_section(chart):
    return tuple(Poly.var(chart.coords, chart.coords[i]) for i in range(chart.fiber_count))


def koszul_identity_check(chart, degree_bound):
    """Exhaustive commutator identity on all monomials up to the polynomial
    degree bound: homotopy against contraction-with-Euler equals identity
    minus restriction-then-pullback."""
    chart.require_euler()
    n = len(chart.coords)
    k = chart.fiber_count
    failures = []
    exps = _exponents_up_to(n, degree_bound)
    subsets = _subsets(k)
    for exp in exps:
        for gens in subsets:
            mono = (exp, gens)
            one = {mono: Fraction(1)}
            lhs = elem_add(
                _koszul_elem_apply(lambda mm: koszul_eta(chart, mm),
                                   koszul_iota(chart, one)),
                koszul_iota(chart, _koszul_elem_apply(lambda mm: koszul_eta(chart, mm), one)))
            rhs = elem_add(one, elem_scale(-1, _restrict_project(chart, mono)))
            defect = elem_add(lhs, elem_scale(-1, rhs))
            defect = {kk: v for kk, v in defect.items() if v}
            if defect:
                failures.append((mono, tuple(sorted(defect.items()))))
    return QSquareReport(not failures, tuple(failures))


def _exponents_up_to(n, bound):
    out = []

    def rec(i, remaining, cur):
        if i == n:
            out.append(tuple(cur))
            return
        for e in range(remaining + 1):
            cur.append(e)
            rec(i + 1, remaining - e, cur)
            cur.pop()

    rec(0, bound, [])
    return out


def _subsets(k):
    out = []
    for mask in range(1 << k):
        out.append(tuple(i for i in range(k) if mask >> i & 1))
    return out


def koszul_cohomology(chart, weight_bound):
    """Cohomology of the weight-graded pieces (transverse coordinates fixed
    to zero); each weight piece is a finite complex."""
    chart.require_euler()
    k = chart.fiber_count
    out = {}
    for w in range(weight_bound + 1):
        basis = {}
        for gens in _subsets(k):
            m = len(gens)
            if m > w:
                continue
            for exp_k in _exponents_exact(k, w - m):
                exp = exp_k + (0,) * (len(chart.coords) - k)
                basis.setdefault(-m, []).append((exp, gens))
        dims = {d: len(b) for d, b in basis.items() if b}
        space = GradedSpace.make(dims)
        index = {d: {mono: i for i, mono in enumerate(b)} for d, b in basis.items()}
        blocks = {}
        for d, monos in basis.items():
            if d + 1 not in dims:
                continue
            rows, cols = dims[d + 1], dims[d]
            mat = [[Fraction(0)] * cols for _ in range(rows)]
            for j, mono in enumerate(monos):
                img = koszul_iota(chart, {mono: Fraction(1)})
                for m2, c in img.items():
                    mat[index[d + 1][m2]][j] = c
            blocks[d] = tuple(tuple(row) for row in mat)
        diff = GradedMap.make(space, space, 1, blocks)
        cx = ChainComplex.make(space, diff)
        from .linalg import cohomology as complex_cohomology
        out[w] = {d: v[0] for d, v in complex_cohomology(cx).items()}
    return out


def _exponents_exact(n, total):
    out = []

    def rec(i, remaining, cur):
        if i == n:
            if remaining == 0:
                out.append(tuple(cur))
            return
        for e in range(remaining + 1):
            cur.append(e)
            rec(i + 1, remaining - e, cur)
            cur.pop()

    rec(0, total, [])
    return out


# ---------------------------------------------------------------------------
# the weight-divided transfer homotopy and its identity

def _dual_endo_images(linear_map):
    """Generator images of the dual of a degree-homogeneous endomorphism."""
    images = {}
    space = linear_map.source
    for d in space.degrees():
        block = linear_map.block(d)
        rows = linear_map.target.dim(d + linear_map.degree)
        for i in range(rows):
            gen = (-(d + linear_map.degree), i)
            img = {}
            for j in range(space.dim(d)):
                if block[i][j]:
                    img[((-d, j),)] = block[i][j]
            if img:
                images.setdefault(gen, {})
                for w, c in img.items():
                    images[gen][w] = images[gen].get(w, Fraction(0)) + c
    return images


def _algebra_endo_apply(images, elem, ring):
    out = {}
    for word, coeff in elem.items():
        acc = {(): ring.one}
        dead = False
        for letter in word:
            img = images.get(letter)
            if not img:
                dead = True
                break
            acc = elem_mul(acc, img)
            if not acc:
                dead = True
                break
        if dead:
            continue
        for w2, c2 in acc.items():
            new = out.get(w2, ring.zero) + coeff * c2
            if new:
                out[w2] = new
            else:
                out.pop(w2, None)
    return out


@dataclass(frozen=True)
class TransferHomotopy:
    """Fiberwise homotopy operator on the dual presentation of the ambient
    structure of a transfer result."""

    pres: CEPresentation
    proj_images: tuple      # generator images of the dual of inclusion o projection
    eta_images: tuple       # generator images of the dual of the deformed homotopy
    d1_images: tuple        # generator images of the dual of the total linear part

    def _proj(self, elem):
        return _algebra_endo_apply({g: dict(v) for g, v in self.proj_images}, elem, RAT)

    def _eta_prime(self, elem):
        images = {g: dict(v) for g, v in self.eta_images}
        out = {}
        for word, coeff in elem.items():
            w = len(word)
            if w == 0:
                continue
            scaled = Fraction(1, w) * coeff
            part = derivation_apply(lambda g: images.get(g, {}), {word: scaled}, RAT)
            out = elem_add(out, part)
        return out

    def d1(self, elem):
        images = {g: dict(v) for g, v in self.d1_images}
        return derivation_apply(lambda g: images.get(g, {}), elem, RAT)

    def apply(self, elem):
        out = {}
        for word, coeff in elem.items():
            total_weight = len(word)
            for left, right, sign in coproduct(word):
                t1 = self._proj({left: Fraction(1)})
                if not t1:
                    continue
                t2 = self._eta_prime({right: Fraction(1)})
                if not t2:
                    continue
                tensor_sign = -1 if word_degree(left) % 2 else 1
                weight_div = Fraction(1, comb(total_weight, len(left)))
                term = elem_mul(t1, t2)
                out = elem_add(out, elem_scale(coeff * sign * tensor_sign * weight_div, term))
        return out


def transfer_homotopy_h(tr):
    """Assemble the weight-divided homotopy operator from a transfer result."""
    if tr.deformed_homotopy is None:
        raise MissingEtaTilde("transfer result carries no deformed homotopy")
    pres = build_ce(tr.source)
    a = tr.embedding.linear_component().compose(tr.projection_morphism.linear_component())
    proj_images = _dual_endo_images(a)
    eta_images = _dual_endo_images(tr.deformed_homotopy)
    d1_images = _dual_endo_images(tr.source.linear_part())
    freeze = lambda imgs: tuple(sorted((g, _freeze_elem(v)) for g, v in imgs.items()))
    return TransferHomotopy(pres, freeze(proj_images), freeze(eta_images), freeze(d1_images))


def heq_check(tr, weight_bound):
    """Commutator identity of the transfer homotopy on every canonical dual
    word up to the weight bound, exactly."""
    h = transfer_homotopy_h(tr)
    proj_images = {g: dict(v) for g, v in h.proj_images}
    from .words import enumerate_words
    failures = []
    basis = h.pres.gens.basis()
    for w in range(0, weight_bound + 1):
        for word in enumerate_words(basis, w):
            one = {word: Fraction(1)}
            lhs = elem_add(h.d1(h.apply(one)), h.apply(h.d1(one)))
            rhs = elem_add(one, elem_scale(-1, _algebra_endo_apply(proj_images, one, RAT)))
            defect = elem_add(lhs, elem_scale(-1, rhs))
            if not elem_is_zero(defect):
                failures.append((word, _freeze_elem(defect)))
    return QSquareReport(not failures, tuple(failures))


# ---------------------------------------------------------------------------
# bigrading audit

@dataclass(frozen=True)
class BigradingReport:
    passed: bool
    buckets: tuple      # (weight, (shift_k, shift_l), ok)


def bigrading_audit(pres):
    """Split the derivation by monomial weight and verify each weight-n part
    shifts the (cohomological + weight, minus weight) bidegree by (n, 1-n);
    the weight-1 part is the differential shift (1, 0)."""
    if not isinstance(pres.ring, RatRing):
        raise ChartBase("bigrading audit runs at a point base")
    buckets = {}
    for gen, frozen in pres.q_values:
        q_gen = gen[0]
        kl_gen = (q_gen + 1, -1)
        for word, coeff in frozen:
            if not coeff:
                continue
            n = len(word)
            q_m = word_degree(word)
            kl_m = (q_m + n, -n)
            shift = (kl_m[0] - kl_gen[0], kl_m[1] - kl_gen[1])
            buckets.setdefault(n, set()).add(shift)
    rows = []
    passed = True
    for n in sorted(buckets):
        expected = (n, 1 - n)
        shifts = buckets[n]
        ok = shifts == {expected}
        passed = passed and ok
        rows.append((n, expected, ok))
    return BigradingReport(passed, tuple(rows))
