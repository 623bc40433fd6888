"""Curved shifted L-infinity structures on finite positively graded spaces:
structure tables, relation and morphism checkers, composition, tangent
complexes, and a gauge-conjugation test generator.

Conventions.  All operations are graded symmetric of degree +1 on the
(shifted) space, stored sparsely on canonical words; the arity-0 entry is
the curvature.  The structure identity checked for every canonical word w
of arity k is

    sum over 0 <= i <= k and position subsets S of size i of
    sign(S) * op(op(w_S) join w_rest) = 0,

and a table of degree-0 components is a morphism when op-after-table equals
table-blocks-into-target for every word, with the arity-0 case reading
"linear part applied to the source curvature equals the target curvature".
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .errors import DegreeRuleViolation, NonCanonicalWord, NotClassical, NotInvertible, SpaceMismatch
from .linalg import ChainComplex, GradedMap, GradedSpace, is_quasi_iso, mat_inverse
from .poly import RAT
from .words import (
    block_partitions,
    canonicalize,
    enumerate_words,
    unshuffles,
    word_degree,
)


def _vec_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _vec_scale(c, v):
    return tuple(c * x for x in v)


def _vec_is_zero(v):
    return all(not x for x in v)


@dataclass(frozen=True)
class CurvedStructure:
    """Sparse table of graded-symmetric degree +1 operations on a graded space."""

    space: GradedSpace
    ops: tuple = ()            # tuple of (word, output_vector) pairs, sorted
    ring: object = RAT

    @staticmethod
    def make(space, ops=None, ring=RAT):
        lo, hi = space.amplitude if space.dims else (1, 1)
        if space.dims and lo < 1:
            raise DegreeRuleViolation("structure space must sit in positive degrees")
        table = {}
        for word, vec in dict(ops or {}).items():
            word = tuple(tuple(e) for e in word)
            cw, sign = canonicalize(word)
            if cw != word or sign != 1:
                raise NonCanonicalWord(f"word {word} is not canonical")
            for d, i in word:
                if not 0 <= i < space.dim(d):
                    raise DegreeRuleViolation(f"letter {(d, i)} outside the space")
            out_deg = word_degree(word) + 1
            vec = tuple(ring.coerce(x) for x in vec)
            if len(vec) != space.dim(out_deg):
                raise DegreeRuleViolation(
                    f"entry at word {word} must land in degree {out_deg} "
                    f"(dimension {space.dim(out_deg)}, got length {len(vec)})")
            if not _vec_is_zero(vec):
                table[word] = vec
        return CurvedStructure(space, tuple(sorted(table.items(), key=lambda kv: (len(kv[0]), kv[0]))), ring)

    @property
    def table(self):
        return dict(self.ops)

    def out_degree(self, word):
        return word_degree(word) + 1

    def op(self, elems):
        """Evaluate on a list of basis letters; returns (degree, vector)."""
        word, sign = canonicalize(elems)
        out_deg = sum(e[0] for e in elems) + 1
        dim = self.space.dim(out_deg)
        if word is None:
            return out_deg, tuple(self.ring.zero for _ in range(dim))
        vec = self.table.get(word)
        if vec is None:
            return out_deg, tuple(self.ring.zero for _ in range(dim))
        if sign == 1:
            return out_deg, vec
        return out_deg, _vec_scale(sign, vec)

    def curvature(self):
        return self.op(())

    def has_curvature(self):
        return not _vec_is_zero(self.curvature()[1])

    def linear_part(self):
        blocks = {}
        for d in self.space.degrees():
            rows = self.space.dim(d + 1)
            cols = self.space.dim(d)
            if not rows or not cols:
                continue
            colvecs = [self.op([(d, i)])[1] for i in range(cols)]
            blocks[d] = tuple(tuple(colvecs[j][i] for j in range(cols)) for i in range(rows))
        return GradedMap.make(self.space, self.space, 1, blocks, self.ring)

    def arities(self):
        return sorted({len(w) for w, _ in self.ops})

    def words_with_entries(self):
        return [w for w, _ in self.ops]


def structure_from_linear(space, linear, extra=None, ring=RAT):
    """Build a structure table whose arity-1 part is the given graded map."""
    ops = {}
    for d in space.degrees():
        block = linear.block(d)
        rows = space.dim(d + 1)
        for i in range(space.dim(d)):
            vec = tuple(block[r][i] for r in range(rows))
            if not _vec_is_zero(vec):
                ops[((d, i),)] = vec
    for word, vec in dict(extra or {}).items():
        ops[tuple(tuple(e) for e in word)] = vec
    return CurvedStructure.make(space, ops, ring)


@dataclass(frozen=True)
class Morphism:
    """Degree-0 table between curved structures, sparse on canonical words."""

    source: CurvedStructure
    target: CurvedStructure
    components: tuple = ()

    @staticmethod
    def make(source, target, components=None):
        ring = source.ring
        table = {}
        for word, vec in dict(components or {}).items():
            word = tuple(tuple(e) for e in word)
            cw, sign = canonicalize(word)
            if cw != word or sign != 1:
                raise NonCanonicalWord(f"word {word} is not canonical")
            if len(word) == 0:
                raise DegreeRuleViolation("morphisms have no arity-0 component")
            out_deg = word_degree(word)
            vec = tuple(ring.coerce(x) for x in vec)
            if len(vec) != target.space.dim(out_deg):
                raise DegreeRuleViolation(
                    f"component at word {word} must land in degree {out_deg}")
            if not _vec_is_zero(vec):
                table[word] = vec
        return Morphism(source, target,
                        tuple(sorted(table.items(), key=lambda kv: (len(kv[0]), kv[0]))))

    @property
    def table(self):
        return dict(self.components)

    @property
    def ring(self):
        return self.source.ring

    def apply(self, elems):
        word, sign = canonicalize(elems)
        out_deg = sum(e[0] for e in elems)
        dim = self.target.space.dim(out_deg)
        if word is None:
            return out_deg, tuple(self.ring.zero for _ in range(dim))
        vec = self.table.get(word)
        if vec is None:
            return out_deg, tuple(self.ring.zero for _ in range(dim))
        if sign == 1:
            return out_deg, vec
        return out_deg, _vec_scale(sign, vec)

    def linear_component(self):
        blocks = {}
        for d in self.source.space.degrees():
            rows = self.target.space.dim(d)
            cols = self.source.space.dim(d)
            if not rows or not cols:
                continue
            colvecs = [self.apply([(d, i)])[1] for i in range(cols)]
            blocks[d] = tuple(tuple(colvecs[j][i] for j in range(cols)) for i in range(rows))
        return GradedMap.make(self.source.space, self.target.space, 0, blocks, self.ring)

    def is_linear(self):
        return all(len(w) == 1 for w, _ in self.components)


def identity_morphism(s):
    comps = {}
    for d in s.space.degrees():
        for i in range(s.space.dim(d)):
            vec = tuple(s.ring.one if j == i else s.ring.zero for j in range(s.space.dim(d)))
            comps[((d, i),)] = vec
    return Morphism.make(s, s, comps)


def morphism_from_linear(source, target, linear):
    comps = {}
    for d in source.space.degrees():
        block = linear.block(d)
        rows = target.space.dim(d)
        for i in range(source.space.dim(d)):
            vec = tuple(block[r][i] for r in range(rows))
            if not _vec_is_zero(vec):
                comps[((d, i),)] = vec
    return Morphism.make(source, target, comps)


# ---------------------------------------------------------------------------
# shared evaluators

def _support(vec, degree):
    return [((degree, i), c) for i, c in enumerate(vec) if c]


def eval_blocks(outer, inner_apply, word, zero, out_dim):
    """Sum over position set partitions of outer(inner(B1), ..., inner(Bp)).

    `outer` maps a letter list to (degree, vector); `inner_apply` likewise.
    This is the block composition used by morphism-after-morphism and by
    structure-after-morphism evaluations.
    """
    acc = [zero] * out_dim
    k = len(word)
    for p in range(1, k + 1):
        for blocks, sign in block_partitions(word, p):
            factor_supports = []
            dead = False
            for block in blocks:
                deg, vec = inner_apply(block)
                sup = _support(vec, deg)
                if not sup:
                    dead = True
                    break
                factor_supports.append(sup)
            if dead:
                continue
            for combo in product(*factor_supports):
                letters = [z for z, _ in combo]
                coeff = None
                for _, c in combo:
                    coeff = c if coeff is None else coeff * c
                cw, s2 = canonicalize(letters)
                if cw is None:
                    continue
                deg, vec = outer(cw)
                if _vec_is_zero(vec):
                    continue
                total = sign * s2
                for i, x in enumerate(vec):
                    if x:
                        acc[i] = acc[i] + total * coeff * x
    return tuple(acc)


def eval_through_structure(outer, struct, word, zero, out_dim):
    """Sum over i and position subsets S of outer(struct(w_S) join w_rest).

    With outer = struct.op this is the structure identity defect; with outer
    a morphism table it is the op-after-table side of the morphism identity,
    curvature insertion included via the empty subset.
    """
    acc = [zero] * out_dim
    k = len(word)
    for i in range(0, k + 1):
        for left, right, sign in unshuffles(word, i):
            deg, vec = struct.op(left)
            for z, c in _support(vec, deg):
                cw, s2 = canonicalize([z] + list(right))
                if cw is None:
                    continue
                odeg, ovec = outer(cw)
                if _vec_is_zero(ovec):
                    continue
                total = sign * s2
                for idx, x in enumerate(ovec):
                    if x:
                        acc[idx] = acc[idx] + total * c * x
    return tuple(acc)


# ---------------------------------------------------------------------------
# checkers

@dataclass(frozen=True)
class CheckFailure:
    arity: int
    word: tuple
    degree: int
    defect: tuple


@dataclass(frozen=True)
class CheckReport:
    passed: bool
    failures: tuple = ()

    @property
    def first_failure(self):
        return self.failures[0] if self.failures else None


def relation_words(space):
    """All canonical words that can carry a nonzero structure identity."""
    lo, hi = space.amplitude if space.dims else (1, 0)
    basis = space.basis()
    out = [()]
    max_arity = max(hi - 1, 0)
    for k in range(1, max_arity + 1):
        for w in enumerate_words(basis, k):
            if word_degree(w) + 2 <= hi:
                out.append(w)
    return out


def check_relations(s, stop_at_first=False):
    """Exhaustive structure-identity check over all canonical words; exact."""
    failures = []
    zero = s.ring.zero
    for word in relation_words(s.space):
        out_deg = word_degree(word) + 2
        dim = s.space.dim(out_deg)
        if dim == 0:
            continue
        defect = eval_through_structure(s.op, s, word, zero, dim)
        if not _vec_is_zero(defect):
            failures.append(CheckFailure(len(word), word, out_deg, defect))
            if stop_at_first:
                break
    return CheckReport(not failures, tuple(failures))


def morphism_words(space):
    lo, hi = space.amplitude if space.dims else (1, 0)
    basis = space.basis()
    out = [()]
    for k in range(1, max(hi, 0) + 1):
        out.extend(enumerate_words(basis, k))
    return out


def check_morphism(m, stop_at_first=False):
    """Exact verification of the intertwining identity over all arities."""
    if m.source.ring != m.target.ring:
        raise SpaceMismatch("morphism endpoints use different scalar rings")
    failures = []
    zero = m.ring.zero
    for word in morphism_words(m.source.space):
        if word == ():
            out_deg = 1
            dim = m.target.space.dim(out_deg)
            lhs = eval_through_structure(m.apply, m.source, word, zero, dim)
            rhs = m.target.curvature()[1]
        else:
            out_deg = word_degree(word) + 1
            dim = m.target.space.dim(out_deg)
            if dim == 0:
                continue
            lhs = eval_through_structure(m.apply, m.source, word, zero, dim)
            rhs = eval_blocks(m.target.op, m.apply, word, zero, dim)
        defect = tuple(a - b for a, b in zip(lhs, rhs))
        if not _vec_is_zero(defect):
            failures.append(CheckFailure(len(word), word, out_deg, defect))
            if stop_at_first:
                break
    return CheckReport(not failures, tuple(failures))


def compose(m2, m1):
    """Block composition of morphism tables; identity tables are the unit."""
    if not m1.target.space.same_dims(m2.source.space):
        raise SpaceMismatch("composition endpoints do not match")
    zero = m1.ring.zero
    comps = {}
    hi = m1.source.space.amplitude[1] if m1.source.space.dims else 0
    for k in range(1, hi + 1):
        for word in enumerate_words(m1.source.space.basis(), k):
            out_deg = word_degree(word)
            dim = m2.target.space.dim(out_deg)
            if dim == 0:
                continue
            vec = eval_blocks(m2.apply, m1.apply, word, zero, dim)
            if not _vec_is_zero(vec):
                comps[word] = vec
    return Morphism.make(m1.source, m2.target, comps)


def morphism_equal(a, b):
    return a.table == b.table


def is_identity_table(m):
    ident = identity_morphism(m.source)
    return m.table == ident.table


# ---------------------------------------------------------------------------
# tangent complexes and the etale certificate

def tangent_complex(s):
    """Tangent complex at the (classical) point: the space with its linear part."""
    if s.has_curvature():
        raise NotClassical("curvature does not vanish")
    return ChainComplex.make(s.space, s.linear_part())


@dataclass(frozen=True)
class EtaleReport:
    etale: bool
    cone_dims: tuple
    source_dims: tuple
    target_dims: tuple


def etale_pair(m):
    """Quasi-isomorphism certificate for the linear part on tangent complexes."""
    cx_s = tangent_complex(m.source)
    cx_t = tangent_complex(m.target)
    f = m.linear_component()
    ok, cone_dims = is_quasi_iso(f, cx_s, cx_t)
    from .linalg import cohomology
    hs = {k: v[0] for k, v in cohomology(cx_s).items()}
    ht = {k: v[0] for k, v in cohomology(cx_t).items()}
    return EtaleReport(ok, tuple(sorted(cone_dims.items())),
                       tuple(sorted(hs.items())), tuple(sorted(ht.items())))


# ---------------------------------------------------------------------------
# coalgebra-level word calculus (conjugation and the deformed projection)

def morphism_image_word(apply_fn, word):
    """Image of a word under the coalgebra morphism induced by a component table."""
    if len(word) == 0:
        return {(): 1}
    out = {}
    for p in range(1, len(word) + 1):
        for blocks, sign in block_partitions(word, p):
            factor_supports = []
            dead = False
            for block in blocks:
                deg, vec = apply_fn(block)
                sup = _support(vec, deg)
                if not sup:
                    dead = True
                    break
                factor_supports.append(sup)
            if dead:
                continue
            for combo in product(*factor_supports):
                letters = [z for z, _ in combo]
                coeff = None
                for _, c in combo:
                    coeff = c if coeff is None else coeff * c
                cw, s2 = canonicalize(letters)
                if cw is None:
                    continue
                total = sign * s2
                out[cw] = out.get(cw, 0) + total * coeff
                if not out[cw]:
                    del out[cw]
    return out


def coderivation_image_word(struct, word):
    """Image of a word under the coderivation of a structure table."""
    out = {}
    for i in range(0, len(word) + 1):
        for left, right, sign in unshuffles(word, i):
            deg, vec = struct.op(left)
            for z, c in _support(vec, deg):
                cw, s2 = canonicalize([z] + list(right))
                if cw is None:
                    continue
                total = sign * s2
                out[cw] = out.get(cw, 0) + total * c
                if not out[cw]:
                    del out[cw]
    return out


def wordsum_apply(fn, wordsum):
    out = {}
    for word, coeff in wordsum.items():
        for w2, c2 in fn(word).items():
            out[w2] = out.get(w2, 0) + coeff * c2
            if not out[w2]:
                del out[w2]
    return out


def invert_morphism_table(psi):
    """Inverse of a component table with invertible linear part (recursively)."""
    space = psi.source.space
    ring = psi.ring
    inv_blocks = {}
    linear = psi.linear_component()
    for d in space.degrees():
        n = space.dim(d)
        block = linear.block(d)
        try:
            inv_blocks[d] = mat_inverse(block, n)
        except NotInvertible as exc:
            raise NotInvertible(f"linear part not invertible in degree {d}") from exc
    inv1 = GradedMap.make(space, space, 0, inv_blocks, ring)
    zero = ring.zero
    comps = {}
    for d in space.degrees():
        blk = inv1.block(d)
        for i in range(space.dim(d)):
            vec = tuple(blk[r][i] for r in range(space.dim(d)))
            if not _vec_is_zero(vec):
                comps[((d, i),)] = vec

    def rho_apply(elems):
        word, sign = canonicalize(elems)
        out_deg = sum(e[0] for e in elems)
        dim = space.dim(out_deg)
        if word is None:
            return out_deg, tuple(zero for _ in range(dim))
        vec = comps.get(word)
        if vec is None:
            return out_deg, tuple(zero for _ in range(dim))
        return out_deg, (_vec_scale(sign, vec) if sign != 1 else vec)

    hi = space.amplitude[1] if space.dims else 0
    for k in range(2, hi + 1):
        for word in enumerate_words(space.basis(), k):
            out_deg = word_degree(word)
            dim = space.dim(out_deg)
            if dim == 0:
                continue
            acc = [zero] * dim
            for p in range(2, k + 1):
                for blocks, sign in block_partitions(word, p):
                    factor_supports = []
                    dead = False
                    for block in blocks:
                        deg, vec = rho_apply(block)
                        sup = _support(vec, deg)
                        if not sup:
                            dead = True
                            break
                        factor_supports.append(sup)
                    if dead:
                        continue
                    for combo in product(*factor_supports):
                        letters = [z for z, _ in combo]
                        coeff = None
                        for _, c in combo:
                            coeff = c if coeff is None else coeff * c
                        cw, s2 = canonicalize(letters)
                        if cw is None:
                            continue
                        pdeg, pvec = psi.apply(cw)
                        if _vec_is_zero(pvec):
                            continue
                        total = sign * s2
                        for idx, x in enumerate(pvec):
                            if x:
                                acc[idx] = acc[idx] + total * coeff * x
            bdeg, back = inv1.apply(out_deg, acc)
            vec = tuple(-x for x in back)
            if not _vec_is_zero(vec):
                comps[word] = vec
    return comps


def gauge_conjugate(s, psi_components):
    """Conjugate the structure by the coalgebra automorphism of the given table.

    Returns (new_structure, psi) where psi is the morphism (space, new) ->
    (space, old); the new table always satisfies the structure identities.
    """
    probe = Morphism.make(s, s, psi_components)
    inv_comps = invert_morphism_table(probe)

    space = s.space
    ring = s.ring
    zero = ring.zero

    def psi_apply(elems):
        return probe.apply(elems)

    def rho_apply(elems):
        word, sign = canonicalize(elems)
        out_deg = sum(e[0] for e in elems)
        dim = space.dim(out_deg)
        if word is None:
            return out_deg, tuple(zero for _ in range(dim))
        vec = inv_comps.get(tuple(word))
        if vec is None:
            return out_deg, tuple(zero for _ in range(dim))
        return out_deg, (_vec_scale(sign, vec) if sign != 1 else vec)

    new_ops = {}
    hi = space.amplitude[1] if space.dims else 0
    words = [()]
    for k in range(1, max(hi - 1, 0) + 1):
        words.extend(w for w in enumerate_words(space.basis(), k)
                     if word_degree(w) + 1 <= hi)
    for word in words:
        s1 = morphism_image_word(psi_apply, word)
        s2 = wordsum_apply(lambda w: coderivation_image_word(s, w), s1)
        s3 = wordsum_apply(lambda w: morphism_image_word(rho_apply, w), s2)
        out_deg = word_degree(word) + 1
        dim = space.dim(out_deg)
        vec = [zero] * dim
        for w2, c2 in s3.items():
            if len(w2) == 1 and w2[0][0] == out_deg:
                vec[w2[0][1]] = vec[w2[0][1]] + c2 * ring.one
        vec = tuple(vec)
        if not _vec_is_zero(vec):
            new_ops[word] = vec
    new_struct = CurvedStructure.make(space, new_ops, ring)
    psi = Morphism.make(new_struct, s, psi_components)
    return new_struct, psi
