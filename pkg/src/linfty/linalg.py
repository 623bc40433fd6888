"""Graded vector spaces, graded linear maps, cochain complexes, and the exact
linear-algebra kernel (row reduction, kernels, splittings, cohomology).

All rank and kernel questions are answered over the rationals only; matrices
with polynomial entries must be evaluated at a point first.  Row reduction
uses the leftmost-pivot convention throughout, so every splitting and every
representative choice is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    NotAComplex,
    NotInjective,
    NotInvertible,
    NotSurjective,
    PolynomialEntries,
    SpaceMismatch,
)
from .poly import RAT, RatRing


# ---------------------------------------------------------------------------
# plain matrix helpers (tuples of row tuples; explicit shapes survive 0-dim)

def zeros(rows, cols, zero=Fraction(0)):
    return tuple(tuple(zero for _ in range(cols)) for _ in range(rows))


def identity(n, one=Fraction(1), zero=Fraction(0)):
    return tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))


def mat_mul(a, b, rows, inner, cols, zero=Fraction(0)):
    return tuple(
        tuple(sum((a[i][k] * b[k][j] for k in range(inner)), zero) for j in range(cols))
        for i in range(rows)
    )


def mat_vec(a, v, rows, cols, zero=Fraction(0)):
    return tuple(sum((a[i][j] * v[j] for j in range(cols)), zero) for i in range(rows))


def mat_add(a, b):
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_sub(a, b):
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(c, a):
    return tuple(tuple(c * x for x in row) for row in a)


def mat_is_zero(a):
    return all(not x for row in a for x in row)


def transpose(a, rows, cols):
    return tuple(tuple(a[i][j] for i in range(rows)) for j in range(cols))


def rref(m, rows, cols):
    """Reduced row echelon form with leftmost pivots; returns (R, pivot columns)."""
    r = [list(row) for row in m]
    pivots = []
    lead = 0
    for col in range(cols):
        pivot_row = None
        for i in range(lead, rows):
            if r[i][col] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        r[lead], r[pivot_row] = r[pivot_row], r[lead]
        inv = Fraction(1) / r[lead][col]
        r[lead] = [x * inv for x in r[lead]]
        for i in range(rows):
            if i != lead and r[i][col] != 0:
                c = r[i][col]
                r[i] = [x - c * y for x, y in zip(r[i], r[lead])]
        pivots.append(col)
        lead += 1
        if lead == rows:
            break
    return tuple(tuple(row) for row in r), tuple(pivots)


def rref_with_transform(m, rows, cols):
    """Row reduce m while tracking the row operations; returns (R, pivots, E)
    with E*m = R and E invertible.  Pivots are chosen only inside m's columns,
    so the transform rows realize the leftmost-pivot splitting convention."""
    aug = [list(row) + [Fraction(1) if i == j else Fraction(0) for j in range(rows)]
           for i, row in enumerate(m)]
    pivots = []
    lead = 0
    for col in range(cols):
        pivot_row = None
        for i in range(lead, rows):
            if aug[i][col] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        aug[lead], aug[pivot_row] = aug[pivot_row], aug[lead]
        inv = Fraction(1) / aug[lead][col]
        aug[lead] = [x * inv for x in aug[lead]]
        for i in range(rows):
            if i != lead and aug[i][col] != 0:
                c = aug[i][col]
                aug[i] = [x - c * y for x, y in zip(aug[i], aug[lead])]
        pivots.append(col)
        lead += 1
        if lead == rows:
            break
    r = tuple(tuple(row[:cols]) for row in aug)
    e = tuple(tuple(row[cols:]) for row in aug)
    return r, tuple(pivots), e


def rank(m, rows, cols):
    return len(rref(m, rows, cols)[1])


def kernel_basis(m, rows, cols):
    """Basis of the null space; deterministic via the leftmost-pivot convention."""
    red, pivots = rref(m, rows, cols)
    pivot_set = set(pivots)
    free = [j for j in range(cols) if j not in pivot_set]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -red[i][f]
        basis.append(tuple(v))
    return tuple(basis)


def solve_particular(m, b, rows, cols):
    """One solution of m*x = b with free variables set to zero, or None."""
    aug = [list(row) + [bv] for row, bv in zip(m, b)]
    if rows == 0:
        return tuple(Fraction(0) for _ in range(cols))
    red, pivots = rref(aug, rows, cols + 1)
    if cols in pivots:
        return None
    x = [Fraction(0)] * cols
    for i, p in enumerate(pivots):
        x[p] = red[i][cols]
    return tuple(x)


def mat_inverse(m, n):
    red, pivots, e = rref_with_transform(m, n, n)
    if len(pivots) != n:
        raise NotInvertible(f"matrix of size {n} has rank {len(pivots)}")
    return e


def column_span_coords(basis_cols, v, dim):
    """Coordinates of v in the given column list, or None if outside the span."""
    cols = len(basis_cols)
    m = tuple(tuple(basis_cols[j][i] for j in range(cols)) for i in range(dim))
    return solve_particular(m, v, dim, cols)


def extend_to_basis(inside, candidates, dim):
    """Greedily extend the column list `inside` by candidates that raise the rank.

    Returns the indices of the chosen candidates (leftmost-first convention).
    """
    chosen = []
    current = [list(c) for c in inside]

    def span_rank(cols):
        if not cols:
            return 0
        m = tuple(tuple(col[i] for col in cols) for i in range(dim))
        return rank(m, dim, len(cols))

    r = span_rank(current)
    for idx, cand in enumerate(candidates):
        trial = current + [list(cand)]
        if span_rank(trial) > r:
            chosen.append(idx)
            current = trial
            r += 1
    return tuple(chosen)


# ---------------------------------------------------------------------------
# graded spaces and maps

@dataclass(frozen=True)
class GradedSpace:
    """Finite-dimensional graded vector space with named basis per degree."""

    dims: tuple = ()          # tuple of (degree, dim) pairs, sorted, dim > 0
    labels: tuple = ()        # tuple of (degree, (name, ...)) pairs, same keys

    @staticmethod
    def make(dims, labels=None):
        dims = {int(d): int(n) for d, n in dict(dims).items() if int(n) != 0}
        for d, n in dims.items():
            if n < 0:
                raise ValueError(f"negative dimension in degree {d}")
        labels = dict(labels or {})
        lab = {}
        for d, n in dims.items():
            names = tuple(labels.get(d, ())) or tuple(f"e{d}_{i}" for i in range(n))
            if len(names) != n:
                raise ValueError(f"labels in degree {d} have wrong length")
            lab[d] = tuple(names)
        key = tuple(sorted(dims.items()))
        return GradedSpace(key, tuple((d, lab[d]) for d, _ in key))

    def dim(self, d):
        return dict(self.dims).get(d, 0)

    def degrees(self):
        return tuple(d for d, _ in self.dims)

    @property
    def total_dim(self):
        return sum(n for _, n in self.dims)

    @property
    def amplitude(self):
        if not self.dims:
            return (0, 0)
        ds = self.degrees()
        return (ds[0], ds[-1])

    def basis(self, d=None):
        if d is not None:
            return tuple((d, i) for i in range(self.dim(d)))
        out = []
        for deg, n in self.dims:
            out.extend((deg, i) for i in range(n))
        return tuple(out)

    def label(self, elem):
        d, i = elem
        return dict(self.labels)[d][i]

    def same_dims(self, other):
        return self.dims == other.dims


@dataclass(frozen=True)
class GradedMap:
    """Degree-homogeneous linear map stored as one matrix block per source degree.

    The block at source degree k has shape (dim target(k+degree), dim source(k));
    missing blocks are zero.  Entries are Fractions or Polys depending on ring.
    """

    source: GradedSpace
    target: GradedSpace
    degree: int
    blocks: tuple = ()        # tuple of (source_degree, matrix) pairs
    ring: object = RAT

    @staticmethod
    def make(source, target, degree, blocks=None, ring=RAT):
        clean = []
        for k, mat in sorted(dict(blocks or {}).items()):
            rows, cols = target.dim(k + degree), source.dim(k)
            mat = tuple(tuple(ring.coerce(x) for x in row) for row in mat)
            if len(mat) != rows or any(len(r) != cols for r in mat):
                raise SpaceMismatch(
                    f"block at source degree {k} has shape "
                    f"{(len(mat), len(mat[0]) if mat else 0)}, expected {(rows, cols)}")
            if rows and cols and not mat_is_zero(mat):
                clean.append((k, mat))
        return GradedMap(source, target, degree, tuple(clean), ring)

    @staticmethod
    def zero_map(source, target, degree, ring=RAT):
        return GradedMap.make(source, target, degree, {}, ring)

    @staticmethod
    def identity_map(space, ring=RAT):
        blocks = {d: identity(space.dim(d), ring.one, ring.zero) for d in space.degrees()}
        return GradedMap.make(space, space, 0, blocks, ring)

    def block(self, k):
        rows, cols = self.target.dim(k + self.degree), self.source.dim(k)
        for kk, mat in self.blocks:
            if kk == k:
                return mat
        return zeros(rows, cols, self.ring.zero)

    def entries_rational(self):
        return isinstance(self.ring, RatRing)

    def require_rational(self, what="operation"):
        if not self.entries_rational():
            raise PolynomialEntries(f"{what} requires rational entries; evaluate at a point first")

    def compose(self, other):
        """self after other."""
        if not other.target.same_dims(self.source):
            raise SpaceMismatch("composition spaces do not match")
        deg = self.degree + other.degree
        blocks = {}
        for k in other.source.degrees():
            mid = k + other.degree
            rows = self.target.dim(mid + self.degree)
            inner = self.source.dim(mid)
            cols = other.source.dim(k)
            if rows and cols:
                blocks[k] = mat_mul(self.block(mid), other.block(k), rows, inner, cols,
                                    self.ring.zero)
        return GradedMap.make(other.source, self.target, deg, blocks, self.ring)

    def add(self, other):
        blocks = {}
        for k in set(self.source.degrees()):
            blocks[k] = mat_add(self.block(k), other.block(k))
        return GradedMap.make(self.source, self.target, self.degree, blocks, self.ring)

    def sub(self, other):
        blocks = {}
        for k in set(self.source.degrees()):
            blocks[k] = mat_sub(self.block(k), other.block(k))
        return GradedMap.make(self.source, self.target, self.degree, blocks, self.ring)

    def scale(self, c):
        return GradedMap.make(
            self.source, self.target, self.degree,
            {k: mat_scale(self.ring.coerce(c), m) for k, m in self.blocks}, self.ring)

    def is_zero(self):
        return not self.blocks

    def apply(self, degree, vec):
        """Apply to a vector living in one source degree; returns (degree, vector)."""
        rows, cols = self.target.dim(degree + self.degree), self.source.dim(degree)
        return degree + self.degree, mat_vec(self.block(degree), tuple(vec), rows, cols,
                                             self.ring.zero)

    def apply_elem(self, elem):
        """Image of a single basis element as a column vector with its degree."""
        d, i = elem
        cols = self.source.dim(d)
        vec = tuple(self.ring.one if j == i else self.ring.zero for j in range(cols))
        return self.apply(d, vec)


def map_equal(a, b):
    if a.degree != b.degree:
        return False
    for k in set(a.source.degrees()) | set(b.source.degrees()):
        if a.block(k) != b.block(k):
            return False
    return True


# ---------------------------------------------------------------------------
# complexes and cohomology

@dataclass(frozen=True)
class ChainComplex:
    """Graded space with a square-zero differential of degree +1 (checked)."""

    space: GradedSpace
    differential: GradedMap

    @staticmethod
    def make(space, differential):
        if differential.degree != 1:
            raise NotAComplex("differential must have degree +1")
        if not differential.source.same_dims(space) or not differential.target.same_dims(space):
            raise SpaceMismatch("differential not an endomorphism of the space")
        square = differential.compose(differential)
        if not square.is_zero():
            raise NotAComplex("differential does not square to zero")
        return ChainComplex(space, differential)


def cohomology(cx):
    """Exact cohomology of a rational complex.

    Returns {degree: (dimension, representatives)} for every degree in the
    amplitude; representatives are kernel vectors chosen by the leftmost
    convention among kernel basis vectors not already in the image.
    """
    d = cx.differential
    d.require_rational("cohomology")
    space = cx.space
    out = {}
    for deg in space.degrees():
        n = space.dim(deg)
        dn = d.block(deg)
        rows_out = space.dim(deg + 1)
        ker = kernel_basis(dn, rows_out, n)
        prev = d.block(deg - 1)
        cols_in = space.dim(deg - 1)
        img_rank = rank(prev, n, cols_in) if n and cols_in else 0
        hdim = len(ker) - img_rank
        img_cols = [tuple(prev[i][j] for i in range(n)) for j in range(cols_in)]
        chosen = extend_to_basis(img_cols, ker, n)
        reps = tuple(ker[i] for i in chosen)
        out[deg] = (hdim, reps)
        if len(reps) != hdim:
            raise AssertionError("representative extraction disagrees with rank-nullity")
    return out


def mapping_cone(f, cx_source, cx_target):
    """Cone of a degree-0 chain map f: source -> target.

    Cone degree k holds target^k and source^(k+1); acyclicity of the cone is
    equivalent to f being a quasi-isomorphism.
    """
    ds, dt = cx_source.differential, cx_target.differential
    degs = sorted(set(
        list(cx_source.space.degrees()) + [d - 1 for d in cx_source.space.degrees()]
        + list(cx_target.space.degrees())))
    dims = {}
    for k in degs:
        n = cx_target.space.dim(k) + cx_source.space.dim(k + 1)
        if n:
            dims[k] = n
    cone_space = GradedSpace.make(dims)
    blocks = {}
    for k in cone_space.degrees():
        bt, bs = cx_target.space.dim(k), cx_source.space.dim(k + 1)
        rows_t, rows_s = cx_target.space.dim(k + 1), cx_source.space.dim(k + 2)
        rows, cols = rows_t + rows_s, bt + bs
        if not rows or not cols:
            continue
        dtk = dt.block(k)
        fk = f.block(k + 1)
        dsk = ds.block(k + 1)
        mat = []
        for i in range(rows_t):
            row = [dtk[i][j] for j in range(bt)]
            row += [fk[i][j] for j in range(bs)]
            mat.append(tuple(Fraction(x) for x in row))
        for i in range(rows_s):
            row = [Fraction(0)] * bt
            row += [-dsk[i][j] for j in range(bs)]
            mat.append(tuple(row))
        blocks[k] = tuple(mat)
    diff = GradedMap.make(cone_space, cone_space, 1, blocks)
    return ChainComplex.make(cone_space, diff)


def is_quasi_iso(f, cx_source, cx_target):
    cone = mapping_cone(f, cx_source, cx_target)
    h = cohomology(cone)
    return all(dim == 0 for dim, _ in h.values()), {k: v[0] for k, v in h.items()}


# ---------------------------------------------------------------------------
# splittings and kernels

def split_epi_section(m):
    """Right inverse of a degreewise surjective rational map (first-pivot choice)."""
    m.require_rational("split_epi_section")
    blocks = {}
    for k in m.source.degrees():
        rows, cols = m.target.dim(k + m.degree), m.source.dim(k)
        if rows == 0:
            continue
        mat = m.block(k)
        red, pivots, e = rref_with_transform(mat, rows, cols)
        if len(pivots) != rows:
            raise NotSurjective(k, rows - len(pivots))
        sec = [[Fraction(0)] * rows for _ in range(cols)]
        for i, p in enumerate(pivots):
            for j in range(rows):
                sec[p][j] = e[i][j]
        blocks[k + m.degree] = tuple(tuple(row) for row in sec)
    out_degrees = {k + m.degree for k in m.source.degrees() if m.target.dim(k + m.degree)}
    for d in m.target.degrees():
        if d not in out_degrees and m.target.dim(d):
            raise NotSurjective(d - m.degree, m.target.dim(d))
    return GradedMap.make(m.target, m.source, -m.degree, blocks)


def split_mono_retraction(m):
    """Left inverse of a degreewise injective rational map (leftmost-pivot complement)."""
    m.require_rational("split_mono_retraction")
    blocks = {}
    for k in set(m.source.degrees()) | {d - m.degree for d in m.target.degrees()}:
        rows, cols = m.target.dim(k + m.degree), m.source.dim(k)
        if cols == 0:
            continue
        mat = m.block(k)
        red, pivots, e = rref_with_transform(mat, rows, cols)
        if len(pivots) != cols:
            raise NotInjective(k)
        blocks[k + m.degree] = tuple(e[i] for i in range(cols))
    return GradedMap.make(m.target, m.source, -m.degree, blocks)


def kernel_subspace(m):
    """Kernel of a rational graded map, with its inclusion.

    Returns (space, inclusion, basis_vectors) where basis_vectors[degree] is
    the tuple of kernel basis columns inside the source space.
    """
    m.require_rational("kernel_subspace")
    dims = {}
    vectors = {}
    for k in m.source.degrees():
        rows, cols = m.target.dim(k + m.degree), m.source.dim(k)
        basis = kernel_basis(m.block(k), rows, cols)
        if basis:
            dims[k] = len(basis)
            vectors[k] = basis
    labels = {k: tuple(f"k{k}_{i}" for i in range(n)) for k, n in dims.items()}
    space = GradedSpace.make(dims, labels)
    blocks = {}
    for k, basis in vectors.items():
        cols = len(basis)
        rows = m.source.dim(k)
        blocks[k] = tuple(tuple(basis[j][i] for j in range(cols)) for i in range(rows))
    incl = GradedMap.make(space, m.source, 0, blocks)
    return space, incl, vectors
