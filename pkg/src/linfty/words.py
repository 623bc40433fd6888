"""Koszul-sign combinatorics: canonical graded-symmetric words, unshuffles,
block partitions, and the symmetric-coalgebra coproduct.

A basis element is a (degree, index) pair; a word is a tuple of basis
elements sorted by that pair.  Swapping two adjacent letters of degrees p
and q costs (-1)^(p*q).  A word containing a repeated odd-degree letter is
zero over the rationals, so canonicalization reports it as such.

Unshuffles and partitions enumerate position subsets and position set
partitions, one entry per subset or partition.  With repeated even letters
this lists equal (left, right) splits as many times as positions realize
them, which is exactly the multiplicity the structure identities need.
"""

from __future__ import annotations

from itertools import combinations, combinations_with_replacement


def swap_sign(p, q):
    return -1 if (p % 2) and (q % 2) else 1


def canonicalize(elems):
    """Sort letters, returning (word, sign), or (None, 0) for an odd square."""
    elems = list(elems)
    sign = 1
    # insertion sort; adjacent transpositions accumulate Koszul signs
    for i in range(1, len(elems)):
        j = i
        while j > 0 and elems[j - 1] > elems[j]:
            sign *= swap_sign(elems[j - 1][0], elems[j][0])
            elems[j - 1], elems[j] = elems[j], elems[j - 1]
            j -= 1
    for a, b in zip(elems, elems[1:]):
        if a == b and a[0] % 2:
            return None, 0
    return tuple(elems), sign


def is_canonical(elems):
    word, sign = canonicalize(elems)
    return word == tuple(elems) and sign == 1


def word_degree(word):
    return sum(e[0] for e in word)


def extraction_sign(word, positions):
    """Koszul sign of pulling the letters at the given positions to the front."""
    chosen = set(positions)
    sign = 1
    for s in positions:
        for t in range(s):
            if t not in chosen:
                sign *= swap_sign(word[s][0], word[t][0])
    return sign


def unshuffles(word, i):
    """All splits of the word into an i-letter front block and its complement.

    Yields (left, right, sign), one entry per position subset; both parts
    stay canonically sorted because subsequences of a sorted word are sorted.
    """
    k = len(word)
    if not 0 <= i <= k:
        raise ValueError(f"block size {i} out of range for word of length {k}")
    out = []
    for positions in combinations(range(k), i):
        chosen = set(positions)
        left = tuple(word[p] for p in positions)
        right = tuple(word[p] for p in range(k) if p not in chosen)
        out.append((left, right, extraction_sign(word, positions)))
    return out


def _set_partitions(k, p):
    """Set partitions of range(k) into exactly p blocks, ordered by first appearance."""
    if p <= 0 or p > k:
        return
    blocks = []

    def rec(i):
        if i == k:
            if len(blocks) == p:
                yield tuple(tuple(b) for b in blocks)
            return
        if len(blocks) + (k - i - 1) >= p:
            for b in blocks:
                b.append(i)
                yield from rec(i + 1)
                b.pop()
        if len(blocks) < p:
            blocks.append([i])
            yield from rec(i + 1)
            blocks.pop()

    yield from rec(0)


def perm_sign(word, order):
    """Koszul sign of rearranging the word into the given position order."""
    sign = 1
    for a in range(len(order)):
        for b in range(a + 1, len(order)):
            if order[a] > order[b]:
                sign *= swap_sign(word[order[a]][0], word[order[b]][0])
    return sign


def block_partitions(word, p):
    """Partitions of the word's positions into p unordered nonempty blocks.

    Yields (blocks, sign): blocks are canonical subwords ordered by first
    appearance, and sign is the Koszul sign of rearranging the word into the
    concatenation of those blocks.
    """
    k = len(word)
    if not 1 <= p <= k:
        raise ValueError(f"block count {p} out of range for word of length {k}")
    out = []
    for partition in _set_partitions(k, p):
        order = [pos for block in partition for pos in block]
        sign = perm_sign(word, order)
        blocks = tuple(tuple(word[pos] for pos in block) for block in partition)
        out.append((blocks, sign))
    return out


def coproduct(word):
    """Full unshuffle coproduct, including the two counit terms."""
    out = []
    for i in range(len(word) + 1):
        out.extend(unshuffles(word, i))
    return out


def enumerate_words(basis, arity):
    """Canonical words of the given arity over a sorted basis (odd squares skipped)."""
    basis = sorted(basis)
    out = []
    for combo in combinations_with_replacement(basis, arity):
        ok = True
        for a, b in zip(combo, combo[1:]):
            if a == b and a[0] % 2:
                ok = False
                break
        if ok:
            out.append(tuple(combo))
    return out


def enumerate_words_up_to_degree(basis, arity, max_degree):
    return [w for w in enumerate_words(basis, arity) if word_degree(w) <= max_degree]
