"""Exact scalars: arbitrary-precision rationals and sparse multivariate polynomials.

Rationals are fractions.Fraction throughout (always in lowest terms with a
positive denominator, matching the document encoding "p/q", or "p" for
integers).  Polynomials are sparse maps from exponent vectors to rational
coefficients over a fixed ordered tuple of named coordinates; zero
coefficients are never stored.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import UnknownVariable


def parse_rational(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UnknownVariable(f"bad rational literal {text!r}") from exc


def format_rational(q):
    return str(Fraction(q))


class Poly:
    """Sparse polynomial with Fraction coefficients over named coordinates.

    All arithmetic is exact.  Two polynomials interoperate only when they
    share the same coordinate tuple; ints and Fractions lift to constants.
    """

    __slots__ = ("vars", "terms")

    def __init__(self, vars, terms):
        self.vars = tuple(vars)
        clean = {}
        width = len(self.vars)
        for exp, coef in terms.items():
            coef = Fraction(coef)
            if coef == 0:
                continue
            exp = tuple(int(e) for e in exp)
            if len(exp) != width:
                raise ValueError(f"exponent {exp} has wrong width for vars {self.vars}")
            clean[exp] = coef
        self.terms = clean

    @classmethod
    def zero(cls, vars):
        return cls(vars, {})

    @classmethod
    def const(cls, vars, value):
        value = Fraction(value)
        if value == 0:
            return cls.zero(vars)
        return cls(vars, {(0,) * len(tuple(vars)): value})

    @classmethod
    def var(cls, vars, name):
        vars = tuple(vars)
        if name not in vars:
            raise UnknownVariable(f"unknown coordinate {name!r}")
        exp = tuple(1 if v == name else 0 for v in vars)
        return cls(vars, {exp: Fraction(1)})

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.vars != self.vars:
                raise ValueError(f"coordinate mismatch: {self.vars} vs {other.vars}")
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(self.vars, other)
        return NotImplemented

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(self.vars, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    __hash__ = None

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms = dict(self.terms)
        for exp, coef in other.terms.items():
            new = terms.get(exp, Fraction(0)) + coef
            if new == 0:
                terms.pop(exp, None)
            else:
                terms[exp] = new
        return Poly(self.vars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exp = tuple(a + b for a, b in zip(e1, e2))
                new = terms.get(exp, Fraction(0)) + c1 * c2
                if new == 0:
                    terms.pop(exp, None)
                else:
                    terms[exp] = new
        return Poly(self.vars, terms)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        result = Poly.const(self.vars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def degree(self):
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    @property
    def is_constant(self):
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self):
        return self.terms.get((0,) * len(self.vars), Fraction(0))

    def partial(self, name):
        if name not in self.vars:
            raise UnknownVariable(f"unknown coordinate {name!r}")
        i = self.vars.index(name)
        terms = {}
        for exp, coef in self.terms.items():
            if exp[i] == 0:
                continue
            new_exp = exp[:i] + (exp[i] - 1,) + exp[i + 1:]
            terms[new_exp] = terms.get(new_exp, Fraction(0)) + coef * exp[i]
        return Poly(self.vars, terms)

    def eval(self, point):
        for v in self.vars:
            if v not in point:
                raise UnknownVariable(f"point does not assign coordinate {v!r}")
        total = Fraction(0)
        for exp, coef in self.terms.items():
            val = coef
            for v, e in zip(self.vars, exp):
                if e:
                    val *= Fraction(point[v]) ** e
            total += val
        return total

    def subs(self, assign, target_vars):
        """Substitute a polynomial for every coordinate; result lives over target_vars."""
        target_vars = tuple(target_vars)
        for v in self.vars:
            if v not in assign:
                raise UnknownVariable(f"substitution does not assign coordinate {v!r}")
        total = Poly.zero(target_vars)
        for exp, coef in self.terms.items():
            term = Poly.const(target_vars, coef)
            for v, e in zip(self.vars, exp):
                if e:
                    term = term * (assign[v] ** e)
            total = total + term
        return total

    def sorted_terms(self):
        return sorted(self.terms.items())

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exp, coef in self.sorted_terms():
            factors = [format_rational(coef)]
            for v, e in zip(self.vars, exp):
                if e == 1:
                    factors.append(v)
                elif e > 1:
                    factors.append(f"{v}^{e}")
            parts.append("*".join(factors))
        return " + ".join(parts)

    __repr__ = __str__


def poly_eval(p, point):
    return p.eval(point)


def jacobian(entries, point):
    """Matrix of partial derivatives of a polynomial vector, evaluated at a point.

    Rows index the entries, columns the shared coordinates.
    """
    entries = list(entries)
    if not entries:
        return ()
    vars = entries[0].vars
    rows = []
    for p in entries:
        if p.vars != vars:
            raise ValueError("jacobian entries must share coordinates")
        rows.append(tuple(p.partial(v).eval(point) for v in vars))
    return tuple(rows)


class RatRing:
    """Scalar ring tag for exact rationals."""

    is_rational = True

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def coerce(self, value):
        return Fraction(value)

    def __eq__(self, other):
        return isinstance(other, RatRing)

    __hash__ = None

    def __repr__(self):
        return "RatRing()"


class PolyRing:
    """Scalar ring tag for polynomials over a fixed coordinate tuple."""

    is_rational = False

    def __init__(self, vars):
        self.vars = tuple(vars)

    @property
    def zero(self):
        return Poly.zero(self.vars)

    @property
    def one(self):
        return Poly.const(self.vars, 1)

    def coerce(self, value):
        if isinstance(value, Poly):
            if value.vars != self.vars:
                raise ValueError("coordinate mismatch")
            return value
        return Poly.const(self.vars, value)

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self.vars == other.vars

    __hash__ = None

    def __repr__(self):
        return f"PolyRing({self.vars!r})"


RAT = RatRing()
