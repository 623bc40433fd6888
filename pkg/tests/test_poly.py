import pytest
from fractions import Fraction

from linfty.errors import UnknownVariable
from linfty.poly import Poly, format_rational, jacobian, parse_rational

F = Fraction


def test_rational_round_trip():
    assert parse_rational("3/4") == F(3, 4)
    assert parse_rational("-7") == F(-7)
    assert format_rational(F(3, 4)) == "3/4"
    assert format_rational(F(5, 1)) == "5"
    assert format_rational(F(2, -4)) == "-1/2"


def test_poly_arithmetic_exact():
    v = ("x", "y")
    x = Poly.var(v, "x")
    y = Poly.var(v, "y")
    p = (x + y) * (x - y)
    assert p == x * x - y * y
    assert (x + 1) ** 3 == x ** 3 + 3 * x ** 2 + 3 * x + 1
    assert F(1, 2) * (x + x) == x
    zero = x - x
    assert not zero
    assert zero == Poly.zero(v)


def test_poly_eval_examples():
    v = ("x",)
    x = Poly.var(v, "x")
    assert (x * x).eval({"x": F(3)}) == 9
    with pytest.raises(UnknownVariable):
        (x * x).eval({"y": F(1)})
    # extra coordinates in the point are fine
    assert x.eval({"x": F(2), "z": F(9)}) == 2


def test_jacobian_examples():
    v = ("x",)
    x = Poly.var(v, "x")
    assert jacobian((x,), {"x": F(0)}) == ((F(1),),)
    assert jacobian((x + x * x,), {"x": F(0)}) == ((F(1),),)
    v2 = ("x", "y")
    x2, y2 = Poly.var(v2, "x"), Poly.var(v2, "y")
    j = jacobian((x2 * y2, y2), {"x": F(2), "y": F(3)})
    assert j == ((F(3), F(2)), (F(0), F(1)))


def test_partial_and_subs():
    v = ("x", "y")
    x, y = Poly.var(v, "x"), Poly.var(v, "y")
    p = x ** 2 * y + 2 * y
    assert p.partial("x") == 2 * x * y
    assert p.partial("y") == x ** 2 + 2
    t = ("t",)
    q = p.subs({"x": Poly.var(t, "t"), "y": Poly.const(t, 1)}, t)
    tt = Poly.var(t, "t")
    assert q == tt ** 2 + 2


def test_coordinate_mismatch_rejected():
    x = Poly.var(("x",), "x")
    z = Poly.var(("z",), "z")
    with pytest.raises(ValueError):
        x + z
