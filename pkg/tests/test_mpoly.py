import json
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import F1, Y, Z, points, polys, small_rats
from disjoint_divisors import mpoly
from disjoint_divisors.mpoly import (
    MPoly,
    PointQ2,
    deg_in,
    divmod_poly,
    evaluate,
    exact_div,
    format_rat,
    parse_rat,
    reciprocal_transform,
    x_valuation,
)

X = MPoly.var("x", ("y", "x"))
YX = MPoly.var("y", ("y", "x"))


def to_sympy(f: MPoly):
    y, z = sympy.symbols(f.variables)
    return sum((sympy.Rational(c.numerator, c.denominator) * y**a * z**b for (a, b), c in f.items()), sympy.Integer(0))


def from_sympy(expr, variables=("y", "z")) -> MPoly:
    if expr == 0:
        return MPoly.zero(variables)
    p = sympy.Poly(expr, *sympy.symbols(variables))
    return MPoly({m: Fraction(int(c.p), int(c.q)) for m, c in p.terms()}, variables)


# -- worked examples --------------------------------------------------------


def test_add_examples():
    assert F1 + (-1) == Y * Z**2
    assert F1 + MPoly.zero() == F1
    assert Z + Z == Z.scale(2)
    assert (F1 + (-1)).to_json() == [["1", 1, 2]]


def test_mul_and_pow_examples():
    square = Y**2 * Z**4 + Y * Z**2 * 2 + 1
    assert Z * Z == Z**2
    assert F1 * F1 == square
    assert F1**2 == square
    assert F1 * 1 == F1
    assert Z**3 == MPoly({(0, 3): 1})
    assert F1**0 == MPoly.const(1)


def test_eval_examples():
    f2 = -(Z**3) + F1**2
    assert evaluate(F1, PointQ2(0, 1)) == 1
    assert evaluate(Z, PointQ2(0, 0)) == 0
    assert evaluate(f2, PointQ2(0, 1)) == 0


def test_deg_in_examples():
    assert deg_in(F1, "z") == 2
    assert deg_in(F1, "y") == 1
    assert deg_in(MPoly.zero(), "z") is None


def test_reciprocal_transform_examples():
    assert reciprocal_transform(F1, 2) == YX + X**2
    f2 = -(Z**3) + F1**2
    assert reciprocal_transform(f2, 4) == -X + (YX + X**2) ** 2
    assert reciprocal_transform(Z, 1) == MPoly.const(1, ("y", "x"))


def test_reciprocal_transform_rejects_small_degree():
    with pytest.raises(ValueError):
        reciprocal_transform(F1, 1)


def test_grlex_leading_term():
    f = Y * Z**2 + Y**3 + Z
    # total degree ties broken by the first variable
    assert f.leading_monomial() == (3, 0)
    assert [m for m, _ in f.sorted_terms()] == [(3, 0), (1, 2), (0, 1)]


def test_rationals_round_trip():
    for text in ["0", "1", "-3", "7/2", "-5/12"]:
        assert format_rat(parse_rat(text)) == text
    assert parse_rat("4/6") == Fraction(2, 3)
    with pytest.raises(ValueError):
        parse_rat("1/0")
    with pytest.raises(ValueError):
        parse_rat("one")


def test_from_json_rejects_bad_input():
    for bad in [{"a": 1}, [["1", 0]], [["0", 1, 1]], [["1", 0, 0], ["2", 0, 0]], [["1", -1, 0]], [["1", 0.5, 0]]]:
        with pytest.raises(ValueError):
            MPoly.from_json(bad)


def test_mixed_variables_rejected():
    with pytest.raises(ValueError):
        Z + X


def test_kronecker_matches_schoolbook():
    rng = random.Random(11)
    f = MPoly({(rng.randrange(40), rng.randrange(40)): Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 9)) for _ in range(120)})
    g = MPoly({(rng.randrange(40), rng.randrange(40)): Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 9)) for _ in range(120)})
    assert mpoly._mul_kronecker(f, g) == mpoly._mul_schoolbook(f, g)


def test_division_identity():
    f = F1**3 + Z * Y
    q, r = divmod_poly(f, F1)
    assert q * F1 + r == f
    assert exact_div(F1**3, F1) == F1**2
    with pytest.raises(ArithmeticError):
        exact_div(F1, Z)


def test_x_valuation():
    assert x_valuation(X**4 - X, "x") == 1
    assert x_valuation(MPoly.zero(("y", "x")), "x") is None


# -- properties -----------------------------------------------------------------


@given(polys(), polys(), polys())
def test_ring_axioms(f, g, h):
    assert f + g == g + f
    assert f * g == g * f
    assert (f + g) + h == f + (g + h)
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f - f == MPoly.zero()


@given(polys(), polys(), points)
def test_evaluation_is_a_ring_homomorphism(f, g, p):
    pt = PointQ2(*p)
    assert evaluate(f * g, pt) == evaluate(f, pt) * evaluate(g, pt)
    assert evaluate(f + g, pt) == evaluate(f, pt) + evaluate(g, pt)


@given(polys(), polys())
def test_multiplication_matches_sympy(f, g):
    assert f * g == from_sympy(sympy.expand(to_sympy(f) * to_sympy(g)))


@given(polys(), st.integers(0, 4))
def test_pow_is_repeated_product(f, k):
    acc = MPoly.const(1)
    for _ in range(k):
        acc = acc * f
    assert f**k == acc


@given(polys(), polys())
def test_transform_is_multiplicative(f, g):
    if f.is_zero() or g.is_zero():
        return
    df, dg = f.degree("z"), g.degree("z")
    assert reciprocal_transform(f * g, df + dg) == reciprocal_transform(f, df) * reciprocal_transform(g, dg)


@given(polys(), st.integers(0, 3))
def test_transform_is_an_involution(f, extra):
    if f.is_zero():
        return
    d = f.degree("z") + extra
    assert reciprocal_transform(reciprocal_transform(f, d), d) == f


@given(polys(), polys())
def test_division_remainder_identity(f, g):
    if g.is_zero():
        return
    q, r = divmod_poly(f, g)
    assert q * g + r == f
    lm = g.leading_monomial()
    assert not any(m[0] >= lm[0] and m[1] >= lm[1] for m in r.terms)


@given(polys(coeffs=st.fractions(max_denominator=10**9)))
def test_serialization_round_trip(f):
    data = json.loads(f.dumps())
    assert MPoly.from_json(data) == f
    # descending grlex order is part of the format
    keys = [(a + b, a) for _, a, b in data]
    assert keys == sorted(keys, reverse=True)


@given(small_rats, small_rats)
def test_point_json_round_trip(a, b):
    p = PointQ2(a, b)
    assert PointQ2.from_json(p.to_json()) == p


@settings(max_examples=30)
@given(polys(), st.sampled_from(["y", "z"]), small_rats, points)
def test_substitute_agrees_with_evaluate(f, var, value, p):
    g = f.substitute(var, value)
    pt = PointQ2(value, p[1]) if var == "y" else PointQ2(p[0], value)
    assert evaluate(g, pt) == evaluate(f, pt)
