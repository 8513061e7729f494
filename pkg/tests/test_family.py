import json
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import F1, Y, Z
from disjoint_divisors.elimination import ResourceLimits
from disjoint_divisors.family import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    FamilyState,
    IdentityCache,
    build_family,
    coverage_check,
    eisenstein_certificate,
    eisenstein_conditions,
    expected_degrees,
    extend,
    groebner_disjointness,
    init_family,
    irreducibility_certificate,
    next_point,
    no_common_fibration_certificate,
    on_family,
    rational_at,
    structural_disjointness,
)
from disjoint_divisors.mpoly import MPoly, PointQ2, deg_in, evaluate

GOLDEN = Path(__file__).parent / "data" / "golden_family_n3.json"
X = MPoly.var("x", ("y", "x"))
YX = MPoly.var("y", ("y", "x"))

# a_n for n = 2..8, frozen after agreement of two independent oracles
# (a sympy expansion walk through n = 7 and a polynomial-free evaluation walk)
A_VALUES = {
    2: Fraction(-1),
    3: Fraction(2),
    4: Fraction(-48),
    5: Fraction(-5483520),
    6: Fraction(56256102400),
    7: Fraction(374408036373117542973894033408),
    8: Fraction(-1122472519515825043346680343615490849294360035585806156564885490625, 2),
}
POINTS = {
    2: (PointQ2(0, 1), 1),
    3: (PointQ2(0, -1), 3),
    4: (PointQ2(1, 1), 4),
    5: (PointQ2(0, Fraction(1, 2)), 6),
    6: (PointQ2(1, -1), 7),
    7: (PointQ2(0, Fraction(-1, 2)), 10),
    8: (PointQ2(1, Fraction(1, 2)), 11),
}
TERM_COUNTS = {2: 4, 3: 7, 4: 22, 5: 97, 6: 473, 7: 2071, 8: 8703}


def test_rational_enumeration_prefix():
    got = [rational_at(k) for k in range(11)]
    assert got == [Fraction(x) for x in ["0", "1", "-1", "1/2", "-1/2", "2", "-2", "1/3", "-1/3", "3", "-3"]]


def test_rational_enumeration_is_a_bijection_prefix():
    seen = [rational_at(k) for k in range(400)]
    assert len(set(seen)) == 400
    # every rational of height |p| + q <= 8 is present
    for q in range(1, 8):
        for p in range(-(8 - q), 9 - q):
            if Fraction(p, q).denominator == q:
                assert Fraction(p, q) in seen


def test_next_point_examples():
    assert next_point(0) == PointQ2(0, 0)
    assert next_point(1) == PointQ2(0, 1)
    assert next_point(2) == PointQ2(1, 0)
    assert next_point(3) == PointQ2(0, -1)


def test_init_family():
    s = init_family()
    assert [e.poly for e in s.entries] == [Z, F1]
    assert s.degrees == [1, 2]
    assert deg_in(s[1].poly, "z") == 2
    assert evaluate(s[1].poly, PointQ2(0, 0)) == 1


def test_first_extensions():
    s = extend(init_family())
    e = s[2]
    assert (e.point, e.a) == (PointQ2(0, 1), -1)
    assert e.poly == -(Z**3) + F1**2
    s = extend(s)
    e = s[3]
    assert (e.point, e.a) == (PointQ2(0, -1), 2)
    assert e.poly == Z**5 * 2 + F1 * s[2].poly
    assert extend(extend(s)).degrees == [1, 2, 4, 6, 12, 24]


def test_frozen_constants(family8):
    assert family8.degrees == [1, 2, 4, 6, 12, 24, 48, 96, 192]
    for n, a in A_VALUES.items():
        e = family8[n]
        assert e.a == a
        assert (e.point, e.point_index) == POINTS[n]
        assert len(e.poly) == TERM_COUNTS[n]
        assert e.poly.degree("z") == e.d
        assert evaluate(e.poly, e.point) == 0


def test_golden_file_matches_build():
    golden = GOLDEN.read_text()
    assert json.dumps(build_family(3).to_json(), separators=(",", ":"), sort_keys=True) + "\n" == golden
    state = FamilyState.from_json(json.loads(golden))
    assert state[2].a == -1 and state[3].a == 2


def test_family_json_rejects_tampering():
    data = json.loads(GOLDEN.read_text())
    data["entries"][3]["a"] = "3"
    with pytest.raises(ValueError):
        FamilyState.from_json(data)
    data = json.loads(GOLDEN.read_text())
    data["enumeration"] = "other"
    with pytest.raises(ValueError):
        FamilyState.from_json(data)


def test_expected_degrees():
    assert expected_degrees(4) == [1, 2, 4, 6, 12]


# -- disjointness -------------------------------------------------------------


def test_structural_examples(family4):
    c = structural_disjointness(family4, 0, 1)
    assert c.conclusion == PASS and c.evidence["f_j_mod_z"] == [["1", 0, 0]]
    c = structural_disjointness(family4, 1, 2)
    assert c.conclusion == PASS and c.evidence["factors"] == [[1, 2]]
    assert structural_disjointness(family4, 0, 3).conclusion == PASS


def test_structural_all_pairs(family8):
    cache = IdentityCache(family8)
    for i in range(9):
        for j in range(i + 1, 9):
            assert structural_disjointness(family8, i, j, cache).conclusion == PASS


def test_structural_rejects_bad_indices(family4):
    with pytest.raises(IndexError):
        structural_disjointness(family4, 2, 2)
    with pytest.raises(IndexError):
        structural_disjointness(family4, 0, 5)


def test_groebner_examples(family4):
    c = groebner_disjointness(family4, 0, 1)
    assert c.conclusion == PASS
    assert (c.witness.u, c.witness.v) == (-(Y * Z), MPoly.const(1))
    c = groebner_disjointness(family4, 0, 2)
    assert c.conclusion == PASS and c.witness.check()
    c = groebner_disjointness(family4, 1, 2, ResourceLimits(max_degree=1))
    assert c.conclusion == INCONCLUSIVE


# -- irreducibility -----------------------------------------------------------


def test_eisenstein_examples(family4):
    c = eisenstein_certificate(family4, 2)
    assert c.conclusion == PASS
    assert c.transformed == -X + (YX + X**2) ** 2
    assert dict(c.x_valuations) == {0: 1, 1: 2, 2: 0}
    assert c.leading_y_coefficient == 1
    c = eisenstein_certificate(family4, 3)
    assert c.conclusion == PASS and dict(c.x_valuations)[0] == 1
    assert eisenstein_certificate(family4, 1).rule == "degree-one-in-y"
    assert irreducibility_certificate(family4, 0).conclusion == PASS


def test_eisenstein_all(family8):
    for n in range(2, 9):
        c = eisenstein_certificate(family8, n)
        assert c.conclusion == PASS, n
        assert dict(c.x_valuations)[0] == 1


def test_eisenstein_bad_index(family4):
    with pytest.raises(ValueError):
        eisenstein_certificate(family4, 0)


def test_eisenstein_conditions():
    # x^2 divides the constant coefficient
    assert not eisenstein_conditions(YX**2 + X**2)[2]
    # leading coefficient is not a unit
    assert not eisenstein_conditions(X * YX**2 + X)[2]
    assert eisenstein_conditions(YX**2 + X * YX + X)[2]


# -- coverage -----------------------------------------------------------------


def test_coverage_examples():
    s = init_family()
    r = coverage_check(s, 1)
    assert r.conclusion == PASS and r.assignments == ((PointQ2(0, 0), 0),)
    s2 = extend(s)
    r = coverage_check(s2, 4)
    assert r.uncovered == (PointQ2(0, -1),)
    assert dict(r.assignments) == {PointQ2(0, 0): 0, PointQ2(0, 1): 2, PointQ2(1, 0): 0}
    r = coverage_check(extend(s2), 4)
    assert r.conclusion == PASS


def test_coverage_through_cursor(family8):
    r = coverage_check(family8, family8.cursor)
    assert r.conclusion == PASS


def test_coverage_frozen_gaps(family8):
    # frozen from the evaluation walk: first twenty points, family through n = 8
    r = coverage_check(family8, 20)
    assert [next_point(k) for k in (13, 15, 16, 17, 18, 19)] == list(r.uncovered)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 11))
def test_points_before_cursor_are_covered(k):
    assert on_family(build_family(8), next_point(k)) is not None


# -- degree growth ------------------------------------------------------------


def test_degree_growth_certificate():
    s = build_family(5)
    c = no_common_fibration_certificate(s)
    assert c.conclusion == PASS
    assert list(c.degrees) == [1, 2, 4, 6, 12, 24]
    with pytest.raises(ValueError):
        no_common_fibration_certificate(init_family())


def test_build_rejects_small_n():
    with pytest.raises(ValueError):
        build_family(0)


def test_conclusions_are_distinct():
    assert len({PASS, FAIL, INCONCLUSIVE}) == 3
