from fractions import Fraction

import pytest
from hypothesis import strategies as st

from disjoint_divisors.family import build_family
from disjoint_divisors.mpoly import MPoly

Y = MPoly.var("y")
Z = MPoly.var("z")
F1 = Y * Z**2 + 1


@pytest.fixture(scope="session")
def family8():
    return build_family(8)


@pytest.fixture(scope="session")
def family4():
    return build_family(4)


small_rats = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def polys(draw, max_deg=4, max_terms=6, coeffs=small_rats):
    n = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n):
        e0 = draw(st.integers(0, max_deg))
        e1 = draw(st.integers(0, max_deg - e0))
        terms[(e0, e1)] = draw(coeffs)
    return MPoly(terms)


points = st.tuples(small_rats, small_rats)


def frac(s) -> Fraction:
    return Fraction(s)


# -- acceptance reporting -------------------------------------------------------

_ACCEPTANCE: dict[int, str] = {}


def record_acceptance(number: int, title: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    _ACCEPTANCE[number] = f"criterion {number:2d} {status}  {title}" + (f" ({detail})" if detail else "")
    print(_ACCEPTANCE[number])


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[k])
