"""Maps to the projective line from two coprime polynomials.

Two polynomials ``A, B`` without common zeros define ``p -> [A(p) : B(p)]``
on the whole plane.  Its fibers are the curves ``mu*A - lambda*B = 0``; the
question asked here is whether a given curve ``V(h)`` lies inside one of
them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt, lcm

from .elimination import (
    Refutation,
    ResourceLimitExceeded,
    ResourceLimits,
    UnitIdealWitness,
    gcd_poly,
    radical,
    unit_ideal,
)
from .family import rational_at
from .mpoly import MPoly, PointQ2, divmod_poly, evaluate, format_rat, parse_rat


class PencilError(ValueError):
    """``A`` and ``B`` share a zero, so they do not define a map on the plane."""


class FiberInconclusive(Exception):
    """No fiber value could be determined within the search budget."""


@dataclass(frozen=True)
class ProjPoint:
    """A point ``[lam : mu]`` of the projective line, normalized."""

    lam: Fraction
    mu: Fraction

    def __post_init__(self):
        lam, mu = Fraction(self.lam), Fraction(self.mu)
        if not lam and not mu:
            raise ValueError("[0 : 0] is not a point of the projective line")
        if mu:
            lam, mu = lam / mu, Fraction(1)
        else:
            lam = Fraction(1)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "mu", mu)

    def to_json(self) -> list[str]:
        return [format_rat(self.lam), format_rat(self.mu)]

    @classmethod
    def from_json(cls, data) -> "ProjPoint":
        return cls(parse_rat(data[0]), parse_rat(data[1]))

    def __str__(self) -> str:
        return f"[{format_rat(self.lam)} : {format_rat(self.mu)}]"


@dataclass(frozen=True)
class Pencil:
    A: MPoly
    B: MPoly
    coprimality: UnitIdealWitness

    def fiber_polynomial(self, value: ProjPoint) -> MPoly:
        return self.A.scale(value.mu) - self.B.scale(value.lam)

    def to_json(self) -> dict:
        return {"A": self.A.to_json(), "B": self.B.to_json(), "witness": self.coprimality.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "Pencil":
        try:
            a, b = MPoly.from_json(data["A"]), MPoly.from_json(data["B"])
            w = UnitIdealWitness.from_json(data["witness"])
        except KeyError as exc:
            raise ValueError(f"pencil is missing field {exc}") from None
        if w.pair != (a, b) or not w.check():
            raise ValueError("pencil witness does not certify u*A + v*B = 1")
        return cls(a, b, w)


def make_pencil(A: MPoly, B: MPoly, limits: ResourceLimits | None = None) -> Pencil:
    """Certify that ``A`` and ``B`` have no common zero and wrap them.

    Raises :class:`PencilError` on a common zero and
    :class:`~disjoint_divisors.elimination.ResourceLimitExceeded` when the
    engine runs out of budget.
    """
    if A.is_zero() or B.is_zero():
        raise PencilError("both polynomials must be nonzero")
    result = unit_ideal(A, B, limits)
    if isinstance(result, Refutation):
        raise PencilError(f"{A} and {B} have a common zero; no morphism on the whole plane")
    return Pencil(A, B, result)


def evaluate_map(p: Pencil, pt: PointQ2) -> ProjPoint:
    a, b = evaluate(p.A, pt), evaluate(p.B, pt)
    if not a and not b:
        raise AssertionError(f"both pencil polynomials vanish at {pt}; the witness is wrong")
    return ProjPoint(a, b)


# -- fiber membership ---------------------------------------------------------


@dataclass(frozen=True)
class FiberResult:
    """Outcome of a fiber query: ``value`` is ``None`` for a refutation."""

    h: MPoly
    reduced_h: MPoly
    value: ProjPoint | None
    method: str
    quotient: MPoly | None = None
    witness_point: PointQ2 | None = None
    radical_power: int = 1
    radical_cofactor: MPoly | None = None

    @property
    def refuted(self) -> bool:
        return self.value is None

    def to_json(self) -> dict:
        out = {
            "h": self.h.to_json(),
            "reduced_h": self.reduced_h.to_json(),
            "method": self.method,
            "fiber": self.value.to_json() if self.value else None,
            "conclusion": "refuted" if self.value is None else "contained",
        }
        if self.quotient is not None:
            out["quotient"] = self.quotient.to_json()
        if self.witness_point is not None:
            out["point"] = self.witness_point.to_json()
        if self.radical_cofactor is not None:
            # reduced_h^k = h * cofactor, so V(reduced_h) = V(h)
            out["radical_power"] = self.radical_power
            out["radical_cofactor"] = self.radical_cofactor.to_json()
        return out


def rational_roots(f: MPoly, var: str) -> list[Fraction]:
    """Rational roots of a polynomial in the single variable ``var``.

    Raises ``OverflowError`` when the leading or constant coefficient is too
    large for trial division.
    """
    if f.is_zero():
        raise ValueError("the zero polynomial has every value as a root")
    coeffs = {k: c.constant_value() for k, c in f.coefficients_in(var).items()}
    low = min(coeffs)
    roots = [Fraction(0)] if low > 0 else []
    # clear denominators and divide out the power of var
    den = 1
    for c in coeffs.values():
        den = lcm(den, c.denominator)
    ints = {k - low: int(c * den) for k, c in coeffs.items()}
    top = max(ints)
    if top == 0:
        return roots
    lead, const = abs(ints[top]), abs(ints[0])
    for p in _divisors(const):
        for q in _divisors(lead):
            for cand in (Fraction(p, q), Fraction(-p, q)):
                if cand not in roots and _horner(ints, top, cand) == 0:
                    roots.append(cand)
    return sorted(roots)


# trial division bound for the rational-root test
_MAX_ROOT_TEST = 10**12


def _divisors(n: int) -> list[int]:
    if n > _MAX_ROOT_TEST:
        raise OverflowError(f"{n} is too large to enumerate divisors")
    out = []
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            out.append(d)
            if d * d != n:
                out.append(n // d)
    return sorted(out)


def _horner(ints: dict[int, int], top: int, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for k in range(top, -1, -1):
        acc = acc * x + ints.get(k, 0)
    return acc


def find_rational_point(h: MPoly, budget: int = 64) -> PointQ2 | None:
    """A rational point of ``V(h)``, found by fixing one coordinate.

    Tries the first ``budget`` enumerated rationals for each coordinate and
    solves the resulting one-variable equation with the rational-root test.
    """
    v0, v1 = h.variables
    for k in range(budget):
        t = rational_at(k)
        for fixed, free in ((v0, v1), (v1, v0)):
            uni = h.substitute(fixed, t)
            if uni.is_zero():
                # the whole line fixed = t lies on V(h)
                return PointQ2(t, 0) if fixed == v0 else PointQ2(0, t)
            if uni.is_constant():
                continue
            try:
                roots = rational_roots(uni, free)
            except OverflowError:
                continue
            if roots:
                r = roots[0]
                return PointQ2(t, r) if fixed == v0 else PointQ2(r, t)
    return None


def _linear_fiber_value(p: Pencil, h: MPoly) -> ProjPoint | None:
    """Solve ``mu*A - lam*B = 0 mod h`` for ``[lam : mu]``.

    Normal forms modulo the principal ideal ``(h)`` are unique and linear,
    so the condition is ``mu*NF(A) = lam*NF(B)``.
    """
    ra, rb = divmod_poly(p.A, h)[1], divmod_poly(p.B, h)[1]
    if ra.is_zero() and rb.is_zero():
        raise AssertionError("h divides both A and B; the witness is wrong")
    if rb.is_zero():
        return ProjPoint(1, 0)
    if ra.is_zero():
        return ProjPoint(0, 1)
    m = rb.leading_monomial()
    c = ra.coefficient(m) / rb.coefficient(m)
    if c and ra == rb.scale(c):
        return ProjPoint(c, 1)
    return None


def _radical_power(h: MPoly, h_red: MPoly) -> tuple[int, MPoly]:
    """Smallest ``k`` with ``h | h_red^k``, and the cofactor."""
    power = h_red
    for k in range(1, h.total_degree() + 1):
        q, r = divmod_poly(power, h)
        if not r:
            return k, q
        power = power * h_red
    raise AssertionError("reduced h has a different zero set from h")


def divisor_in_fiber(
    p: Pencil, h: MPoly, search_budget: int = 64, linear_fallback: bool = True
) -> FiberResult:
    """Decide whether ``V(h)`` lies in a single fiber of the pencil.

    The candidate value comes from the map evaluated at a rational point of
    ``V(h)``; containment is then exact divisibility of the fiber
    polynomial by the square-free part of ``h``.  Without a rational point the
    candidate comes from comparing normal forms modulo ``h``.  Raises
    :class:`FiberInconclusive` when neither route yields an answer.
    """
    if h.is_constant():
        raise ValueError("h must be nonconstant")
    h_red = radical(h)
    k, w = _radical_power(h, h_red)
    pt = find_rational_point(h_red, search_budget)
    if pt is not None:
        value = evaluate_map(p, pt)
        method = "point"
    elif linear_fallback:
        value = _linear_fiber_value(p, h_red)
        method = "normal-form"
        if value is None:
            return FiberResult(h, h_red, None, method, radical_power=k, radical_cofactor=w)
    else:
        raise FiberInconclusive(f"no rational point of V(h) among {search_budget} trial values")
    q, r = divmod_poly(p.fiber_polynomial(value), h_red)
    if r:
        return FiberResult(h, h_red, None, method, witness_point=pt, radical_power=k, radical_cofactor=w)
    if q * h_red != p.fiber_polynomial(value):
        raise AssertionError("fiber quotient fails re-multiplication")
    return FiberResult(h, h_red, value, method, q, pt, k, w)


def fibers_disjoint(p: Pencil, s: ProjPoint, t: ProjPoint) -> bool:
    """Distinct fibers share no component (constant gcd)."""
    return gcd_poly(p.fiber_polynomial(s), p.fiber_polynomial(t)).is_constant()


__all__ = [
    "FiberInconclusive",
    "FiberResult",
    "Pencil",
    "PencilError",
    "ProjPoint",
    "ResourceLimitExceeded",
    "divisor_in_fiber",
    "evaluate_map",
    "fibers_disjoint",
    "find_rational_point",
    "make_pencil",
    "rational_roots",
]
