"""Resultants, gcds and a small Buchberger engine with cofactor tracking.

The engine answers one question: is 1 in the ideal ``(f, g)`` of
``Q[y, z]``?  By the Nullstellensatz this holds exactly when the curves
``V(f)`` and ``V(g)`` have no common point over the algebraic closure.  A
positive answer comes with cofactors ``u, v`` such that ``u*f + v*g == 1``,
which anyone can re-check with one multiplication.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .mpoly import MPoly, divmod_poly, exact_div, grlex_key


class ResourceLimitExceeded(Exception):
    """The Groebner computation hit a configured cap before deciding."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class WitnessError(AssertionError):
    """A produced witness failed its own re-multiplication check."""


@dataclass(frozen=True)
class ResourceLimits:
    max_degree: int = 64
    max_basis: int = 256
    max_terms: int = 20000


@dataclass(frozen=True)
class UnitIdealWitness:
    u: MPoly
    v: MPoly
    pair: tuple[MPoly, MPoly]

    def check(self) -> bool:
        f, g = self.pair
        return self.u * f + self.v * g == 1

    def to_json(self) -> dict:
        f, g = self.pair
        return {"u": self.u.to_json(), "v": self.v.to_json(), "f": f.to_json(), "g": g.to_json()}

    @classmethod
    def from_json(cls, data: dict, variables=("y", "z")) -> "UnitIdealWitness":
        try:
            return cls(
                MPoly.from_json(data["u"], variables),
                MPoly.from_json(data["v"], variables),
                (MPoly.from_json(data["f"], variables), MPoly.from_json(data["g"], variables)),
            )
        except KeyError as exc:
            raise ValueError(f"witness is missing field {exc}") from None


@dataclass(frozen=True)
class Refutation:
    """A Groebner basis of ``(f, g)`` that does not contain a constant."""

    pair: tuple[MPoly, MPoly]
    basis: tuple[MPoly, ...] = field(default=())

    def to_json(self) -> dict:
        return {"basis": [p.to_json() for p in self.basis]}


# -- resultants -------------------------------------------------------------


def _coeff_list(f: MPoly, var: str) -> list[MPoly]:
    """Coefficients of ``f`` in ``var``, highest power first."""
    parts = f.coefficients_in(var)
    deg = max(parts)
    zero = MPoly.zero(f.variables)
    return [parts.get(k, zero) for k in range(deg, -1, -1)]


def sylvester_matrix(f: MPoly, g: MPoly, var: str) -> list[list[MPoly]]:
    cf, cg = _coeff_list(f, var), _coeff_list(g, var)
    m, n = len(cf) - 1, len(cg) - 1
    size = m + n
    zero = MPoly.zero(f.variables)
    rows = []
    for i in range(n):
        rows.append([zero] * i + cf + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + cg + [zero] * (size - n - 1 - i))
    return rows


def bareiss_determinant(matrix: list[list[MPoly]], variables=("y", "z")) -> MPoly:
    """Fraction-free Gaussian elimination; every division is exact."""
    n = len(matrix)
    if n == 0:
        return MPoly.const(1, variables)
    a = [list(row) for row in matrix]
    sign = 1
    prev = MPoly.const(1, a[0][0].variables)
    for k in range(n - 1):
        if a[k][k].is_zero():
            for r in range(k + 1, n):
                if not a[r][k].is_zero():
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return MPoly.zero(prev.variables)
        pivot = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = pivot * a[i][j] - a[i][k] * a[k][j]
                a[i][j] = exact_div(num, prev) if not prev.is_constant() else num.scale(1 / prev.constant_value())
            a[i][k] = MPoly.zero(prev.variables)
        prev = pivot
    det = a[n - 1][n - 1]
    return det if sign > 0 else -det


def resultant(f: MPoly, g: MPoly, var: str) -> MPoly:
    """Resultant of ``f`` and ``g`` with respect to ``var``.

    Equals the Sylvester determinant; a polynomial in the other variable.
    An input of degree 0 in ``var`` contributes ``c**deg(other)``.
    """
    f._check_vars(g)
    if f.is_zero() and g.is_zero():
        raise ValueError("resultant of two zero polynomials is undefined")
    if f.is_zero() or g.is_zero():
        return MPoly.zero(f.variables)
    m, n = f.degree(var), g.degree(var)
    if m == 0:
        return f**n
    if n == 0:
        return g**m
    return bareiss_determinant(sylvester_matrix(f, g, var), f.variables)


# -- gcd ------------------------------------------------------------------


def _univariate_gcd(a: MPoly, b: MPoly) -> MPoly:
    # both polynomials involve one variable only; Euclid over Q
    while not b.is_zero():
        a, b = b, divmod_poly(a, b)[1]
    return a.monic() if not a.is_zero() else a


def _content_in(f: MPoly, var: str, other: str) -> MPoly:
    g = MPoly.zero(f.variables)
    for c in f.coefficients_in(var).values():
        g = _univariate_gcd(g, c) if not g.is_zero() else c.monic()
        if g.is_constant():
            return MPoly.const(1, f.variables)
    return g


def _lead_in(f: MPoly, var: str) -> MPoly:
    return f.coefficients_in(var)[f.degree(var)]


def _pseudo_rem(f: MPoly, g: MPoly, var: str) -> MPoly:
    """``lc(g)^(deg f - deg g + 1) * f`` reduced modulo ``g`` in ``var``."""
    i = f.var_index(var)
    dg = g.degree(var)
    lc_g = _lead_in(g, var)
    r = f
    n = f.degree(var) - dg + 1
    while not r.is_zero() and r.degree(var) >= dg:
        dr = r.degree(var)
        lc_r = _lead_in(r, var)
        shift = (dr - dg, 0) if i == 0 else (0, dr - dg)
        r = lc_g * r - (lc_r * g).shift(shift)
        n -= 1
    return r * lc_g**n if n > 0 else r


def _subresultant_last(a: MPoly, b: MPoly, var: str) -> MPoly:
    """Last nonzero member of the subresultant remainder sequence of ``a, b``.

    Requires ``deg a >= deg b > 0`` in ``var``; all divisions are exact.
    """
    d = a.degree(var) - b.degree(var)
    beta = MPoly.const((-1) ** (d + 1), a.variables)
    h = _pseudo_rem(a, b, var) * beta
    lc = _lead_in(b, var)
    c = -(lc**d)
    last = b
    while not h.is_zero():
        k = h.degree(var)
        last = h
        if k == 0:
            break
        a, b, d = b, h, b.degree(var) - k
        beta = -lc * c**d
        h = exact_div(_pseudo_rem(a, b, var), beta)
        lc = _lead_in(b, var)
        c = exact_div((-lc) ** d, c ** (d - 1)) if d > 1 else -lc
    return last


def gcd_poly(f: MPoly, g: MPoly) -> MPoly:
    """Greatest common divisor, integer content 1 and positive leading coefficient."""
    f._check_vars(g)
    if f.is_zero():
        return g.primitive()
    if g.is_zero():
        return f.primitive()
    v0, v1 = f.variables
    # main variable: the one with the shorter remainder sequence
    main, other = (v1, v0) if max(f.degree(v1), g.degree(v1)) <= max(f.degree(v0), g.degree(v0)) else (v0, v1)
    cf, cg = _content_in(f, main, other), _content_in(g, main, other)
    cont = _univariate_gcd(cf, cg)
    a, b = exact_div(f, cf), exact_div(g, cg)
    if a.degree(main) < b.degree(main):
        a, b = b, a
    if b.degree(main) == 0:
        # b is a unit after removing its content
        return cont.primitive()
    last = _subresultant_last(a, b, main)
    if last.degree(main) == 0:
        return cont.primitive()
    pp = exact_div(last, _content_in(last, main, other))
    return (cont * pp).primitive()


def radical(h: MPoly) -> MPoly:
    """Square-free part ``h / gcd(h, dh/dv0, dh/dv1)`` (characteristic zero)."""
    v0, v1 = h.variables
    g = gcd_poly(h, gcd_poly(h.derivative(v0), h.derivative(v1)))
    if g.is_constant():
        return h.primitive()
    return exact_div(h, g).primitive()


# -- Buchberger with cofactors ---------------------------------------------


def _divides(a, b) -> bool:
    return a[0] <= b[0] and a[1] <= b[1]


def _lcm(a, b):
    return (max(a[0], b[0]), max(a[1], b[1]))


class _Row:
    """A basis element together with the cofactors expressing it in (f, g)."""

    __slots__ = ("p", "u", "v", "lm")

    def __init__(self, p: MPoly, u: MPoly, v: MPoly):
        lc = p.leading_coefficient()
        if lc != 1:
            inv = 1 / lc
            p, u, v = p.scale(inv), u.scale(inv), v.scale(inv)
        self.p, self.u, self.v = p, u, v
        self.lm = p.leading_monomial()


def _reduce(p: MPoly, u: MPoly, v: MPoly, basis: list[_Row], limits: ResourceLimits):
    """Full reduction of ``p`` by ``basis``, carrying cofactors along."""
    variables = p.variables
    rem = dict(p.terms)
    out: dict = {}
    u_acc, v_acc = u, v
    while rem:
        m = max(rem, key=grlex_key)
        c = rem[m]
        for row in basis:
            if _divides(row.lm, m):
                q = (m[0] - row.lm[0], m[1] - row.lm[1])
                for mm, cc in row.p.items():
                    key = (mm[0] + q[0], mm[1] + q[1])
                    val = rem.get(key, 0) - c * cc
                    if val:
                        rem[key] = val
                    else:
                        rem.pop(key, None)
                mono = MPoly({q: c}, variables)
                u_acc = u_acc - mono * row.u
                v_acc = v_acc - mono * row.v
                break
        else:
            out[m] = rem.pop(m)
        if len(rem) + len(out) > limits.max_terms:
            raise ResourceLimitExceeded(f"intermediate polynomial exceeds {limits.max_terms} terms")
    return MPoly(out, variables), u_acc, v_acc


def _spoly(a: _Row, b: _Row):
    lcm = _lcm(a.lm, b.lm)
    sa = (lcm[0] - a.lm[0], lcm[1] - a.lm[1])
    sb = (lcm[0] - b.lm[0], lcm[1] - b.lm[1])
    return (
        a.p.shift(sa) - b.p.shift(sb),
        a.u.shift(sa) - b.u.shift(sb),
        a.v.shift(sa) - b.v.shift(sb),
    )


def _witness(row: _Row, f: MPoly, g: MPoly) -> UnitIdealWitness:
    w = UnitIdealWitness(row.u, row.v, (f, g))
    if not w.check():
        raise WitnessError("cofactors do not satisfy u*f + v*g = 1")
    return w


def unit_ideal(
    f: MPoly, g: MPoly, limits: ResourceLimits | None = None
) -> UnitIdealWitness | Refutation:
    """Decide whether ``(f, g)`` is the unit ideal.

    Returns a :class:`UnitIdealWitness` (re-verified before returning) or a
    :class:`Refutation` holding a reduced Groebner basis without constants.
    Raises :class:`ResourceLimitExceeded` when a cap is hit; that outcome
    says nothing about the answer.
    """
    f._check_vars(g)
    if f.is_zero() or g.is_zero():
        raise ValueError("unit_ideal needs two nonzero polynomials")
    limits = limits or ResourceLimits()
    variables = f.variables
    one, zero = MPoly.const(1, variables), MPoly.zero(variables)

    basis: list[_Row] = []
    pairs: list[tuple[int, int]] = []

    def admit(p: MPoly, u: MPoly, v: MPoly):
        deg = p.total_degree()
        if deg > limits.max_degree:
            raise ResourceLimitExceeded(f"basis element of degree {deg} exceeds cap {limits.max_degree}")
        if len(basis) >= limits.max_basis:
            raise ResourceLimitExceeded(f"basis size exceeds cap {limits.max_basis}")
        row = _Row(p, u, v)
        if deg == 0:
            return row
        k = len(basis)
        basis.append(row)
        pairs.extend((i, k) for i in range(k))
        return None

    for p, u, v in ((f, one, zero), (g, zero, one)):
        found = admit(p, u, v)
        if found is not None:
            return _witness(found, f, g)

    while pairs:
        i, j = pairs.pop(0)
        a, b = basis[i], basis[j]
        lcm = _lcm(a.lm, b.lm)
        # first criterion: coprime leading monomials reduce to zero
        if lcm == (a.lm[0] + b.lm[0], a.lm[1] + b.lm[1]):
            continue
        # chain criterion
        pending = set(pairs)
        if any(
            k not in (i, j)
            and _divides(basis[k].lm, lcm)
            and (min(i, k), max(i, k)) not in pending
            and (min(j, k), max(j, k)) not in pending
            for k in range(len(basis))
        ):
            continue
        deg = lcm[0] + lcm[1]
        if deg > limits.max_degree:
            raise ResourceLimitExceeded(f"S-polynomial degree {deg} exceeds cap {limits.max_degree}")
        s, su, sv = _spoly(a, b)
        r, ru, rv = _reduce(s, su, sv, basis, limits)
        if r.is_zero():
            continue
        found = admit(r, ru, rv)
        if found is not None:
            return _witness(found, f, g)

    return Refutation((f, g), tuple(_reduced_basis([row.p for row in basis])))


def _reduced_basis(polys: list[MPoly]) -> list[MPoly]:
    polys = [p.monic() for p in polys]
    minimal = [
        p
        for i, p in enumerate(polys)
        if not any(
            j != i
            and _divides(q.leading_monomial(), p.leading_monomial())
            and (q.leading_monomial() != p.leading_monomial() or j < i)
            for j, q in enumerate(polys)
        )
    ]
    out = []
    for i, p in enumerate(minimal):
        others = [_Row(q, q, q) for j, q in enumerate(minimal) if j != i]
        r, _, _ = _reduce(p, p, p, others, ResourceLimits(max_terms=10**9))
        out.append(r.monic())
    return sorted(out, key=lambda p: grlex_key(p.leading_monomial()), reverse=True)


def _is_unit(p: MPoly) -> bool:
    return p.is_constant() and not p.is_zero()


def naive_twin_resultant_criterion(f: MPoly, g: MPoly) -> bool:
    """Both plain resultants are nonzero constants (or an input is constant).

    Sound in one direction only: a True answer implies ``V(f) & V(g)`` is
    empty, but curves that only meet "at infinity" in one projection (for
    instance ``2yz^2 + 3z^3 - 1`` and ``3z``) also give a False answer.
    """
    if _is_unit(f) or _is_unit(g):
        return True
    v0, v1 = f.variables
    return _is_unit(resultant(f, g, v1)) and _is_unit(resultant(f, g, v0))


def _top_form_value(f: MPoly, t: Fraction, var_index: int) -> Fraction:
    # top homogeneous part of f evaluated with the eliminated variable set to 1
    d = f.total_degree()
    total = Fraction(0)
    for m, c in f.items():
        if m[0] + m[1] == d:
            total += c * t ** m[1 - var_index]
    return total


def shear(f: MPoly, t: Fraction, var: str) -> MPoly:
    """Substitute ``other -> other + t*var``; ``var`` is left unchanged."""
    i = f.var_index(var)
    v0, v1 = f.variables
    lin = MPoly.var(v0 if i == 1 else v1, f.variables) + MPoly.var(var, f.variables).scale(t)
    out = MPoly.zero(f.variables)
    powers = {0: MPoly.const(1, f.variables)}
    for m, c in sorted(f.items()):
        e_other = m[1 - i]
        if e_other not in powers:
            powers[e_other] = lin**e_other
        mono = (m[0], 0) if i == 0 else (0, m[1])
        out = out + (powers[e_other] * c).shift(mono)
    return out


def shear_parameter(f: MPoly, g: MPoly, var: str) -> Fraction:
    """First ``t`` in 0, 1, -1, 2, -2, ... making both leading coefficients in ``var`` constant."""
    i = f.var_index(var)
    k = 0
    while True:
        t = Fraction((k + 1) // 2 * (1 if k % 2 else -1))
        if _top_form_value(f, t, i) and _top_form_value(g, t, i):
            return t
        k += 1


def twin_resultant_criterion(f: MPoly, g: MPoly) -> bool:
    """Decide ``V(f) & V(g) == {}`` with resultants only.

    Before eliminating a variable the pair is sheared so that both leading
    coefficients in that variable are nonzero constants.  Then a root of the
    resultant always lifts to a common zero, so the curves are disjoint
    exactly when the resultant is a nonzero constant.  Both variables are
    eliminated and the answers must agree.
    """
    if _is_unit(f) or _is_unit(g):
        return True
    answers = []
    for var in f.variables:
        t = shear_parameter(f, g, var)
        fs, gs = shear(f, t, var), shear(g, t, var)
        answers.append(_is_unit(resultant(fs, gs, var)))
    if answers[0] != answers[1]:
        raise ArithmeticError("sheared resultants disagree; this is a bug")
    return answers[0]
