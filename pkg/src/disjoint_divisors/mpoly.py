"""Exact sparse bivariate polynomials over the rationals.

A polynomial is a map from exponent pairs ``(e0, e1)`` to nonzero
:class:`fractions.Fraction` coefficients, together with an ordered pair of
variable labels (``("y", "z")`` by default).  The first label is the
"larger" variable: monomials are compared in graded lexicographic order,
total degree first, then the exponent of the first variable.

Large products go through Kronecker substitution: both operands are scaled
to integer coefficients, packed into one big integer each, multiplied once,
and unpacked.  The result is identical to the schoolbook product; only the
running time differs.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Iterator, Mapping, Union

try:  # GMP multiplication is much faster than CPython's Karatsuba
    import gmpy2

    _mpz = gmpy2.mpz
except ImportError:  # pragma: no cover
    gmpy2 = None
    _mpz = int

Rat = Fraction
Monomial = tuple[int, int]
Scalar = Union[int, Fraction]

DEFAULT_VARS = ("y", "z")

# schoolbook below this many coefficient products
_KRONECKER_THRESHOLD = 4000


_RAT = re.compile(r"-?\d+(?:/\d+)?")


def parse_rat(text: str) -> Fraction:
    """Parse a reduced fraction string such as ``"-1"`` or ``"2/3"``."""
    if not isinstance(text, str) or not _RAT.fullmatch(text):
        raise ValueError(f"expected a fraction string like '-2/3', got {text!r}")
    num, _, den = text.partition("/")
    if den and int(den) == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den) if den else 1)


def format_rat(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def grlex_key(m: Monomial) -> tuple[int, int]:
    """Sort key for graded lexicographic order with the first variable largest."""
    return (m[0] + m[1], m[0])


class PointQ2:
    """A rational point of the affine plane, coordinates in variable order."""

    __slots__ = ("y", "z")

    def __init__(self, y: Scalar, z: Scalar):
        object.__setattr__(self, "y", Fraction(y))
        object.__setattr__(self, "z", Fraction(z))

    def __setattr__(self, name, value):
        raise AttributeError("PointQ2 is immutable")

    def __iter__(self) -> Iterator[Fraction]:
        yield self.y
        yield self.z

    def __eq__(self, other) -> bool:
        if isinstance(other, PointQ2):
            return self.y == other.y and self.z == other.z
        if isinstance(other, tuple) and len(other) == 2:
            return self.y == other[0] and self.z == other[1]
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.y, self.z))

    def __repr__(self) -> str:
        return f"PointQ2({format_rat(self.y)}, {format_rat(self.z)})"

    def to_json(self) -> list[str]:
        return [format_rat(self.y), format_rat(self.z)]

    @classmethod
    def from_json(cls, data) -> "PointQ2":
        if not isinstance(data, (list, tuple)) or len(data) != 2:
            raise ValueError(f"point must be a pair of fraction strings: {data!r}")
        return cls(parse_rat(data[0]), parse_rat(data[1]))


class MPoly:
    """Immutable sparse polynomial in two variables with rational coefficients.

    Equality, hashing and serialization only depend on the mathematical
    polynomial and the variable labels.
    """

    __slots__ = ("_terms", "_vars", "_hash")

    def __init__(
        self,
        terms: Mapping[Monomial, Scalar] | Iterable[tuple[Monomial, Scalar]] = (),
        variables: tuple[str, str] = DEFAULT_VARS,
    ):
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[Monomial, Fraction] = {}
        for (a, b), c in items:
            if a < 0 or b < 0:
                raise ValueError(f"negative exponent in monomial {(a, b)}")
            c = Fraction(c)
            if c:
                key = (int(a), int(b))
                clean[key] = clean.get(key, Fraction(0)) + c
                if not clean[key]:
                    del clean[key]
        if len(variables) != 2 or variables[0] == variables[1]:
            raise ValueError(f"need two distinct variable labels, got {variables!r}")
        object.__setattr__(self, "_terms", clean)
        object.__setattr__(self, "_vars", (str(variables[0]), str(variables[1])))
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _raw(cls, terms: dict[Monomial, Fraction], variables: tuple[str, str]) -> "MPoly":
        # caller guarantees nonzero Fraction coefficients
        obj = cls.__new__(cls)
        object.__setattr__(obj, "_terms", terms)
        object.__setattr__(obj, "_vars", variables)
        object.__setattr__(obj, "_hash", None)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("MPoly is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, variables: tuple[str, str] = DEFAULT_VARS) -> "MPoly":
        return cls._raw({}, tuple(variables))

    @classmethod
    def const(cls, c: Scalar, variables: tuple[str, str] = DEFAULT_VARS) -> "MPoly":
        c = Fraction(c)
        return cls._raw({(0, 0): c} if c else {}, tuple(variables))

    @classmethod
    def var(cls, name: str, variables: tuple[str, str] = DEFAULT_VARS) -> "MPoly":
        idx = list(variables).index(name)
        return cls._raw({(1, 0) if idx == 0 else (0, 1): Fraction(1)}, tuple(variables))

    # -- basic accessors ----------------------------------------------

    @property
    def variables(self) -> tuple[str, str]:
        return self._vars

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        """A copy of the term map."""
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and (0, 0) in self._terms)

    def constant_value(self) -> Fraction:
        return self._terms.get((0, 0), Fraction(0))

    def coefficient(self, m: Monomial) -> Fraction:
        return self._terms.get(m, Fraction(0))

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        """Terms in descending monomial order (leading term first)."""
        return sorted(self._terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def leading_monomial(self) -> Monomial:
        if not self._terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self._terms, key=grlex_key)

    def leading_coefficient(self) -> Fraction:
        return self._terms[self.leading_monomial()]

    def total_degree(self) -> int | None:
        if not self._terms:
            return None
        return max(a + b for a, b in self._terms)

    def var_index(self, var: str) -> int:
        try:
            return self._vars.index(var)
        except ValueError:
            raise ValueError(f"unknown variable {var!r}; labels are {self._vars}") from None

    def degree(self, var: str) -> int | None:
        """Highest exponent of ``var``; ``None`` for the zero polynomial."""
        i = self.var_index(var)
        if not self._terms:
            return None
        return max(m[i] for m in self._terms)

    # -- arithmetic -----------------------------------------------------

    def _check_vars(self, other: "MPoly") -> None:
        if self._vars != other._vars:
            raise ValueError(f"variable labels differ: {self._vars} vs {other._vars}")

    def _coerce(self, other) -> "MPoly":
        if isinstance(other, MPoly):
            self._check_vars(other)
            return other
        if isinstance(other, (int, Fraction)):
            return MPoly.const(other, self._vars)
        return NotImplemented

    def __add__(self, other) -> "MPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other._terms:
            return self
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s += c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return MPoly._raw(out, self._vars)

    __radd__ = __add__

    def __neg__(self) -> "MPoly":
        return MPoly._raw({m: -c for m, c in self._terms.items()}, self._vars)

    def __sub__(self, other) -> "MPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "MPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other) -> "MPoly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return _mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "MPoly":
        if not isinstance(k, int) or k < 0:
            raise ValueError(f"exponent must be a non-negative integer, got {k!r}")
        result = MPoly.const(1, self._vars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale(self, c: Scalar) -> "MPoly":
        c = Fraction(c)
        if not c:
            return MPoly.zero(self._vars)
        return MPoly._raw({m: v * c for m, v in self._terms.items()}, self._vars)

    def shift(self, m: Monomial) -> "MPoly":
        """Multiply by the monomial ``m``."""
        a, b = m
        return MPoly._raw({(x + a, y + b): c for (x, y), c in self._terms.items()}, self._vars)

    def __eq__(self, other) -> bool:
        if isinstance(other, MPoly):
            return self._vars == other._vars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == MPoly.const(other, self._vars)._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self._vars, frozenset(self._terms.items()))))
        return self._hash

    # -- evaluation and substitution ----------------------------------

    def __call__(self, point) -> Fraction:
        return evaluate(self, point)

    def substitute(self, var: str, value: Scalar) -> "MPoly":
        """Set ``var`` to a rational value; the result keeps both labels."""
        i = self.var_index(var)
        value = Fraction(value)
        out: dict[Monomial, Fraction] = {}
        powers: dict[int, Fraction] = {}
        for m, c in self._terms.items():
            e = m[i]
            p = powers.get(e)
            if p is None:
                p = powers[e] = value**e
            key = (0, m[1]) if i == 0 else (m[0], 0)
            out[key] = out.get(key, Fraction(0)) + c * p
        return MPoly({k: v for k, v in out.items() if v}, self._vars)

    def coefficients_in(self, var: str) -> dict[int, "MPoly"]:
        """Split into ``{k: c_k}`` with ``self = sum c_k * var**k``.

        Each ``c_k`` is a polynomial in the other variable (same labels).
        """
        i = self.var_index(var)
        buckets: dict[int, dict[Monomial, Fraction]] = {}
        for m, c in self._terms.items():
            e = m[i]
            key = (0, m[1]) if i == 0 else (m[0], 0)
            buckets.setdefault(e, {})[key] = c
        return {e: MPoly._raw(t, self._vars) for e, t in buckets.items()}

    def derivative(self, var: str) -> "MPoly":
        i = self.var_index(var)
        out = {}
        for m, c in self._terms.items():
            if m[i]:
                key = (m[0] - 1, m[1]) if i == 0 else (m[0], m[1] - 1)
                out[key] = c * m[i]
        return MPoly._raw(out, self._vars)

    def relabel(self, variables: tuple[str, str]) -> "MPoly":
        return MPoly._raw(dict(self._terms), tuple(variables))

    # -- integer views ----------------------------------------------------

    def denominator_lcm(self) -> int:
        d = 1
        for c in self._terms.values():
            d = lcm(d, c.denominator)
        return d

    def primitive(self) -> "MPoly":
        """Scale to integer coefficients with gcd 1 and positive leading coefficient."""
        if not self._terms:
            return self
        d = self.denominator_lcm()
        ints = {m: c.numerator * (d // c.denominator) for m, c in self._terms.items()}
        g = 0
        for v in ints.values():
            g = gcd(g, v)
        if ints[self.leading_monomial()] < 0:
            g = -g
        return MPoly._raw({m: Fraction(v // g) for m, v in ints.items()}, self._vars)

    def monic(self) -> "MPoly":
        if not self._terms:
            return self
        return self.scale(1 / self.leading_coefficient())

    # -- serialization ------------------------------------------------

    def to_json(self) -> list[list]:
        return [[format_rat(c), a, b] for (a, b), c in self.sorted_terms()]

    @classmethod
    def from_json(cls, data, variables: tuple[str, str] = DEFAULT_VARS) -> "MPoly":
        if not isinstance(data, list):
            raise ValueError("polynomial must be a JSON array of [coeff, e0, e1] terms")
        terms: dict[Monomial, Fraction] = {}
        for item in data:
            if not isinstance(item, list) or len(item) != 3:
                raise ValueError(f"malformed term {item!r}")
            coeff, a, b = item
            if not (isinstance(a, int) and isinstance(b, int)) or isinstance(a, bool) or isinstance(b, bool):
                raise ValueError(f"exponents must be integers: {item!r}")
            c = parse_rat(coeff)
            if not c:
                raise ValueError(f"zero coefficient stored in {item!r}")
            if (a, b) in terms:
                raise ValueError(f"duplicate monomial {(a, b)}")
            if a < 0 or b < 0:
                raise ValueError(f"negative exponent in {item!r}")
            terms[(a, b)] = c
        return cls._raw(terms, tuple(variables))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    def __repr__(self) -> str:
        return f"MPoly({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        v0, v1 = self._vars
        parts = []
        for (a, b), c in self.sorted_terms():
            mono = []
            if a:
                mono.append(v0 if a == 1 else f"{v0}^{a}")
            if b:
                mono.append(v1 if b == 1 else f"{v1}^{b}")
            m = "*".join(mono)
            if not m:
                parts.append(format_rat(c))
            elif c == 1:
                parts.append(m)
            elif c == -1:
                parts.append("-" + m)
            else:
                parts.append(f"{format_rat(c)}*{m}")
        return " + ".join(parts).replace("+ -", "- ")


# -- multiplication -------------------------------------------------------


def _mul(f: MPoly, g: MPoly) -> MPoly:
    ft, gt = f._terms, g._terms
    if not ft or not gt:
        return MPoly.zero(f._vars)
    if len(ft) * len(gt) < _KRONECKER_THRESHOLD:
        return _mul_schoolbook(f, g)
    return _mul_kronecker(f, g)


def _mul_schoolbook(f: MPoly, g: MPoly) -> MPoly:
    out: dict[Monomial, Fraction] = {}
    get = out.get
    for (a1, b1), c1 in f._terms.items():
        for (a2, b2), c2 in g._terms.items():
            key = (a1 + a2, b1 + b2)
            out[key] = get(key, 0) + c1 * c2
    return MPoly._raw({m: Fraction(c) for m, c in out.items() if c}, f._vars)


def _integer_form(f: MPoly) -> tuple[int, dict[Monomial, int]]:
    d = f.denominator_lcm()
    return d, {m: c.numerator * (d // c.denominator) for m, c in f._terms.items()}


def _mul_kronecker(f: MPoly, g: MPoly) -> MPoly:
    df, fi = _integer_form(f)
    dg, gi = _integer_form(g)
    deg_f1 = max(m[1] for m in fi)
    deg_g1 = max(m[1] for m in gi)
    deg_f0 = max(m[0] for m in fi)
    deg_g0 = max(m[0] for m in gi)
    width = deg_f1 + deg_g1 + 1  # slots per step of the first variable
    bound = max(abs(v) for v in fi.values()) * max(abs(v) for v in gi.values()) * min(len(fi), len(gi))
    # slot bits: room for sign, rounded to whole bytes
    nbytes = (bound.bit_length() + 2 + 7) // 8
    bits = 8 * nbytes
    half = 1 << (bits - 1)

    def pack(ints: dict[Monomial, int], deg0: int) -> int:
        nslots = (deg0 + 1) * width
        buf = bytearray(half.to_bytes(nbytes, "little") * nslots)
        for (a, b), v in ints.items():
            k = (a * width + b) * nbytes
            buf[k : k + nbytes] = (v + half).to_bytes(nbytes, "little")
        return int.from_bytes(buf, "little") - _slot_bias(half, nbytes, nslots)

    nf = _mpz(pack(fi, deg_f0))
    ng = _mpz(pack(gi, deg_g0))
    prod = int(nf * ng)
    nslots = (deg_f0 + deg_g0 + 1) * width
    raw = (prod + _slot_bias(half, nbytes, nslots)).to_bytes(nslots * nbytes, "little")
    denom = df * dg
    out: dict[Monomial, Fraction] = {}
    from_bytes = int.from_bytes
    for k in range(nslots):
        v = from_bytes(raw[k * nbytes : (k + 1) * nbytes], "little") - half
        if v:
            a, b = divmod(k, width)
            out[(a, b)] = Fraction(v, denom)
    return MPoly._raw(out, f._vars)


def _slot_bias(half: int, nbytes: int, nslots: int) -> int:
    # sum_k half * 2^(8*nbytes*k), built from bytes to stay linear-time
    return int.from_bytes(half.to_bytes(nbytes, "little") * nslots, "little")


# -- module-level operations ---------------------------------------------


def add(f: MPoly, g: MPoly) -> MPoly:
    return f + g


def mul(f: MPoly, g: MPoly) -> MPoly:
    return f * g


def pow(f: MPoly, k: int) -> MPoly:  # noqa: A001 - mirrors the operation name
    return f**k


def product(polys: Iterable[MPoly], variables: tuple[str, str] = DEFAULT_VARS) -> MPoly:
    result = MPoly.const(1, variables)
    for p in polys:
        result = result * p
    return result


def evaluate(f: MPoly, point) -> Fraction:
    """Exact value of ``f`` at a rational point.

    Works on integer numerators with a single division at the end, which
    keeps evaluation of polynomials with thousands of terms cheap.
    """
    py, pz = (Fraction(c) for c in point)
    if not f._terms:
        return Fraction(0)
    dmax0 = max(m[0] for m in f._terms)
    dmax1 = max(m[1] for m in f._terms)
    ny, dy = py.numerator, py.denominator
    nz, dz = pz.numerator, pz.denominator
    pow_ny = _powers(ny, dmax0)
    pow_dy = _powers(dy, dmax0)
    pow_nz = _powers(nz, dmax1)
    pow_dz = _powers(dz, dmax1)
    L = f.denominator_lcm()
    total = 0
    for (a, b), c in f._terms.items():
        coeff = c.numerator * (L // c.denominator)
        total += coeff * pow_ny[a] * pow_dy[dmax0 - a] * pow_nz[b] * pow_dz[dmax1 - b]
    return Fraction(total, L * pow_dy[dmax0] * pow_dz[dmax1])


def _powers(base: int, n: int) -> list[int]:
    out = [1] * (n + 1)
    for i in range(1, n + 1):
        out[i] = out[i - 1] * base
    return out


eval_at = evaluate


def deg_in(f: MPoly, var: str) -> int | None:
    """Degree in ``var``; ``None`` stands for the undefined degree of zero."""
    return f.degree(var)


def reciprocal_transform(f: MPoly, d: int, new_var: str = "x") -> MPoly:
    """Return ``x**d * f(y, 1/x)`` as a polynomial in ``(y, x)``.

    This is the equation of the closure of ``V(f)`` in the chart where the
    second coordinate is replaced by its reciprocal.
    """
    v0, v1 = f.variables
    deg = f.degree(v1)
    if deg is not None and d < deg:
        raise ValueError(f"transform degree {d} is below deg_{v1} = {deg}")
    # inverse direction: when f is already in (y, x), map back to (y, z)
    target = (v0, "z") if v1 == new_var else (v0, new_var)
    return MPoly._raw({(a, d - b): c for (a, b), c in f._terms.items()}, target)


def x_valuation(f: MPoly, var: str) -> int | None:
    """Smallest exponent of ``var`` among the terms (order of vanishing)."""
    i = f.var_index(var)
    if not f._terms:
        return None
    return min(m[i] for m in f._terms)


# -- division ------------------------------------------------------------


def divmod_poly(f: MPoly, g: MPoly) -> tuple[MPoly, MPoly]:
    """Multivariate division of ``f`` by the single divisor ``g`` (grlex).

    Returns ``(q, r)`` with ``f = q*g + r`` and no term of ``r`` divisible by
    the leading monomial of ``g``.  Because ``{g}`` is a Groebner basis of
    ``(g)``, ``r == 0`` exactly when ``g`` divides ``f``.
    """
    f._check_vars(g)
    if not g._terms:
        raise ZeroDivisionError("division by the zero polynomial")
    lm = g.leading_monomial()
    lc = g._terms[lm]
    gt = [(m, c) for m, c in g._terms.items() if m != lm]
    rem = dict(f._terms)
    quo: dict[Monomial, Fraction] = {}
    out_r: dict[Monomial, Fraction] = {}
    while rem:
        m = max(rem, key=grlex_key)
        c = rem.pop(m)
        if m[0] >= lm[0] and m[1] >= lm[1]:
            qm = (m[0] - lm[0], m[1] - lm[1])
            qc = c / lc
            quo[qm] = quo.get(qm, Fraction(0)) + qc
            for (a, b), gc in gt:
                key = (a + qm[0], b + qm[1])
                v = rem.get(key, Fraction(0)) - qc * gc
                if v:
                    rem[key] = v
                else:
                    rem.pop(key, None)
        else:
            out_r[m] = c
    return (
        MPoly._raw({m: c for m, c in quo.items() if c}, f._vars),
        MPoly._raw(out_r, f._vars),
    )


def exact_div(f: MPoly, g: MPoly) -> MPoly:
    q, r = divmod_poly(f, g)
    if r:
        raise ArithmeticError(f"{g} does not divide {f}")
    return q


def divides(g: MPoly, f: MPoly) -> bool:
    return divmod_poly(f, g)[1].is_zero()


def dumps_json(obj) -> str:
    """Canonical compact JSON used for files and digests."""
    return json.dumps(obj, separators=(",", ":"), sort_keys=True, ensure_ascii=True)
