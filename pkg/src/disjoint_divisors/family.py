"""The recursive family of pairwise-disjoint irreducible curves in the plane.

Starting from ``f0 = z`` and ``f1 = y*z^2 + 1``, each step picks the first
enumerated rational point ``P`` not yet on any curve and sets

    f_n = a_n * z^(d_n - 1) + f_1 * ... * f_(n-1),    a_n chosen so f_n(P) = 0,

with ``d_n = d_1 + ... + d_(n-1)`` (and the special step
``f_2 = a_2 * z^3 + f_1^2``).  Every ``f_n`` with ``n >= 1`` is ``1`` modulo
``z``, which is what makes the curves pairwise disjoint.

This module builds the family and produces the certificates for its
properties: disjointness (structural and Groebner), irreducibility (Eisenstein
after the chart change ``z -> 1/x``), coverage of enumerated points, and
degree growth.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Optional

from .elimination import (
    Refutation,
    ResourceLimitExceeded,
    ResourceLimits,
    UnitIdealWitness,
    unit_ideal,
)
from .mpoly import (
    MPoly,
    PointQ2,
    evaluate,
    format_rat,
    parse_rat,
    reciprocal_transform,
    x_valuation,
)

ENUMERATION_ID = "height-diagonal-v1"

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"

_Y = MPoly.var("y")
_Z = MPoly.var("z")
F0 = _Z
F1 = _Y * _Z**2 + 1


class ConstructionError(RuntimeError):
    """A construction invariant failed; the family state must not be used."""


class ContradictionError(RuntimeError):
    """Two independent disjointness checks disagree."""


# -- enumeration of Q and Q^2 -----------------------------------------------

_rationals: list[Fraction] = [Fraction(0)]
_next_height = [2]
_enum_lock = threading.Lock()


def rational_at(index: int) -> Fraction:
    """The ``index``-th rational in the order 0, 1, -1, 1/2, -1/2, 2, -2, 1/3, ...

    Rationals ``p/q`` (lowest terms, ``q > 0``) are grouped by ``|p| + q``;
    inside a group by ``|p|`` ascending, the positive value first.
    """
    if index < 0:
        raise ValueError("index must be non-negative")
    with _enum_lock:
        while len(_rationals) <= index:
            h = _next_height[0]
            for p in range(1, h):
                q = h - p
                if gcd(p, q) == 1:
                    _rationals.append(Fraction(p, q))
                    _rationals.append(Fraction(-p, q))
            _next_height[0] = h + 1
        return _rationals[index]


def next_point(cursor: int) -> PointQ2:
    """The ``cursor``-th point of Q^2.

    Index pairs ``(a, b)`` run over diagonals ``a + b = 0, 1, 2, ...`` with
    ``a`` ascending, and map to ``(y, z) = (rational_at(a), rational_at(b))``.
    """
    if cursor < 0:
        raise ValueError("cursor must be non-negative")
    s = 0
    while (s + 1) * (s + 2) // 2 <= cursor:
        s += 1
    a = cursor - s * (s + 1) // 2
    return PointQ2(rational_at(a), rational_at(s - a))


# -- family state ---------------------------------------------------------------


@dataclass(frozen=True)
class FamilyEntry:
    index: int
    poly: MPoly
    d: int
    a: Optional[Fraction] = None
    point: Optional[PointQ2] = None
    point_index: Optional[int] = None

    def to_json(self) -> dict:
        out = {"n": self.index, "d": self.d}
        if self.a is not None:
            out["a"] = format_rat(self.a)
            out["point"] = self.point.to_json()
            out["point_index"] = self.point_index
        out["poly"] = self.poly.to_json()
        return out


@dataclass(frozen=True)
class FamilyState:
    entries: tuple[FamilyEntry, ...]
    cursor: int = 0
    # f_1 * ... * f_(n-1) for the last index n; cache only, rebuilt when absent
    _partial: Optional[MPoly] = field(default=None, compare=False, repr=False)

    @property
    def n(self) -> int:
        """Index of the last constructed polynomial."""
        return len(self.entries) - 1

    @property
    def polys(self) -> list[MPoly]:
        return [e.poly for e in self.entries]

    @property
    def degrees(self) -> list[int]:
        return [e.d for e in self.entries]

    def __getitem__(self, i: int) -> FamilyEntry:
        return self.entries[i]

    def product_through(self, k: int) -> MPoly:
        """``f_1 * ... * f_k`` (``1`` for ``k = 0``)."""
        if self._partial is not None and k in (self.n - 1, self.n):
            return self._partial if k == self.n - 1 else self._partial * self.entries[-1].poly
        p = MPoly.const(1)
        for e in self.entries[1 : k + 1]:
            p = p * e.poly
        return p

    def to_json(self) -> dict:
        return {
            "enumeration": ENUMERATION_ID,
            "cursor": self.cursor,
            "entries": [e.to_json() for e in self.entries],
        }

    @classmethod
    def from_json(cls, data: dict) -> "FamilyState":
        if not isinstance(data, dict) or "entries" not in data:
            raise ValueError("family file must be an object with an 'entries' array")
        if data.get("enumeration") != ENUMERATION_ID:
            raise ValueError(f"unsupported enumeration {data.get('enumeration')!r}; expected {ENUMERATION_ID}")
        entries = []
        try:
            for k, raw in enumerate(data["entries"]):
                if raw.get("n") != k:
                    raise ValueError(f"entry {k} has index {raw.get('n')!r}")
                poly = MPoly.from_json(raw["poly"])
                a = parse_rat(raw["a"]) if "a" in raw else None
                point = PointQ2.from_json(raw["point"]) if "point" in raw else None
                entries.append(FamilyEntry(k, poly, int(raw["d"]), a, point, raw.get("point_index")))
            state = cls(tuple(entries), int(data.get("cursor", 0)))
            validate(state)
        except (KeyError, TypeError, AttributeError) as exc:
            raise ValueError(f"malformed family entry: {exc!r}") from None
        except ConstructionError as exc:
            raise ValueError(f"family file fails validation: {exc}") from None
        return state


def validate(state: FamilyState) -> None:
    """Check the stored invariants; raise :class:`ConstructionError` on any breach."""
    es = state.entries
    if len(es) < 2 or es[0].poly != F0 or es[1].poly != F1 or es[0].d != 1 or es[1].d != 2:
        raise ConstructionError("family must start with f0 = z, f1 = y*z^2 + 1")
    for e in es:
        if e.poly.degree("z") != e.d:
            raise ConstructionError(f"deg_z f_{e.index} = {e.poly.degree('z')} but d_{e.index} = {e.d}")
        if e.index >= 1 and e.poly.substitute("z", 0) != 1:
            raise ConstructionError(f"f_{e.index} is not 1 modulo z")
        if e.index >= 2:
            if e.a is None or e.point is None or not e.a:
                raise ConstructionError(f"entry {e.index} lacks a nonzero coefficient or point")
            if evaluate(e.poly, e.point):
                raise ConstructionError(f"P_{e.index} does not lie on D_{e.index}")
            if e.point_index is None or next_point(e.point_index) != e.point:
                raise ConstructionError(f"P_{e.index} is not enumerated point {e.point_index}")
            if e.a != _coefficient_at_point(state, e.index):
                raise ConstructionError(f"a_{e.index} does not match the value forced by P_{e.index}")
    expected = expected_degrees(len(es) - 1)
    if state.degrees != expected:
        raise ConstructionError(f"degree sequence {state.degrees} breaks the recurrence {expected}")


def _coefficient_at_point(state: FamilyState, n: int) -> Fraction:
    # a_n from the defining condition f_n(P_n) = 0, using the stored f_1..f_(n-1)
    p = state.entries[n].point
    vals = [evaluate(state.entries[k].poly, p) for k in range(1, n)]
    if n == 2:
        d1 = state.entries[1].d
        return -vals[0] ** d1 / p.z ** (2 * d1 - 1)
    prod = Fraction(1)
    for v in vals:
        prod *= v
    return -prod / p.z ** (state.entries[n].d - 1)


def expected_degrees(n: int) -> list[int]:
    """``d_0 .. d_n`` from the recurrence alone."""
    d = [1, 2]
    for k in range(2, n + 1):
        d.append(2 * d[1] if k == 2 else sum(d[1:k]))
    return d[: n + 1]


def init_family() -> FamilyState:
    return FamilyState((FamilyEntry(0, F0, 1), FamilyEntry(1, F1, 2)), 0, MPoly.const(1))


def on_family(state: FamilyState, p: PointQ2) -> Optional[int]:
    """Least index ``i`` with ``f_i(p) = 0``, or ``None``."""
    for e in state.entries:
        if not evaluate(e.poly, p):
            return e.index
    return None


def extend(state: FamilyState) -> FamilyState:
    """Append the next polynomial of the family."""
    n = state.n + 1
    if n < 2:
        raise ValueError("state must already contain f0 and f1")
    cursor = state.cursor
    while on_family(state, next_point(cursor)) is not None:
        cursor += 1
    point = next_point(cursor)
    d1 = state.entries[1].d
    if n == 2:
        d = 2 * d1
        exponent = 2 * d1 - 1
        prod_term = state.entries[1].poly ** d1
        prod_value = evaluate(state.entries[1].poly, point) ** d1
    else:
        d = sum(e.d for e in state.entries[1:])
        exponent = d - 1
        prod_term = state.product_through(n - 1)
        prod_value = Fraction(1)
        for e in state.entries[1:]:
            prod_value *= evaluate(e.poly, point)
    z_value = evaluate(F0, point)
    if not z_value or not prod_value:
        raise ConstructionError(f"chosen point {point} lies on an existing curve")
    a = -prod_value / z_value**exponent
    poly = F0**exponent * a + prod_term
    if evaluate(poly, point):
        raise ConstructionError(f"f_{n} does not vanish at P_{n} = {point}")
    if poly.degree("z") != d:
        raise ConstructionError(f"deg_z f_{n} = {poly.degree('z')}, recurrence gives {d}")
    if poly.substitute("z", 0) != 1:
        raise ConstructionError(f"f_{n} is not 1 modulo z")
    entry = FamilyEntry(n, poly, d, a, point, cursor)
    partial = prod_term if n >= 3 else state.entries[1].poly
    return FamilyState(state.entries + (entry,), cursor + 1, partial)


def build_family(n_max: int) -> FamilyState:
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    state = init_family()
    while state.n < n_max:
        state = extend(state)
    return state


# -- disjointness -----------------------------------------------------------------


@dataclass(frozen=True)
class DisjointnessCertificate:
    pair: tuple[int, int]
    method: str
    evidence: dict
    conclusion: str
    witness: Optional[UnitIdealWitness] = None

    def to_evidence(self) -> dict:
        ev = {"method": self.method, **self.evidence}
        if self.witness is not None:
            ev["witness"] = self.witness.to_json()
        return ev


def _check_pair(state: FamilyState, i: int, j: int) -> None:
    if not (0 <= i < j <= state.n):
        raise IndexError(f"need 0 <= i < j <= {state.n}, got ({i}, {j})")


def recursion_factors(state: FamilyState, j: int) -> dict[int, int]:
    """Exponents ``m_k`` with ``f_j - a_j * f0^e = prod f_k^m_k`` by construction."""
    if j == 2:
        return {1: state.entries[1].d}
    return {k: 1 for k in range(1, j)}


def recursion_exponent(state: FamilyState, j: int) -> int:
    return 2 * state.entries[1].d - 1 if j == 2 else state.entries[j].d - 1


class IdentityCache:
    """Memo of verified identities ``f_j - a_j z^e = prod f_k^m_k``.

    Verifying one identity costs a chain of large products, shared by all
    pairs ``(i, j)`` with the same ``j``.
    """

    def __init__(self, state: FamilyState):
        self.state = state
        self._done: dict[int, bool] = {}
        self._lock = threading.Lock()

    def holds(self, j: int) -> bool:
        with self._lock:
            if j not in self._done:
                self._done[j] = self._verify(j)
            return self._done[j]

    def _verify(self, j: int) -> bool:
        s = self.state
        e = s.entries[j]
        rhs = MPoly.const(1)
        for k, m in sorted(recursion_factors(s, j).items()):
            rhs = rhs * s.entries[k].poly ** m
        lhs = e.poly - F0 ** recursion_exponent(s, j) * e.a
        return lhs == rhs


def structural_disjointness(
    state: FamilyState, i: int, j: int, cache: IdentityCache | None = None
) -> DisjointnessCertificate:
    """Disjointness of ``D_i`` and ``D_j`` from the shape of the recursion.

    For ``i = 0``: ``f_j`` is ``1`` modulo ``z``, so it has no zero on ``z = 0``.
    For ``0 < i < j``: ``f_j - a_j z^e`` is a product having ``f_i`` as a
    factor, so a common zero of ``f_i, f_j`` would be a zero of ``z`` and of
    ``f_i``, impossible because ``f_i`` is ``1`` modulo ``z``.
    """
    _check_pair(state, i, j)
    fj_mod_z = state.entries[j].poly.substitute("z", 0)
    if i == 0:
        ok = fj_mod_z == 1
        ev = {"rule": "f_j mod z", "f_j_mod_z": fj_mod_z.to_json()}
        return DisjointnessCertificate((i, j), "structural", ev, PASS if ok else FAIL)
    cache = cache or IdentityCache(state)
    factors = recursion_factors(state, j)
    fi_mod_z = state.entries[i].poly.substitute("z", 0)
    identity_ok = cache.holds(j)
    ok = identity_ok and factors.get(i, 0) >= 1 and fi_mod_z == 1
    ev = {
        "rule": "f_j - a_j*z^e = prod f_k^m_k, f_i mod z = 1",
        "a_j": format_rat(state.entries[j].a),
        "z_exponent": recursion_exponent(state, j),
        "factors": [[k, m] for k, m in sorted(factors.items())],
        "f_i_mod_z": fi_mod_z.to_json(),
    }
    return DisjointnessCertificate((i, j), "structural", ev, PASS if ok else FAIL)


def groebner_disjointness(
    state: FamilyState, i: int, j: int, limits: ResourceLimits | None = None
) -> DisjointnessCertificate:
    """Disjointness of ``D_i`` and ``D_j`` from a unit-ideal witness."""
    _check_pair(state, i, j)
    f, g = state.entries[i].poly, state.entries[j].poly
    try:
        result = unit_ideal(f, g, limits)
    except ResourceLimitExceeded as exc:
        return DisjointnessCertificate((i, j), "groebner", {"reason": exc.reason}, INCONCLUSIVE)
    if isinstance(result, Refutation):
        raise ContradictionError(f"Groebner engine found a common zero of f_{i} and f_{j}")
    return DisjointnessCertificate((i, j), "groebner", {}, PASS, result)


# -- irreducibility ----------------------------------------------------------------

EISENSTEIN_READING = "Eisenstein at the prime x in Q[x][y], then Gauss's lemma"


@dataclass(frozen=True)
class EisensteinCertificate:
    index: int
    transformed: Optional[MPoly]
    leading_y_coefficient: Optional[Fraction]
    x_valuations: tuple[tuple[int, Optional[int]], ...]
    z_divides: bool
    conclusion: str
    rule: str = "eisenstein"

    def to_evidence(self) -> dict:
        ev = {"rule": self.rule, "z_divides_f": self.z_divides}
        if self.rule == "eisenstein":
            ev.update(
                {
                    "reading": EISENSTEIN_READING,
                    "transformed": self.transformed.to_json(),
                    "leading_y_coefficient": format_rat(self.leading_y_coefficient)
                    if self.leading_y_coefficient is not None
                    else None,
                    "x_valuations": [list(v) for v in self.x_valuations],
                }
            )
        return ev


def eisenstein_conditions(transformed: MPoly) -> tuple[Optional[Fraction], list[tuple[int, Optional[int]]], bool]:
    """Leading y-coefficient, ``(k, v_x(c_k))`` for each y-power, and the verdict."""
    v_y, v_x = transformed.variables
    coeffs = transformed.coefficients_in(v_y)
    top = max(coeffs)
    lead = coeffs[top]
    lead_value = lead.constant_value() if lead.is_constant() else None
    vals = [(k, x_valuation(coeffs[k], v_x) if k in coeffs else None) for k in range(top + 1)]
    ok = top >= 1 and lead_value is not None and lead_value != 0
    for k, v in vals:
        if k == top:
            continue
        if k == 0:
            ok = ok and v == 1
        else:
            ok = ok and (v is None or v >= 1)
    return lead_value, vals, ok


def eisenstein_certificate(state: FamilyState, n: int) -> EisensteinCertificate:
    """Irreducibility of ``f_n`` via the chart ``x = 1/z``.

    ``f_n'(y, x) = x^d_n f_n(y, 1/x)`` is Eisenstein at ``x`` as a polynomial
    in ``y`` with monic leading coefficient, hence irreducible; and since
    ``z`` does not divide ``f_n`` no component of ``V(f_n)`` is lost.  For
    ``n = 1`` the polynomial is primitive of degree one in ``y``.
    """
    if n < 1 or n > state.n:
        raise ValueError(f"irreducibility certificates cover 1 <= n <= {state.n}, got {n}")
    e = state.entries[n]
    z_divides = e.poly.substitute("z", 0).is_zero()
    if n == 1:
        # y*z^2 + 1: degree one in y with coprime coefficients z^2 and 1
        return EisensteinCertificate(1, None, None, (), z_divides, PASS if not z_divides else FAIL, "degree-one-in-y")
    transformed = reciprocal_transform(e.poly, e.d)
    lead, vals, ok = eisenstein_conditions(transformed)
    return EisensteinCertificate(n, transformed, lead, tuple(vals), z_divides, PASS if ok and not z_divides else FAIL)


def linear_certificate(state: FamilyState) -> EisensteinCertificate:
    """``f_0 = z`` has total degree one and is therefore irreducible."""
    ok = state.entries[0].poly.total_degree() == 1
    return EisensteinCertificate(0, None, None, (), False, PASS if ok else FAIL, "total-degree-one")


def irreducibility_certificate(state: FamilyState, n: int) -> EisensteinCertificate:
    return linear_certificate(state) if n == 0 else eisenstein_certificate(state, n)


# -- coverage ------------------------------------------------------------------------


@dataclass(frozen=True)
class CoverageReport:
    points_checked: int
    assignments: tuple[tuple[PointQ2, int], ...]
    uncovered: tuple[PointQ2, ...]

    @property
    def conclusion(self) -> str:
        return PASS if not self.uncovered else FAIL

    def to_evidence(self) -> dict:
        return {
            "enumeration": ENUMERATION_ID,
            "points_checked": self.points_checked,
            "assignments": [[p.to_json(), i] for p, i in self.assignments],
            "uncovered": [p.to_json() for p in self.uncovered],
        }


def coverage_check(state: FamilyState, M: int) -> CoverageReport:
    if M < 1:
        raise ValueError("M must be at least 1")
    assigned, uncovered = [], []
    for c in range(M):
        p = next_point(c)
        i = on_family(state, p)
        if i is None:
            uncovered.append(p)
        else:
            assigned.append((p, i))
    return CoverageReport(M, tuple(assigned), tuple(uncovered))


# -- degree growth -------------------------------------------------------------


@dataclass(frozen=True)
class DegreeGrowthCertificate:
    degrees: tuple[int, ...]
    z_degrees: tuple[int, ...]
    recurrence_holds: bool
    strictly_increasing: bool
    closed_form_holds: bool
    irreducible: tuple[int, ...]
    conclusion: str

    def to_evidence(self) -> dict:
        return {
            "degrees": list(self.degrees),
            "z_degrees": list(self.z_degrees),
            "recurrence": "d_2 = 2*d_1; d_n = d_1 + ... + d_(n-1) for n >= 3",
            "recurrence_holds": self.recurrence_holds,
            "strictly_increasing_from_2": self.strictly_increasing,
            "closed_form": "d_n = 6*2^(n-3) for n >= 3",
            "closed_form_holds": self.closed_form_holds,
            "irreducible_indices": list(self.irreducible),
            "cited": "irreducible curves of unbounded degree cannot all be fibers of one map to a curve",
        }


def no_common_fibration_certificate(
    state: FamilyState, irreducibility: list[EisensteinCertificate] | None = None
) -> DegreeGrowthCertificate:
    """Premises of the no-common-fibration argument: unbounded degree and irreducibility."""
    if len(state.entries) < 4:
        raise ValueError(f"need at least four entries (through n = 3), have {len(state.entries)}")
    if irreducibility is None:
        irreducibility = [irreducibility_certificate(state, k) for k in range(state.n + 1)]
    certified = {c.index for c in irreducibility if c.conclusion == PASS}
    missing = [k for k in range(state.n + 1) if k not in certified]
    if missing:
        raise ValueError(f"missing passing irreducibility certificates for {missing}")
    d = state.degrees
    zd = [e.poly.degree("z") for e in state.entries]
    recurrence = d == expected_degrees(state.n) and zd == d
    increasing = all(d[k + 1] > d[k] for k in range(1, len(d) - 1))
    closed = all(d[k] == 6 * 2 ** (k - 3) for k in range(3, len(d)))
    ok = recurrence and increasing and closed
    return DegreeGrowthCertificate(
        tuple(d), tuple(zd), recurrence, increasing, closed, tuple(sorted(certified)), PASS if ok else FAIL
    )
