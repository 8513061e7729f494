"""Independent re-validation of certificate bundles.

Every check here is plain polynomial arithmetic on the data recorded in the
certificate and the family file: products, substitutions, evaluations and
division by a single polynomial.  No Groebner basis, gcd or search runs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .certificates import Certificate, file_digest, read_bundle
from .family import F0, FamilyState, next_point
from .lattice import fuzz_prop_ortho
from .mpoly import MPoly, PointQ2, divmod_poly, evaluate, parse_rat, reciprocal_transform, x_valuation


@dataclass(frozen=True)
class RecheckOutcome:
    cert: Certificate
    ok: bool
    detail: str = ""

    def line(self) -> str:
        status = "ok" if self.ok else "MISMATCH"
        tail = f": {self.detail}" if self.detail else ""
        return f"{status} {self.cert.kind} {list(self.cert.index)} ({self.cert.conclusion}){tail}"


class _Context:
    def __init__(self, bundle_dir: Path, family_override: Path | None, certs: list[Certificate]):
        self.bundle_dir = bundle_dir
        self.family_override = family_override
        self.certs = certs
        self._families: dict[str, FamilyState] = {}
        self._identities: dict[tuple, bool] = {}

    def family(self, cert: Certificate) -> FamilyState:
        name = cert.inputs.get("family")
        if name is None:
            raise ValueError("certificate does not name a family file")
        path = self.family_override or (self.bundle_dir / name)
        key = str(path)
        if key not in self._families:
            want = cert.inputs.get("family_digest")
            if want is not None and file_digest(path) != want:
                raise ValueError(f"{path} does not match the recorded family digest")
            with open(path, encoding="ascii") as fh:
                self._families[key] = FamilyState.from_json(json.load(fh))
        return self._families[key]

    def identity(self, state: FamilyState, j: int, a: Fraction, e: int, factors: tuple) -> bool:
        key = (id(state), j, a, e, factors)
        if key not in self._identities:
            rhs = MPoly.const(1)
            for k, m in factors:
                rhs = rhs * state.entries[k].poly ** m
            self._identities[key] = state.entries[j].poly - F0**e * a == rhs
        return self._identities[key]


def _disjointness(ctx: _Context, cert: Certificate) -> tuple[bool, str]:
    state = ctx.family(cert)
    i, j, method = cert.index
    ev = cert.evidence
    if method == "groebner":
        from .elimination import UnitIdealWitness  # data class only

        w = UnitIdealWitness.from_json(ev["witness"])
        if w.pair != (state.entries[i].poly, state.entries[j].poly):
            return False, "witness polynomials differ from the family entries"
        return w.check(), "u*f_i + v*f_j = 1"
    fj_mod_z = state.entries[j].poly.substitute("z", 0)
    if i == 0:
        return fj_mod_z == 1, "f_j = 1 mod z"
    factors = tuple((int(k), int(m)) for k, m in ev["factors"])
    if i not in {k for k, m in factors if m >= 1}:
        return False, f"f_{i} is not among the recorded factors"
    if state.entries[i].poly.substitute("z", 0) != 1:
        return False, "f_i is not 1 mod z"
    a = parse_rat(ev["a_j"])
    if not ctx.identity(state, j, a, int(ev["z_exponent"]), factors):
        return False, "recursion identity fails"
    return True, "identity and f_i = 1 mod z"


def _eisenstein(ctx: _Context, cert: Certificate) -> tuple[bool, str]:
    state = ctx.family(cert)
    (n,) = cert.index
    f = state.entries[n].poly
    ev = cert.evidence
    rule = ev["rule"]
    if rule == "total-degree-one":
        return f.total_degree() == 1, "total degree one"
    z_divides = f.substitute("z", 0).is_zero()
    if z_divides != ev["z_divides_f"]:
        return False, "z-divisibility flag is wrong"
    if rule == "degree-one-in-y":
        coeffs = f.coefficients_in("y")
        c0 = coeffs.get(0)
        # c0 a nonzero constant makes the two coefficients coprime
        ok = f.degree("y") == 1 and c0 is not None and c0.is_constant() and not z_divides
        return ok, "degree one in y, constant term a unit"
    t = MPoly.from_json(ev["transformed"], ("y", "x"))
    if t != reciprocal_transform(f, state.entries[n].d):
        return False, "recorded transform differs from the recomputed one"
    coeffs = t.coefficients_in("y")
    top = max(coeffs)
    lead = coeffs[top]
    if not lead.is_constant() or lead.constant_value() == 0:
        return False, "leading y-coefficient is not a nonzero constant"
    for k in range(top):
        v = x_valuation(coeffs[k], "x") if k in coeffs else None
        if k == 0 and v != 1:
            return False, "x^2 divides the constant coefficient, or x does not divide it"
        if k > 0 and v is not None and v < 1:
            return False, f"x does not divide the y^{k} coefficient"
    return not z_divides, "Eisenstein conditions at x"


def _coverage(ctx: _Context, cert: Certificate) -> tuple[bool, str]:
    state = ctx.family(cert)
    ev = cert.evidence
    m = int(ev["points_checked"])
    seen = {}
    for pt, i in ev["assignments"]:
        p = PointQ2.from_json(pt)
        if evaluate(state.entries[i].poly, p) != 0:
            return False, f"{p} is not on D_{i}"
        seen[p] = i
    for pt in ev["uncovered"]:
        p = PointQ2.from_json(pt)
        if any(evaluate(e.poly, p) == 0 for e in state.entries):
            return False, f"{p} is listed as uncovered but lies on the family"
        seen[p] = None
    expected = {next_point(c) for c in range(m)}
    if set(seen) != expected:
        return False, "listed points differ from the enumeration"
    if (cert.conclusion == "pass") != (not ev["uncovered"]):
        return False, "conclusion contradicts the uncovered list"
    return True, f"{m} points"


def _degree_growth(ctx: _Context, cert: Certificate) -> tuple[bool, str]:
    state = ctx.family(cert)
    ev = cert.evidence
    if "error" in ev:
        return cert.conclusion == "fail", ev["error"]
    d = [e.poly.degree("z") for e in state.entries]
    if d != ev["degrees"] or d != [e.d for e in state.entries]:
        return False, "recorded degrees differ"
    rec = d[2] == 2 * d[1] and all(d[k] == sum(d[1:k]) for k in range(3, len(d)))
    inc = all(d[k + 1] > d[k] for k in range(1, len(d) - 1))
    closed = all(d[k] == 6 * 2 ** (k - 3) for k in range(3, len(d)))
    ok = rec and inc and closed
    listed = set(ev["irreducible_indices"])
    if listed != set(range(len(d))):
        return False, "irreducibility is not claimed for every index"
    irreducible_certs = {c.index[0]: c for c in ctx.certs if c.kind == "eisenstein"}
    missing = [k for k in listed if k in irreducible_certs and irreducible_certs[k].conclusion != "pass"]
    if missing:
        return False, f"bundle holds failing irreducibility certificates for {missing}"
    return ok == (cert.conclusion == "pass"), "degree recurrence"


def _pencil(ctx: _Context, cert: Certificate) -> tuple[bool, str]:
    from .elimination import UnitIdealWitness  # data class only

    ev = cert.evidence
    if cert.index[0] == "make":
        w = UnitIdealWitness.from_json(ev["witness"])
        return w.check(), "u*A + v*B = 1"
    a = MPoly.from_json(ev["A"])
    b = MPoly.from_json(ev["B"])
    h = MPoly.from_json(ev["h"])
    h_red = MPoly.from_json(ev["reduced_h"])
    k = int(ev["radical_power"])
    w = MPoly.from_json(ev["radical_cofactor"])
    if h_red**k != h * w:
        return False, "reduced_h^k is not a multiple of h"
    if divmod_poly(h, h_red)[1]:
        return False, "reduced_h does not divide h"
    if ev["conclusion"] == "contained":
        lam, mu = (parse_rat(s) for s in ev["fiber"])
        q = MPoly.from_json(ev["quotient"])
        return q * h_red == a.scale(mu) - b.scale(lam), "fiber polynomial = quotient * reduced_h"
    if "point" in ev:
        p = PointQ2.from_json(ev["point"])
        if evaluate(h_red, p) != 0:
            return False, "recorded point is not on V(h)"
        lam, mu = evaluate(a, p), evaluate(b, p)
        r = divmod_poly(a.scale(mu) - b.scale(lam), h_red)[1]
        return not r.is_zero(), "fiber through the point does not contain V(h)"
    ra, rb = divmod_poly(a, h_red)[1], divmod_poly(b, h_red)[1]
    if ra.is_zero() or rb.is_zero():
        return False, "a normal form vanishes, so a fiber value exists"
    m = rb.leading_monomial()
    c = ra.coefficient(m) / rb.coefficient(m)
    return ra != rb.scale(c), "normal forms are not proportional"


def _lattice_fuzz(ctx: _Context, cert: Certificate) -> tuple[bool, str]:
    inp = cert.inputs
    report = fuzz_prop_ortho(int(inp["rank_max"]), int(inp["trials"]), int(inp["seed"]))
    return report.to_json() == cert.evidence, "deterministic re-run"


# checkers that report whether the pass claim holds, rather than whether the
# certificate as a whole is consistent
_CLAIM_CHECKERS = {"disjointness", "eisenstein", "pencil"}

_CHECKERS = {
    "disjointness": _disjointness,
    "eisenstein": _eisenstein,
    "coverage": _coverage,
    "degree-growth": _degree_growth,
    "pencil": _pencil,
    "lattice-fuzz": _lattice_fuzz,
}


def recheck_bundle(path: Path, family: Path | None = None) -> list[RecheckOutcome]:
    """Re-validate every pass and fail claim in a bundle.

    Inconclusive certificates carry no claim and are reported as ok.
    """
    path = Path(path)
    certs = read_bundle(path)
    ctx = _Context(path.parent, Path(family) if family else None, certs)
    out = []
    for cert in certs:
        if cert.conclusion == "inconclusive":
            out.append(RecheckOutcome(cert, True, "no claim"))
            continue
        try:
            ok, detail = _CHECKERS[cert.kind](ctx, cert)
            if cert.kind in _CLAIM_CHECKERS:
                ok = ok == (cert.conclusion == "pass")
        except (KeyError, ValueError, IndexError, TypeError) as exc:
            ok, detail = False, f"malformed evidence: {exc}"
        out.append(RecheckOutcome(cert, ok, detail))
    return out
