"""The ten acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line, repeated in the terminal summary.
"""

import json
import random
import time
from fractions import Fraction
from pathlib import Path

import pytest

from conftest import record_acceptance
from disjoint_divisors.certificates import read_bundle
from disjoint_divisors.cli import main
from disjoint_divisors.elimination import (
    UnitIdealWitness,
    gcd_poly,
    naive_twin_resultant_criterion,
    twin_resultant_criterion,
    unit_ideal,
)
from disjoint_divisors.family import (
    PASS,
    IdentityCache,
    build_family,
    coverage_check,
    eisenstein_certificate,
    groebner_disjointness,
    no_common_fibration_certificate,
    structural_disjointness,
)
from disjoint_divisors.lattice import (
    HYPERBOLIC,
    direct_sum,
    random_unimodular,
    signature,
)
from disjoint_divisors.mpoly import MPoly, PointQ2
from disjoint_divisors.pencil import ProjPoint, divisor_in_fiber, make_pencil
from disjoint_divisors.pipeline import load_family
from disjoint_divisors.recheck import recheck_bundle

GOLDEN = Path(__file__).parent / "data" / "golden_family_n3.json"
X = MPoly.var("x", ("y", "x"))
YX = MPoly.var("y", ("y", "x"))


@pytest.fixture(scope="module")
def built8(tmp_path_factory):
    out = tmp_path_factory.mktemp("accept8")
    t0 = time.perf_counter()
    code = main(["build", "-n", "8", "-o", str(out)])
    elapsed = time.perf_counter() - t0
    return out / "family.json", code, elapsed


def test_criterion_01_construction_fidelity(built8):
    path, code, elapsed = built8
    state = load_family(path)
    degrees = state.degrees
    z_degrees = [e.poly.degree("z") for e in state.entries]
    ok = code == 0 and elapsed <= 120 and degrees == [1, 2, 4, 6, 12, 24, 48, 96, 192] and z_degrees == degrees
    record_acceptance(1, "build -n 8 within 120 s, d-sequence and deg_z exact", ok, f"{elapsed:.2f} s, d = {degrees}")
    assert ok


def test_criterion_02_disjointness(built8):
    state = load_family(built8[0])
    cache = IdentityCache(state)
    structural = {
        (i, j): structural_disjointness(state, i, j, cache).conclusion for i in range(9) for j in range(i + 1, 9)
    }
    t0 = time.perf_counter()
    groebner = {(i, j): groebner_disjointness(state, i, j) for i in range(5) for j in range(i + 1, 5)}
    elapsed = time.perf_counter() - t0
    sound = all(c.witness is not None and c.witness.check() for c in groebner.values())
    disagreements = [p for p, c in groebner.items() if c.conclusion != structural[p]]
    ok = (
        len(structural) == 36
        and all(c == PASS for c in structural.values())
        and all(c.conclusion == PASS for c in groebner.values())
        and sound
        and elapsed <= 60
        and not disagreements
    )
    record_acceptance(
        2,
        "36 structural certificates, Groebner cross-checks for indices <= 4 within 60 s, no disagreement",
        ok,
        f"{len(groebner)} Groebner pairs in {elapsed:.2f} s",
    )
    assert ok


def test_criterion_03_irreducibility(built8):
    state = load_family(built8[0])
    certs = {n: eisenstein_certificate(state, n) for n in range(2, 9)}
    a2 = state[2].a
    shape = certs[2].transformed == X.scale(a2) + (YX + X**2) ** 2
    ok = all(c.conclusion == PASS for c in certs.values()) and shape
    record_acceptance(3, "Eisenstein certificates for 2 <= n <= 8; f2' = a2*x + (y + x^2)^2", ok)
    assert ok


def test_criterion_04_coverage():
    # D_9 is included, as the criterion allows i <= 9
    state = build_family(9)
    report = coverage_check(state, 20)
    ok = report.conclusion == PASS
    missing = ", ".join(str(tuple(p.to_json())) for p in report.uncovered)
    record_acceptance(
        4,
        "first 20 enumerated points lie on D_0..D_9",
        ok,
        f"uncovered: {missing}" if missing else "all covered",
    )
    assert ok, f"enumerated points not on any D_i, i <= 9: {missing}"


def _walk_oracle(n_max: int):
    """Brute-force oracle: enumerate points, pick the first off the family, solve for a_n.

    Works with values f_k(P) only, via f_n(P) = a_n z^e + prod f_k(P).
    """
    rats = [Fraction(0)]
    h = 2
    while len(rats) < 60:
        for p, q in sorted((h - q, q) for q in range(1, h) if Fraction(h - q, q).denominator == q):
            rats += [Fraction(p, q), Fraction(-p, q)]
        h += 1
    pts = [(rats[a], rats[s - a]) for s in range(10) for a in range(s + 1)]
    a_vals, d = [], [1, 2]

    def values(p):
        y, z = p
        v = [z, y * z * z + 1]
        for k, a in enumerate(a_vals, start=2):
            if k == 2:
                v.append(a * z ** (2 * d[1] - 1) + v[1] ** d[1])
            else:
                prod = Fraction(1)
                for t in v[1:]:
                    prod *= t
                v.append(a * z ** (d[k] - 1) + prod)
        return v

    out = {}
    for n in range(2, n_max + 1):
        p = next(p for p in pts if all(values(p)))
        d.append(2 * d[1] if n == 2 else sum(d[1:]))
        v = values(p)
        if n == 2:
            a = -v[1] ** d[1] / p[1] ** (2 * d[1] - 1)
        else:
            prod = Fraction(1)
            for t in v[1:]:
                prod *= t
            a = -prod / p[1] ** (d[n] - 1)
        a_vals.append(a)
        out[n] = (PointQ2(*p), a)
    return out


def test_criterion_05_hand_checkable_constants():
    golden = load_family(GOLDEN)
    y, z = MPoly.var("y"), MPoly.var("z")
    oracle = _walk_oracle(3)
    ok = (
        golden[2].point == PointQ2(0, 1)
        and golden[2].a == -1
        and golden[2].poly == -(z**3) + (y * z**2 + 1) ** 2
        and golden[3].point == PointQ2(0, -1)
        and golden[3].a == 2
        and oracle[2] == (golden[2].point, golden[2].a)
        and oracle[3] == (golden[3].point, golden[3].a)
        and GOLDEN.read_text() == json.dumps(build_family(3).to_json(), separators=(",", ":"), sort_keys=True) + "\n"
    )
    record_acceptance(5, "P2 = (0,1), a2 = -1, f2 = -z^3 + (yz^2+1)^2, P3 = (0,-1), a3 = 2 in the golden file", ok)
    assert ok


def test_criterion_06_degree_growth(built8):
    state = load_family(built8[0])
    cert = no_common_fibration_certificate(state)
    d = list(cert.degrees)
    closed = all(d[n] == 6 * 2 ** (n - 3) for n in range(3, 9))
    increasing = all(d[n + 1] > d[n] for n in range(2, 8))
    ok = cert.conclusion == PASS and closed and increasing
    record_acceptance(6, "d_n = 6*2^(n-3) for 3 <= n <= 8, strictly increasing from n = 2", ok)
    assert ok


def test_criterion_07_lattice_suite(capsys):
    # U + <-1>^m has signature (1, m + 1, 0); read with m negative
    # directions in total the form is U + <-1>^(m-1), signature (1, m, 0)
    sig_ok = all(
        signature(direct_sum(HYPERBOLIC, *[((-1,),)] * m)).as_tuple() == (1, m + 1, 0)
        and signature(direct_sum(HYPERBOLIC, *[((-1,),)] * (m - 1))).as_tuple() == (1, m, 0)
        for m in range(1, 8)
    )
    rng = random.Random(20240607)
    g = direct_sum(HYPERBOLIC, *[((-1,),)] * 6)
    base = signature(g)
    congruence_ok = True
    for _ in range(100):
        t, t_inv = random_unimodular(g.dim, rng)
        n = g.dim
        ident = all(sum(t[i][k] * t_inv[k][j] for k in range(n)) == (i == j) for i in range(n) for j in range(n))
        congruence_ok &= ident and signature(g.congruent(t)) == base
    t0 = time.perf_counter()
    code = main(["lattice", "fuzz", "--rank", "8", "--trials", "1000", "--seed", "1"])
    elapsed = time.perf_counter() - t0
    report = json.loads(capsys.readouterr().out)
    ok = sig_ok and congruence_ok and code == 0 and report["violations"] == 0 and elapsed <= 60
    record_acceptance(
        7,
        "signatures of U + <-1>^m, 100 unimodular congruences, fuzz rank 8 x 1000 within 60 s",
        ok,
        f"fuzz {elapsed:.1f} s, {report['violations']} violations, hypothesis met in {report['hypothesis_met']} trials",
    )
    assert ok


def _random_poly(rng: random.Random) -> MPoly:
    deg = rng.randint(1, 4)
    terms = {}
    for _ in range(rng.randint(1, 5)):
        a = rng.randint(0, deg)
        terms[(a, rng.randint(0, deg - a))] = rng.randint(-3, 3)
    return MPoly(terms)


def test_criterion_08_oracle_equivalence():
    rng = random.Random(2024)
    pairs = []
    while len(pairs) < 200:
        f, g = _random_poly(rng), _random_poly(rng)
        if f.is_constant() or g.is_constant() or not gcd_poly(f, g).is_constant():
            continue
        pairs.append((f, g))
    mismatches, naive_mismatches, disjoint = [], 0, 0
    for f, g in pairs:
        engine = isinstance(unit_ideal(f, g), UnitIdealWitness)
        disjoint += engine
        if engine != twin_resultant_criterion(f, g):
            mismatches.append((str(f), str(g)))
        naive_mismatches += engine != naive_twin_resultant_criterion(f, g)
    ok = not mismatches
    record_acceptance(
        8,
        "Groebner verdict equals the resultant criterion on 200 seeded coprime pairs",
        ok,
        f"{disjoint} disjoint pairs; plain unsheared resultants would disagree {naive_mismatches} times",
    )
    assert ok, mismatches


def test_criterion_09_pencil_suite(built8):
    state = load_family(built8[0])
    pencil = make_pencil(MPoly.var("z"), MPoly.const(1))
    results = [divisor_in_fiber(pencil, state[n].poly) for n in range(5)]
    located = results[0].value == ProjPoint(0, 1)
    refuted = all(r.refuted for r in results[1:])
    rechecked = all(
        r.quotient * r.reduced_h == pencil.fiber_polynomial(r.value) for r in results if not r.refuted
    )
    ok = located and refuted and rechecked
    record_acceptance(9, "pencil [z:1]: f0 in fiber [0:1], f1..f4 refuted, fibers pass exact division", ok)
    assert ok


def test_criterion_10_determinism_and_recheck(tmp_path):
    bundles = []
    for threads in (1, 4):
        out = tmp_path / f"t{threads}"
        assert main(["build", "-n", "8", "-o", str(out)]) == 0
        code = main(["verify", str(out / "family.json"), "--threads", str(threads), "--groebner-cap", "4"])
        assert code == 0
        bundles.append(out / "certificates.jsonl")
    identical = bundles[0].read_bytes() == bundles[1].read_bytes()
    identical &= (tmp_path / "t1" / "family.json").read_bytes() == (tmp_path / "t4" / "family.json").read_bytes()
    outcomes = recheck_bundle(bundles[0])
    passes = [o for o in outcomes if o.cert.conclusion == PASS]
    all_ok = all(o.ok for o in outcomes) and len(passes) == len(read_bundle(bundles[0]))
    ok = identical and all_ok
    record_acceptance(
        10,
        "bundles byte-identical across thread counts; recheck validates every pass certificate",
        ok,
        f"{len(passes)} pass certificates rechecked",
    )
    assert ok
