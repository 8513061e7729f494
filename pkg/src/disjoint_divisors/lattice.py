"""Exact intersection-form analysis.

Signatures are computed by symmetric congruence diagonalization over Q, so
every zero test is exact.  On top of that sit the classification of a
pairwise-orthogonal family of divisor classes into positive, negative and
isotropic members (with the bounds the Hodge index theorem forces), a
property-based fuzzer for those bounds, and the numeric rule deciding when a
family of disjoint divisors is large enough to force a fibration.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

from .mpoly import format_rat, parse_rat

Vector = tuple[Fraction, ...]
UNCOUNTABLE = "uncountable"

HOLDS, FAILS, UNMET = "pass", "fail", "hypothesis unmet"


class LatticeInputError(ValueError):
    """Malformed lattice input: asymmetric form, zero or non-orthogonal family."""


def _dot(u: Sequence, w: Sequence) -> Fraction:
    return sum((a * b for a, b in zip(u, w) if a and b), Fraction(0))


def _vec(v) -> Vector:
    return tuple(Fraction(x) if not isinstance(x, str) else parse_rat(x) for x in v)


@dataclass(frozen=True)
class GramMatrix:
    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(_vec(r) for r in self.entries)
        n = len(rows)
        if n == 0:
            raise LatticeInputError("Gram matrix must be non-empty")
        if any(len(r) != n for r in rows):
            raise LatticeInputError("Gram matrix must be square")
        for i in range(n):
            for j in range(i + 1, n):
                if rows[i][j] != rows[j][i]:
                    raise LatticeInputError(f"Gram matrix is not symmetric at ({i}, {j})")
        object.__setattr__(self, "entries", rows)

    @property
    def dim(self) -> int:
        return len(self.entries)

    def product(self, u: Sequence, v: Sequence) -> Fraction:
        if len(u) != self.dim or len(v) != self.dim:
            raise LatticeInputError(f"vectors must have length {self.dim}")
        return _dot(u, self.apply(v))

    def apply(self, v: Sequence) -> list[Fraction]:
        """The vector ``G v``."""
        nz = [(j, x) for j, x in enumerate(v) if x]
        return [sum((row[j] * x for j, x in nz), Fraction(0)) for row in self.entries]

    def restrict(self, basis: Sequence[Sequence]) -> "GramMatrix":
        return GramMatrix(tuple(tuple(self.product(a, b) for b in basis) for a in basis))

    def congruent(self, t: Sequence[Sequence]) -> "GramMatrix":
        """``T^t G T`` for a square matrix ``T`` given by rows."""
        n = self.dim
        cols = [[t[i][j] for i in range(n)] for j in range(n)]
        return self.restrict(cols)

    def to_json(self) -> list[list[str]]:
        return [[format_rat(x) for x in row] for row in self.entries]

    @classmethod
    def from_json(cls, data) -> "GramMatrix":
        if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
            raise LatticeInputError("Gram matrix must be a JSON array of arrays")
        return cls(tuple(tuple(parse_rat(str(x)) for x in row) for row in data))


def direct_sum(*blocks: Sequence[Sequence]) -> GramMatrix:
    n = sum(len(b) for b in blocks)
    rows = [[Fraction(0)] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i, r in enumerate(b):
            for j, x in enumerate(r):
                rows[off + i][off + j] = Fraction(x)
        off += len(b)
    return GramMatrix(tuple(tuple(r) for r in rows))


HYPERBOLIC = ((0, 1), (1, 0))


def lorentzian_standard(rank: int) -> GramMatrix:
    """``U + <-1>^(rank - 2)``, signature ``(1, rank - 1, 0)``."""
    if rank < 2:
        raise ValueError("rank must be at least 2")
    return direct_sum(HYPERBOLIC, *[((-1,),)] * (rank - 2))


@dataclass(frozen=True)
class Signature:
    positive: int
    negative: int
    zero: int

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.positive, self.negative, self.zero)


def diagonalize(g: GramMatrix) -> list[tuple[Fraction, Vector]]:
    """Congruence diagonalization over Q.

    Returns ``dim`` pairs ``(value, vector)``: the vectors form a basis, are
    pairwise orthogonal, and satisfy ``vector . vector == value``.
    """
    a = [list(r) for r in g.entries]
    n = len(a)
    basis = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    active = list(range(n))
    out: list[tuple[Fraction, Vector]] = []

    def clear(r: int, s: int, c: Fraction) -> None:
        # basis change e_r <- e_r - c*e_s, applied to rows and columns
        for k in range(n):
            a[r][k] -= c * a[s][k]
        for k in range(n):
            a[k][r] -= c * a[k][s]
        basis[r] = [x - c * y for x, y in zip(basis[r], basis[s])]

    while active:
        piv = next((i for i in active if a[i][i]), None)
        if piv is not None:
            p = a[piv][piv]
            for r in active:
                if r != piv and a[r][piv]:
                    clear(r, piv, a[r][piv] / p)
            out.append((p, tuple(basis[piv])))
            active.remove(piv)
            continue
        pair = next(((i, j) for i in active for j in active if i < j and a[i][j]), None)
        if pair is None:
            # what is left is the radical of the form
            out.extend((Fraction(0), tuple(basis[i])) for i in active)
            break
        # zero diagonal with b = a[i][j] != 0: the block [[0, b], [b, 0]] is a hyperbolic plane
        i, j = pair
        b = a[i][j]
        for r in active:
            if r in (i, j):
                continue
            alpha, beta = a[r][j] / b, a[r][i] / b
            if alpha:
                clear(r, i, alpha)
            if beta:
                clear(r, j, beta)
        plus = tuple(x + y for x, y in zip(basis[i], basis[j]))
        minus = tuple(x - y for x, y in zip(basis[i], basis[j]))
        out.append((2 * b, plus))
        out.append((-2 * b, minus))
        active.remove(i)
        active.remove(j)
    return out


def signature(g: GramMatrix) -> Signature:
    """Inertia counts of the form, computed exactly."""
    values = [v for v, _ in diagonalize(g)]
    pos = sum(1 for v in values if v > 0)
    neg = sum(1 for v in values if v < 0)
    return Signature(pos, neg, g.dim - pos - neg)


def positive_vector(g: GramMatrix, basis: Sequence[Sequence]) -> Vector | None:
    """A vector in the span of ``basis`` with positive square, or ``None``."""
    basis = [_vec(b) for b in basis]
    if not basis:
        return None
    for value, coeffs in diagonalize(g.restrict(basis)):
        if value > 0:
            return tuple(sum((c * b[k] for c, b in zip(coeffs, basis)), Fraction(0)) for k in range(g.dim))
    return None


def is_lorentzian(g: GramMatrix) -> bool:
    return signature(g).as_tuple() == (1, g.dim - 1, 0)


def rank(vectors: Sequence[Sequence]) -> int:
    """Exact rank by Gaussian elimination over Q."""
    rows = [list(_vec(v)) for v in vectors]
    if not rows:
        return 0
    ncols = len(rows[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c] / rows[r][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return r


# -- orthogonal families ----------------------------------------------------


@dataclass(frozen=True)
class OrthoClassification:
    family: tuple[Vector, ...]
    d: int
    M_witness: Vector | None
    J_plus: tuple[int, ...]
    J_minus: tuple[int, ...]
    J_zero: tuple[int, ...]
    bounds_report: dict = field(default_factory=dict)

    @property
    def hypothesis_met(self) -> bool:
        return self.M_witness is not None

    @property
    def violations(self) -> list[str]:
        return [k for k, v in self.bounds_report.items() if v["status"] == FAILS]

    def sizes(self) -> tuple[int, int, int]:
        return (len(self.J_plus), len(self.J_minus), len(self.J_zero))

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "M_witness": [format_rat(x) for x in self.M_witness] if self.M_witness else None,
            "J_plus": list(self.J_plus),
            "J_minus": list(self.J_minus),
            "J_zero": list(self.J_zero),
            "bounds": self.bounds_report,
        }


def classify_orthogonal(
    g: GramMatrix, family: Sequence[Sequence], v_basis: Sequence[Sequence] | None = None
) -> OrthoClassification:
    """Partition an orthogonal family by the sign of self-intersection.

    ``v_basis`` spans the subspace ``V`` that must contain the family
    (default: the whole space).  The three bounds are evaluated only when
    ``V`` contains a vector of positive square; otherwise each is reported
    as ``"hypothesis unmet"``.
    """
    fam = [_vec(h) for h in family]
    if v_basis is None:
        v_basis = [tuple(Fraction(int(i == j)) for j in range(g.dim)) for i in range(g.dim)]
    basis = [_vec(b) for b in v_basis]
    for k, h in enumerate(fam):
        if len(h) != g.dim:
            raise LatticeInputError(f"family vector {k} has length {len(h)}, expected {g.dim}")
        if not any(h):
            raise LatticeInputError(f"family vector {k} is zero")
    for i in range(len(fam)):
        for j in range(i + 1, len(fam)):
            if g.product(fam[i], fam[j]):
                raise LatticeInputError(f"family vectors {i} and {j} are not orthogonal")
    d = rank(basis)
    for k, h in enumerate(fam):
        if rank(basis + [h]) != d:
            raise LatticeInputError(f"family vector {k} is not in the span of V")

    m_vec = positive_vector(g, basis)
    m_exists = m_vec is not None
    squares = [g.product(h, h) for h in fam]
    jp = tuple(k for k, s in enumerate(squares) if s > 0)
    jm = tuple(k for k, s in enumerate(squares) if s < 0)
    j0 = tuple(k for k, s in enumerate(squares) if s == 0)

    def status(ok: bool) -> str:
        if not m_exists:
            return UNMET
        return HOLDS if ok else FAILS

    nonzero_sq = [fam[k] for k in jp + jm]
    indep = rank(nonzero_sq) == len(nonzero_sq)
    c1 = indep and len(jp) <= 1 and len(jm) <= d - 1
    premise2 = len(jp) + len(j0) >= 2
    c2 = (not premise2) or (len(jm) <= d - 2 and len(jp) == 0 and len(j0) >= len(fam) - (d - 2))
    span0 = rank([fam[k] for k in j0])
    c3 = span0 <= 1
    report = {
        "independent_plus_minus": {
            "status": status(c1),
            "rank": rank(nonzero_sq),
            "count": len(nonzero_sq),
            "bound_plus": 1,
            "bound_minus": d - 1,
        },
        "isotropic_pair_bounds": {"status": status(c2), "premise": premise2, "bound_minus": d - 2},
        "isotropic_span": {"status": status(c3), "rank": span0},
    }
    if m_vec is not None and g.product(m_vec, m_vec) <= 0:
        raise AssertionError("positive-vector search returned a non-positive vector")
    return OrthoClassification(tuple(fam), d, m_vec, jp, jm, j0, report)


# -- fuzzing ------------------------------------------------------------------


def random_unimodular(n: int, rng: random.Random, steps: int | None = None) -> tuple[list[list[int]], list[list[int]]]:
    """A product of integer transvections and its inverse, as row lists."""
    t = [[int(i == j) for j in range(n)] for i in range(n)]
    inv = [[int(i == j) for j in range(n)] for i in range(n)]
    if n < 2:
        return t, inv
    for _ in range(steps if steps is not None else 2 * n):
        i, j = rng.sample(range(n), 2)
        c = rng.choice((-2, -1, 1, 2))
        # T <- T * E where E = I + c*e_i e_j^t adds c * column i to column j
        for r in range(n):
            t[r][j] += c * t[r][i]
        # inverse: E^-1 * inv subtracts c * row j from row i
        for k in range(n):
            inv[i][k] -= c * inv[j][k]
    return t, inv


def _matvec(m: Sequence[Sequence], v: Sequence) -> Vector:
    return tuple(sum((Fraction(m[i][k]) * v[k] for k in range(len(v))), Fraction(0)) for i in range(len(m)))


def _random_instance(rank_: int, rng: random.Random):
    """Lorentzian form, subspace basis and orthogonal family, all in mixed coordinates."""
    g0 = lorentzian_standard(rank_)
    n = rank_
    e = [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    negs = [k for k in range(2, n) if rng.random() < 0.7]
    include_e2 = rng.random() < 0.85
    span_idx = [0] + ([1] if include_e2 else []) + negs
    basis0 = [e[k] for k in span_idx]
    for _ in range(rng.randint(0, 2)):  # redundant spanning vectors
        basis0.append(tuple(sum((rng.randint(-2, 2) * e[k][c] for k in span_idx), Fraction(0)) for c in range(n)))
    rng.shuffle(basis0)

    def random_in_v() -> Vector:
        return tuple(sum((rng.randint(-3, 3) * e[k][c] for k in span_idx), Fraction(0)) for c in range(n))

    def isotropic_in_v() -> Vector:
        v = [Fraction(0)] * n
        for k in negs:
            v[k] = Fraction(rng.randint(-2, 2))
        if include_e2:
            s = sum(x * x for x in v)
            a = Fraction(rng.choice((1, 2, -1)))
            v[0], v[1] = a, s / (2 * a)
        else:
            v = [Fraction(0)] * n
            v[0] = Fraction(rng.choice((1, 2, -3)))
        return tuple(v)

    fam: list[Vector] = []
    images: list[tuple[list[Fraction], Fraction]] = []  # (G0 h, h.h) per member
    for _ in range(3 * n):
        cand = isotropic_in_v() if rng.random() < 0.4 else random_in_v()
        for h, (gh, hh) in zip(fam, images):
            if hh:
                c = _dot(cand, gh) / hh
                if c:
                    cand = tuple(x - c * y for x, y in zip(cand, h))
        if any(cand) and all(_dot(cand, gh) == 0 for gh, _ in images):
            gc = g0.apply(cand)
            fam.append(cand)
            images.append((gc, _dot(cand, gc)))
    if not fam:
        fam.append(e[0])
    rng.shuffle(fam)

    t, inv = random_unimodular(n, rng)
    g = g0.congruent(t)
    # v in old coordinates has new coordinates inv * v
    return g, [_matvec(inv, h) for h in fam], [_matvec(inv, b) for b in basis0]


@dataclass(frozen=True)
class FuzzReport:
    trials: int
    seed: int
    rank_max: int
    violations: int
    hypothesis_met: int
    counterexample: dict | None = None

    def to_json(self) -> dict:
        out = {
            "trials": self.trials,
            "seed": self.seed,
            "rank_max": self.rank_max,
            "violations": self.violations,
            "hypothesis_met": self.hypothesis_met,
        }
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


def fuzz_prop_ortho(rank_max: int, trials: int, seed: int) -> FuzzReport:
    """Check the orthogonal-family bounds on random Lorentzian instances.

    Each trial draws its own generator from ``(seed, trial)``, so results do
    not depend on evaluation order.  Any failing bound is a bug.
    """
    if rank_max < 2:
        raise ValueError("rank_max must be at least 2")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    violations = met = 0
    first = None
    for k in range(trials):
        rng = random.Random(f"prop-ortho:{seed}:{k}")
        r = rng.randint(2, rank_max)
        g, fam, basis = _random_instance(r, rng)
        if not is_lorentzian(g):
            raise AssertionError("unimodular congruence changed the signature")
        cls = classify_orthogonal(g, fam, basis)
        met += cls.hypothesis_met
        if cls.violations:
            violations += 1
            if first is None:
                first = {
                    "trial": k,
                    "gram": g.to_json(),
                    "family": [[format_rat(x) for x in h] for h in fam],
                    "basis": [[format_rat(x) for x in b] for b in basis],
                    "failed": cls.violations,
                }
    return FuzzReport(trials, seed, rank_max, violations, met, first)


# -- fibration bound --------------------------------------------------------


@dataclass(frozen=True)
class FibrationBoundDecision:
    rho_w: int
    family_size: Union[int, str]
    applies: bool
    sigma_slack: int

    def to_json(self) -> dict:
        return {
            "rho_w": self.rho_w,
            "family_size": self.family_size,
            "applies": self.applies,
            "sigma_slack": self.sigma_slack,
        }


def fibration_bound(rho_w: int, family_size: Union[int, str]) -> FibrationBoundDecision:
    """Whether ``#I >= rho_w + 1`` disjoint divisors force a fibration.

    ``family_size`` is a count or :data:`UNCOUNTABLE`; ``sigma_slack`` bounds
    how many members may fail to be fibers.
    """
    if rho_w < 0:
        raise ValueError("rho_w must be non-negative")
    if family_size == UNCOUNTABLE:
        applies = True
    elif isinstance(family_size, int) and not isinstance(family_size, bool) and family_size >= 0:
        applies = family_size >= rho_w + 1
    else:
        raise ValueError(f"family_size must be a non-negative count or {UNCOUNTABLE!r}")
    return FibrationBoundDecision(rho_w, family_size, applies, max(rho_w - 2, 0))
