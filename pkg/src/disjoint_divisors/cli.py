"""Command line: ``ddiv build | verify | lattice | pencil | recheck``.

Exit status: 0 all pass, 1 some certificate fails, 2 usage or input error,
3 inconclusive results but no failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .certificates import Certificate, write_bundle
from .elimination import ResourceLimitExceeded, ResourceLimits
from .expr import parse_poly
from .family import ConstructionError, ContradictionError
from .lattice import GramMatrix, LatticeInputError, classify_orthogonal, fuzz_prop_ortho
from .mpoly import MPoly
from .pencil import FiberInconclusive, Pencil, PencilError, divisor_in_fiber, make_pencil
from .pipeline import CHECKS, RunConfig, cmd_build, cmd_verify, write_json
from .recheck import recheck_bundle

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3

log = logging.getLogger("disjoint_divisors")


class UsageError(Exception):
    pass


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def read_poly(arg: str) -> MPoly:
    """A polynomial from an interchange JSON file, or an inline expression."""
    if Path(arg).is_file():
        return MPoly.from_json(_load_json(arg))
    try:
        return parse_poly(arg)
    except ValueError as exc:
        raise UsageError(f"{arg!r} is neither a polynomial file nor an expression: {exc}") from None


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _config(args, **overrides) -> RunConfig:
    try:
        return RunConfig.load(args.config, **overrides)
    except (OSError, ValueError, TypeError) as exc:
        raise UsageError(f"bad configuration: {exc}") from None


# -- commands ----------------------------------------------------------------


def run_build(args) -> int:
    config = _config(args, n_max=args.n, output_dir=args.output)
    try:
        out = cmd_build(config)
    except ConstructionError as exc:
        log.error("construction failed: %s", exc)
        return EXIT_FAIL
    print(f"wrote {out}")
    return EXIT_OK


def run_verify(args) -> int:
    checks = tuple(c.strip() for c in args.check.split(",") if c.strip())
    bad = [c for c in checks if c not in CHECKS]
    if bad or not checks:
        raise UsageError(f"--check takes a comma list drawn from {', '.join(CHECKS)}")
    config = _config(
        args,
        groebner_pair_cap=args.groebner_cap,
        coverage_points=args.coverage_points,
        degree_cap=args.degree_cap,
        basis_cap=args.basis_cap,
        threads=args.threads,
    )
    family = Path(args.family)
    out_dir = Path(args.output) if args.output else None
    try:
        result = cmd_verify(family, checks, config, out_dir)
    except OSError as exc:
        raise UsageError(f"cannot read {family}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{family} is not valid JSON: {exc}") from None
    except ContradictionError as exc:
        log.error("%s", exc)
        return EXIT_FAIL
    except ValueError as exc:
        raise UsageError(f"{family}: {exc}") from None
    sys.stdout.write(result.summary.read_text(encoding="ascii"))
    print(f"wrote {result.bundle}")
    return result.exit_code


def run_lattice_classify(args) -> int:
    try:
        g = GramMatrix.from_json(_load_json(args.gram))
        vectors = _load_json(args.vectors)
        basis = _load_json(args.basis) if args.basis else None
        report = classify_orthogonal(g, vectors, basis)
    except LatticeInputError as exc:
        raise UsageError(str(exc)) from None
    _emit(report.to_json())
    return EXIT_FAIL if report.violations else EXIT_OK


def run_lattice_fuzz(args) -> int:
    try:
        report = fuzz_prop_ortho(args.rank, args.trials, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    data = report.to_json()
    _emit(data)
    if args.output:
        inputs = {"rank_max": args.rank, "trials": args.trials, "seed": args.seed}
        cert = Certificate("lattice-fuzz", (args.rank,), inputs, data, "pass" if not report.violations else "fail")
        Path(args.output).mkdir(parents=True, exist_ok=True)
        write_bundle(Path(args.output) / "lattice-fuzz.jsonl", [cert])
    return EXIT_FAIL if report.violations else EXIT_OK


def _limits(args) -> ResourceLimits:
    config = _config(args, degree_cap=args.degree_cap, basis_cap=args.basis_cap)
    return config.limits


def run_pencil_make(args) -> int:
    a, b = read_poly(args.A), read_poly(args.B)
    try:
        pencil = make_pencil(a, b, _limits(args))
    except PencilError as exc:
        log.error("%s", exc)
        return EXIT_FAIL
    except ResourceLimitExceeded as exc:
        log.warning("coprimality undecided: %s", exc.reason)
        return EXIT_INCONCLUSIVE
    data = pencil.to_json()
    out = Path(args.output) if args.output else Path(_config(args).output_dir) / "pencil.json"
    write_json(out, data)
    if args.bundle:
        cert = Certificate("pencil", ("make",), {"A": data["A"], "B": data["B"]}, {"witness": data["witness"]}, "pass")
        write_bundle(Path(args.bundle), [cert])
    print(f"wrote {out}")
    return EXIT_OK


def run_pencil_fiber(args) -> int:
    try:
        pencil = Pencil.from_json(_load_json(args.pencil))
    except (ValueError, TypeError) as exc:
        raise UsageError(f"{args.pencil}: {exc}") from None
    h = read_poly(args.H)
    if h.is_constant():
        raise UsageError("H must be nonconstant")
    try:
        result = divisor_in_fiber(pencil, h, search_budget=args.budget)
    except FiberInconclusive as exc:
        log.warning("%s", exc)
        return EXIT_INCONCLUSIVE
    data = result.to_json()
    _emit(data)
    if args.bundle:
        ab = {"A": pencil.A.to_json(), "B": pencil.B.to_json()}
        cert = Certificate("pencil", ("fiber",), {**ab, "h": data["h"]}, {**ab, **data}, "pass")
        write_bundle(Path(args.bundle), [cert])
    return EXIT_OK


def run_recheck(args) -> int:
    try:
        outcomes = recheck_bundle(Path(args.bundle), Path(args.family) if args.family else None)
    except OSError as exc:
        raise UsageError(f"cannot read: {exc}") from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    bad = [o for o in outcomes if not o.ok]
    for o in outcomes:
        if args.verbose or not o.ok:
            print(o.line())
    print(f"rechecked {len(outcomes)} certificates, {len(bad)} mismatches")
    return EXIT_FAIL if bad else EXIT_OK


# -- argument parsing ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ddiv", description="Certified construction of disjoint plane curves.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="construct the family through n = N")
    b.add_argument("-n", type=int, required=True)
    b.add_argument("-o", "--output", help="output directory (default: $DDIV_OUTPUT_DIR or .)")
    b.set_defaults(func=run_build)

    v = sub.add_parser("verify", help="certify properties of a family file")
    v.add_argument("family")
    v.add_argument("--check", default=",".join(CHECKS))
    v.add_argument("--groebner-cap", type=int, help="Groebner cross-check for pairs with both indices <= K")
    v.add_argument("--coverage-points", type=int, help="number of enumerated points (default: family cursor)")
    v.add_argument("--degree-cap", type=int)
    v.add_argument("--basis-cap", type=int)
    v.add_argument("--threads", type=int)
    v.add_argument("-o", "--output", help="bundle directory (default: next to the family file)")
    v.set_defaults(func=run_verify)

    lat = sub.add_parser("lattice", help="orthogonal families in Lorentzian lattices")
    lsub = lat.add_subparsers(dest="lattice_command", required=True)
    c = lsub.add_parser("classify")
    c.add_argument("gram")
    c.add_argument("vectors")
    c.add_argument("basis", nargs="?")
    c.set_defaults(func=run_lattice_classify)
    f = lsub.add_parser("fuzz")
    f.add_argument("--rank", type=int, required=True)
    f.add_argument("--trials", type=int, required=True)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("-o", "--output", help="also write a lattice-fuzz certificate bundle here")
    f.set_defaults(func=run_lattice_fuzz)

    pen = sub.add_parser("pencil", help="maps to the projective line")
    psub = pen.add_subparsers(dest="pencil_command", required=True)
    m = psub.add_parser("make")
    m.add_argument("A", help="polynomial file or expression in y, z")
    m.add_argument("B")
    m.add_argument("-o", "--output", help="pencil file (default: pencil.json in the output directory)")
    m.add_argument("--bundle", help="also write a pencil certificate bundle")
    m.add_argument("--degree-cap", type=int)
    m.add_argument("--basis-cap", type=int)
    m.set_defaults(func=run_pencil_make)
    fb = psub.add_parser("fiber")
    fb.add_argument("pencil")
    fb.add_argument("H", help="polynomial file or expression in y, z")
    fb.add_argument("--budget", type=int, default=64, help="trial values when searching for a rational point")
    fb.add_argument("--bundle", help="also write a pencil certificate bundle")
    fb.set_defaults(func=run_pencil_fiber)

    r = sub.add_parser("recheck", help="re-validate a certificate bundle from its evidence")
    r.add_argument("bundle")
    r.add_argument("--family", help="family file (default: as named in the bundle)")
    r.set_defaults(func=run_recheck)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        log.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
