"""Build and verify orchestration shared by the command line and the tests."""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Callable

from .certificates import Certificate, file_digest, tally, write_bundle
from .elimination import ResourceLimits
from .family import (
    PASS,
    FamilyState,
    IdentityCache,
    build_family,
    coverage_check,
    groebner_disjointness,
    irreducibility_certificate,
    no_common_fibration_certificate,
    structural_disjointness,
)
from .mpoly import dumps_json

OUTPUT_DIR_ENV = "DDIV_OUTPUT_DIR"
FAMILY_FILE = "family.json"
BUNDLE_FILE = "certificates.jsonl"
SUMMARY_FILE = "summary.txt"
CHECKS = ("disjoint", "irreducible", "cover", "degrees")


@dataclass(frozen=True)
class RunConfig:
    n_max: int = 8
    coverage_points: int = 0  # 0: every point up to the family's cursor
    groebner_pair_cap: int = 4
    degree_cap: int = 64
    basis_cap: int = 256
    seed: int = 0
    output_dir: str = "."
    threads: int = 1

    def __post_init__(self):
        if self.n_max < 2:
            raise ValueError("n_max must be at least 2")
        for name in ("degree_cap", "basis_cap", "threads"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.coverage_points < 0 or self.groebner_pair_cap < 0:
            raise ValueError("coverage_points and groebner_pair_cap must be non-negative")

    @property
    def limits(self) -> ResourceLimits:
        return ResourceLimits(max_degree=self.degree_cap, max_basis=self.basis_cap)

    @classmethod
    def load(cls, path: str | None = None, **overrides) -> "RunConfig":
        """Defaults, then the optional JSON config file, then explicit overrides."""
        values: dict = {}
        env_dir = os.environ.get(OUTPUT_DIR_ENV)
        if env_dir:
            values["output_dir"] = env_dir
        if path:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
            known = {f.name for f in fields(cls)}
            unknown = set(data) - known
            if unknown:
                raise ValueError(f"unknown config keys: {sorted(unknown)}")
            values.update(data)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


def write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(dumps_json(obj))
        fh.write("\n")


def cmd_build(config: RunConfig) -> Path:
    state = build_family(config.n_max)
    out = Path(config.output_dir) / FAMILY_FILE
    write_json(out, state.to_json())
    return out


def load_family(path: Path) -> FamilyState:
    with open(path, encoding="ascii") as fh:
        data = json.load(fh)
    return FamilyState.from_json(data)


@dataclass
class VerifyResult:
    certificates: list[Certificate]
    bundle: Path
    summary: Path
    disagreements: list[tuple[int, int]]

    @property
    def exit_code(self) -> int:
        counts = tally(self.certificates)
        if counts["fail"] or self.disagreements:
            return 1
        if counts["inconclusive"]:
            return 3
        return 0


def family_certificates(
    state: FamilyState, family_ref: dict, checks: tuple[str, ...], config: RunConfig
) -> tuple[list[Certificate], list[tuple[int, int]]]:
    """All requested certificates for a family, in bundle order."""
    for c in checks:
        if c not in CHECKS:
            raise ValueError(f"unknown check {c!r}; choose from {', '.join(CHECKS)}")
    jobs: list[Callable[[], Certificate]] = []
    n = state.n
    cache = IdentityCache(state)

    def inputs(**extra) -> dict:
        return {**family_ref, **extra}

    if "disjoint" in checks:
        for i in range(n + 1):
            for j in range(i + 1, n + 1):
                jobs.append(lambda i=i, j=j: _structural(state, i, j, cache, inputs(pair=[i, j])))
                if j <= config.groebner_pair_cap:
                    jobs.append(lambda i=i, j=j: _groebner(state, i, j, config, inputs(pair=[i, j])))
    if "irreducible" in checks:
        for k in range(n + 1):
            jobs.append(lambda k=k: _irreducible(state, k, inputs(n=k)))
    if "cover" in checks:
        m = config.coverage_points or state.cursor
        jobs.append(lambda m=m: _coverage(state, m, inputs(points=m)))
    if "degrees" in checks:
        jobs.append(lambda: _degrees(state, inputs(n=n)))

    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            certs = list(pool.map(lambda job: job(), jobs))
    else:
        certs = [job() for job in jobs]

    by_pair: dict[tuple[int, int], dict[str, str]] = {}
    for c in certs:
        if c.kind == "disjointness":
            by_pair.setdefault((c.index[0], c.index[1]), {})[c.index[2]] = c.conclusion
    disagreements = [
        p
        for p, m in sorted(by_pair.items())
        if "groebner" in m and m["groebner"] == PASS and m["structural"] != PASS
    ]
    return sorted(certs, key=Certificate.sort_key), disagreements


def _structural(state, i, j, cache, inputs) -> Certificate:
    c = structural_disjointness(state, i, j, cache)
    return Certificate("disjointness", (i, j, "structural"), inputs, c.to_evidence(), c.conclusion)


def _groebner(state, i, j, config, inputs) -> Certificate:
    c = groebner_disjointness(state, i, j, config.limits)
    return Certificate("disjointness", (i, j, "groebner"), inputs, c.to_evidence(), c.conclusion)


def _irreducible(state, k, inputs) -> Certificate:
    c = irreducibility_certificate(state, k)
    return Certificate("eisenstein", (k,), inputs, c.to_evidence(), c.conclusion)


def _coverage(state, m, inputs) -> Certificate:
    r = coverage_check(state, m)
    return Certificate("coverage", (m,), inputs, r.to_evidence(), r.conclusion)


def _degrees(state, inputs) -> Certificate:
    try:
        c = no_common_fibration_certificate(state)
    except ValueError as exc:
        return Certificate("degree-growth", (state.n,), inputs, {"error": str(exc)}, "fail")
    return Certificate("degree-growth", (state.n,), inputs, c.to_evidence(), c.conclusion)


def summarize(certs: list[Certificate], disagreements: list[tuple[int, int]]) -> str:
    lines = ["certificate summary"]
    kinds = sorted({c.kind for c in certs})
    for kind in kinds:
        counts = tally(c for c in certs if c.kind == kind)
        lines.append(
            f"  {kind:14s} pass={counts['pass']} fail={counts['fail']} inconclusive={counts['inconclusive']}"
        )
    for c in certs:
        if c.conclusion != PASS:
            lines.append(f"  {c.conclusion.upper()}: {c.kind} {list(c.index)}")
    for i, j in disagreements:
        lines.append(f"  DISAGREEMENT: structural and groebner differ on ({i}, {j})")
    counts = tally(certs)
    lines.append(f"total: pass={counts['pass']} fail={counts['fail']} inconclusive={counts['inconclusive']}")
    return "\n".join(lines) + "\n"


def cmd_verify(family_path: Path, checks: tuple[str, ...], config: RunConfig, out_dir: Path | None = None) -> VerifyResult:
    family_path = Path(family_path)
    state = load_family(family_path)
    ref = {"family": family_path.name, "family_digest": file_digest(family_path)}
    certs, disagreements = family_certificates(state, ref, checks, config)
    out_dir = Path(out_dir) if out_dir is not None else family_path.parent
    out_dir.mkdir(parents=True, exist_ok=True)
    bundle = out_dir / BUNDLE_FILE
    write_bundle(bundle, certs)
    summary = out_dir / SUMMARY_FILE
    summary.write_text(summarize(certs, disagreements), encoding="ascii")
    return VerifyResult(certs, bundle, summary, disagreements)


__all__ = [
    "BUNDLE_FILE",
    "CHECKS",
    "FAMILY_FILE",
    "OUTPUT_DIR_ENV",
    "RunConfig",
    "VerifyResult",
    "cmd_build",
    "cmd_verify",
    "family_certificates",
    "load_family",
    "summarize",
    "write_json",
]
