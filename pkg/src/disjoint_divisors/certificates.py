"""Certificate records and JSON-lines bundles."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from . import __version__
from .mpoly import dumps_json

KINDS = ("degree-growth", "disjointness", "eisenstein", "coverage", "pencil", "lattice-fuzz")
CONCLUSIONS = ("pass", "fail", "inconclusive")


def digest(obj) -> str:
    return "sha256:" + hashlib.sha256(dumps_json(obj).encode()).hexdigest()


def file_digest(path: Path) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass(frozen=True)
class Certificate:
    kind: str
    index: tuple
    inputs: dict
    evidence: dict
    conclusion: str
    tool_version: str = __version__

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown certificate kind {self.kind!r}")
        if self.conclusion not in CONCLUSIONS:
            raise ValueError(f"unknown conclusion {self.conclusion!r}")

    @property
    def inputs_digest(self) -> str:
        return digest(self.inputs)

    def sort_key(self):
        return (self.kind, tuple(self.index))

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "index": list(self.index),
            "tool_version": self.tool_version,
            "inputs": self.inputs,
            "inputs_digest": self.inputs_digest,
            "evidence": self.evidence,
            "conclusion": self.conclusion,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Certificate":
        try:
            cert = cls(
                data["kind"],
                tuple(data["index"]),
                data["inputs"],
                data["evidence"],
                data["conclusion"],
                data["tool_version"],
            )
        except KeyError as exc:
            raise ValueError(f"certificate is missing field {exc}") from None
        if data.get("inputs_digest") != cert.inputs_digest:
            raise ValueError(f"inputs digest mismatch in {cert.kind} {list(cert.index)}")
        return cert


def write_bundle(path: Path, certs: Iterable[Certificate]) -> list[Certificate]:
    """Write certificates sorted by (kind, index), one JSON object per line."""
    ordered = sorted(certs, key=Certificate.sort_key)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for c in ordered:
            fh.write(dumps_json(c.to_json()))
            fh.write("\n")
    return ordered


def read_bundle(path: Path) -> list[Certificate]:
    certs = []
    with open(path, encoding="ascii") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                certs.append(Certificate.from_json(json.loads(line)))
            except (json.JSONDecodeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    return certs


def tally(certs: Iterable[Certificate]) -> dict[str, int]:
    out = {c: 0 for c in CONCLUSIONS}
    for cert in certs:
        out[cert.conclusion] += 1
    return out
