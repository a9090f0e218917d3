"""Command line front end.

    quasistrat <command> <input.json> [--samples N] [--seed S] [--tol name=value]...
               [--format json|text] [--dot faces|pieces] [--epsilon E]

Exit codes: 0 ok, 1 verification failure, 2 usage or validation error
(reported as JSON on stderr).
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .field import FieldError
from .moment import DEFAULT_TOL, Tolerances, sample_records
from .polytope import PolytopeError, enumerate_faces, read_polytope
from .report import (
    analyze_report,
    export_dot,
    face_report,
    links_report,
    strata_report,
    to_json,
    to_text,
    torus_report,
    verify_table,
)
from .strata import build_stratification
from .torus import TorusError, build_torus_data
from .verify import run_verification

COMMANDS = ("analyze", "faces", "strata", "links", "sample", "verify", "export")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    input: Path
    samples: int = 1000
    seed: int = 42
    tol: dict[str, float] = field(default_factory=dict)
    format: str = "json"
    dot: str = "faces"
    epsilon: float = 1.0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="quasistrat", description="Face lattice, torus data and strata of a symplectic quotient of a polytope.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("input", type=Path)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                   help="override a tolerance: zero, level, rank or feas")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--dot", choices=("faces", "pieces"), default="faces")
    p.add_argument("--epsilon", type=float, default=1.0)
    return p


def parse_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    tol = {}
    for item in ns.tol:
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--tol expects name=value, got {item!r}")
        try:
            tol[name.strip()] = float(value)
        except ValueError:
            raise UsageError(f"--tol value for {name!r} is not a number") from None
    if ns.samples < 0:
        raise UsageError("--samples must be nonnegative")
    if ns.seed < 0 or ns.seed >= 2**64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    if not ns.epsilon > 0:
        raise UsageError("--epsilon must be positive")
    return RunConfig(ns.command, ns.input, ns.samples, ns.seed, tol, ns.format, ns.dot, ns.epsilon)


def _fail(code: str, message: str, status: int = 2) -> int:
    print(json.dumps({"error": code, "message": message}), file=sys.stderr)
    return status


def run(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    try:
        tol = DEFAULT_TOL.with_overrides(cfg.tol)
    except ValueError as e:
        return _fail("usage", str(e))
    try:
        P = read_polytope(cfg.input)
    except OSError as e:
        return _fail("io", f"cannot read input: {e}")
    except PolytopeError as e:
        return _fail(e.code, str(e))
    try:
        T = build_torus_data(P)
        faces = enumerate_faces(P)
        render = to_text if cfg.format == "text" else to_json
        if cfg.command == "analyze":
            doc = analyze_report(P, T, faces)
            doc["torus"] = torus_report(T, faces)
            out.write(render(doc))
        elif cfg.command == "faces":
            out.write(render({"faces": face_report(P, faces)}))
        elif cfg.command == "strata":
            out.write(render(strata_report(build_stratification(P, T, faces))))
        elif cfg.command == "links":
            out.write(render(links_report(P, T, faces, cfg.epsilon)))
        elif cfg.command == "sample":
            for rec in sample_records(T, faces, cfg.samples, cfg.seed, tol):
                out.write(json.dumps(rec) + "\n")
        elif cfg.command == "export":
            obj = faces if cfg.dot == "faces" else build_stratification(P, T, faces)
            out.write(export_dot(obj, cfg.dot))
        elif cfg.command == "verify":
            result = run_verification(P, cfg.samples, cfg.seed, tol, cfg.epsilon)
            out.write(verify_table(result) if cfg.format == "text" else to_json(result))
            return 0 if result["passed"] else 1
    except (TorusError, FieldError, ValueError) as e:
        return _fail("validation", str(e))
    return 0


def main(argv=None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
    except UsageError as e:
        return _fail("usage", str(e))
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
