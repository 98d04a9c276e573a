"""The ``fearless`` command: check, run, and dump ASTs.

Exit codes: 0 success, 1 diagnostics, 2 usage or I/O error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import astjson
from .ast import HEART, RC
from .diagnostics import FearlessError
from .interp import DEFAULT_FUEL, RuntimeFailure, evaluate
from .lexer import tokenize
from .parser import parse_expr, parse_program
from .pipeline import CheckResult, Source, check, front_end, load_prelude, user_decls
from .sugar import apply_sugar
from .surface import SurfaceProgram

OK, DIAGNOSTICS, USAGE, RUNTIME = 0, 1, 2, 3


@dataclass
class Outcome:
    code: int
    stdout: str = ""
    stderr: str = ""
    results: list[CheckResult] = field(default_factory=list)


def _read(paths) -> list[Source]:
    return [Source.read(p) for p in paths]


def _prelude(args) -> list[Source]:
    return load_prelude(getattr(args, "prelude", None), getattr(args, "no_prelude", False))


def _render(diags, as_json: bool) -> str:
    if as_json:
        return json.dumps([d.to_json() for d in diags], indent=2) + "\n"
    return "".join(d.render() + "\n" for d in diags)


def cmd_check(args) -> Outcome:
    try:
        sources = _prelude(args) + _read(args.files)
    except OSError as e:
        return Outcome(USAGE, stderr=f"error: {e}\n")
    res = check(sources, args.mode)
    out = _render(res.diagnostics, args.json)
    if args.json and not res.diagnostics:
        out = "[]\n"
    return Outcome(DIAGNOSTICS if res.diagnostics else OK, stdout=out, results=[res])


def cmd_run(args) -> Outcome:
    try:
        sources = _prelude(args) + _read([args.file])
    except OSError as e:
        return Outcome(USAGE, stderr=f"error: {e}\n")
    res = check(sources, RC)
    if res.diagnostics:
        return Outcome(DIAGNOSTICS, stderr=_render(res.diagnostics, False), results=[res])
    try:
        r = evaluate(res.program, args.entry, args.fuel)
    except RuntimeFailure as e:
        return Outcome(RUNTIME, stdout=getattr(e, "output", ""),
                       stderr="".join(d.render(args.file) + "\n" for d in e.diagnostics), results=[res])
    return Outcome(OK, stdout=r.output, results=[res])


def _surface_only(sp: SurfaceProgram, lo: int, hi: int) -> SurfaceProgram:
    return SurfaceProgram([d for d in sp.decls if lo <= d.span.start < hi])


def cmd_ast(args) -> Outcome:
    try:
        src = Source.read(args.file)
    except OSError as e:
        return Outcome(USAGE, stderr=f"error: {e}\n")
    if args.stage == "parsed":
        try:
            return Outcome(OK, stdout=astjson.dumps(astjson.surface_json(parse_program(tokenize(src.text)))))
        except FearlessError as program_error:
            try:
                return Outcome(OK, stdout=astjson.dumps(astjson.sexpr_json(parse_expr(src.text))))
            except FearlessError:
                return Outcome(DIAGNOSTICS, stderr=_render(program_error.diagnostics, False))
    sources = _prelude(args) + [src]
    res = front_end(sources, args.mode)
    if res.diagnostics:
        return Outcome(DIAGNOSTICS, stderr=_render(res.diagnostics, False), results=[res])
    index = len(sources) - 1
    lo = res.unit.bases[index]
    hi = lo + len(src.text) + 1
    if args.stage == "desugared":
        doc = astjson.surface_json(_surface_only(apply_sugar(res.parsed), lo, hi))
    else:
        decls = user_decls(res, index)
        doc = {"kind": "program", "mode": args.mode, "decls": [astjson.decl_json(d) for d in decls]}
    return Outcome(OK, stdout=astjson.dumps(doc), results=[res])


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fearless", description="Checker and interpreter for Fearless programs.")
    sub = ap.add_subparsers(dest="command", required=True)

    def prelude_flags(p):
        p.add_argument("--prelude", metavar="DIR", help="use the .fear files in DIR instead of the bundled prelude")
        p.add_argument("--no-prelude", action="store_true", help="do not load any prelude")

    c = sub.add_parser("check", help="type-check source files")
    c.add_argument("files", nargs="+")
    c.add_argument("--mode", choices=(HEART, RC), default=RC)
    c.add_argument("--json", action="store_true", help="print diagnostics as a JSON array")
    prelude_flags(c)
    c.set_defaults(fn=cmd_check)

    r = sub.add_parser("run", help="check a program and run its Main")
    r.add_argument("file")
    r.add_argument("--entry", help="declaration to run (default: the first implementing Main)")
    r.add_argument("--fuel", type=int, default=DEFAULT_FUEL, help="maximum number of reduction steps")
    prelude_flags(r)
    r.set_defaults(fn=cmd_run)

    a = sub.add_parser("ast", help="print the JSON AST of a stage")
    a.add_argument("file")
    a.add_argument("--stage", choices=("parsed", "desugared", "elaborated"), default="parsed")
    a.add_argument("--mode", choices=(HEART, RC), default=RC)
    prelude_flags(a)
    a.set_defaults(fn=cmd_ast)
    return ap


def execute(argv: list[str]) -> Outcome:
    """Run a command line and return its outcome without touching the real streams."""
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return Outcome(USAGE if e.code else OK)
    if getattr(args, "fuel", 1) < 0:
        return Outcome(USAGE, stderr="error: --fuel must not be negative\n")
    if getattr(args, "prelude", None) and not Path(args.prelude).is_dir():
        return Outcome(USAGE, stderr=f"error: prelude directory {args.prelude} not found\n")
    return args.fn(args)


def main(argv: list[str] | None = None) -> int:
    out = execute(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(out.stdout)
    sys.stderr.write(out.stderr)
    return out.code


if __name__ == "__main__":
    raise SystemExit(main())
