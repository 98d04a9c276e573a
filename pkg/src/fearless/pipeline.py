"""Compilation units and the staged pipeline: parse, desugar, elaborate, check, run."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Iterable

from .ast import HEART, RC, Program
from .diagnostics import Diagnostic, FearlessError
from .parser import parse_program
from .lexer import tokenize
from .surface import SurfaceProgram
from .sugar import apply_sugar

PRELUDE_FILES = (
    "func.fear", "bool.fear", "opt.fear", "list.fear", "block.fear",
    "let.fear", "num.fear", "ref.fear", "system.fear", "isopod.fear",
)


@dataclass(frozen=True)
class Source:
    path: str
    text: str

    @classmethod
    def read(cls, path: str | Path) -> "Source":
        return cls(str(path), Path(path).read_text(encoding="utf-8"))


def load_prelude(prelude_dir: str | Path | None = None, no_prelude: bool = False) -> list[Source]:
    """Prelude sources in dependency order; ``prelude_dir`` replaces the bundled ones."""
    if no_prelude:
        return []
    if prelude_dir is not None:
        return [Source.read(p) for p in sorted(Path(prelude_dir).glob("*.fear"))]
    pkg = resources.files("fearless.prelude")
    return [Source(f"<prelude>/{name}", (pkg / name).read_text(encoding="utf-8")) for name in PRELUDE_FILES]


@dataclass
class Unit:
    """Several sources concatenated into one program; spans stay attributable."""

    sources: list[Source]
    bases: list[int] = field(default_factory=list)

    def __post_init__(self) -> None:
        offset = 0
        self.bases = []
        for s in self.sources:
            self.bases.append(offset)
            offset += len(s.text) + 1

    def index_of(self, d: Diagnostic) -> int:
        idx = 0
        for i, b in enumerate(self.bases):
            if d.span.start >= b:
                idx = i
        return idx

    def locate(self, diags: Iterable[Diagnostic]) -> list[Diagnostic]:
        """Attach file paths and order by file, then span, then code."""
        placed = []
        for d in diags:
            i = self.index_of(d) if self.sources else 0
            path = self.sources[i].path if self.sources else "<input>"
            placed.append((i, replace(d, path=d.path or path)))
        placed.sort(key=lambda p: (p[0], p[1].span.line, p[1].span.col, p[1].code, p[1].message))
        out, seen = [], set()
        for _, d in placed:
            key = (d.path, d.span, d.code, d.message)
            if key not in seen:
                seen.add(key)
                out.append(d)
        return out


@dataclass
class CheckResult:
    unit: Unit
    mode: str
    diagnostics: list[Diagnostic] = field(default_factory=list)
    parsed: SurfaceProgram | None = None
    desugared: SurfaceProgram | None = None
    program: Program | None = None
    stage: str = "parse"  # last stage reached

    @property
    def ok(self) -> bool:
        return not self.diagnostics


def parse_unit(unit: Unit) -> tuple[SurfaceProgram, list[Diagnostic]]:
    decls, diags = [], []
    for src, base in zip(unit.sources, unit.bases):
        try:
            decls.extend(parse_program(tokenize(src.text, base)).decls)
        except FearlessError as e:
            diags.extend(replace(d, path=src.path) for d in e.diagnostics)
    return SurfaceProgram(decls), diags


def front_end(sources: list[Source], mode: str = RC) -> CheckResult:
    """Parse, desugar and elaborate; stops at the first failing stage."""
    from .elaborate import elaborate

    unit = Unit(list(sources))
    res = CheckResult(unit, mode)
    res.parsed, diags = parse_unit(unit)
    if diags:
        res.diagnostics = unit.locate(diags)
        return res
    res.stage = "desugar"
    res.desugared = apply_sugar(res.parsed)
    res.stage = "elaborate"
    try:
        res.program = elaborate(res.desugared, mode)
    except FearlessError as e:
        res.diagnostics = unit.locate(e.diagnostics)
    return res


def check(sources: list[Source], mode: str = RC) -> CheckResult:
    """The full static pipeline: front end, well-formedness, then the type checker of ``mode``."""
    from . import heart, rc, wf

    res = front_end(sources, mode)
    if res.diagnostics:
        return res
    res.stage = "wf"
    diags = wf.check_well_formed(res.program)
    if diags:
        res.diagnostics = res.unit.locate(diags)
        return res
    res.stage = "typecheck"
    checker = heart.check_program if mode == HEART else rc.check_program
    res.diagnostics = res.unit.locate(checker(res.program))
    return res


def user_sources(texts: Iterable[tuple[str, str]]) -> list[Source]:
    return [Source(p, t) for p, t in texts]


def check_text(text: str, mode: str = RC, prelude: bool = True, path: str = "<input>") -> CheckResult:
    """Check one source string, with the bundled prelude unless ``prelude`` is false."""
    return check(load_prelude(no_prelude=not prelude) + [Source(path, text)], mode)


def user_decls(res: CheckResult, index: int = -1) -> list:
    """Top-level elaborated declarations that come from source ``index``."""
    unit = res.unit
    i = index % len(unit.sources)
    lo = unit.bases[i]
    hi = lo + len(unit.sources[i].text) + 1
    return [d for d in res.program.top_level if lo <= d.span.start < hi]


@dataclass
class Reprint:
    text: str | None
    json: str | None
    diagnostics: list[Diagnostic] = field(default_factory=list)


def reprint(text: str, mode: str = RC, prelude: bool = True, path: str = "<input>") -> Reprint:
    """Parse, desugar and elaborate ``text``; print its declarations back as explicit source."""
    from . import astjson
    from .printer import print_decl

    res = front_end(load_prelude(no_prelude=not prelude) + [Source(path, text)], mode)
    if res.diagnostics:
        return Reprint(None, None, res.diagnostics)
    decls = user_decls(res)
    printed = "".join(print_decl(d) + "\n" for d in decls)
    return Reprint(printed, astjson.dumps([astjson.decl_json(d) for d in decls]))
