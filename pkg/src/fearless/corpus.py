"""Golden-file harness: ``<name>.fear`` next to ``<name>.expect``.

The first line of an expect file is the verdict:

``accept [heart|rc|both]``
    checks with no diagnostics (default mode rc);
``reject CODE [heart|rc]``
    checking reports at least one diagnostic and every one has ``CODE``;
``run N``
    ``fearless run`` exits with ``N``.

Words starting with ``--`` on the verdict line are passed to the command
(``--no-prelude``, ``--fuel 100``).

An optional ``---`` line follows; everything after it is the exact expected
standard output.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .ast import HEART, RC
from .cli import execute
from .diagnostics import CODES

SEPARATOR = "---"


@dataclass(frozen=True)
class Expect:
    verdict: str  # accept | reject | run
    modes: tuple[str, ...] = (RC,)
    code: str | None = None
    exit_code: int = 0
    stdout: str | None = None
    flags: tuple[str, ...] = ()


def _split_flags(words: list[str]) -> tuple[list[str], tuple[str, ...]]:
    for i, w in enumerate(words):
        if w.startswith("--"):
            return words[:i], tuple(words[i:])
    return words, ()


def _modes(word: str | None) -> tuple[str, ...]:
    if word in (None, RC):
        return (RC,)
    if word == HEART:
        return (HEART,)
    if word == "both":
        return (HEART, RC)
    raise ValueError(f"unknown mode {word!r}")


def parse_expect(text: str) -> Expect:
    first, _, rest = text.partition("\n")
    words, flags = _split_flags(first.split())
    if not words:
        raise ValueError("empty expect file")
    stdout = None
    lines = rest.split("\n")
    if lines and lines[0] == SEPARATOR:
        stdout = "\n".join(lines[1:])
    kind = words[0]
    if kind == "accept":
        return Expect("accept", _modes(words[1] if len(words) > 1 else None), stdout=stdout, flags=flags)
    if kind == "reject":
        if len(words) < 2 or words[1] not in CODES:
            raise ValueError(f"reject needs a registered diagnostic code: {first!r}")
        return Expect("reject", _modes(words[2] if len(words) > 2 else None), code=words[1], stdout=stdout,
                      flags=flags)
    if kind == "run":
        return Expect("run", (RC,), exit_code=int(words[1]) if len(words) > 1 else 0, stdout=stdout, flags=flags)
    raise ValueError(f"unknown verdict {kind!r}")


@dataclass(frozen=True)
class CaseResult:
    path: Path
    ok: bool
    detail: str = ""


def run_case(fear: Path) -> CaseResult:
    fear = Path(fear)
    exp = parse_expect(fear.with_suffix(".expect").read_text(encoding="utf-8"))
    if exp.verdict == "run":
        out = execute(["run", str(fear), *exp.flags])
        if out.code != exp.exit_code:
            return CaseResult(fear, False, f"exit {out.code}, expected {exp.exit_code}: {out.stderr.strip()}")
        if exp.stdout is not None and out.stdout != exp.stdout:
            return CaseResult(fear, False, f"stdout {out.stdout!r}, expected {exp.stdout!r}")
        return CaseResult(fear, True)
    for mode in exp.modes:
        out = execute(["check", "--mode", mode, str(fear), *exp.flags])
        if not out.results:
            return CaseResult(fear, False, f"[{mode}] check failed to start: {out.stderr.strip()}")
        diags = out.results[0].diagnostics
        if exp.verdict == "accept" and diags:
            return CaseResult(fear, False, f"[{mode}] unexpected: " + "; ".join(d.render() for d in diags))
        if exp.verdict == "reject":
            codes = sorted({d.code for d in diags})
            if codes != [exp.code]:
                return CaseResult(fear, False, f"[{mode}] codes {codes}, expected [{exp.code}]")
    return CaseResult(fear, True)


def discover(root: str | Path) -> list[Path]:
    """Every ``.fear`` file under ``root`` that has an expect file, in path order."""
    return sorted(p for p in Path(root).rglob("*.fear") if p.with_suffix(".expect").exists())


def run_corpus(root: str | Path) -> list[CaseResult]:
    return [run_case(p) for p in discover(root)]
