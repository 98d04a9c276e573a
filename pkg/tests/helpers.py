"""Shared helpers for the test suite."""

from __future__ import annotations

from pathlib import Path

from fearless.ast import HEART, RC, MethName
from fearless.pipeline import check_text

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"


def codes(text: str, mode: str = RC, prelude: bool = True) -> list[str]:
    """The sorted distinct diagnostic codes for a source string."""
    return sorted({d.code for d in check_text(text, mode, prelude).diagnostics})


def checked(text: str, mode: str = RC, prelude: bool = True):
    """The elaborated program; fails the test if checking reports anything."""
    res = check_text(text, mode, prelude)
    assert not res.diagnostics, "\n".join(d.render() for d in res.diagnostics)
    return res.program


def decl(p, name: str):
    return next(d for d in p.table.values() if d.name.base == name)


def method(p, decl_name: str, meth: str, arity: int = 0):
    return decl(p, decl_name).method(MethName(meth, arity))


BOTH = (HEART, RC)


def focus_path(e) -> list:
    """The calls from the root down to the next redex, in evaluation order."""
    from fearless.ast import Call, is_value

    out = []
    cur = e
    while isinstance(cur, Call):
        out.append(cur)
        if not is_value(cur.recv):
            cur = cur.recv
            continue
        nxt = next((a for a in cur.args if not is_value(a)), None)
        if nxt is None:
            break
        cur = nxt
    return out


def walk_reduction(machine, e, limit: int = 100):
    """Step ``e`` on ``machine`` up to ``limit`` times, checking determinism and preservation.

    Returns a list of problems (empty when both properties hold) and the
    number of steps taken.
    """
    from fearless.ast import HEART, is_value
    from fearless.heart import BODY, HeartChecker, TypeEnv

    checker = HeartChecker(machine.p)
    checker.traits = machine.traits  # sees native values as they are created
    t0 = checker.check(TypeEnv(), e, None, BODY)
    problems = [f"initial term does not type: {checker.diags}"] if t0 is None else []
    steps = 0
    while not problems and steps < limit and not is_value(e):
        for node in focus_path(e):
            rules = machine.rules(node)
            if len(rules) != 1:
                problems.append(f"step {steps}: rules {rules} apply to a call of {node.meth}")
        e = machine.step(e)
        steps += 1
        checker.diags = []
        t = checker.check(TypeEnv(), e, None, BODY)
        if t is None or checker.diags or not checker.traits.is_subtype(t, t0, HEART):
            problems.append(f"step {steps}: type {t} is not a subtype of {t0}: {checker.diags}")
    return problems, steps
