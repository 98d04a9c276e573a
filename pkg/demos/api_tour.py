"""Use the library directly: check a program, inspect a type, run it."""

from __future__ import annotations

from pathlib import Path

from fearless.ast import HEART, RC
from fearless.heart import type_of
from fearless.interp import evaluate, evaluate_method, native_value
from fearless.pipeline import check_text
from fearless.printer import print_decl

HERE = Path(__file__).parent

SOURCE = """Example:{ .sum(ns: List[Num]): Num -> ns.match{
    .empty -> 0,
    .elem(list, e) -> this.sum(list) + e
}}
Probe:{ .total: Num -> Example.sum(List[Num]+1+2+3) }
"""


def main() -> None:
    for mode in (HEART, RC):
        res = check_text(SOURCE, mode)
        print(f"{mode}: {len(res.diagnostics)} diagnostics")

    p = check_text(SOURCE, HEART).program
    probe = next(d for d in p.top_level if d.name.base == "Probe")
    print("elaborated:", print_decl(probe))
    body = probe.methods[0].body
    print("type of .total body:", type_of(p, body)[0])
    print("value:", native_value(evaluate_method(p, "Probe", ".total").value))

    for name in ("hello", "counter", "shapes"):
        res = check_text((HERE / f"{name}.fear").read_text(), RC)
        if res.diagnostics:
            print("\n".join(d.render() for d in res.diagnostics))
            continue
        print(f"--- {name}.fear")
        print(evaluate(res.program).output, end="")


if __name__ == "__main__":
    main()
