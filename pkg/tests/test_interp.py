from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from fearless.ast import HEART, RC, Call, Lit, MethName, erase_caps, is_value
from fearless.diagnostics import FearlessError
from fearless.interp import (CALL_LIT, CALL_TOP, CTX_ARG, CTX_RECV, MAGIC, Machine, RuntimeFailure, evaluate,
                             evaluate_method, find_entry, native_value, show)
from helpers import CORPUS, checked, focus_path

EXAMPLE = """Example:{ .sum(ns: List[Num]): Num -> ns.match{
    .empty -> 0,
    .elem(list, e) -> this.sum(list) + e
}}
"""


def run(expr: str, ty: str, text: str = "", mode: str = RC):
    """Evaluate ``expr`` of type ``ty`` as the body of a probe method."""
    p = checked(f"{text}\nProbe:{{ .run: {ty} -> {expr} }}", mode)
    return evaluate_method(p, "Probe", ".run").value


@pytest.mark.parametrize("mode", [HEART, RC])
def test_list_sum(mode):
    assert native_value(run("Example.sum(List[Num]+1+2+3)", "Num", EXAMPLE, mode)) == 6


@pytest.mark.parametrize("mode", [HEART, RC])
def test_boolean_branch(mode):
    v = run('True.and(False).if{.then->"Yay",.else->"Boo"}', "Str", mode=mode)
    assert show(v) == '"Boo"'


@pytest.mark.parametrize("expr,expected", [
    ("2 + 3", 5), ("2 - 3", -1), ("4 * 5", 20), ("(7 * 6).str", "42"),
    ('"ab" + "cd"', "abcd"), ('"hello, World!".upperCase', "HELLO, WORLD!"),
    ('"é-x".upperCase', "é-X"),
])
def test_native_operations(expr, expected):
    ty = "Str" if isinstance(expected, str) else "Num"
    assert native_value(run(expr, ty)) == expected


@pytest.mark.parametrize("expr,truth", [("1 < 2", True), ("2 < 1", False), ("3 == 3", True), ('"a" == "b"', False)])
def test_comparisons_return_prelude_booleans(expr, truth):
    v = run(expr, "Bool")
    assert v.decl.name.base == ("True" if truth else "False")


@given(st.integers(min_value=0, max_value=10**30), st.integers(min_value=0, max_value=10**30))
def test_numerals_are_arbitrary_precision(a, b):
    p = checked(f"Probe:{{ .run: Num -> {a} * {b} + 1 }}")
    assert native_value(evaluate_method(p, "Probe", ".run").value) == a * b + 1


def test_optional_some_branch():
    assert native_value(run("Opt#7 .match{.empty -> 0, .some(t) -> t + 1}", "Num")) == 8


def test_list_map():
    p = checked(EXAMPLE + "Probe:{ .run: Num -> Example.sum((List[Num]+1+2).map{ n -> n * 10 }) }")
    assert native_value(evaluate_method(p, "Probe", ".run").value) == 30


def test_reference_swap_returns_old_value():
    p = checked((CORPUS / "run" / "ref_cells.fear").read_text())
    r = evaluate(p)
    assert r.output == "Bob\nCarol\n"
    assert len(r.store) == 1


def test_pure_programs_leave_the_store_empty():
    p = checked(EXAMPLE + "Probe:{ .run: Num -> Example.sum(List[Num]+1+2+3) }")
    assert evaluate_method(p, "Probe", ".run").store == {}


@pytest.mark.parametrize("name", ["hello", "sum", "boo", "capitalise", "ref_cells", "isopod", "block_vars"])
def test_erasing_capabilities_does_not_change_behaviour(name):
    p = checked((CORPUS / "run" / f"{name}.fear").read_text())
    a, b = evaluate(p), evaluate(erase_caps(p))
    assert (a.output, show(a.value)) == (b.output, show(b.value))


def test_fuel_exhaustion_is_an_error():
    p = checked((CORPUS / "run" / "loop.fear").read_text())
    with pytest.raises(RuntimeFailure) as e:
        evaluate(p, fuel=200)
    assert e.value.code == "E-RT-FUEL"


def test_missing_entry_point():
    with pytest.raises(RuntimeFailure) as e:
        find_entry(checked("A:{}"))
    assert e.value.code == "E-RT-NO-ENTRY"
    with pytest.raises(FearlessError):
        find_entry(checked("A:Main{ sys -> Void }"), "Nope")


def test_entry_point_by_name():
    p = checked("A:Main{ sys -> sys.println \"a\" } B:Main{ sys -> sys.println \"b\" }")
    assert evaluate(p).output == "a\n"
    assert evaluate(p, "B").output == "b\n"


def test_each_configuration_selects_exactly_one_rule():
    p = checked(EXAMPLE + "Probe:{ .run: Num -> Example.sum(List[Num]+1+2+3) }")
    m = Machine(p)
    e = Call(Lit(None, next(d for d in p.top_level if d.name.base == "Probe")), MethName(".run"), (), ())
    seen = set()
    while not is_value(e):
        for node in focus_path(e):
            rules = m.rules(node)
            assert len(rules) == 1
            seen.update(rules)
        e = m.step(e)
    assert native_value(e) == 6
    assert seen == {CTX_RECV, CTX_ARG, CALL_LIT, CALL_TOP, MAGIC}


def test_values_have_no_rules():
    p = checked("A:{}")
    assert Machine(p).rules(Lit(None, p.top_level[-1])) == []


def test_trace_records_successive_configurations():
    p = checked("Probe:{ .run: Num -> 1 + 2 }")
    m = Machine(p)
    start = Call(Lit(None, p.top_level[-1]), MethName(".run"), (), ())
    trace = m.trace(start, 10)
    assert trace[0] == start and native_value(trace[-1]) == 3 and m.steps == len(trace) - 1
