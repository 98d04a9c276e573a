from __future__ import annotations

import random

import pytest

from fearless.ast import HEART, RC, Program
from fearless.pipeline import check_text
from fearless.traits import Traits
from fearless.wf import check_well_formed, inheritance_order
from generators import instances, random_table
from helpers import checked, codes


@pytest.mark.parametrize("text,code", [
    ("A:{} B:{} A:{}", "E-WF-DUP-DECL"),
    ("A:{ .x: Num -> 1, .x: Num -> 2 }", "E-WF-DUP-METH"),
    ("A:{ .x[X, X]: Num -> 1 }", "E-WF-DUP-SIG"),
    ("A:{ .x[X](a: X): F[X] -> {.m[X]: F[X] -> this.x(a)} }", "E-WF-SHADOW"),
    ("A:{ .x(a: Num): Num -> Let#(a, {a -> a}) }", "E-WF-SHADOW"),
    ("A:C{} B:A{} C:B{}", "E-WF-CYCLE"),
    ("A:{'self .x: A -> self }", "E-WF-SELF-NAME"),
    ("Mk:{ #: Rec -> Rec:{ .v: Num -> 1 } } Sub:{ .k: Rec -> Rec{} }", "E-WF-FINAL"),
])
def test_violations_report_their_code(text, code):
    assert codes(text) == [code]


@pytest.mark.parametrize("text,code", [
    ("A:{ .x(o: Opt[iso A]): Num -> 1 }", "E-WF-ISO-ARG"),
    ("A:{ .x(a: iso A): Num -> Block#(a, a, 1) }", "E-WF-ISO-AFFINE"),
])
def test_capability_violations_only_in_rc_mode(text, code):
    assert codes(text, RC) == [code]
    assert codes(text, HEART) == []


def test_iso_parameter_may_be_captured_repeatedly_by_literals():
    assert codes("A:{ .x(a: iso A): F[A] -> Block#(F[A]{a}, F[A]{a}) }") == []


def test_self_reference_does_not_count_toward_affinity():
    assert codes("A:{ .x(a: iso A): Num -> Block#(this, this, a, 1) }") == []


def test_arity_overloads_coexist():
    assert codes("G[A]:{} G[A, B]:{} G:{}") == []


def test_cycle_reported_once():
    res = check_text("A:B{} B:A{}")
    assert [d.code for d in res.diagnostics] == ["E-WF-CYCLE"]


def test_inheritance_order_puts_supers_first():
    p = checked("A:{} B:A{} C:B, A{}")
    order, diags = inheritance_order(p)
    names = [n.base for n in order]
    assert not diags
    assert names.index("A") < names.index("B") < names.index("C")


def test_checking_is_deterministic():
    text = "A:{ .x: Num -> 1, .x: Num -> 2 } B:{ .y[X, X]: Num -> 1 } A:{}"
    first = check_text(text).diagnostics
    assert first and first == check_text(text).diagnostics


def test_diagnostics_are_ordered_by_position():
    res = check_text("B:{ .y[X, X]: Num -> 1 }\nA:{ .x: Num -> 1, .x: Num -> 2 }")
    spans = [(d.span.line, d.span.col) for d in res.diagnostics]
    assert spans == sorted(spans) and len(spans) == 2


@pytest.mark.parametrize("seed", range(40))
def test_acyclic_tables_have_terminating_method_collection(seed):
    table = random_table(random.Random(seed))
    p = Program.build(table.values())
    _, cycles = inheritance_order(p)
    assert not cycles
    traits = Traits(p.table)
    for t in instances(table):
        traits.dmeths(t)
        traits.meths(t)


def test_checker_entry_point_on_clean_program():
    assert check_well_formed(checked("A:{ .x: Num -> 1 }")) == []
