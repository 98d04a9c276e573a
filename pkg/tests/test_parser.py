from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from fearless.diagnostics import FearlessError
from fearless.parser import parse_expr, parse_text
from fearless.surface import SCall, SDeclRef, SEq, SLit, SNum, SStr, SVar


def shape(e):
    """Strip spans: nested tuples of call names and leaves."""
    if isinstance(e, SCall):
        return (shape(e.recv), e.meth, tuple(shape(a) for a in e.args))
    if isinstance(e, SVar):
        return e.name
    if isinstance(e, SNum):
        return e.text
    return type(e).__name__


def test_top_level_declaration():
    (d,) = parse_text("Bob:Person{ .age -> 42, .name -> \"Bob\" }").decls
    assert isinstance(d, SLit) and d.top
    assert d.name == "Bob" and [s.name for s in d.supers] == ["Person"]
    assert [m.name for m in d.methods] == [".age", ".name"]
    assert isinstance(d.methods[0].body, SNum) and isinstance(d.methods[1].body, SStr)


def test_abstract_signature_with_generics():
    (d,) = parse_text("Opt[T]:{ .match[R](m: OptMatch[T, R]): R }").decls
    m = d.methods[0]
    assert d.type_params == ["T"] and m.type_params == ["R"]
    assert m.params[0].name == "m" and m.params[0].type.name == "OptMatch"
    assert m.body is None and m.ret.name == "R"


def test_capabilities_on_methods_and_types():
    (d,) = parse_text("Ref[T]:{ read .rget: read T, mut .swap(x: T): T }").decls
    assert [str(m.rc) for m in d.methods] == ["read", "mut"]
    assert str(d.methods[0].ret.rc) == "read"


def test_explicit_self_name():
    (d,) = parse_text("A:{'me .m: A -> me }").decls
    assert d.self_name == "me"


def test_lambda_shorthand():
    e = parse_expr("l.map{ n -> n * 2 }")
    lam = e.args[0]
    assert isinstance(lam, SLit) and lam.name is None
    (m,) = lam.methods
    assert m.name is None and [p.name for p in m.params] == ["n"]


def test_declaration_reference_and_explicit_type_args():
    e = parse_expr("Opt#[Num](3)")
    assert isinstance(e.recv, SDeclRef) and e.recv.type.name == "Opt"
    assert e.meth == "#" and [t.name for t in e.targs] == ["Num"]


def test_binary_operators_are_left_associative():
    assert shape(parse_expr("a + b * c")) == (("a", "+", ("b",)), "*", ("c",))


def test_named_methods_chain_without_parentheses():
    assert shape(parse_expr("a .m b .n c")) == shape(parse_expr("a.m(b).n(c)"))


def test_parentheses_override_association():
    assert shape(parse_expr("a + (b * c)")) == ("a", "+", (("b", "*", ("c",)),))


def test_equals_sugar_parses_to_binding_node():
    e = parse_expr("Block#[Num] .var x = {1} .return {x}")
    assert isinstance(e, SEq)
    assert e.var == "x" and e.meth == ".var"


@pytest.mark.parametrize("text", ["A:{ .m -> }", "A:{ .m: }", "A:{ .m: A", "A:{ .m(x: ): A }"])
def test_syntax_errors(text):
    with pytest.raises(FearlessError) as e:
        parse_text(text)
    assert e.value.code == "E-PARSE"


names = st.sampled_from(["a", "b", "c", "d"])
ops = st.sampled_from(["+", "*", "-", "<", ".m", ".n"])


@given(names, st.lists(st.tuples(ops, names), min_size=1, max_size=6))
def test_unbracketed_chains_fold_left(first, rest):
    text = first + "".join(f" {op} {x}" for op, x in rest)
    expected = first
    for op, x in rest:
        expected = (expected, op, (x,))
    assert shape(parse_expr(text)) == expected
