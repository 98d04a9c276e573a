from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from fearless.diagnostics import FearlessError
from fearless.lexer import tokenize


def kinds(text: str) -> list[str]:
    return [t.kind for t in tokenize(text)]


def test_declaration_tokens():
    assert kinds("Bob:Person{ .age -> 42 }") == [
        "UIDENT", "COLON", "UIDENT", "LBRACE", "DOTIDENT", "ARROW", "NUM", "RBRACE"]


def test_capabilities_and_self_names():
    toks = tokenize("mut x 'self iso read imm")
    assert [t.kind for t in toks] == ["CAP", "LIDENT", "SELF", "CAP", "CAP", "CAP"]


def test_operators_use_maximal_munch():
    assert [t.lexeme for t in tokenize("a <= b == c")] == ["a", "<=", "b", "==", "c"]
    assert [t.lexeme for t in tokenize("x.y+z")] == ["x", ".y", "+", "z"]


def test_comments_are_skipped():
    assert kinds("// a comment\nA") == ["UIDENT"]


def test_spans_track_lines_and_columns():
    a, b = tokenize("A\n  B")
    assert (a.span.line, a.span.col) == (1, 1)
    assert (b.span.line, b.span.col, b.span.start) == (2, 3, 4)


def test_base_offset_shifts_spans():
    (t,) = tokenize("A", base=100)
    assert t.span.start == 100


def test_string_escapes_are_decoded():
    (t,) = tokenize(r'"a\tb\n\"q\""')
    assert t.kind == "STR"
    assert t.value == 'a\tb\n"q"'


@pytest.mark.parametrize("text", ['"abc', "`", "A:{ ; }"])
def test_lexical_errors(text):
    with pytest.raises(FearlessError) as e:
        tokenize(text)
    assert e.value.code == "E-LEX"


@given(st.lists(st.sampled_from(["Foo", "bar", ".m", "+", "->", "(", ")", "12", "mut", ","]), max_size=20))
def test_lexemes_concatenate_back(words):
    text = " ".join(words)
    assert [t.lexeme for t in tokenize(text)] == words
