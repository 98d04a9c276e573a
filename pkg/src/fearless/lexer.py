"""Tokenizer for Fearless source text."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .diagnostics import Diagnostic, FearlessError, Span

CAP_KEYWORDS = frozenset({"imm", "iso", "read", "mut"})
OP_CHARS = frozenset("+-*/<>=!#&|%^~?@$\\")
PUNCT = {"(": "LPAREN", ")": "RPAREN", "[": "LBRACK", "]": "RBRACK",
         "{": "LBRACE", "}": "RBRACE", ",": "COMMA", ":": "COLON"}

_UIDENT = re.compile(r"[A-Z][A-Za-z0-9_]*")
_LIDENT = re.compile(r"[a-z_][A-Za-z0-9_]*")
_DOTIDENT = re.compile(r"\.[a-z][A-Za-z0-9_]*")
_SELFNAME = re.compile(r"'[a-z_][A-Za-z0-9_]*")
_NUM = re.compile(r"[0-9]+")
_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


@dataclass(frozen=True)
class Token:
    kind: str
    lexeme: str
    span: Span
    value: str | None = None  # decoded payload for STR tokens

    def __repr__(self) -> str:
        return f"{self.kind}({self.lexeme!r})"


def tokenize(text: str, base: int = 0) -> list[Token]:
    """Split ``text`` into tokens; ``base`` is added to every byte offset."""
    tokens: list[Token] = []
    i, line, line_start = 0, 1, 0
    n = len(text)

    def span(start: int, end: int) -> Span:
        return Span(line, start - line_start + 1, base + start, base + end)

    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            line_start = i
            continue
        if c in " \t\r":
            i += 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        start = i
        if c == '"':
            i += 1
            chars = []
            while True:
                if i >= n or text[i] == "\n":
                    raise FearlessError(Diagnostic("E-LEX", "unterminated string literal", span(start, i)))
                if text[i] == '"':
                    i += 1
                    break
                if text[i] == "\\" and i + 1 < n and text[i + 1] in _ESCAPES:
                    chars.append(_ESCAPES[text[i + 1]])
                    i += 2
                    continue
                chars.append(text[i])
                i += 1
            tokens.append(Token("STR", text[start:i], span(start, i), "".join(chars)))
            continue
        if c in PUNCT:
            i += 1
            tokens.append(Token(PUNCT[c], c, span(start, i)))
            continue
        for kind, pattern in (("UIDENT", _UIDENT), ("DOTIDENT", _DOTIDENT), ("SELF", _SELFNAME),
                              ("NUM", _NUM), ("LIDENT", _LIDENT)):
            m = pattern.match(text, i)
            if m:
                lexeme = m.group()
                if kind == "LIDENT" and lexeme in CAP_KEYWORDS:
                    kind = "CAP"
                i = m.end()
                tokens.append(Token(kind, lexeme, span(start, i)))
                break
        else:
            if c in OP_CHARS:
                while i < n and text[i] in OP_CHARS and not text.startswith("//", i):
                    i += 1
                lexeme = text[start:i]
                kind = {"=": "EQ", "->": "ARROW"}.get(lexeme, "OP")
                tokens.append(Token(kind, lexeme, span(start, i)))
                continue
            raise FearlessError(Diagnostic("E-LEX", f"illegal character {c!r}", span(start, start + 1)))
    return tokens
