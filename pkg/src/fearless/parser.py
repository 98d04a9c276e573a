"""Recursive-descent parser from tokens to the surface tree.

All method calls share one precedence level and associate to the left, so
``1 + 2 * 3`` is ``(1 + 2) * 3``.  A single-argument call may drop its
parentheses, in which case the argument is one atom.
"""

from __future__ import annotations

from .diagnostics import Diagnostic, FearlessError, NO_SPAN, Span
from .lexer import Token, tokenize
from .surface import (SCall, SDeclRef, SEq, SExpr, SHole, SLit, SMethod, SNum, SParam,
                      SStr, SType, SurfaceProgram, SVar)

_ATOM_START = {"LIDENT", "UIDENT", "NUM", "STR", "LBRACE", "CAP"}
_METH_NAME = {"DOTIDENT", "OP"}


class Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    # -- token helpers

    def peek(self, k: int = 0) -> Token | None:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def kind(self, k: int = 0) -> str | None:
        t = self.peek(k)
        return t.kind if t else None

    def span(self) -> Span:
        t = self.peek()
        if t is not None:
            return t.span
        return self.toks[-1].span if self.toks else NO_SPAN

    def error(self, expected: list[str]):
        t = self.peek()
        found = repr(t.lexeme) if t else "end of input"
        raise FearlessError(Diagnostic(
            "E-PARSE", f"expected {' or '.join(sorted(set(expected)))}, found {found}", self.span()))

    def expect(self, kind: str) -> Token:
        if self.kind() != kind:
            self.error([kind])
        t = self.toks[self.i]
        self.i += 1
        return t

    def accept(self, kind: str) -> Token | None:
        if self.kind() == kind:
            t = self.toks[self.i]
            self.i += 1
            return t
        return None

    # -- program

    def program(self) -> SurfaceProgram:
        decls = []
        while self.peek() is not None:
            decls.append(self.top_decl())
        return SurfaceProgram(decls)

    def top_decl(self) -> SLit:
        sp = self.span()
        name = self.expect("UIDENT").lexeme
        xs = self.type_params() if self.kind() == "LBRACK" else []
        self.expect("COLON")
        lit = self.lit_rest(None, name, xs, sp)
        lit.top = True
        return lit

    def type_params(self) -> list[str]:
        self.expect("LBRACK")
        xs = []
        if self.kind() != "RBRACK":
            xs.append(self.expect("UIDENT").lexeme)
            while self.accept("COMMA"):
                xs.append(self.expect("UIDENT").lexeme)
        self.expect("RBRACK")
        return xs

    def lit_rest(self, rc, name, xs, sp) -> SLit:
        """Supers and optional body after ``Name[Xs]:``."""
        supers: list[SType] = []
        if self.kind() in ("UIDENT", "CAP"):
            supers.append(self.type())
            while self.accept("COMMA"):
                supers.append(self.type())
        if self.kind() == "LBRACE":
            self_name, methods = self.body()
        else:
            self_name, methods = None, []
        return SLit(rc, name, xs, supers, self_name, methods, False, sp)

    # -- types

    def type(self) -> SType:
        sp = self.span()
        rc = None
        if self.kind() == "CAP":
            rc = self.expect("CAP").lexeme
        name = self.expect("UIDENT").lexeme
        args = self.type_args() if self.kind() == "LBRACK" else []
        return SType(rc, name, args, sp)

    def type_args(self) -> list[SType]:
        self.expect("LBRACK")
        args = []
        if self.kind() != "RBRACK":
            args.append(self.type())
            while self.accept("COMMA"):
                args.append(self.type())
        self.expect("RBRACK")
        return args

    # -- literal bodies

    def body(self) -> tuple[str | None, list[SMethod]]:
        self.expect("LBRACE")
        self_name = None
        if self.kind() == "SELF":
            self_name = self.expect("SELF").lexeme[1:]
        methods: list[SMethod] = []
        if self.kind() == "RBRACE":
            self.i += 1
            return self_name, methods
        if self.starts_method():
            methods.append(self.method())
            while self.accept("COMMA"):
                if self.kind() == "RBRACE":
                    break
                methods.append(self.method())
        else:
            methods.append(self.lambda_member())
            self.accept("COMMA")
        self.expect("RBRACE")
        return self_name, methods

    def starts_method(self) -> bool:
        k = self.kind()
        if k in _METH_NAME:
            return True
        return k == "CAP" and self.kind(1) in _METH_NAME

    def is_lambda_params(self) -> bool:
        j = 0
        if self.kind() == "ARROW":
            return True
        while True:
            if self.kind(j) != "LIDENT":
                return False
            j += 1
            if self.kind(j) == "ARROW":
                return True
            if self.kind(j) != "COMMA":
                return False
            j += 1

    def lambda_member(self) -> SMethod:
        sp = self.span()
        params: list[SParam] = []
        if self.is_lambda_params():
            while self.kind() == "LIDENT":
                t = self.expect("LIDENT")
                params.append(SParam(t.lexeme, None, t.span))
                if not self.accept("COMMA"):
                    break
            self.expect("ARROW")
        body = self.expr()
        return SMethod(None, None, None, params, None, body, sp)

    def method(self) -> SMethod:
        sp = self.span()
        rc = self.expect("CAP").lexeme if self.kind() == "CAP" else None
        if self.kind() not in _METH_NAME:
            self.error(["method name"])
        name = self.toks[self.i].lexeme
        self.i += 1
        xs = self.type_params() if self.kind() == "LBRACK" else None
        params: list[SParam] = []
        if self.accept("LPAREN"):
            if self.kind() != "RPAREN":
                params.append(self.param())
                while self.accept("COMMA"):
                    params.append(self.param())
            self.expect("RPAREN")
        ret = None
        if self.accept("COLON"):
            ret = self.type()
        body = None
        if self.accept("ARROW"):
            body = self.expr()
        return SMethod(rc, name, xs, params, ret, body, sp)

    def param(self) -> SParam:
        t = self.expect("LIDENT")
        ty = self.type() if self.accept("COLON") else None
        return SParam(t.lexeme, ty, t.span)

    # -- expressions

    def expr(self) -> SExpr:
        return self.postfix(self.atom())

    def postfix(self, e: SExpr) -> SExpr:
        while self.kind() in _METH_NAME:
            sp = self.span()
            name = self.toks[self.i].lexeme
            self.i += 1
            targs = self.type_args() if self.kind() == "LBRACK" else None
            if self.kind() == "LPAREN":
                self.i += 1
                args = []
                if self.kind() != "RPAREN":
                    args.append(self.expr())
                    while self.accept("COMMA"):
                        args.append(self.expr())
                self.expect("RPAREN")
                e = SCall(e, name, targs, args, sp)
            elif self.kind() == "LIDENT" and self.kind(1) == "EQ":
                var = self.expect("LIDENT").lexeme
                self.expect("EQ")
                init = self.atom()
                cont = self.postfix(SHole(self.span()))
                return SEq(e, name, targs, var, init, cont, sp)
            elif self.kind() in _ATOM_START:
                e = SCall(e, name, targs, [self.atom()], sp)
            else:
                e = SCall(e, name, targs, [], sp)
        return e

    def atom(self) -> SExpr:
        sp = self.span()
        k = self.kind()
        if k == "LIDENT":
            return SVar(self.expect("LIDENT").lexeme, sp)
        if k == "NUM":
            return SNum(self.expect("NUM").lexeme, sp)
        if k == "STR":
            return SStr(self.expect("STR").value, sp)
        if k == "LPAREN":
            self.i += 1
            e = self.expr()
            self.expect("RPAREN")
            return e
        rc = None
        if k == "CAP":
            rc = self.expect("CAP").lexeme
            k = self.kind()
        if k == "LBRACE":
            self_name, methods = self.body()
            return SLit(rc, None, None, None, self_name, methods, False, sp)
        if k == "UIDENT":
            name_tok = self.expect("UIDENT")
            if self.kind() == "LBRACK" and self._brackets_then_colon():
                xs = self.type_params()
                self.expect("COLON")
                return self.lit_rest(rc, name_tok.lexeme, xs, sp)
            if self.kind() == "COLON":
                self.i += 1
                return self.lit_rest(rc, name_tok.lexeme, [], sp)
            args = self.type_args() if self.kind() == "LBRACK" else []
            ty = SType(None, name_tok.lexeme, args, name_tok.span)
            if self.kind() == "LBRACE":
                self_name, methods = self.body()
                return SLit(rc, None, None, [ty], self_name, methods, False, sp)
            return SDeclRef(rc, ty, sp)
        self.error(["expression"])

    def _brackets_then_colon(self) -> bool:
        depth, j = 0, 0
        while True:
            k = self.kind(j)
            if k is None:
                return False
            if k == "LBRACK":
                depth += 1
            elif k == "RBRACK":
                depth -= 1
                if depth == 0:
                    return self.kind(j + 1) == "COLON"
            j += 1


def parse_program(tokens: list[Token]) -> SurfaceProgram:
    return Parser(tokens).program()


def parse_text(text: str) -> SurfaceProgram:
    return parse_program(tokenize(text))


def parse_expr(text: str) -> SExpr:
    p = Parser(tokenize(text))
    e = p.expr()
    if p.peek() is not None:
        p.error(["end of input"])
    return e
