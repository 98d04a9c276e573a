"""Pretty-printing of elaborated programs as fully explicit source text.

The output re-parses and re-elaborates to the same program: every literal is
named, every signature is complete, every call lists its type arguments.
"""

from __future__ import annotations

from .ast import (CapVar, Concrete, Expr, Lit, Meta, Method, Program, Sig, TraitDecl, TVar, TypeRef,
                  Var, Call, display_decl, NUM_PREFIX, STR_PREFIX)

_ESCAPE = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t"}


def quote(s: str) -> str:
    return '"' + "".join(_ESCAPE.get(c, c) for c in s) + '"'


def print_type(t: TypeRef) -> str:
    if isinstance(t, Concrete):
        head = t.name.base
        if t.args:
            head += "[" + ", ".join(print_type(a) for a in t.args) + "]"
        return f"{t.rc} {head}" if t.rc else head
    if isinstance(t, TVar):
        return t.x
    if isinstance(t, CapVar):
        return f"{t.rc} {t.x}"
    if isinstance(t, Meta):
        return str(t)
    raise TypeError(type(t).__name__)


def _xs(xs) -> str:
    return "[" + ", ".join(xs) + "]" if xs else ""


def print_sig(s: Sig) -> str:
    head = f"{s.rc} " if s.rc else ""
    params = ", ".join(f"{x}: {print_type(t)}" for x, t in s.params)
    params = f"({params})" if s.params else ""
    return f"{head}{s.name.base}{_xs(s.type_params)}{params}: {print_type(s.ret)}"


def print_method(m: Method, indent: str) -> str:
    text = print_sig(m.sig)
    if m.body is not None:
        text += " -> " + print_expr(m.body, indent)
    return text


def _body(d: TraitDecl, indent: str) -> str:
    if not d.methods:
        return "{'" + d.self_name + "}"
    inner = indent + "  "
    members = (",\n" + inner).join(print_method(m, inner) for m in d.methods)
    return "{'" + d.self_name + "\n" + inner + members + "\n" + indent + "}"


def print_decl(d: TraitDecl, indent: str = "") -> str:
    supers = ", ".join(print_type(s) for s in d.supers)
    return f"{d.name.base}{_xs(d.type_params)}:{supers}{_body(d, indent)}"


def print_expr(e: Expr, indent: str = "") -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Lit):
        name = e.decl.name
        if name.is_numeral:
            return name.base[len(NUM_PREFIX):]
        if name.is_string:
            return quote(name.base[len(STR_PREFIX):])
        head = f"{e.rc} " if e.rc else ""
        return head + print_decl(e.decl, indent)
    if isinstance(e, Call):
        targs = "[" + ", ".join(print_type(t) for t in e.targs) + "]" if e.targs else ""
        args = ", ".join(print_expr(a, indent) for a in e.args)
        return f"{print_expr(e.recv, indent)}{e.meth.base}{targs}({args})"
    raise TypeError(type(e).__name__)


def pretty_print(p: Program) -> str:
    if not p.top_level:
        return ""
    return "\n".join(print_decl(d) for d in p.top_level) + "\n"


__all__ = ["pretty_print", "print_decl", "print_expr", "print_sig", "print_type", "quote", "display_decl"]
