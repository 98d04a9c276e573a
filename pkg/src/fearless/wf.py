"""Well-formedness: the syntactic side conditions checked before typing."""

from __future__ import annotations

from .ast import (HEART, ISO, CapVar, Call, Concrete, DeclName, Lit, Method, Program, TraitDecl, TVar,
                  Var, type_vars_of)
from .diagnostics import Diagnostic, sort_diagnostics


def inheritance_order(p: Program) -> tuple[list[DeclName], list[Diagnostic]]:
    """A topological order of the implements relation (supers first) and any cycles found."""
    order: list[DeclName] = []
    diags: list[Diagnostic] = []
    state: dict[DeclName, int] = {}  # 1 visiting, 2 done
    stack: list[DeclName] = []
    reported: set[frozenset] = set()

    def visit(n: DeclName) -> None:
        state[n] = 1
        stack.append(n)
        for s in p.table[n].supers:
            if s.name not in p.table:
                continue
            st = state.get(s.name, 0)
            if st == 0:
                visit(s.name)
            elif st == 1:
                cycle = stack[stack.index(s.name):]
                key = frozenset(cycle)
                if key not in reported:
                    reported.add(key)
                    names = " -> ".join(str(c) for c in cycle + [s.name])
                    diags.append(Diagnostic("E-WF-CYCLE", f"cyclic inheritance: {names}", p.table[cycle[0]].span))
        stack.pop()
        state[n] = 2
        order.append(n)

    for n in p.table:
        if state.get(n, 0) == 0:
            visit(n)
    return order, diags


def _iso_typed(t) -> bool:
    return (isinstance(t, Concrete) and t.rc is ISO) or (isinstance(t, CapVar) and t.rc is ISO)


def _uses(e, x: str, inside: bool, acc: list[bool]) -> None:
    """Record every occurrence of ``x``: True when nested in a literal."""
    if isinstance(e, Var):
        if e.name == x:
            acc.append(inside)
    elif isinstance(e, Call):
        _uses(e.recv, x, inside, acc)
        for a in e.args:
            _uses(a, x, inside, acc)
    elif isinstance(e, Lit):
        if e.decl.self_name == x:
            return
        for m in e.decl.methods:
            if m.body is not None and x not in m.sig.param_names:
                _uses(m.body, x, True, acc)


def check_iso_affine(m: Method) -> list[Diagnostic]:
    """An iso parameter is used at most once, or only inside nested literals."""
    if m.body is None:
        return []
    out = []
    for x, t in m.sig.params:
        if not _iso_typed(t):
            continue
        acc: list[bool] = []
        _uses(m.body, x, False, acc)
        if len(acc) > 1 and not all(acc):
            out.append(Diagnostic("E-WF-ISO-AFFINE",
                                  f"iso parameter {x} is used {len(acc)} times outside object literals", m.span))
    return out


class _Checker:
    def __init__(self, p: Program):
        self.p = p
        self.rc = p.mode != HEART
        self.diags: list[Diagnostic] = []
        self.body_decls = {d.name for d in p.table.values() if d.in_body}

    def err(self, code: str, msg: str, span) -> None:
        self.diags.append(Diagnostic(code, msg, span))

    def run(self) -> list[Diagnostic]:
        p = self.p
        seen: dict[DeclName, TraitDecl] = {}
        for d in p.top_level:
            if d.name in seen:
                self.err("E-WF-DUP-DECL", f"declaration {d.name} is declared more than once", d.span)
            seen.setdefault(d.name, d)
        for d in p.duplicates:
            if d.name in seen and any(d is t for t in p.top_level):
                continue
            self.err("E-WF-DUP-DECL", f"declaration {d.name} is declared more than once", d.span)
        _, cycles = inheritance_order(p)
        self.diags.extend(cycles)
        for d in p.top_level:
            if d.self_name != "this":
                self.err("E-WF-SELF-NAME", f"top-level declaration {d.name} names itself '{d.self_name}'; "
                         "it must be 'this'", d.span)
            self.lit(d, [], (), top=True)
        return sort_diagnostics(self.diags)

    def types(self, ts, scope, span, what: str) -> None:
        for t in ts:
            for x in type_vars_of(t):
                if x not in scope:
                    self.err("E-WF-FUNNEL", f"type variable {x} in {what} is not declared by the literal", span)
            if self.rc:
                self.iso_args(t, span)

    def iso_args(self, t, span) -> None:
        if isinstance(t, Concrete):
            for a in t.args:
                if _iso_typed(a):
                    self.err("E-WF-ISO-ARG", f"iso type {a} used as a generic argument in {t}", span)
                self.iso_args(a, span)

    def lit(self, d: TraitDecl, vars_: list[str], outer_xs: tuple[str, ...], top: bool) -> None:
        if d.name.is_reserved:
            return
        if d.self_name in vars_:
            self.err("E-WF-SHADOW", f"self-name {d.self_name} shadows an enclosing variable", d.span)
        if not top:
            for x in d.type_params:
                if x not in outer_xs:
                    self.err("E-WF-FUNNEL", f"literal {d.name} declares type variable {x}, "
                             "which is not in scope", d.span)
        for s in d.supers:
            if s.name in self.body_decls:
                self.err("E-WF-FINAL", f"{s.name} is declared inside a method body and cannot be implemented",
                         d.span)
        if len(set(d.type_params)) != len(d.type_params):
            self.err("E-WF-DUP-SIG", f"literal {d.name} repeats a type parameter", d.span)
        self.types(d.supers, d.type_params, d.span, f"the supertypes of {d.name}")
        names = set()
        vs = vars_ + [d.self_name]
        for m in d.methods:
            if m.name in names:
                self.err("E-WF-DUP-METH", f"method {m.name} is declared twice in {d.name}", m.span)
            names.add(m.name)
            self.method(d, m, vs)

    def method(self, d: TraitDecl, m: Method, vs: list[str]) -> None:
        s = m.sig
        binders = list(s.type_params) + list(s.param_names)
        if len(set(binders)) != len(binders):
            self.err("E-WF-DUP-SIG", f"signature of {s.name} repeats a type parameter or parameter name", m.span)
        for x in s.type_params:
            if x in d.type_params:
                self.err("E-WF-SHADOW", f"type parameter {x} of {s.name} shadows a type variable of {d.name}",
                         m.span)
        for x in s.param_names:
            if x in vs:
                self.err("E-WF-SHADOW", f"parameter {x} of {s.name} shadows an enclosing variable", m.span)
        scope = d.type_params + s.type_params
        self.types([t for _, t in s.params] + [s.ret], scope, m.span, f"the signature of {s.name}")
        if m.body is not None:
            if self.rc:
                self.diags.extend(check_iso_affine(m))
            self.expr(m.body, vs + list(s.param_names), scope)

    def expr(self, e, vs: list[str], scope: tuple[str, ...]) -> None:
        if isinstance(e, Call):
            self.expr(e.recv, vs, scope)
            self.types(e.targs, scope, e.span, f"the type arguments of {e.meth}")
            for a in e.args:
                self.expr(a, vs, scope)
        elif isinstance(e, Lit):
            self.lit(e.decl, vs, scope, top=False)


def check_well_formed(p: Program) -> list[Diagnostic]:
    """All well-formedness diagnostics of ``p``, ordered by span then code."""
    return _Checker(p).run()
