"""Type checking without capabilities.

Checking is synthesis first, followed by one subtype comparison against the
expected type.  Mismatches are attributed by the shape of the offending
expression: a call whose result does not fit reports ``E-TY-SUBSUME``; any
other expression reports the code of its position (``E-TY-BODY`` for a
method body, ``E-TY-ARG`` for an argument).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ast import (HEART, Call, CapVar, Concrete, Lit, Method, Program, TraitDecl, TVar, TypeRef, Var,
                  subst_type_vars)
from .diagnostics import Diagnostic, sort_diagnostics
from .traits import DM, Traits

BODY, ARG = "E-TY-BODY", "E-TY-ARG"


@dataclass
class TypeEnv:
    vars: dict[str, TypeRef] = field(default_factory=dict)
    type_vars: tuple[str, ...] = ()
    hidden: dict[str, str] = field(default_factory=dict)  # variable -> why it is not visible

    def extend(self, bindings, type_vars=()) -> "TypeEnv":
        vs = dict(self.vars)
        vs.update(bindings)
        hidden = {x: why for x, why in self.hidden.items() if x not in vs}
        return TypeEnv(vs, self.type_vars + tuple(type_vars), hidden)


class HeartChecker:
    mode = HEART

    def __init__(self, p: Program):
        self.p = p
        self.traits = Traits(p.table)
        self.diags: list[Diagnostic] = []

    def err(self, code: str, msg: str, span) -> None:
        self.diags.append(Diagnostic(code, msg, span))

    # ------------------------------------------------------------ program and literals

    def check_program(self) -> list[Diagnostic]:
        for d in self.p.top_level:
            self.check_lit(TypeEnv(), d)
        return sort_diagnostics(self.diags)

    def check_compose(self, d: TraitDecl) -> None:
        t = d.self_type()
        for a, b in self.traits.override_problems(t):
            self.err("E-TY-OVERRIDE", f"{d.name} inherits {a.name.base} with incompatible signatures "
                     f"{a.mtype} (from {a.origin}) and {b.mtype} (from {b.origin})", d.span)
        reported = set()
        for a, b in self.traits.implement_problems(t):
            if a.name in reported:
                continue
            reported.add(a.name)
            origins = ", ".join(sorted({str(x.origin) for x in self.traits.dmeths(t)
                                        if x.name == a.name and not x.abstract}))
            self.err("E-TY-CONFLICT", f"{d.name} must override {a.name.base}: conflicting implementations "
                     f"from {origins}", d.span)

    def check_lit(self, env: TypeEnv, d: TraitDecl, rc=None, self_t: Concrete | None = None) -> None:
        """LIT-OK: composition is sound and every body fits its signature.

        ``self_t`` is the type of the self-name; by default ``D[Xs]``.
        """
        self.check_compose(d)
        self_t = self_t or d.self_type(rc)
        for m in d.methods:
            if m.body is None:
                continue
            menv = self.method_env(env, d, m, self_t)
            self.check(menv, m.body, m.sig.ret, BODY)

    def method_env(self, env: TypeEnv, d: TraitDecl, m: Method, self_t: Concrete) -> TypeEnv:
        base = env.extend({d.self_name: self_t})
        return TypeEnv(dict(base.vars, **dict(m.sig.params)), d.type_params + m.sig.type_params, base.hidden)

    # ------------------------------------------------------------ expressions

    def check(self, env: TypeEnv, e, expected: TypeRef | None, ctx: str) -> TypeRef | None:
        """Synthesise the type of ``e``; when ``expected`` is given, require a subtype of it."""
        t = self.synth(env, e, expected, ctx)
        if t is None or expected is None:
            return t
        if not self.traits.is_subtype(t, expected, self.mode):
            code = "E-TY-SUBSUME" if isinstance(e, Call) else ctx
            self.err(code, f"{self.describe(e)} has type {t}, which is not a subtype of {expected}", e.span)
            return None
        return t

    def describe(self, e) -> str:
        if isinstance(e, Var):
            return f"variable {e.name}"
        if isinstance(e, Call):
            return f"call to {e.meth.base}"
        return f"literal {e.decl.name}"

    def synth(self, env: TypeEnv, e, expected, ctx) -> TypeRef | None:
        if isinstance(e, Var):
            return self.var(env, e)
        if isinstance(e, Lit):
            return self.lit(env, e)
        if isinstance(e, Call):
            return self.call(env, e, expected, ctx)
        raise TypeError(type(e).__name__)

    def var(self, env: TypeEnv, e: Var) -> TypeRef | None:
        t = env.vars.get(e.name)
        if t is None:
            why = env.hidden.get(e.name)
            msg = f"variable {e.name} is not in scope" if why is None else f"variable {e.name} is not visible here: {why}"
            self.err("E-TY-UNBOUND-VAR", msg, e.span)
        return t

    def lit(self, env: TypeEnv, e: Lit) -> TypeRef:
        d = e.decl
        t = e.type()
        # reserved (runtime-native) literals implement their abstract methods natively
        missing = [] if d.name.is_reserved else [dm for dm in self.traits.meths(t) if dm.abstract]
        if missing:
            names = ", ".join(dict.fromkeys(dm.name.base for dm in missing))
            self.err("E-TY-ABSTRACT", f"literal {d.name} does not implement {names}", e.span)
        self.check_lit(env, d, None, t)
        return t

    def select(self, env: TypeEnv, e: Call) -> tuple[Concrete, DM] | None:
        rt = self.check(env, e.recv, None, ARG)
        if rt is None:
            self.args_unchecked(env, e)
            return None
        if not isinstance(rt, Concrete):
            self.err("E-TY-NO-METHOD", f"cannot call {e.meth.base} on a value of type variable type {rt}", e.span)
            self.args_unchecked(env, e)
            return None
        dm = self.traits.lookup(rt, e.meth)
        if dm is None:
            self.err("E-TY-NO-METHOD", f"{rt} has no method {e.meth.base} taking {e.meth.arity} argument(s)", e.span)
            self.args_unchecked(env, e)
            return None
        if len(e.targs) != len(dm.method.sig.type_params):
            self.err("E-TY-TARGS", f"{e.meth.base} expects {len(dm.method.sig.type_params)} type argument(s), "
                     f"got {len(e.targs)}", e.span)
            self.args_unchecked(env, e)
            return None
        return rt, dm

    def args_unchecked(self, env: TypeEnv, e: Call) -> None:
        for a in e.args:
            self.check(env, a, None, ARG)

    @staticmethod
    def instantiate(dm: DM, targs) -> tuple[list[TypeRef], TypeRef]:
        sig = dm.method.sig
        mapping = dict(zip(sig.type_params, targs))
        return [subst_type_vars(t, mapping) for t in sig.param_types], subst_type_vars(sig.ret, mapping)

    def call(self, env: TypeEnv, e: Call, expected, ctx) -> TypeRef | None:
        sel = self.select(env, e)
        if sel is None:
            return None
        _, dm = sel
        params, ret = self.instantiate(dm, e.targs)
        for a, p in zip(e.args, params):
            self.check(env, a, p, ARG)
        return ret


def check_program(p: Program) -> list[Diagnostic]:
    return HeartChecker(p).check_program()


def type_of(p: Program, e, env: dict | None = None, expected: TypeRef | None = None,
            table: dict | None = None) -> tuple[TypeRef | None, list]:
    """Type a closed (or ``env``-typed) expression against the table of ``p``, or ``table`` if given."""
    c = HeartChecker(p)
    if table is not None:
        c.traits = Traits(table)
    t = c.check(TypeEnv(dict(env or {})), e, expected, BODY)
    return t, c.diags
