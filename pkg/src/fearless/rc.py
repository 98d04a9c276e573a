"""Type checking with reference capabilities.

Extends the capability-free checker with literal capabilities, environment
adaptation for captured variables, the callable filter on methods, and
promotion: a call through an ``imm`` or ``iso`` receiver may be typed as if
``mut`` were ``iso`` and ``read`` were ``imm``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .adapt import DROPPED, AdaptedEnv, adapt_env
from .ast import (IMM, ISO, MUT, READ, RC, Call, CapVar, Capability, Concrete, Method, Program, TraitDecl, TVar,
                  TypeRef)
from .diagnostics import Diagnostic, sort_diagnostics
from .heart import ARG, HeartChecker, TypeEnv
from .traits import callable_at, cap_sub


def prom(r: Capability | None) -> Capability | None:
    return {MUT: ISO, READ: IMM}.get(r, r)


def _prom_type(t: TypeRef, bare: Capability) -> TypeRef:
    if isinstance(t, Concrete):
        return Concrete(prom(t.rc), t.name, t.args)
    if isinstance(t, CapVar):
        return CapVar(prom(t.rc), t.x)
    if isinstance(t, TVar):
        return CapVar(bare, t.x)
    return t


def prom_p(t: TypeRef) -> TypeRef:
    """Promotion for parameter positions: a bare type variable must be iso."""
    return _prom_type(t, ISO)


def prom_r(t: TypeRef) -> TypeRef:
    """Promotion for the return position: a bare type variable becomes imm."""
    return _prom_type(t, IMM)


@dataclass(frozen=True)
class Adaptation:
    """One adapted method environment, kept for inspection by tests and tools."""

    decl: TraitDecl
    lit_rc: Capability
    method: Method
    meth_rc: Capability
    env: dict
    adapted: AdaptedEnv


class RcChecker(HeartChecker):
    mode = RC

    def __init__(self, p: Program):
        super().__init__(p)
        self.adaptations: list[Adaptation] = []
        self._memo: dict = {}

    def check_program(self) -> list[Diagnostic]:
        for d in self.p.top_level:
            self.check_lit(TypeEnv(), d, MUT)
        return sort_diagnostics(self.diags)

    # ------------------------------------------------------------ literals

    def method_env(self, env: TypeEnv, d: TraitDecl, m: Method, self_t: Concrete) -> TypeEnv:
        rc = self_t.rc or IMM
        meth_rc = m.sig.rc or IMM
        captured = dict(env.vars)
        captured[d.self_name] = self_t
        adapted = adapt_env(captured, rc, meth_rc)
        self.adaptations.append(Adaptation(d, rc, m, meth_rc, captured, adapted))
        hidden = {x: why for x, why in env.hidden.items() if x not in captured}
        for x, how in adapted.provenance.items():
            if how == DROPPED:
                hidden[x] = (f"{x}: {captured[x]} cannot be captured by a {meth_rc} method "
                             f"of a {rc} literal")
        vs = dict(adapted.vars)
        vs.update(m.sig.params)
        for x in m.sig.param_names:
            hidden.pop(x, None)
        return TypeEnv(vs, d.type_params + m.sig.type_params, hidden)

    def lit(self, env: TypeEnv, e) -> TypeRef:
        d = e.decl
        rc = e.rc or IMM
        t = Concrete(rc, d.name, e.type().args)
        missing = [] if d.name.is_reserved else [
            dm for dm in self.traits.meths(t) if dm.abstract and callable_at(rc, dm.method)]
        if missing:
            names = ", ".join(dict.fromkeys(dm.name.base for dm in missing))
            self.err("E-TY-ABSTRACT", f"{rc} literal {d.name} does not implement {names}", e.span)
        for m in d.methods:
            if not callable_at(rc, m):
                self.err("E-TY-DEAD-METHOD", f"{rc} literal {d.name} defines {m.sig.rc} method "
                         f"{m.name.base}, which can never be called on it", m.span if m.span.line else e.span)
        self.check_lit(env, d, rc, t)
        return t

    # ------------------------------------------------------------ calls

    def _trial(self, fn):
        saved = self.diags
        self.diags = []
        try:
            t = fn()
            return t, self.diags
        finally:
            self.diags = saved

    def call(self, env: TypeEnv, e: Call, expected, ctx) -> TypeRef | None:
        key = (id(e), expected, ctx, id(env))
        hit = self._memo.get(key)
        if hit is None:
            hit = (self._call(env, e, expected, ctx), env)
            self._memo[key] = hit
        (t, diags), _ = hit
        self.diags.extend(diags)
        return t

    def _call(self, env: TypeEnv, e: Call, expected, ctx) -> tuple[TypeRef | None, list[Diagnostic]]:
        sel_t, sel_diags = self._trial(lambda: self.select(env, e))
        if sel_t is None:
            return None, sel_diags
        rt, dm = sel_t
        r0, r = rt.rc or IMM, dm.method.sig.rc or IMM
        params, ret = self.instantiate(dm, e.targs)

        def attempt(promoted: bool):
            if not cap_sub(r0, r):
                self.err("E-TY-CALLABLE", f"{dm.name.base} needs a {r} receiver but is called on {rt}", e.span)
                return None
            ps = [prom_p(p) for p in params] if promoted else params
            res = prom_r(ret) if promoted else ret
            ok = True
            for a, p in zip(e.args, ps):
                ok = self.check(env, a, p, ARG) is not None and ok
            if not ok:
                return None
            if expected is not None and not self.traits.is_subtype(res, expected, self.mode):
                self.err("E-TY-SUBSUME", f"call to {e.meth.base} has type {res}, which is not a subtype "
                         f"of {expected}", e.span)
                return None
            return res

        t, diags = self._trial(lambda: attempt(False))
        if t is not None and not diags:
            return t, sel_diags
        if r0 in (IMM, ISO) and cap_sub(r0, r):
            t2, diags2 = self._trial(lambda: attempt(True))
            if t2 is not None and not diags2:
                return t2, sel_diags
        return None, sel_diags + diags


def check_program(p: Program) -> list[Diagnostic]:
    return RcChecker(p).check_program()


def checker_for(p: Program) -> RcChecker:
    """Run the checker and return it, with its adaptation log."""
    c = RcChecker(p)
    c.diags = c.check_program()
    return c
