"""Desugaring on the surface tree.

The rewrites, applied in one structural pass:

* top-level self-names default to ``this``; other literals get a fresh one;
* ``_`` parameters get fresh names;
* a bare trait reference ``D[Ts]`` becomes a fresh literal ``FreshN:D[Ts]{}``;
* ``e.m x = e1 rest`` becomes ``e.m(e1, {x, s -> s rest})``;
* numerals and strings become references to reserved declarations
  ``#num:<digits>`` and ``#str:<text>``.
"""

from __future__ import annotations

from dataclasses import replace

from .ast import NUM_PREFIX, STR_PREFIX, fresh_name
from .surface import (SCall, SDeclRef, SEq, SExpr, SHole, SLit, SMethod, SNum, SParam,
                      SStr, SType, SurfaceProgram, SVar)


def identifiers(p: SurfaceProgram) -> set[str]:
    """Every identifier that occurs anywhere in ``p`` (fresh names avoid these)."""
    out: set[str] = set()

    def ty(t: SType | None) -> None:
        if t is None:
            return
        out.add(t.name)
        for a in t.args:
            ty(a)

    def expr(e) -> None:
        if isinstance(e, SVar):
            out.add(e.name)
        elif isinstance(e, SCall):
            expr(e.recv)
            for t in e.targs or ():
                ty(t)
            for a in e.args:
                expr(a)
        elif isinstance(e, SEq):
            expr(e.recv)
            for t in e.targs or ():
                ty(t)
            out.add(e.var)
            expr(e.init)
            expr(e.cont)
        elif isinstance(e, SDeclRef):
            ty(e.type)
        elif isinstance(e, SLit):
            lit(e)

    def lit(l: SLit) -> None:
        if l.name:
            out.add(l.name)
        if l.self_name:
            out.add(l.self_name)
        out.update(l.type_params or ())
        for s in l.supers or ():
            ty(s)
        for m in l.methods:
            out.update(m.type_params or ())
            for prm in m.params:
                out.add(prm.name)
                ty(prm.type)
            ty(m.ret)
            if m.body is not None:
                expr(m.body)

    for d in p.decls:
        lit(d)
    return out


class Desugarer:
    def __init__(self, used: set[str]):
        self.used = set(used)

    def fresh(self, base: str) -> str:
        name = fresh_name(base, self.used)
        self.used.add(name)
        return name

    def program(self, p: SurfaceProgram) -> SurfaceProgram:
        return SurfaceProgram([self.lit(d, top=True) for d in p.decls])

    def lit(self, l: SLit, top: bool = False) -> SLit:
        self_name = l.self_name or ("this" if top else self.fresh("self"))
        return replace(l, self_name=self_name, methods=[self.method(m) for m in l.methods])

    def method(self, m: SMethod) -> SMethod:
        params = [SParam(self.fresh("fresh"), p.type, p.span) if p.name == "_" else p for p in m.params]
        body = self.expr(m.body) if m.body is not None else None
        return replace(m, params=params, body=body)

    def expr(self, e: SExpr) -> SExpr:
        if isinstance(e, (SVar, SHole)):
            return e
        if isinstance(e, SNum):
            return SDeclRef(None, SType(None, NUM_PREFIX + e.text, [], e.span), e.span)
        if isinstance(e, SStr):
            return SDeclRef(None, SType(None, STR_PREFIX + e.value, [], e.span), e.span)
        if isinstance(e, SDeclRef):
            if e.type.name.startswith("#"):
                return e
            return SLit(e.rc, self.fresh("Fresh"), None, [e.type], self.fresh("self"), [], False, e.span)
        if isinstance(e, SLit):
            return self.lit(e)
        if isinstance(e, SCall):
            return SCall(self.expr(e.recv), e.meth, e.targs, [self.expr(a) for a in e.args], e.span)
        if isinstance(e, SEq):
            s = self.fresh("self")
            cont = _plug(e.cont, SVar(s, e.span))
            lam = SMethod(None, None, None, [SParam(e.var, None, e.span), SParam(s, None, e.span)],
                          None, cont, e.span)
            closure = SLit(None, None, None, None, None, [lam], False, e.span)
            return self.expr(SCall(e.recv, e.meth, e.targs, [e.init, closure], e.span))
        raise TypeError(f"unexpected surface node {type(e).__name__}")


def _plug(e: SExpr, v: SExpr) -> SExpr:
    """Replace the hole at the root of a call chain."""
    if isinstance(e, SHole):
        return v
    if isinstance(e, SCall):
        return replace(e, recv=_plug(e.recv, v))
    if isinstance(e, SEq):
        return replace(e, recv=_plug(e.recv, v))
    return e


def apply_sugar(p: SurfaceProgram) -> SurfaceProgram:
    return Desugarer(identifiers(p)).program(p)
