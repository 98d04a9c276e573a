"""Elaboration: from the desugared surface tree to the fully explicit core AST.

Elaboration is bidirectional.  A literal without a declared trait takes the
trait of the type expected at its position; a member without a name or
types copies them from the inherited method it implements; omitted type
arguments are solved by first-order unification against argument types
and then the expected result.  Everything is elaborated with capabilities;
the heart view is obtained by erasing them afterwards.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Iterable

from .adapt import adapt_env
from .ast import (HEART, IMM, MUT, NUM_PREFIX, READ, RC, STR_PREFIX, Call, Capability, CapVar,
                  Concrete, DeclName, Expr, Lit, Meta, Method, MethName, Program, Sig, TraitDecl,
                  TVar, TypeRef, Var, erase_caps, fresh_name, subst_type_vars, type_vars_of,
                  with_rc)
from .diagnostics import Diagnostic, FearlessError, Span, sort_diagnostics
from .sugar import identifiers
from .surface import SCall, SDeclRef, SLit, SMethod, SType, SurfaceProgram, SVar
from .traits import DM, Traits, callable_at

PLACEHOLDER = Var("#body")


class _Abort(Exception):
    def __init__(self, diag: Diagnostic):
        self.diag = diag


def _fail(code: str, message: str, span: Span):
    raise _Abort(Diagnostic(code, message, span))


class Elaborator:
    def __init__(self, sp: SurfaceProgram):
        self.sp = sp
        self.used: set[str] = identifiers(sp)
        self.known: dict[str, set[int]] = {}
        self.sig_table: dict[DeclName, TraitDecl] = {}
        self.traits = Traits(self.sig_table)
        self.synthetic: set[DeclName] = set()
        self.sig_decls: dict[int, TraitDecl] = {}
        self.metas: dict[int, TypeRef] = {}
        self.meta_where: dict[int, tuple[Span, str]] = {}
        self.diags: list[Diagnostic] = []
        self.enclosing: dict[int, tuple[str, ...]] = {}
        self.leak: tuple[str, ...] = ()  # enclosing type variables, reported later as unfunnelled

    # ------------------------------------------------------------ driver

    def run(self, mode: str = RC) -> Program:
        declared = self._collect()
        for sl in self._order(declared):
            try:
                self._declare(sl)
            except _Abort as a:
                self.diags.append(a.diag)
        if self.diags:
            raise FearlessError(sort_diagnostics(self.diags))
        top: list[TraitDecl] = []
        for sl in self.sp.decls:
            try:
                decl = self._finish(sl, self.sig_decls[id(sl)], MUT, {})
                top.append(self._zonk_node(decl))
            except _Abort as a:
                self.diags.append(a.diag)
        for t in top:
            self._unsolved(t)
        if self.diags:
            raise FearlessError(sort_diagnostics(self.diags))
        prog = Program.build(top, RC)
        return erase_caps(prog) if mode == HEART else prog

    def fresh(self, base: str) -> str:
        name = fresh_name(base, self.used)
        self.used.add(name)
        return name

    # ------------------------------------------------------------ phase 1

    def _collect(self) -> list[SLit]:
        """Every literal that declares its own name and type parameters."""
        out: list[SLit] = []

        def expr(e, scope: tuple[str, ...]) -> None:
            if isinstance(e, SCall):
                expr(e.recv, scope)
                for a in e.args:
                    expr(a, scope)
            elif isinstance(e, SLit):
                lit(e, scope)

        def lit(l: SLit, outer: tuple[str, ...]) -> None:
            if l.name is not None:
                self.known.setdefault(l.name, set()).add(len(l.type_params or ()))
            if l.type_params is not None:
                out.append(l)
                self.enclosing[id(l)] = outer
                xs = tuple(l.type_params)
            else:
                xs = outer
            for m in l.methods:
                if m.body is not None:
                    expr(m.body, xs + tuple(m.type_params or ()))

        for d in self.sp.decls:
            lit(d, ())
        return out

    def _order(self, lits: list[SLit]) -> list[SLit]:
        """Supers before subtypes, otherwise source order."""
        by_name: dict[tuple[str, int], SLit] = {}
        for l in lits:
            by_name.setdefault((l.name, len(l.type_params)), l)
        out: list[SLit] = []
        seen: set[int] = set()

        def visit(l: SLit) -> None:
            if id(l) in seen:
                return
            seen.add(id(l))
            for s in l.supers or ():
                dep = by_name.get((s.name, s.arity))
                if dep is not None and s.name not in l.type_params:
                    visit(dep)
            out.append(l)

        for l in lits:
            visit(l)
        return out

    def _declare(self, sl: SLit) -> None:
        xs = tuple(sl.type_params)
        self.leak = self.enclosing.get(id(sl), ())
        try:
            supers = tuple(self.resolve(s, xs, as_super=True) for s in sl.supers)
            methods = self._sigs(sl, supers, xs)
        finally:
            self.leak = ()
        name = DeclName(sl.name, len(xs))
        decl = TraitDecl(name, xs, supers, sl.self_name, methods, not sl.top, sl.span)
        self.sig_decls[id(sl)] = decl
        self.sig_table.setdefault(name, decl)

    # ------------------------------------------------------------ types

    def resolve(self, st: SType, scope: Iterable[str], as_super: bool = False) -> TypeRef:
        if st.name in scope and not st.args:
            if as_super:
                _fail("E-EL-UNKNOWN-TYPE", f"type variable {st.name} cannot be implemented", st.span)
            return CapVar(Capability(st.rc), st.name) if st.rc else TVar(st.name)
        arities = self.known.get(st.name)
        if arities is None and st.name in self.leak and not st.args and not as_super:
            return CapVar(Capability(st.rc), st.name) if st.rc else TVar(st.name)
        if arities is None:
            _fail("E-EL-UNKNOWN-TYPE", f"unknown trait {st.name}", st.span)
        if st.arity not in arities:
            want = ", ".join(str(a) for a in sorted(arities))
            _fail("E-EL-ARITY", f"{st.name} takes {want} type argument(s), not {st.arity}", st.span)
        args = tuple(self.resolve(a, scope) for a in st.args)
        rc = None if as_super else (Capability(st.rc) if st.rc else IMM)
        return Concrete(rc, DeclName(st.name, st.arity), args)

    def new_meta(self, span: Span, what: str) -> Meta:
        m = Meta(len(self.meta_where))
        self.meta_where[m.id] = (span, what)
        return m

    def walk(self, t: TypeRef | None) -> TypeRef | None:
        while isinstance(t, Meta) and t.id in self.metas:
            sol = self.metas[t.id]
            t = with_rc(sol, t.rc) if t.rc else sol
        return t

    def zonk(self, t):
        t = self.walk(t)
        if isinstance(t, Concrete) and t.args:
            return Concrete(t.rc, t.name, tuple(self.zonk(a) for a in t.args))
        return t

    def widen(self, t: TypeRef) -> TypeRef:
        """Literal types are replaced by the trait they implement when solving."""
        seen = 0
        while isinstance(t, Concrete) and t.name in self.synthetic and seen < 16:
            supers = self.traits.supers_of(t)
            if len(supers) != 1:
                break
            t = supers[0]
            seen += 1
        return t

    def unify(self, sup: TypeRef | None, sub: TypeRef | None) -> bool:
        snapshot = dict(self.metas)
        ok = self._unify(sup, sub, widen=True)
        if not ok:
            self.metas = snapshot
        return ok

    def _unify(self, sup, sub, widen: bool) -> bool:
        if sup is None or sub is None:
            return False
        sup, sub = self.walk(sup), self.walk(sub)
        if isinstance(sup, Meta):
            if isinstance(sub, Meta) and sub.id == sup.id:
                return True
            sol = self.widen(sub) if widen else sub
            self.metas[sup.id] = self.zonk(_loosen(sol) if sup.rc else sol)
            return True
        if isinstance(sub, Meta):
            self.metas[sub.id] = self.zonk(_loosen(sup) if sub.rc else sup)
            return True
        if isinstance(sup, Concrete) and isinstance(sub, Concrete):
            if sup.name != sub.name:
                if not widen:
                    return False
                match = next((a for a in self.traits.ancestors(self.zonk(sub)) if a.name == sup.name), None)
                if match is None:
                    return False
                sub = match
            return all(self._unify(a, b, widen=False) for a, b in zip(sup.args, sub.args))
        if isinstance(sup, (TVar, CapVar)) and isinstance(sub, (TVar, CapVar)):
            return sup.x == sub.x
        return False

    # ------------------------------------------------------------ signatures

    def _inherited(self, supers: tuple[Concrete, ...]) -> list[DM]:
        out: list[DM] = []
        for s in supers:
            for dm in self.traits.dmeths(self.zonk(s)):
                if dm not in out:
                    out.append(dm)
        return out

    def _target(self, sm: SMethod, dms: list[DM]) -> DM | None:
        if sm.name is not None:
            want = MethName(sm.name, sm.arity)
            return next((dm for dm in dms if dm.name == want), None)
        candidates = [dm for dm in dms if dm.name.arity == sm.arity]
        concrete = {dm.name for dm in dms if not dm.abstract}
        abstract_names: list[MethName] = []
        for dm in candidates:
            if dm.name not in concrete and dm.name not in abstract_names:
                abstract_names.append(dm.name)
        if len(abstract_names) > 1:
            names = ", ".join(n.base for n in abstract_names)
            _fail("E-EL-INFER", f"ambiguous member: could implement any of {names}; name the method", sm.span)
        if abstract_names:
            return next(dm for dm in candidates if dm.name == abstract_names[0])
        if candidates:
            return candidates[0]
        _fail("E-EL-INFER", f"no inherited method with {sm.arity} parameter(s) for this member to implement",
              sm.span)

    def _sigs(self, sl: SLit, supers: tuple[Concrete, ...], xs: tuple[str, ...]) -> tuple[Method, ...]:
        dms = self._inherited(supers)
        out = []
        for sm in sl.methods:
            sig = self._sig(sm, self._target(sm, dms), xs)
            out.append(Method(sig, PLACEHOLDER if sm.body is not None else None, sm.span))
        return tuple(out)

    def _sig(self, sm: SMethod, dm: DM | None, xs: tuple[str, ...]) -> Sig:
        if dm is None:
            mxs = tuple(sm.type_params or ())
            scope = xs + mxs
            params = []
            for p in sm.params:
                if p.type is None:
                    _fail("E-EL-INFER", f"cannot infer the type of parameter {p.name}; annotate it", p.span)
                params.append((p.name, self.resolve(p.type, scope)))
            if sm.ret is None:
                _fail("E-EL-INFER", f"cannot infer the return type of {sm.name}; annotate it", sm.span)
            rc = Capability(sm.rc) if sm.rc else IMM
            return Sig(rc, MethName(sm.name, sm.arity), mxs, tuple(params), self.resolve(sm.ret, scope))
        isig = self._zonk_node(dm.method.sig)
        if sm.type_params is not None:
            if len(sm.type_params) != len(isig.type_params):
                _fail("E-EL-ARITY", f"{isig.name.base} declares {len(isig.type_params)} type parameter(s), "
                      f"not {len(sm.type_params)}", sm.span)
            mxs = tuple(sm.type_params)
        else:
            mxs = []
            free = set()
            for t in (*isig.param_types, isig.ret):
                free.update(type_vars_of(t))
            for x in isig.type_params:
                base = x.split("$")[0]
                if base in xs or base in mxs or (base != x and base in free):
                    base = self.fresh(base)
                mxs.append(base)
            mxs = tuple(mxs)
        renaming = {a: TVar(b) for a, b in zip(isig.type_params, mxs) if a != b}
        isig = Sig(isig.rc, isig.name, mxs,
                   tuple((x, subst_type_vars(t, renaming)) for x, t in isig.params),
                   subst_type_vars(isig.ret, renaming))
        scope = xs + mxs
        params = tuple((p.name, self.resolve(p.type, scope) if p.type is not None else t)
                       for p, (_, t) in zip(sm.params, isig.params))
        ret = self.resolve(sm.ret, scope) if sm.ret is not None else isig.ret
        rc = Capability(sm.rc) if sm.rc else isig.rc
        return Sig(rc, isig.name, mxs, params, ret)

    # ------------------------------------------------------------ literals

    def _finish(self, sl: SLit, decl: TraitDecl, rc: Capability, env: dict) -> TraitDecl:
        self_t = decl.self_type(rc)
        methods = []
        for sm, m in zip(sl.methods, decl.methods):
            if sm.body is None:
                methods.append(m)
                continue
            outer = dict(env)
            outer[decl.self_name] = self_t
            adapted = adapt_env({x: self.zonk(t) for x, t in outer.items()}, rc, m.sig.rc)
            menv = {x: adapted.vars.get(x, t) for x, t in outer.items()}
            for x, t in m.sig.params:
                menv[x] = t
            scope = decl.type_params + m.sig.type_params
            body, bt = self.expr(sm.body, m.sig.ret, menv, scope)
            self.unify(m.sig.ret, bt)
            methods.append(Method(m.sig, body, sm.span))
        return replace(decl, methods=tuple(methods))

    def _lit_rc(self, sl: SLit, expected: TypeRef | None, decl: TraitDecl) -> Capability:
        if sl.rc:
            return Capability(sl.rc)
        exp = self.walk(expected)
        r = None if exp is None or isinstance(exp, TVar) else exp.rc
        if r is None:
            return IMM
        if r is READ and any(not m.abstract and not callable_at(READ, m) for m in decl.methods):
            # a read view of a literal that mutates itself: the literal must be mut
            return MUT
        return r

    def lit(self, sl: SLit, expected, env, scope) -> tuple[Lit, TypeRef]:
        if sl.type_params is not None:
            decl = self.sig_decls.get(id(sl))
            if decl is None:
                _fail("E-EL-INFER", f"cannot elaborate literal {sl.name}", sl.span)
        else:
            if sl.supers is not None:
                supers = tuple(self.resolve(s, scope, as_super=True) for s in sl.supers)
            else:
                exp = self.zonk(expected)
                if not isinstance(exp, Concrete):
                    _fail("E-EL-INFER", "cannot infer the trait this literal implements; "
                          "write it explicitly as D{...}", sl.span)
                supers = (Concrete(None, exp.name, exp.args),)
            xs = tuple(scope)
            name = DeclName(sl.name or self.fresh("Fresh"), len(xs))
            decl = TraitDecl(name, xs, supers, sl.self_name, self._sigs(sl, supers, xs), True, sl.span)
            self.sig_table.setdefault(name, decl)
            self.synthetic.add(name)
        rc = self._lit_rc(sl, expected, decl)
        done = self._finish(sl, decl, rc, env)
        return Lit(rc, done, sl.span), decl.self_type(rc)

    def reserved(self, ref: SDeclRef) -> tuple[Lit, TypeRef]:
        base = ref.type.name
        prelude = "Num" if base.startswith(NUM_PREFIX) else "Str"
        if base.startswith(NUM_PREFIX) or base.startswith(STR_PREFIX):
            if prelude not in self.known:
                _fail("E-EL-UNKNOWN-TYPE", f"literal needs trait {prelude}, which is not declared", ref.span)
        name = DeclName(base, 0)
        decl = TraitDecl(name, (), (Concrete(None, DeclName(prelude, 0)),), "self", (), True, ref.span)
        self.sig_table.setdefault(name, decl)
        self.synthetic.add(name)
        rc = Capability(ref.rc) if ref.rc else IMM
        return Lit(rc, decl, ref.span), Concrete(rc, name)

    # ------------------------------------------------------------ expressions

    def expr(self, se, expected, env: dict, scope: tuple[str, ...]) -> tuple[Expr, TypeRef | None]:
        if isinstance(se, SVar):
            return Var(se.name, se.span), env.get(se.name)
        if isinstance(se, SDeclRef):
            if se.type.name.startswith("#"):
                return self.reserved(se)
            _fail("E-EL-INFER", f"unexpected trait reference {se.type.name}", se.span)
        if isinstance(se, SLit):
            return self.lit(se, expected, env, scope)
        if isinstance(se, SCall):
            return self.call(se, expected, env, scope)
        raise TypeError(f"unexpected surface node {type(se).__name__}")

    @staticmethod
    def _needs_target(a) -> bool:
        return isinstance(a, SLit) and a.supers is None and a.type_params is None

    def call(self, sc: SCall, expected, env, scope) -> tuple[Call, TypeRef | None]:
        recv, rt = self.expr(sc.recv, None, env, scope)
        rt = self.zonk(rt)
        mname = MethName(sc.meth, len(sc.args))
        explicit = tuple(self.resolve(t, scope) for t in sc.targs) if sc.targs is not None else None
        dm = None
        if isinstance(rt, Concrete):
            dm = next((d for d in self.traits.dmeths(rt) if d.name == mname), None)
        if dm is None or (explicit is not None and len(explicit) != len(dm.method.sig.type_params)):
            if dm is None and any(self._needs_target(a) for a in sc.args):
                what = f"type {rt}" if rt is not None else "an untyped receiver"
                _fail("E-TY-NO-METHOD", f"no method {sc.meth} with {len(sc.args)} argument(s) on {what}", sc.span)
            args = tuple(self.expr(a, None, env, scope)[0] for a in sc.args)
            return Call(recv, mname, explicit or (), args, sc.span), None
        sig = dm.method.sig
        if explicit is not None:
            targs = explicit
        else:
            targs = tuple(self.new_meta(sc.span, f"type argument {x} of {sc.meth}") for x in sig.type_params)
        mapping = dict(zip(sig.type_params, targs))
        ptypes = [subst_type_vars(t, mapping) for t in sig.param_types]
        ret = subst_type_vars(sig.ret, mapping)
        if expected is not None:
            self.unify(expected, ret)
        args: list[Expr | None] = [None] * len(sc.args)
        for i, a in enumerate(sc.args):
            if not self._needs_target(a):
                e, t = self.expr(a, self.zonk(ptypes[i]), env, scope)
                self.unify(ptypes[i], t)
                args[i] = e
        for i, a in enumerate(sc.args):
            if self._needs_target(a):
                e, t = self.expr(a, self.zonk(ptypes[i]), env, scope)
                self.unify(ptypes[i], t)
                args[i] = e
        return Call(recv, mname, targs, tuple(args), sc.span), ret

    # ------------------------------------------------------------ zonking

    def _zonk_node(self, node):
        z = self._zonk_node
        if isinstance(node, (Concrete, TVar, CapVar, Meta)):
            return self.zonk(node)
        if isinstance(node, Sig):
            return Sig(node.rc, node.name, node.type_params, tuple((x, z(t)) for x, t in node.params), z(node.ret))
        if isinstance(node, Method):
            return Method(z(node.sig), z(node.body) if node.body is not None else None, node.span)
        if isinstance(node, TraitDecl):
            return replace(node, supers=tuple(z(s) for s in node.supers), methods=tuple(z(m) for m in node.methods))
        if isinstance(node, Var):
            return node
        if isinstance(node, Call):
            return Call(z(node.recv), node.meth, tuple(z(t) for t in node.targs),
                        tuple(z(a) for a in node.args), node.span)
        if isinstance(node, Lit):
            return Lit(node.rc, z(node.decl), node.span)
        raise TypeError(type(node).__name__)

    def _unsolved(self, node) -> None:
        """Report every type argument left unsolved."""
        found: dict[int, None] = {}

        def ty(t) -> None:
            if isinstance(t, Meta):
                found.setdefault(t.id)
            elif isinstance(t, Concrete):
                for a in t.args:
                    ty(a)

        def go(n) -> None:
            if isinstance(n, TraitDecl):
                for s in n.supers:
                    ty(s)
                for m in n.methods:
                    for _, t in m.sig.params:
                        ty(t)
                    ty(m.sig.ret)
                    if m.body is not None:
                        go(m.body)
            elif isinstance(n, Call):
                go(n.recv)
                for t in n.targs:
                    ty(t)
                for a in n.args:
                    go(a)
            elif isinstance(n, Lit):
                go(n.decl)

        go(node)
        for mid in found:
            span, what = self.meta_where[mid]
            self.diags.append(Diagnostic("E-EL-INFER", f"cannot infer {what}; give explicit type arguments", span))


def _loosen(t: TypeRef) -> TypeRef:
    """The solution for ``X`` when the position reads ``R X``: the capability is
    supplied by the position, so keep only the default one."""
    if isinstance(t, Concrete):
        return Concrete(IMM, t.name, t.args)
    if isinstance(t, CapVar):
        return TVar(t.x)
    return t


def elaborate(sp: SurfaceProgram, mode: str = RC) -> Program:
    """Elaborate a desugared program; raises FearlessError on inference failure."""
    return Elaborator(sp).run(mode)
