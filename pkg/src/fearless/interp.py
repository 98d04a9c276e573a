"""Small-step, call-by-value evaluation by substitution.

Values are object literals.  Four rules drive evaluation: ``CTX-RECV`` and
``CTX-ARG`` pick the leftmost-innermost redex; ``CALL-LIT`` runs a method
defined by the receiver literal itself; ``CALL-TOP`` runs one it inherits.
A fifth, ``MAGIC``, covers the native behaviour of numerals, strings,
reference cells, isolated pods and the system object.  Capabilities play no
part at runtime.

Native values are literals of reserved declarations: ``#num:6``, ``#str:hi``,
``#ref:0``, ``#isopod:1`` and ``#sys``.  Cells live in the store of the
:class:`Machine` that created them.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping

from .ast import (NUM_PREFIX, STR_PREFIX, Call, Concrete, DeclName, Expr, Lit, Method, MethName, Program,
                  TraitDecl, TVar, TypeRef, Var, is_value, subst_type_vars, subst_vars)
from .diagnostics import Diagnostic, FearlessError
from .traits import DM, Traits

DEFAULT_FUEL = 1_000_000

CTX_RECV, CTX_ARG, CALL_LIT, CALL_TOP, MAGIC = "CTX-RECV", "CTX-ARG", "CALL-LIT", "CALL-TOP", "MAGIC"

NUM, STR, REF, ISOPOD, SYSTEM = (DeclName(n, a) for n, a in
                                 (("Num", 0), ("Str", 0), ("Ref", 1), ("IsoPod", 1), ("System", 0)))
REF_FACTORY, ISOPOD_FACTORY = DeclName("Ref", 0), DeclName("IsoPod", 0)
SHARP1 = MethName("#", 1)

_NUM_OPS = {"+", "-", "*", "<", "==", ".str"}
_STR_OPS = {"+", ".upperCase", "=="}
_REF_OPS = {".get", ".rget", ".swap"}
_POD_OPS = {".look", ".mutate"}
_SYS_OPS = {".println"}


class RuntimeFailure(FearlessError):
    """Evaluation stopped: budget exhausted, no rule applies, or unknown native call."""


def _fail(code: str, msg: str) -> RuntimeFailure:
    return RuntimeFailure(Diagnostic(code, msg))


# ---------------------------------------------------------------- instantiation


def instantiate(e: Expr, mapping: Mapping[str, TypeRef]) -> Expr:
    """Substitute type variables everywhere, including inside funnelling literals.

    A literal ``D[Xs]`` whose variables are substituted becomes the runtime
    instance ``D[Ts]``: its body is specialised and ``targs`` records ``Ts``.
    """
    if not mapping:
        return e
    if isinstance(e, Var):
        return e
    if isinstance(e, Call):
        return Call(instantiate(e.recv, mapping), e.meth, tuple(subst_type_vars(t, mapping) for t in e.targs),
                    tuple(instantiate(a, mapping) for a in e.args), e.span)
    if isinstance(e, Lit):
        d = e.decl
        targs = e.targs
        if d.type_params:
            current = targs if targs is not None else tuple(TVar(x) for x in d.type_params)
            targs = tuple(subst_type_vars(t, mapping) for t in current)
        decl = replace(d, supers=tuple(subst_type_vars(s, mapping) for s in d.supers),
                       methods=tuple(_instantiate_method(m, mapping) for m in d.methods))
        return replace(e, decl=decl, targs=targs)
    raise TypeError(type(e).__name__)


def _instantiate_method(m: Method, mapping: Mapping[str, TypeRef]) -> Method:
    inner = {k: v for k, v in mapping.items() if k not in m.sig.type_params}
    sig = subst_type_vars(m.sig, mapping)
    body = instantiate(m.body, inner) if m.body is not None else None
    return Method(sig, body, m.span)


# ---------------------------------------------------------------- machine


@dataclass
class Result:
    value: Lit
    output: str
    steps: int
    store: dict = field(default_factory=dict)


class Machine:
    """Evaluation state: the declaration table, the store and the output buffer."""

    def __init__(self, p: Program):
        self.p = p
        self.table: dict[DeclName, TraitDecl] = dict(p.table)
        self.traits = Traits(self.table)
        self.store: dict[int, Lit] = {}
        self.output: list[str] = []
        self.steps = 0

    # -- native values

    def _native(self, base: str, supers: tuple[Concrete, ...]) -> Lit:
        name = DeclName(base, 0)
        d = self.table.get(name)
        if d is None:
            d = TraitDecl(name, (), supers, "self", (), True)
            self.table[name] = d
        return Lit(None, d)

    def num(self, n: int) -> Lit:
        return self._native(f"{NUM_PREFIX}{n}", (Concrete(None, NUM),))

    def str_(self, s: str) -> Lit:
        return self._native(f"{STR_PREFIX}{s}", (Concrete(None, STR),))

    def system(self) -> Lit:
        return self._native("#sys", (Concrete(None, SYSTEM),))

    def boolean(self, b: bool) -> Lit:
        name = DeclName("True" if b else "False", 0)
        if name not in self.table:
            raise _fail("E-RT-MAGIC-UNKNOWN", f"comparison needs {name.base}, which is not declared")
        return Lit(None, self.table[name])

    def void(self) -> Lit:
        name = DeclName("Void", 0)
        if name not in self.table:
            raise _fail("E-RT-MAGIC-UNKNOWN", "println needs Void, which is not declared")
        return Lit(None, self.table[name])

    def _alloc(self, kind: str, head: DeclName, targs, v: Lit) -> Lit:
        cell = len(self.store)
        self.store[cell] = v
        arg = targs[0] if targs else Concrete(None, DeclName("Void", 0))
        return self._native(f"#{kind}:{cell}", (Concrete(None, head, (arg,)),))

    # -- rule selection

    def type_of_value(self, v: Lit) -> Concrete:
        return Concrete(None, v.decl.name, v.type().args)

    def resolve(self, v: Lit, meth: MethName) -> DM | None:
        for dm in self.traits.meths(self.type_of_value(v)):
            if dm.name == meth:
                return dm
        return None

    def _magic_kind(self, v: Lit) -> str | None:
        base = v.decl.name.base
        if base.startswith(NUM_PREFIX):
            return "num"
        if base.startswith(STR_PREFIX):
            return "str"
        for kind in ("ref", "isopod"):
            if base.startswith(f"#{kind}:"):
                return kind
        if base == "#sys":
            return "sys"
        return None

    def is_magic(self, e: Call) -> bool:
        v = e.recv
        kind = self._magic_kind(v)
        ops = {"num": _NUM_OPS, "str": _STR_OPS, "ref": _REF_OPS, "isopod": _POD_OPS, "sys": _SYS_OPS}
        if kind is not None:
            own = v.decl.method(e.meth)
            if own is not None and own.body is not None:
                return False
            if e.meth.base in ops[kind]:
                return True
            dm = self.resolve(v, e.meth)
            return dm is None or dm.abstract
        if v.decl.method(e.meth) is not None:
            return False
        dm = self.resolve(v, e.meth)
        return dm is not None and dm.name == SHARP1 and dm.origin.name in (REF_FACTORY, ISOPOD_FACTORY)

    def rules(self, e: Expr) -> list[str]:
        """Every rule whose premises hold for ``e`` at the root; at most one for a sound machine."""
        if not isinstance(e, Call):
            return []
        out = []
        if not is_value(e.recv):
            out.append(CTX_RECV)
        if is_value(e.recv) and not all(is_value(a) for a in e.args):
            out.append(CTX_ARG)
        if is_value(e.recv) and all(is_value(a) for a in e.args):
            magic = self.is_magic(e)
            own = e.recv.decl.method(e.meth)
            if magic:
                out.append(MAGIC)
            if not magic and own is not None and own.body is not None:
                out.append(CALL_LIT)
            if not magic and own is None:
                dm = self.resolve(e.recv, e.meth)
                if dm is not None and not dm.abstract:
                    out.append(CALL_TOP)
        return out

    # -- stepping

    def step(self, e: Expr) -> Expr:
        """One reduction step of a closed non-value expression."""
        path: list[tuple[Call, int]] = []
        cur = e
        while True:
            if not isinstance(cur, Call):
                raise _fail("E-RT-STUCK", f"no rule applies to {_describe(cur)}")
            if not is_value(cur.recv):
                path.append((cur, -1))
                cur = cur.recv
                continue
            i = next((i for i, a in enumerate(cur.args) if not is_value(a)), None)
            if i is None:
                break
            path.append((cur, i))
            cur = cur.args[i]
        new = self.contract(cur)
        for parent, i in reversed(path):
            if i == -1:
                new = replace(parent, recv=new)
            else:
                new = replace(parent, args=parent.args[:i] + (new,) + parent.args[i + 1:])
        self.steps += 1
        return new

    def contract(self, e: Call) -> Expr:
        rules = self.rules(e)
        if not rules:
            kind = self._magic_kind(e.recv)
            if kind is not None:
                raise _fail("E-RT-MAGIC-UNKNOWN", f"native {kind} value has no method {e.meth}")
            raise _fail("E-RT-STUCK", f"no rule applies to a call of {e.meth} on {_describe(e.recv)}")
        rule = rules[0]
        if rule == MAGIC:
            return self.magic(e)
        v = e.recv
        if rule == CALL_LIT:
            m = v.decl.method(e.meth)
            body = instantiate(m.body, dict(zip(m.sig.type_params, e.targs)))
            return self._bind(body, v.decl.self_name, v, m, e.args)
        dm = self.resolve(v, e.meth)
        origin = self.table[dm.origin.name]
        m = origin.method(e.meth)
        mapping = dict(zip(origin.type_params, dm.origin.args))
        mapping.update(zip(m.sig.type_params, e.targs))
        return self._bind(instantiate(m.body, mapping), origin.self_name, v, m, e.args)

    @staticmethod
    def _bind(body: Expr, self_name: str, v: Lit, m: Method, args) -> Expr:
        mapping = {self_name: v}
        mapping.update(zip(m.sig.param_names, args))
        mapping.pop("_", None)
        return subst_vars(body, mapping)

    # -- native behaviour

    def magic(self, e: Call) -> Expr:
        v, op, args = e.recv, e.meth.base, e.args
        kind = self._magic_kind(v)
        if kind is None:
            cell_kind, head = ("ref", REF) if self.resolve(v, e.meth).origin.name == REF_FACTORY else ("isopod", ISOPOD)
            return self._alloc(cell_kind, head, e.targs, args[0])
        payload = v.decl.name.base.split(":", 1)[1] if kind != "sys" else ""
        if kind == "num":
            return self._num(int(payload), op, args)
        if kind == "str":
            return self._str(payload, op, args)
        if kind == "sys" and op == ".println" and len(args) == 1:
            self.output.append(self._payload(args[0], "str") + "\n")
            return self.void()
        if kind == "ref":
            cell = int(payload)
            if op in (".get", ".rget") and not args:
                return self.store[cell]
            if op == ".swap" and len(args) == 1:
                old, self.store[cell] = self.store[cell], args[0]
                return old
        if kind == "isopod":
            cell = int(payload)
            if op == ".look" and len(args) == 1:
                return Call(args[0], SHARP1, (), (self.store[cell],), e.span)
            if op == ".mutate" and len(args) == 1:
                return Call(args[0], SHARP1, (), (self.store[cell],), e.span)
            if op == ".mutate" and len(args) == 2:
                return Call(args[1], MethName("#", 2), (), (self.store[cell], args[0]), e.span)
        raise _fail("E-RT-MAGIC-UNKNOWN", f"native {kind} value has no method {e.meth}")

    def _payload(self, v: Lit, kind: str) -> str:
        if self._magic_kind(v) != kind:
            raise _fail("E-RT-MAGIC-UNKNOWN", f"expected a native {kind} value, got {_describe(v)}")
        return v.decl.name.base.split(":", 1)[1]

    def _num(self, n: int, op: str, args) -> Lit:
        if op == ".str" and not args:
            return self.str_(str(n))
        if len(args) != 1:
            raise _fail("E-RT-MAGIC-UNKNOWN", f"numeral has no method {op}/{len(args)}")
        m = int(self._payload(args[0], "num"))
        if op == "+":
            return self.num(n + m)
        if op == "-":
            return self.num(n - m)
        if op == "*":
            return self.num(n * m)
        if op == "<":
            return self.boolean(n < m)
        if op == "==":
            return self.boolean(n == m)
        raise _fail("E-RT-MAGIC-UNKNOWN", f"numeral has no method {op}")

    def _str(self, s: str, op: str, args) -> Lit:
        if op == ".upperCase" and not args:
            return self.str_("".join(c.upper() if "a" <= c <= "z" else c for c in s))
        if len(args) != 1:
            raise _fail("E-RT-MAGIC-UNKNOWN", f"string has no method {op}/{len(args)}")
        other = self._payload(args[0], "str")
        if op == "+":
            return self.str_(s + other)
        if op == "==":
            return self.boolean(s == other)
        raise _fail("E-RT-MAGIC-UNKNOWN", f"string has no method {op}")

    # -- driving

    def run(self, e: Expr, fuel: int = DEFAULT_FUEL) -> Lit:
        while not is_value(e):
            if self.steps >= fuel:
                raise _fail("E-RT-FUEL", f"step budget of {fuel} exhausted")
            e = self.step(e)
        return e

    def trace(self, e: Expr, limit: int) -> list[Expr]:
        """``e`` and up to ``limit`` successors."""
        out = [e]
        while len(out) <= limit and not is_value(out[-1]):
            out.append(self.step(out[-1]))
        return out


def _describe(e) -> str:
    if isinstance(e, Lit):
        return f"literal {show(e)}"
    if isinstance(e, Var):
        return f"free variable {e.name}"
    return f"call of {e.meth}"


def show(v: Lit) -> str:
    """A short rendering of a value: digits for numerals, quoted text for strings."""
    base = v.decl.name.base
    if base.startswith(NUM_PREFIX):
        return base[len(NUM_PREFIX):]
    if base.startswith(STR_PREFIX):
        return '"' + base[len(STR_PREFIX):] + '"'
    return base


def native_value(v: Lit) -> int | str | None:
    """The Python payload of a numeral or string value, else ``None``."""
    base = v.decl.name.base
    if base.startswith(NUM_PREFIX):
        return int(base[len(NUM_PREFIX):])
    if base.startswith(STR_PREFIX):
        return base[len(STR_PREFIX):]
    return None


# ---------------------------------------------------------------- entry points


def find_entry(p: Program, entry: str | None = None) -> TraitDecl:
    """The named declaration, or the first top-level one implementing Main."""
    traits = Traits(p.table)
    main = Concrete(None, DeclName("Main", 0))
    candidates = [d for d in p.top_level if not d.type_params]
    if entry is not None:
        candidates = [d for d in p.top_level if d.name.base == entry or str(d.name) == entry]
        if not candidates:
            raise _fail("E-RT-NO-ENTRY", f"no declaration named {entry}")
    for d in candidates:
        t = d.self_type()
        if d.name != main.name and traits.decl_sub(t, main):
            if any(dm.abstract for dm in traits.meths(t)):
                raise _fail("E-RT-NO-ENTRY", f"{d.name.base} leaves methods abstract and cannot run")
            return d
    what = entry if entry is not None else "any declaration"
    raise _fail("E-RT-NO-ENTRY", f"{what} does not implement Main")


def evaluate(p: Program, entry: str | None = None, fuel: int = DEFAULT_FUEL) -> Result:
    """Run ``entry.main(sys)`` and return the final value with the printed output."""
    d = find_entry(p, entry)
    m = Machine(p)
    start = Call(Lit(None, d), MethName(".main", 1), (), (m.system(),))
    try:
        v = m.run(start, fuel)
    except RuntimeFailure as e:
        e.output = "".join(m.output)
        raise
    return Result(v, "".join(m.output), m.steps, m.store)


def evaluate_method(p: Program, decl: str, meth: str = "#", fuel: int = DEFAULT_FUEL) -> Result:
    """Call a zero-argument method of a top-level declaration and run it to a value."""
    d = next((d for d in p.top_level if d.name.base == decl and not d.type_params), None)
    if d is None:
        raise _fail("E-RT-NO-ENTRY", f"no declaration named {decl}")
    m = Machine(p)
    v = m.run(Call(Lit(None, d), MethName(meth, 0), (), ()), fuel)
    return Result(v, "".join(m.output), m.steps, m.store)
