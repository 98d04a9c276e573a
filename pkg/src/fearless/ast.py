"""Core abstract syntax shared by every stage.

One AST serves both the capability-free calculus and the reference-capability
extension: capability slots are optional and ``Program.mode`` says which
discipline applies.  All nodes are frozen; spans never take part in equality.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Union

from .diagnostics import NO_SPAN, Span


class Capability(enum.Enum):
    IMM = "imm"
    ISO = "iso"
    READ = "read"
    MUT = "mut"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "Capability":
        return cls(text)


IMM, ISO, READ, MUT = Capability.IMM, Capability.ISO, Capability.READ, Capability.MUT
CAPABILITIES = (IMM, ISO, READ, MUT)

HEART, RC = "heart", "rc"

NUM_PREFIX = "#num:"
STR_PREFIX = "#str:"


@dataclass(frozen=True, order=True)
class DeclName:
    base: str
    arity: int = 0

    def __str__(self) -> str:
        return f"{self.base}/{self.arity}"

    @property
    def is_numeral(self) -> bool:
        return self.base.startswith(NUM_PREFIX)

    @property
    def is_string(self) -> bool:
        return self.base.startswith(STR_PREFIX)

    @property
    def is_reserved(self) -> bool:
        return self.base.startswith("#")


@dataclass(frozen=True, order=True)
class MethName:
    base: str
    arity: int = 0

    def __str__(self) -> str:
        return f"{self.base}/{self.arity}"


# ---------------------------------------------------------------- types


@dataclass(frozen=True)
class Concrete:
    rc: Capability | None
    name: DeclName
    args: tuple["TypeRef", ...] = ()

    def __str__(self) -> str:
        head = display_decl(self.name)
        if self.args:
            head += "[" + ", ".join(str(a) for a in self.args) + "]"
        return f"{self.rc} {head}" if self.rc else head


@dataclass(frozen=True)
class TVar:
    x: str

    def __str__(self) -> str:
        return self.x


@dataclass(frozen=True)
class CapVar:
    rc: Capability
    x: str

    def __str__(self) -> str:
        return f"{self.rc} {self.x}"


@dataclass(frozen=True)
class Meta:
    """An unsolved type argument; exists only while elaborating."""

    id: int
    rc: Capability | None = None

    def __str__(self) -> str:
        return f"{self.rc} ?{self.id}" if self.rc else f"?{self.id}"


TypeRef = Union[Concrete, TVar, CapVar, Meta]


def display_decl(name: DeclName) -> str:
    if name.is_numeral:
        return name.base[len(NUM_PREFIX):]
    if name.is_string:
        return '"' + name.base[len(STR_PREFIX):] + '"'
    return name.base


def with_rc(t: TypeRef, rc: Capability | None) -> TypeRef:
    """Overwrite the capability of ``t`` (the ``T[R]`` view operation)."""
    if rc is None:
        return t
    if isinstance(t, Concrete):
        return Concrete(rc, t.name, t.args)
    if isinstance(t, (TVar, CapVar)):
        return CapVar(rc, t.x)
    return Meta(t.id, rc)


def rc_of(t: TypeRef) -> Capability | None:
    return None if isinstance(t, TVar) else t.rc


# ---------------------------------------------------------------- terms


@dataclass(frozen=True)
class Sig:
    rc: Capability | None
    name: MethName
    type_params: tuple[str, ...]
    params: tuple[tuple[str, TypeRef], ...]
    ret: TypeRef

    @property
    def param_types(self) -> tuple[TypeRef, ...]:
        return tuple(t for _, t in self.params)

    @property
    def param_names(self) -> tuple[str, ...]:
        return tuple(x for x, _ in self.params)


@dataclass(frozen=True)
class Method:
    sig: Sig
    body: "Expr | None" = None
    span: Span = field(default=NO_SPAN, compare=False, repr=False)

    @property
    def abstract(self) -> bool:
        return self.body is None

    @property
    def name(self) -> MethName:
        return self.sig.name


@dataclass(frozen=True)
class TraitDecl:
    name: DeclName
    type_params: tuple[str, ...]
    supers: tuple[Concrete, ...]
    self_name: str
    methods: tuple[Method, ...]
    in_body: bool = False
    span: Span = field(default=NO_SPAN, compare=False, repr=False)

    def method(self, name: MethName) -> Method | None:
        for m in self.methods:
            if m.name == name:
                return m
        return None

    def self_type(self, rc: Capability | None = None) -> Concrete:
        return Concrete(rc, self.name, tuple(TVar(x) for x in self.type_params))


@dataclass(frozen=True)
class Var:
    name: str
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


@dataclass(frozen=True)
class Call:
    recv: "Expr"
    meth: MethName
    targs: tuple[TypeRef, ...]
    args: tuple["Expr", ...]
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


@dataclass(frozen=True)
class Lit:
    """An object literal.

    ``targs`` is set only at runtime: it records the instantiation ``D[Ts]``
    of a literal whose funnelled type variables have been substituted away.
    """

    rc: Capability | None
    decl: TraitDecl
    span: Span = field(default=NO_SPAN, compare=False, repr=False)
    targs: tuple["TypeRef", ...] | None = None

    def type(self) -> "Concrete":
        if self.targs is not None:
            return Concrete(self.rc, self.decl.name, self.targs)
        return self.decl.self_type(self.rc)


Expr = Union[Var, Call, Lit]


@dataclass(frozen=True)
class MType:
    name: MethName
    type_params: tuple[str, ...]
    param_types: tuple[TypeRef, ...]
    ret: TypeRef
    rc: Capability | None = None

    @classmethod
    def of(cls, sig: Sig) -> "MType":
        return cls(sig.name, sig.type_params, sig.param_types, sig.ret, sig.rc)

    def __str__(self) -> str:
        xs = f"[{', '.join(self.type_params)}]" if self.type_params else ""
        ps = ", ".join(str(t) for t in self.param_types)
        head = f"{self.rc} " if self.rc else ""
        return f"{head}{self.name.base}{xs}({ps}): {self.ret}"


@dataclass
class Program:
    top_level: tuple[TraitDecl, ...]
    mode: str = RC
    table: dict[DeclName, TraitDecl] = field(default_factory=dict)
    duplicates: list[TraitDecl] = field(default_factory=list)

    @classmethod
    def build(cls, top_level: Iterable[TraitDecl], mode: str = RC) -> "Program":
        top = tuple(top_level)
        table: dict[DeclName, TraitDecl] = {}
        dups: list[TraitDecl] = []
        for lit in all_ls(top):
            if lit.name in table:
                dups.append(lit)
            else:
                table[lit.name] = lit
        return cls(top, mode, table, dups)

    def lookup(self, name: DeclName) -> TraitDecl | None:
        return self.table.get(name)


# ---------------------------------------------------------------- operations


def subst_type_vars(subject, mapping: Mapping[str, TypeRef]):
    """Replace type variables in a type, signature, method, literal or expression.

    ``CapVar(R, X)`` with ``X`` mapped to ``R' D[Ts]`` yields ``R D[Ts]``.  A
    literal that redeclares a mapped variable (funnelling) stops the
    substitution of that variable inside it.
    """
    if not mapping:
        return subject
    if isinstance(subject, TVar):
        return mapping.get(subject.x, subject)
    if isinstance(subject, CapVar):
        if subject.x in mapping:
            return with_rc(mapping[subject.x], subject.rc)
        return subject
    if isinstance(subject, Concrete):
        if not subject.args:
            return subject
        return Concrete(subject.rc, subject.name, tuple(subst_type_vars(a, mapping) for a in subject.args))
    if isinstance(subject, Meta):
        return subject
    if isinstance(subject, Sig):
        subject, _ = _avoid_capture(subject, None, mapping)
        inner = _without(mapping, subject.type_params)
        return Sig(
            subject.rc,
            subject.name,
            subject.type_params,
            tuple((x, subst_type_vars(t, inner)) for x, t in subject.params),
            subst_type_vars(subject.ret, inner),
        )
    if isinstance(subject, Method):
        sig, body = _avoid_capture(subject.sig, subject.body, mapping)
        inner = _without(mapping, sig.type_params)
        body = subst_type_vars(body, inner) if body is not None else None
        return Method(subst_type_vars(sig, mapping), body, subject.span)
    if isinstance(subject, TraitDecl):
        inner = _without(mapping, subject.type_params)
        if not inner:
            return subject
        return replace(
            subject,
            supers=tuple(subst_type_vars(s, inner) for s in subject.supers),
            methods=tuple(subst_type_vars(m, inner) for m in subject.methods),
        )
    if isinstance(subject, Var):
        return subject
    if isinstance(subject, Call):
        return Call(
            subst_type_vars(subject.recv, mapping),
            subject.meth,
            tuple(subst_type_vars(t, mapping) for t in subject.targs),
            tuple(subst_type_vars(a, mapping) for a in subject.args),
            subject.span,
        )
    if isinstance(subject, Lit):
        targs = None if subject.targs is None else tuple(subst_type_vars(t, mapping) for t in subject.targs)
        return replace(subject, decl=subst_type_vars(subject.decl, mapping), targs=targs)
    if isinstance(subject, (tuple, list)):
        return type(subject)(subst_type_vars(s, mapping) for s in subject)
    raise TypeError(f"cannot substitute into {type(subject).__name__}")


def _avoid_capture(sig: Sig, body, mapping: Mapping[str, TypeRef]):
    """Rename type parameters of ``sig`` that occur free in the substituted types."""
    inner = _without(mapping, sig.type_params)
    free: set[str] = set()
    for v in inner.values():
        free.update(type_vars_of(v))
    clash = [x for x in sig.type_params if x in free]
    if not clash:
        return sig, body
    used = free | set(sig.type_params) | set(inner)
    for t in (*sig.param_types, sig.ret):
        used.update(type_vars_of(t))
    renaming: dict[str, TypeRef] = {}
    for x in clash:
        y = fresh_name(x + "$", used)
        used.add(y)
        renaming[x] = TVar(y)
    xs = tuple(renaming[x].x if x in renaming else x for x in sig.type_params)
    new_sig = Sig(sig.rc, sig.name, xs, tuple((p, subst_type_vars(t, renaming)) for p, t in sig.params),
                  subst_type_vars(sig.ret, renaming))
    return new_sig, (subst_type_vars(body, renaming) if body is not None else None)


def _without(mapping: Mapping, keys: Iterable[str]) -> Mapping:
    keys = [k for k in keys if k in mapping]
    if not keys:
        return mapping
    return {k: v for k, v in mapping.items() if k not in keys}


def subst_vars(subject: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Replace free variables, descending into nested literal bodies.

    Binders (self-names and method parameters) stop the replacement of the
    name they bind.
    """
    if not mapping:
        return subject
    if isinstance(subject, Var):
        return mapping.get(subject.name, subject)
    if isinstance(subject, Call):
        return Call(
            subst_vars(subject.recv, mapping),
            subject.meth,
            subject.targs,
            tuple(subst_vars(a, mapping) for a in subject.args),
            subject.span,
        )
    if isinstance(subject, Lit):
        decl = subject.decl
        outer = _without(mapping, (decl.self_name,))
        if not outer:
            return subject
        methods = []
        changed = False
        for m in decl.methods:
            if m.body is None:
                methods.append(m)
                continue
            inner = _without(outer, m.sig.param_names)
            body = subst_vars(m.body, inner)
            changed |= body is not m.body
            methods.append(Method(m.sig, body, m.span) if body is not m.body else m)
        if not changed:
            return subject
        return replace(subject, decl=replace(decl, methods=tuple(methods)))
    raise TypeError(f"cannot substitute into {type(subject).__name__}")


def all_ls(subject) -> list[TraitDecl]:
    """Every literal transitively contained in ``subject``, first occurrence first."""
    out: list[TraitDecl] = []
    seen: set[int] = set()
    seen_eq: dict[DeclName, list[TraitDecl]] = {}

    def add(decl: TraitDecl) -> bool:
        if id(decl) in seen:
            return False
        seen.add(id(decl))
        same = seen_eq.setdefault(decl.name, [])
        if any(d == decl for d in same):
            return False
        same.append(decl)
        out.append(decl)
        return True

    def walk(node) -> None:
        if isinstance(node, Program):
            for d in node.top_level:
                walk(d)
        elif isinstance(node, (tuple, list)):
            for d in node:
                walk(d)
        elif isinstance(node, TraitDecl):
            if add(node):
                for m in node.methods:
                    walk(m)
        elif isinstance(node, Lit):
            walk(node.decl)
        elif isinstance(node, Method):
            if node.body is not None:
                walk(node.body)
        elif isinstance(node, Call):
            walk(node.recv)
            for a in node.args:
                walk(a)
        elif isinstance(node, Var):
            pass
        else:
            raise TypeError(f"allLs undefined on {type(node).__name__}")

    walk(subject)
    return out


def alpha_eq_mtype(m1: MType, m2: MType) -> bool:
    """True iff renaming both type-parameter lists to a common fresh sequence
    makes the two method types syntactically identical."""
    if m1.name != m2.name or m1.rc != m2.rc:
        return False
    if len(m1.type_params) != len(m2.type_params) or len(m1.param_types) != len(m2.param_types):
        return False
    common = [TVar(f"${i}") for i in range(len(m1.type_params))]
    s1 = dict(zip(m1.type_params, common))
    s2 = dict(zip(m2.type_params, common))
    lhs = [subst_type_vars(t, s1) for t in (*m1.param_types, m1.ret)]
    rhs = [subst_type_vars(t, s2) for t in (*m2.param_types, m2.ret)]
    return lhs == rhs


def fresh_name(base: str, used: Iterable[str]) -> str:
    used = used if isinstance(used, (set, frozenset, dict)) else set(used)
    if base not in used:
        return base
    i = 1
    while f"{base}{i}" in used:
        i += 1
    return f"{base}{i}"


def type_vars_of(t) -> list[str]:
    """Type variables occurring in a type (in order, without repeats)."""
    out: list[str] = []

    def go(t) -> None:
        if isinstance(t, (TVar, CapVar)):
            if t.x not in out:
                out.append(t.x)
        elif isinstance(t, Concrete):
            for a in t.args:
                go(a)

    go(t)
    return out


def erase_caps(subject):
    """Drop every capability: the capability-free view of an rc term."""
    if isinstance(subject, Concrete):
        return Concrete(None, subject.name, tuple(erase_caps(a) for a in subject.args))
    if isinstance(subject, CapVar):
        return TVar(subject.x)
    if isinstance(subject, (TVar, Meta)):
        return subject if isinstance(subject, TVar) else Meta(subject.id)
    if isinstance(subject, Sig):
        return Sig(None, subject.name, subject.type_params,
                   tuple((x, erase_caps(t)) for x, t in subject.params), erase_caps(subject.ret))
    if isinstance(subject, Method):
        return Method(erase_caps(subject.sig), erase_caps(subject.body) if subject.body is not None else None,
                      subject.span)
    if isinstance(subject, TraitDecl):
        return replace(subject, supers=tuple(erase_caps(s) for s in subject.supers),
                       methods=tuple(erase_caps(m) for m in subject.methods))
    if isinstance(subject, Var):
        return subject
    if isinstance(subject, Call):
        return Call(erase_caps(subject.recv), subject.meth, tuple(erase_caps(t) for t in subject.targs),
                    tuple(erase_caps(a) for a in subject.args), subject.span)
    if isinstance(subject, Lit):
        targs = None if subject.targs is None else tuple(erase_caps(t) for t in subject.targs)
        return Lit(None, erase_caps(subject.decl), subject.span, targs)
    if isinstance(subject, Program):
        return Program.build((erase_caps(d) for d in subject.top_level), HEART)
    raise TypeError(f"cannot erase capabilities of {type(subject).__name__}")


def is_value(e: Expr) -> bool:
    return isinstance(e, Lit)
