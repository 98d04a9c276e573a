"""Random inputs for property tests: acyclic trait tables and well-typed programs."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from fearless.ast import Call, Concrete, DeclName, Method, MethName, Sig, TraitDecl, TVar, Var

# ---------------------------------------------------------------- trait tables

METHOD_NAMES = (".a", ".b", ".c", ".d", ".e")
BASE = DeclName("Base", 0)


def _random_type(rng: random.Random, decl_xs: tuple[str, ...], meth_xs: tuple[str, ...]):
    choices = [Concrete(None, BASE)]
    choices += [TVar(x) for x in decl_xs + meth_xs]
    return rng.choice(choices)


def _random_method(rng: random.Random, name: str, decl_xs: tuple[str, ...]) -> Method:
    # method type parameters never share names with declaration ones, so
    # substitution through a super never needs renaming
    meth_xs = rng.choice(((), ("Y",), ("Z",)))
    arity = rng.randint(0, 1)
    params = tuple((f"p{i}", _random_type(rng, decl_xs, meth_xs)) for i in range(arity))
    sig = Sig(None, MethName(name, arity), meth_xs, params, _random_type(rng, decl_xs, meth_xs))
    body = Var("self") if rng.random() < 0.5 else None
    return Method(sig, body)


def random_table(rng: random.Random, max_decls: int = 8, max_methods: int = 5) -> dict[DeclName, TraitDecl]:
    """An acyclic table: each declaration only implements earlier ones."""
    table: dict[DeclName, TraitDecl] = {BASE: TraitDecl(BASE, (), (), "self", ())}
    made: list[TraitDecl] = []
    for i in range(rng.randint(1, max_decls)):
        xs = ("X",) if rng.random() < 0.4 else ()
        name = DeclName(f"D{i}", len(xs))
        supers = []
        for s in rng.sample(made, k=min(len(made), rng.randint(0, 3))):
            args = tuple(_random_type(rng, xs, ()) for _ in s.type_params)
            supers.append(Concrete(None, s.name, args))
        names = rng.sample(METHOD_NAMES, k=rng.randint(0, max_methods))
        methods = tuple(_random_method(rng, n, xs) for n in names)
        d = TraitDecl(name, xs, tuple(supers), "self", methods)
        table[name] = d
        made.append(d)
    return table


def instances(table: dict[DeclName, TraitDecl]) -> list[Concrete]:
    """One closed instantiation of every declaration."""
    return [Concrete(None, d.name, tuple(Concrete(None, BASE) for _ in d.type_params))
            for d in table.values()]


# ---------------------------------------------------------------- well-typed source terms

NUM, BOOL, STR, OPT, LIST = "Num", "Bool", "Str", "Opt[Num]", "List[Num]"
TYPES = (NUM, BOOL, STR, OPT, LIST)

HELPERS = """Example:{ .sum(ns: List[Num]): Num -> ns.match{
    .empty -> 0,
    .elem(list, e) -> this.sum(list) + e
}}
"""


@dataclass
class TermGen:
    """Generates source expressions of a requested type from the prelude vocabulary.

    Every production is well typed by construction; bound variable names are
    globally fresh so no binder shadows another.
    """

    rng: random.Random
    counter: int = 0
    scope: list[str] = field(default_factory=list)  # Num-typed variables in scope

    def fresh(self) -> str:
        self.counter += 1
        return f"x{self.counter}"

    def bind(self, fn):
        x = self.fresh()
        self.scope.append(x)
        try:
            return x, fn()
        finally:
            self.scope.pop()

    def gen(self, ty: str, depth: int) -> str:
        leaf = depth <= 0 or self.rng.random() < 0.25
        text = getattr(self, "_" + {"Num": "num", "Bool": "bool", "Str": "str",
                                    "Opt[Num]": "opt", "List[Num]": "list"}[ty])(depth - 1, leaf)
        # branches are annotated because inference does not join branch types;
        # operators chain left to right at one precedence, so compound terms are bracketed
        return text if leaf else f"({text})"

    def _num(self, d: int, leaf: bool) -> str:
        if leaf:
            if self.scope and self.rng.random() < 0.5:
                return self.rng.choice(self.scope)
            return str(self.rng.randint(0, 9))
        k = self.rng.randrange(7)
        if k == 0:
            return f"({self.gen(NUM, d)} {self.rng.choice('+-*')} {self.gen(NUM, d)})"
        if k == 1:
            return f"({self.gen(BOOL, d)}).if[Num]{{.then -> {self.gen(NUM, d)}, .else -> {self.gen(NUM, d)}}}"
        if k == 2:
            empty = self.gen(NUM, d)
            x, some = self.bind(lambda: self.gen(NUM, d))
            return f"({self.gen(OPT, d)}).match[Num]{{.empty -> {empty}, .some({x}) -> {some}}}"
        if k == 3:
            arg = self.gen(NUM, d)
            x, body = self.bind(lambda: self.gen(NUM, d))
            return f"Let#({arg}, {{{x} -> {body}}})"
        if k == 4:
            return f"Example.sum({self.gen(LIST, d)})"
        if k == 5:
            return f"Gen.twice({self.gen(NUM, d)})"
        return str(self.rng.randint(10, 99))

    def _bool(self, d: int, leaf: bool) -> str:
        if leaf:
            return self.rng.choice(("True", "False"))
        k = self.rng.randrange(6)
        if k == 0:
            return f"({self.gen(BOOL, d)}).{self.rng.choice(('and', 'or'))}({self.gen(BOOL, d)})"
        if k == 1:
            return f"({self.gen(BOOL, d)}).not"
        if k == 2:
            return f"({self.gen(NUM, d)} {self.rng.choice(('<', '=='))} {self.gen(NUM, d)})"
        if k == 3:
            return f"({self.gen(STR, d)} == {self.gen(STR, d)})"
        if k == 4:
            return f"({self.gen(BOOL, d)}).if[Bool]{{.then -> {self.gen(BOOL, d)}, .else -> {self.gen(BOOL, d)}}}"
        return self.rng.choice(("True", "False"))

    def _str(self, d: int, leaf: bool) -> str:
        if leaf:
            return '"' + self.rng.choice(("a", "bc", "Hi", "")) + '"'
        k = self.rng.randrange(3)
        if k == 0:
            return f"({self.gen(STR, d)} + {self.gen(STR, d)})"
        if k == 1:
            return f"({self.gen(NUM, d)}).str"
        return f"({self.gen(STR, d)}).upperCase"

    def _opt(self, d: int, leaf: bool) -> str:
        if leaf:
            return "Opt[Num]"
        return f"Opt#({self.gen(NUM, d)})"

    def _list(self, d: int, leaf: bool) -> str:
        if leaf:
            return "List[Num]"
        if self.rng.random() < 0.3:
            x, body = self.bind(lambda: self.gen(NUM, d))
            return f"({self.gen(LIST, d)}).map{{{x} -> {body}}}"
        return f"({self.gen(LIST, d)} + {self.gen(NUM, d)})"


def term_batch(rng: random.Random, count: int, depth: int = 4) -> tuple[str, list[tuple[str, str]]]:
    """Source for one ``Gen`` declaration with ``count`` zero-argument methods.

    Returns the source text and ``(method name, type)`` for each term.
    """
    g = TermGen(rng)
    lines, meta = [], []
    for i in range(count):
        ty = rng.choice(TYPES)
        lines.append(f"  .t{i}: {ty} -> {g.gen(ty, depth)},")
        meta.append((f".t{i}", ty))
    lines.append("  .twice(n: Num): Num -> n + n,")
    return HELPERS + "Gen:{\n" + "\n".join(lines) + "\n}\n", meta


def method_body(p, decl: str, meth: str):
    """The elaborated body of a zero-argument method of a top-level declaration."""
    d = next(d for d in p.top_level if d.name.base == decl)
    return d.method(MethName(meth, 0)).body


def closed_call(decl_lit, meth: str) -> Call:
    return Call(decl_lit, MethName(meth, 0), (), ())
