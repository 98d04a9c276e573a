"""Surface syntax tree: what the parser produces, with all sugar still present.

Names keep their arity next to them (``arity`` properties), so every stage
after parsing sees arity-mangled declaration and method names.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .diagnostics import NO_SPAN, Span


@dataclass
class SType:
    rc: str | None
    name: str
    args: list["SType"] = field(default_factory=list)
    span: Span = NO_SPAN

    @property
    def arity(self) -> int:
        return len(self.args)


@dataclass
class SParam:
    name: str
    type: SType | None = None
    span: Span = NO_SPAN


@dataclass
class SMethod:
    rc: str | None
    name: str | None  # None: lambda-style member, name taken from the target
    type_params: list[str] | None
    params: list[SParam]
    ret: SType | None
    body: "SExpr | None"
    span: Span = NO_SPAN

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass
class SLit:
    rc: str | None
    name: str | None  # None: anonymous, named freshly during elaboration
    type_params: list[str] | None  # None: funnel every type variable in scope
    supers: list[SType] | None  # None: trait taken from the expected type
    self_name: str | None
    methods: list[SMethod]
    top: bool = False
    span: Span = NO_SPAN


@dataclass
class SVar:
    name: str
    span: Span = NO_SPAN


@dataclass
class SCall:
    recv: "SExpr"
    meth: str
    targs: list[SType] | None
    args: list["SExpr"]
    span: Span = NO_SPAN


@dataclass
class SEq:
    """``recv.meth[targs] var = init cont`` where ``cont`` starts from an ``SHole``."""

    recv: "SExpr"
    meth: str
    targs: list[SType] | None
    var: str
    init: "SExpr"
    cont: "SExpr"
    span: Span = NO_SPAN


@dataclass
class SHole:
    span: Span = NO_SPAN


@dataclass
class SNum:
    text: str
    span: Span = NO_SPAN


@dataclass
class SStr:
    value: str
    span: Span = NO_SPAN


@dataclass
class SDeclRef:
    rc: str | None
    type: SType
    span: Span = NO_SPAN


SExpr = Union[SVar, SCall, SEq, SHole, SNum, SStr, SDeclRef, SLit]


@dataclass
class SurfaceProgram:
    decls: list[SLit]
