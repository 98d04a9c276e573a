"""Environment adaptation for literals: what a method body may see of captured state."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .ast import IMM, ISO, MUT, READ, Capability, TVar, TypeRef, rc_of, with_rc

KEPT, VIEWED_IMM, VIEWED_READ, DROPPED = "kept", "viewed-imm", "viewed-read", "dropped"


@dataclass
class AdaptedEnv:
    vars: dict[str, TypeRef] = field(default_factory=dict)
    provenance: dict[str, str] = field(default_factory=dict)


def adapt_binding(t: TypeRef, lit_rc: Capability, meth_rc: Capability) -> tuple[TypeRef | None, str]:
    """Adapt one binding; the first matching case wins."""
    r = rc_of(t)
    if r in (ISO, IMM):
        return with_rc(t, IMM), VIEWED_IMM
    if lit_rc in (ISO, MUT) and meth_rc in (ISO, MUT):
        return t, KEPT
    if meth_rc is IMM and lit_rc in (ISO, MUT, READ):
        return with_rc(t, IMM), VIEWED_IMM
    if meth_rc is READ and lit_rc in (ISO, MUT, READ):
        return with_rc(t, READ), VIEWED_READ
    if isinstance(t, TVar):
        # A bare type variable carries no capability of its own; closures
        # such as Opt's factory capture it unchanged.
        return t, KEPT
    return None, DROPPED


def adapt_env(env: Mapping[str, TypeRef], lit_rc: Capability, meth_rc: Capability | None) -> AdaptedEnv:
    meth_rc = meth_rc or IMM
    out = AdaptedEnv()
    for x, t in env.items():
        t2, how = adapt_binding(t, lit_rc, meth_rc)
        out.provenance[x] = how
        if t2 is not None:
            out.vars[x] = t2
    return out
