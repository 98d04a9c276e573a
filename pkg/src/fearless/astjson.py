"""Deterministic JSON rendering of surface and core trees.

Nodes are objects with a ``kind`` field, capabilities are lowercase strings,
declaration and method names are arity-mangled (``List/1``, ``+/1``).  Spans
are omitted, so the rendering depends only on structure.
"""

from __future__ import annotations

import json

from .ast import CapVar, Call, Concrete, Lit, Meta, Method, Program, Sig, TraitDecl, TVar, Var
from .surface import SCall, SDeclRef, SEq, SHole, SLit, SMethod, SNum, SStr, SType, SurfaceProgram, SVar


def _cap(rc) -> str | None:
    return None if rc is None else str(rc)


# ---------------------------------------------------------------- core


def type_json(t) -> dict:
    if isinstance(t, Concrete):
        return {"kind": "concrete", "rc": _cap(t.rc), "name": str(t.name), "args": [type_json(a) for a in t.args]}
    if isinstance(t, TVar):
        return {"kind": "tvar", "name": t.x}
    if isinstance(t, CapVar):
        return {"kind": "capvar", "rc": _cap(t.rc), "name": t.x}
    if isinstance(t, Meta):
        return {"kind": "meta", "id": t.id, "rc": _cap(t.rc)}
    raise TypeError(type(t).__name__)


def sig_json(s: Sig) -> dict:
    return {
        "kind": "sig", "rc": _cap(s.rc), "name": str(s.name), "typeParams": list(s.type_params),
        "params": [{"name": x, "type": type_json(t)} for x, t in s.params], "ret": type_json(s.ret),
    }


def method_json(m: Method) -> dict:
    return {"kind": "method", "sig": sig_json(m.sig), "body": expr_json(m.body) if m.body is not None else None}


def decl_json(d: TraitDecl) -> dict:
    return {
        "kind": "decl", "name": str(d.name), "typeParams": list(d.type_params),
        "supers": [type_json(s) for s in d.supers], "self": d.self_name,
        "methods": [method_json(m) for m in d.methods], "inBody": d.in_body,
    }


def expr_json(e) -> dict:
    if isinstance(e, Var):
        return {"kind": "var", "name": e.name}
    if isinstance(e, Call):
        return {"kind": "call", "recv": expr_json(e.recv), "meth": str(e.meth),
                "targs": [type_json(t) for t in e.targs], "args": [expr_json(a) for a in e.args]}
    if isinstance(e, Lit):
        return {"kind": "lit", "rc": _cap(e.rc), "decl": decl_json(e.decl)}
    raise TypeError(type(e).__name__)


def program_json(p: Program) -> dict:
    return {"kind": "program", "mode": p.mode, "decls": [decl_json(d) for d in p.top_level]}


# ---------------------------------------------------------------- surface


def stype_json(t: SType | None):
    if t is None:
        return None
    return {"kind": "type", "rc": t.rc, "name": f"{t.name}/{t.arity}", "args": [stype_json(a) for a in t.args]}


def smethod_json(m: SMethod) -> dict:
    return {
        "kind": "method", "rc": m.rc, "name": None if m.name is None else f"{m.name}/{m.arity}",
        "typeParams": m.type_params,
        "params": [{"name": p.name, "type": stype_json(p.type)} for p in m.params],
        "ret": stype_json(m.ret), "body": sexpr_json(m.body) if m.body is not None else None,
    }


def slit_json(l: SLit) -> dict:
    name = None if l.name is None else f"{l.name}/{len(l.type_params or ())}"
    return {
        "kind": "lit", "rc": l.rc, "name": name, "typeParams": l.type_params,
        "supers": None if l.supers is None else [stype_json(s) for s in l.supers],
        "self": l.self_name, "methods": [smethod_json(m) for m in l.methods], "top": l.top,
    }


def sexpr_json(e) -> dict:
    if isinstance(e, SVar):
        return {"kind": "var", "name": e.name}
    if isinstance(e, SCall):
        return {"kind": "call", "recv": sexpr_json(e.recv), "meth": f"{e.meth}/{len(e.args)}",
                "targs": None if e.targs is None else [stype_json(t) for t in e.targs],
                "args": [sexpr_json(a) for a in e.args]}
    if isinstance(e, SEq):
        return {"kind": "eq", "recv": sexpr_json(e.recv), "meth": f"{e.meth}/2",
                "targs": None if e.targs is None else [stype_json(t) for t in e.targs],
                "var": e.var, "init": sexpr_json(e.init), "cont": sexpr_json(e.cont)}
    if isinstance(e, SHole):
        return {"kind": "hole"}
    if isinstance(e, SNum):
        return {"kind": "num", "text": e.text}
    if isinstance(e, SStr):
        return {"kind": "str", "value": e.value}
    if isinstance(e, SDeclRef):
        return {"kind": "declref", "rc": e.rc, "type": stype_json(e.type)}
    if isinstance(e, SLit):
        return slit_json(e)
    raise TypeError(type(e).__name__)


def surface_json(p: SurfaceProgram) -> dict:
    return {"kind": "program", "decls": [slit_json(d) for d in p.decls]}


def dumps(obj) -> str:
    """Canonical text: stable key order, two-space indentation, trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
