"""Trait composition: inherited methods, conflicts, effective method sets, subtyping."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .ast import (HEART, IMM, ISO, MUT, READ, CapVar, Capability, Concrete, DeclName, Method,
                  MType, TraitDecl, TVar, TypeRef, alpha_eq_mtype, subst_type_vars)


@dataclass(frozen=True)
class DM:
    """A method together with the trait instantiation it comes from."""

    origin: Concrete
    method: Method

    @property
    def name(self):
        return self.method.name

    @property
    def abstract(self) -> bool:
        return self.method.abstract

    @property
    def mtype(self) -> MType:
        return MType.of(self.method.sig)

    def __str__(self) -> str:
        return f"{self.origin}.{self.method.name.base}"


def cap_sub(r1: Capability | None, r2: Capability | None) -> bool:
    """The capability lattice: iso below everything, read above everything."""
    return r1 == r2 or r1 is ISO or r2 is READ


def callable_at(r: Capability | None, m: Method) -> bool:
    """Whether a method is callable through a reference of capability ``r``."""
    if r is None:
        return True
    return r in (MUT, ISO) or m.sig.rc in (IMM, READ, None)


def strip(t: Concrete) -> Concrete:
    return t if t.rc is None else Concrete(None, t.name, t.args)


class Traits:
    """Queries over one declaration table.  Results are memoised per instance."""

    def __init__(self, table: Mapping[DeclName, TraitDecl]):
        self.table = table
        self._dmeths: dict[Concrete, list[DM]] = {}
        self._anc: dict[Concrete, list[Concrete]] = {}
        self._visiting: set[DeclName] = set()
        self._anc_visiting: set[DeclName] = set()

    def decl(self, name: DeclName) -> TraitDecl | None:
        return self.table.get(name)

    def instantiate(self, t: Concrete) -> tuple[TraitDecl, dict] | None:
        d = self.decl(t.name)
        if d is None or len(d.type_params) != len(t.args):
            return None
        return d, dict(zip(d.type_params, t.args))

    def supers_of(self, t: Concrete) -> list[Concrete]:
        inst = self.instantiate(t)
        if inst is None:
            return []
        d, mapping = inst
        return [Concrete(t.rc, s.name, subst_type_vars(s, mapping).args) for s in d.supers]

    # -- dmeths

    def dmeths(self, t: Concrete) -> list[DM]:
        key = strip(t)
        if key in self._dmeths:
            return self._dmeths[key]
        inst = self.instantiate(key)
        if inst is None or key.name in self._visiting:
            return []
        d, mapping = inst
        self._visiting.add(key.name)
        try:
            out: list[DM] = [DM(key, subst_type_vars(m, mapping)) for m in d.methods]
            for s in self.supers_of(key):
                for dm in self.dmeths(s):
                    if dm not in out:
                        out.append(dm)
        finally:
            self._visiting.discard(key.name)
        self._dmeths[key] = out
        return out

    def ancestors(self, t: Concrete) -> list[Concrete]:
        """``t`` followed by every transitive super, capability-free, no repeats."""
        key = strip(t)
        if key in self._anc:
            return self._anc[key]
        out = [key]
        if key.name in self._anc_visiting or self.instantiate(key) is None:
            return out
        self._anc_visiting.add(key.name)
        try:
            for s in self.supers_of(key):
                for a in self.ancestors(s):
                    if a not in out:
                        out.append(a)
        finally:
            self._anc_visiting.discard(key.name)
        self._anc[key] = out
        return out

    def decl_sub(self, t1: Concrete, t2: Concrete) -> bool:
        return strip(t2) in self.ancestors(t1)

    # -- conflicts

    @staticmethod
    def alternative(dm1: DM, dm2: DM) -> bool:
        return dm1.origin != dm2.origin and dm1.name == dm2.name

    def beats(self, dm1: DM, dm2: DM) -> bool:
        return self.decl_sub(dm1.origin, dm2.origin)

    def conflict(self, dm1: DM, dm2: DM) -> bool:
        return self.alternative(dm1, dm2) and not dm2.abstract and not self.beats(dm1, dm2)

    def override_problems(self, t: Concrete) -> list[tuple[DM, DM]]:
        dms = self.dmeths(t)
        bad = []
        for i, a in enumerate(dms):
            for b in dms[i + 1:]:
                if a.name == b.name and not alpha_eq_mtype(a.mtype, b.mtype):
                    bad.append((a, b))
        return bad

    def implement_problems(self, t: Concrete) -> list[tuple[DM, DM]]:
        dms = self.dmeths(t)
        bad = []
        for a in dms:
            for b in dms:
                if not self.conflict(a, b):
                    continue
                if not any(self.alternative(c, a) and self.beats(c, a) and self.beats(c, b) for c in dms):
                    bad.append((a, b))
        return bad

    def override_ok(self, t: Concrete) -> bool:
        return not self.override_problems(t)

    def implement_ok(self, t: Concrete) -> bool:
        return not self.implement_problems(t)

    def meths(self, t: Concrete) -> list[DM]:
        """Every method of ``t`` that conflicts with no other, in ``dmeths`` order.

        Several entries share a name only when they are all abstract.
        """
        dms = self.dmeths(t)
        return [a for a in dms if not any(self.conflict(a, b) for b in dms)]

    def lookup(self, t: Concrete, name) -> DM | None:
        for dm in self.meths(t):
            if dm.name == name:
                return dm
        for dm in self.dmeths(t):
            if dm.name == name:
                return dm
        return None

    # -- subtyping

    def is_subtype(self, t1: TypeRef, t2: TypeRef, mode: str) -> bool:
        rc_mode = mode != HEART
        if isinstance(t1, Concrete) and isinstance(t2, Concrete):
            if rc_mode and not cap_sub(t1.rc, t2.rc):
                return False
            return self.decl_sub(t1, t2)
        if isinstance(t1, (TVar, CapVar)) and isinstance(t2, (TVar, CapVar)):
            if t1.x != t2.x:
                return False
            if not rc_mode:
                return True
            r1 = t1.rc if isinstance(t1, CapVar) else None
            r2 = t2.rc if isinstance(t2, CapVar) else None
            if r1 is None or r2 is None:
                # X <= read X and iso X <= X hold for every instantiation of X
                return r1 == r2 or r2 is READ or r1 is ISO
            return cap_sub(r1, r2)
        return False
