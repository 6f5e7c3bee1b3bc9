"""Operations on resolved Boogie types: substitution, unification, renderings."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from ..boogie.ast import BoogieType, BvType, CtorType, MapType, MetaVar, PrimType, TypeVar


def free_tvars(t: BoogieType) -> set[str]:
    if isinstance(t, TypeVar):
        return {t.name}
    if isinstance(t, CtorType):
        return set().union(*(free_tvars(a) for a in t.args)) if t.args else set()
    if isinstance(t, MapType):
        inner = set().union(*(free_tvars(d) for d in t.domain), free_tvars(t.codomain))
        return inner - set(t.tparams)
    return set()


def has_meta(t: BoogieType) -> bool:
    if isinstance(t, MetaVar):
        return True
    if isinstance(t, CtorType):
        return any(has_meta(a) for a in t.args)
    if isinstance(t, MapType):
        return any(has_meta(d) for d in t.domain) or has_meta(t.codomain)
    return False


_fresh_counter = itertools.count()


def subst(t: BoogieType, mapping: dict[str, BoogieType]) -> BoogieType:
    """Capture-avoiding substitution of type variables."""
    if not mapping:
        return t
    if isinstance(t, TypeVar):
        return mapping.get(t.name, t)
    if isinstance(t, CtorType):
        if not t.args:
            return t
        return CtorType(t.name, tuple(subst(a, mapping) for a in t.args))
    if isinstance(t, MapType):
        inner = {k: v for k, v in mapping.items() if k not in t.tparams}
        tparams = t.tparams
        incoming = set().union(*(free_tvars(v) for v in inner.values())) if inner else set()
        clash = [p for p in tparams if p in incoming]
        if clash:
            rename = {p: f"{p}%{next(_fresh_counter)}" for p in clash}
            tparams = tuple(rename.get(p, p) for p in tparams)
            inner.update({p: TypeVar(n) for p, n in rename.items()})
        return MapType(
            tparams,
            tuple(subst(d, inner) for d in t.domain),
            subst(t.codomain, inner),
        )
    return t


def alpha_normal(t: BoogieType) -> BoogieType:
    """Rename bound type parameters of map types to positional names."""
    def go(t, depth):
        if isinstance(t, CtorType) and t.args:
            return CtorType(t.name, tuple(go(a, depth) for a in t.args))
        if isinstance(t, MapType):
            names = {p: TypeVar(f"%{depth}.{i}") for i, p in enumerate(t.tparams)}
            dom = tuple(go(subst(d, names), depth + 1) for d in t.domain)
            cod = go(subst(t.codomain, names), depth + 1)
            return MapType(tuple(f"%{depth}.{i}" for i in range(len(t.tparams))), dom, cod)
        return t
    return go(t, 0)


def alpha_eq(a: BoogieType, b: BoogieType) -> bool:
    return alpha_normal(a) == alpha_normal(b)


def is_concrete(t: BoogieType) -> bool:
    """No free type variables and no metas."""
    return not free_tvars(t) and not has_meta(t)


def render(t: BoogieType) -> str:
    from ..boogie.printer import print_type
    return print_type(t)


def tag(t: BoogieType) -> str:
    """Identifier-safe canonical rendering used in variant names (``int``, ``bool``, ``map_int_int``)."""
    if isinstance(t, PrimType):
        return t.name
    if isinstance(t, BvType):
        return f"bv{t.width}"
    if isinstance(t, TypeVar):
        return t.name
    if isinstance(t, CtorType):
        return "_".join([t.name] + [tag(a) for a in t.args])
    if isinstance(t, MapType):
        return "_".join(["map"] + [tag(d) for d in t.domain] + [tag(t.codomain)])
    return "t"


class UnifyError(Exception):
    pass


@dataclass
class Unifier:
    """Substitution over metavariables, built up by :meth:`unify`."""

    solution: dict[int, BoogieType] = field(default_factory=dict)
    counter: itertools.count = field(default_factory=itertools.count)

    def fresh(self) -> MetaVar:
        return MetaVar(next(self.counter))

    def resolve(self, t: BoogieType) -> BoogieType:
        while isinstance(t, MetaVar) and t.id in self.solution:
            t = self.solution[t.id]
        return t

    def zonk(self, t: BoogieType, default: BoogieType | None = None) -> BoogieType:
        t = self.resolve(t)
        if isinstance(t, MetaVar):
            return default if default is not None else t
        if isinstance(t, CtorType) and t.args:
            return CtorType(t.name, tuple(self.zonk(a, default) for a in t.args))
        if isinstance(t, MapType):
            return MapType(t.tparams, tuple(self.zonk(d, default) for d in t.domain), self.zonk(t.codomain, default))
        return t

    def occurs(self, mid: int, t: BoogieType) -> bool:
        t = self.resolve(t)
        if isinstance(t, MetaVar):
            return t.id == mid
        if isinstance(t, CtorType):
            return any(self.occurs(mid, a) for a in t.args)
        if isinstance(t, MapType):
            return any(self.occurs(mid, d) for d in t.domain) or self.occurs(mid, t.codomain)
        return False

    def unify(self, a: BoogieType, b: BoogieType) -> None:
        a, b = self.resolve(a), self.resolve(b)
        if isinstance(a, MetaVar) and isinstance(b, MetaVar) and a.id == b.id:
            return
        if isinstance(a, MetaVar):
            if self.occurs(a.id, b):
                raise UnifyError("recursive type")
            self.solution[a.id] = b
            return
        if isinstance(b, MetaVar):
            self.unify(b, a)
            return
        if type(a) is not type(b):
            raise UnifyError("shape")
        if isinstance(a, (PrimType, BvType, TypeVar)):
            if a != b:
                raise UnifyError("mismatch")
            return
        if isinstance(a, CtorType):
            if a.name != b.name or len(a.args) != len(b.args):
                raise UnifyError("mismatch")
            for x, y in zip(a.args, b.args):
                self.unify(x, y)
            return
        if isinstance(a, MapType):
            if len(a.tparams) != len(b.tparams) or len(a.domain) != len(b.domain):
                raise UnifyError("mismatch")
            shared = [TypeVar(f"%u{next(self.counter)}") for _ in a.tparams]
            sa = dict(zip(a.tparams, shared))
            sb = dict(zip(b.tparams, shared))
            for x, y in zip(a.domain, b.domain):
                self.unify(subst(x, sa), subst(y, sb))
            self.unify(subst(a.codomain, sa), subst(b.codomain, sb))
            return
        raise UnifyError("unknown type")


def instantiate(tparams, ty_list, unifier: Unifier):
    """Replace ``tparams`` in every type of ``ty_list`` with fresh metas."""
    metas = [unifier.fresh() for _ in tparams]
    mapping = dict(zip(tparams, metas))
    return [subst(t, mapping) for t in ty_list], metas

