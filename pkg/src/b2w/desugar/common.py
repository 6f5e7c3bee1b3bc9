"""Helpers shared by the desugaring passes."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..boogie import ast as A
from ..diagnostics import DiagnosticSink

GOTO_MODES = ("structure", "assert-false", "error")


def identifiers(p: A.Program) -> set[str]:
    """Every name spelled anywhere in ``p``: declarations, uses, labels and type names."""
    out: set[str] = set()
    for n in A.walk(p):
        for attr in ("name", "label"):
            v = getattr(n, attr, None)
            if isinstance(v, str):
                out.add(v)
        if isinstance(n, A.ConstDecl):
            out.update(n.names)
        elif isinstance(n, A.Goto):
            out.update(n.labels)
        elif isinstance(n, (A.TypeDecl,)):
            out.update(n.params)
        if isinstance(n, (A.MapType, A.Quantifier, A.Lambda, A.FunctionDecl, A.ProcedureDecl, A.Implementation)):
            out.update(n.tparams)
    return out


@dataclass
class FreshNames:
    """Generator of identifiers that avoid every name in ``taken``."""

    taken: set = field(default_factory=set)
    counter: int = 0

    def fresh(self, base: str) -> str:
        while True:
            name = f"{base}{self.counter}"
            self.counter += 1
            if name not in self.taken:
                self.taken.add(name)
                return name

    def variant(self, base: str) -> str:
        """``base`` itself when free, else ``base_k1``, ``base_k2`` ..."""
        name, k = base, 0
        while name in self.taken:
            k += 1
            name = f"{base}_k{k}"
        self.taken.add(name)
        return name


@dataclass
class DesugarConfig:
    goto_mode: str = "assert-false"
    mono_cap: int = 64
    fresh: FreshNames = field(default_factory=FreshNames)
    sink: DiagnosticSink = field(default_factory=DiagnosticSink)
    fallbacks: list = field(default_factory=list)
    origins: dict = field(default_factory=dict)  # procedure variant -> generic procedure

    def __post_init__(self):
        if self.goto_mode not in GOTO_MODES:
            raise ValueError(f"unknown goto mode {self.goto_mode!r}")
        if self.mono_cap < 1:
            raise ValueError("mono_cap must be positive")


def free_names(e: A.Node) -> set[str]:
    """Identifier names occurring free in ``e`` (bound variables excluded)."""
    out: set[str] = set()

    def go(n, bound):
        if isinstance(n, A.Ident):
            if n.name not in bound:
                out.add(n.name)
            return
        if isinstance(n, (A.Quantifier, A.Lambda)):
            inner = bound | {b.name for b in n.bound}
            for c in A.children(n):
                go(c, inner)
            return
        for c in A.children(n):
            go(c, bound)

    go(e, frozenset())
    return out


def substitute(e: A.Expr, mapping: dict, fresh: FreshNames | None = None) -> A.Expr:
    """Replace free identifiers by expressions, renaming binders that would capture."""
    if not mapping:
        return e
    incoming = set()
    for v in mapping.values():
        incoming |= free_names(v)

    def go(n, m):
        if isinstance(n, A.Ident):
            return m.get(n.name, n)
        if isinstance(n, (A.Quantifier, A.Lambda)):
            m = {k: v for k, v in m.items() if k not in {b.name for b in n.bound}}
            if not m:
                return n
            bound = []
            for b in n.bound:
                if b.name in incoming:
                    new = fresh.fresh(b.name + "_") if fresh else b.name + "_"
                    m[b.name] = A.Ident(new, span=b.span)
                    bound.append(A.replace(b, name=new))
                else:
                    bound.append(b)
            n = A.replace(n, bound=tuple(bound))
            return A.map_children(n, lambda c: go(c, m) if not isinstance(c, A.Binding) else c)
        return A.map_children(n, lambda c: go(c, m))

    return go(e, dict(mapping))


def strip_old(e: A.Expr) -> A.Expr:
    if isinstance(e, A.Old):
        return strip_old(e.expr)
    return A.map_children(e, strip_old)


def conj(es) -> A.Expr:
    es = list(es)
    if not es:
        return A.BoolLit(True)
    out = es[0]
    for x in es[1:]:
        out = A.Binary("&&", out, x)
    return out


def disj(es) -> A.Expr:
    es = list(es)
    if not es:
        return A.BoolLit(False)
    out = es[0]
    for x in es[1:]:
        out = A.Binary("||", out, x)
    return out


def type_syntax(t: A.BoogieType) -> A.BoogieType:
    """A resolved type as declaration syntax (type variables become named references)."""
    if isinstance(t, A.TypeVar):
        return A.CtorType(t.name)
    if isinstance(t, A.CtorType):
        return A.CtorType(t.name, tuple(type_syntax(a) for a in t.args))
    if isinstance(t, A.MapType):
        return A.MapType(t.tparams, tuple(type_syntax(d) for d in t.domain), type_syntax(t.codomain))
    return t


def subst_syntax(t: A.BoogieType, mapping: dict) -> A.BoogieType:
    """Substitute type-variable references in declaration syntax."""
    if not mapping:
        return t
    if isinstance(t, (A.CtorType, A.TypeVar)) and not getattr(t, "args", ()) and t.name in mapping:
        return type_syntax(mapping[t.name])
    if isinstance(t, A.CtorType) and t.args:
        return A.replace(t, args=tuple(subst_syntax(a, mapping) for a in t.args))
    if isinstance(t, A.MapType):
        inner = {k: v for k, v in mapping.items() if k not in t.tparams}
        return A.replace(
            t,
            domain=tuple(subst_syntax(d, inner) for d in t.domain),
            codomain=subst_syntax(t.codomain, inner),
        )
    return t
