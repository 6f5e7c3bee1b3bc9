"""Lambdas become fresh map constants with a defining axiom."""

from __future__ import annotations

from ..boogie import ast as A
from ..diagnostics import FreeVariableCapture, Unsupported
from ..sema.types import free_tvars
from .common import FreshNames, type_syntax


def desugar_lambdas(p: A.Program, fresh: FreshNames) -> A.Program:
    new_decls: list = []

    def lift(lam: A.Lambda) -> A.Expr:
        if lam.tparams:
            raise Unsupported("polymorphic lambda expressions are not supported", lam.span)
        own = {b.key for b in lam.bound}
        for n in A.walk(lam.body):
            if isinstance(n, A.Ident) and n.kind != "const" and n.key not in own:
                raise FreeVariableCapture(
                    f"lambda body refers to '{n.name}', which is not a global constant", n.span or lam.span
                )
        body_ty = lam.body.ty
        dom = tuple(b.type for b in lam.bound)
        if body_ty is None or free_tvars(body_ty) or any(free_tvars(t) for t in (lam.ty.domain if isinstance(lam.ty, A.MapType) else ())):
            raise Unsupported("lambda over type variables of an enclosing declaration", lam.span)
        name = fresh.fresh("lmb")
        mt = A.MapType((), dom, type_syntax(body_ty))
        c = A.Ident(name, span=lam.span, kind="const", key=name)
        sel = A.MapSelect(c, tuple(A.Ident(b.name) for b in lam.bound))
        ax = A.Quantifier("forall", (), tuple(A.replace(b, where=None) for b in lam.bound), (), (), A.Binary("==", sel, lam.body))
        new_decls.append(A.ConstDecl((name,), mt, span=lam.span))
        new_decls.append(A.AxiomDecl(ax, span=lam.span))
        return c

    def go(n):
        n = A.map_children(n, go)
        if isinstance(n, A.Lambda):
            return lift(n)
        return n

    if not any(isinstance(n, A.Lambda) for n in A.walk(p)):
        return p
    decls = tuple(go(d) for d in p.decls)
    return A.replace(p, decls=decls + tuple(new_decls))
