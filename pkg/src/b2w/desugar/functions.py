"""Function bodies move into defining axioms."""

from __future__ import annotations

from ..boogie import ast as A
from .common import FreshNames, substitute


def axiomatize_functions(p: A.Program, fresh: FreshNames) -> A.Program:
    if not any(isinstance(d, A.FunctionDecl) and d.body is not None for d in p.decls):
        return p
    out = []
    for d in p.decls:
        if not (isinstance(d, A.FunctionDecl) and d.body is not None):
            out.append(d)
            continue
        zs = [fresh.fresh("z") for _ in d.params]
        mapping = {b.name: A.Ident(z) for b, z in zip(d.params, zs) if b.name is not None}
        lhs = A.FuncApp(d.name, tuple(A.Ident(z) for z in zs))
        body = A.Binary("==", lhs, substitute(d.body, mapping, fresh))
        if zs:
            bound = tuple(A.Binding(z, b.type, span=b.span) for z, b in zip(zs, d.params))
            body = A.Quantifier("forall", d.tparams, bound, (), (), body)
        out.append(A.replace(d, body=None))
        out.append(A.AxiomDecl(body, span=d.span))
    return A.replace(p, decls=tuple(out))
