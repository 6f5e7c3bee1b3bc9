"""``call forall`` becomes an assumption of the callee's contract, universally quantified."""

from __future__ import annotations

from ..boogie import ast as A
from ..diagnostics import CalleeHasModifies, Unsupported
from .common import FreshNames, conj, free_names, strip_old, substitute


def _lemma_assume(s: A.CallForall, callee: A.ProcedureDecl, fresh: FreshNames) -> A.Assume:
    if callee.modifies:
        raise CalleeHasModifies(f"call forall on '{s.name}', whose modifies clause is not empty", s.span)
    if callee.outs:
        raise Unsupported(f"call forall on '{s.name}', which has output parameters", s.span)
    if callee.tparams:
        raise Unsupported(f"call forall on polymorphic procedure '{s.name}'", s.span)
    concrete = set()
    for a in s.args:
        if a is not None:
            concrete |= free_names(a)
    mapping, bound = {}, []
    for formal, arg in zip(callee.ins, s.args):
        if arg is None:
            name = formal.name
            if name in concrete:
                name = fresh.fresh(formal.name + "_")
            mapping[formal.name] = A.Ident(name, span=s.span)
            bound.append(A.Binding(name, formal.type, span=formal.span))
        else:
            mapping[formal.name] = arg
    pre = [substitute(strip_old(r.expr), mapping, fresh) for r in callee.requires]
    post = [substitute(strip_old(e.expr), mapping, fresh) for e in callee.ensures]
    body = conj(post)
    if pre:
        body = A.Binary("==>", conj(pre), body)
    if bound:
        body = A.Quantifier("forall", (), tuple(bound), (), (), body)
    return A.Assume(body, span=s.span)


def desugar_call_forall(p: A.Program, fresh: FreshNames) -> A.Program:
    procs = {d.name: d for d in p.decls if isinstance(d, A.ProcedureDecl)}

    def go(n):
        if isinstance(n, A.CallForall):
            return _lemma_assume(n, procs[n.name], fresh)
        if isinstance(n, A.Expr):
            return n
        return A.map_children(n, go)

    if not any(isinstance(n, A.CallForall) for n in A.walk(p)):
        return p
    return A.replace(p, decls=tuple(go(d) for d in p.decls))
