"""Uniqueness and order constraints on constants become plain axioms."""

from __future__ import annotations

from ..boogie import ast as A
from ..diagnostics import OrderCycle
from ..sema.typecheck import TypeEnv
from .common import FreshNames, conj, disj


def _id(n: str) -> A.Ident:
    return A.Ident(n)


def _po(a: A.Expr, b: A.Expr) -> A.Expr:
    return A.Binary("<:", a, b)


def _check_acyclic(edges: dict, spans: dict) -> None:
    state: dict[str, int] = {}

    def visit(c, path):
        state[c] = 1
        for p in edges.get(c, ()):
            if state.get(p) == 1:
                cyc = path[path.index(p):] + [p] if p in path else [c, p]
                raise OrderCycle("order specification is cyclic: " + " <: ".join(cyc), spans.get(c))
            if p not in state:
                visit(p, path + [p])
        state[c] = 2

    for c in edges:
        if c not in state:
            visit(c, [c])


def desugar_constant_constraints(p: A.Program, env: TypeEnv, fresh: FreshNames) -> A.Program:
    """Emit the axioms implied by ``unique`` and ``extends`` clauses and drop the clauses."""
    consts = [d for d in p.decls if isinstance(d, A.ConstDecl)]
    if not any(d.unique or d.parents is not None for d in consts):
        return p

    ctype = {n: env.consts[n] for d in consts for n in d.names}
    decl_type = {n: d.type for d in consts for n in d.names}
    spans = {n: d.span for d in consts for n in d.names}

    # uniqueness: pairwise disequality within each type, declaration order
    groups: dict = {}
    for d in consts:
        if d.unique:
            for n in d.names:
                groups.setdefault(ctype[n], []).append(n)
    unique_axioms = []
    for names in groups.values():
        for i, a in enumerate(names):
            for b in names[i + 1:]:
                unique_axioms.append(A.AxiomDecl(A.Binary("!=", _id(a), _id(b)), span=spans[a]))

    # order: parents, children, completeness
    parents: dict[str, tuple] = {}
    complete: dict[str, bool] = {}
    for d in consts:
        if d.parents is not None:
            for n in d.names:
                parents[n] = d.parents
                complete[n] = d.complete
    _check_acyclic({c: [q.name for q in ps] for c, ps in parents.items()}, spans)
    children: dict[str, list] = {}
    unique_children: dict[str, list] = {}
    for c, ps in parents.items():
        for q in ps:
            children.setdefault(q.name, []).append(c)
            if q.unique:
                unique_children.setdefault(q.name, []).append(c)

    taken = set(ctype) | {n for d in p.decls if isinstance(d, A.VarDecl) for n in (b.name for b in d.bindings)}

    def bound() -> str:
        name, k = "x", 0
        while name in taken:
            k += 1
            name = f"x{k}"
        return name

    order_axioms = []
    for c, ps in parents.items():
        x = bound()
        xv = _id(x)
        quant = lambda body: A.Quantifier("forall", (), (A.Binding(x, decl_type[c]),), (), (), body)
        parts = [_po(_id(c), _id(q.name)) for q in ps]
        succ = disj([A.Binary("==", _id(c), xv)] + [_po(_id(q.name), xv) for q in ps])
        parts.append(quant(A.Binary("==>", _po(_id(c), xv), succ)))
        if complete[c]:
            for q in ps:
                pred = disj([A.Binary("==", _id(q.name), xv)] + [_po(xv, _id(k)) for k in children[q.name]])
                parts.append(quant(A.Binary("==>", _po(xv, _id(q.name)), pred)))
        order_axioms.append(A.AxiomDecl(conj(parts), span=spans[c]))
    for q, kids in unique_children.items():
        for a in kids:
            for b in kids:
                if a != b:
                    x = bound()
                    xv = _id(x)
                    body = A.Binary("==>", _po(xv, _id(a)), A.Unary("!", _po(xv, _id(b))))
                    order_axioms.append(
                        A.AxiomDecl(A.Quantifier("forall", (), (A.Binding(x, decl_type[a]),), (), (), body), span=spans[a])
                    )

    last = max(i for i, d in enumerate(p.decls) if isinstance(d, A.ConstDecl))
    out = []
    for i, d in enumerate(p.decls):
        if isinstance(d, A.ConstDecl):
            d = A.replace(d, unique=False, parents=None, complete=False)
        out.append(d)
        if i == last:
            out.extend(unique_axioms)
            out.extend(order_axioms)
    return A.replace(p, decls=tuple(out))
