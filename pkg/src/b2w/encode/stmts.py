"""Boogie statements to WhyML program expressions."""

from __future__ import annotations

from ..boogie import ast as A
from ..diagnostics import BreakOutsideLoop, Unsupported
from ..whyml import ast as W
from .context import EncodeContext
from .exprs import procedure_key, prog, term

TRUE = W.Lit("true")


def seq(items) -> W.WNode:
    items = [x for x in items if not (isinstance(x, W.Seq) and not x.items)]
    if len(items) == 1:
        return items[0]
    return W.Seq(tuple(items))


def encode_block(stmts, ctx: EncodeContext) -> W.WNode:
    """Encode a statement list; labels directly before a loop name that loop."""
    out: list = []
    labels: list[str] = []
    for s in stmts:
        if isinstance(s, A.Label):
            labels.append(s.name)
            continue
        if isinstance(s, A.While):
            out.extend(encode_loop(s, ctx, frozenset(labels)))
        else:
            out.extend(encode_stmt(s, ctx))
        labels = []
    return seq(out)


def encode_stmt(s: A.Stmt, ctx: EncodeContext) -> list:
    """WhyML statements for one Boogie statement (a list, in execution order)."""
    if isinstance(s, A.Assert):
        ctx.drop_attributes(s.attrs, "an assertion")
        return [W.Assert(term(s.expr, ctx), span=s.span)]
    if isinstance(s, A.Assume):
        ctx.drop_attributes(s.attrs, "an assumption")
        return [W.Assume(term(s.expr, ctx), span=s.span)]
    if isinstance(s, A.Assign):
        return encode_assign(s, ctx)
    if isinstance(s, A.Havoc):
        return encode_havoc(s, ctx)
    if isinstance(s, A.Call):
        return encode_call(s, ctx)
    if isinstance(s, A.If):
        guard = W.Any(W.TApp("bool"), span=s.guard.span) if isinstance(s.guard, A.Star) else prog(s.guard, ctx)
        then = encode_block(s.then, ctx)
        els = encode_block(s.else_, ctx) if s.else_ else W.UNIT
        return [W.Ite(guard, then, els, span=s.span)]
    if isinstance(s, A.While):
        return encode_loop(s, ctx, frozenset())
    if isinstance(s, A.Return):
        ctx.uses.add("Return")
        return [W.Raise("Return", span=s.span)]
    if isinstance(s, A.Break):
        if not ctx.loops:
            raise BreakOutsideLoop("break outside of a loop", s.span)
        if s.label is not None and s.label not in ctx.loops[-1]:
            raise Unsupported(f"break to label '{s.label}' that does not name the innermost loop", s.span)
        ctx.uses.add("Break")
        return [W.Raise("Break", span=s.span)]
    if isinstance(s, A.Label):
        return []
    if isinstance(s, A.Goto):
        raise Unsupported("goto statement survived desugaring", s.span)
    if isinstance(s, A.CallForall):
        raise Unsupported("call-forall statement survived desugaring", s.span)
    raise Unsupported(f"cannot translate statement {type(s).__name__}", s.span)


# ---------------------------------------------------------------- assignment


def _root(lhs: A.Expr) -> A.Ident:
    while isinstance(lhs, A.MapSelect):
        lhs = lhs.map
    return lhs


def _write(lhs: A.Expr, value: W.WNode, indices: dict, ctx: EncodeContext) -> W.WNode:
    """``lhs := value`` where map indices come pre-encoded from ``indices``."""
    root = _root(lhs)
    name = ctx.renamer.value(root.key)

    def rebuild(target, v):
        if isinstance(target, A.Ident):
            return v
        inner = target.map
        current = _read(inner, indices, ctx)
        return rebuild(inner, W.App("set", (current, indices[id(target)], v)))

    return W.Assign(name, rebuild(lhs, value), span=lhs.span)


def _read(e: A.Expr, indices: dict, ctx: EncodeContext) -> W.WNode:
    if isinstance(e, A.Ident):
        return W.Deref(ctx.renamer.value(e.key), span=e.span)
    return W.App("get", (_read(e.map, indices, ctx), indices[id(e)]))


def _index_value(sel: A.MapSelect, ctx: EncodeContext) -> W.WNode:
    xs = tuple(prog(i, ctx) for i in sel.indices)
    return xs[0] if len(xs) == 1 else W.Tuple(xs)


def _selects(lhs: A.Expr) -> list:
    out = []
    while isinstance(lhs, A.MapSelect):
        out.append(lhs)
        lhs = lhs.map
    return out


def encode_assign(s: A.Assign, ctx: EncodeContext) -> list:
    if len(s.lhs) == 1:
        lhs = s.lhs[0]
        indices = {id(sel): _index_value(sel, ctx) for sel in _selects(lhs)}
        return [_write(lhs, prog(s.rhs[0], ctx), indices, ctx)]
    # simultaneous: evaluate every source and index first, then write in order
    values = [prog(r, ctx) for r in s.rhs]
    index_values = [(sel, _index_value(sel, ctx)) for lhs in s.lhs for sel in reversed(_selects(lhs))]
    ctx.renamer.push(ctx.renamer.scope_owner[-1])
    try:
        binds = []
        temps = []
        for v in values:
            t = ctx.renamer.temp()
            binds.append((t, v))
            temps.append(W.Var(t))
        indices = {}
        for sel, v in index_values:
            t = ctx.renamer.temp()
            binds.append((t, v))
            indices[id(sel)] = W.Var(t)
        writes = [_write(lhs, tv, indices, ctx) for lhs, tv in zip(s.lhs, temps)]
    finally:
        ctx.renamer.pop()
    body: W.WNode = seq(writes)
    for name, v in reversed(binds):
        body = W.LetIn((name,), v, body, span=s.span)
    return [body]


# ---------------------------------------------------------------- havoc


def encode_havoc(s: A.Havoc, ctx: EncodeContext) -> list:
    ctx.uses.add("havoc")
    writes, assumes = [], []
    for v in s.vars:
        writes.append(W.Assign(ctx.renamer.value(v.key), W.App("havoc", (W.UNIT,)), span=v.span))
    for v in s.vars:
        w = ctx.env.where_of.get(v.key)
        if w is not None:
            assumes.append(W.Assume(term(w, ctx), span=w.span))
    return writes + assumes


# ---------------------------------------------------------------- calls


def encode_call(s: A.Call, ctx: EncodeContext) -> list:
    ctx.drop_attributes(s.attrs, "a call")
    if s.free:
        ctx.sink.warn(f"free call to '{s.name}' is translated as an ordinary call", s.span, "free-call")
    fn = ctx.renamer.value(procedure_key(s.name))
    args = tuple(prog(a, ctx) for a in s.args) or (W.UNIT,)
    app = W.App(fn, args, span=s.span)
    targets = [ctx.renamer.value(o.key) for o in s.outs]
    if not targets:
        return [app]
    if len(targets) == 1:
        return [W.Assign(targets[0], app, span=s.span)]
    ctx.renamer.push(ctx.renamer.scope_owner[-1])
    try:
        temps = [ctx.renamer.temp() for _ in targets]
    finally:
        ctx.renamer.pop()
    writes = [W.Assign(t, W.Var(v)) for t, v in zip(targets, temps)]
    return [W.LetIn(tuple(temps), app, seq(writes), span=s.span)]


# ---------------------------------------------------------------- loops


def encode_loop(s: A.While, ctx: EncodeContext, labels: frozenset) -> list:
    """Loop schema: free invariants assumed before, at the end of each iteration and on break."""
    for inv in s.invariants:
        ctx.drop_attributes(inv.attrs, "a loop invariant")
    free = [term(i.expr, ctx) for i in s.invariants if i.free]
    invariants = tuple(term(i.expr, ctx) for i in s.invariants)
    guard = W.Any(W.TApp("bool"), span=s.guard.span) if isinstance(s.guard, A.Star) else prog(s.guard, ctx)
    ctx.loops.append(labels)
    try:
        body = encode_block(s.body, ctx)
    finally:
        ctx.loops.pop()
    body_items = ([] if isinstance(body, W.Seq) and not body.items else [body]) + [W.Assume(f) for f in free]
    loop = W.While(guard, invariants, seq(body_items) if body_items else W.Seq(()), span=s.span)
    ctx.uses.add("Break")
    handler = seq([W.Assume(f) for f in free]) if free else W.UNIT
    return [W.Assume(f) for f in free] + [W.Try(loop, (W.Handler("Break", handler),), span=s.span)]
