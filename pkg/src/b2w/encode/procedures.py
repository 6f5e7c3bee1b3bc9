"""Procedure declarations and implementations.

A declaration yields a ``val`` carrying the client-side contract; each
implementation yields a ``let`` that checks the body against the
implementation-side contract, plus an optional frame-check ``let``.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..boogie import ast as A
from ..whyml import ast as W
from .context import BEGIN_LABEL, EncodeContext, result_type
from .exprs import conj_term, procedure_key, term
from .stmts import TRUE, encode_block, seq


@dataclass(frozen=True)
class ImplSource:
    """One implementation body with its formals, as found in the program."""

    index: int
    ins: tuple
    outs: tuple
    body: A.Body
    span: object = None


def _clauses_for(pattern: tuple, expr) -> list:
    if expr is None:
        return []
    if pattern:
        return [W.Clause("returns", (expr,), pattern, span=getattr(expr, "span", None))]
    return [W.Clause("ensures", (expr,), span=getattr(expr, "span", None))]


def _formals(d: A.ProcedureDecl, ctx: EncodeContext, bindings, names) -> list[W.Param]:
    out = []
    for b, n in zip(bindings, names):
        out.append(W.Param(ctx.renamer.local(b.key, n), ctx.encode_type(b.type, b.span), span=b.span))
    return out


def _spec_attrs(d: A.ProcedureDecl, ctx: EncodeContext) -> None:
    for s in d.specs:
        if isinstance(s, (A.Requires, A.Ensures)):
            ctx.drop_attributes(s.attrs, f"a specification clause of '{d.name}'")


def _split(d: A.ProcedureDecl):
    R = [s.expr for s in d.requires if not s.free]
    fR = [s.expr for s in d.requires if s.free]
    E = [s.expr for s in d.ensures if not s.free]
    fE = [s.expr for s in d.ensures if s.free]
    return R, fR, E, fE


def encode_val(d: A.ProcedureDecl, ctx: EncodeContext) -> W.Val:
    sig = ctx.env.procedures[d.name]
    _spec_attrs(d, ctx)
    saved = ctx.enter(d.name, {"global"}, "old", d.tparams, owner=f"{d.name}#val")
    try:
        params = _formals(d, ctx, d.ins, sig.in_names)
        out_names = tuple(ctx.renamer.local(b.key, n) for b, n in zip(d.outs, sig.out_names))
        rtype = result_type([ctx.encode_type(b.type, b.span) for b in d.outs])
        R, _fR, E, fE = _split(d)
        spec: list = []
        pre = conj_term(R, ctx)
        if pre is not None:
            spec.append(W.Clause("requires", (pre,)))
        mods = [ctx.renamer.value(v.key) for v in d.modifies]
        if mods:
            spec.append(W.Clause("writes", tuple(W.Var(m) for m in mods)))
        spec += _clauses_for(out_names, conj_term(E, ctx))
        spec += _clauses_for(out_names, conj_term(fE, ctx))
        wu = [ctx.env.where_of[b.key] for b in d.outs if b.key in ctx.env.where_of]
        spec += _clauses_for(out_names, conj_term(wu, ctx))
    finally:
        ctx.leave(saved)
    return W.Val(ctx.renamer.value(procedure_key(d.name)), tuple(params), rtype, tuple(spec), span=d.span)


def _impl_spec(d, ctx) -> tuple:
    R, fR, E, _fE = _split(d)
    spec: list = []
    for group in (R, fR):
        pre = conj_term(group, ctx)
        if pre is not None:
            spec.append(W.Clause("requires", (pre,)))
    return spec, conj_term(E, ctx)


def encode_implementation(d: A.ProcedureDecl, impl: ImplSource, ctx: EncodeContext, name: str,
                          frame: bool = False) -> W.LetDef:
    """``let`` checking one implementation; with ``frame`` set, the frame-check variant."""
    sig = ctx.env.procedures[d.name]
    env = ctx.env
    saved = ctx.enter(d.name, {"global", "local", "out"}, "at", d.tparams, owner=f"{d.name}#impl{impl.index}")
    try:
        params = _formals(d, ctx, impl.ins, sig.in_names)
        out_names = tuple(ctx.renamer.local(b.key, n) for b, n in zip(impl.outs, sig.out_names))
        local_names = tuple(ctx.renamer.local(b.key, b.name) for b in impl.body.locals)
        rtype = result_type([ctx.encode_type(b.type, b.span) for b in impl.outs])

        ctx.refs = frozenset({"global"})
        ctx.old_mode = "old"
        spec, post = _impl_spec(d, ctx)
        globals_ = [b for decl in env.program.decls if isinstance(decl, A.VarDecl) for b in decl.bindings]
        if frame:
            spec.append(W.Clause("writes", tuple(W.Var(ctx.renamer.value(v.key)) for v in d.modifies)))
            spec.append(W.Clause("reads", tuple(W.Var(ctx.renamer.value(g.key)) for g in globals_)))
            post = TRUE
        spec += _clauses_for(out_names, post)
        ctx.refs = frozenset({"global", "local", "out"})
        ctx.old_mode = "at"

        entry: list = []
        for group in (globals_, impl.ins, impl.body.locals, impl.outs):
            for b in group:
                w = env.where_of.get(b.key)
                if w is not None:
                    entry.append(W.Assume(term(w, ctx), span=w.span))
        ctx.uses.add("Return")
        body = encode_block(impl.body.stmts, ctx)
        tail: list = [W.Try(body, (W.Handler("Return", W.Assume(TRUE)),), span=impl.span)]
        if frame:
            for v in d.modifies:
                n = ctx.renamer.value(v.key)
                tail.append(W.Assign(n, W.Deref(n)))
            ctx.uses.add("yes")
            for g in globals_:
                tail.append(W.Assume(W.App("yes", (W.Deref(ctx.renamer.value(g.key)),))))
        if out_names:
            derefs = tuple(W.Deref(n) for n in out_names)
            tail.append(derefs[0] if len(derefs) == 1 else W.Tuple(derefs))
        inner: W.WNode = W.Labeled(BEGIN_LABEL, seq(entry + tail))
        for n, b in reversed(list(zip(out_names + local_names, impl.outs + impl.body.locals))):
            t = ctx.encode_type(b.type, b.span)
            inner = W.LetIn((n,), W.App("ref", (W.Any(t),)), inner, span=b.span)
    finally:
        ctx.leave(saved)
    return W.LetDef(name, tuple(params), rtype, tuple(spec), inner, span=impl.span)


def encode_procedure(d: A.ProcedureDecl, impls: list, ctx: EncodeContext, impl_names: dict) -> list:
    """The ``val`` for ``d`` followed by one ``let`` per implementation (and frame checks)."""
    out: list = [encode_val(d, ctx)]
    out += encode_implementations(d, impls, ctx, impl_names)
    return out


def encode_implementations(d: A.ProcedureDecl, impls: list, ctx: EncodeContext, impl_names: dict) -> list:
    out = []
    for impl in impls:
        out.append(encode_implementation(d, impl, ctx, impl_names[(d.name, impl.index)]))
        frame = encode_frame_check(d, impl, ctx, impl_names)
        if frame is not None:
            out.append(frame)
    return out


def encode_frame_check(d: A.ProcedureDecl, impl: ImplSource, ctx: EncodeContext, impl_names: dict):
    if not ctx.options.frame_checks or not d.modifies:
        return None
    return encode_implementation(d, impl, ctx, impl_names[(d.name, impl.index, "frame")], frame=True)
