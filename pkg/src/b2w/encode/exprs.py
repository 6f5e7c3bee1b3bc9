"""Boogie expressions to WhyML terms (specifications) and program expressions (code)."""

from __future__ import annotations

from ..boogie import ast as A
from ..diagnostics import Unsupported
from ..whyml import ast as W
from .context import BEGIN_LABEL, EncodeContext, type_var_names

TERM = "term"
PROG = "prog"

_REAL_OPS = {"+": "+.", "-": "-.", "*": "*.", "<": "<.", "<=": "<=.", ">": ">.", ">=": ">=."}
_REL = {"==": "=", "!=": "<>", "<": "<", "<=": "<=", ">": ">", ">=": ">=", "<:": "<:"}


def _is(t, name: str) -> bool:
    return isinstance(t, A.PrimType) and t.name == name


def needs_logic(e: A.Expr) -> bool:
    """True if ``e`` uses constructs only available in specifications."""
    for n in A.walk(e):
        if isinstance(n, (A.Quantifier, A.Old, A.Lambda)):
            return True
        if isinstance(n, A.Binary) and n.op == "<:":
            return True
        if isinstance(n, A.Chain) and "<:" in n.ops:
            return True
    return False


def term(e: A.Expr, ctx: EncodeContext) -> W.WNode:
    return encode_expr(e, ctx, TERM)


def prog(e: A.Expr, ctx: EncodeContext) -> W.WNode:
    return encode_expr(e, ctx, PROG)


def encode_expr(e: A.Expr, ctx: EncodeContext, mode: str = TERM) -> W.WNode:
    """Translate ``e``; in program mode spec-only constructs are wrapped in ``any``."""
    if mode == PROG and needs_logic(e):
        t = ctx.encode_type(e.ty, e.span)
        inner = _Expr(ctx, TERM).go(e)
        op = "<->" if _is(e.ty, "bool") else "="
        return W.Any(t, W.Infix(op, W.Var("result"), inner, span=e.span), span=e.span)
    return _Expr(ctx, mode).go(e)


def conj_term(es, ctx: EncodeContext):
    parts = [term(e, ctx) for e in es]
    if not parts:
        return None
    out = parts[0]
    for p in parts[1:]:
        out = W.Infix("/\\", out, p)
    return out


class _Expr:
    def __init__(self, ctx: EncodeContext, mode: str):
        self.ctx = ctx
        self.mode = mode

    @property
    def term(self) -> bool:
        return self.mode == TERM

    def go(self, e: A.Expr) -> W.WNode:
        self.ctx.need_type(e.ty)
        if not isinstance(e, A.Quantifier):
            self.ctx.generic_ok = False
        m = getattr(self, "e_" + type(e).__name__, None)
        if m is None:
            raise Unsupported(f"cannot translate expression {type(e).__name__}", e.span)
        return m(e)

    # literals and names

    def e_BoolLit(self, e):
        return W.Lit("true" if e.value else "false", span=e.span)

    def e_IntLit(self, e):
        return W.Lit(str(e.value), span=e.span)

    def e_RealLit(self, e):
        return W.Lit(real_literal(e.text), span=e.span)

    def e_Ident(self, e):
        name = self.ctx.renamer.value(e.key)
        if e.kind in self.ctx.refs:
            return W.Deref(name, span=e.span)
        return W.Var(name, span=e.span)

    def e_Star(self, e):
        return W.Any(W.TApp("bool"), span=e.span)

    # operators

    def e_Unary(self, e):
        x = self.go(e.operand)
        if e.op == "!":
            return W.Not(x, span=e.span)
        return W.Neg(x, real=_is(e.ty, "real"), span=e.span)

    def e_Binary(self, e):
        op = e.op
        if op == "<==":
            return self._binary("==>", e.right, e.left, e)
        return self._binary(op, e.left, e.right, e)

    def _binary(self, op, left, right, e):
        l, r = self.go(left), self.go(right)
        span = e.span
        real = _is(left.ty, "real")
        if op == "&&":
            return W.Infix("/\\" if self.term else "&&", l, r, span=span)
        if op == "||":
            return W.Infix("\\/" if self.term else "||", l, r, span=span)
        if op == "==>":
            if self.term:
                return W.Infix("->", l, r, span=span)
            return W.Infix("||", W.Not(l), r, span=span)
        if op == "<==>":
            return W.Infix("<->" if self.term else "=", l, r, span=span)
        if op in ("==", "!=") and self.term and _is(left.ty, "bool"):
            iff = W.Infix("<->", l, r, span=span)
            return iff if op == "==" else W.Not(iff, span=span)
        if op in _REL:
            sym = _REL[op]
            if real and sym in _REAL_OPS:
                sym = _REAL_OPS[sym]
            if op == "<:":
                self.ctx.uses.add("po")
            return W.Infix(sym, l, r, span=span)
        if op in ("+", "-", "*"):
            return W.Infix(_REAL_OPS[op] if real else op, l, r, span=span)
        if op == "/":
            return W.Infix("/.", l, r, span=span)
        if op in ("div", "mod"):
            return W.App(op, (l, r), span=span)
        if op == "**":
            return W.App("pow", (l, r), span=span)
        if op == "++":
            w1, w2 = left.ty.width, right.ty.width
            self._bv(e)
            self.ctx.bv.cats.add((w1, w2))
            return W.App(f"cat_{w1}_{w2}", (l, r), span=span)
        raise Unsupported(f"operator '{op}'", span)

    def e_Chain(self, e):
        operands = tuple(self.go(x) for x in e.operands)
        real = _is(e.operands[0].ty, "real")
        if self.term and _is(e.operands[0].ty, "bool"):
            # bool equalities do not chain; spell the conjunction out
            parts = [self._binary(op, a, b, e) for op, a, b in zip(e.ops, e.operands, e.operands[1:])]
            out = parts[0]
            for p in parts[1:]:
                out = W.Infix("/\\", out, p, span=e.span)
            return out
        ops = []
        for op in e.ops:
            sym = _REL[op]
            if real and sym in _REAL_OPS:
                sym = _REAL_OPS[sym]
            if op == "<:":
                self.ctx.uses.add("po")
            ops.append(sym)
        if not self.term:
            parts = [W.Infix(o, a, b, span=e.span) for o, a, b in zip(ops, operands, operands[1:])]
            out = parts[0]
            for p in parts[1:]:
                out = W.Infix("&&", out, p, span=e.span)
            return out
        return W.Chain(tuple(ops), operands, span=e.span)

    # maps and applications

    def _index(self, indices):
        xs = tuple(self.go(i) for i in indices)
        return xs[0] if len(xs) == 1 else W.Tuple(xs)

    def e_MapSelect(self, e):
        return W.App("get", (self.go(e.map), self._index(e.indices)), span=e.span)

    def e_MapUpdate(self, e):
        return W.App("set", (self.go(e.map), self._index(e.indices), self.go(e.value)), span=e.span)

    def e_FuncApp(self, e):
        name = self.ctx.renamer.value(function_key(e.name))
        if not e.args:
            return W.Var(name, span=e.span)
        return W.App(name, tuple(self.go(a) for a in e.args), span=e.span)

    def e_Cast(self, e):
        fn = "floor" if e.target == "int" else "from_int"
        self.ctx.need_type(A.REAL)
        return W.App(fn, (self.go(e.expr),), span=e.span)

    def e_Coercion(self, e):
        return self.go(e.expr)

    def e_IfThenElse(self, e):
        return W.Ite(self.go(e.cond), self.go(e.then), self.go(e.else_), span=e.span)

    def e_Old(self, e):
        x = self.go(e.expr)
        if self.ctx.old_mode == "old":
            return W.Old(x, span=e.span)
        if self.ctx.old_mode == "at":
            return W.At(x, BEGIN_LABEL, span=e.span)
        raise Unsupported("old() outside a postcondition or implementation body", e.span)

    # binders

    def e_Quantifier(self, e):
        ctx = self.ctx
        generic, ctx.generic_ok = ctx.generic_ok, False
        saved_tvars = ctx.tvars
        if e.tparams:
            if not generic or e.kind != "forall":
                raise Unsupported("type-generic quantifiers are only supported at the top of an axiom", e.span)
            ctx.tvars = {**ctx.tvars, **type_var_names(e.tparams)}
        ctx.renamer.push(ctx.renamer.scope_owner[-1] if ctx.renamer.scope_owner else "local")
        try:
            groups: list[tuple[list, W.WType, object]] = []
            for b in e.bound:
                name = ctx.renamer.local(b.key, b.name)
                t = ctx.encode_type(b.type, b.span)
                if groups and groups[-1][1] == t:
                    groups[-1][0].append(name)
                else:
                    groups.append(([name], t, b.span))
            binders = tuple(W.Binder(tuple(ns), t, span=sp) for ns, t, sp in groups)
            trigs = tuple(tuple(self.go(x) for x in t.exprs) for t in e.triggers)
            ctx.drop_attributes(e.attrs, "a quantifier")
            body = self.go(e.body)
        finally:
            ctx.renamer.pop()
            ctx.tvars = saved_tvars
        return W.Quant(e.kind, binders, trigs, body, span=e.span)

    def e_Lambda(self, e):
        raise Unsupported("lambda expression survived desugaring", e.span)

    # bit-vectors

    def _bv(self, e):
        if not self.ctx.options.bv_compat:
            raise Unsupported("bit-vector expressions are not supported (use --bv-compat)", e.span)

    def e_BvLit(self, e):
        self._bv(e)
        self.ctx.bv.widths.add(e.width)
        self.ctx.bv.literals.add(e.width)
        self.ctx.need_type(A.INT)
        return W.App(f"of_int_bv{e.width}", (W.Lit(str(e.value)),), span=e.span)

    def e_BvExtract(self, e):
        self._bv(e)
        w = e.base.ty.width
        self.ctx.bv.widths.update({w, e.hi - e.lo})
        self.ctx.bv.extracts.add((w, e.hi, e.lo))
        return W.App(f"extract_{w}_{e.hi}_{e.lo}", (self.go(e.base),), span=e.span)


def function_key(name: str) -> str:
    return f"function:{name}"


def procedure_key(name: str) -> str:
    return f"procedure:{name}"


def real_literal(text: str) -> str:
    """Boogie real literal as a WhyML literal that always carries a decimal point."""
    t = text.lower()
    mant, _, exp = t.partition("e")
    if "." not in mant:
        mant += ".0"
    elif mant.endswith("."):
        mant += "0"
    if mant.startswith("."):
        mant = "0" + mant
    return mant + ("e" + exp if exp else "")
