"""Structural well-formedness checks on a WhyML module before printing."""

from __future__ import annotations

import re

from ..diagnostics import ERROR, Diagnostic
from . import ast as W

BUILTIN_VALUES = frozenset({"get", "set", "div", "mod", "pow", "from_int", "floor", "ref", "true", "false"})
BUILTIN_TYPES = frozenset({"int", "real", "bool", "map", "ref"})

_LOWER = re.compile(r"[a-z_][A-Za-z0-9_']*\Z")
_UPPER = re.compile(r"[A-Z][A-Za-z0-9_']*\Z")
_OPERATOR = re.compile(r"\([^\sA-Za-z0-9_()]+\)\Z")


def _where(span) -> str:
    return str(span) if span is not None else "<generated>"


class _Validator:
    def __init__(self) -> None:
        self.diags: list[Diagnostic] = []
        self.values: dict[str, object] = {}
        self.types: dict[str, object] = {}
        self.exceptions: dict[str, object] = {}
        self.props: dict[str, object] = {}

    def error(self, msg: str, span) -> None:
        self.diags.append(Diagnostic(ERROR, msg, span, "whyml"))

    # ------------------------------------------------------------ names

    def charset(self, name: str, span, upper: bool = False, what: str = "value") -> None:
        if _OPERATOR.match(name):
            return
        ok = _UPPER.match(name) if upper else _LOWER.match(name)
        if not ok:
            need = "an uppercase" if upper else "a lowercase"
            self.error(f"{what} name '{name}' is not a legal identifier ({need} initial is required)", span)

    def declare(self, table: dict, name: str, span, what: str) -> None:
        if name in table:
            self.error(f"{what} '{name}' declared twice (at {_where(span)}; first at {_where(table[name])})", span)
        table[name] = span

    def use_value(self, name: str, span, scopes) -> None:
        if name in BUILTIN_VALUES or name in self.values:
            return
        if any(name in s for s in scopes):
            return
        self.error(f"'{name}' is used before it is declared", span)

    def use_type(self, name: str, span) -> None:
        if name not in BUILTIN_TYPES and name not in self.types:
            self.error(f"type '{name}' is used before it is declared", span)

    def bind(self, name: str, span, scopes) -> None:
        self.charset(name, span)
        prev = self.values.get(name, _MISSING)
        if prev is _MISSING:
            for s in reversed(scopes):
                if name in s:
                    prev = s[name]
                    break
        if prev is not _MISSING:
            self.error(f"'{name}' at {_where(span)} shadows the declaration at {_where(prev)}", span)
        scopes[-1][name] = span

    # ------------------------------------------------------------ traversal

    def typ(self, t, tvars=None) -> None:
        if isinstance(t, W.TApp):
            self.use_type(t.name, t.span)
            for a in t.args:
                self.typ(a)
        elif isinstance(t, W.TTuple):
            for a in t.items:
                self.typ(a)

    def expr(self, e, scopes, labels) -> None:
        if e is None:
            return
        if isinstance(e, W.Var):
            self.use_value(e.name, e.span, scopes)
        elif isinstance(e, W.Deref):
            self.use_value(e.name, e.span, scopes)
        elif isinstance(e, W.App):
            self.use_value(e.fn, e.span, scopes)
            for a in e.args:
                self.expr(a, scopes, labels)
        elif isinstance(e, W.Infix):
            if e.op == "<:":
                self.use_value("(<:)", e.span, scopes)
            self.expr(e.left, scopes, labels)
            self.expr(e.right, scopes, labels)
        elif isinstance(e, W.Chain):
            if "<:" in e.ops:
                self.use_value("(<:)", e.span, scopes)
            for x in e.operands:
                self.expr(x, scopes, labels)
        elif isinstance(e, W.Quant):
            scopes.append({})
            for b in e.binders:
                self.typ(b.type)
                for n in b.names:
                    self.bind(n, b.span or e.span, scopes)
            for group in e.triggers:
                for t in group:
                    self.expr(t, scopes, labels)
            self.expr(e.body, scopes, labels)
            scopes.pop()
        elif isinstance(e, W.Any):
            self.typ(e.type)
            if e.post is not None:
                scopes.append({"result": e.span})
                self.expr(e.post, scopes, labels)
                scopes.pop()
        elif isinstance(e, W.At):
            if e.label not in labels:
                self.error(f"label '{e.label}' is not declared", e.span)
            self.expr(e.expr, scopes, labels)
        elif isinstance(e, W.LetIn):
            self.expr(e.value, scopes, labels)
            scopes.append({})
            for n in e.names:
                self.bind(n, e.span, scopes)
            self.expr(e.body, scopes, labels)
            scopes.pop()
        elif isinstance(e, W.Assign):
            self.use_value(e.name, e.span, scopes)
            self.expr(e.value, scopes, labels)
        elif isinstance(e, W.Raise):
            if e.exn not in self.exceptions:
                self.error(f"exception '{e.exn}' is not declared", e.span)
        elif isinstance(e, W.Try):
            self.expr(e.body, scopes, labels)
            for h in e.handlers:
                if h.exn not in self.exceptions:
                    self.error(f"exception '{h.exn}' is not declared", h.span or e.span)
                self.expr(h.body, scopes, labels)
        elif isinstance(e, W.Labeled):
            self.expr(e.body, scopes, labels | {e.label})
        else:
            for c in W.iter_children(e):
                self.expr(c, scopes, labels)

    def params(self, ps, scopes) -> None:
        for p in ps:
            self.typ(p.type)
            self.bind(p.name, p.span, scopes)

    def clauses(self, spec, scopes, labels) -> None:
        for c in spec:
            if c.kind == "returns" and c.pattern:
                scopes.append({})
                for n in c.pattern:
                    self.bind(n, c.span, scopes)
                self.expr(c.exprs[0], scopes, labels)
                scopes.pop()
            else:
                for x in c.exprs:
                    self.expr(x, scopes, labels)

    def decl(self, d) -> None:
        if isinstance(d, W.TypeDecl):
            self.charset(d.name, d.span, what="type")
            if d.definition is not None:
                self.typ(d.definition)
            self.declare(self.types, d.name, d.span, "type")
            return
        if isinstance(d, W.Exception_):
            self.charset(d.name, d.span, upper=True, what="exception")
            self.declare(self.exceptions, d.name, d.span, "exception")
            return
        if isinstance(d, W.Axiom):
            self.declare(self.props, d.name, d.span, "axiom")
            self.expr(d.expr, [{}], frozenset())
            return
        if isinstance(d, (W.Constant, W.ValGlobal)):
            self.typ(d.type)
        elif isinstance(d, W.Function):
            scopes = [{}]
            self.params(d.params, scopes)
            if d.result is not None:
                self.typ(d.result)
            self.expr(d.body, scopes, frozenset())
        elif isinstance(d, W.Val):
            scopes = [{}]
            self.params(d.params, scopes)
            self.typ(d.result)
            self.clauses(d.spec, scopes, frozenset())
        elif isinstance(d, W.LetDef):
            scopes = [{}]
            self.params(d.params, scopes)
            self.typ(d.result)
            self.clauses(d.spec, scopes, frozenset())
            self.expr(d.body, scopes, frozenset())
        else:
            self.error(f"unexpected declaration {type(d).__name__}", getattr(d, "span", None))
            return
        self.charset(d.name, d.span)
        self.declare(self.values, d.name, d.span, "value")


_MISSING = object()


def validate_output(m: W.Module) -> list[Diagnostic]:
    """Return every structural problem found in ``m``; an empty list means well-formed."""
    v = _Validator()
    if not _UPPER.match(m.name):
        v.error(f"module name '{m.name}' must start with an uppercase letter", m.span)
    for d in m.decls:
        v.decl(d)
    return v.diags
