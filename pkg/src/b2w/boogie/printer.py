"""Pretty-printer for Boogie ASTs; output re-parses to an equal tree."""

from __future__ import annotations

from . import ast as A

_LEVEL = {
    "<==>": 0,
    "==>": 1, "<==": 1,
    "&&": 2, "||": 2,
    "==": 3, "!=": 3, "<": 3, "<=": 3, ">": 3, ">=": 3, "<:": 3,
    "++": 4,
    "+": 5, "-": 5,
    "*": 6, "/": 6, "div": 6, "mod": 6,
    "**": 7,
}
_RIGHT_ASSOC = {"==>", "**", "<==>"}
_UNARY, _POSTFIX, _ATOM = 8, 10, 11


def level(e: A.Expr) -> int:
    if isinstance(e, A.Binary):
        return _LEVEL[e.op]
    if isinstance(e, A.Chain):
        return 3
    if isinstance(e, A.Unary):
        return _UNARY
    if isinstance(e, (A.MapSelect, A.MapUpdate, A.BvExtract)):
        return _POSTFIX
    return _ATOM


def print_type(t: A.BoogieType) -> str:
    if isinstance(t, A.PrimType):
        return t.name
    if isinstance(t, A.BvType):
        return f"bv{t.width}"
    if isinstance(t, A.TypeVar):
        return t.name
    if isinstance(t, A.CtorType):
        if not t.args:
            return t.name
        return " ".join([t.name] + [_type_arg(a) for a in t.args])
    if isinstance(t, A.MapType):
        tp = f"<{', '.join(t.tparams)}>" if t.tparams else ""
        dom = ", ".join(print_type(d) for d in t.domain)
        return f"{tp}[{dom}]{print_type(t.codomain)}"
    if isinstance(t, A.MetaVar):
        return f"?{t.id}"
    raise TypeError(f"not a type: {t!r}")


def _type_arg(t: A.BoogieType) -> str:
    s = print_type(t)
    if isinstance(t, A.MapType) or (isinstance(t, A.CtorType) and t.args):
        return f"({s})"
    return s


def print_attrs(attrs) -> str:
    return "".join(_attr(a) + " " for a in attrs)


def _attr(a: A.Attribute) -> str:
    args = ", ".join(f'"{x.value}"' if isinstance(x, A.StrLit) else print_expr(x) for x in a.args)
    return f"{{:{a.name}{' ' + args if args else ''}}}"


def _binding(b: A.Binding) -> str:
    s = f"{b.name}: {print_type(b.type)}" if b.name is not None else print_type(b.type)
    if b.where is not None:
        s += f" where {print_expr(b.where)}"
    return s


def _bindings(bs) -> str:
    return ", ".join(_binding(b) for b in bs)


def _paren_if(cond: bool, s: str) -> str:
    return f"({s})" if cond else s


def print_expr(e: A.Expr) -> str:
    if isinstance(e, A.BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, A.IntLit):
        return str(e.value) if e.value >= 0 else f"(-{-e.value})"
    if isinstance(e, A.RealLit):
        return e.text
    if isinstance(e, A.BvLit):
        return f"{e.value}bv{e.width}"
    if isinstance(e, A.Ident):
        return e.name
    if isinstance(e, A.Star):
        return "*"
    if isinstance(e, A.Unary):
        inner = print_expr(e.operand)
        return e.op + _paren_if(level(e.operand) < _UNARY, inner)
    if isinstance(e, A.Binary):
        p = _LEVEL[e.op]
        right_assoc = e.op in _RIGHT_ASSOC
        ll, rl = level(e.left), level(e.right)

        def needs(child_level, child, left_side):
            if child_level < p:
                return True
            if child_level > p:
                return False
            # same level: only the associative side may stay bare, and only for the same operator
            if p == 3:
                return True
            same = isinstance(child, A.Binary) and child.op == e.op
            return not same or (left_side == right_assoc)

        ls = _paren_if(needs(ll, e.left, True), print_expr(e.left))
        rs = _paren_if(needs(rl, e.right, False), print_expr(e.right))
        return f"{ls} {e.op} {rs}"
    if isinstance(e, A.Chain):
        parts = [_paren_if(level(o) <= 3, print_expr(o)) for o in e.operands]
        out = parts[0]
        for op, part in zip(e.ops, parts[1:]):
            out += f" {op} {part}"
        return out
    if isinstance(e, A.MapSelect):
        base = _paren_if(level(e.map) < _POSTFIX, print_expr(e.map))
        return f"{base}[{', '.join(print_expr(i) for i in e.indices)}]"
    if isinstance(e, A.MapUpdate):
        base = _paren_if(level(e.map) < _POSTFIX, print_expr(e.map))
        idx = ", ".join(print_expr(i) for i in e.indices)
        return f"{base}[{idx} := {print_expr(e.value)}]"
    if isinstance(e, A.BvExtract):
        base = _paren_if(level(e.base) < _POSTFIX, print_expr(e.base))
        return f"{base}[{e.hi}:{e.lo}]"
    if isinstance(e, A.FuncApp):
        return f"{e.name}({', '.join(print_expr(a) for a in e.args)})"
    if isinstance(e, A.Cast):
        return f"{e.target}({print_expr(e.expr)})"
    if isinstance(e, A.Old):
        return f"old({print_expr(e.expr)})"
    if isinstance(e, A.Coercion):
        inner = _paren_if(level(e.expr) < _POSTFIX, print_expr(e.expr))
        return f"({inner}: {print_type(e.type)})"
    if isinstance(e, A.IfThenElse):
        return f"(if {print_expr(e.cond)} then {print_expr(e.then)} else {print_expr(e.else_)})"
    if isinstance(e, (A.Quantifier, A.Lambda)):
        kind = e.kind if isinstance(e, A.Quantifier) else "lambda"
        tp = f"<{', '.join(e.tparams)}>" if e.tparams else ""
        head = f"{kind}{tp} {_bindings(e.bound)} ::"
        extras = print_attrs(e.attrs)
        if isinstance(e, A.Quantifier):
            extras += "".join(
                "{" + ", ".join(print_expr(x) for x in t.exprs) + "} " for t in e.triggers
            )
        return f"({head} {extras}{print_expr(e.body)})"
    raise TypeError(f"not an expression: {e!r}")


class _Writer:
    def __init__(self):
        self.lines: list[str] = []
        self.depth = 0

    def line(self, s: str) -> None:
        self.lines.append("  " * self.depth + s)


def _stmts(w: _Writer, stmts) -> None:
    for s in stmts:
        _stmt(w, s)


def _stmt(w: _Writer, s: A.Stmt) -> None:
    if isinstance(s, A.Assert):
        w.line(f"assert {print_attrs(s.attrs)}{print_expr(s.expr)};")
    elif isinstance(s, A.Assume):
        w.line(f"assume {print_attrs(s.attrs)}{print_expr(s.expr)};")
    elif isinstance(s, A.Assign):
        lhs = ", ".join(print_expr(x) for x in s.lhs)
        rhs = ", ".join(print_expr(x) for x in s.rhs)
        w.line(f"{lhs} := {rhs};")
    elif isinstance(s, A.Havoc):
        w.line(f"havoc {', '.join(v.name for v in s.vars)};")
    elif isinstance(s, A.Call):
        outs = ", ".join(o.name for o in s.outs)
        lhs = f"{outs} := " if outs else ""
        free = "free " if s.free else ""
        args = ", ".join(print_expr(a) for a in s.args)
        w.line(f"{free}call {print_attrs(s.attrs)}{lhs}{s.name}({args});")
    elif isinstance(s, A.CallForall):
        args = ", ".join("*" if a is None else print_expr(a) for a in s.args)
        w.line(f"call {print_attrs(s.attrs)}forall {s.name}({args});")
    elif isinstance(s, A.If):
        _if(w, s, "if")
    elif isinstance(s, A.While):
        w.line(f"while ({print_expr(s.guard)})")
        w.depth += 1
        for inv in s.invariants:
            free = "free " if inv.free else ""
            w.line(f"{free}invariant {print_attrs(inv.attrs)}{print_expr(inv.expr)};")
        w.depth -= 1
        w.line("{")
        w.depth += 1
        _stmts(w, s.body)
        w.depth -= 1
        w.line("}")
    elif isinstance(s, A.Break):
        w.line(f"break {s.label};" if s.label else "break;")
    elif isinstance(s, A.Return):
        w.line("return;")
    elif isinstance(s, A.Goto):
        w.line(f"goto {', '.join(s.labels)};")
    elif isinstance(s, A.Label):
        w.depth -= 1
        w.line(f"{s.name}:")
        w.depth += 1
    else:
        raise TypeError(f"not a statement: {s!r}")


def _if(w: _Writer, s: A.If, kw: str) -> None:
    w.line(f"{kw} ({print_expr(s.guard)}) {{")
    w.depth += 1
    _stmts(w, s.then)
    w.depth -= 1
    if s.else_ is None:
        w.line("}")
    else:
        w.line("} else {")
        w.depth += 1
        _stmts(w, s.else_)
        w.depth -= 1
        w.line("}")


def _signature(name, tparams, ins, outs) -> str:
    tp = f"<{', '.join(tparams)}>" if tparams else ""
    s = f"{name}{tp}({_bindings(ins)})"
    if outs:
        s += f" returns ({_bindings(outs)})"
    return s


def _body(w: _Writer, body: A.Body) -> None:
    w.line("{")
    w.depth += 1
    for b in body.locals:
        w.line(f"var {_binding(b)};")
    _stmts(w, body.stmts)
    w.depth -= 1
    w.line("}")


def print_decl(d: A.Decl) -> str:
    w = _Writer()
    if isinstance(d, A.TypeDecl):
        fin = "finite " if d.finite else ""
        params = "".join(" " + p for p in d.params)
        syn = f" = {print_type(d.synonym)}" if d.synonym is not None else ""
        w.line(f"type {print_attrs(d.attrs)}{fin}{d.name}{params}{syn};")
    elif isinstance(d, A.ConstDecl):
        uniq = "unique " if d.unique else ""
        s = f"const {print_attrs(d.attrs)}{uniq}{', '.join(d.names)}: {print_type(d.type)}"
        if d.parents is not None:
            kw = "<:" if d.legacy_order else "extends"
            ps = ", ".join(("unique " if p.unique else "") + p.name for p in d.parents)
            s += f" {kw}{' ' + ps if ps else ''}"
            if d.complete:
                s += " complete"
        w.line(s + ";")
    elif isinstance(d, A.VarDecl):
        w.line(f"var {print_attrs(d.attrs)}{_bindings(d.bindings)};")
    elif isinstance(d, A.FunctionDecl):
        tp = f"<{', '.join(d.tparams)}>" if d.tparams else ""
        head = f"function {print_attrs(d.attrs)}{d.name}{tp}({_bindings(d.params)}) returns ({_binding(d.result)})"
        if d.body is None:
            w.line(head + ";")
        else:
            w.line(head + " {")
            w.line("  " + print_expr(d.body))
            w.line("}")
    elif isinstance(d, A.AxiomDecl):
        w.line(f"axiom {print_attrs(d.attrs)}{print_expr(d.expr)};")
    elif isinstance(d, A.ProcedureDecl):
        sig = f"procedure {print_attrs(d.attrs)}{_signature(d.name, d.tparams, d.ins, d.outs)}"
        w.line(sig if d.body is not None else sig + ";")
        w.depth += 1
        for sp in d.specs:
            if isinstance(sp, A.Modifies):
                w.line(f"modifies {', '.join(v.name for v in sp.vars)};")
            else:
                kw = "requires" if isinstance(sp, A.Requires) else "ensures"
                free = "free " if sp.free else ""
                w.line(f"{free}{kw} {print_attrs(sp.attrs)}{print_expr(sp.expr)};")
        w.depth -= 1
        if d.body is not None:
            _body(w, d.body)
    elif isinstance(d, A.Implementation):
        w.line(f"implementation {print_attrs(d.attrs)}{_signature(d.name, d.tparams, d.ins, d.outs)}")
        _body(w, d.body)
    else:
        raise TypeError(f"not a declaration: {d!r}")
    return "\n".join(w.lines)


def print_boogie(p: A.Program) -> str:
    """Render a whole program, one declaration per paragraph."""
    return "".join(print_decl(d) + "\n\n" for d in p.decls).rstrip("\n") + "\n" if p.decls else ""
