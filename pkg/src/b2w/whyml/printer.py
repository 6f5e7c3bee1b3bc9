"""Deterministic text rendering of WhyML modules."""

from __future__ import annotations

from . import ast as W

INDENT = "  "

_PREC = {
    "->": 1, "<->": 1,
    "\\/": 2, "||": 2,
    "/\\": 3, "&&": 3,
    "=": 5, "<>": 5, "<": 5, "<=": 5, ">": 5, ">=": 5,
    "<.": 5, "<=.": 5, ">.": 5, ">=.": 5, "<:": 5,
    "+": 6, "-": 6, "+.": 6, "-.": 6,
    "*": 7, "*.": 7, "/.": 7,
}
_RIGHT = {"->", "<->", "\\/", "||", "/\\", "&&"}
_NONASSOC = {op for op, p in _PREC.items() if p == 5} | {"<->"}

_ATOM = 10
_APP = 9


# ---------------------------------------------------------------- types


def print_type(t: W.WType, nested: bool = False) -> str:
    if isinstance(t, W.TVar):
        return "'" + t.name
    if isinstance(t, W.TTuple):
        return "(" + ", ".join(print_type(x) for x in t.items) + ")"
    if not t.args:
        return t.name
    s = t.name + " " + " ".join(print_type(a, True) for a in t.args)
    return f"({s})" if nested else s


# ---------------------------------------------------------------- expressions


def _level(e) -> int:
    if isinstance(e, W.Lit) and e.text.startswith("-"):
        return 8
    if isinstance(e, (W.Lit, W.Var, W.Deref, W.Tuple)):
        return _ATOM
    if isinstance(e, (W.App, W.At, W.Old)):
        return _APP if getattr(e, "args", True) else _ATOM
    if isinstance(e, W.Any):
        return _APP if e.post is None else 0
    if isinstance(e, W.Neg):
        return 8
    if isinstance(e, W.Infix):
        return _PREC[e.op]
    if isinstance(e, W.Chain):
        return 5
    if isinstance(e, W.Not):
        return 4
    return 0


def _wrap(e, need: int, parent_infix: bool = False) -> str:
    s = print_expr(e)
    lvl = _level(e)
    applied = (isinstance(e, W.App) and e.args) or isinstance(e, (W.At, W.Old))
    if lvl < need or (parent_infix and applied):
        return f"({s})"
    return s


def _binders(bs) -> str:
    return ", ".join(f"{', '.join(b.names)}: {print_type(b.type)}" for b in bs)


def print_expr(e) -> str:
    """Single-line rendering; statement forms are rendered inline as well."""
    if isinstance(e, W.Lit):
        return e.text
    if isinstance(e, W.Var):
        return e.name
    if isinstance(e, W.Deref):
        return f"{e.name}.contents"
    if isinstance(e, W.Tuple):
        return "(" + ", ".join(print_expr(x) for x in e.items) + ")"
    if isinstance(e, W.App):
        if not e.args:
            return e.fn
        return e.fn + " " + " ".join(_wrap(a, _ATOM) for a in e.args)
    if isinstance(e, W.Infix):
        p = _PREC[e.op]
        if e.op in _NONASSOC:
            ln, rn = p + 1, p + 1
        elif e.op in _RIGHT:
            ln, rn = p + 1, p
        else:
            ln, rn = p, p + 1
        return f"{_wrap(e.left, ln, True)} {e.op} {_wrap(e.right, rn, True)}"
    if isinstance(e, W.Chain):
        parts = [_wrap(e.operands[0], 6, True)]
        for op, x in zip(e.ops, e.operands[1:]):
            parts.append(f"{op} {_wrap(x, 6, True)}")
        return " ".join(parts)
    if isinstance(e, W.Not):
        return "not " + _wrap(e.expr, 5, True)
    if isinstance(e, W.Neg):
        return ("-." if e.real else "-") + _wrap(e.expr, _APP)
    if isinstance(e, W.Quant):
        trig = ""
        if e.triggers:
            trig = " [" + " | ".join(", ".join(print_expr(t) for t in g) for g in e.triggers) + "]"
        return f"{e.kind} {_binders(e.binders)}{trig}. {print_expr(e.body)}"
    if isinstance(e, W.Ite):
        return f"if {print_expr(e.cond)} then {_wrap(e.then, 1)} else {_wrap(e.else_, 1)}"
    if isinstance(e, W.Any):
        s = "any " + print_type(e.type, True)
        if e.post is not None:
            s += " ensures { " + print_expr(e.post) + " }"
        return s
    if isinstance(e, W.Old):
        return "old " + _wrap(e.expr, _ATOM)
    if isinstance(e, W.At):
        return f"at {_wrap(e.expr, _ATOM)} '{e.label}"
    if isinstance(e, W.Assert):
        return "assert { " + print_expr(e.expr) + " }"
    if isinstance(e, W.Assume):
        return "assume { " + print_expr(e.expr) + " }"
    if isinstance(e, W.Raise):
        return "raise " + e.exn
    if isinstance(e, W.Assign):
        return f"{e.name}.contents <- {print_expr(e.value)}"
    return " ".join(line.strip() for line in _block(e, 0))


# ---------------------------------------------------------------- statements


def _is_unit(e) -> bool:
    return (isinstance(e, W.Seq) and not e.items) or e == W.UNIT


_BLOCKY = (W.Seq, W.LetIn, W.While, W.Try, W.Labeled)


def _is_blocky(e) -> bool:
    if isinstance(e, _BLOCKY):
        return True
    if isinstance(e, W.Ite):
        return any(_is_blocky(x) or isinstance(x, (W.Assign, W.Assert, W.Assume, W.Raise)) for x in (e.then, e.else_))
    return False


def _paren_block(e, ind: int) -> list[str]:
    pad = INDENT * ind
    return [pad + "("] + _block(e, ind + 1) + [pad + ")"]


def _block(e, ind: int) -> list[str]:
    pad = INDENT * ind
    if isinstance(e, W.Seq):
        if not e.items:
            return [pad + "()"]
        out: list[str] = []
        for i, x in enumerate(e.items):
            last = i == len(e.items) - 1
            lines = _paren_block(x, ind) if isinstance(x, W.LetIn) and not last else _block(x, ind)
            if not last:
                lines[-1] += ";"
            out.extend(lines)
        return out
    if isinstance(e, W.LetIn):
        pat = e.names[0] if len(e.names) == 1 else "(" + ", ".join(e.names) + ")"
        head = [f"{pad}let {pat} = {print_expr(e.value)} in"]
        return head + _block(e.body, ind)
    if isinstance(e, W.While):
        out = [f"{pad}while {print_expr(e.cond)} do"]
        out += [f"{pad}{INDENT}invariant {{ {print_expr(i)} }}" for i in e.invariants]
        empty = _is_unit(e.body) or (isinstance(e.body, W.Seq) and not e.body.items)
        out += [pad + INDENT + "()"] if empty else _block(e.body, ind + 1)
        out.append(pad + "done")
        return out
    if isinstance(e, W.Try):
        out = [pad + "try"] + _block(e.body, ind + 1) + [pad + "with"]
        for h in e.handlers:
            out.append(f"{pad}| {h.exn} -> {print_expr(h.body)}")
        out.append(pad + "end")
        return out
    if isinstance(e, W.Labeled):
        return [f"{pad}'{e.label}:"] + _block(e.body, ind)
    if isinstance(e, W.Ite) and _is_blocky(e):
        out = [f"{pad}if {print_expr(e.cond)} then"] + _paren_block(e.then, ind)
        if not (isinstance(e.else_, W.Tuple) and not e.else_.items):
            out += [pad + "else"] + _paren_block(e.else_, ind)
        return out
    return [pad + print_expr(e)]


# ---------------------------------------------------------------- declarations


def _params(ps) -> str:
    if not ps:
        return "()"
    return " ".join(f"({p.name}: {print_type(p.type)})" for p in ps)


def _clause(c: W.Clause) -> str:
    if c.kind in ("writes", "reads"):
        return f"{c.kind} {{ {', '.join(print_expr(x) for x in c.exprs)} }}"
    body = print_expr(c.exprs[0])
    if c.kind == "returns":
        pat = c.pattern[0] if len(c.pattern) == 1 else "(" + ", ".join(c.pattern) + ")"
        return f"returns {{ | {pat} -> {body} }}"
    return f"{c.kind} {{ {body} }}"


def print_decl(d) -> list[str]:
    if isinstance(d, W.TypeDecl):
        s = "type " + " ".join([d.name] + ["'" + p for p in d.params])
        if d.definition is not None:
            s += " = " + print_type(d.definition)
        return [s]
    if isinstance(d, W.Constant):
        s = f"constant {d.name}: {print_type(d.type)}"
        if d.value is not None:
            s += " = " + print_expr(d.value)
        return [s]
    if isinstance(d, W.Function):
        params = "".join(f" ({p.name}: {print_type(p.type)})" for p in d.params)
        if d.result is None:
            s = f"predicate {d.name}{params}"
        else:
            s = f"function {d.name}{params}: {print_type(d.result)}"
        if d.body is not None:
            s += " = " + print_expr(d.body)
        return [s]
    if isinstance(d, W.Axiom):
        return [f"axiom {d.name}: {print_expr(d.expr)}"]
    if isinstance(d, W.Exception_):
        return [f"exception {d.name}"]
    if isinstance(d, W.ValGlobal):
        return [f"val {d.name}: ref {print_type(d.type, True)}"]
    if isinstance(d, W.Val):
        return [f"val {d.name} {_params(d.params)}: {print_type(d.result)}"] + [INDENT + _clause(c) for c in d.spec]
    if isinstance(d, W.LetDef):
        out = [f"let {d.name} {_params(d.params)}: {print_type(d.result)}"]
        out += [INDENT + _clause(c) for c in d.spec]
        out.append("=(")
        out += _block(d.body, 1)
        out.append(")")
        return out
    raise TypeError(f"not a declaration: {d!r}")


def print_whyml(m: W.Module) -> str:
    parts = [f"module {m.name}", ""]
    if m.imports:
        parts += [f"use import {u.path}" for u in m.imports]
        parts.append("")
    for d in m.decls:
        parts += print_decl(d)
        parts.append("")
    parts.append("end")
    return "\n".join(parts) + "\n"
