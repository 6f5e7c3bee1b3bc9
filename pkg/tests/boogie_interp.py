"""A tiny concrete interpreter for Boolean-state Boogie bodies.

Used as an oracle: the set of outcomes (final states, or an assertion
failure) reachable from each initial state must be the same before and
after control-flow structuring.  The state space is finite, so both
interpreters explore it exhaustively instead of bounding path length.
"""

from __future__ import annotations

from itertools import product

from b2w.boogie import ast as A

ERR = "assertion-failure"


def evaluate(e: A.Expr, st: dict):
    if isinstance(e, A.BoolLit):
        return e.value
    if isinstance(e, A.Ident):
        return st[e.name]
    if isinstance(e, A.Unary) and e.op == "!":
        return not evaluate(e.operand, st)
    if isinstance(e, A.Binary):
        a, b = evaluate(e.left, st), evaluate(e.right, st)
        return {
            "&&": lambda: a and b, "||": lambda: a or b, "==>": lambda: (not a) or b,
            "<==>": lambda: a == b, "==": lambda: a == b, "!=": lambda: a != b,
        }[e.op]()
    raise NotImplementedError(type(e).__name__)


def _freeze(st: dict) -> tuple:
    return tuple(sorted(st.items()))


def _step(s: A.Stmt, st: dict):
    """Successor states of a simple statement, or ERR."""
    if isinstance(s, A.Assign):
        new = dict(st)
        vals = [evaluate(r, st) for r in s.rhs]
        for l, v in zip(s.lhs, vals):
            new[l.name] = v
        return [new]
    if isinstance(s, A.Havoc):
        outs = []
        for bits in product((False, True), repeat=len(s.vars)):
            new = dict(st)
            new.update({v.name: b for v, b in zip(s.vars, bits)})
            outs.append(new)
        return outs
    if isinstance(s, A.Assume):
        return [st] if evaluate(s.expr, st) else []
    if isinstance(s, A.Assert):
        return [st] if evaluate(s.expr, st) else ERR
    raise NotImplementedError(type(s).__name__)


def run_unstructured(stmts, st: dict) -> set:
    """Outcomes of a flat statement list with labels and gotos."""
    stmts = list(stmts)
    labels = {s.name: i for i, s in enumerate(stmts) if isinstance(s, A.Label)}
    out, seen, todo = set(), set(), [(0, st)]
    while todo:
        pc, cur = todo.pop()
        key = (pc, _freeze(cur))
        if key in seen:
            continue
        seen.add(key)
        if pc >= len(stmts) or isinstance(stmts[pc], A.Return):
            out.add(_freeze(cur))
            continue
        s = stmts[pc]
        if isinstance(s, A.Label):
            todo.append((pc + 1, cur))
        elif isinstance(s, A.Goto):
            todo += [(labels[l], cur) for l in s.labels]
        else:
            nxt = _step(s, cur)
            if nxt == ERR:
                out.add(ERR)
            else:
                todo += [(pc + 1, n) for n in nxt]
    return out


def _guard(g, st) -> list:
    return [True, False] if isinstance(g, A.Star) else [bool(evaluate(g, st))]


def _exec(stmts, st: dict) -> set:
    """Results ('ok'|'brk'|'ret', frozen state) or ERR for a structured list."""
    current = {_freeze(st)}
    results: set = set()
    for s in stmts:
        nxt = set()
        for fr in current:
            for r in _exec_one(s, dict(fr)):
                if r == ERR or r[0] != "ok":
                    results.add(r)
                else:
                    nxt.add(r[1])
        current = nxt
    return results | {("ok", fr) for fr in current}


def _exec_one(s, st: dict) -> set:
    if isinstance(s, A.Label):
        return {("ok", _freeze(st))}
    if isinstance(s, A.Return):
        return {("ret", _freeze(st))}
    if isinstance(s, A.Break):
        return {("brk", _freeze(st))}
    if isinstance(s, A.If):
        out = set()
        for g in _guard(s.guard, st):
            out |= _exec(s.then if g else (s.else_ or ()), st)
        return out
    if isinstance(s, A.While):
        out, seen, todo = set(), set(), [_freeze(st)]
        while todo:
            fr = todo.pop()
            if fr in seen:
                continue
            seen.add(fr)
            cur = dict(fr)
            ok = True
            for inv in s.invariants:
                if not evaluate(inv.expr, cur):
                    ok = False
                    if not inv.free:
                        out.add(ERR)
                    break
            if not ok:
                continue
            for g in _guard(s.guard, cur):
                if not g:
                    out.add(("ok", fr))
                    continue
                for r in _exec(s.body, cur):
                    if r == ERR or r[0] == "ret":
                        out.add(r)
                    elif r[0] == "brk":
                        out.add(("ok", r[1]))
                    else:
                        todo.append(r[1])
        return out
    nxt = _step(s, st)
    if nxt == ERR:
        return {ERR}
    return {("ok", _freeze(n)) for n in nxt}


def run_structured(stmts, st: dict) -> set:
    return {r if r == ERR else r[1] for r in _exec(stmts, st)}


def initial_states(names) -> list[dict]:
    return [dict(zip(names, bits)) for bits in product((False, True), repeat=len(names))]
