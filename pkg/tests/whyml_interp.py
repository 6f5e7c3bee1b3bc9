"""Concrete evaluation of the straight-line WhyML that implementations compile to.

Covers integers, maps (get/set), references and let bindings: enough to
run an implementation whose body is a sequence of assignments.  Inputs,
initial values of uninitialized locals and globals all come from ``init``.
"""

from __future__ import annotations

from b2w.whyml import ast as W


class Cell:
    def __init__(self, value):
        self.value = value


class _Return(Exception):
    pass


_ARITH = {"+": lambda a, b: a + b, "-": lambda a, b: a - b, "*": lambda a, b: a * b}


class Interp:
    def __init__(self, init: dict, globals_: dict):
        self.init = init
        self.cells = {k: Cell(v) for k, v in globals_.items()}

    def run_impl(self, d: W.LetDef):
        env = {p.name: self.init[p.name] for p in d.params}
        return self.ev(d.body, env)

    def ev(self, e, env: dict):
        if isinstance(e, W.Lit):
            return int(e.text)
        if isinstance(e, W.Var):
            return env[e.name]
        if isinstance(e, W.Deref):
            return (env.get(e.name) or self.cells[e.name]).value
        if isinstance(e, W.Neg):
            return -self.ev(e.expr, env)
        if isinstance(e, W.Infix) and e.op in _ARITH:
            return _ARITH[e.op](self.ev(e.left, env), self.ev(e.right, env))
        if isinstance(e, W.App) and e.fn == "get":
            m, k = (self.ev(a, env) for a in e.args)
            return m.get(k, 0)
        if isinstance(e, W.App) and e.fn == "set":
            m, k, v = (self.ev(a, env) for a in e.args)
            return {**m, k: v}
        if isinstance(e, W.Tuple):
            vals = tuple(self.ev(x, env) for x in e.items)
            return vals if vals else None
        if isinstance(e, W.LetIn):
            if isinstance(e.value, W.App) and e.value.fn == "ref":
                (name,) = e.names
                val = self.init[name] if isinstance(e.value.args[0], W.Any) else self.ev(e.value.args[0], env)
                return self.ev(e.body, {**env, name: Cell(val)})
            val = self.ev(e.value, env)
            if len(e.names) == 1:
                return self.ev(e.body, {**env, e.names[0]: val})
            return self.ev(e.body, {**env, **dict(zip(e.names, val))})
        if isinstance(e, W.Seq):
            out = None
            for x in e.items:
                out = self.ev(x, env)
            return out
        if isinstance(e, W.Assign):
            (env.get(e.name) or self.cells[e.name]).value = self.ev(e.value, env)
            return None
        if isinstance(e, W.Labeled):
            return self.ev(e.body, env)
        if isinstance(e, W.Assume):
            return None
        if isinstance(e, W.Raise) and e.exn == "Return":
            raise _Return
        if isinstance(e, W.Try):
            try:
                return self.ev(e.body, env)
            except _Return:
                return None
        raise NotImplementedError(type(e).__name__)
