"""Abstract syntax of the emitted WhyML subset.

``span`` fields carry the Boogie source position a node was produced from;
they only feed diagnostics and take no part in equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from ..diagnostics import Span


def _span():
    return field(default=None, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class WNode:
    span: Optional[Span] = _span()


# ---------------------------------------------------------------- types


@dataclass(frozen=True)
class TVar(WNode):
    name: str  # without the tick


@dataclass(frozen=True)
class TApp(WNode):
    name: str
    args: tuple = ()


@dataclass(frozen=True)
class TTuple(WNode):
    items: tuple  # empty tuple is unit


WType = Union[TVar, TApp, TTuple]
UNIT_T = TTuple(())


# ---------------------------------------------------------------- expressions


@dataclass(frozen=True)
class Lit(WNode):
    text: str


@dataclass(frozen=True)
class Var(WNode):
    name: str


@dataclass(frozen=True)
class Deref(WNode):
    name: str  # name.contents


@dataclass(frozen=True)
class App(WNode):
    fn: str
    args: tuple


@dataclass(frozen=True)
class Infix(WNode):
    op: str
    left: "WExpr"
    right: "WExpr"


@dataclass(frozen=True)
class Chain(WNode):
    ops: tuple
    operands: tuple


@dataclass(frozen=True)
class Not(WNode):
    expr: "WExpr"


@dataclass(frozen=True)
class Neg(WNode):
    expr: "WExpr"
    real: bool = False


@dataclass(frozen=True)
class Binder(WNode):
    names: tuple
    type: WType


@dataclass(frozen=True)
class Quant(WNode):
    kind: str  # forall | exists
    binders: tuple  # of Binder
    triggers: tuple  # of tuple of WExpr
    body: "WExpr"


@dataclass(frozen=True)
class Ite(WNode):
    cond: "WExpr"
    then: "WExpr"
    else_: "WExpr"


@dataclass(frozen=True)
class Any(WNode):
    type: WType
    post: Optional["WExpr"] = None  # ensures clause over ``result``


@dataclass(frozen=True)
class Old(WNode):
    expr: "WExpr"


@dataclass(frozen=True)
class At(WNode):
    expr: "WExpr"
    label: str


@dataclass(frozen=True)
class Tuple(WNode):
    items: tuple  # empty tuple is ()


UNIT = Tuple(())


# program constructs


@dataclass(frozen=True)
class LetIn(WNode):
    names: tuple  # one name, or several for a tuple pattern
    value: "WExpr"
    body: "WExpr"


@dataclass(frozen=True)
class Assign(WNode):
    name: str
    value: "WExpr"


@dataclass(frozen=True)
class Seq(WNode):
    items: tuple


@dataclass(frozen=True)
class While(WNode):
    cond: "WExpr"
    invariants: tuple
    body: "WExpr"


@dataclass(frozen=True)
class Handler(WNode):
    exn: str
    body: "WExpr"


@dataclass(frozen=True)
class Try(WNode):
    body: "WExpr"
    handlers: tuple


@dataclass(frozen=True)
class Raise(WNode):
    exn: str


@dataclass(frozen=True)
class Assert(WNode):
    expr: "WExpr"


@dataclass(frozen=True)
class Assume(WNode):
    expr: "WExpr"


@dataclass(frozen=True)
class Labeled(WNode):
    label: str
    body: "WExpr"


WExpr = Union[
    Lit, Var, Deref, App, Infix, Chain, Not, Neg, Quant, Ite, Any, Old, At, Tuple,
    LetIn, Assign, Seq, While, Try, Raise, Assert, Assume, Labeled,
]


# ---------------------------------------------------------------- declarations


@dataclass(frozen=True)
class Param(WNode):
    name: str
    type: WType


@dataclass(frozen=True)
class Clause(WNode):
    kind: str  # requires ensures returns writes reads
    exprs: tuple
    pattern: tuple = ()  # result names bound by a returns clause


@dataclass(frozen=True)
class Use(WNode):
    path: str


@dataclass(frozen=True)
class TypeDecl(WNode):
    name: str
    params: tuple = ()
    definition: Optional[WType] = None


@dataclass(frozen=True)
class Constant(WNode):
    name: str
    type: WType
    value: Optional[WExpr] = None


@dataclass(frozen=True)
class Function(WNode):
    name: str
    params: tuple  # of Param
    result: Optional[WType]  # None for a predicate
    body: Optional[WExpr] = None


@dataclass(frozen=True)
class Axiom(WNode):
    name: str
    expr: WExpr


@dataclass(frozen=True)
class Exception_(WNode):
    name: str


@dataclass(frozen=True)
class ValGlobal(WNode):
    name: str
    type: WType  # printed as ``ref type``


@dataclass(frozen=True)
class Val(WNode):
    name: str
    params: tuple
    result: WType
    spec: tuple  # of Clause


@dataclass(frozen=True)
class LetDef(WNode):
    name: str
    params: tuple
    result: WType
    spec: tuple
    body: WExpr


WDecl = Union[TypeDecl, Constant, Function, Axiom, Exception_, ValGlobal, Val, LetDef]


@dataclass(frozen=True)
class Module(WNode):
    name: str
    imports: tuple  # of Use
    decls: tuple


# ---------------------------------------------------------------- traversal


def iter_children(n: WNode):
    from dataclasses import fields

    for f in fields(n):
        if not f.compare:
            continue
        v = getattr(n, f.name)
        yield from _nodes(v)


def _nodes(v):
    if isinstance(v, WNode):
        yield v
    elif isinstance(v, tuple):
        for x in v:
            yield from _nodes(x)


def walk(n: WNode):
    stack = [n]
    while stack:
        x = stack.pop()
        yield x
        stack.extend(reversed(list(iter_children(x))))
