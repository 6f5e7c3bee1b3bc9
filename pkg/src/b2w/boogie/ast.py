"""Abstract syntax of Boogie programs.

Nodes are frozen dataclasses. Source spans and the annotations filled in by the
typechecker (``ty``, ``kind``, ``inst``, ``targs``) are excluded from equality,
so two trees compare equal iff they are structurally identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from functools import lru_cache
from typing import Optional, Union

from ..diagnostics import Span


def _span():
    return field(default=None, compare=False, repr=False, kw_only=True)


def _note():
    return field(default=None, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class Node:
    span: Optional[Span] = _span()


# ---------------------------------------------------------------- types


@dataclass(frozen=True)
class BoogieType(Node):
    pass


@dataclass(frozen=True)
class PrimType(BoogieType):
    name: str  # int | real | bool


@dataclass(frozen=True)
class BvType(BoogieType):
    width: int


@dataclass(frozen=True)
class CtorType(BoogieType):
    """A named type: a type constructor application or a synonym reference."""

    name: str
    args: tuple = ()


@dataclass(frozen=True)
class MapType(BoogieType):
    tparams: tuple
    domain: tuple
    codomain: BoogieType


@dataclass(frozen=True)
class TypeVar(BoogieType):
    name: str


@dataclass(frozen=True)
class MetaVar(BoogieType):
    """Inference variable; never survives typechecking."""

    id: int


INT = PrimType("int")
REAL = PrimType("real")
BOOL = PrimType("bool")


# ---------------------------------------------------------------- attributes


@dataclass(frozen=True)
class StrLit(Node):
    value: str


@dataclass(frozen=True)
class Attribute(Node):
    name: str
    args: tuple = ()


@dataclass(frozen=True)
class Trigger(Node):
    exprs: tuple


# ---------------------------------------------------------------- expressions


@dataclass(frozen=True)
class Expr(Node):
    ty: Optional[BoogieType] = _note()


@dataclass(frozen=True)
class BoolLit(Expr):
    value: bool


@dataclass(frozen=True)
class IntLit(Expr):
    value: int


@dataclass(frozen=True)
class RealLit(Expr):
    text: str


@dataclass(frozen=True)
class BvLit(Expr):
    value: int
    width: int


@dataclass(frozen=True)
class Ident(Expr):
    name: str
    # global | const | local | in | out | bound  (set by the typechecker)
    kind: Optional[str] = _note()
    key: Optional[str] = _note()


@dataclass(frozen=True)
class Unary(Expr):
    op: str  # '!' | '-'
    operand: Expr


@dataclass(frozen=True)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Chain(Expr):
    """Chained relations such as ``0 <= k <= l < N``."""

    ops: tuple
    operands: tuple


@dataclass(frozen=True)
class MapSelect(Expr):
    map: Expr
    indices: tuple
    inst: Optional[MapType] = _note()


@dataclass(frozen=True)
class MapUpdate(Expr):
    map: Expr
    indices: tuple
    value: Expr
    inst: Optional[MapType] = _note()


@dataclass(frozen=True)
class BvExtract(Expr):
    base: Expr
    hi: int
    lo: int


@dataclass(frozen=True)
class FuncApp(Expr):
    name: str
    args: tuple
    targs: Optional[tuple] = _note()


@dataclass(frozen=True)
class Cast(Expr):
    target: str  # 'int' | 'real'
    expr: Expr


@dataclass(frozen=True)
class Old(Expr):
    expr: Expr


@dataclass(frozen=True)
class Binding(Node):
    name: Optional[str]
    type: BoogieType
    where: Optional[Expr] = None
    key: Optional[str] = _note()


@dataclass(frozen=True)
class Quantifier(Expr):
    kind: str  # forall | exists
    tparams: tuple
    bound: tuple
    triggers: tuple
    attrs: tuple
    body: Expr


@dataclass(frozen=True)
class Lambda(Expr):
    tparams: tuple
    bound: tuple
    attrs: tuple
    body: Expr


@dataclass(frozen=True)
class Star(Expr):
    """Nondeterministic Boolean choice ``*`` in guards."""


@dataclass(frozen=True)
class Coercion(Expr):
    expr: Expr
    type: BoogieType


@dataclass(frozen=True)
class IfThenElse(Expr):
    cond: Expr
    then: Expr
    else_: Expr


# ---------------------------------------------------------------- statements


@dataclass(frozen=True)
class Stmt(Node):
    pass


@dataclass(frozen=True)
class Assert(Stmt):
    expr: Expr
    attrs: tuple = ()


@dataclass(frozen=True)
class Assume(Stmt):
    expr: Expr
    attrs: tuple = ()


@dataclass(frozen=True)
class Assign(Stmt):
    lhs: tuple  # Ident or MapSelect chains rooted at an Ident
    rhs: tuple


@dataclass(frozen=True)
class Havoc(Stmt):
    vars: tuple  # of Ident


@dataclass(frozen=True)
class Call(Stmt):
    outs: tuple  # of Ident
    name: str
    args: tuple
    attrs: tuple = ()
    free: bool = False
    targs: Optional[tuple] = _note()


@dataclass(frozen=True)
class CallForall(Stmt):
    name: str
    args: tuple  # Expr, or None for a ``*`` wildcard
    attrs: tuple = ()


@dataclass(frozen=True)
class Invariant(Node):
    free: bool
    expr: Expr
    attrs: tuple = ()


@dataclass(frozen=True)
class If(Stmt):
    guard: Expr
    then: tuple
    else_: Optional[tuple] = None


@dataclass(frozen=True)
class While(Stmt):
    guard: Expr
    invariants: tuple
    body: tuple


@dataclass(frozen=True)
class Break(Stmt):
    label: Optional[str] = None


@dataclass(frozen=True)
class Return(Stmt):
    pass


@dataclass(frozen=True)
class Goto(Stmt):
    labels: tuple


@dataclass(frozen=True)
class Label(Stmt):
    name: str


# ---------------------------------------------------------------- declarations


@dataclass(frozen=True)
class Decl(Node):
    pass


@dataclass(frozen=True)
class TypeDecl(Decl):
    name: str
    params: tuple = ()
    synonym: Optional[BoogieType] = None
    finite: bool = False
    attrs: tuple = ()


@dataclass(frozen=True)
class Parent(Node):
    name: str
    unique: bool = False


@dataclass(frozen=True)
class ConstDecl(Decl):
    names: tuple
    type: BoogieType
    unique: bool = False
    parents: Optional[tuple] = None  # None: no order clause
    complete: bool = False
    attrs: tuple = ()
    legacy_order: bool = field(default=False, compare=False, kw_only=True)


@dataclass(frozen=True)
class VarDecl(Decl):
    bindings: tuple
    attrs: tuple = ()


@dataclass(frozen=True)
class FunctionDecl(Decl):
    name: str
    tparams: tuple
    params: tuple  # Binding, name may be None
    result: Binding
    body: Optional[Expr] = None
    attrs: tuple = ()


@dataclass(frozen=True)
class AxiomDecl(Decl):
    expr: Expr
    attrs: tuple = ()


@dataclass(frozen=True)
class Requires(Node):
    free: bool
    expr: Expr
    attrs: tuple = ()


@dataclass(frozen=True)
class Ensures(Node):
    free: bool
    expr: Expr
    attrs: tuple = ()


@dataclass(frozen=True)
class Modifies(Node):
    vars: tuple  # of Ident


@dataclass(frozen=True)
class Body(Node):
    locals: tuple  # of Binding
    stmts: tuple


@dataclass(frozen=True)
class ProcedureDecl(Decl):
    name: str
    tparams: tuple
    ins: tuple
    outs: tuple
    specs: tuple
    body: Optional[Body] = None
    attrs: tuple = ()

    @property
    def requires(self) -> list:
        return [s for s in self.specs if isinstance(s, Requires)]

    @property
    def ensures(self) -> list:
        return [s for s in self.specs if isinstance(s, Ensures)]

    @property
    def modifies(self) -> list:
        return [v for s in self.specs if isinstance(s, Modifies) for v in s.vars]


@dataclass(frozen=True)
class Implementation(Decl):
    name: str
    tparams: tuple
    ins: tuple
    outs: tuple
    body: Body
    attrs: tuple = ()


@dataclass(frozen=True)
class Program(Node):
    decls: tuple


AnyNode = Union[Node, tuple, None]


# ---------------------------------------------------------------- traversal


@lru_cache(maxsize=None)
def child_fields(cls) -> tuple:
    return tuple(f.name for f in fields(cls) if f.compare)


def children(node: Node):
    """Yield the direct child nodes of ``node`` in field order."""
    for name in child_fields(type(node)):
        yield from _nodes_in(getattr(node, name))


def _nodes_in(value):
    if isinstance(value, Node):
        yield value
    elif isinstance(value, tuple):
        for v in value:
            yield from _nodes_in(v)


def walk(node: Node):
    """Pre-order traversal over ``node`` and all its descendants."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(list(children(n))))


def map_children(node: Node, fn):
    """Rebuild ``node`` with ``fn`` applied to every direct child node."""
    changes = {}
    for name in child_fields(type(node)):
        old = getattr(node, name)
        new = _map_value(old, fn)
        if new is not old:
            changes[name] = new
    if not changes:
        return node
    return _replace(node, changes)


def _map_value(value, fn):
    if isinstance(value, Node):
        return fn(value)
    if isinstance(value, tuple):
        out = tuple(_map_value(v, fn) for v in value)
        if all(a is b for a, b in zip(out, value)):
            return value
        return out
    return value


def _replace(node, changes):
    kwargs = {f.name: getattr(node, f.name) for f in fields(node)}
    kwargs.update(changes)
    return type(node)(**kwargs)


def replace(node, **changes):
    return _replace(node, changes)


def strip_spans(node):
    """Structural copy with every span and annotation reset (debug helper)."""
    def go(n):
        n = map_children(n, go)
        blank = {f.name: None for f in fields(n) if not f.compare and f.name != "legacy_order"}
        return _replace(n, blank) if blank else n
    return go(node)
