"""Name resolution and type inference for Boogie programs.

The checker returns a :class:`TypeEnv` holding an annotated copy of the
program: every expression carries its type in ``ty``, identifiers carry their
binding ``kind`` and item ``key``, and polymorphic sites record their
instantiation (``inst`` on map accesses, ``targs`` on applications and calls).

Item keys name every variable-like declaration stably across passes::

    g                global variable or constant
    p.x              formal ``x`` of procedure or function ``p``
    p#impl0.l        local ``l`` of the first implementation of ``p``
    owner/x#3        bound variable ``x``, fourth binder inside ``owner``
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from ..boogie import ast as A
from ..boogie.ast import BOOL, INT, REAL
from ..diagnostics import BoogieTypeError, Span, UnresolvedName
from .types import Unifier, UnifyError, free_tvars, instantiate, render, subst


@dataclass(frozen=True)
class TypeInfo:
    name: str
    params: tuple
    synonym: Optional[A.BoogieType]  # resolved right-hand side, params as TypeVars
    span: Optional[Span] = None


@dataclass(frozen=True)
class FuncSig:
    name: str
    tparams: tuple
    param_names: tuple
    params: tuple
    result: A.BoogieType


@dataclass(frozen=True)
class ProcSig:
    name: str
    tparams: tuple
    in_names: tuple
    ins: tuple
    out_names: tuple
    outs: tuple
    modifies: tuple


@dataclass(frozen=True)
class Item:
    key: str
    name: str
    kind: str  # const global in out local bound param
    type: A.BoogieType  # resolved
    decl_type: A.BoogieType  # as written
    owner: str
    span: Optional[Span] = None


@dataclass
class TypeEnv:
    program: A.Program
    types: dict = field(default_factory=dict)
    globals: dict = field(default_factory=dict)
    consts: dict = field(default_factory=dict)
    functions: dict = field(default_factory=dict)
    procedures: dict = field(default_factory=dict)
    items: dict = field(default_factory=dict)
    where_of: dict = field(default_factory=dict)
    # proc name -> implementation indices, textual order
    implementations: dict = field(default_factory=dict)
    shadowing: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def item(self, key: str) -> Item:
        return self.items[key]

    def items_named(self, name: str) -> list[Item]:
        return [i for i in self.items.values() if i.name == name]


@dataclass
class _Ctx:
    owner: str
    tvars: frozenset = frozenset()
    old_ok: bool = False
    vars_ok: bool = True
    proc: Optional[ProcSig] = None
    labels: frozenset = frozenset()


class _Scope:
    def __init__(self, parent: Optional["_Scope"] = None):
        self.parent = parent
        self.names: dict[str, Item] = {}

    def lookup(self, name: str) -> Optional[Item]:
        s = self
        while s is not None:
            if name in s.names:
                return s.names[name]
            s = s.parent
        return None

    def child(self) -> "_Scope":
        return _Scope(self)


def _err(msg: str, span, cls=BoogieTypeError):
    raise cls(msg, span)


class Checker:
    def __init__(self, program: A.Program):
        self.prog = program
        self.env = TypeEnv(program)
        self.u = Unifier()
        self.globals = _Scope()
        self.bound_counters: dict[str, itertools.count] = {}

    # ------------------------------------------------------------ types

    def declare_types(self) -> None:
        raw = {}
        for d in self.prog.decls:
            if isinstance(d, A.TypeDecl):
                if d.name in raw or d.name in ("int", "real", "bool"):
                    _err(f"type '{d.name}' declared twice", d.span)
                if len(set(d.params)) != len(d.params):
                    _err(f"duplicate parameter in type '{d.name}'", d.span)
                raw[d.name] = d
        self._raw_types = raw
        visiting: list[str] = []

        def define(name):
            if name in self.env.types:
                return self.env.types[name]
            d = raw[name]
            if d.synonym is None:
                info = TypeInfo(name, d.params, None, d.span)
            else:
                if name in visiting:
                    _err(f"cyclic type synonym '{name}'", d.span)
                visiting.append(name)
                rhs = self.resolve(d.synonym, frozenset(d.params), define)
                visiting.pop()
                info = TypeInfo(name, d.params, rhs, d.span)
            self.env.types[name] = info
            return info

        self._define = define
        for name in raw:
            define(name)

    def resolve(self, t: A.BoogieType, tvars: frozenset, define=None) -> A.BoogieType:
        define = define or self._define
        if isinstance(t, A.PrimType):
            return A.PrimType(t.name)
        if isinstance(t, A.BvType):
            if t.width <= 0:
                _err("bit-vector width must be positive", t.span)
            return A.BvType(t.width)
        if isinstance(t, A.TypeVar):
            return A.TypeVar(t.name)
        if isinstance(t, A.CtorType):
            if t.name in tvars and not t.args:
                return A.TypeVar(t.name)
            if t.name not in self._raw_types:
                _err(f"unknown type '{t.name}'", t.span, UnresolvedName)
            info = define(t.name)
            if len(t.args) != len(info.params):
                _err(f"type '{t.name}' expects {len(info.params)} argument(s), got {len(t.args)}", t.span)
            args = tuple(self.resolve(a, tvars, define) for a in t.args)
            if info.synonym is not None:
                return subst(info.synonym, dict(zip(info.params, args)))
            return A.CtorType(t.name, args)
        if isinstance(t, A.MapType):
            inner = tvars | frozenset(t.tparams)
            dom = tuple(self.resolve(x, inner, define) for x in t.domain)
            cod = self.resolve(t.codomain, inner, define)
            return A.MapType(tuple(t.tparams), dom, cod)
        raise TypeError(t)

    # ------------------------------------------------------------ registration

    def add_item(self, scope: _Scope, key, name, kind, decl_type, tvars, owner, span) -> Item:
        if name in scope.names:
            _err(f"'{name}' declared twice in the same scope", span)
        shadowed = scope.parent.lookup(name) if scope.parent else None
        item = Item(key, name, kind, self.resolve(decl_type, tvars), decl_type, owner, span)
        if shadowed is not None:
            self.env.shadowing.append((key, shadowed.key))
        scope.names[name] = item
        self.env.items.setdefault(key, item)
        return item

    def register_globals(self) -> None:
        env = self.env
        for d in self.prog.decls:
            if isinstance(d, A.ConstDecl):
                for n in d.names:
                    it = self.add_item(self.globals, n, n, "const", d.type, frozenset(), n, d.span)
                    env.consts[n] = it.type
            elif isinstance(d, A.VarDecl):
                for b in d.bindings:
                    it = self.add_item(self.globals, b.name, b.name, "global", b.type, frozenset(), b.name, b.span)
                    env.globals[b.name] = it.type
            elif isinstance(d, A.FunctionDecl):
                if d.name in env.functions:
                    _err(f"function '{d.name}' declared twice", d.span)
                tv = frozenset(d.tparams)
                names = tuple(b.name for b in d.params)
                env.functions[d.name] = FuncSig(
                    d.name, d.tparams, names,
                    tuple(self.resolve(b.type, tv) for b in d.params),
                    self.resolve(d.result.type, tv),
                )
            elif isinstance(d, A.ProcedureDecl):
                if d.name in env.procedures:
                    _err(f"procedure '{d.name}' declared twice", d.span)
                tv = frozenset(d.tparams)
                mods = []
                for v in d.modifies:
                    it = self.globals.lookup(v.name)
                    if it is None or it.kind != "global":
                        _err(f"modifies clause names '{v.name}', which is not a global variable", v.span, UnresolvedName)
                    mods.append(v.name)
                env.procedures[d.name] = ProcSig(
                    d.name, d.tparams,
                    tuple(b.name for b in d.ins), tuple(self.resolve(b.type, tv) for b in d.ins),
                    tuple(b.name for b in d.outs), tuple(self.resolve(b.type, tv) for b in d.outs),
                    tuple(mods),
                )

    # ------------------------------------------------------------ driver

    def run(self) -> TypeEnv:
        self.declare_types()
        self.register_globals()
        out = []
        axiom_no = itertools.count()
        impl_no: dict[str, itertools.count] = {}
        for d in self.prog.decls:
            if isinstance(d, A.AxiomDecl):
                out.append(self.check_axiom(d, f"axiom#{next(axiom_no)}"))
            elif isinstance(d, A.ConstDecl):
                out.append(self.check_const(d))
            elif isinstance(d, A.VarDecl):
                out.append(self.check_var(d))
            elif isinstance(d, A.FunctionDecl):
                out.append(self.check_function(d))
            elif isinstance(d, A.ProcedureDecl):
                counter = impl_no.setdefault(d.name, itertools.count())
                out.append(self.check_procedure(d, counter))
            elif isinstance(d, A.Implementation):
                if d.name not in self.env.procedures:
                    _err(f"implementation of undeclared procedure '{d.name}'", d.span, UnresolvedName)
                counter = impl_no.setdefault(d.name, itertools.count())
                out.append(self.check_implementation(d, next(counter)))
            else:
                out.append(d)
        self.env.program = A.replace(self.prog, decls=tuple(out))
        return self.env

    def finish(self, node):
        """Resolve metavariables in every annotation; leftovers default to int."""
        z = lambda t: None if t is None else self.u.zonk(t, INT)

        def go(n):
            n = A.map_children(n, go)
            changes = {}
            if isinstance(n, A.Expr) and n.ty is not None:
                changes["ty"] = z(n.ty)
            if isinstance(n, (A.MapSelect, A.MapUpdate)) and n.inst is not None:
                changes["inst"] = z(n.inst)
            if isinstance(n, (A.FuncApp, A.Call)) and n.targs is not None:
                changes["targs"] = tuple(z(t) for t in n.targs)
            return A.replace(n, **changes) if changes else n

        return go(node)

    def bound_key(self, owner: str, name: str) -> str:
        c = self.bound_counters.setdefault(owner, itertools.count())
        return f"{owner}/{name}#{next(c)}"

    # ------------------------------------------------------------ declarations

    def check_axiom(self, d: A.AxiomDecl, owner: str) -> A.AxiomDecl:
        ctx = _Ctx(owner, vars_ok=False)
        e = self.expect_bool(d.expr, self.globals, ctx)
        return self.finish(A.replace(d, expr=e))

    def check_const(self, d: A.ConstDecl) -> A.ConstDecl:
        if d.parents:
            my_t = self.env.consts[d.names[0]]
            for p in d.parents:
                it = self.globals.lookup(p.name)
                if it is None or it.kind != "const":
                    _err(f"'{p.name}' in order specification is not a constant", p.span, UnresolvedName)
                if it.type != my_t:
                    _err(f"order parent '{p.name}' has type {render(it.type)}, expected {render(my_t)}", p.span)
        return d

    def check_var(self, d: A.VarDecl) -> A.VarDecl:
        out = []
        for b in d.bindings:
            w = None
            if b.where is not None:
                w = self.finish(self.expect_bool(b.where, self.globals, _Ctx(b.name)))
                self.env.where_of[b.name] = w
            out.append(A.replace(b, where=w, key=b.name))
        return A.replace(d, bindings=tuple(out))

    def check_function(self, d: A.FunctionDecl) -> A.FunctionDecl:
        tv = frozenset(d.tparams)
        self._check_tparams(d.tparams, d.span)
        scope = self.globals.child()
        params = []
        for i, b in enumerate(d.params):
            key = f"{d.name}.{b.name if b.name is not None else '#' + str(i)}"
            if b.name is not None:
                self.add_item(scope, key, b.name, "param", b.type, tv, d.name, b.span)
            else:
                self.env.items.setdefault(key, Item(key, f"#{i}", "param", self.resolve(b.type, tv), b.type, d.name, b.span))
            params.append(A.replace(b, key=key))
        body = d.body
        if body is not None:
            ctx = _Ctx(d.name, tvars=tv, vars_ok=False)
            body = self.expr(body, scope, ctx)
            self.unify(body.ty, self.env.functions[d.name].result, body.span, "function body")
            body = self.finish(body)
        return A.replace(d, params=tuple(params), body=body)

    def _check_tparams(self, tparams, span):
        if len(set(tparams)) != len(tparams):
            _err("duplicate type parameter", span)

    def formals_scope(self, sig: ProcSig, bindings_in, bindings_out, tv, owner) -> _Scope:
        scope = self.globals.child()
        for decl_name, b in zip(sig.in_names, bindings_in):
            self.add_item(scope, f"{sig.name}.{decl_name}", b.name, "in", b.type, tv, owner, b.span)
        for decl_name, b in zip(sig.out_names, bindings_out):
            self.add_item(scope, f"{sig.name}.{decl_name}", b.name, "out", b.type, tv, owner, b.span)
        return scope

    def check_procedure(self, d: A.ProcedureDecl, counter) -> A.ProcedureDecl:
        sig = self.env.procedures[d.name]
        tv = frozenset(d.tparams)
        self._check_tparams(d.tparams, d.span)
        scope = self.formals_scope(sig, d.ins, d.outs, tv, d.name)
        ins_scope = self.globals.child()
        for n, b in zip(sig.in_names, d.ins):
            ins_scope.names[b.name] = scope.names[b.name]

        def formal(b, sc):
            key = f"{d.name}.{b.name}"
            w = None
            if b.where is not None:
                w = self.finish(self.expect_bool(b.where, sc, _Ctx(d.name, tvars=tv)))
                self.env.where_of[key] = w
            return A.replace(b, where=w, key=key)

        ins = tuple(formal(b, scope) for b in d.ins)
        outs = tuple(formal(b, scope) for b in d.outs)
        specs = []
        for s in d.specs:
            if isinstance(s, A.Requires):
                e = self.expect_bool(s.expr, ins_scope, _Ctx(d.name, tvars=tv))
                specs.append(self.finish(A.replace(s, expr=e)))
            elif isinstance(s, A.Ensures):
                e = self.expect_bool(s.expr, scope, _Ctx(d.name, tvars=tv, old_ok=True))
                specs.append(self.finish(A.replace(s, expr=e)))
            else:
                specs.append(
                    A.replace(s, vars=tuple(A.replace(v, kind="global", key=v.name, ty=self.env.globals[v.name]) for v in s.vars))
                )
        body = d.body
        if body is not None:
            k = next(counter)
            body = self.check_body(body, scope, sig, tv, f"{d.name}#impl{k}")
            self.env.implementations.setdefault(d.name, []).append(k)
        return A.replace(d, ins=ins, outs=outs, specs=tuple(specs), body=body)

    def check_implementation(self, d: A.Implementation, k: int) -> A.Implementation:
        sig = self.env.procedures[d.name]
        if len(d.tparams) != len(sig.tparams):
            _err(f"implementation of '{d.name}' has {len(d.tparams)} type parameter(s), expected {len(sig.tparams)}", d.span)
        if len(d.ins) != len(sig.ins) or len(d.outs) != len(sig.outs):
            _err(f"implementation of '{d.name}' does not match its declaration's arity", d.span)
        tv = frozenset(d.tparams)
        ren = {a: A.TypeVar(b) for a, b in zip(sig.tparams, d.tparams)}
        for b, t in zip(d.ins + d.outs, sig.ins + sig.outs):
            if self.resolve(b.type, tv) != subst(t, ren):
                _err(f"type of '{b.name}' differs from the declaration of '{d.name}'", b.span)
        scope = self.globals.child()
        for decl_name, b in zip(sig.in_names, d.ins):
            scope.names[b.name] = _renamed(self.env.items[f"{d.name}.{decl_name}"], b.name)
        for decl_name, b in zip(sig.out_names, d.outs):
            if b.name in scope.names:
                _err(f"'{b.name}' declared twice in the same scope", b.span)
            scope.names[b.name] = _renamed(self.env.items[f"{d.name}.{decl_name}"], b.name)
        ins = tuple(A.replace(b, key=f"{d.name}.{n}") for n, b in zip(sig.in_names, d.ins))
        outs = tuple(A.replace(b, key=f"{d.name}.{n}") for n, b in zip(sig.out_names, d.outs))
        body = self.check_body(d.body, scope, sig, tv, f"{d.name}#impl{k}")
        self.env.implementations.setdefault(d.name, []).append(k)
        return A.replace(d, ins=ins, outs=outs, body=body)

    def check_body(self, body: A.Body, formals: _Scope, sig: ProcSig, tv, owner: str) -> A.Body:
        scope = formals.child()
        for b in body.locals:
            self.add_item(scope, f"{owner}.{b.name}", b.name, "local", b.type, tv, owner, b.span)
        locals_ = []
        for b in body.locals:
            key = f"{owner}.{b.name}"
            w = None
            if b.where is not None:
                w = self.finish(self.expect_bool(b.where, scope, _Ctx(owner, tvars=tv)))
                self.env.where_of[key] = w
            locals_.append(A.replace(b, where=w, key=key))
        labels = [s.name for s in A.walk(body) if isinstance(s, A.Label)]
        dup = {x for x in labels if labels.count(x) > 1}
        if dup:
            _err(f"label '{sorted(dup)[0]}' defined twice", body.span)
        ctx = _Ctx(owner, tvars=tv, old_ok=True, proc=sig, labels=frozenset(labels))
        stmts = tuple(self.finish(s) for s in self.stmts(body.stmts, scope, ctx))
        return A.replace(body, locals=tuple(locals_), stmts=stmts)

    # ------------------------------------------------------------ statements

    def stmts(self, stmts, scope, ctx) -> list:
        return [self.stmt(s, scope, ctx) for s in stmts]

    def guard(self, g, scope, ctx):
        if isinstance(g, A.Star):
            return A.replace(g, ty=BOOL)
        return self.expect_bool(g, scope, ctx)

    def mutable_root(self, e, scope, ctx) -> None:
        root = e
        while isinstance(root, A.MapSelect):
            root = root.map
        if not isinstance(root, A.Ident):
            _err("assignment target must be a variable or a map element", e.span)
        it = scope.lookup(root.name)
        if it is None:
            _err(f"unknown variable '{root.name}'", root.span, UnresolvedName)
        if it.kind not in ("global", "local", "out"):
            _err(f"cannot assign to {_kind_word(it.kind)} '{root.name}'", root.span)
        self.check_frame(it, root.span, ctx)

    def check_frame(self, it: Item, span, ctx) -> None:
        if it.kind == "global" and ctx.proc is not None and it.name not in ctx.proc.modifies:
            _err(f"global '{it.name}' is assigned but not in the modifies clause of '{ctx.proc.name}'", span)

    def stmt(self, s, scope, ctx):
        if isinstance(s, (A.Assert, A.Assume)):
            return A.replace(s, expr=self.expect_bool(s.expr, scope, ctx))
        if isinstance(s, A.Assign):
            roots = [x.name for x in s.lhs if isinstance(x, A.Ident)]
            if len(set(roots)) != len(roots):
                _err("a variable is assigned twice in a parallel assignment", s.span)
            lhs, rhs = [], []
            for l, r in zip(s.lhs, s.rhs):
                self.mutable_root(l, scope, ctx)
                le = self.expr(l, scope, ctx)
                re_ = self.expr(r, scope, ctx)
                self.unify(re_.ty, le.ty, r.span, "assignment")
                lhs.append(le)
                rhs.append(re_)
            return A.replace(s, lhs=tuple(lhs), rhs=tuple(rhs))
        if isinstance(s, A.Havoc):
            vs = []
            for v in s.vars:
                self.mutable_root(v, scope, ctx)
                vs.append(self.expr(v, scope, ctx))
            return A.replace(s, vars=tuple(vs))
        if isinstance(s, A.Call):
            return self.call(s, scope, ctx)
        if isinstance(s, A.CallForall):
            sig = self.env.procedures.get(s.name)
            if sig is None:
                _err(f"unknown procedure '{s.name}'", s.span, UnresolvedName)
            if len(s.args) != len(sig.ins):
                _err(f"'{s.name}' expects {len(sig.ins)} argument(s), got {len(s.args)}", s.span)
            inst, _ = instantiate(sig.tparams, list(sig.ins), self.u)
            args = []
            for a, t in zip(s.args, inst):
                if a is None:
                    args.append(None)
                else:
                    ae = self.expr(a, scope, ctx)
                    self.unify(ae.ty, t, a.span, "call-forall argument")
                    args.append(ae)
            return A.replace(s, args=tuple(args))
        if isinstance(s, A.If):
            g = self.guard(s.guard, scope, ctx)
            then = tuple(self.stmts(s.then, scope, ctx))
            els = None if s.else_ is None else tuple(self.stmts(s.else_, scope, ctx))
            return A.replace(s, guard=g, then=then, else_=els)
        if isinstance(s, A.While):
            g = self.guard(s.guard, scope, ctx)
            invs = tuple(A.replace(i, expr=self.expect_bool(i.expr, scope, ctx)) for i in s.invariants)
            body = tuple(self.stmts(s.body, scope, ctx))
            return A.replace(s, guard=g, invariants=invs, body=body)
        if isinstance(s, A.Goto):
            for lab in s.labels:
                if lab not in ctx.labels:
                    _err(f"unknown label '{lab}'", s.span, UnresolvedName)
            return s
        if isinstance(s, (A.Break, A.Return, A.Label)):
            return s
        raise TypeError(s)

    def call(self, s: A.Call, scope, ctx) -> A.Call:
        sig = self.env.procedures.get(s.name)
        if sig is None:
            _err(f"unknown procedure '{s.name}'", s.span, UnresolvedName)
        if len(s.args) != len(sig.ins):
            _err(f"'{s.name}' expects {len(sig.ins)} argument(s), got {len(s.args)}", s.span)
        if len(s.outs) != len(sig.outs):
            _err(f"'{s.name}' returns {len(sig.outs)} value(s), but {len(s.outs)} target(s) given", s.span)
        names = [o.name for o in s.outs]
        if len(set(names)) != len(names):
            _err("a variable receives two call results", s.span)
        types, metas = instantiate(sig.tparams, list(sig.ins) + list(sig.outs), self.u)
        args = []
        for a, t in zip(s.args, types[: len(sig.ins)]):
            ae = self.expr(a, scope, ctx)
            self.unify(ae.ty, t, a.span, f"argument of '{s.name}'")
            args.append(ae)
        outs = []
        for o, t in zip(s.outs, types[len(sig.ins):]):
            self.mutable_root(o, scope, ctx)
            oe = self.expr(o, scope, ctx)
            self.unify(t, oe.ty, o.span, f"result of '{s.name}'")
            outs.append(oe)
        if ctx.proc is not None:
            extra = [m for m in sig.modifies if m not in ctx.proc.modifies]
            if extra:
                _err(f"call to '{s.name}' may modify '{extra[0]}', which '{ctx.proc.name}' does not list in modifies", s.span)
        return A.replace(s, args=tuple(args), outs=tuple(outs), targs=tuple(metas))

    # ------------------------------------------------------------ expressions

    def unify(self, found, expected, span, what: str) -> None:
        try:
            self.u.unify(found, expected)
        except UnifyError:
            f = render(self.u.zonk(found))
            x = render(self.u.zonk(expected))
            raise BoogieTypeError(f"type mismatch in {what}: expected {x}, found {f}", span) from None

    def expect_bool(self, e, scope, ctx):
        out = self.expr(e, scope, ctx)
        self.unify(out.ty, BOOL, e.span, "condition")
        return out

    def numeric(self, t, span, what):
        r = self.u.resolve(t)
        if not isinstance(r, A.MetaVar) and r not in (INT, REAL):
            _err(f"{what} needs int or real operands, found {render(self.u.zonk(r))}", span)

    def expr(self, e, scope, ctx):
        m = getattr(self, "e_" + type(e).__name__, None)
        if m is None:
            raise TypeError(e)
        return m(e, scope, ctx)

    def e_BoolLit(self, e, scope, ctx):
        return A.replace(e, ty=BOOL)

    def e_IntLit(self, e, scope, ctx):
        return A.replace(e, ty=INT)

    def e_RealLit(self, e, scope, ctx):
        return A.replace(e, ty=REAL)

    def e_BvLit(self, e, scope, ctx):
        return A.replace(e, ty=A.BvType(e.width))

    def e_Star(self, e, scope, ctx):
        _err("'*' is only allowed as an if or while guard", e.span)

    def e_Ident(self, e, scope, ctx):
        it = scope.lookup(e.name)
        if it is None:
            _err(f"unknown identifier '{e.name}'", e.span, UnresolvedName)
        if it.kind == "global" and not ctx.vars_ok:
            _err(f"global variable '{e.name}' cannot be used in axioms or function bodies", e.span)
        return A.replace(e, ty=it.type, kind=it.kind, key=it.key)

    def e_Unary(self, e, scope, ctx):
        o = self.expr(e.operand, scope, ctx)
        if e.op == "!":
            self.unify(o.ty, BOOL, e.span, "negation")
            return A.replace(e, operand=o, ty=BOOL)
        self.numeric(o.ty, e.span, "unary minus")
        return A.replace(e, operand=o, ty=o.ty)

    def e_Binary(self, e, scope, ctx):
        l = self.expr(e.left, scope, ctx)
        r = self.expr(e.right, scope, ctx)
        op = e.op
        if op in ("&&", "||", "==>", "<==", "<==>"):
            self.unify(l.ty, BOOL, e.left.span, f"operand of '{op}'")
            self.unify(r.ty, BOOL, e.right.span, f"operand of '{op}'")
            ty = BOOL
        elif op in ("==", "!=", "<:"):
            self.unify(r.ty, l.ty, e.span, f"operands of '{op}'")
            ty = BOOL
        elif op in ("<", "<=", ">", ">="):
            self.unify(r.ty, l.ty, e.span, f"operands of '{op}'")
            self.numeric(l.ty, e.span, f"'{op}'")
            ty = BOOL
        elif op in ("+", "-", "*"):
            self.unify(r.ty, l.ty, e.span, f"operands of '{op}'")
            self.numeric(l.ty, e.span, f"'{op}'")
            ty = l.ty
        elif op in ("div", "mod"):
            self.unify(l.ty, INT, e.left.span, f"operand of '{op}'")
            self.unify(r.ty, INT, e.right.span, f"operand of '{op}'")
            ty = INT
        elif op in ("/", "**"):
            self.unify(l.ty, REAL, e.left.span, f"operand of '{op}'")
            self.unify(r.ty, REAL, e.right.span, f"operand of '{op}'")
            ty = REAL
        elif op == "++":
            lt, rt = self.u.resolve(l.ty), self.u.resolve(r.ty)
            if not isinstance(lt, A.BvType) or not isinstance(rt, A.BvType):
                _err("'++' needs bit-vector operands", e.span)
            ty = A.BvType(lt.width + rt.width)
        else:
            raise TypeError(op)
        return A.replace(e, left=l, right=r, ty=ty)

    def e_Chain(self, e, scope, ctx):
        ops = [self.expr(o, scope, ctx) for o in e.operands]
        for op, a, b in zip(e.ops, ops, ops[1:]):
            self.unify(b.ty, a.ty, e.span, f"operands of '{op}'")
            if op not in ("==", "!=", "<:"):
                self.numeric(a.ty, e.span, f"'{op}'")
        return A.replace(e, operands=tuple(ops), ty=BOOL)

    def _map_of(self, m, span):
        t = self.u.resolve(m.ty)
        if not isinstance(t, A.MapType):
            _err(f"indexing a value of non-map type {render(self.u.zonk(t))}", span)
        return t

    def _access(self, m, indices, span):
        mt = self._map_of(m, span)
        if len(indices) != len(mt.domain):
            _err(f"map expects {len(mt.domain)} index(es), got {len(indices)}", span)
        types, _ = instantiate(mt.tparams, list(mt.domain) + [mt.codomain], self.u)
        for i, t in zip(indices, types):
            self.unify(i.ty, t, i.span, "map index")
        return A.MapType((), tuple(types[:-1]), types[-1])

    def e_MapSelect(self, e, scope, ctx):
        m = self.expr(e.map, scope, ctx)
        idx = tuple(self.expr(i, scope, ctx) for i in e.indices)
        inst = self._access(m, idx, e.span)
        return A.replace(e, map=m, indices=idx, inst=inst, ty=inst.codomain)

    def e_MapUpdate(self, e, scope, ctx):
        m = self.expr(e.map, scope, ctx)
        idx = tuple(self.expr(i, scope, ctx) for i in e.indices)
        inst = self._access(m, idx, e.span)
        v = self.expr(e.value, scope, ctx)
        self.unify(v.ty, inst.codomain, e.value.span, "map update value")
        return A.replace(e, map=m, indices=idx, value=v, inst=inst, ty=m.ty)

    def e_BvExtract(self, e, scope, ctx):
        b = self.expr(e.base, scope, ctx)
        bt = self.u.resolve(b.ty)
        if not isinstance(bt, A.BvType):
            _err("extraction needs a bit-vector operand", e.span)
        if not (0 <= e.lo < e.hi <= bt.width):
            _err(f"extraction [{e.hi}:{e.lo}] out of range for bv{bt.width}", e.span)
        return A.replace(e, base=b, ty=A.BvType(e.hi - e.lo))

    def e_FuncApp(self, e, scope, ctx):
        sig = self.env.functions.get(e.name)
        if sig is None:
            _err(f"unknown function '{e.name}'", e.span, UnresolvedName)
        if len(e.args) != len(sig.params):
            _err(f"'{e.name}' expects {len(sig.params)} argument(s), got {len(e.args)}", e.span)
        types, metas = instantiate(sig.tparams, list(sig.params) + [sig.result], self.u)
        args = []
        for a, t in zip(e.args, types):
            ae = self.expr(a, scope, ctx)
            self.unify(ae.ty, t, a.span, f"argument of '{e.name}'")
            args.append(ae)
        return A.replace(e, args=tuple(args), targs=tuple(metas), ty=types[-1])

    def e_Cast(self, e, scope, ctx):
        x = self.expr(e.expr, scope, ctx)
        src, dst = (REAL, INT) if e.target == "int" else (INT, REAL)
        self.unify(x.ty, src, e.span, f"{e.target}() conversion")
        return A.replace(e, expr=x, ty=dst)

    def e_Old(self, e, scope, ctx):
        if not ctx.old_ok:
            _err("old() is only allowed in postconditions and implementation bodies", e.span)
        x = self.expr(e.expr, scope, ctx)
        return A.replace(e, expr=x, ty=x.ty)

    def e_Coercion(self, e, scope, ctx):
        x = self.expr(e.expr, scope, ctx)
        t = self.resolve(e.type, ctx.tvars)
        self.unify(x.ty, t, e.span, "type coercion")
        return A.replace(e, expr=x, ty=t)

    def e_IfThenElse(self, e, scope, ctx):
        c = self.expect_bool(e.cond, scope, ctx)
        a = self.expr(e.then, scope, ctx)
        b = self.expr(e.else_, scope, ctx)
        self.unify(b.ty, a.ty, e.span, "conditional branches")
        return A.replace(e, cond=c, then=a, else_=b, ty=a.ty)

    def _binder(self, e, scope, ctx):
        self._check_tparams(e.tparams, e.span)
        tv = ctx.tvars | frozenset(e.tparams)
        inner = scope.child()
        bound = []
        for b in e.bound:
            key = self.bound_key(ctx.owner, b.name)
            self.add_item(inner, key, b.name, "bound", b.type, tv, ctx.owner, b.span)
            bound.append(A.replace(b, key=key))
        ictx = _Ctx(ctx.owner, tv, ctx.old_ok, ctx.vars_ok, ctx.proc, ctx.labels)
        for p in e.tparams:
            used = any(p in free_tvars(inner.names[b.name].type) for b in e.bound)
            if not used:
                _err(f"type parameter '{p}' does not occur in the bound variables", e.span)
        return inner, ictx, tuple(bound)

    def e_Quantifier(self, e, scope, ctx):
        inner, ictx, bound = self._binder(e, scope, ctx)
        body = self.expect_bool(e.body, inner, ictx)
        trigs = tuple(
            A.replace(t, exprs=tuple(self.expr(x, inner, ictx) for x in t.exprs)) for t in e.triggers
        )
        return A.replace(e, bound=bound, body=body, triggers=trigs, ty=BOOL)

    def e_Lambda(self, e, scope, ctx):
        inner, ictx, bound = self._binder(e, scope, ctx)
        body = self.expr(e.body, inner, ictx)
        dom = tuple(inner.names[b.name].type for b in bound)
        return A.replace(e, bound=bound, body=body, ty=A.MapType(tuple(e.tparams), dom, body.ty))


def _renamed(it: Item, name: str) -> Item:
    return Item(it.key, name, it.kind, it.type, it.decl_type, it.owner, it.span)


def _kind_word(kind: str) -> str:
    return {"const": "constant", "in": "input parameter", "bound": "bound variable", "param": "function parameter"}.get(kind, kind)


def typecheck(p: A.Program) -> TypeEnv:
    """Resolve names and infer types; raises :class:`BoogieTypeError` on failure."""
    try:
        return Checker(p).run()
    except RecursionError:
        raise BoogieTypeError("program nested too deeply", None) from None


def dump_env(env: TypeEnv) -> str:
    lines = []
    for key, it in sorted(env.items.items()):
        lines.append(f"{key} : {render(it.type)}")
    return "\n".join(lines)

