"""Replacing polymorphic maps with families of monomorphic maps.

Every parameterless synonym ``pM`` of a polymorphic map type is split into one
monomorphic type per member of its instance set ``C+`` (the concrete instances
found by the analysis plus the instance over fresh uninterpreted types).
Items of type ``pM`` split the same way, routines with ``pM`` formals are
replicated per instance, and polymorphic routines whose type parameters meet
a polymorphic map are replicated over the concrete types those parameters take.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from ..boogie import ast as A
from ..diagnostics import InstantiationExplosion, MonomorphizationError
from ..sema.analysis import Analysis, poly_map_synonyms
from ..sema.typecheck import TypeEnv
from ..sema.types import alpha_eq, alpha_normal, free_tvars, is_concrete, render, subst, tag
from .common import DesugarConfig, conj, disj, subst_syntax, type_syntax


# ---------------------------------------------------------------- naming


def _binding_sites(p: A.Program):
    """Yield ``(binding, resolved-type-lookup-key)`` for every declared binding."""
    for n in A.walk(p):
        if isinstance(n, A.Binding) and n.key is not None:
            yield n


def name_poly_maps(p: A.Program, env: TypeEnv, cfg: DesugarConfig) -> A.Program:
    """Give every anonymous polymorphic map type used as an item type a synonym."""
    poly = poly_map_synonyms(env)

    def needs_name(decl_type, resolved) -> bool:
        if not (isinstance(resolved, A.MapType) and resolved.tparams):
            return False
        return not (isinstance(decl_type, A.CtorType) and not decl_type.args and decl_type.name in poly)

    names: list[tuple[A.MapType, str]] = []

    def synonym_for(resolved: A.MapType) -> A.CtorType:
        for t, n in names:
            if alpha_eq(t, resolved):
                return A.CtorType(n)
        n = cfg.fresh.fresh("PM")
        names.append((resolved, n))
        return A.CtorType(n)

    def fix_binding(b: A.Binding) -> A.Binding:
        if b.key is None or b.key not in env.items:
            return b
        it = env.items[b.key]
        if needs_name(b.type, it.type):
            return A.replace(b, type=synonym_for(it.type))
        return b

    def go(n):
        n = A.map_children(n, go)
        if isinstance(n, A.Binding):
            return fix_binding(n)
        if isinstance(n, A.ConstDecl) and needs_name(n.type, env.consts[n.names[0]]):
            return A.replace(n, type=synonym_for(env.consts[n.names[0]]))
        return n

    decls = [go(d) for d in p.decls]
    if not names:
        return p
    syn = [A.TypeDecl(n, (), type_syntax(t)) for t, n in names]
    return A.replace(p, decls=tuple(syn + decls))


# ---------------------------------------------------------------- matching


def match(pattern: A.BoogieType, target: A.BoogieType, tvars: set, out: dict) -> bool:
    """Extend ``out`` so that ``pattern`` with ``tvars`` substituted equals ``target``."""
    if isinstance(pattern, A.TypeVar) and pattern.name in tvars:
        if pattern.name in out:
            return alpha_eq(out[pattern.name], target)
        out[pattern.name] = target
        return True
    if type(pattern) is not type(target):
        return False
    if isinstance(pattern, A.CtorType):
        return (
            pattern.name == target.name
            and len(pattern.args) == len(target.args)
            and all(match(a, b, tvars, out) for a, b in zip(pattern.args, target.args))
        )
    if isinstance(pattern, A.MapType):
        if len(pattern.tparams) != len(target.tparams) or len(pattern.domain) != len(target.domain):
            return False
        inner = tvars - set(pattern.tparams)
        ren = {a: A.TypeVar(b) for a, b in zip(target.tparams, pattern.tparams)}
        return all(match(a, subst(b, ren), inner, out) for a, b in zip(pattern.domain, target.domain)) and match(
            pattern.codomain, subst(target.codomain, ren), inner, out
        )
    return pattern == target


# ---------------------------------------------------------------- structures


@dataclass
class Variant:
    inst: A.MapType
    tag: str
    type_name: str


@dataclass
class Replica:
    name: str
    sigma: dict  # type-parameter position -> concrete type
    formal_inst: dict  # formal key -> Variant
    kept: tuple  # positions of type parameters that stay generic


@dataclass
class _Ctx:
    sigma: dict = field(default_factory=dict)  # type-variable name -> type
    formal_inst: dict = field(default_factory=dict)  # formal key -> Variant
    where: str = ""


def _syntax_sigma(tparams, sigma_pos: dict) -> dict:
    return {tparams[i]: t for i, t in sigma_pos.items() if i < len(tparams)}


class Monomorphizer:
    def __init__(self, p: A.Program, env: TypeEnv, an: Analysis, cfg: DesugarConfig):
        self.p, self.env, self.an, self.cfg = p, env, an, cfg
        self.fresh = cfg.fresh
        self.cap = cfg.mono_cap
        self.variants: dict[str, list[Variant]] = {}
        for pm, cplus in an.concrete_plus.items():
            self._check_cap(len(cplus), f"type '{pm}'", None)
            mt = an.poly_types[pm]
            pattern = A.MapType((), mt.domain, mt.codomain)
            out = []
            for inst in cplus:
                sol: dict = {}
                match(pattern, inst, set(mt.tparams), sol)
                t = "_".join(tag(sol[a]) for a in mt.tparams if a in sol) or "t"
                out.append(Variant(inst, t, self.fresh.variant(f"{pm}_{t}")))
            self.variants[pm] = out
        self.pm_of = {key: s.type_name for key, s in an.items.items()}
        self.item_names: dict[str, list[tuple[Variant, str]]] = {}
        self.proc_replicas: dict[str, Optional[list[Replica]]] = {}
        self.func_replicas: dict[str, Optional[list[Replica]]] = {}

    # ------------------------------------------------------------ helpers

    def _check_cap(self, n: int, what: str, span) -> None:
        if n > self.cap:
            raise InstantiationExplosion(f"{what} needs {n} variants, more than the limit of {self.cap}", span)

    def _variant_of(self, pm: str, inst: A.MapType, span) -> Variant:
        for v in self.variants[pm]:
            if alpha_eq(v.inst, inst):
                return v
        raise MonomorphizationError(f"no monomorphic variant of '{pm}' for {render(inst)}", span)

    def item_variants(self, key: str, name: str, span) -> list[tuple[Variant, str]]:
        if key not in self.item_names:
            pm = self.pm_of[key]
            self._check_cap(len(self.variants[pm]), f"'{name}'", span)
            self.item_names[key] = [(v, self.fresh.variant(f"{name}_{v.tag}")) for v in self.variants[pm]]
        return self.item_names[key]

    def is_pm(self, key: Optional[str]) -> bool:
        return key is not None and key in self.pm_of

    @staticmethod
    def _is_whole(e: A.Expr) -> bool:
        return isinstance(e.ty, A.MapType) and bool(e.ty.tparams)

    # ------------------------------------------------------------ replicas

    def plan_routine(self, name: str, tparams: tuple, formals: list, impl_tparams: list, span) -> Optional[list[Replica]]:
        pos_values: dict[int, list] = {}
        names_of = [tparams] + impl_tparams
        for key, s in self.an.items.items():
            for inst in s.types:
                if inst.origin != name or inst.concrete:
                    continue
                tv = free_tvars(inst.type)
                for c in self.an.concrete_plus[s.type_name]:
                    sol: dict = {}
                    if not match(inst.type, c, tv, sol):
                        continue
                    for v, t in sol.items():
                        pos = next((ns.index(v) for ns in names_of if v in ns), None)
                        if pos is None:
                            continue
                        vals = pos_values.setdefault(pos, [])
                        if not any(alpha_eq(t, x) for x in vals):
                            vals.append(t)
        pm_formals = [b.key for b in formals if self.is_pm(b.key)]
        if not pos_values and not pm_formals:
            return None
        positions = sorted(pos_values)
        axes = [pos_values[i] for i in positions] + [self.variants[self.pm_of[k]] for k in pm_formals]
        total = 1
        for a in axes:
            total *= len(a)
        self._check_cap(total, f"'{name}'", span)
        out = []
        for combo in itertools.product(*axes):
            sigma = dict(zip(positions, combo[: len(positions)]))
            finst = dict(zip(pm_formals, combo[len(positions):]))
            tags = [tag(sigma[i]) for i in positions] + [v.tag for v in finst.values()]
            rname = self.fresh.variant(f"{name}_{'_'.join(tags)}")
            kept = tuple(i for i in range(len(tparams)) if i not in sigma)
            out.append(Replica(rname, sigma, finst, kept))
        return out

    def plan(self) -> None:
        impl_tp: dict[str, list] = {}
        for d in self.p.decls:
            if isinstance(d, A.Implementation):
                impl_tp.setdefault(d.name, []).append(d.tparams)
        for d in self.p.decls:
            if isinstance(d, A.FunctionDecl):
                if d.result.key and self.is_pm(d.result.key) or (
                    isinstance(self.env.functions[d.name].result, A.MapType) and self.env.functions[d.name].result.tparams
                ):
                    raise MonomorphizationError(f"function '{d.name}' returns a polymorphic map", d.span)
                self.func_replicas[d.name] = self.plan_routine(d.name, d.tparams, list(d.params), [], d.span)
            elif isinstance(d, A.ProcedureDecl):
                self.proc_replicas[d.name] = self.plan_routine(
                    d.name, d.tparams, list(d.ins) + list(d.outs), impl_tp.get(d.name, []), d.span
                )

    # ------------------------------------------------------------ expressions

    def components(self, e: A.Expr, ctx: _Ctx) -> list[Variant]:
        if isinstance(e, A.Ident):
            if e.key in ctx.formal_inst:
                return [ctx.formal_inst[e.key]]
            if self.is_pm(e.key):
                return [v for v, _ in self.item_variants(e.key, e.name, e.span)]
            raise MonomorphizationError(f"'{e.name}' has a polymorphic map type but is not a monomorphizable item", e.span)
        if isinstance(e, A.MapUpdate):
            return self.components(e.map, ctx)
        if isinstance(e, (A.Old, A.Coercion)):
            return self.components(e.expr, ctx)
        if isinstance(e, A.IfThenElse):
            b = self.components(e.else_, ctx)
            return [v for v in self.components(e.then, ctx) if any(v is w for w in b)]
        raise MonomorphizationError("unsupported use of a polymorphic map value", e.span)

    def component(self, e: A.Expr, v: Variant, ctx: _Ctx) -> A.Expr:
        if isinstance(e, A.Ident):
            if e.key in ctx.formal_inst:
                if ctx.formal_inst[e.key] is not v:
                    raise MonomorphizationError(
                        f"'{e.name}' is used at {render(v.inst)} but this variant has {render(ctx.formal_inst[e.key].inst)}",
                        e.span,
                    )
                return A.Ident(e.name, span=e.span)
            for w, n in self.item_variants(e.key, e.name, e.span):
                if w is v:
                    return A.Ident(n, span=e.span)
        elif isinstance(e, A.MapUpdate):
            inst = self.instance(e.inst, ctx, e.span)
            inner = self.component(e.map, v, ctx)
            if alpha_eq(inst, v.inst):
                return A.MapUpdate(inner, tuple(self.rw(i, ctx) for i in e.indices), self.rw(e.value, ctx), span=e.span)
            return inner
        elif isinstance(e, A.Old):
            return A.Old(self.component(e.expr, v, ctx), span=e.span)
        elif isinstance(e, A.Coercion):
            return self.component(e.expr, v, ctx)
        elif isinstance(e, A.IfThenElse):
            return A.IfThenElse(self.rw(e.cond, ctx), self.component(e.then, v, ctx), self.component(e.else_, v, ctx), span=e.span)
        raise MonomorphizationError("unsupported use of a polymorphic map value", e.span)

    def instance(self, inst: Optional[A.MapType], ctx: _Ctx, span) -> A.MapType:
        t = subst(inst, ctx.sigma)
        if not is_concrete(t):
            raise MonomorphizationError(
                f"polymorphic map used at the parametric type {render(t)}, which no replication makes concrete", span
            )
        return t

    def access_variant(self, m: A.Expr, inst, ctx: _Ctx, span) -> A.Expr:
        t = self.instance(inst, ctx, span)
        roots = self.components(m, ctx)
        pm_key = _root_key(m)
        pm = self.pm_of.get(pm_key) if pm_key else None
        if pm is None:
            pm = next((k for k, vs in self.variants.items() if any(v is roots[0] for v in vs)), None)
        v = self._variant_of(pm, t, span)
        if not any(v is r for r in roots):
            raise MonomorphizationError(f"map used at {render(t)} where that instance is not available", span)
        return self.component(m, v, ctx)

    def rw(self, e: A.Expr, ctx: _Ctx) -> A.Expr:
        if isinstance(e, A.MapSelect) and self._is_whole(e.map):
            return A.MapSelect(
                self.access_variant(e.map, e.inst, ctx, e.span), tuple(self.rw(i, ctx) for i in e.indices), span=e.span
            )
        if isinstance(e, A.Binary) and e.op in ("==", "!=") and self._is_whole(e.left):
            lc, rc = self.components(e.left, ctx), self.components(e.right, ctx)
            common = [v for v in lc if any(v is w for w in rc)]
            parts = [A.Binary(e.op, self.component(e.left, v, ctx), self.component(e.right, v, ctx), span=e.span) for v in common]
            return conj(parts) if e.op == "==" else disj(parts)
        if isinstance(e, A.Expr) and self._is_whole(e):
            raise MonomorphizationError("a polymorphic map is used as a whole value in an unsupported position", e.span)
        if isinstance(e, A.FuncApp):
            return self.rw_funcapp(e, ctx)
        if isinstance(e, A.Quantifier):
            bound = []
            for b in e.bound:
                if self.is_pm(b.key):
                    bound.extend(
                        A.Binding(n, A.CtorType(v.type_name), span=b.span) for v, n in self.item_variants(b.key, b.name, b.span)
                    )
                else:
                    bound.append(A.replace(b, type=subst_syntax(b.type, ctx.sigma)))
            trig = tuple(A.replace(t, exprs=tuple(self.rw(x, ctx) for x in t.exprs)) for t in e.triggers)
            return A.replace(e, bound=tuple(bound), triggers=trig, body=self.rw(e.body, ctx))
        if isinstance(e, A.Coercion):
            return A.replace(e, expr=self.rw(e.expr, ctx), type=subst_syntax(e.type, ctx.sigma))
        return A.map_children(e, lambda c: self.rw(c, ctx) if isinstance(c, A.Expr) else self._rw_other(c, ctx))

    def _rw_other(self, n, ctx):
        if isinstance(n, A.Trigger):
            return A.replace(n, exprs=tuple(self.rw(x, ctx) for x in n.exprs))
        if isinstance(n, A.Attribute):
            return A.replace(n, args=tuple(self.rw(x, ctx) if isinstance(x, A.Expr) else x for x in n.args))
        return n

    def _pick(self, replicas, name, targs, ctx, span) -> list[Replica]:
        targs = [subst(t, ctx.sigma) for t in (targs or ())]
        out = []
        for r in replicas:
            if all(i < len(targs) and alpha_eq(t, targs[i]) for i, t in r.sigma.items()):
                out.append(r)
        if not out:
            shown = ", ".join(render(t) for t in targs)
            raise MonomorphizationError(f"no monomorphic variant of '{name}' matches the type arguments <{shown}>", span)
        return out

    def rw_funcapp(self, e: A.FuncApp, ctx: _Ctx) -> A.Expr:
        reps = self.func_replicas.get(e.name)
        for a in e.args:
            if self._is_whole(a):
                raise MonomorphizationError(
                    f"polymorphic map passed whole to function '{e.name}'; only procedure calls can be split", a.span
                )
        args = tuple(self.rw(a, ctx) for a in e.args)
        if not reps:
            return A.replace(e, args=args)
        picked = self._pick(reps, e.name, e.targs, ctx, e.span)
        return A.FuncApp(picked[0].name, args, span=e.span)

    # ------------------------------------------------------------ statements

    def rw_stmts(self, stmts, ctx: _Ctx) -> tuple:
        out = []
        for s in stmts:
            out.extend(self.rw_stmt(s, ctx))
        return tuple(out)

    def rw_stmt(self, s: A.Stmt, ctx: _Ctx) -> list:
        if isinstance(s, (A.Assert, A.Assume)):
            return [A.replace(s, expr=self.rw(s.expr, ctx))]
        if isinstance(s, A.Assign):
            lhs, rhs = [], []
            for l, r in zip(s.lhs, s.rhs):
                if isinstance(l, A.Ident) and self._is_whole(l):
                    avail = self.components(r, ctx)
                    for v in self.components(l, ctx):
                        if not any(v is w for w in avail):
                            raise MonomorphizationError(f"copy into '{l.name}' lacks the {render(v.inst)} variant", s.span)
                        lhs.append(self.component(l, v, ctx))
                        rhs.append(self.component(r, v, ctx))
                else:
                    lhs.append(self.rw(l, ctx))
                    rhs.append(self.rw(r, ctx))
            return [A.replace(s, lhs=tuple(lhs), rhs=tuple(rhs))]
        if isinstance(s, A.Havoc):
            vs = []
            for v in s.vars:
                if self.is_pm(v.key) and v.key not in ctx.formal_inst:
                    vs.extend(A.Ident(n, span=v.span) for _, n in self.item_variants(v.key, v.name, v.span))
                else:
                    vs.append(v)
            return [A.replace(s, vars=tuple(vs))]
        if isinstance(s, A.Call):
            return self.rw_call(s, ctx)
        if isinstance(s, A.If):
            return [
                A.replace(
                    s,
                    guard=self.rw(s.guard, ctx),
                    then=self.rw_stmts(s.then, ctx),
                    else_=None if s.else_ is None else self.rw_stmts(s.else_, ctx),
                )
            ]
        if isinstance(s, A.While):
            invs = tuple(A.replace(i, expr=self.rw(i.expr, ctx)) for i in s.invariants)
            return [A.replace(s, guard=self.rw(s.guard, ctx), invariants=invs, body=self.rw_stmts(s.body, ctx))]
        return [s]

    def rw_call(self, s: A.Call, ctx: _Ctx) -> list:
        reps = self.proc_replicas.get(s.name)
        if not reps:
            return [A.replace(s, args=tuple(self.rw(a, ctx) for a in s.args))]
        sig = self.env.procedures[s.name]
        in_keys = [f"{s.name}.{n}" for n in sig.in_names]
        out_keys = [f"{s.name}.{n}" for n in sig.out_names]
        cands = self._pick(reps, s.name, s.targs, ctx, s.span)
        out = []
        for r in cands:
            ok = True
            for k, a in list(zip(in_keys, s.args)) + list(zip(out_keys, s.outs)):
                if k in r.formal_inst and not any(r.formal_inst[k] is v for v in self.components(a, ctx)):
                    ok = False
            if not ok:
                continue
            args = tuple(
                self.component(a, r.formal_inst[k], ctx) if k in r.formal_inst else self.rw(a, ctx)
                for k, a in zip(in_keys, s.args)
            )
            outs = tuple(
                self.component(o, r.formal_inst[k], ctx) if k in r.formal_inst else o for k, o in zip(out_keys, s.outs)
            )
            out.append(A.Call(outs, r.name, args, s.attrs, s.free, span=s.span))
        if not out:
            raise MonomorphizationError(f"no monomorphic variant of '{s.name}' accepts these arguments", s.span)
        return out

    # ------------------------------------------------------------ declarations

    def expand_bindings(self, bindings, ctx: _Ctx) -> tuple:
        out = []
        for b in bindings:
            w = None if b.where is None else self.rw(b.where, ctx)
            if self.is_pm(b.key) and b.key not in ctx.formal_inst:
                for i, (v, n) in enumerate(self.item_variants(b.key, b.name, b.span)):
                    out.append(A.Binding(n, A.CtorType(v.type_name), w if i == 0 else None, span=b.span))
            elif b.key in ctx.formal_inst:
                out.append(A.replace(b, type=A.CtorType(ctx.formal_inst[b.key].type_name), where=w))
            else:
                out.append(A.replace(b, type=subst_syntax(b.type, ctx.sigma), where=w))
        return tuple(out)

    def rw_specs(self, specs, ctx: _Ctx) -> tuple:
        out = []
        for sp in specs:
            if isinstance(sp, A.Modifies):
                vs = []
                for v in sp.vars:
                    if self.is_pm(v.key):
                        vs.extend(A.Ident(n, span=v.span) for _, n in self.item_variants(v.key, v.name, v.span))
                    else:
                        vs.append(v)
                out.append(A.replace(sp, vars=tuple(vs)))
            else:
                out.append(A.replace(sp, expr=self.rw(sp.expr, ctx)))
        return tuple(out)

    def routine_ctx(self, tparams, r: Optional[Replica], formal_keys_positional=None) -> _Ctx:
        if r is None:
            return _Ctx()
        finst = dict(r.formal_inst)
        if formal_keys_positional:
            finst = {formal_keys_positional.get(k, k): v for k, v in finst.items()}
        return _Ctx(_syntax_sigma(tparams, r.sigma), finst)

    def rw_body(self, body: A.Body, ctx: _Ctx) -> A.Body:
        return A.replace(body, locals=self.expand_bindings(body.locals, ctx), stmts=self.rw_stmts(body.stmts, ctx))

    def decl(self, d: A.Decl) -> list:
        if isinstance(d, A.TypeDecl) and d.name in self.variants:
            return [A.TypeDecl(v.type_name, (), type_syntax(v.inst), span=d.span) for v in self.variants[d.name]]
        if isinstance(d, A.ConstDecl):
            key = d.names[0]
            if self.is_pm(key):
                per = [self.item_variants(n, n, d.span) for n in d.names]
                return [
                    A.ConstDecl(tuple(p[i][1] for p in per), A.CtorType(v.type_name), d.unique, span=d.span)
                    for i, (v, _) in enumerate(per[0])
                ]
            return [d]
        if isinstance(d, A.VarDecl):
            return [A.replace(d, bindings=self.expand_bindings(d.bindings, _Ctx()))]
        if isinstance(d, A.AxiomDecl):
            return [A.replace(d, expr=self.rw(d.expr, _Ctx()))]
        if isinstance(d, A.FunctionDecl):
            reps = self.func_replicas.get(d.name)
            if not reps:
                return [A.replace(d, params=self.expand_bindings(d.params, _Ctx()))]
            out = []
            for r in reps:
                ctx = self.routine_ctx(d.tparams, r)
                out.append(
                    A.replace(
                        d,
                        name=r.name,
                        tparams=tuple(d.tparams[i] for i in r.kept),
                        params=self.expand_bindings(d.params, ctx),
                        result=A.replace(d.result, type=subst_syntax(d.result.type, ctx.sigma)),
                    )
                )
            return out
        if isinstance(d, (A.ProcedureDecl, A.Implementation)):
            reps = self.proc_replicas.get(d.name)
            variants = reps if reps else [None]
            out = []
            for r in variants:
                ctx = self.routine_ctx(d.tparams, r)
                changes = dict(
                    ins=self.expand_bindings(d.ins, ctx),
                    outs=self.expand_bindings(d.outs, ctx),
                )
                if r is not None:
                    changes.update(name=r.name, tparams=tuple(d.tparams[i] for i in r.kept))
                    self.cfg.origins[r.name] = d.name
                if isinstance(d, A.ProcedureDecl):
                    changes["specs"] = self.rw_specs(d.specs, ctx)
                if d.body is not None:
                    changes["body"] = self.rw_body(d.body, ctx)
                out.append(A.replace(d, **changes))
            return out
        return [d]

    def run(self) -> A.Program:
        self.plan()
        out: list = []
        fresh_declared = False
        for d in self.p.decls:
            if isinstance(d, A.TypeDecl) and d.name in self.variants and not fresh_declared:
                out.extend(A.TypeDecl(n, span=d.span) for n in self.an.fresh_types)
                fresh_declared = True
            out.extend(self.decl(d))
        return A.replace(self.p, decls=tuple(out))


def _root_key(e: A.Expr) -> Optional[str]:
    while not isinstance(e, A.Ident):
        if isinstance(e, A.MapUpdate):
            e = e.map
        elif isinstance(e, (A.Old, A.Coercion)):
            e = e.expr
        elif isinstance(e, A.IfThenElse):
            e = e.then
        else:
            return None
    return e.key


def monomorphize_maps(p: A.Program, env: TypeEnv, an: Analysis, cfg: DesugarConfig) -> A.Program:
    if not an.poly_types:
        _reject_leftovers(p)
        return p
    out = Monomorphizer(p, env, an, cfg).run()
    _reject_leftovers(out)
    return out


def _reject_leftovers(p: A.Program) -> None:
    for n in A.walk(p):
        if isinstance(n, A.MapType) and n.tparams:
            raise MonomorphizationError("polymorphic map type in a position that cannot be monomorphized", n.span)
