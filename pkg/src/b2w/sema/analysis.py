"""Global analysis of the actual types taken by items of polymorphic map type.

Each occurrence of an item ``pm`` whose declared type is a polymorphic map
synonym ``pM`` contributes map instances to ``typesOf(pm)``:

* select, update and assignment through ``pm[...]`` give the instance
  directly (the typechecker records it in ``inst``);
* whole-item flows (equality, copy, function and procedure arguments, call
  results) link two items, and linked items share their instances;
* ``havoc pm`` contributes nothing.

Links are closed with a union-find, which is the fixpoint of propagating
instances both ways along every flow.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..boogie import ast as A
from .typecheck import TypeEnv
from .types import alpha_normal, free_tvars, is_concrete, render, subst


@dataclass(frozen=True)
class Instance:
    """One actual map type; ``origin`` names the declaration owning its free type variables."""

    type: A.MapType
    origin: Optional[str] = None

    @property
    def concrete(self) -> bool:
        return is_concrete(self.type)


@dataclass
class InstantiationSet:
    item: str
    type_name: str
    types: list = field(default_factory=list)  # of Instance, deduplicated up to renaming


@dataclass
class Analysis:
    poly_types: dict  # pM name -> polymorphic MapType
    items: dict  # item key -> InstantiationSet
    per_type: dict  # pM -> list of Instance
    concrete_plus: dict  # pM -> list of MapType, M_a last
    fresh_types: list  # names of fresh uninterpreted types used by M_a instances
    fresh_for: dict  # pM -> MapType with fresh types (M_a)

    def types_of(self, key: str) -> list:
        return [i.type for i in self.items[key].types] if key in self.items else []

    def dump(self) -> str:
        lines = []
        for key, s in self.items.items():
            body = ", ".join(render(i.type) for i in s.types)
            lines.append(f"{key} : {{{body}}}")
        return "\n".join(lines)


def poly_map_synonyms(env: TypeEnv) -> dict:
    """Parameterless synonyms whose definition is a polymorphic map type."""
    return {
        name: info.synonym
        for name, info in env.types.items()
        if not info.params and isinstance(info.synonym, A.MapType) and info.synonym.tparams
    }


def pm_type_of(item, poly: dict) -> Optional[str]:
    t = item.decl_type
    if isinstance(t, A.CtorType) and not t.args and t.name in poly:
        return t.name
    return None


def _canon(t: A.MapType):
    """Key identifying instances equal up to consistent renaming of free type variables."""
    order: list[str] = []

    def collect(x):
        if isinstance(x, A.TypeVar) and x.name not in order:
            order.append(x.name)
        elif isinstance(x, A.CtorType):
            for a in x.args:
                collect(a)
        elif isinstance(x, A.MapType):
            for d in x.domain:
                collect(d)
            collect(x.codomain)

    collect(alpha_normal(t))
    free = [n for n in order if n in free_tvars(t)]
    return alpha_normal(subst(t, {n: A.TypeVar(f"$%{i}") for i, n in enumerate(free)}))


class _UF:
    def __init__(self):
        self.parent: dict[str, str] = {}

    def find(self, x: str) -> str:
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def fresh_type_names(count: int, taken: set) -> list[str]:
    out = []
    for i in range(count):
        base = chr(ord("a") + i) if i < 26 else f"a{i}"
        name, k = base, 0
        while name in taken:
            k += 1
            name = f"{base}_k{k}"
        out.append(name)
    return out


def flow_roots(e: A.Expr) -> list[str]:
    """Item keys whose whole value may flow out of ``e``."""
    if isinstance(e, A.Ident):
        return [e.key] if e.key else []
    if isinstance(e, A.MapUpdate):
        return flow_roots(e.map)
    if isinstance(e, (A.Old, A.Coercion)):
        return flow_roots(e.expr)
    if isinstance(e, A.IfThenElse):
        return flow_roots(e.then) + flow_roots(e.else_)
    return []


class _Walker:
    def __init__(self, env: TypeEnv, pm_items: dict):
        self.env = env
        self.pm_items = pm_items
        self.uf = _UF()
        self.contrib: list[tuple[str, Instance]] = []
        self.tv_origin: list[dict] = []

    def origin_of(self, t) -> Optional[str]:
        for fv in sorted(free_tvars(t)):
            for frame in reversed(self.tv_origin):
                if fv in frame:
                    return frame[fv]
        return None

    def add(self, key: str, inst: A.MapType) -> None:
        if key in self.pm_items and inst is not None:
            self.contrib.append((key, Instance(inst, self.origin_of(inst))))

    def link(self, a_roots, b_roots) -> None:
        for a in a_roots:
            for b in b_roots:
                if a in self.pm_items and b in self.pm_items:
                    self.uf.union(a, b)

    def visit_decl(self, d) -> None:
        name = getattr(d, "name", None)
        tparams = getattr(d, "tparams", ())
        self.tv_origin.append({p: name for p in tparams})
        self.visit(d)
        self.tv_origin.pop()

    def visit(self, n) -> None:
        if isinstance(n, (A.Quantifier, A.Lambda)) and n.tparams:
            self.tv_origin.append({p: "<quantifier>" for p in n.tparams})
            for c in A.children(n):
                self.visit(c)
            self.tv_origin.pop()
            return
        if isinstance(n, (A.MapSelect, A.MapUpdate)) and isinstance(n.map, A.Ident):
            self.add(n.map.key, n.inst)
        elif isinstance(n, A.Binary) and n.op in ("==", "!="):
            self.link(flow_roots(n.left), flow_roots(n.right))
        elif isinstance(n, A.Assign):
            for l, r in zip(n.lhs, n.rhs):
                if isinstance(l, A.Ident):
                    self.link([l.key], flow_roots(r))
        elif isinstance(n, A.Call):
            sig = self.env.procedures[n.name]
            for a, nm in zip(n.args, sig.in_names):
                self.link([f"{n.name}.{nm}"], flow_roots(a))
            for o, nm in zip(n.outs, sig.out_names):
                self.link([f"{n.name}.{nm}"], [o.key])
        elif isinstance(n, A.CallForall):
            sig = self.env.procedures[n.name]
            for a, nm in zip(n.args, sig.in_names):
                if a is not None:
                    self.link([f"{n.name}.{nm}"], flow_roots(a))
        elif isinstance(n, A.FuncApp):
            sig = self.env.functions[n.name]
            for i, (a, nm) in enumerate(zip(n.args, sig.param_names)):
                self.link([f"{n.name}.{nm if nm is not None else '#' + str(i)}"], flow_roots(a))
        for c in A.children(n):
            self.visit(c)


def compute_actual_types(p: A.Program, env: TypeEnv) -> Analysis:
    """Compute ``typesOf`` for every item of polymorphic map type in ``p``."""
    poly = poly_map_synonyms(env)
    pm_items = {}
    for key, it in env.items.items():
        t = pm_type_of(it, poly)
        if t is not None:
            pm_items[key] = t
    w = _Walker(env, pm_items)
    for d in p.decls:
        w.visit_decl(d)

    # union of contributions per component, in occurrence order
    comp: dict[str, list[Instance]] = {}
    for key, inst in w.contrib:
        comp.setdefault(w.uf.find(key), []).append(inst)

    items = {}
    for key, tname in pm_items.items():
        seen = set()
        kept = []
        for inst in comp.get(w.uf.find(key), []):
            c = _canon(inst.type)
            if c not in seen:
                seen.add(c)
                kept.append(inst)
        items[key] = InstantiationSet(key, tname, kept)

    per_type: dict[str, list[Instance]] = {name: [] for name in poly}
    seen_t: dict[str, set] = {name: set() for name in poly}
    for key, s in items.items():
        for inst in s.types:
            c = _canon(inst.type)
            if c not in seen_t[s.type_name]:
                seen_t[s.type_name].add(c)
                per_type[s.type_name].append(inst)

    taken = set(env.types) | {"int", "real", "bool"}
    max_params = max((len(t.tparams) for t in poly.values()), default=0)
    names = fresh_type_names(max_params, taken)
    fresh_for = {}
    used: set[str] = set()
    concrete_plus = {}
    for name, mt in poly.items():
        mapping = {p: A.CtorType(names[i]) for i, p in enumerate(mt.tparams)}
        ma = A.MapType((), tuple(subst(d, mapping) for d in mt.domain), subst(mt.codomain, mapping))
        fresh_for[name] = ma
        used.update(names[i] for i, p in enumerate(mt.tparams) if p in _mentioned(mt))
        conc = [i.type for i in per_type[name] if i.concrete]
        if ma not in conc:
            conc.append(ma)
        concrete_plus[name] = conc
    fresh = [n for n in names if n in used]
    return Analysis(poly, items, per_type, concrete_plus, fresh, fresh_for)


def _mentioned(mt: A.MapType) -> set:
    return set().union(*(free_tvars(d) for d in mt.domain), free_tvars(mt.codomain))
