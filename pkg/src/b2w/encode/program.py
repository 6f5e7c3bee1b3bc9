"""Whole-program encoding: naming, prelude, canonical declaration order, imports."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..boogie import ast as A
from ..diagnostics import DiagnosticSink
from ..sema.typecheck import TypeEnv
from ..whyml import ast as W
from .context import IMPORT_ORDER, EncodeContext, EncodeOptions, encode_type, type_var_names
from .exprs import function_key, procedure_key, term
from .names import RenameMap, Renamer, sanitize_module
from .procedures import ImplSource, encode_implementations, encode_val

_A = W.TVar("a")


@dataclass
class EncodeResult:
    module: W.Module
    renames: RenameMap
    imports: tuple
    goals: dict = field(default_factory=dict)  # impl name -> (procedure, implementation index)


def _type_refs(t, out: set) -> set:
    if isinstance(t, A.CtorType):
        out.add(t.name)
        for a in t.args:
            _type_refs(a, out)
    elif isinstance(t, A.MapType):
        for x in t.domain + (t.codomain,):
            _type_refs(x, out)
    return out


def _sorted_types(decls: list) -> list:
    """Type declarations with synonyms after the types they mention (stable otherwise)."""
    by_name = {d.name: d for d in decls}
    deps = {d.name: {n for n in _type_refs(d.synonym, set()) if n in by_name and n not in d.params} for d in decls}
    done: list = []
    placed: set = set()
    while len(done) < len(decls):
        progressed = False
        for d in decls:
            if d.name not in placed and deps[d.name] <= placed:
                done.append(d)
                placed.add(d.name)
                progressed = True
        if not progressed:  # cyclic synonyms are rejected by the typechecker
            done.extend(d for d in decls if d.name not in placed)
            break
    return done


def _implementations(p: A.Program) -> dict:
    impls: dict[str, list] = {}
    for d in p.decls:
        if isinstance(d, A.ProcedureDecl) and d.body is not None:
            lst = impls.setdefault(d.name, [])
            lst.append(ImplSource(len(lst), d.ins, d.outs, d.body, d.span))
        elif isinstance(d, A.Implementation):
            lst = impls.setdefault(d.name, [])
            lst.append(ImplSource(len(lst), d.ins, d.outs, d.body, d.span))
    return impls


def _prelude(ctx: EncodeContext) -> list:
    out: list = []
    for exn in ("Return", "Break"):
        if exn in ctx.uses:
            out.append(W.Exception_(exn))
    if "havoc" in ctx.uses:
        out.append(W.Val("havoc", (), _A, ()))
    if "po" in ctx.uses:
        x, y, z = W.Var("x"), W.Var("y"), W.Var("z")
        po = lambda a, b: W.Infix("<:", a, b)
        out.append(W.Function("(<:)", (W.Param("x", _A), W.Param("y", _A)), None))
        out.append(W.Axiom("ReflexivePO", W.Quant("forall", (W.Binder(("x",), _A),), (), po(x, x))))
        out.append(W.Axiom("AntisymmetricPO", W.Quant(
            "forall", (W.Binder(("x", "y"), _A),), (),
            W.Infix("->", W.Infix("/\\", po(x, y), po(y, x)), W.Infix("=", x, y)))))
        out.append(W.Axiom("TransitivePO", W.Quant(
            "forall", (W.Binder(("x", "y", "z"), _A),), (),
            W.Infix("->", W.Infix("/\\", po(x, y), po(y, z)), po(x, z)))))
    if "yes" in ctx.uses:
        ctx.imports.add("bool.Bool")
        out.append(W.Function("yes", (W.Param("x", _A),), W.TApp("bool"), W.Lit("true")))
    return out


def _bitvector_decls(ctx: EncodeContext) -> tuple[list, list]:
    bv = ctx.bv
    types = [W.TypeDecl(f"bv{w}") for w in sorted(bv.widths)]
    funcs: list = []
    if bv.widths:
        ctx.imports.update(("int.Int", "int.EuclideanDivision"))
    for w in sorted(bv.widths):
        funcs.append(W.Constant(f"size_bv{w}", W.TApp("int"), W.Lit(str(w))))
    for w in sorted(bv.literals):
        funcs.append(W.Function(f"of_int_bv{w}", (W.Param("x", W.TApp("int")),), W.TApp(f"bv{w}")))
    for w, hi, lo in sorted(bv.extracts):
        funcs.append(W.Function(f"extract_{w}_{hi}_{lo}", (W.Param("x", W.TApp(f"bv{w}")),), W.TApp(f"bv{hi - lo}")))
    for w1, w2 in sorted(bv.cats):
        funcs.append(W.Function(
            f"cat_{w1}_{w2}",
            (W.Param("x", W.TApp(f"bv{w1}")), W.Param("y", W.TApp(f"bv{w2}"))),
            W.TApp(f"bv{w1 + w2}"),
        ))
    return types, funcs


def _reserve_bitvector_names(p: A.Program, renamer: Renamer) -> None:
    for n in A.walk(p):
        if isinstance(n, A.BvType):
            renamer.types.taken.add(f"bv{n.width}")
            renamer.values.taken.update({f"size_bv{n.width}", f"of_int_bv{n.width}"})
        elif isinstance(n, A.BvExtract):
            renamer.values.taken.add(f"extract_{n.base.ty.width}_{n.hi}_{n.lo}")
        elif isinstance(n, A.Binary) and n.op == "++":
            renamer.values.taken.add(f"cat_{n.left.ty.width}_{n.right.ty.width}")


def encode_program(
    p: A.Program,
    env: TypeEnv,
    module_name: str = "Main",
    options: EncodeOptions | None = None,
    sink: DiagnosticSink | None = None,
    inst=None,
) -> EncodeResult:
    """Encode a desugared, typechecked program as one WhyML module."""
    ctx = EncodeContext(env, options, sink)
    rn = ctx.renamer
    _reserve_bitvector_names(p, rn)

    # ---- global names, textual order within each namespace
    for d in p.decls:
        if isinstance(d, A.TypeDecl):
            rn.global_type(d.name, d.name)
    for d in p.decls:
        if isinstance(d, A.ConstDecl):
            for n in d.names:
                rn.global_value(n, n)
        elif isinstance(d, A.VarDecl):
            for b in d.bindings:
                rn.global_value(b.key, b.name)
        elif isinstance(d, A.FunctionDecl):
            rn.global_value(function_key(d.name), d.name)
        elif isinstance(d, A.ProcedureDecl):
            rn.global_value(procedure_key(d.name), d.name)
    impls = _implementations(p)
    impl_names: dict = {}
    goals: dict = {}
    for d in p.decls:
        if isinstance(d, A.ProcedureDecl):
            base = rn.value(procedure_key(d.name))
            for impl in impls.get(d.name, []):
                impl_names[(d.name, impl.index)] = rn.derived_value(f"{base}_impl{impl.index}")
                goals[impl_names[(d.name, impl.index)]] = (d.name, impl.index)
                if ctx.options.frame_checks and d.modifies:
                    impl_names[(d.name, impl.index, "frame")] = rn.derived_value(f"{base}_impl{impl.index}_frame")

    # ---- declarations
    types: list = []
    for d in _sorted_types([d for d in p.decls if isinstance(d, A.TypeDecl)]):
        if d.finite:
            ctx.sink.note(f"'finite' modifier on type '{d.name}' ignored", d.span, "finite")
        ctx.drop_attributes(d.attrs, f"type '{d.name}'")
        ctx.tvars = type_var_names(d.params)
        definition = encode_type(d.synonym, ctx, d.span) if d.synonym is not None else None
        types.append(W.TypeDecl(rn.type_name(d.name), tuple(ctx.tvars[x] for x in d.params), definition, span=d.span))
        ctx.tvars = {}

    globals_: list = []
    logic: list = []
    axioms: list = []
    vals: list = []
    lets: list = []
    for d in p.decls:
        if isinstance(d, A.VarDecl):
            ctx.drop_attributes(d.attrs, "a variable declaration")
            for b in d.bindings:
                globals_.append(W.ValGlobal(rn.value(b.key), encode_type(b.type, ctx, b.span), span=b.span))
        elif isinstance(d, A.ConstDecl):
            ctx.drop_attributes(d.attrs, "a constant declaration")
            for n in d.names:
                logic.append(W.Constant(rn.value(n), encode_type(d.type, ctx, d.span), span=d.span))
        elif isinstance(d, A.FunctionDecl):
            logic.append(_function(d, ctx))
        elif isinstance(d, A.AxiomDecl):
            ctx.drop_attributes(d.attrs, "an axiom")
            saved = ctx.enter(None, (), None, owner=f"axiom#{len(axioms)}")
            try:
                ctx.generic_ok = True
                e = term(d.expr, ctx)
            finally:
                ctx.generic_ok = False
                ctx.leave(saved)
            axioms.append(W.Axiom(f"A{len(axioms)}", e, span=d.span))
        elif isinstance(d, A.ProcedureDecl):
            ctx.drop_attributes(d.attrs, f"procedure '{d.name}'")
            vals.append(encode_val(d, ctx))
    for d in p.decls:
        if isinstance(d, A.ProcedureDecl):
            lets.extend(encode_implementations(d, impls.get(d.name, []), ctx, impl_names))
        elif isinstance(d, A.Implementation):
            ctx.drop_attributes(d.attrs, f"an implementation of '{d.name}'")

    bv_types, bv_funcs = _bitvector_decls(ctx)
    prelude = _prelude(ctx)
    decls = tuple(prelude + bv_types + types + globals_ + bv_funcs + logic + axioms + vals + lets)
    imports = tuple(i for i in IMPORT_ORDER if i in ctx.imports)
    module = W.Module(sanitize_module(module_name), tuple(W.Use(i) for i in imports), decls)
    return EncodeResult(module, rn.map, imports, goals)


def _function(d: A.FunctionDecl, ctx: EncodeContext) -> W.Function:
    ctx.drop_attributes(d.attrs, f"function '{d.name}'")
    saved = ctx.enter(None, (), None, d.tparams, owner=f"function:{d.name}")
    try:
        params = []
        for i, b in enumerate(d.params):
            name = ctx.renamer.local(b.key, b.name if b.name is not None else f"x{i}")
            params.append(W.Param(name, encode_type(b.type, ctx, b.span), span=b.span))
        result = encode_type(d.result.type, ctx, d.span)
    finally:
        ctx.leave(saved)
    return W.Function(ctx.renamer.value(function_key(d.name)), tuple(params), result, span=d.span)
