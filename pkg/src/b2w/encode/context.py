"""State threaded through the encoding of one program."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..boogie import ast as A
from ..diagnostics import DiagnosticSink, Unsupported
from ..sema.typecheck import TypeEnv
from ..whyml import ast as W
from .names import Namespace, Renamer, sanitize_value

INT_IMPORTS = ("int.Int", "int.EuclideanDivision")
REAL_IMPORTS = ("real.RealInfix", "real.FromInt", "real.Truncate", "real.PowerReal")
BOOL_IMPORTS = ("bool.Bool",)
MAP_IMPORTS = ("map.Map",)
REF_IMPORTS = ("ref.Ref",)
IMPORT_ORDER = INT_IMPORTS + REAL_IMPORTS + BOOL_IMPORTS + MAP_IMPORTS + REF_IMPORTS

BEGIN_LABEL = "Begin"


@dataclass(frozen=True)
class EncodeOptions:
    frame_checks: bool = False
    bv_compat: bool = False


@dataclass
class Bitvectors:
    """Uninterpreted bit-vector vocabulary gathered under the compatibility flag."""

    widths: set = field(default_factory=set)
    literals: set = field(default_factory=set)  # widths with literal occurrences
    extracts: set = field(default_factory=set)  # (width, hi, lo)
    cats: set = field(default_factory=set)  # (width1, width2)


class EncodeContext:
    def __init__(self, env: TypeEnv, options: EncodeOptions | None = None, sink: DiagnosticSink | None = None,
                 renamer: Renamer | None = None):
        self.env = env
        self.options = options or EncodeOptions()
        self.sink = sink if sink is not None else DiagnosticSink()
        self.renamer = renamer or Renamer()
        self.imports: set[str] = set(REF_IMPORTS)
        self.uses: set[str] = set()  # havoc, po, yes, Return, Break
        self.bv = Bitvectors()
        # routine-local state
        self.proc: Optional[str] = None
        self.refs: frozenset = frozenset()
        self.old_mode: Optional[str] = None  # "old" | "at" | None
        self.loops: list[frozenset] = []
        self.tvars: dict[str, str] = {}
        self.generic_ok = False

    # ------------------------------------------------------------ routine scoping

    def enter(self, proc: Optional[str], refs, old_mode, tparams=(), owner: str = "local") -> dict:
        saved = dict(proc=self.proc, refs=self.refs, old_mode=self.old_mode, loops=self.loops, tvars=self.tvars)
        self.proc, self.refs, self.old_mode, self.loops = proc, frozenset(refs), old_mode, []
        self.tvars = type_var_names(tparams)
        self.renamer.push(owner)
        return saved

    def leave(self, saved: dict) -> None:
        self.renamer.pop()
        for k, v in saved.items():
            setattr(self, k, v)

    # ------------------------------------------------------------ diagnostics

    def drop_attributes(self, attrs, where: str) -> None:
        for a in attrs:
            if a.name == "nopats":
                self.sink.warn(f"negated trigger on {where} dropped", a.span, "attribute")
            else:
                self.sink.warn(f"attribute ':{a.name}' on {where} dropped", a.span, "attribute")

    # ------------------------------------------------------------ types

    def need_type(self, t: Optional[A.BoogieType]) -> None:
        if t is None:
            return
        if isinstance(t, A.PrimType):
            self.imports.update({"int": INT_IMPORTS, "real": REAL_IMPORTS, "bool": BOOL_IMPORTS}[t.name])
        elif isinstance(t, A.MapType):
            self.imports.update(MAP_IMPORTS)
            for x in t.domain + (t.codomain,):
                self.need_type(x)
        elif isinstance(t, A.CtorType):
            for x in t.args:
                self.need_type(x)

    def encode_type(self, t: A.BoogieType, span=None) -> W.WType:
        return encode_type(t, self, span)


def type_var_names(tparams) -> dict[str, str]:
    ns = Namespace()
    return {tp: ns.allocate(sanitize_value(tp)) for tp in tparams}


def encode_type(t: A.BoogieType, ctx: EncodeContext, span=None) -> W.WType:
    """WhyML type of a monomorphic Boogie type; records the library imports it needs."""
    span = span or t.span
    if isinstance(t, A.PrimType):
        ctx.need_type(t)
        return W.TApp(t.name)
    if isinstance(t, A.BvType):
        if not ctx.options.bv_compat:
            raise Unsupported(f"bit-vector type bv{t.width} is not supported (use --bv-compat)", span)
        ctx.bv.widths.add(t.width)
        return W.TApp(f"bv{t.width}")
    if isinstance(t, A.TypeVar):
        return W.TVar(ctx.tvars.get(t.name) or sanitize_value(t.name))
    if isinstance(t, A.CtorType):
        if not t.args and t.name in ctx.tvars:
            return W.TVar(ctx.tvars[t.name])
        args = tuple(encode_type(a, ctx, span) for a in t.args)
        return W.TApp(ctx.renamer.type_name(t.name), args)
    if isinstance(t, A.MapType):
        if t.tparams:
            raise Unsupported("polymorphic map type survived desugaring", span)
        ctx.imports.update(MAP_IMPORTS)
        dom = [encode_type(d, ctx, span) for d in t.domain]
        key = dom[0] if len(dom) == 1 else W.TTuple(tuple(dom))
        return W.TApp("map", (key, encode_type(t.codomain, ctx, span)))
    raise Unsupported(f"cannot translate type {t!r}", span)


def result_type(types: list) -> W.WType:
    if not types:
        return W.UNIT_T
    if len(types) == 1:
        return types[0]
    return W.TTuple(tuple(types))
