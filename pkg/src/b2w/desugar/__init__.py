"""Boogie-to-Boogie rewrites removing constructs that have no WhyML counterpart."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from ..boogie import ast as A
from ..diagnostics import InputError, TranslationFailure
from ..sema.analysis import Analysis, compute_actual_types
from ..sema.typecheck import TypeEnv, typecheck
from .call_forall import desugar_call_forall
from .common import GOTO_MODES, DesugarConfig, FreshNames, identifiers
from .constants import desugar_constant_constraints
from .functions import axiomatize_functions
from .gotos import structure_gotos
from .lambdas import desugar_lambdas
from .monomorph import monomorphize_maps, name_poly_maps

__all__ = [
    "GOTO_MODES",
    "DesugarConfig",
    "DesugarResult",
    "FreshNames",
    "axiomatize_functions",
    "desugar",
    "desugar_call_forall",
    "desugar_constant_constraints",
    "desugar_lambdas",
    "monomorphize_maps",
    "structure_gotos",
]


@dataclass
class DesugarResult:
    program: A.Program
    env: TypeEnv
    analysis: Analysis
    log: list = field(default_factory=list)  # (pass name, milliseconds)


def _retypecheck(p: A.Program, after: str) -> TypeEnv:
    try:
        return typecheck(p)
    except InputError as e:
        raise TranslationFailure(f"program produced by {after} does not typecheck: {e.diagnostics[0].message}") from e


def desugar(env: TypeEnv, cfg: DesugarConfig | None = None) -> DesugarResult:
    """Run every pass in the fixed order on a typechecked program."""
    cfg = cfg or DesugarConfig()
    p = env.program
    cfg.fresh.taken |= identifiers(p)
    log: list = []

    def step(name, fn, *args):
        t0 = time.perf_counter()
        out = fn(*args)
        log.append((name, round((time.perf_counter() - t0) * 1000, 3)))
        return out

    p = step("constants", desugar_constant_constraints, p, env, cfg.fresh)
    p = step("lambdas", desugar_lambdas, p, cfg.fresh)
    p = step("call-forall", desugar_call_forall, p, cfg.fresh)
    p = step("function-bodies", axiomatize_functions, p, cfg.fresh)
    p = step("gotos", structure_gotos, p, cfg)
    env = step("retypecheck", _retypecheck, p, "desugaring")
    p = step("name-poly-maps", name_poly_maps, env.program, env, cfg)
    env = step("retypecheck", _retypecheck, p, "map naming")
    an = step("actual-types", compute_actual_types, env.program, env)
    p = step("monomorphize", monomorphize_maps, env.program, env, an, cfg)
    env = step("retypecheck", _retypecheck, p, "monomorphization")
    return DesugarResult(env.program, env, an, log)
