"""Command-line driver: parse, typecheck, desugar, encode, validate, print."""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from .boogie import ast as A
from .boogie.parser import parse_boogie_with_notes
from .boogie.printer import print_boogie
from .desugar import GOTO_MODES, DesugarConfig, desugar
from .diagnostics import ERROR, B2WError, Diagnostic, DiagnosticSink, InputError, TranslationFailure, use_color
from .encode import EncodeOptions, encode_program
from .encode.names import sanitize_module
from .sema.typecheck import typecheck
from .whyml.printer import print_whyml
from .whyml.validate import validate_output

EXIT_OK, EXIT_WARNINGS, EXIT_FAILURE, EXIT_INPUT = 0, 1, 2, 3


@dataclass
class TranslateConfig:
    output: str | None = None
    goto_mode: str = "assert-false"
    frame_checks: bool = False
    mono_cap: int = 64
    bv_compat: bool = False
    dump_desugared: bool = False


@dataclass
class TranslationReport:
    input: str
    output: str | None = None
    exit_code: int = EXIT_OK
    passes: list = field(default_factory=list)  # (name, ms)
    warnings: list = field(default_factory=list)  # Diagnostic
    notes: list = field(default_factory=list)  # Diagnostic
    errors: list = field(default_factory=list)  # Diagnostic
    renames: list = field(default_factory=list)
    imports: list = field(default_factory=list)
    assumptions: list = field(default_factory=list)
    goals: dict = field(default_factory=dict)  # WhyML implementation -> Boogie implementation it checks
    desugared: str | None = None

    def to_dict(self, timings: bool = True) -> dict:
        return {
            "input": self.input,
            "output": self.output,
            "exit_code": self.exit_code,
            "passes": [{"name": n, "ms": ms} if timings else {"name": n} for n, ms in self.passes],
            "warnings": [d.to_json() for d in self.warnings],
            "notes": [d.to_json() for d in self.notes],
            "errors": [d.to_json() for d in self.errors],
            "renames": self.renames,
            "imports": self.imports,
            "assumptions": self.assumptions,
            "goals": self.goals,
        }

    def to_json(self, timings: bool = True) -> str:
        return json.dumps(self.to_dict(timings), indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"input: {self.input}", f"output: {self.output or '-'}", f"exit code: {self.exit_code}"]
        lines.append("passes:")
        lines += [f"  {n:<28} {ms:9.3f} ms" for n, ms in self.passes]
        for title, items in (("errors", self.errors), ("warnings", self.warnings), ("notes", self.notes)):
            lines.append(f"{title}: {len(items)}")
            lines += ["  " + d.format() for d in items]
        lines.append(f"renames: {len(self.renames)}")
        lines += [f"  {r['namespace']} {r['boogie']} -> {r['whyml']}" for r in self.renames]
        lines.append("imports: " + ", ".join(self.imports))
        lines += ["assumption: " + a for a in self.assumptions]
        return "\n".join(lines)


def _assumptions(p: A.Program, env) -> list[str]:
    """Interpretive choices the translation made that the reader should know about."""
    out = []
    out_keys = {b.key for d in p.decls if isinstance(d, A.ProcedureDecl) for b in d.outs}
    if out_keys & set(env.where_of):
        out.append("where clauses of output parameters are assumed at entry and after havoc only")
    for n in A.walk(p):
        if isinstance(n, A.Invariant) and any(isinstance(x, A.Old) for x in A.walk(n.expr)):
            out.append("old() inside a loop invariant refers to the procedure prestate")
            break
    return out


def _write_atomically(target: Path, text: str, source: bytes) -> None:
    digest = hashlib.sha256(source).hexdigest()[:16]
    tmp = target.with_name(f".{target.name}.{digest}.tmp")
    try:
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, target)
    finally:
        if tmp.exists():
            tmp.unlink()


@dataclass
class Translation:
    """Everything one successful run produced."""

    text: str
    module: object
    desugared: object  # DesugarResult
    encoded: object  # EncodeResult
    sink: DiagnosticSink
    passes: list
    goals: dict  # WhyML implementation name -> "procedure/index" of the Boogie implementation


def translate_source(source: str, origin: str = "<input>", config: TranslateConfig | None = None,
                     module_name: str | None = None) -> Translation:
    """Run the whole pipeline on Boogie text; raises :class:`B2WError` on failure."""
    config = config or TranslateConfig()
    sink = DiagnosticSink()
    passes: list = []

    def timed(name, fn, *args):
        t0 = time.perf_counter()
        out = fn(*args)
        passes.append((name, round((time.perf_counter() - t0) * 1000, 3)))
        return out

    program, notes = timed("parse", parse_boogie_with_notes, source, origin)
    sink.items.extend(notes)
    env = timed("typecheck", typecheck, program)
    dcfg = DesugarConfig(goto_mode=config.goto_mode, mono_cap=config.mono_cap, sink=sink)
    result = timed("desugar", desugar, env, dcfg)
    passes += [(f"desugar/{n}", ms) for n, ms in result.log]
    for msg, sp in dcfg.fallbacks:
        sink.warn(msg, sp, "residual-goto")
    options = EncodeOptions(frame_checks=config.frame_checks, bv_compat=config.bv_compat)
    name = sanitize_module(module_name or Path(origin).stem)
    enc = timed("encode", encode_program, result.program, result.env, name, options, sink)
    problems = timed("validate", validate_output, enc.module)
    if problems:
        raise TranslationFailure("emitted module is ill-formed", diagnostics=problems)
    text = timed("print", print_whyml, enc.module)
    goals = {w: f"{dcfg.origins.get(proc, proc)}/{k}" for w, (proc, k) in enc.goals.items()}
    return Translation(text, enc.module, result, enc, sink, passes, goals)


def translate_file(path, config: TranslateConfig | None = None) -> tuple[str | None, TranslationReport]:
    """Translate one Boogie file; the output file exists only when the exit code is 0 or 1."""
    config = config or TranslateConfig()
    path = Path(path)
    report = TranslationReport(str(path))
    try:
        try:
            raw = path.read_bytes()
            source = raw.decode("utf-8")
        except (OSError, UnicodeDecodeError) as e:
            raise InputError(f"cannot read input: {e}") from None
        tr = translate_source(source, str(path), config)
    except InputError as e:
        report.errors = e.diagnostics
        report.exit_code = EXIT_INPUT
        return None, report
    except B2WError as e:
        report.errors = e.diagnostics
        report.exit_code = EXIT_FAILURE
        return None, report
    except RecursionError:
        report.errors = [Diagnostic(ERROR, "input nested too deeply to translate", None, "translation")]
        report.exit_code = EXIT_FAILURE
        return None, report

    report.passes = tr.passes
    report.warnings = tr.sink.warnings
    report.notes = tr.sink.notes
    report.renames = tr.encoded.renames.changed()
    report.imports = list(tr.encoded.imports)
    report.assumptions = _assumptions(tr.desugared.program, tr.desugared.env)
    report.goals = tr.goals
    if config.dump_desugared:
        report.desugared = print_boogie(tr.desugared.program)
    target = Path(config.output) if config.output else path.with_suffix(".mlw")
    _write_atomically(target, tr.text, raw)
    report.output = str(target)
    report.exit_code = EXIT_WARNINGS if report.warnings else EXIT_OK
    return str(target), report


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="b2w", description="Translate a Boogie program into a WhyML module.")
    ap.add_argument("input", help="Boogie source file (.bpl)")
    ap.add_argument("-o", "--output", help="output file (default: input with .mlw suffix)")
    ap.add_argument("--goto", dest="goto_mode", choices=GOTO_MODES, default="assert-false",
                    help="handling of gotos that cannot be structured (default: assert-false)")
    ap.add_argument("--frame-checks", action="store_true", help="emit modifies-clause checking procedures")
    ap.add_argument("--mono-cap", type=int, default=64, metavar="N",
                    help="maximum instantiations per polymorphic map (default: 64)")
    ap.add_argument("--dump-desugared", action="store_true", help="print the desugared Boogie program to stdout")
    ap.add_argument("--report", choices=("json", "text"), help="print the translation report to stdout")
    ap.add_argument("--bv-compat", action="store_true", help="translate bit-vectors as uninterpreted types")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.mono_cap < 1:
        print("b2w: error: --mono-cap must be positive", file=sys.stderr)
        return EXIT_INPUT
    config = TranslateConfig(
        output=args.output,
        goto_mode=args.goto_mode,
        frame_checks=args.frame_checks,
        mono_cap=args.mono_cap,
        bv_compat=args.bv_compat,
        dump_desugared=args.dump_desugared,
    )
    _, report = translate_file(args.input, config)
    color = use_color()
    for d in report.errors + report.warnings + report.notes:
        print(d.format(color), file=sys.stderr)
    if report.desugared is not None:
        sys.stdout.write(report.desugared)
    if args.report == "json":
        print(report.to_json())
    elif args.report == "text":
        print(report.to_text())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
