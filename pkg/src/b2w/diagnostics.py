"""Source spans, diagnostics and the exception hierarchy shared by all stages."""

from __future__ import annotations

import os
from dataclasses import dataclass, field


@dataclass(frozen=True, order=True)
class Span:
    file: str
    line: int
    col: int
    end_line: int
    end_col: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col}"

    def contains(self, other: Span) -> bool:
        return (self.line, self.col) <= (other.line, other.col) and (
            other.end_line,
            other.end_col,
        ) <= (self.end_line, self.end_col)

    def to(self, other: Span | None) -> Span:
        if other is None:
            return self
        return Span(self.file, self.line, self.col, other.end_line, other.end_col)


ERROR = "error"
WARNING = "warning"
NOTE = "note"


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    message: str
    span: Span | None = None
    code: str = ""

    def format(self, color: bool = False) -> str:
        where = str(self.span) if self.span is not None else "<unknown>"
        sev = self.severity
        if color:
            tint = {ERROR: "31", WARNING: "33", NOTE: "36"}.get(sev, "0")
            sev = f"\x1b[1;{tint}m{sev}\x1b[0m"
        return f"{where}: {sev}: {self.message}"

    def to_json(self) -> dict:
        d = {"severity": self.severity, "code": self.code, "message": self.message}
        if self.span is not None:
            d["span"] = [self.span.file, self.span.line, self.span.col]
        return d


def use_color() -> bool:
    return os.environ.get("B2W_COLOR", "0") == "1"


class B2WError(Exception):
    """Base class of all translation errors; carries one or more diagnostics."""

    code = "error"

    def __init__(self, message: str, span: Span | None = None, *, diagnostics=None):
        super().__init__(message)
        self.message = message
        self.span = span
        if diagnostics is None:
            diagnostics = [Diagnostic(ERROR, message, span, self.code)]
        self.diagnostics: list[Diagnostic] = list(diagnostics)

    def __str__(self) -> str:
        return "\n".join(d.format() for d in self.diagnostics)


class InputError(B2WError):
    """Problems with the Boogie input itself (syntax, typing, resolution)."""

    code = "input"


class BoogieSyntaxError(InputError):
    code = "syntax"


class BoogieTypeError(InputError):
    code = "type"


class UnresolvedName(BoogieTypeError):
    code = "unresolved"


class TranslationFailure(B2WError):
    """The input is valid Boogie but cannot be translated soundly."""

    code = "translation"


class OrderCycle(TranslationFailure):
    code = "order-cycle"


class FreeVariableCapture(TranslationFailure):
    code = "lambda-capture"


class CalleeHasModifies(TranslationFailure):
    code = "call-forall-modifies"


class ResidualGoto(TranslationFailure):
    code = "residual-goto"


class InstantiationExplosion(TranslationFailure):
    code = "instantiation-explosion"


class MonomorphizationError(TranslationFailure):
    code = "monomorphization"


class Unsupported(TranslationFailure):
    code = "unsupported"


class BreakOutsideLoop(TranslationFailure):
    code = "break-outside-loop"


@dataclass
class DiagnosticSink:
    """Collects warnings and notes emitted by passes that do not abort."""

    items: list[Diagnostic] = field(default_factory=list)

    def warn(self, message: str, span: Span | None = None, code: str = "") -> None:
        d = Diagnostic(WARNING, message, span, code)
        if d not in self.items:
            self.items.append(d)

    def note(self, message: str, span: Span | None = None, code: str = "") -> None:
        d = Diagnostic(NOTE, message, span, code)
        if d not in self.items:
            self.items.append(d)

    @property
    def warnings(self) -> list[Diagnostic]:
        return [d for d in self.items if d.severity == WARNING]

    @property
    def notes(self) -> list[Diagnostic]:
        return [d for d in self.items if d.severity == NOTE]
