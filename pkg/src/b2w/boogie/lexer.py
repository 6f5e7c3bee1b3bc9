"""Tokenizer for Boogie source text."""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..diagnostics import BoogieSyntaxError, Diagnostic, ERROR, Span

KEYWORDS = frozenset(
    """
    assert assume axiom bool break call complete const div else ensures exists
    extends false finite forall free function goto havoc if implementation int
    invariant lambda mod modifies old procedure real requires return returns then
    true type unique var where while
    """.split()
)

# longest first
OPERATORS = [
    "<==>", "==>", "<==", "&&", "||", "==", "!=", "<=", ">=", "<:", ":=", "::",
    "++", "**", "<", ">", "+", "-", "*", "/", "!", ":", ";", ",", "(", ")", "[",
    "]", "{", "}", "|", "=",
]

_IDENT_START = r"A-Za-z'~#$\^_.?`\\"
_IDENT_REST = _IDENT_START + r"0-9"

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+|\n)
  | (?P<lcomment>//[^\n]*)
  | (?P<bcomment>/\*)
  | (?P<bv>[0-9]+bv[0-9]+)
  | (?P<dec>[0-9]+\.[0-9]+(?:e-?[0-9]+)?|[0-9]+e-?[0-9]+)
  | (?P<int>[0-9]+)
  | (?P<bvtype>bv[0-9]+(?![%s]))
  | (?P<ident>[%s][%s]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<op>%s)
    """
    % (
        _IDENT_REST,
        _IDENT_START,
        _IDENT_REST,
        "|".join(re.escape(o) for o in OPERATORS),
    ),
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # ident kw int dec bv bvtype string op eof
    text: str
    span: Span

    def is_(self, text: str) -> bool:
        return self.text == text and self.kind in ("op", "kw")


def tokenize(source: str, origin: str = "<input>") -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    line, col = 1, 1
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            sp = Span(origin, line, col, line, col + 1)
            raise BoogieSyntaxError(
                f"unexpected character {source[pos]!r}",
                sp,
                diagnostics=[Diagnostic(ERROR, f"unexpected character {source[pos]!r}", sp, "syntax")],
            )
        kind = m.lastgroup
        text = m.group()
        if kind == "bcomment":
            end = source.find("*/", pos + 2)
            if end < 0:
                sp = Span(origin, line, col, line, col + 2)
                raise BoogieSyntaxError("unterminated comment", sp)
            text = source[pos : end + 2]
        start_line, start_col = line, col
        nl = text.count("\n")
        if nl:
            line += nl
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos += len(text)
        if kind in ("ws", "lcomment", "bcomment"):
            continue
        if kind == "ident" and text in KEYWORDS:
            kind = "kw"
        tokens.append(Token(kind, text, Span(origin, start_line, start_col, line, col)))
    tokens.append(Token("eof", "", Span(origin, line, col, line, col)))
    return tokens
