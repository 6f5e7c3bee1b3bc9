from __future__ import annotations

import re

from hypothesis import given, settings
from hypothesis import strategies as st

from b2w.whyml import ast as W
from b2w.whyml.printer import print_expr, print_type, print_whyml
from b2w.whyml.validate import validate_output

from conftest import translate

# --------------------------------------------------------------- a reader for printed infix terms
# Levels follow Why3's grammar: implication lowest and right-associative,
# then disjunction, conjunction, negation, non-associative comparison,
# additive, multiplicative.

LEVELS = [("->",), ("\\/",), ("/\\",), ("=", "<>", "<"), ("+", "-"), ("*",)]
RIGHT = {"->", "\\/", "/\\"}
TOKEN = re.compile(r"\s*(->|\\/|/\\|<>|not\b|[=<+\-*()]|[a-z]\w*|\d+)")


def lex(s: str) -> list[str]:
    out, pos = [], 0
    s = s.strip()
    while pos < len(s):
        m = TOKEN.match(s, pos)
        assert m, s[pos:]
        out.append(m.group(1))
        pos = m.end()
    return out


class Reader:
    def __init__(self, text: str):
        self.toks, self.i = lex(text), 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self):
        self.i += 1
        return self.toks[self.i - 1]

    def level(self, k: int):
        if k == 3 and self.peek() == "not":
            self.take()
            return ("not", self.level(3))
        if k == len(LEVELS):
            return self.atom()
        left = self.level(k + 1)
        ops = LEVELS[k]
        if ops[0] in RIGHT:
            if self.peek() in ops:
                op = self.take()
                return (op, left, self.level(k))
            return left
        if k == 3:
            if self.peek() in ops:
                op = self.take()
                right = self.level(k + 1)
                assert self.peek() not in ops, "comparison is non-associative"
                return (op, left, right)
            return left
        while self.peek() in ops:
            op = self.take()
            left = (op, left, self.level(k + 1))
        return left

    def atom(self):
        t = self.take()
        if t == "(":
            e = self.level(0)
            assert self.take() == ")"
            return e
        return t

    def read(self):
        e = self.level(0)
        assert self.peek() is None
        return e


def shape(e):
    if isinstance(e, (W.Var, W.Lit)):
        return e.name if isinstance(e, W.Var) else e.text
    if isinstance(e, W.Not):
        return ("not", shape(e.expr))
    return (e.op, shape(e.left), shape(e.right))


ARITH = st.recursive(
    st.one_of(st.sampled_from("xyz").map(W.Var), st.integers(0, 9).map(lambda n: W.Lit(str(n)))),
    lambda kids: st.builds(W.Infix, st.sampled_from(["+", "-", "*"]), kids, kids),
    max_leaves=6,
)
PROP = st.recursive(
    st.builds(W.Infix, st.sampled_from(["=", "<>", "<"]), ARITH, ARITH),
    lambda kids: st.one_of(
        st.builds(W.Infix, st.sampled_from(["->", "\\/", "/\\"]), kids, kids),
        st.builds(W.Not, kids),
    ),
    max_leaves=6,
)


@settings(max_examples=300, deadline=None)
@given(PROP)
def test_printed_terms_read_back_to_same_tree(e):
    assert Reader(print_expr(e)).read() == shape(e)


def test_minimal_parentheses():
    x, y, z = W.Var("x"), W.Var("y"), W.Var("z")
    assert print_expr(W.Infix("-", W.Infix("-", x, y), z)) == "x - y - z"
    assert print_expr(W.Infix("-", x, W.Infix("-", y, z))) == "x - (y - z)"
    assert print_expr(W.Infix("->", W.Infix("->", x, y), z)) == "(x -> y) -> z"
    assert print_expr(W.Infix("->", x, W.Infix("->", y, z))) == "x -> y -> z"
    assert print_expr(W.Infix(">.", W.App("pow", (W.Lit("2.0"), W.Lit("3.0"))), W.Lit("0.0"))) == "(pow 2.0 3.0) >. 0.0"
    assert print_expr(W.Neg(W.Var("n"))) == "-n"
    assert print_expr(W.App("f", (W.App("g", (x,)), y))) == "f (g x) y"


def test_types():
    m = W.TApp("map", (W.TApp("int"), W.TApp("map", (W.TApp("bool"), W.TVar("a")))))
    assert print_type(m) == "map int (map bool 'a)"
    assert print_type(W.TTuple((W.TApp("int"), W.TApp("real")))) == "(int, real)"


def test_empty_loop_body_prints_unit():
    m = W.Module("M", (), (W.LetDef("p", (), W.UNIT_T, (), W.While(W.Lit("true"), (), W.Seq(()))),))
    text = print_whyml(m)
    assert re.search(r"do\s+\(\)\s+done", text)


def test_printing_is_deterministic(corpus_file):
    src = corpus_file.read_text()
    assert translate(src).text == translate(src).text


# --------------------------------------------------------------- validator


def module(*decls):
    return W.Module("M", (), decls)


def messages(m):
    return [d.message for d in validate_output(m)]


def test_valid_module_has_no_problems(corpus_file):
    assert validate_output(translate(corpus_file.read_text()).module) == []


def test_undeclared_value():
    (msg,) = messages(module(W.Axiom("a", W.Var("ghost"))))
    assert "'ghost' is used before it is declared" in msg


def test_undeclared_type():
    (msg,) = messages(module(W.Constant("c", W.TApp("t"))))
    assert "type 't'" in msg


def test_duplicate_declaration():
    (msg,) = messages(module(W.Constant("c", W.TApp("int")), W.Constant("c", W.TApp("int"))))
    assert "declared twice" in msg


def test_shadowing_reports_both_positions():
    from b2w.diagnostics import Span

    outer, inner = Span("a.bpl", 1, 1, 1, 2), Span("a.bpl", 4, 9, 4, 10)
    body = W.LetIn(("v",), W.Lit("1"), W.Var("v"), span=inner)
    (msg,) = messages(module(W.Constant("v", W.TApp("int"), span=outer), W.LetDef("p", (), W.TApp("int"), (), body)))
    assert "a.bpl:4:9" in msg and "a.bpl:1:1" in msg and "shadows" in msg


def test_identifier_charset():
    problems = messages(module(W.Constant("Big", W.TApp("int")), W.Exception_("small")))
    assert len(problems) == 2
    assert all("not a legal identifier" in p for p in problems)


def test_undeclared_exception_and_label():
    body = W.Seq((W.Raise("Oops"), W.Assert(W.At(W.Lit("1"), "Nowhere"))))
    problems = messages(module(W.LetDef("p", (), W.UNIT_T, (), body)))
    assert any("exception 'Oops'" in p for p in problems)
    assert any("label 'Nowhere'" in p for p in problems)


def test_label_in_scope_is_accepted():
    body = W.Labeled("Begin", W.Assert(W.Infix("=", W.Lit("1"), W.At(W.Lit("1"), "Begin"))))
    assert messages(module(W.LetDef("p", (), W.UNIT_T, (), body))) == []


def test_every_identifier_is_legal(corpus_file):
    text = translate(corpus_file.read_text()).text
    for m in re.finditer(r"^(?:constant|function|predicate|val|let|type)\s+([^\s:(]+)", text, re.M):
        assert re.fullmatch(r"[a-z_][A-Za-z0-9_']*|\(<:\)", m.group(1)), m.group(0)
