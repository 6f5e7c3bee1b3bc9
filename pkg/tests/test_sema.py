from __future__ import annotations

import pytest

from b2w.boogie import ast as A
from b2w.boogie.parser import parse_boogie
from b2w.diagnostics import BoogieTypeError, UnresolvedName
from b2w.sema.typecheck import typecheck

from conftest import nodes


def check(src):
    return typecheck(parse_boogie(src, "t.bpl"))


def test_corpus_typechecks(corpus_file):
    check(corpus_file.read_text())


@pytest.mark.parametrize(
    "src, fragment",
    [
        ("var x: int; procedure p() modifies x; { x := true; }", "bool"),
        ("axiom 1 + true == 2;", "bool"),
        ("procedure p() { assert 1; }", "bool"),
        ("const m: [int]bool; axiom m[true];", "int"),
        ("var g: int; axiom g > 0;", "axiom"),
        ("var x: int; procedure p() { x := 1; }", "modifies"),
        ("function f(x: int) returns (bool); axiom f(1, 2);", "argument"),
        ("procedure p(x: int); procedure q() { call p(true); }", "bool"),
    ],
)
def test_type_errors(src, fragment):
    with pytest.raises(BoogieTypeError) as ei:
        check(src)
    assert fragment in ei.value.diagnostics[0].message
    assert ei.value.diagnostics[0].span is not None


@pytest.mark.parametrize("src", ["axiom y > 0;", "procedure p() { call q(); }", "var v: U;"])
def test_unresolved_names(src):
    with pytest.raises(UnresolvedName):
        check(src)


def test_cyclic_synonyms_rejected():
    with pytest.raises(BoogieTypeError) as ei:
        check("type A = B; type B = [int]A;")
    assert "cycl" in ei.value.diagnostics[0].message


def test_duplicate_in_scope_rejected():
    with pytest.raises(BoogieTypeError):
        check("procedure p() { var x: int; var x: bool; }")


def test_where_clauses_and_implementations_indexed():
    env = check(
        """
        var g: int where g > 0;
        procedure p(t: int where t < 3) returns (u: int) { var l: int where l == 1; }
        implementation p(t: int) returns (u: int) { }
        """
    )
    names = sorted(env.item(k).name for k in env.where_of)
    assert names == ["g", "l", "t"]
    assert env.implementations["p"] == [0, 1]


def test_identifiers_resolve_to_items():
    env = check("var x: int; procedure p(x: int) { assert x == x; }")
    ids = [i for i in nodes(env.program, A.Ident) if i.name == "x"]
    assert {env.item(i.key).kind for i in ids} == {"in"}
    assert env.shadowing, "formal x shadows global x"


def test_polymorphic_function_instantiation():
    env = check("function id<a>(x: a) returns (a); axiom id(1) == 1 && id(true);")
    apps = nodes(env.program, A.FuncApp)
    assert {str(a.ty) for a in apps} == {str(A.PrimType("int")), str(A.PrimType("bool"))}


def test_synonym_expansion_is_transparent():
    env = check("type Arr = [int]int; var a: Arr; procedure p() modifies a; { a[0] := 1; }")
    assert isinstance(env.item("a").type, A.MapType)
