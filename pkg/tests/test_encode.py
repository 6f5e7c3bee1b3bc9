from __future__ import annotations

import re
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from b2w.boogie.parser import parse_boogie
from b2w.diagnostics import BreakOutsideLoop, Unsupported
from b2w.encode import EncodeContext, EncodeOptions, encode_type
from b2w.sema.typecheck import typecheck
from b2w.whyml import ast as W
from b2w.whyml.printer import print_expr, print_type

from conftest import CORPUS, translate
from whyml_interp import Interp


def lets(module, suffix="_impl"):
    return [d for d in module.decls if isinstance(d, W.LetDef) and suffix in d.name]


def vals(module):
    return [d for d in module.decls if isinstance(d, W.Val)]


def of(node, cls):
    return [n for n in W.walk(node) if isinstance(n, cls)]


# ---------------------------------------------------------------- types


@pytest.mark.parametrize("boogie, whyml, imports", [
    ("int", "int", {"int.Int"}),
    ("real", "real", {"real.RealInfix"}),
    ("bool", "bool", {"bool.Bool"}),
    ("[int]bool", "map int bool", {"map.Map", "int.Int", "bool.Bool"}),
    ("[int, bool]real", "map (int, bool) real", {"map.Map", "int.Int", "bool.Bool", "real.RealInfix"}),
    ("[int][int]int", "map int (map int int)", {"map.Map", "int.Int"}),
])
def test_type_translation(boogie, whyml, imports):
    env = typecheck(parse_boogie(f"var v: {boogie};"))
    ctx = EncodeContext(env)
    (d,) = env.program.decls
    assert print_type(encode_type(d.bindings[0].type, ctx)) == whyml
    assert imports <= ctx.imports


def test_bitvectors_need_the_compat_flag():
    src = "var v: bv8;"
    with pytest.raises(Unsupported):
        translate(src)
    text = translate(src, bv_compat=True).text
    assert "type bv8" in text and "val v: ref bv8" in text


# ---------------------------------------------------------------- expressions


def body_text(src: str) -> str:
    return translate(src).text.split("'Begin:")[1]


@pytest.mark.parametrize("stmt, expected", [
    ("x := -n;", "x.contents <- -n"),
    ("assert x != x;", "assert { x.contents <> x.contents }"),
    ("assert 2.0 ** 3.0 > 0.0;", "assert { (pow 2.0 3.0) >. 0.0 }"),
    ("assert x div 2 == x mod 2;", "assert { (div x.contents 2) = (mod x.contents 2) }"),
    ("assert real(x) < 1.5;", "assert { (from_int x.contents) <. 1.5 }"),
    ("assert k + x > 0;", "assert { k + x.contents > 0 }"),
    ("assert (forall j: int :: j > 0 ==> j >= 1);", "assert { forall j: int. j > 0 -> j >= 1 }"),
    ("assert m[x] == m[x := 1][x];", "assert { (get m.contents x.contents) = (get (set m.contents x.contents 1) x.contents) }"),
])
def test_expression_translation(stmt, expected):
    src = f"const k: int; var m: [int]int; procedure p(n: int) modifies m; {{ var x: int; {stmt} }}"
    assert expected in body_text(src)


def test_constants_are_not_dereferenced():
    text = translate("const c: int; var g: int; axiom c > 0; procedure p() modifies g; { g := c; }").text
    assert "g.contents <- c" in text and "c.contents" not in text


def test_old_in_postcondition_and_body():
    text = translate(
        "var g: int; procedure p() modifies g; ensures g == old(g) + 1; { g := g + 1; assert g == old(g) + 1; }"
    ).text
    assert "returns" not in text.split("val p")[1].split("let")[0]
    assert "ensures { g.contents = (old g.contents) + 1 }" in text
    assert "assert { g.contents = (at g.contents 'Begin) + 1 }" in text


def test_nondeterministic_guard():
    assert "if any bool then" in body_text("procedure p() { var x: int; if (*) { x := 1; } }")


# ---------------------------------------------------------------- parallel assignment


TARGETS = ["x", "y", "z", "a[i]", "a[j]", "a[x]"]
SOURCES = st.sampled_from(["x", "y", "z", "i", "j", "a[i]", "a[j]", "a[y]", "x + 1", "y - z", "2 * x", "-j", "7"])


def boogie_parallel(lhs, rhs, state):
    """Reference semantics: evaluate every source and index first, then store left to right."""
    def ev(s, st):
        return eval(re.sub(r"a\[(\w)\]", r"a.get(\1, 0)", s), {}, dict(st))

    values = [ev(r, state) for r in rhs]
    new = dict(state, a=dict(state["a"]))
    for target, v in zip(lhs, values):
        m = re.fullmatch(r"a\[(\w)\]", target)
        if m:
            new["a"][ev(m.group(1), state)] = v
        else:
            new[target] = v
    return new


@settings(max_examples=150, deadline=None)
@given(
    st.lists(st.sampled_from(TARGETS), min_size=1, max_size=4, unique=True).filter(
        lambda ts: sum(t.startswith("a") for t in ts) <= 3
    ),
    st.data(),
    st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3),
)
def test_parallel_assignment_matches_reference_semantics(lhs, data, i, j, x, y, z):
    rhs = [data.draw(SOURCES) for _ in lhs]
    src = (
        "var a: [int]int;\n"
        "procedure p(i: int, j: int) returns (x: int, y: int, z: int) modifies a;\n"
        f"{{ {', '.join(lhs)} := {', '.join(rhs)}; }}"
    )
    mod = translate(src).module
    init = {"i": i, "j": j, "x": x, "y": y, "z": z}
    amap = {i: 10, j: 20, y: 30}
    it = Interp(init, {"a": dict(amap)})
    out = it.run_impl(lets(mod)[0])
    want = boogie_parallel(lhs, rhs, {**init, "a": amap})
    assert out == (want["x"], want["y"], want["z"])
    assert it.cells["a"].value == want["a"]


# ---------------------------------------------------------------- havoc


@st.composite
def havoc_programs(draw):
    n = draw(st.integers(2, 5))
    names = [f"v{k}" for k in range(n)]
    decls = []
    for k, v in enumerate(names):
        deps = draw(st.lists(st.sampled_from(names), max_size=2))
        where = f" where {v} >= 0" + "".join(f" && {v} + {d} >= {k}" for d in deps) if draw(st.booleans()) else ""
        decls.append(f"var {v}: int{where};")
    hv = draw(st.lists(st.sampled_from(names), min_size=2, unique=True))
    src = "\n".join(decls) + f"\nprocedure p() modifies {', '.join(names)}; {{ havoc {', '.join(hv)}; }}"
    return src, hv


@settings(max_examples=60, deadline=None)
@given(havoc_programs())
def test_havoc_writes_precede_where_assumes(case):
    src, hv = case
    (impl,) = lets(translate(src).module)
    (tr,) = [t for t in of(impl.body, W.Try) if any(h.exn == "Return" for h in t.handlers)]
    items = tr.body.items if isinstance(tr.body, W.Seq) else (tr.body,)
    writes = [k for k, s in enumerate(items) if isinstance(s, W.Assign)]
    assumes = [k for k, s in enumerate(items) if isinstance(s, W.Assume)]
    assert [items[k].name for k in writes] == hv
    assert all(isinstance(items[k].value, W.App) and items[k].value.fn == "havoc" for k in writes)
    assert not assumes or max(writes) < min(assumes)


def test_entry_where_assume_order():
    src = (
        "var g: int where g > 1;\n"
        "procedure p(i: int where i > 2) returns (o: int where o > 4) { var l: int where l > 3; }"
    )
    (impl,) = lets(translate(src).module)
    order = [print_expr(a.expr) for a in of(impl.body, W.Assume) if a.expr != W.Lit("true")]
    assert order == ["g.contents > 1", "i > 2", "l.contents > 3", "o.contents > 4"]


# ---------------------------------------------------------------- loops


@st.composite
def loops(draw):
    k = draw(st.integers(0, 3))
    checked = draw(st.integers(0, 2))
    invs = [f"invariant x >= {-c - 1};" for c in range(checked)]
    invs += [f"free invariant y >= {-c - 1};" for c in range(k)]
    invs = draw(st.permutations(invs))
    body = draw(st.sampled_from(["x := x + 1;", "if (x > 5) { break; } x := x + 1;", "y := y + 1; break;", ""]))
    return k, checked, (
        "procedure p() { var x, y: int; x := 0; y := 0;\n"
        f"  while (x < 10) {' '.join(invs)} {{ {body} }}\n}}"
    )


@settings(max_examples=50, deadline=None)
@given(loops())
def test_loop_schema_counts(case):
    k, checked, src = case
    (impl,) = lets(translate(src).module)
    (loop,) = of(impl.body, W.While)
    assumes = Counter(print_expr(a.expr) for a in of(impl.body, W.Assume))
    for c in range(k):
        assert assumes.pop(f"y.contents >= -{c + 1}") == 3
    assert set(assumes) <= {"true"}
    assert len(loop.invariants) == k + checked
    breaks = [t for t in of(impl.body, W.Try) if [h.exn for h in t.handlers] == ["Break"]]
    assert len(breaks) == 1


def test_break_outside_loop():
    with pytest.raises(BreakOutsideLoop):
        translate("procedure p() { break; }")


def test_loop_break_corpus_program_shape():
    text = translate((CORPUS / "loop_break.bpl").read_text()).text
    assert "raise Break" in text and "raise Return" in text
    assert "| Break -> assume { k.contents >= 0 }" in text


# ---------------------------------------------------------------- procedures


def clause_oracle(n_out, req, freq, ens, fens, out_where, mods):
    """Clause kinds the procedure schema prescribes: one clause per non-empty group."""
    post = "returns" if n_out else "ensures"
    v = ["requires"] * bool(req) + ["writes"] * bool(mods)
    v += [post] * (bool(ens) + bool(fens) + bool(out_where))
    i = ["requires"] * (bool(req) + bool(freq)) + [post] * bool(ens)
    return v, i


@settings(max_examples=80, deadline=None)
@given(
    st.integers(0, 2), st.integers(0, 2), st.integers(0, 2), st.integers(0, 2), st.integers(0, 2),
    st.booleans(), st.booleans(),
)
def test_clause_counts_match_schema(n_out, req, freq, ens, fens, out_where, mods):
    outs = [f"o{k}: int" + (" where o0 >= 11" if k == 0 and out_where else "") for k in range(n_out)]
    has_where = out_where and n_out > 0
    spec = [f"requires g > {c};" for c in range(req)] + [f"free requires g > {10 + c};" for c in range(freq)]
    spec += [f"ensures g > {20 + c};" for c in range(ens)] + [f"free ensures g > {30 + c};" for c in range(fens)]
    spec += ["modifies g;"] * mods
    src = f"var g: int; procedure p() returns ({', '.join(outs)}) {' '.join(spec)} {{ }}"
    mod = translate(src).module
    (v,), (i,) = vals(mod), lets(mod)
    want_v, want_i = clause_oracle(n_out, req, freq, ens, fens, has_where, mods)
    assert [c.kind for c in v.spec] == want_v
    assert [c.kind for c in i.spec] == want_i


def test_two_outputs_one_free_ensures():
    src = ("var g: int; procedure p() returns (a: int, b: int where b > 0) modifies g;"
           " ensures a == 1; free ensures g == 0; { a := 1; b := 1; g := 0; }")
    mod = translate(src).module
    (v,), (i,) = vals(mod), lets(mod)
    assert [c.kind for c in v.spec].count("returns") == 3
    assert [c.kind for c in i.spec].count("returns") == 1


def _clause_texts(d):
    return " ".join(print_expr(x) for c in d.spec for x in c.exprs)


def _strip(src: str, kind: str) -> str:
    return re.sub(rf"\bfree\s+{kind}\b[^;]*;", "", src)


def test_free_clause_asymmetry(corpus_file):
    # dropping every free requires must not change any val, and dropping
    # every free ensures must not change any implementation
    src = corpus_file.read_text()
    full = translate(src).module
    no_fr = translate(_strip(src, "requires")).module
    no_fe = translate(_strip(src, "ensures")).module
    assert vals(no_fr) == vals(full)
    assert lets(no_fe) == lets(full)


def test_free_clauses_land_on_the_right_side():
    mod = translate((CORPUS / "free_clauses.bpl").read_text()).module
    (v,) = [x for x in vals(mod) if x.name == "step"]
    (i,) = [x for x in lets(mod) if x.name == "step_impl0"]
    assert "g.contents >= 0" not in _clause_texts(v) and "g.contents >= 0" in _clause_texts(i)
    assert "(old g.contents) + 1" in _clause_texts(v) and "(old g.contents) + 1" not in _clause_texts(i)


def test_bodyless_procedure_gives_val_only():
    mod = translate("procedure p(x: int); requires x > 0;").module
    assert [d.name for d in vals(mod)] == ["p"] and lets(mod) == []


def test_separate_implementations_are_numbered():
    src = "procedure p(x: int); implementation p(x: int) { } implementation p(y: int) { assert y == y; }"
    assert [d.name for d in lets(translate(src).module)] == ["p_impl0", "p_impl1"]


def test_axiom_only_program():
    mod = translate("axiom 1 + 1 == 2;").module
    assert vals(mod) == [] and lets(mod) == []
    assert [d.name for d in mod.decls if isinstance(d, W.Axiom)] == ["A0"]


def test_calls():
    src = """
    procedure none();
    procedure one(a: int) returns (r: int);
    procedure two(a: int) returns (r: int, s: int);
    procedure main() { var u, v: int; call none(); call u := one(1); call u, v := two(u); }
    """
    text = body_text(src)
    assert "none ()" in text
    assert "u.contents <- one 1" in text
    assert "let (t0, t1) = two u.contents in" in text


def test_free_call_warns():
    t = translate("procedure q(); procedure p() { free call q(); }")
    assert any("free call" in d.message for d in t.sink.warnings)


# ---------------------------------------------------------------- frame checks


def test_frame_check_body():
    src = "var a, b, c, g: int; procedure p() modifies c, a, b; { a := 1; }"
    text = translate(src, frame_checks=True).text
    frame = text.split("let p_impl0_frame")[1]
    selfs = re.findall(r"(\w+)\.contents <- \1\.contents", frame)
    assert selfs == ["c", "a", "b"]
    assert re.findall(r"assume \{ yes (\w+)\.contents \}", frame) == ["a", "b", "c", "g"]
    header = frame.split("=(")[0]
    assert "writes { c, a, b }" in header and "reads { a, b, c, g }" in header and "ensures { true }" in header


def test_no_frame_check_without_modifies():
    assert "_frame" not in translate("var g: int; procedure p() { }", frame_checks=True).text


def test_frame_checks_off_by_default():
    assert "_frame" not in translate("var g: int; procedure p() modifies g; { }").text


# ---------------------------------------------------------------- names


def test_colliding_names_rename_injectively():
    src = "type x; var x: x; const X: int; const x_1: int; procedure Lemma() { var N, n: int; }"
    rmap = translate(src).encoded.renames
    for table, ns in ((rmap.values, "value"), (rmap.types, "type")):
        scopes = {rmap.scopes[(ns, k)] for k in table}
        for scope in scopes:
            # within a scope, together with the globals it can see, the map must be one-to-one
            visible = {k: v for k, v in table.items() if rmap.scopes[(ns, k)] in ("", scope)}
            assert len(set(visible.values())) == len(visible), visible
    assert rmap.values["procedure:Lemma"] == "lemma_1"
    assert {rmap.values["X"], rmap.values["x"], rmap.values["x_1"]} >= {"x", "x_1"}


def test_declaration_order():
    src = (CORPUS / "free_clauses.bpl").read_text() + (
        "\ntype T; const k: T; function f(x: int) returns (int); axiom f(0) == 0;"
    )
    rank = {W.TypeDecl: 0, W.ValGlobal: 1, W.Constant: 2, W.Function: 2, W.Axiom: 3, W.Val: 4, W.LetDef: 5}
    prelude = {"yes", "havoc", "(<:)"}
    seq = [
        rank[type(d)] for d in translate(src).module.decls
        if type(d) in rank and d.name not in prelude and not d.name.endswith("PO")
    ]
    assert seq == sorted(seq) and set(seq) == set(range(6))
