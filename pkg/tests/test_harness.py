from __future__ import annotations

import json
import os
import stat
import sys
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from b2w.harness import (
    B_EQ_W, B_GT_W, B_LT_W, HarnessConfig, OutcomeRecord, ParseFailure, ToolMissing, aggregate_times, classify,
    compare_outcomes, count_goals, parse_counts, parity_table, records_from_csv, records_to_csv, run_corpus,
    run_prover, solver_statistics,
)

from conftest import CORPUS, CORPUS_FILES, translate

FIXTURE = json.loads((CORPUS / "expected_outcomes.json").read_text())["programs"]


def rec(tool, verified, total=2, solver="z3", program="p", time=1.0, **kw):
    return OutcomeRecord(program, tool, solver, total, verified, time, **kw)


# ---------------------------------------------------------------- classification


@pytest.mark.parametrize("b, w, expected", [
    (2, 2, "B_EQ_W[100=100]"),
    (1, 0, "B_GT_W"),
    (0, 0, "B_EQ_W[0=0]"),
    (1, 1, "B_EQ_W[50=50]"),
    (0, 2, "B_LT_W"),
])
def test_classify(b, w, expected):
    assert str(classify(rec("boogie", b), rec("why3", w))) == expected


def test_record_invariants():
    with pytest.raises(ValueError):
        rec("boogie", 3, total=2)
    with pytest.raises(ValueError):
        rec("coq", 0)
    assert rec("why3", 0, total=0).percent == 100.0


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 4), st.lists(st.integers(0, 4), min_size=1, max_size=4), st.integers(0, 4))
def test_adding_a_solver_never_worsens_why3(b, ws, extra):
    rank = {B_GT_W: 0, B_EQ_W: 1, B_LT_W: 2}
    records = [rec("boogie", b, total=4)] + [rec("why3", w, total=4, solver=f"s{i}") for i, w in enumerate(ws)]
    before = compare_outcomes(records).comparisons[0]
    after = compare_outcomes(records + [rec("why3", extra, total=4, solver="new")]).comparisons[0]
    assert after.why3.goals_verified >= before.why3.goals_verified
    assert rank[after.parity.relation] >= rank[before.parity.relation]


def test_invalid_records_are_ignored():
    records = [rec("boogie", 2), rec("why3", 2, valid=False), rec("why3", 1, solver="cvc4")]
    (c,) = compare_outcomes(records).comparisons
    assert c.why3.solver == "cvc4" and c.parity.relation == B_GT_W


def test_goal_mismatch_reported():
    s = compare_outcomes([rec("boogie", 1, total=1), rec("why3", 1, total=3)])
    assert s.goal_mismatches == ["p"]


# ---------------------------------------------------------------- timing and statistics


def p95_mean(xs):
    xs = sorted(xs)
    pos = 0.95 * (len(xs) - 1)
    lo = int(pos)
    cut = xs[lo] + (xs[min(lo + 1, len(xs) - 1)] - xs[lo]) * (pos - lo)
    kept = [x for x in xs if x <= cut]
    return sum(kept) / len(kept)


@given(st.lists(st.floats(0.01, 200.0), min_size=1, max_size=30))
def test_aggregate_times_oracle(xs):
    assert aggregate_times(xs) == pytest.approx(p95_mean(xs), rel=1e-9)


def test_aggregate_times_drops_outlier():
    assert aggregate_times([1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0,
                            1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 90.0]) == 1.0


def test_solver_statistics():
    rs = [rec("why3", 2, program="a", solver="z3", time=2.0), rec("why3", 0, program="b", solver="z3", time=4.0,
                                                                  timed_out=True)]
    s = solver_statistics(rs)[("why3", "z3")]
    assert s == {"programs": 2, "mean_percent": 50.0, "all": 1, "none": 1, "mean_time": 3.0, "total_time": 6.0,
                 "timeouts": 1}


RECORDS = st.builds(
    OutcomeRecord,
    st.from_regex(r"[a-z][a-z_,\" ]{0,8}", fullmatch=True), st.sampled_from(["boogie", "why3"]),
    st.sampled_from(["z3", "cvc4"]), st.just(5), st.integers(0, 5), st.floats(0, 100, allow_nan=False),
    st.booleans(), st.booleans(),
)


@given(st.lists(RECORDS, max_size=6))
def test_csv_round_trip(records):
    assert records_from_csv(records_to_csv(records)) == records


# ---------------------------------------------------------------- output parsing


@pytest.fixture
def config():
    return HarnessConfig.load()


@pytest.mark.parametrize("text, counts", [
    ("Boogie program verifier finished with 3 verified, 1 error\n", (4, 3)),
    ("Boogie program verifier finished with 1 verified, 0 errors, 2 time outs\n", (3, 1)),
    ("noise\nBoogie program verifier finished with 0 verified, 0 errors\n", (0, 0)),
])
def test_parse_boogie(config, text, counts):
    assert parse_counts("boogie", text, config) == counts


def test_parse_why3_and_fold_variants(config):
    out = "\n".join([
        "m.mlw M WP_parameter p_int_impl0 : Valid (0.01s)",
        "m.mlw M WP_parameter p_bool_impl0 : Timeout (20.0s)",
        "m.mlw M WP_parameter q_impl0 : Valid (0.01s)",
    ])
    assert parse_counts("why3", out, config) == (3, 2)
    gmap = {"p_int_impl0": "p/0", "p_bool_impl0": "p/0", "q_impl0": "q/0", "r_impl0": "r/0"}
    assert parse_counts("why3", out, config, gmap) == (3, 1)


def test_parse_failures(config):
    with pytest.raises(ParseFailure):
        parse_counts("boogie", "Segmentation fault", config)
    with pytest.raises(ParseFailure):
        parse_counts("why3", "Syntax error in file", config)
    assert parse_counts("why3", "", config) == (0, 0)


def test_count_goals_matches_translation(corpus_file):
    goals = translate(corpus_file.read_text()).goals
    assert count_goals(corpus_file) == len(set(goals.values()))


def test_zero_procedure_file(tmp_path):
    f = tmp_path / "empty.bpl"
    f.write_text("axiom true;")
    assert count_goals(f) == 0 and translate(f.read_text()).goals == {}


# ---------------------------------------------------------------- fake provers

FAKE_BOOGIE = r'''
import json, os, pathlib, sys
spec = json.load(open(os.environ["FAKE_FIXTURE"]))["programs"]
f = pathlib.Path(sys.argv[-1])
if os.environ.get("FAKE_MODE") == "garbage":
    print("something unexpected"); sys.exit(1)
if os.environ.get("FAKE_MODE") == "sleep":
    import time; time.sleep(5)
p = spec[f.stem]
bad = len(p["boogie_fails"])
print(f"Boogie program verifier finished with {p['goals'] - bad} verified, {bad} errors")
'''

FAKE_WHY3 = r'''
import json, os, pathlib, re, sys
spec = json.load(open(os.environ["FAKE_FIXTURE"]))["programs"]
solver, f = sys.argv[sys.argv.index("-P") + 1], pathlib.Path(sys.argv[-1])
p = spec[f.stem]
text = f.read_text()
module = re.search(r"^module (\w+)", text, re.M).group(1)
for goal in re.findall(r"^let (\w+_impl\d+) ", text, re.M):
    proc = goal.rsplit("_impl", 1)[0]
    ok = proc not in p["why3_fails"] and solver in p.get("why3_only_with", {}).get(proc, [solver])
    print(f"{f} {module} WP_parameter {goal} : {'Valid (0.02s)' if ok else 'Unknown (0.10s)'}")
'''


@pytest.fixture
def fake_tools(tmp_path, monkeypatch):
    bin_dir = tmp_path / "bin"
    bin_dir.mkdir()
    paths = {}
    for name, body in (("boogie", FAKE_BOOGIE), ("why3", FAKE_WHY3)):
        exe = bin_dir / f"fake-{name}"
        exe.write_text(f"#!{sys.executable}\n{body}")
        exe.chmod(exe.stat().st_mode | stat.S_IXUSR)
        paths[name] = str(exe)
    monkeypatch.setenv("FAKE_FIXTURE", str(CORPUS / "expected_outcomes.json"))
    return HarnessConfig.load(tools=paths, repeats=1, jobs=4, archive_dir=str(tmp_path / "raw"))


def tally(spec: dict) -> str:
    """Spreadsheet-style classification of one fixture row, independent of the harness."""
    n = spec["goals"]
    b = n - len(spec["boogie_fails"])
    per_solver = []
    for solver in ("alt-ergo", "cvc4", "z3"):
        fails = set(spec["why3_fails"]) | {
            proc for proc, allowed in spec.get("why3_only_with", {}).items() if solver not in allowed
        }
        per_solver.append(n - len(fails))
    w = max(per_solver)
    if b > w:
        return "B_GT_W"
    if b < w:
        return "B_LT_W"
    return "B_EQ_W[" + ("0=0" if b == 0 else "100=100" if b == n else "50=50") + "]"


def test_fixture_tally_agrees_with_recorded_classes():
    for name, spec in FIXTURE.items():
        assert tally(spec) == spec["expected"], name


def test_fixture_covers_the_corpus():
    assert set(FIXTURE) == {f.stem for f in CORPUS_FILES}
    for name, spec in FIXTURE.items():
        assert count_goals(CORPUS / f"{name}.bpl") == spec["goals"], name


def test_run_corpus_with_fake_tools(fake_tools, tmp_path):
    records, skipped = run_corpus(CORPUS_FILES, fake_tools, tmp_path / "work")
    assert skipped == []
    summary = compare_outcomes(records)
    got = {c.program: str(c.parity) for c in summary.comparisons}
    assert got == {k: v["expected"] for k, v in FIXTURE.items()}
    assert summary.goal_mismatches == []
    assert summary.relations == Counter(v["expected"].split("[")[0] for v in FIXTURE.values())
    table = parity_table(summary)
    assert table.splitlines()[-2].split()[2:5] == [str(summary.relations[k]) for k in (B_EQ_W, B_GT_W, B_LT_W)]


def test_trivial_inv_needs_cvc4(fake_tools, tmp_path):
    records, _ = run_corpus([CORPUS / "trivial_inv.bpl"], fake_tools, tmp_path)
    by_solver = {r.solver: r.goals_verified for r in records if r.tool == "why3"}
    assert by_solver == {"alt-ergo": 0, "cvc4": 1, "z3": 0}


def test_missing_tools_are_skipped(tmp_path):
    cfg = HarnessConfig.load(tools={"boogie": str(tmp_path / "none-b"), "why3": str(tmp_path / "none-w")})
    records, skipped = run_corpus([CORPUS / "lemma_yes.bpl"], cfg, tmp_path)
    assert records == [] and len(skipped) == 2
    with pytest.raises(ToolMissing):
        run_prover("boogie", "z3", CORPUS / "lemma_yes.bpl", config=cfg)


def test_unparseable_output_is_archived(fake_tools, monkeypatch):
    monkeypatch.setenv("FAKE_MODE", "garbage")
    r = run_prover("boogie", "z3", CORPUS / "lemma_yes.bpl", config=fake_tools)
    assert not r.valid
    raw = os.listdir(fake_tools.archive_dir)
    assert raw == ["lemma_yes.boogie.z3.log"]


def test_timeout_marks_record(fake_tools, monkeypatch):
    monkeypatch.setenv("FAKE_MODE", "sleep")
    r = run_prover("boogie", "z3", CORPUS / "lemma_yes.bpl", timeout=0.5, config=fake_tools, expected_goals=1)
    assert r.timed_out and r.goals_total == 1 and r.goals_verified == 0 and r.wall_time < 5


def test_config_override_file(tmp_path):
    f = tmp_path / "cfg.json"
    f.write_text(json.dumps({"solvers": ["z3"], "tools": {"why3": "/opt/why3"}, "site": "lab"}))
    cfg = HarnessConfig.load(f, repeats=5)
    assert cfg.solvers == ["z3"] and cfg.tools == {"boogie": "boogie", "why3": "/opt/why3"}
    assert cfg.repeats == 5 and cfg.timeout == 180 and cfg.goal_timeout == 20 and cfg.extra == {"site": "lab"}


def test_harness_cli(fake_tools, tmp_path, capsys):
    from b2w.harness.cli import main

    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"tools": fake_tools.tools, "repeats": 1}))
    csv_path = tmp_path / "out.csv"
    code = main([str(CORPUS / "lemma_yes.bpl"), str(CORPUS / "lemma_no.bpl"), "--config", str(cfg), "--csv", str(csv_path)])
    out = capsys.readouterr().out
    assert code == 0
    assert "lemma_no" in out and "why3/cvc4" in out
    assert len(records_from_csv(csv_path.read_text())) == 2 * 4
