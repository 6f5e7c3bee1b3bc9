"""Running Boogie and Why3 on original/translated program pairs."""

from __future__ import annotations

import json
import re
import shutil
import subprocess
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from ..boogie import ast as A
from ..boogie.parser import parse_boogie
from ..cli import TranslateConfig, translate_file
from .outcomes import OutcomeRecord, aggregate_times


class ToolMissing(Exception):
    """The external tool is not installed or not on the configured path."""


class ParseFailure(Exception):
    """The tool's output did not contain the expected result lines."""

    def __init__(self, message: str, raw: str):
        super().__init__(message)
        self.raw = raw


def default_config() -> dict:
    return json.loads(resources.files("b2w.harness").joinpath("default_config.json").read_text())


@dataclass
class HarnessConfig:
    tools: dict
    solvers: list
    timeout: float
    goal_timeout: float
    repeats: int
    jobs: int
    commands: dict
    patterns: dict
    archive_dir: str | None = None
    extra: dict = field(default_factory=dict)

    @classmethod
    def load(cls, path=None, **overrides) -> HarnessConfig:
        data = default_config()
        if path is not None:
            user = json.loads(Path(path).read_text())
            for k, v in user.items():
                if isinstance(v, dict) and isinstance(data.get(k), dict):
                    data[k] = {**data[k], **v}
                else:
                    data[k] = v
        data.update({k: v for k, v in overrides.items() if v is not None})
        known = {f for f in cls.__dataclass_fields__ if f != "extra"}
        extra = {k: v for k, v in data.items() if k not in known}
        return cls(**{k: v for k, v in data.items() if k in known}, extra=extra)


def resolve_tool(name: str, config: HarnessConfig) -> str:
    exe = shutil.which(config.tools.get(name, name))
    if exe is None:
        raise ToolMissing(f"{name} not found (configured as {config.tools.get(name, name)!r})")
    return exe


def parse_counts(tool: str, output: str, config: HarnessConfig, goal_map: dict | None = None) -> tuple[int, int]:
    """(total, verified) goal counts found in ``output``; raises ParseFailure when absent.

    With ``goal_map`` (WhyML implementation -> Boogie implementation), Why3 goals
    are folded back onto the Boogie implementations they check: a Boogie goal
    counts as verified only when every one of its WhyML instances is.
    """
    pats = config.patterns[tool]
    if tool == "boogie":
        m = None
        for m in re.finditer(pats["summary"], output, re.MULTILINE):
            pass
        if m is None:
            raise ParseFailure("no summary line in Boogie output", output)
        total = verified = 0
        for c in re.finditer(pats["count"], m.group("tail")):
            n = int(c.group("n"))
            total += n
            if c.group("kind") in pats["verified"]:
                verified += n
        return total, verified
    statuses: dict[str, str] = {}
    for m in re.finditer(pats["goal"], output, re.MULTILINE):
        statuses[m.group("goal")] = m.group("status")
    if not statuses and output.strip() and not re.search(pats.get("empty", r"\A\Z"), output):
        raise ParseFailure("no goal lines in Why3 output", output)
    if goal_map is None:
        return len(statuses), sum(s in pats["verified"] for s in statuses.values())
    owners: dict[str, bool] = {}
    for why, boogie in goal_map.items():
        owners[boogie] = owners.get(boogie, True) and statuses.get(why) in pats["verified"]
    return len(owners), sum(owners.values())


def _archive(config: HarnessConfig, label: str, raw: str) -> None:
    if config.archive_dir:
        d = Path(config.archive_dir)
        d.mkdir(parents=True, exist_ok=True)
        (d / f"{label}.log").write_text(raw)


def run_once(tool: str, solver: str, file, config: HarnessConfig, timeout: float | None = None,
             goal_map: dict | None = None):
    """One process run; returns (total, verified, seconds, timed_out, valid)."""
    exe = resolve_tool(tool, config)
    fmt = dict(tool=exe, solver=solver, file=str(file), goal_timeout=config.goal_timeout)
    argv = [part.format(**fmt) for part in config.commands[tool]]
    limit = config.timeout if timeout is None else timeout
    t0 = time.perf_counter()
    try:
        proc = subprocess.run(argv, capture_output=True, text=True, timeout=limit)
        out, timed_out = proc.stdout + proc.stderr, False
    except subprocess.TimeoutExpired as e:
        out = "".join(x.decode() if isinstance(x, bytes) else (x or "") for x in (e.stdout, e.stderr))
        timed_out = True
    elapsed = time.perf_counter() - t0
    try:
        total, verified = parse_counts(tool, out, config, goal_map)
        return total, verified, elapsed, timed_out, True
    except ParseFailure as e:
        _archive(config, f"{Path(file).stem}.{tool}.{solver}", e.raw)
        return 0, 0, elapsed, timed_out, timed_out  # a silent timeout still counts as a (failed) run


def run_prover(tool: str, solver: str, file, timeout: float | None = None, config: HarnessConfig | None = None,
               program: str | None = None, expected_goals: int | None = None,
               goal_map: dict | None = None) -> OutcomeRecord:
    """Run ``tool`` on ``file`` ``config.repeats`` times and aggregate into one record."""
    config = config or HarnessConfig.load()
    runs = [run_once(tool, solver, file, config, timeout, goal_map) for _ in range(max(1, config.repeats))]
    total, verified, _, timed_out, valid = runs[-1]
    if timed_out and expected_goals is not None:
        total = max(total, expected_goals)
    return OutcomeRecord(
        program or Path(file).stem, tool, solver, total, verified,
        round(aggregate_times([r[2] for r in runs]), 3), timed_out, valid,
    )


def count_goals(path) -> int:
    """Goals of a Boogie program: its procedure implementations."""
    p = parse_boogie(Path(path).read_text(), str(path))
    return sum(
        1 for d in p.decls
        if isinstance(d, A.Implementation) or (isinstance(d, A.ProcedureDecl) and d.body is not None)
    )


def run_corpus(files, config: HarnessConfig, workdir) -> tuple[list, list]:
    """Translate and verify every file; returns (records, skipped-tool messages)."""
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    jobs, skipped, missing = [], [], set()
    for name in ("boogie", "why3"):
        try:
            resolve_tool(name, config)
        except ToolMissing as e:
            skipped.append(str(e))
            missing.add(name)
    for f in map(Path, files):
        goals = count_goals(f)
        if "boogie" not in missing:
            jobs.append(("boogie", "z3", f, f.stem, goals, None))
        out, report = translate_file(f, TranslateConfig(output=str(workdir / f"{f.stem}.mlw")))
        if out is None:
            skipped.append(f"{f.name}: translation failed with exit code {report.exit_code}")
            continue
        if "why3" not in missing:
            jobs += [("why3", s, Path(out), f.stem, goals, report.goals) for s in config.solvers]
    with ThreadPoolExecutor(max_workers=max(1, config.jobs)) as pool:
        futures = [
            pool.submit(run_prover, tool, solver, path, None, config, prog, goals, gmap)
            for tool, solver, path, prog, goals, gmap in jobs
        ]
        records = [fut.result() for fut in futures]
    records.sort(key=lambda r: (r.program, r.tool, r.solver))
    return records, skipped
