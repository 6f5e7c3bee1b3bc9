"""Outcome records, parity classification and corpus summaries."""

from __future__ import annotations

import csv
import io
import math
import statistics
from collections import Counter
from dataclasses import asdict, dataclass, fields

B_EQ_W, B_GT_W, B_LT_W = "B_EQ_W", "B_GT_W", "B_LT_W"
BUCKET_NONE, BUCKET_SOME, BUCKET_ALL = "0=0", "50=50", "100=100"


@dataclass(frozen=True)
class OutcomeRecord:
    program: str
    tool: str  # "boogie" | "why3"
    solver: str
    goals_total: int
    goals_verified: int
    wall_time: float
    timed_out: bool = False
    valid: bool = True  # False when the tool output could not be parsed

    def __post_init__(self):
        if self.tool not in ("boogie", "why3"):
            raise ValueError(f"unknown tool {self.tool!r}")
        if not 0 <= self.goals_verified <= self.goals_total:
            raise ValueError(f"verified count {self.goals_verified} outside 0..{self.goals_total}")

    @property
    def percent(self) -> float:
        return 100.0 if self.goals_total == 0 else 100.0 * self.goals_verified / self.goals_total


@dataclass(frozen=True)
class ParityClass:
    relation: str
    bucket: str | None = None  # set only for B_EQ_W

    def __str__(self) -> str:
        return self.relation if self.bucket is None else f"{self.relation}[{self.bucket}]"


def _best(records):
    return max(records, key=lambda r: (r.goals_verified, -r.wall_time))


def classify(boogie: OutcomeRecord, why3: OutcomeRecord) -> ParityClass:
    """Compare Boogie's verified-goal count with Why3's."""
    b, w = boogie.goals_verified, why3.goals_verified
    if b > w:
        return ParityClass(B_GT_W)
    if b < w:
        return ParityClass(B_LT_W)
    if b == 0:
        bucket = BUCKET_NONE
    elif b == boogie.goals_total:
        bucket = BUCKET_ALL
    else:
        bucket = BUCKET_SOME
    return ParityClass(B_EQ_W, bucket)


@dataclass
class ProgramComparison:
    program: str
    boogie: OutcomeRecord
    why3: OutcomeRecord  # best over solvers
    parity: ParityClass


@dataclass
class CorpusSummary:
    comparisons: list
    relations: Counter
    buckets: Counter
    goal_mismatches: list  # programs whose goal counts differ between the two tools


def compare_outcomes(records) -> CorpusSummary:
    """Classify every program by its best Boogie record against its best Why3 record."""
    by_prog: dict[str, dict[str, list]] = {}
    for r in records:
        if r.valid:
            by_prog.setdefault(r.program, {"boogie": [], "why3": []})[r.tool].append(r)
    comparisons = []
    mismatches = []
    for prog in sorted(by_prog):
        group = by_prog[prog]
        if not group["boogie"] or not group["why3"]:
            continue
        b, w = _best(group["boogie"]), _best(group["why3"])
        if b.goals_total != w.goals_total:
            mismatches.append(prog)
        comparisons.append(ProgramComparison(prog, b, w, classify(b, w)))
    relations = Counter(c.parity.relation for c in comparisons)
    buckets = Counter(c.parity.bucket for c in comparisons if c.parity.bucket)
    return CorpusSummary(comparisons, relations, buckets, mismatches)


def aggregate_times(times) -> float:
    """Mean of the runs at or below the 95th percentile of the repeated timings."""
    times = sorted(times)
    if len(times) == 1:
        return times[0]
    cut = statistics.quantiles(times, n=20, method="inclusive")[-1]
    # interpolating between equal samples can land an ulp below them
    kept = [t for t in times if t <= cut or math.isclose(t, cut, rel_tol=1e-12)]
    return statistics.fmean(kept)


def solver_statistics(records) -> dict:
    """Per (tool, solver): mean % verified, fully verified, none verified, mean/total time, timeouts."""
    groups: dict[tuple, list] = {}
    for r in records:
        if r.valid:
            groups.setdefault((r.tool, r.solver), []).append(r)
    out = {}
    for key in sorted(groups):
        rs = groups[key]
        out[key] = {
            "programs": len(rs),
            "mean_percent": statistics.fmean(r.percent for r in rs),
            "all": sum(r.goals_verified == r.goals_total for r in rs),
            "none": sum(r.goals_verified == 0 and r.goals_total > 0 for r in rs),
            "mean_time": statistics.fmean(r.wall_time for r in rs),
            "total_time": sum(r.wall_time for r in rs),
            "timeouts": sum(r.timed_out for r in rs),
        }
    return out


def records_to_csv(records) -> str:
    buf = io.StringIO()
    names = [f.name for f in fields(OutcomeRecord)]
    w = csv.DictWriter(buf, fieldnames=names, lineterminator="\n")
    w.writeheader()
    for r in records:
        w.writerow(asdict(r))
    return buf.getvalue()


def records_from_csv(text: str) -> list[OutcomeRecord]:
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        out.append(OutcomeRecord(
            row["program"], row["tool"], row["solver"], int(row["goals_total"]), int(row["goals_verified"]),
            float(row["wall_time"]), row["timed_out"] == "True", row["valid"] == "True",
        ))
    return out


def parity_table(summary: CorpusSummary) -> str:
    """Plain-text parity table: one row per program plus a totals row."""
    head = f"{'program':<28} {'b':>5} {'w':>5}  {'b = w':>6} {'b > w':>6} {'b < w':>6}  {'0=0':>4} {'50=50':>6} {'100=100':>8}"
    lines = [head, "-" * len(head)]

    def mark(flag):
        return "x" if flag else ""

    for c in summary.comparisons:
        p = c.parity
        lines.append(
            f"{c.program:<28} {c.boogie.goals_verified:>2}/{c.boogie.goals_total:<2} "
            f"{c.why3.goals_verified:>2}/{c.why3.goals_total:<2}  "
            f"{mark(p.relation == B_EQ_W):>6} {mark(p.relation == B_GT_W):>6} {mark(p.relation == B_LT_W):>6}  "
            f"{mark(p.bucket == BUCKET_NONE):>4} {mark(p.bucket == BUCKET_SOME):>6} {mark(p.bucket == BUCKET_ALL):>8}"
        )
    n = len(summary.comparisons) or 1
    rel, bk = summary.relations, summary.buckets
    lines.append("-" * len(head))
    lines.append(
        f"{'total (' + str(len(summary.comparisons)) + ')':<28} {'':>5} {'':>5}  "
        f"{rel[B_EQ_W]:>6} {rel[B_GT_W]:>6} {rel[B_LT_W]:>6}  "
        f"{bk[BUCKET_NONE]:>4} {bk[BUCKET_SOME]:>6} {bk[BUCKET_ALL]:>8}"
    )
    lines.append(
        f"{'percent':<28} {'':>5} {'':>5}  "
        + " ".join(f"{100 * rel[k] / n:>6.0f}" for k in (B_EQ_W, B_GT_W, B_LT_W))
    )
    return "\n".join(lines)
