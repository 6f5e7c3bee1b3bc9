"""``b2w-harness``: goal parity between Boogie and Why3 over a set of programs."""

from __future__ import annotations

import argparse
import sys
import tempfile
from pathlib import Path

from .outcomes import compare_outcomes, parity_table, records_to_csv, solver_statistics
from .runner import HarnessConfig, run_corpus


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="b2w-harness", description=__doc__.split("``: ")[1])
    ap.add_argument("inputs", nargs="+", help="Boogie files or directories containing .bpl files")
    ap.add_argument("--config", help="JSON file overriding the default harness configuration")
    ap.add_argument("--csv", help="write the outcome records to this CSV file")
    ap.add_argument("--workdir", help="directory for translated modules (default: a temporary directory)")
    ap.add_argument("--jobs", type=int)
    ap.add_argument("--repeats", type=int)
    ap.add_argument("--timeout", type=float)
    args = ap.parse_args(argv)

    config = HarnessConfig.load(args.config, jobs=args.jobs, repeats=args.repeats, timeout=args.timeout)
    files = []
    for item in map(Path, args.inputs):
        files += sorted(item.glob("*.bpl")) if item.is_dir() else [item]
    with tempfile.TemporaryDirectory() as tmp:
        records, skipped = run_corpus(files, config, args.workdir or tmp)
    for s in skipped:
        print(f"b2w-harness: skipped: {s}", file=sys.stderr)
    if args.csv:
        Path(args.csv).write_text(records_to_csv(records))
    summary = compare_outcomes(records)
    print(parity_table(summary))
    for (tool, solver), st in solver_statistics(records).items():
        print(f"{tool}/{solver}: mean {st['mean_percent']:.0f}% verified, {st['all']} complete, "
              f"{st['none']} none, {st['mean_time']:.2f}s mean, {st['total_time']:.1f}s total, "
              f"{st['timeouts']} timeouts")
    if summary.goal_mismatches:
        print("goal count differs for: " + ", ".join(summary.goal_mismatches), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
