"""Optional prover harness comparing Boogie and Why3 verification outcomes."""

from .outcomes import (
    B_EQ_W, B_GT_W, B_LT_W, CorpusSummary, OutcomeRecord, ParityClass, aggregate_times, classify,
    compare_outcomes, parity_table, records_from_csv, records_to_csv, solver_statistics,
)
from .runner import HarnessConfig, ParseFailure, ToolMissing, count_goals, parse_counts, run_corpus, run_prover

__all__ = [
    "B_EQ_W", "B_GT_W", "B_LT_W", "CorpusSummary", "HarnessConfig", "OutcomeRecord", "ParityClass",
    "ParseFailure", "ToolMissing", "aggregate_times", "classify", "compare_outcomes", "count_goals", "parity_table",
    "parse_counts", "records_from_csv", "records_to_csv", "run_corpus", "run_prover", "solver_statistics",
]
