"""Storage accounting, cross-layout comparison, and the competency suite."""

from hpckg.analytics.stats import (
    CompareReport,
    DryRunCounts,
    GraphStats,
    compare_modes,
    dry_run_counts,
    format_compare_table,
    project_storage,
    reduction_percent,
)
from hpckg.analytics.suite import (
    QUESTION_IDS,
    QuestionResult,
    SuiteResult,
    default_manifest,
    load_manifest,
    run_suite,
    write_manifest,
)

__all__ = [
    "CompareReport",
    "DryRunCounts",
    "GraphStats",
    "QUESTION_IDS",
    "QuestionResult",
    "SuiteResult",
    "compare_modes",
    "default_manifest",
    "dry_run_counts",
    "format_compare_table",
    "load_manifest",
    "project_storage",
    "reduction_percent",
    "run_suite",
    "write_manifest",
]
