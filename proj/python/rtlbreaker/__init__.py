"""Python bindings for the rtlbreaker C++ core."""

from ._rtlbreaker import (
    Error,
    MockModel,
    assemble,
    attack,
    case_study_ids,
    check_syntax,
    compare_traces,
    compute_stats,
    evaluate,
    forge_case_study,
    lex,
    pass_at_k,
    poisoned_count,
    rank_rare,
    render,
    scan,
    simulate,
    strip_comments,
    synthetic_corpus,
    template,
    template_ids,
    verify_payload,
)

__all__ = [
    "Error",
    "MockModel",
    "assemble",
    "attack",
    "case_study_ids",
    "check_syntax",
    "compare_traces",
    "compute_stats",
    "evaluate",
    "forge_case_study",
    "lex",
    "pass_at_k",
    "poisoned_count",
    "rank_rare",
    "render",
    "scan",
    "simulate",
    "strip_comments",
    "synthetic_corpus",
    "template",
    "template_ids",
    "verify_payload",
]
