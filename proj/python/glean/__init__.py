from ._glean import (
    Calibrator,
    GleanError,
    accumulate,
    aggregate_step,
    auroc,
    best_of_n,
    brier,
    ece,
    fit,
    linearity_diagnostic,
    load_calibrator,
    rectify,
    risk_at,
    run_cli,
    score_from_token_logprobs,
    score_from_top_logprobs,
    synthesize,
    uncertainty,
)

__all__ = [
    "Calibrator",
    "GleanError",
    "accumulate",
    "aggregate_step",
    "auroc",
    "best_of_n",
    "brier",
    "ece",
    "fit",
    "linearity_diagnostic",
    "load_calibrator",
    "rectify",
    "risk_at",
    "run_cli",
    "score_from_token_logprobs",
    "score_from_top_logprobs",
    "synthesize",
    "uncertainty",
]
