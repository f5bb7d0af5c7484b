"""Stage-wise conformal prediction for two-stage pipelines."""

from ._stagecp import (
    IntervalKind,
    PredictionInterval,
    ResidualComponents,
    StageOutputs,
    StagecpError,
    binomial_p_value,
    calibrate,
    conformal_quantile,
    decompose,
    generate,
    interval_split_conformal,
    interval_unified,
    run_experiment,
    weighted_quantile,
)

__all__ = [
    "IntervalKind",
    "PredictionInterval",
    "ResidualComponents",
    "StageOutputs",
    "StagecpError",
    "binomial_p_value",
    "calibrate",
    "conformal_quantile",
    "decompose",
    "generate",
    "interval_split_conformal",
    "interval_unified",
    "run_experiment",
    "weighted_quantile",
]
