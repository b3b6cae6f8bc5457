"""Linearly parameterized bandit simulations (C++ core)."""

from ._core import (
    ArmSet,
    BanditInstance,
    CheckResult,
    CheckpointStat,
    DirectionalRisk,
    ExperimentConfig,
    GaussianPosterior,
    NoiseModel,
    NormBandEstimate,
    OlsState,
    Policy,
    Prior,
    RegretTable,
    Rng,
    SbarCheckResult,
    SlopeFit,
    SpannerArms,
    StepInfo,
    SummaryStats,
    TrajectoryRecord,
    TrajectoryStep,
    UncertaintyParams,
    collect_regret,
    default_checkpoints,
    derive_uncertainty_params,
    directional_risk_terms,
    estimate_bayes_risk,
    estimate_regret,
    fit_scaling,
    make_policy,
    make_stream,
    norm_band_probability,
    periods_after_cycles,
    radius_scale,
    regret_csv,
    run_trajectory,
    run_verify_suite,
    spanner_gram_lambda_min,
    summarize,
    summary_text,
    uncertainty_radius,
    verify_suite_names,
    worker_count,
)

__all__ = [
    "ArmSet",
    "BanditInstance",
    "CheckResult",
    "CheckpointStat",
    "DirectionalRisk",
    "ExperimentConfig",
    "GaussianPosterior",
    "NoiseModel",
    "NormBandEstimate",
    "OlsState",
    "Policy",
    "Prior",
    "RegretTable",
    "Rng",
    "SbarCheckResult",
    "SlopeFit",
    "SpannerArms",
    "StepInfo",
    "SummaryStats",
    "TrajectoryRecord",
    "TrajectoryStep",
    "UncertaintyParams",
    "collect_regret",
    "default_checkpoints",
    "derive_uncertainty_params",
    "directional_risk_terms",
    "estimate_bayes_risk",
    "estimate_regret",
    "fit_scaling",
    "make_policy",
    "make_stream",
    "norm_band_probability",
    "periods_after_cycles",
    "radius_scale",
    "regret_csv",
    "run_trajectory",
    "run_verify_suite",
    "spanner_gram_lambda_min",
    "summarize",
    "summary_text",
    "uncertainty_radius",
    "verify_suite_names",
    "worker_count",
]
