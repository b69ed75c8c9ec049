"""Energy-minimal transmission scheduling under a hard deadline."""

from ._hdsched import (
    DeltaSearchResult,
    FadingDistribution,
    GainReport,
    GridConfig,
    MomentTable,
    OneShotThresholds,
    Policy,
    RatePoint,
    SimulationReport,
    SnrApproximation,
    ValueTable,
    WaterfillSolution,
    __version__,
    boundary_relaxed_policy,
    config_hash,
    constrained_ergodic_policy,
    equal_bit_cost,
    equal_bit_policy,
    ergodic_energy,
    gain_limit_large_b_db,
    gain_limit_small_b_db,
    gain_report,
    high_snr_offsets,
    low_snr_params,
    one_shot_cost,
    one_shot_policy,
    optimal_allocate,
    optimal_policy,
    optimize_delta,
    relaxed_cost_closed_form,
    relaxed_threshold,
    run_experiment,
    scheduling_gain_db,
    simulate,
    snr_approximation,
    solve_dp,
    spectral_efficiency_curve,
    validate_config,
    waterfill_threshold,
)

__all__ = [
    "DeltaSearchResult",
    "FadingDistribution",
    "GainReport",
    "GridConfig",
    "MomentTable",
    "OneShotThresholds",
    "Policy",
    "RatePoint",
    "SimulationReport",
    "SnrApproximation",
    "ValueTable",
    "WaterfillSolution",
    "__version__",
    "boundary_relaxed_policy",
    "config_hash",
    "constrained_ergodic_policy",
    "equal_bit_cost",
    "equal_bit_policy",
    "ergodic_energy",
    "gain_limit_large_b_db",
    "gain_limit_small_b_db",
    "gain_report",
    "high_snr_offsets",
    "low_snr_params",
    "one_shot_cost",
    "one_shot_policy",
    "optimal_allocate",
    "optimal_policy",
    "optimize_delta",
    "relaxed_cost_closed_form",
    "relaxed_threshold",
    "run_experiment",
    "scheduling_gain_db",
    "simulate",
    "snr_approximation",
    "solve_dp",
    "spectral_efficiency_curve",
    "validate_config",
    "waterfill_threshold",
]
