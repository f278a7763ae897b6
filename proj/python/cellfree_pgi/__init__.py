# SPDX-License-Identifier: Apache-2.0
"""Path-gain feedback simulator for cell-free downlink."""

from ._core import (
    DistortionBound,
    InfeasibleBound,
    RvqGamma,
    Scheme,
    SchemaError,
    SeriesPoint,
    SweepResult,
    SweepSeries,
    SystemConfig,
    TrialResult,
    beta_function,
    bits_for_rate_gap,
    choose_path_budget_single_cell,
    delta_factor,
    derive_seed,
    distortion_bound,
    git_blob_digest,
    load_config,
    parse_config,
    parse_sweep,
    quantize,
    rate_gap_bound,
    run_sweep,
    run_trial,
    rvq_codebook,
    rvq_gamma,
    scenario_ideal_rates,
    single_bs_preset,
    single_cell_rate_bound,
    steering_vector,
)

__all__ = [name for name in dir() if not name.startswith("_")]
