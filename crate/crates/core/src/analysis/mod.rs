//! Optimization of nuisance parameters, excess-noise frontiers, loss units
//! and parameter sweeps.
//!
//! All searches are nested one-dimensional searches: golden-section
//! maximization of the key rate over the modulation variance (in `ln V_M`)
//! and over one trusted noise, and bisection of the key-rate sign for noise
//! thresholds and for the maximum tolerable excess noise. Unless stated
//! otherwise, key rates come from [`crate::protocols::evaluate_key_rate`],
//! so trusted-noise convergence is reported in the diagnostics rather than
//! failing a search.

mod frontier;
mod optimize;
mod presets;
mod sweep;
mod units;

pub use frontier::{
    max_tolerable_excess_noise, FrontierPoint, EPS_ABS_TOL, EPS_CEILING, EPS_REL_TOL,
    MONOTONICITY_SCAN, MONOTONICITY_TOL,
};
pub use optimize::{
    maximize, noise_threshold, optimize_key_rate, optimize_modulation, optimize_trusted_noise,
    Maximum, Nuisance, Optimum, Scale, SearchInterval, TrustedNoise, MODULATION_BOUNDS,
    MODULATION_REL_TOL, NOISE_ABS_TOL, NOISE_BOUNDS, SCAN_FLATNESS, SCAN_POINTS,
};
pub use presets::{
    figure_panels, Figure, Panel, BETA_DR, BETA_RR, DISTANCE_FIGURE_EPS, FINITE_SQUEEZING,
    STRONG_SQUEEZING,
};
pub use sweep::{
    evaluate_point, run_sweep, run_sweep_with, Axis, ExecutionMode, FrontierRow, KeyRateRow,
    Objective, Parameter, SweepPoint, SweepRow, SweepSpec,
};
pub use units::{
    convert, db_to_eta, db_to_km, eta_to_db, km_to_db, LossUnit, FIBER_LOSS_DB_PER_KM,
};
