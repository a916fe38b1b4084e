//! Protocol scenarios and key-rate bounds.
//!
//! Key rates are `K = beta I_AB - chi` in bits per channel use, where `chi`
//! is Eve's Holevo information on Alice's data (direct reconciliation) or on
//! Bob's measurement results (reverse reconciliation). Bob always homodynes
//! the `x` quadrature, which carries the key.

pub mod cloner;
mod closed_form;
mod key_rate;
mod params;
mod pure_loss;
pub mod purification;
mod source;

pub use cloner::{build_entangling_cloner, cloner_variance};
pub use closed_form::{
    asymptotic_key_rate, detection_noise_threshold, min_transmittance_detection,
    min_transmittance_preparation, mutual_information, preparation_noise_threshold,
    trusted_noise_thresholds, TrustedNoiseThresholds,
};
pub use key_rate::{
    evaluate_key_rate, eve_entropies, holevo_bound, holevo_bound_at, key_rate, Diagnostics,
    EveEntropies, KeyRateReport,
};
pub use params::{
    ChannelParams, Direction, Method, Modulation, ProtocolParams, PurificationConfig, StateFamily,
    LARGE_MODULATION,
};
pub use pure_loss::{build_pure_loss_eve, pure_loss_holevo, PureLossEve};
pub use purification::build_trusted_noise_purification;
