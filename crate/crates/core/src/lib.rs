//! Secret-key-rate bounds for one-way Gaussian continuous-variable QKD with
//! trusted preparation and detection noise.
//!
//! * [`gaussian`]: covariance-matrix engine (symplectic spectra, entropies,
//!   beamsplitters, homodyne/heterodyne and classical conditioning).
//! * [`protocols`]: coherent- and squeezed-state protocols in direct and
//!   reverse reconciliation; mutual information, Holevo bounds, key rates,
//!   closed-form asymptotics and noise thresholds.
//! * [`analysis`]: modulation and trusted-noise optimization, excess-noise
//!   frontiers, unit conversion and parameter sweeps.
//!
//! All variances are in shot-noise units (vacuum variance 1).

// Domain checks are written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod gaussian;
pub mod protocols;
pub mod real;

pub use error::{Error, Result};
