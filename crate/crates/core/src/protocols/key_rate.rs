use serde::{Deserialize, Serialize};

use super::closed_form::{asymptotic_key_rate, mutual_information};
use super::params::{ChannelParams, Method, Modulation, ProtocolParams, PurificationConfig};
use super::{cloner, purification};
use crate::error::{Error, Result};

/// Numerical health of a key-rate evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Symplectic eigenvalues clamped to 1 from the warning band.
    pub clamp_warnings: usize,
    /// Key rate at `T_check`, when trusted noise made a second evaluation
    /// necessary.
    pub k_check: Option<f64>,
    /// `|K(T) - K(T_check)|`; zero when no trusted noise is coupled.
    pub t_delta: f64,
    /// Estimated remaining bias of `K(T)` with respect to `T -> 1`.
    pub t_bias: f64,
    /// Whether `t_bias <= tol_K`.
    pub converged: bool,
}

impl Diagnostics {
    fn exact() -> Self {
        Self {
            clamp_warnings: 0,
            k_check: None,
            t_delta: 0.0,
            t_bias: 0.0,
            converged: true,
        }
    }
}

/// Result of a key-rate evaluation: `K = beta I_AB - chi` in bits per channel
/// use. `K` may be negative and is never clamped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyRateReport {
    #[serde(rename = "I_AB")]
    pub i_ab: f64,
    pub chi: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

/// Eve's entropies (bits) at ancilla transmittance `t`: unconditional, and
/// conditioned on the measurement defining the key (Bob's `x` for reverse,
/// Alice's data for direct reconciliation).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EveEntropies {
    pub s_e: f64,
    pub s_e_given_key: f64,
    pub clamp_warnings: usize,
}

impl EveEntropies {
    pub fn holevo(&self) -> f64 {
        self.s_e - self.s_e_given_key
    }
}

pub fn eve_entropies(
    p: &ProtocolParams,
    c: &ChannelParams,
    t: f64,
    method: Method,
) -> Result<EveEntropies> {
    let (s_e, s_e_given_key, clamp_warnings) = match method {
        Method::Purification => purification::eve_entropies(p, c, t)?,
        Method::Cloner => cloner::eve_entropies(p, c, t)?,
        Method::Asymptotic => {
            return Err(Error::Unsupported(
                "the asymptotic method has no finite Holevo bound".to_string(),
            ))
        }
    };
    Ok(EveEntropies {
        s_e,
        s_e_given_key,
        clamp_warnings,
    })
}

/// Holevo bound (bits) of Eve's information on the key variable at ancilla
/// transmittance `t`, with the clamp-warning count.
pub fn holevo_bound_at(
    p: &ProtocolParams,
    c: &ChannelParams,
    t: f64,
    method: Method,
) -> Result<(f64, usize)> {
    let e = eve_entropies(p, c, t, method)?;
    Ok((e.holevo(), e.clamp_warnings))
}

/// Holevo bound (bits) at the configured ancilla transmittance `cfg.t`.
pub fn holevo_bound(
    p: &ProtocolParams,
    c: &ChannelParams,
    cfg: &PurificationConfig,
    method: Method,
) -> Result<f64> {
    cfg.validate()?;
    holevo_bound_at(p, c, cfg.t, method).map(|(chi, _)| chi)
}

/// Key rate with convergence diagnostics but without failing on them.
///
/// Numeric methods need a finite modulation variance. When trusted noise is
/// present the Holevo bound is also evaluated at `cfg.t_check` to estimate
/// the bias of the finite ancilla coupling.
pub fn evaluate_key_rate(
    p: &ProtocolParams,
    c: &ChannelParams,
    cfg: &PurificationConfig,
    method: Method,
) -> Result<KeyRateReport> {
    p.validate()?;
    c.validate()?;
    cfg.validate()?;
    if method == Method::Asymptotic {
        let k = asymptotic_key_rate(p, c)?;
        return Ok(KeyRateReport {
            i_ab: f64::INFINITY,
            chi: f64::INFINITY,
            k,
            method,
            diagnostics: Diagnostics::exact(),
        });
    }
    if p.v_m == Modulation::Infinite {
        return Err(Error::Unsupported(format!(
            "V_M = inf is only accepted by the asymptotic method, not by {method}"
        )));
    }
    let i_ab = mutual_information(p, c)?;
    let (chi, warnings) = holevo_bound_at(p, c, cfg.t, method)?;
    let k = p.beta * i_ab - chi;
    let mut diagnostics = Diagnostics {
        clamp_warnings: warnings,
        ..Diagnostics::exact()
    };
    if p.delta_v > 0.0 || p.n > 0.0 {
        let (chi_check, w2) = holevo_bound_at(p, c, cfg.t_check, method)?;
        let k_check = p.beta * i_ab - chi_check;
        diagnostics.clamp_warnings += w2;
        diagnostics.k_check = Some(k_check);
        diagnostics.t_delta = (k - k_check).abs();
        diagnostics.t_bias = diagnostics.t_delta * cfg.bias_factor();
        diagnostics.converged = diagnostics.t_bias <= cfg.tol_k;
    }
    Ok(KeyRateReport {
        i_ab,
        chi,
        k,
        method,
        diagnostics,
    })
}

/// Key rate `K = beta I_AB - chi`; fails if the trusted-noise coupling has
/// not converged within `cfg.tol_k`.
pub fn key_rate(
    p: &ProtocolParams,
    c: &ChannelParams,
    cfg: &PurificationConfig,
    method: Method,
) -> Result<KeyRateReport> {
    let report = evaluate_key_rate(p, c, cfg, method)?;
    if !report.diagnostics.converged {
        return Err(Error::NotConverged {
            k_t: report.k,
            k_check: report.diagnostics.k_check.unwrap_or(report.k),
            bias: report.diagnostics.t_bias,
            tol: cfg.tol_k,
        });
    }
    Ok(report)
}
