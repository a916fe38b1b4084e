//! Closed-form quantities: Alice-Bob mutual information, key rates in the
//! limit of infinite modulation over a pure-loss channel, and the trusted
//! noise levels and channel losses at which those key rates vanish.

use serde::{Deserialize, Serialize};

use super::params::{ChannelParams, Modulation, ProtocolParams};
use super::Direction;
use crate::error::{Error, Result};

/// Mutual information (bits) between Alice's data and Bob's homodyne result:
/// `1/2 log2(1 + eta V_M / (eta (V_S + eps + dV) + 1 - eta + N))`.
pub fn mutual_information(p: &ProtocolParams, c: &ChannelParams) -> Result<f64> {
    p.validate()?;
    c.validate()?;
    let v_m = p.finite_modulation()?;
    let eta = c.eta;
    let noise = eta * (p.v_s + c.eps + p.delta_v) + 1.0 - eta + p.n;
    Ok(0.5 * (eta * v_m / noise).ln_1p() / std::f64::consts::LN_2)
}

fn require_pure_loss(c: &ChannelParams) -> Result<()> {
    if c.eps != 0.0 {
        return Err(Error::Unsupported(format!(
            "closed forms assume a pure-loss channel, got eps = {}",
            c.eps
        )));
    }
    Ok(())
}

/// Key rate (bits per channel use) for infinite modulation, `beta = 1`,
/// pure loss:
///
/// * reverse: `1/2 [log2 1/(1-eta) - log2(eta (V_S + dV) + 1 - eta)]`,
///   with trusted preparation noise `dV`;
/// * direct: `1/2 [log2 eta/(1-eta) - log2((V_S eta + 1 - eta + N) / (V_S (1-eta) + eta))]`,
///   with trusted detection noise `N`.
pub fn asymptotic_key_rate(p: &ProtocolParams, c: &ChannelParams) -> Result<f64> {
    p.validate()?;
    c.validate()?;
    require_pure_loss(c)?;
    if p.v_m != Modulation::Infinite {
        return Err(Error::Unsupported(
            "closed-form key rates need V_M = inf".to_string(),
        ));
    }
    if p.beta != 1.0 {
        return Err(Error::Unsupported(format!(
            "closed-form key rates need beta = 1, got {} (the key rate diverges to -inf otherwise)",
            p.beta
        )));
    }
    let (eta, v_s) = (c.eta, p.v_s);
    match p.direction {
        Direction::Reverse => {
            if p.n != 0.0 {
                return Err(Error::Unsupported(
                    "the reverse-reconciliation closed form has no detection noise".to_string(),
                ));
            }
            Ok(0.5 * ((1.0 / (1.0 - eta)).log2() - (eta * (v_s + p.delta_v) + 1.0 - eta).log2()))
        }
        Direction::Direct => {
            if p.delta_v != 0.0 {
                return Err(Error::Unsupported(
                    "the direct-reconciliation closed form has no preparation noise".to_string(),
                ));
            }
            Ok(0.5
                * ((eta / (1.0 - eta)).log2()
                    - ((v_s * eta + 1.0 - eta + p.n) / (v_s * (1.0 - eta) + eta)).log2()))
        }
    }
}

/// Largest trusted preparation noise keeping the asymptotic reverse
/// reconciliation key rate positive: `(2 - eta)/(1 - eta) - V_S`.
pub fn preparation_noise_threshold(eta: f64, v_s: f64) -> f64 {
    (2.0 - eta) / (1.0 - eta) - v_s
}

/// Largest trusted detection noise keeping the asymptotic direct
/// reconciliation key rate positive: `(2 eta - 1)/(1 - eta)`. Independent of
/// the signal squeezing.
pub fn detection_noise_threshold(eta: f64) -> f64 {
    (2.0 * eta - 1.0) / (1.0 - eta)
}

/// Smallest transmittance with a positive asymptotic reverse reconciliation
/// key rate under preparation noise `dV`: `1 - 1/(V_S + dV - 1)`, which is
/// `1 - 1/dV` for coherent states and `1 - 1/(dV - 1)` for infinite
/// squeezing. Zero when any loss is tolerated.
pub fn min_transmittance_preparation(v_s: f64, delta_v: f64) -> f64 {
    let x = v_s + delta_v - 1.0;
    if x <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / x).max(0.0)
    }
}

/// Smallest transmittance with a positive asymptotic direct reconciliation
/// key rate under detection noise `N`: `1 - 1/(N + 2)`.
pub fn min_transmittance_detection(n: f64) -> f64 {
    1.0 - 1.0 / (n + 2.0)
}

/// All closed-form trusted-noise bounds for the given parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrustedNoiseThresholds {
    /// Maximum preparation noise (reverse reconciliation).
    pub delta_v_max: f64,
    /// Maximum detection noise (direct reconciliation).
    pub n_max: f64,
    /// Minimum transmittance under the configured preparation noise.
    pub eta_min_preparation: f64,
    /// Minimum transmittance under the configured detection noise.
    pub eta_min_detection: f64,
}

pub fn trusted_noise_thresholds(
    p: &ProtocolParams,
    c: &ChannelParams,
) -> Result<TrustedNoiseThresholds> {
    p.validate()?;
    c.validate()?;
    require_pure_loss(c)?;
    Ok(TrustedNoiseThresholds {
        delta_v_max: preparation_noise_threshold(c.eta, p.v_s),
        n_max: detection_noise_threshold(c.eta),
        eta_min_preparation: min_transmittance_preparation(p.v_s, p.delta_v),
        eta_min_detection: min_transmittance_detection(p.n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ch(eta: f64) -> ChannelParams {
        ChannelParams::new(eta, 0.0).unwrap()
    }

    #[test]
    fn mutual_information_examples() {
        let p = ProtocolParams::coherent(Direction::Reverse).with_modulation(0.0);
        assert_eq!(mutual_information(&p, &ch(0.5)).unwrap(), 0.0);
        let p = ProtocolParams::coherent(Direction::Reverse).with_modulation(3.0);
        assert!((mutual_information(&p, &ch(1.0)).unwrap() - 1.0).abs() < 1e-15);
        let p = ProtocolParams::coherent(Direction::Reverse).with_infinite_modulation();
        assert!(mutual_information(&p, &ch(1.0)).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let p = ProtocolParams::coherent(Direction::Direct).with_infinite_modulation();
        assert!((asymptotic_key_rate(&p, &ch(0.8)).unwrap() - 1.0).abs() < 1e-14);
        assert!(asymptotic_key_rate(&p, &ch(0.5)).unwrap().abs() < 1e-15);
        let p = ProtocolParams::coherent(Direction::Reverse).with_infinite_modulation();
        assert!((asymptotic_key_rate(&p, &ch(0.5)).unwrap() - 0.5).abs() < 1e-15);
        // With dV = 0 the reverse form reduces to 1/2 log2(1/(1-eta)) - 1/2 log2(eta V_S + 1 - eta).
        let p = ProtocolParams::squeezed(0.1, Direction::Reverse).with_infinite_modulation();
        let eta: f64 = 0.3;
        let direct = 0.5 * (1.0 / (1.0 - eta)).log2() - 0.5 * (eta * 0.1 + 1.0 - eta).log2();
        assert!((asymptotic_key_rate(&p, &ch(eta)).unwrap() - direct).abs() < 1e-15);
    }

    #[test]
    fn closed_form_domain() {
        let p = ProtocolParams::coherent(Direction::Reverse);
        assert!(asymptotic_key_rate(&p, &ch(0.5)).is_err());
        let p = p.with_infinite_modulation();
        assert!(asymptotic_key_rate(&p, &ChannelParams::new(0.5, 0.1).unwrap()).is_err());
        assert!(asymptotic_key_rate(&p.with_beta(0.95), &ch(0.5)).is_err());
        assert!(asymptotic_key_rate(&p.with_detection_noise(0.1), &ch(0.5)).is_err());
        let p = p.with_direction(Direction::Direct);
        assert!(asymptotic_key_rate(&p.with_preparation_noise(0.1), &ch(0.5)).is_err());
        assert!(asymptotic_key_rate(&p.with_detection_noise(0.1), &ch(0.5)).is_ok());
    }

    #[test]
    fn threshold_limits() {
        assert!((preparation_noise_threshold(1e-9, 1.0) - 1.0).abs() < 1e-8);
        assert!((preparation_noise_threshold(1e-9, 1e-9) - 2.0).abs() < 1e-8);
        assert!((min_transmittance_detection(1.0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((detection_noise_threshold(0.75) - 2.0).abs() < 1e-15);
        assert_eq!(min_transmittance_preparation(1.0, 0.5), 0.0);
        assert!((min_transmittance_preparation(1.0, 4.0) - 0.75).abs() < 1e-15);
        assert!((min_transmittance_preparation(0.0, 5.0) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn thresholds_zero_the_closed_forms() {
        for eta in [0.2, 0.5, 0.8] {
            for vs in [1.0, 0.1] {
                let dv = preparation_noise_threshold(eta, vs);
                let p = ProtocolParams::squeezed(vs, Direction::Reverse)
                    .with_infinite_modulation()
                    .with_preparation_noise(dv);
                assert!(asymptotic_key_rate(&p, &ch(eta)).unwrap().abs() < 1e-12);
            }
        }
        for eta in [0.6, 0.9] {
            let n = detection_noise_threshold(eta);
            for vs in [1.0, 0.1] {
                let p = ProtocolParams::squeezed(vs, Direction::Direct)
                    .with_infinite_modulation()
                    .with_detection_noise(n);
                assert!(asymptotic_key_rate(&p, &ch(eta)).unwrap().abs() < 1e-12);
            }
        }
    }
}
