//! Entangling-cloner dilation of the channel, with Eve's modes explicit.
//!
//! Modes, in order: `M` (Alice's modulation data, classical), `B` (signal),
//! `E1`/`E2` (Eve's EPR pair of variance `W`), `D`/`F` and `J`/`L` (trusted
//! preparation and detection noise pairs, coupled exactly as in the
//! purification). `E1` replaces the vacuum at the channel beamsplitter of
//! transmittance `eta`; with the input-referred excess noise convention
//! `eta (V + eps) + 1 - eta = eta V + (1 - eta) W`, hence
//! `W = 1 + eta eps / (1 - eta)`.

use nalgebra::DMatrix;

use super::params::{ChannelParams, ProtocolParams};
use super::purification::NoiseInjection;
use super::Direction;
use crate::error::{Error, Result};
use crate::gaussian::{GaussianSystem, Quadrature, Role};
use crate::real::Dd;

pub const MODE_M: usize = 0;
pub const MODE_B: usize = 1;
pub const MODE_E1: usize = 2;
pub const MODE_E2: usize = 3;
pub const MODE_D: usize = 4;
pub const MODE_F: usize = 5;
pub const MODE_J: usize = 6;
pub const MODE_L: usize = 7;

/// Eve's EPR variance for input-referred excess noise `eps`.
pub fn cloner_variance(c: &ChannelParams) -> Result<f64> {
    if c.eta >= 1.0 {
        if c.eps > 0.0 {
            return Err(Error::Unsupported(format!(
                "a lossless channel with excess noise {} has no entangling-cloner dilation",
                c.eps
            )));
        }
        return Ok(1.0);
    }
    Ok(1.0 + c.eta * c.eps / (1.0 - c.eta))
}

/// Build the eight-mode cloner state at ancilla transmittance `t`.
pub fn build_entangling_cloner(
    p: &ProtocolParams,
    c: &ChannelParams,
    t: f64,
) -> Result<GaussianSystem<Dd>> {
    p.validate()?;
    c.validate()?;
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!(
            "ancilla transmittance must lie in (0, 1), got {t}"
        )));
    }
    let w = Dd::from(cloner_variance(c)?);
    let v_m = Dd::from(p.finite_modulation()?);
    let v_s = Dd::from(p.v_s);
    let one = Dd::from(1.0);
    let zero = Dd::from(0.0);

    // Alice's data and the ensemble-averaged signal: cov(M, B) = V_M I.
    let a = v_s + v_m;
    let b = one / v_s + v_m;
    let data = DMatrix::from_row_slice(
        4,
        4,
        &[
            v_m, zero, v_m, zero, //
            zero, v_m, zero, v_m, //
            v_m, zero, a, zero, //
            zero, v_m, zero, b,
        ],
    );
    let signal = GaussianSystem::new(data, vec![Role::ClassicalData, Role::Bob])?;
    let eve = GaussianSystem::epr_source_with_roles(w, [Role::EveHeld, Role::EveHeld])?;
    let prep = NoiseInjection::new(p.delta_v, t);
    let det = NoiseInjection::new(p.n, t);
    let ancillas = [Role::TrustedAncilla, Role::TrustedAncilla];
    let prep_pair = GaussianSystem::epr_source_with_roles(prep.v, ancillas)?;
    let det_pair = GaussianSystem::epr_source_with_roles(det.v, ancillas)?;

    signal
        .tensor(&eve)
        .tensor(&prep_pair)
        .tensor(&det_pair)
        .apply_beamsplitter(MODE_B, MODE_D, prep.t)?
        .apply_beamsplitter(MODE_B, MODE_E1, Dd::from(c.eta))?
        .apply_beamsplitter(MODE_B, MODE_J, det.t)
}

/// Entropies `(S(E), S(E|key))` and the clamp-warning count, evaluated
/// directly on Eve's modes.
pub(crate) fn eve_entropies(
    p: &ProtocolParams,
    c: &ChannelParams,
    t: f64,
) -> Result<(f64, f64, usize)> {
    let sys = build_entangling_cloner(p, c, t)?;
    let eve = sys.reduce(&[MODE_E1, MODE_E2])?;
    let (s_e, w1) = eve.entropy_with_warnings()?;
    let (s_cond, w2) = match p.direction {
        Direction::Reverse => sys
            .reduce(&[MODE_B, MODE_E1, MODE_E2])?
            .condition_on_homodyne(0, Quadrature::X)?
            .entropy_with_warnings()?,
        Direction::Direct => {
            if p.finite_modulation()? == 0.0 {
                // No data, nothing to condition on.
                (s_e, 0)
            } else {
                sys.reduce(&[MODE_M, MODE_E1, MODE_E2])?
                    .condition_on_classical(&[(0, Quadrature::X)])?
                    .entropy_with_warnings()?
            }
        }
    };
    Ok((s_e, s_cond, w1 + w2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::Real;

    #[test]
    fn output_variance_identity() {
        let p = ProtocolParams::squeezed(0.3, Direction::Reverse)
            .with_modulation(7.0)
            .with_preparation_noise(0.2)
            .with_detection_noise(0.5);
        let c = ChannelParams::new(0.35, 0.08).unwrap();
        let sys = build_entangling_cloner(&p, &c, 1.0 - 1e-10).unwrap();
        let want_x = 0.35 * (0.3 + 7.0 + 0.2 + 0.08) + 0.65 + 0.5;
        let want_p = 0.35 * (1.0 / 0.3 + 7.0 + 0.2 + 0.08) + 0.65 + 0.5;
        let m = sys.matrix();
        assert!((m[(2 * MODE_B, 2 * MODE_B)].as_f64() - want_x).abs() < 1e-8);
        assert!((m[(2 * MODE_B + 1, 2 * MODE_B + 1)].as_f64() - want_p).abs() < 1e-8);
    }

    #[test]
    fn lossless_noisy_channel_is_rejected() {
        let c = ChannelParams::new(1.0, 0.1).unwrap();
        assert!(matches!(cloner_variance(&c), Err(Error::Unsupported(_))));
        let c = ChannelParams::new(1.0, 0.0).unwrap();
        assert_eq!(cloner_variance(&c).unwrap(), 1.0);
    }

    #[test]
    fn lossless_channel_leaks_nothing() {
        let p = ProtocolParams::coherent(Direction::Reverse).with_modulation(20.0);
        let c = ChannelParams::new(1.0, 0.0).unwrap();
        for dir in [Direction::Direct, Direction::Reverse] {
            let (s_e, s_c, _) = eve_entropies(&p.with_direction(dir), &c, 1.0 - 1e-5).unwrap();
            assert!(s_e.abs() < 1e-12 && s_c.abs() < 1e-12);
        }
    }
}
