//! Pure-loss attack in closed form: Eve replaces the channel by a
//! beamsplitter of transmittance `eta` and keeps the reflected mode, into
//! which the vacuum was injected. Only valid without channel excess noise.
//!
//! Trusted preparation noise enters as classical noise on the signal, so it
//! shows up in Eve's mode while her correlation with Alice's data does not
//! change.

use nalgebra::{DMatrix, Matrix2};

use super::params::{ChannelParams, ProtocolParams};
use super::Direction;
use crate::error::{Error, Result};
use crate::gaussian::bosonic_entropy_g;

/// Eve's mode and its cross-covariances with Alice's data and Bob's mode.
#[derive(Debug, Clone, PartialEq)]
pub struct PureLossEve {
    pub gamma_e: Matrix2<f64>,
    pub sigma_ae: Matrix2<f64>,
    pub sigma_be: Matrix2<f64>,
    /// Bob's mode (including trusted detection noise).
    pub gamma_b: Matrix2<f64>,
}

pub fn build_pure_loss_eve(p: &ProtocolParams, c: &ChannelParams) -> Result<PureLossEve> {
    p.validate()?;
    c.validate()?;
    if c.eps != 0.0 {
        return Err(Error::Unsupported(format!(
            "the pure-loss model has no excess noise, got eps = {}",
            c.eps
        )));
    }
    let v_m = p.finite_modulation()?;
    let eta = c.eta;
    let sig = [p.v_s + v_m + p.delta_v, 1.0 / p.v_s + v_m + p.delta_v];
    let r = (eta * (1.0 - eta)).sqrt();
    Ok(PureLossEve {
        gamma_e: Matrix2::from_diagonal(&sig.map(|v| (1.0 - eta) * v + eta).into()),
        sigma_ae: Matrix2::from_diagonal_element(-(1.0 - eta).sqrt() * v_m),
        sigma_be: Matrix2::from_diagonal(&sig.map(|v| r * (1.0 - v)).into()),
        gamma_b: Matrix2::from_diagonal(&sig.map(|v| eta * v + 1.0 - eta + p.n).into()),
    })
}

/// Holevo bound of the pure-loss attack, evaluated on Eve's single mode.
pub fn pure_loss_holevo(p: &ProtocolParams, c: &ChannelParams) -> Result<f64> {
    let eve = build_pure_loss_eve(p, c)?;
    let entropy = |m: Matrix2<f64>| -> Result<f64> {
        let det = m.determinant().max(1.0);
        bosonic_entropy_g((det.sqrt() - 1.0) / 2.0)
    };
    let s_e = entropy(eve.gamma_e)?;
    let (sigma, var) = match p.direction {
        Direction::Reverse => (eve.sigma_be, eve.gamma_b[(0, 0)]),
        Direction::Direct => {
            let v_m = p.finite_modulation()?;
            if v_m == 0.0 {
                return Ok(0.0);
            }
            (eve.sigma_ae, v_m)
        }
    };
    // Condition on the x quadrature of the key variable.
    let col = sigma.column(0).into_owned();
    let cond = eve.gamma_e - col * col.transpose() / var;
    Ok(s_e - entropy(cond)?)
}

impl PureLossEve {
    /// The three blocks as dynamically sized matrices.
    pub fn to_dmatrices(&self) -> [DMatrix<f64>; 3] {
        [self.gamma_e, self.sigma_ae, self.sigma_be]
            .map(|m| DMatrix::from_column_slice(2, 2, m.as_slice()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lossless_channel_gives_vacuum() {
        let p = ProtocolParams::coherent(Direction::Reverse).with_modulation(30.0);
        let c = ChannelParams::new(1.0, 0.0).unwrap();
        let eve = build_pure_loss_eve(&p, &c).unwrap();
        assert_eq!(eve.gamma_e, Matrix2::identity());
        assert_eq!(pure_loss_holevo(&p, &c).unwrap(), 0.0);
    }

    #[test]
    fn rejects_excess_noise() {
        let p = ProtocolParams::coherent(Direction::Reverse);
        let c = ChannelParams::new(0.5, 0.01).unwrap();
        assert!(matches!(
            build_pure_loss_eve(&p, &c),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn noiseless_blocks() {
        let (vs, vm, eta) = (0.25, 3.0, 0.3);
        let p = ProtocolParams::squeezed(vs, Direction::Reverse).with_modulation(vm);
        let c = ChannelParams::new(eta, 0.0).unwrap();
        let eve = build_pure_loss_eve(&p, &c).unwrap();
        assert!((eve.gamma_e[(0, 0)] - ((1.0 - eta) * (vs + vm) + eta)).abs() < 1e-15);
        assert!((eve.gamma_e[(1, 1)] - ((1.0 - eta) * (1.0 / vs + vm) + eta)).abs() < 1e-15);
        assert!((eve.sigma_ae[(0, 0)] + (1.0 - eta).sqrt() * vm).abs() < 1e-15);
        let r = (eta * (1.0 - eta)).sqrt();
        assert!((eve.sigma_be[(1, 1)] - r * (1.0 - 1.0 / vs - vm)).abs() < 1e-14);
    }
}
