//! Six-mode purification with trusted preparation and detection noise.
//!
//! Modes, in order: `A` (Alice's arm of the source), `B` (signal, received by
//! Bob), `D`/`F` (EPR pair of variance `V_PN` whose arm `D` injects the
//! preparation noise before the channel), `J`/`L` (EPR pair of variance `V_DN`
//! whose arm `J` injects the detection noise in front of Bob's detector).
//! Both injections use a beamsplitter of transmittance `T` close to 1 with
//! `V_PN = dV/(1-T)`, `V_DN = N/(1-T)`, so that they add `dV` and `N`
//! to the signal in the limit `T -> 1`. When a noise is zero its pair is left
//! in the vacuum and uncoupled, keeping the mode layout fixed.
//!
//! Eve purifies the whole six-mode state, so her entropies are obtained from
//! complements: `S(E) = S(ABDFJL)`, `S(E|x_B) = S(ADFJL | x_B)` and
//! `S(E|x_A) = S(BDFJLC | x_A)` where `C` is Alice's measurement ancilla.

use nalgebra::DMatrix;
use num_traits::Float;

use super::params::{ChannelParams, ProtocolParams};
use super::source::Source;
use crate::error::{Error, Result};
use crate::gaussian::{GaussianSystem, Quadrature, Role};
use crate::real::Dd;

pub const MODE_A: usize = 0;
pub const MODE_B: usize = 1;
pub const MODE_D: usize = 2;
pub const MODE_F: usize = 3;
pub const MODE_J: usize = 4;
pub const MODE_L: usize = 5;

/// Variance and coupling transmittance of one trusted-noise ancilla pair.
#[derive(Debug, Clone, Copy)]
pub(crate) struct NoiseInjection {
    /// EPR variance, `max(noise / (1 - T), 1)`.
    pub v: Dd,
    /// Transmittance actually used: `T` when noise is present, else 1.
    pub t: Dd,
}

impl NoiseInjection {
    pub fn new(noise: f64, t: f64) -> Self {
        if noise > 0.0 {
            let one = Dd::from(1.0);
            let t = Dd::from(t);
            Self {
                v: (Dd::from(noise) / (one - t)).max(one),
                t,
            }
        } else {
            Self {
                v: Dd::from(1.0),
                t: Dd::from(1.0),
            }
        }
    }

    /// `sqrt(V^2 - 1)`, the magnitude of the pair's correlations.
    pub fn corr(&self) -> Dd {
        let one = Dd::from(1.0);
        ((self.v - one) * (self.v + one)).sqrt()
    }
}

/// Build the six-mode state `ABDFJL` at ancilla transmittance `t`.
pub fn build_trusted_noise_purification(
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
    let src = Source::new(p.v_s, p.finite_modulation()?);
    let prep = NoiseInjection::new(p.delta_v, t);
    let det = NoiseInjection::new(p.n, t);
    let data = six_mode_matrix(&src, &prep, &det, c);
    GaussianSystem::new(
        data,
        vec![
            Role::Alice,
            Role::Bob,
            Role::TrustedAncilla,
            Role::TrustedAncilla,
            Role::TrustedAncilla,
            Role::TrustedAncilla,
        ],
    )
}

fn six_mode_matrix(
    src: &Source,
    prep: &NoiseInjection,
    det: &NoiseInjection,
    c: &ChannelParams,
) -> DMatrix<Dd> {
    let one = Dd::from(1.0);
    let zero = Dd::from(0.0);
    let eta = Dd::from(c.eta);
    let eps = Dd::from(c.eps);
    let (tp, td) = (prep.t, det.t);
    let (vpn, vdn) = (prep.v, det.v);
    let mut m = DMatrix::from_element(12, 12, zero);
    for q in 0..2 {
        let sign = if q == 0 { one } else { -one };
        let v = src.signal[q];
        let cq = src.corr[q];
        let d = sign * prep.corr();
        let j = sign * det.corr();
        // Signal after preparation noise, then after the channel.
        let u = tp * v + (one - tp) * vpn;
        let w = eta * (u + eps) + one - eta;
        let idx = |mode: usize| 2 * mode + q;
        let mut set = |r: usize, s: usize, val: Dd| {
            m[(idx(r), idx(s))] = val;
            m[(idx(s), idx(r))] = val;
        };
        set(MODE_A, MODE_A, src.nu);
        set(MODE_A, MODE_B, (td * eta * tp).sqrt() * cq);
        set(MODE_A, MODE_D, -(one - tp).sqrt() * cq);
        set(MODE_A, MODE_J, -((one - td) * eta * tp).sqrt() * cq);

        set(MODE_B, MODE_B, td * w + (one - td) * vdn);
        set(
            MODE_B,
            MODE_D,
            (td * eta * tp * (one - tp)).sqrt() * (vpn - v),
        );
        set(MODE_B, MODE_F, (td * eta * (one - tp)).sqrt() * d);
        set(MODE_B, MODE_J, (td * (one - td)).sqrt() * (vdn - w));
        set(MODE_B, MODE_L, (one - td).sqrt() * j);

        set(MODE_D, MODE_D, tp * vpn + (one - tp) * v);
        set(MODE_D, MODE_F, tp.sqrt() * d);
        set(
            MODE_D,
            MODE_J,
            -((one - td) * eta * tp * (one - tp)).sqrt() * (vpn - v),
        );

        set(MODE_F, MODE_F, vpn);
        set(MODE_F, MODE_J, -((one - td) * eta * (one - tp)).sqrt() * d);

        set(MODE_J, MODE_J, td * vdn + (one - td) * w);
        set(MODE_J, MODE_L, td.sqrt() * j);
        set(MODE_L, MODE_L, vdn);
    }
    m
}

/// Entropies `(S(E), S(E|key))` and the clamp-warning count, evaluated on the
/// purification at ancilla transmittance `t`.
pub(crate) fn eve_entropies(
    p: &ProtocolParams,
    c: &ChannelParams,
    t: f64,
) -> Result<(f64, f64, usize)> {
    let sys = build_trusted_noise_purification(p, c, t)?;
    let (s_e, w1) = sys.entropy_with_warnings()?;
    let cond = match p.direction {
        super::Direction::Reverse => sys.condition_on_homodyne(MODE_B, Quadrature::X)?,
        super::Direction::Direct => {
            let src = Source::new(p.v_s, p.finite_modulation()?);
            let ancilla = GaussianSystem::squeezed_vacuum(src.ancilla_x, Role::Alice)?;
            let c_mode = sys.modes();
            sys.tensor(&ancilla)
                .apply_beamsplitter(MODE_A, c_mode, Dd::from(0.5))?
                .condition_on_homodyne(MODE_A, Quadrature::X)?
        }
    };
    let (s_cond, w2) = cond.entropy_with_warnings()?;
    Ok((s_e, s_cond, w1 + w2))
}
