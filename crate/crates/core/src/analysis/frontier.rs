//! Maximum tolerable channel excess noise at a given transmittance.

use serde::{Deserialize, Serialize};

use super::optimize::{optimize_key_rate, Nuisance, Optimum};
use super::units::{db_to_km, eta_to_db};
use crate::error::{Error, Result};
use crate::protocols::{ChannelParams, Method, ProtocolParams, PurificationConfig};

/// Upper end of the excess-noise search (SNU).
pub const EPS_CEILING: f64 = 5.0;
/// Absolute width of the final excess-noise bracket (SNU).
pub const EPS_ABS_TOL: f64 = 1e-5;
/// Relative width of the final bracket, so that small frontiers are resolved
/// as well as large ones.
pub const EPS_REL_TOL: f64 = 1e-4;
/// Points of the monotonicity pre-scan over `[0, EPS_CEILING]`.
pub const MONOTONICITY_SCAN: usize = 8;
/// Increase of the key rate with excess noise tolerated as round-off.
pub const MONOTONICITY_TOL: f64 = 1e-8;
const MAX_BISECTIONS: usize = 200;

/// Largest excess noise with a positive (optimized) key rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    pub eta: f64,
    #[serde(rename = "loss_dB")]
    pub loss_db: f64,
    pub distance_km: f64,
    pub eps_max: f64,
    /// Protocol parameters at `eps_max`, with optimized nuisance values.
    pub protocol: ProtocolParams,
    /// Key rate at `eps_max`.
    #[serde(rename = "K")]
    pub k: f64,
    /// The key rate is not positive even without excess noise.
    pub insecure_at_zero: bool,
    /// The key rate is still positive at the search ceiling.
    pub hit_ceiling: bool,
}

/// Bisect the sign of the key rate in `eps` over `[0, EPS_CEILING]`,
/// optimizing the `over` parameters at every trial value.
pub fn max_tolerable_excess_noise(
    p: &ProtocolParams,
    eta: f64,
    cfg: &PurificationConfig,
    method: Method,
    over: &[Nuisance],
) -> Result<FrontierPoint> {
    let loss_db = eta_to_db(eta)?;
    let point = |eps_max: f64, o: Optimum, insecure_at_zero: bool, hit_ceiling: bool| {
        Ok(FrontierPoint {
            eta,
            loss_db,
            distance_km: db_to_km(loss_db)?,
            eps_max,
            protocol: o.protocol,
            k: o.k(),
            insecure_at_zero,
            hit_ceiling,
        })
    };
    let at = |eps: f64| optimize_key_rate(p, &ChannelParams::new(eta, eps)?, cfg, method, over);

    let zero = at(0.0)?;
    if zero.k() <= 0.0 {
        return point(0.0, zero, true, false);
    }
    let last = MONOTONICITY_SCAN - 1;
    let grid: Vec<f64> = (0..MONOTONICITY_SCAN)
        .map(|i| EPS_CEILING * i as f64 / last as f64)
        .collect();
    let mut scan = vec![zero];
    for &eps in &grid[1..] {
        scan.push(at(eps)?);
    }
    for (i, w) in scan.windows(2).enumerate() {
        if w[1].k() > w[0].k() + MONOTONICITY_TOL * (1.0 + w[0].k().abs()) {
            return Err(Error::NonMonotone(format!(
                "K({}) = {} < K({}) = {} at eta = {eta}",
                grid[i],
                w[0].k(),
                grid[i + 1],
                w[1].k()
            )));
        }
    }
    let Some(first_insecure) = scan.iter().position(|o| o.k() <= 0.0) else {
        return point(EPS_CEILING, scan[last], false, true);
    };
    let (mut lo, mut hi) = (grid[first_insecure - 1], grid[first_insecure]);
    let mut best = scan[first_insecure - 1];
    for _ in 0..MAX_BISECTIONS {
        let width = hi - lo;
        if width <= EPS_ABS_TOL && width <= EPS_REL_TOL * lo {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let o = at(mid)?;
        if o.k() > 0.0 {
            lo = mid;
            best = o;
        } else {
            hi = mid;
        }
    }
    point(lo, best, false, false)
}
