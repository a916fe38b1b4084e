//! Maximization of the key rate over modulation variance and trusted noise.
//!
//! Every search is one-dimensional: a coarse scan locates the best grid point
//! and rejects objectives with more than one interior local maximum, then a
//! golden-section search refines the bracket around the best point. The
//! returned optimum is the best point evaluated, so it never falls below any
//! scanned value.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocols::{
    evaluate_key_rate, ChannelParams, Direction, KeyRateReport, Method, ProtocolParams,
    PurificationConfig,
};

/// Points of the coarse pre-scan.
pub const SCAN_POINTS: usize = 32;
/// Default modulation search range (SNU).
pub const MODULATION_BOUNDS: (f64, f64) = (1e-3, 1e4);
/// Relative tolerance on the optimal modulation variance.
pub const MODULATION_REL_TOL: f64 = 1e-4;
/// Default trusted-noise search range (SNU).
pub const NOISE_BOUNDS: (f64, f64) = (0.0, 10.0);
/// Absolute tolerance on the optimal trusted noise (SNU).
pub const NOISE_ABS_TOL: f64 = 1e-5;
/// Differences below `SCAN_FLATNESS * (1 + max |K|)` count as flat when
/// looking for multiple maxima in the pre-scan.
pub const SCAN_FLATNESS: f64 = 1e-9;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Parameter optimized per evaluation point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Nuisance {
    #[serde(rename = "V_M")]
    Modulation,
    #[serde(rename = "dV")]
    PreparationNoise,
    #[serde(rename = "N")]
    DetectionNoise,
}

/// Trusted noise that can be optimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TrustedNoise {
    #[serde(rename = "dV")]
    Preparation,
    #[serde(rename = "N")]
    Detection,
}

impl TrustedNoise {
    /// Reconciliation direction in which this noise sits on the reference
    /// side and can reduce Eve's information.
    pub fn beneficial_direction(self) -> Direction {
        match self {
            TrustedNoise::Preparation => Direction::Direct,
            TrustedNoise::Detection => Direction::Reverse,
        }
    }

    pub fn get(self, p: &ProtocolParams) -> f64 {
        match self {
            TrustedNoise::Preparation => p.delta_v,
            TrustedNoise::Detection => p.n,
        }
    }

    pub fn set(self, p: &ProtocolParams, value: f64) -> ProtocolParams {
        match self {
            TrustedNoise::Preparation => p.with_preparation_noise(value),
            TrustedNoise::Detection => p.with_detection_noise(value),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

/// Search range, spacing of the pre-scan, and stopping width measured in
/// the search coordinate (`x` for linear, `ln x` for log scale).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchInterval {
    pub lo: f64,
    pub hi: f64,
    pub scale: Scale,
    pub tol: f64,
}

impl SearchInterval {
    pub fn modulation(bounds: (f64, f64)) -> Self {
        Self {
            lo: bounds.0,
            hi: bounds.1,
            scale: Scale::Log,
            tol: MODULATION_REL_TOL,
        }
    }

    pub fn noise(bounds: (f64, f64)) -> Self {
        Self {
            lo: bounds.0,
            hi: bounds.1,
            scale: Scale::Linear,
            tol: NOISE_ABS_TOL,
        }
    }

    fn validate(&self) -> Result<()> {
        let ordered = self.lo < self.hi && self.lo.is_finite() && self.hi.is_finite();
        let positive = self.scale == Scale::Linear || self.lo > 0.0;
        if !(ordered && positive && self.tol > 0.0) {
            return Err(Error::Domain(format!(
                "invalid search interval [{}, {}] ({:?} scale, tol {})",
                self.lo, self.hi, self.scale, self.tol
            )));
        }
        Ok(())
    }

    fn to_coord(self, x: f64) -> f64 {
        match self.scale {
            Scale::Linear => x,
            Scale::Log => x.ln(),
        }
    }

    fn to_value(self, u: f64) -> f64 {
        match self.scale {
            Scale::Linear => u,
            Scale::Log => u.exp(),
        }
    }

    /// Pre-scan abscissae; the end points are exact.
    pub fn grid(&self, points: usize) -> Vec<f64> {
        let (a, b) = (self.to_coord(self.lo), self.to_coord(self.hi));
        let last = points - 1;
        (0..points)
            .map(|i| match i {
                0 => self.lo,
                i if i == last => self.hi,
                i => self.to_value(a + (b - a) * i as f64 / last as f64),
            })
            .collect()
    }
}

/// Best point found by [`maximize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Maximum<T> {
    pub arg: f64,
    pub value: f64,
    pub payload: T,
    pub evaluations: usize,
}

/// Maximize `f` over the interval. `f` returns the objective and a payload
/// kept for the best point.
pub fn maximize<T>(
    interval: &SearchInterval,
    mut f: impl FnMut(f64) -> Result<(f64, T)>,
) -> Result<Maximum<T>> {
    interval.validate()?;
    let grid = interval.grid(SCAN_POINTS);
    let mut values = Vec::with_capacity(grid.len());
    let mut best: Option<Maximum<T>> = None;
    let mut evaluations = 0;
    let mut consider =
        |x: f64, best: &mut Option<Maximum<T>>, evaluations: &mut usize| -> Result<f64> {
            let (v, payload) = f(x)?;
            *evaluations += 1;
            if v.is_nan() {
                return Err(Error::Domain(format!("objective is NaN at {x}")));
            }
            if best.as_ref().is_none_or(|b| v > b.value) {
                *best = Some(Maximum {
                    arg: x,
                    value: v,
                    payload,
                    evaluations: 0,
                });
            }
            Ok(v)
        };
    for &x in &grid {
        values.push(consider(x, &mut best, &mut evaluations)?);
    }
    check_single_peak(&grid, &values)?;

    let b = values
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &v)| if v > values[acc] { i } else { acc });
    let mut a = interval.to_coord(grid[b.saturating_sub(1)]);
    let mut c = interval.to_coord(grid[(b + 1).min(grid.len() - 1)]);
    let mut u1 = c - INV_PHI * (c - a);
    let mut u2 = a + INV_PHI * (c - a);
    let mut f1 = consider(interval.to_value(u1), &mut best, &mut evaluations)?;
    let mut f2 = consider(interval.to_value(u2), &mut best, &mut evaluations)?;
    while c - a > interval.tol {
        if f1 >= f2 {
            c = u2;
            u2 = u1;
            f2 = f1;
            u1 = c - INV_PHI * (c - a);
            f1 = consider(interval.to_value(u1), &mut best, &mut evaluations)?;
        } else {
            a = u1;
            u1 = u2;
            f1 = f2;
            u2 = a + INV_PHI * (c - a);
            f2 = consider(interval.to_value(u2), &mut best, &mut evaluations)?;
        }
    }
    let mut best = best.expect("the pre-scan evaluates at least two points");
    best.evaluations = evaluations;
    Ok(best)
}

/// Fail if the scanned values rise and fall more than once.
fn check_single_peak(grid: &[f64], values: &[f64]) -> Result<()> {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let flat = SCAN_FLATNESS * (1.0 + scale);
    let trend: Vec<i8> = values
        .windows(2)
        .filter_map(|w| {
            let d = w[1] - w[0];
            if d > flat {
                Some(1)
            } else if d < -flat {
                Some(-1)
            } else {
                None
            }
        })
        .collect();
    let peaks = trend.windows(2).filter(|w| w[0] > 0 && w[1] < 0).count();
    if peaks > 1 {
        return Err(Error::OptimizerAmbiguity {
            reason: format!("pre-scan shows {peaks} interior local maxima"),
            scan: grid.iter().copied().zip(values.iter().copied()).collect(),
        });
    }
    Ok(())
}

/// Optimized protocol parameters and the key rate they give.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub protocol: ProtocolParams,
    pub report: KeyRateReport,
}

impl Optimum {
    pub fn k(&self) -> f64 {
        self.report.k
    }
}

fn evaluate(
    p: &ProtocolParams,
    c: &ChannelParams,
    cfg: &PurificationConfig,
    method: Method,
) -> Result<Optimum> {
    Ok(Optimum {
        protocol: *p,
        report: evaluate_key_rate(p, c, cfg, method)?,
    })
}

/// Maximize the key rate over the modulation variance, searching `ln V_M`
/// within `bounds`. With `beta = 1` and no noise the key rate grows with
/// `V_M` and the upper bound is returned.
pub fn optimize_modulation(
    p: &ProtocolParams,
    c: &ChannelParams,
    cfg: &PurificationConfig,
    method: Method,
    bounds: (f64, f64),
) -> Result<Optimum> {
    let best = maximize(&SearchInterval::modulation(bounds), |v_m| {
        let o = evaluate(&p.with_modulation(v_m), c, cfg, method)?;
        Ok((o.k(), o))
    })?;
    Ok(best.payload)
}

/// Maximize the key rate over one trusted noise within `bounds`. Returns
/// zero noise when no positive amount improves on it.
///
/// Only the noise on the reference side is considered: preparation noise
/// with direct and detection noise with reverse reconciliation.
pub fn optimize_trusted_noise(
    p: &ProtocolParams,
    c: &ChannelParams,
    cfg: &PurificationConfig,
    method: Method,
    which: TrustedNoise,
    bounds: (f64, f64),
) -> Result<Optimum> {
    optimize_noise_with(p, which, bounds, |q| evaluate(q, c, cfg, method))
}

fn optimize_noise_with(
    p: &ProtocolParams,
    which: TrustedNoise,
    bounds: (f64, f64),
    inner: impl Fn(&ProtocolParams) -> Result<Optimum>,
) -> Result<Optimum> {
    if p.direction != which.beneficial_direction() {
        return Err(Error::Unsupported(format!(
            "{which} noise is only optimized with {} reconciliation",
            which.beneficial_direction()
        )));
    }
    if !(bounds.0 >= 0.0) {
        return Err(Error::Domain(format!(
            "trusted noise bounds must be non-negative, got [{}, {}]",
            bounds.0, bounds.1
        )));
    }
    let best = maximize(&SearchInterval::noise(bounds), |x| {
        let o = inner(&which.set(p, x))?;
        Ok((o.k(), o))
    })?;
    let zero = if bounds.0 == 0.0 {
        None
    } else {
        Some(inner(&which.set(p, 0.0))?)
    };
    match zero {
        Some(z) if z.k() >= best.value => Ok(z),
        _ => Ok(best.payload),
    }
}

/// Maximize the key rate over the requested nuisance parameters with their
/// default search ranges. Values not optimized are taken from `p`. At most
/// one trusted noise can be optimized; together with the modulation the
/// search is nested, modulation innermost.
pub fn optimize_key_rate(
    p: &ProtocolParams,
    c: &ChannelParams,
    cfg: &PurificationConfig,
    method: Method,
    over: &[Nuisance],
) -> Result<Optimum> {
    let modulation = over.contains(&Nuisance::Modulation);
    let noises: Vec<TrustedNoise> = over
        .iter()
        .filter_map(|n| match n {
            Nuisance::PreparationNoise => Some(TrustedNoise::Preparation),
            Nuisance::DetectionNoise => Some(TrustedNoise::Detection),
            Nuisance::Modulation => None,
        })
        .collect();
    let inner = |q: &ProtocolParams| {
        if modulation {
            optimize_modulation(q, c, cfg, method, MODULATION_BOUNDS)
        } else {
            evaluate(q, c, cfg, method)
        }
    };
    match noises.as_slice() {
        [] => inner(p),
        [which] => optimize_noise_with(p, *which, NOISE_BOUNDS, inner),
        _ => Err(Error::Unsupported(
            "only one trusted noise can be optimized at a time".to_string(),
        )),
    }
}

/// Trusted noise at which the key rate drops to zero, by bisection within
/// `bounds` to `1e-7` SNU. Zero if the key rate is not positive without the
/// noise; an error if it stays positive up to the upper bound.
pub fn noise_threshold(
    p: &ProtocolParams,
    c: &ChannelParams,
    cfg: &PurificationConfig,
    method: Method,
    which: TrustedNoise,
    bounds: (f64, f64),
) -> Result<f64> {
    let k = |x: f64| evaluate_key_rate(&which.set(p, x), c, cfg, method).map(|r| r.k);
    let (mut lo, mut hi) = bounds;
    if k(lo)? <= 0.0 {
        return Ok(lo);
    }
    if k(hi)? > 0.0 {
        return Err(Error::Domain(format!(
            "key rate is still positive at {which} = {hi}"
        )));
    }
    while hi - lo > 1e-7 {
        let mid = 0.5 * (lo + hi);
        if k(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

impl fmt::Display for Nuisance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Nuisance::Modulation => "V_M",
            Nuisance::PreparationNoise => "dV",
            Nuisance::DetectionNoise => "N",
        })
    }
}

impl FromStr for Nuisance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "V_M" | "vm" => Ok(Nuisance::Modulation),
            "dV" | "dv" => Ok(Nuisance::PreparationNoise),
            "N" | "n" => Ok(Nuisance::DetectionNoise),
            _ => Err(Error::Domain(format!(
                "unknown nuisance parameter {s:?} (expected V_M, dV or N)"
            ))),
        }
    }
}

impl fmt::Display for TrustedNoise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrustedNoise::Preparation => "preparation",
            TrustedNoise::Detection => "detection",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quiet<T>(v: T) -> Result<(T, ())> {
        Ok((v, ()))
    }

    #[test]
    fn finds_interior_maximum() {
        let iv = SearchInterval::noise((0.0, 10.0));
        let m = maximize(&iv, |x| quiet(-(x - 3.3) * (x - 3.3))).unwrap();
        assert!((m.arg - 3.3).abs() < 1e-5);
        let iv = SearchInterval::modulation((1e-3, 1e4));
        let m = maximize(&iv, |x: f64| quiet(-(x.ln() - 2.0f64.ln()).powi(2))).unwrap();
        assert!((m.arg / 2.0 - 1.0).abs() < 1e-4);
    }

    #[test]
    fn monotone_objective_returns_the_end_point() {
        let iv = SearchInterval::modulation((1e-3, 1e4));
        let m = maximize(&iv, |x: f64| quiet(x.ln())).unwrap();
        assert_eq!(m.arg, 1e4);
        let m = maximize(&iv, |x: f64| quiet(-x)).unwrap();
        assert_eq!(m.arg, 1e-3);
    }

    #[test]
    fn two_peaks_are_ambiguous() {
        let iv = SearchInterval::noise((0.0, 10.0));
        let r = maximize(&iv, |x: f64| quiet((x * 1.5).sin()));
        match r {
            Err(Error::OptimizerAmbiguity { scan, .. }) => assert_eq!(scan.len(), SCAN_POINTS),
            other => panic!("expected ambiguity, got {other:?}"),
        }
    }

    #[test]
    fn valley_is_not_ambiguous() {
        let iv = SearchInterval::noise((0.0, 10.0));
        let m = maximize(&iv, |x| quiet((x - 4.0) * (x - 4.0))).unwrap();
        assert_eq!(m.arg, 10.0);
    }

    #[test]
    fn grid_end_points_are_exact() {
        let g = SearchInterval::modulation((1e-3, 1e4)).grid(SCAN_POINTS);
        assert_eq!(g[0], 1e-3);
        assert_eq!(g[SCAN_POINTS - 1], 1e4);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn noise_pairing_is_enforced() {
        let p = ProtocolParams::coherent(Direction::Reverse);
        let c = ChannelParams::new(0.5, 0.0).unwrap();
        let cfg = PurificationConfig::default();
        let r = optimize_trusted_noise(
            &p,
            &c,
            &cfg,
            Method::Cloner,
            TrustedNoise::Preparation,
            NOISE_BOUNDS,
        );
        assert!(matches!(r, Err(Error::Unsupported(_))));
        let r = optimize_key_rate(
            &p,
            &c,
            &cfg,
            Method::Cloner,
            &[Nuisance::PreparationNoise, Nuisance::DetectionNoise],
        );
        assert!(matches!(r, Err(Error::Unsupported(_))));
    }
}
