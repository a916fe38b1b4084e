//! Grid evaluation of key rates and excess-noise frontiers.
//!
//! A [`SweepSpec`] fixes every protocol and channel parameter and lists the
//! axes to vary. The grid is the cartesian product of the axes, first axis
//! outermost, and rows are returned in that order whether the points are
//! evaluated sequentially or in parallel. A failing point is recorded in its
//! row and does not abort the sweep.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::frontier::{max_tolerable_excess_noise, FrontierPoint};
use super::optimize::{optimize_key_rate, Nuisance};
use super::units::{db_to_eta, km_to_db};
use crate::error::{Error, Result};
use crate::protocols::{
    ChannelParams, KeyRateReport, Method, Modulation, ProtocolParams, PurificationConfig,
    StateFamily,
};

/// Quantity computed at each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    /// Key rate, optimized over the nuisance parameters.
    KeyRate,
    /// Maximum tolerable excess noise; the channel's `eps` is ignored.
    Frontier,
}

/// A swept parameter. Setting `V_S` also sets the state family: coherent
/// for `V_S = 1`, squeezed otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parameter {
    #[serde(rename = "eta")]
    Eta,
    #[serde(rename = "loss_dB")]
    LossDb,
    #[serde(rename = "distance_km")]
    DistanceKm,
    #[serde(rename = "eps")]
    Eps,
    #[serde(rename = "V_S")]
    SignalVariance,
    #[serde(rename = "V_M")]
    Modulation,
    #[serde(rename = "dV")]
    PreparationNoise,
    #[serde(rename = "N")]
    DetectionNoise,
    #[serde(rename = "beta")]
    Beta,
}

impl Parameter {
    fn is_loss(self) -> bool {
        matches!(
            self,
            Parameter::Eta | Parameter::LossDb | Parameter::DistanceKm
        )
    }

    fn nuisance(self) -> Option<Nuisance> {
        match self {
            Parameter::Modulation => Some(Nuisance::Modulation),
            Parameter::PreparationNoise => Some(Nuisance::PreparationNoise),
            Parameter::DetectionNoise => Some(Nuisance::DetectionNoise),
            _ => None,
        }
    }

    /// Set this parameter. Loss values are converted to a transmittance.
    pub fn apply(self, value: f64, p: &mut ProtocolParams, c: &mut ChannelParams) -> Result<()> {
        match self {
            Parameter::Eta => c.eta = value,
            Parameter::LossDb => c.eta = db_to_eta(value)?,
            Parameter::DistanceKm => c.eta = db_to_eta(km_to_db(value)?)?,
            Parameter::Eps => c.eps = value,
            Parameter::SignalVariance => {
                p.v_s = value;
                p.state = if value == 1.0 {
                    StateFamily::Coherent
                } else {
                    StateFamily::Squeezed
                };
            }
            Parameter::Modulation => p.v_m = Modulation::Finite(value),
            Parameter::PreparationNoise => p.delta_v = value,
            Parameter::DetectionNoise => p.n = value,
            Parameter::Beta => p.beta = value,
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub parameter: Parameter,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(parameter: Parameter, values: Vec<f64>) -> Self {
        Self { parameter, values }
    }

    /// `start, start + step, ...` up to `stop` inclusive (within a
    /// hundredth of a step).
    pub fn range(parameter: Parameter, start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && stop >= start && start.is_finite() && stop.is_finite()) {
            return Err(Error::Domain(format!(
                "invalid range {start}..={stop} step {step}"
            )));
        }
        let n = ((stop - start) / step + 0.01).floor() as usize;
        let values = (0..=n).map(|i| start + step * i as f64).collect();
        Ok(Self { parameter, values })
    }

    fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Domain(format!(
                "axis {} has no values",
                self.parameter
            )));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "axis {} has non-finite values",
                self.parameter
            )));
        }
        let up = self.values.windows(2).all(|w| w[1] > w[0]);
        let down = self.values.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            return Err(Error::Domain(format!(
                "axis {} is not strictly monotone",
                self.parameter
            )));
        }
        Ok(())
    }
}

/// Declarative sweep: fixed parameters, axes, objective and the nuisance
/// parameters optimized at every point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Prefix of the scenario ids of the rows.
    #[serde(default)]
    pub label: String,
    pub protocol: ProtocolParams,
    pub channel: ChannelParams,
    #[serde(default)]
    pub purification: PurificationConfig,
    #[serde(default = "default_method")]
    pub method: Method,
    pub objective: Objective,
    #[serde(default)]
    pub optimize_over: Vec<Nuisance>,
    #[serde(default)]
    pub axes: Vec<Axis>,
}

fn default_method() -> Method {
    Method::Cloner
}

impl SweepSpec {
    /// A key-rate sweep without axes or optimization, evaluated with the
    /// cloner method.
    pub fn new(label: impl Into<String>, protocol: ProtocolParams, channel: ChannelParams) -> Self {
        Self {
            label: label.into(),
            protocol,
            channel,
            purification: PurificationConfig::default(),
            method: default_method(),
            objective: Objective::KeyRate,
            optimize_over: Vec::new(),
            axes: Vec::new(),
        }
    }

    pub fn with_objective(mut self, objective: Objective) -> Self {
        self.objective = objective;
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn optimizing(mut self, over: &[Nuisance]) -> Self {
        self.optimize_over = over.to_vec();
        self
    }

    pub fn with_axis(mut self, axis: Axis) -> Self {
        self.axes.push(axis);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.protocol.validate()?;
        self.channel.validate()?;
        self.purification.validate()?;
        let mut seen = BTreeSet::new();
        for axis in &self.axes {
            axis.validate()?;
            if !seen.insert(axis.parameter) {
                return Err(Error::Domain(format!(
                    "parameter {} appears on two axes",
                    axis.parameter
                )));
            }
            if let Some(n) = axis.parameter.nuisance() {
                if self.optimize_over.contains(&n) {
                    return Err(Error::Domain(format!(
                        "{n} cannot be both swept and optimized"
                    )));
                }
            }
        }
        if self.axes.iter().filter(|a| a.parameter.is_loss()).count() > 1 {
            return Err(Error::Domain(
                "at most one of eta, loss_dB and distance_km can be swept".to_string(),
            ));
        }
        if self.objective == Objective::Frontier && seen.contains(&Parameter::Eps) {
            return Err(Error::Domain(
                "a frontier sweep solves for eps, which cannot be an axis".to_string(),
            ));
        }
        let distinct: BTreeSet<_> = self.optimize_over.iter().collect();
        if distinct.len() != self.optimize_over.len() {
            return Err(Error::Domain(
                "optimize_over lists a parameter twice".to_string(),
            ));
        }
        Ok(())
    }

    /// Grid points in row order.
    pub fn points(&self) -> Result<Vec<SweepPoint>> {
        self.validate()?;
        let total: usize = self.axes.iter().map(|a| a.values.len()).product();
        let mut points = Vec::with_capacity(total);
        for index in 0..total {
            let mut protocol = self.protocol;
            let mut channel = self.channel;
            let mut rest = index;
            let mut setting = Ok(());
            for axis in self.axes.iter().rev() {
                let n = axis.values.len();
                let v = axis.values[rest % n];
                rest /= n;
                setting = setting.and(axis.parameter.apply(v, &mut protocol, &mut channel));
            }
            points.push(SweepPoint {
                index,
                scenario_id: scenario_id(&self.label, index),
                protocol,
                channel,
                setting_error: setting.err(),
            });
        }
        Ok(points)
    }
}

fn scenario_id(label: &str, index: usize) -> String {
    if label.is_empty() {
        index.to_string()
    } else {
        format!("{label}/{index}")
    }
}

/// One grid point before evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub index: usize,
    pub scenario_id: String,
    pub protocol: ProtocolParams,
    pub channel: ChannelParams,
    setting_error: Option<Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeyRateRow {
    pub scenario_id: String,
    /// Parameters evaluated, including optimized values.
    pub protocol: ProtocolParams,
    pub channel: ChannelParams,
    pub result: std::result::Result<KeyRateReport, Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontierRow {
    pub scenario_id: String,
    /// Parameters as requested at this point (optimized values are in the
    /// frontier point).
    pub protocol: ProtocolParams,
    pub eta: f64,
    pub result: std::result::Result<FrontierPoint, Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepRow {
    KeyRate(KeyRateRow),
    Frontier(FrontierRow),
}

impl SweepRow {
    pub fn scenario_id(&self) -> &str {
        match self {
            SweepRow::KeyRate(r) => &r.scenario_id,
            SweepRow::Frontier(r) => &r.scenario_id,
        }
    }

    pub fn error(&self) -> Option<&Error> {
        match self {
            SweepRow::KeyRate(r) => r.result.as_ref().err(),
            SweepRow::Frontier(r) => r.result.as_ref().err(),
        }
    }
}

/// How grid points are distributed over threads. `Parallel` uses the rayon
/// global pool and falls back to sequential evaluation when the crate is
/// built without the `parallel` feature. Both give identical rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExecutionMode {
    Sequential,
    Parallel,
}

impl Default for ExecutionMode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecutionMode::Parallel
        } else {
            ExecutionMode::Sequential
        }
    }
}

/// Evaluate one grid point.
pub fn evaluate_point(spec: &SweepSpec, point: &SweepPoint) -> SweepRow {
    let scenario_id = point.scenario_id.clone();
    match spec.objective {
        Objective::KeyRate => {
            let result = match &point.setting_error {
                Some(e) => Err(e.clone()),
                None => optimize_key_rate(
                    &point.protocol,
                    &point.channel,
                    &spec.purification,
                    spec.method,
                    &spec.optimize_over,
                ),
            };
            let protocol = result.as_ref().map_or(point.protocol, |o| o.protocol);
            SweepRow::KeyRate(KeyRateRow {
                scenario_id,
                protocol,
                channel: point.channel,
                result: result.map(|o| o.report),
            })
        }
        Objective::Frontier => {
            let result = match &point.setting_error {
                Some(e) => Err(e.clone()),
                None => max_tolerable_excess_noise(
                    &point.protocol,
                    point.channel.eta,
                    &spec.purification,
                    spec.method,
                    &spec.optimize_over,
                ),
            };
            SweepRow::Frontier(FrontierRow {
                scenario_id,
                protocol: point.protocol,
                eta: point.channel.eta,
                result,
            })
        }
    }
}

/// Evaluate the whole grid in the default execution mode.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    run_sweep_with(spec, ExecutionMode::default())
}

pub fn run_sweep_with(spec: &SweepSpec, mode: ExecutionMode) -> Result<Vec<SweepRow>> {
    let points = spec.points()?;
    Ok(match mode {
        ExecutionMode::Sequential => points.iter().map(|pt| evaluate_point(spec, pt)).collect(),
        ExecutionMode::Parallel => evaluate_parallel(spec, &points),
    })
}

#[cfg(feature = "parallel")]
fn evaluate_parallel(spec: &SweepSpec, points: &[SweepPoint]) -> Vec<SweepRow> {
    use rayon::prelude::*;
    points
        .par_iter()
        .map(|pt| evaluate_point(spec, pt))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn evaluate_parallel(spec: &SweepSpec, points: &[SweepPoint]) -> Vec<SweepRow> {
    points.iter().map(|pt| evaluate_point(spec, pt)).collect()
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parameter::Eta => "eta",
            Parameter::LossDb => "loss_dB",
            Parameter::DistanceKm => "distance_km",
            Parameter::Eps => "eps",
            Parameter::SignalVariance => "V_S",
            Parameter::Modulation => "V_M",
            Parameter::PreparationNoise => "dV",
            Parameter::DetectionNoise => "N",
            Parameter::Beta => "beta",
        })
    }
}

impl FromStr for Parameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eta" => Ok(Parameter::Eta),
            "loss_dB" | "db" => Ok(Parameter::LossDb),
            "distance_km" | "km" => Ok(Parameter::DistanceKm),
            "eps" => Ok(Parameter::Eps),
            "V_S" | "vs" => Ok(Parameter::SignalVariance),
            "V_M" | "vm" => Ok(Parameter::Modulation),
            "dV" | "dv" => Ok(Parameter::PreparationNoise),
            "N" | "n" => Ok(Parameter::DetectionNoise),
            "beta" => Ok(Parameter::Beta),
            _ => Err(Error::Domain(format!("unknown sweep parameter {s:?}"))),
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::KeyRate => "keyrate",
            Objective::Frontier => "frontier",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::Direction;

    fn spec() -> SweepSpec {
        SweepSpec::new(
            "t",
            ProtocolParams::coherent(Direction::Reverse),
            ChannelParams::new(0.5, 0.01).unwrap(),
        )
    }

    #[test]
    fn single_point() {
        let rows = run_sweep(&spec()).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].scenario_id(), "t/0");
        assert!(rows[0].error().is_none());
    }

    #[test]
    fn row_order_is_first_axis_outermost() {
        let s = spec()
            .with_axis(Axis::new(Parameter::Eps, vec![0.0, 0.1]))
            .with_axis(Axis::new(Parameter::Eta, vec![0.2, 0.4, 0.6]));
        let pts = s.points().unwrap();
        let got: Vec<(f64, f64)> = pts.iter().map(|p| (p.channel.eps, p.channel.eta)).collect();
        assert_eq!(
            got,
            vec![
                (0.0, 0.2),
                (0.0, 0.4),
                (0.0, 0.6),
                (0.1, 0.2),
                (0.1, 0.4),
                (0.1, 0.6)
            ]
        );
    }

    #[test]
    fn failures_stay_in_their_row() {
        let s = spec().with_axis(Axis::new(Parameter::Beta, vec![0.5, 1.0, 1.5]));
        let rows = run_sweep(&s).unwrap();
        assert!(rows[0].error().is_none());
        assert!(rows[1].error().is_none());
        assert!(matches!(rows[2].error(), Some(Error::Domain(_))));
    }

    #[test]
    fn invalid_specs() {
        let bad = [
            spec().with_axis(Axis::new(Parameter::Eta, vec![])),
            spec().with_axis(Axis::new(Parameter::Eta, vec![0.2, 0.2])),
            spec()
                .with_axis(Axis::new(Parameter::Eta, vec![0.2]))
                .with_axis(Axis::new(Parameter::LossDb, vec![1.0])),
            spec()
                .with_axis(Axis::new(Parameter::Modulation, vec![1.0, 2.0]))
                .optimizing(&[Nuisance::Modulation]),
            spec()
                .with_objective(Objective::Frontier)
                .with_axis(Axis::new(Parameter::Eps, vec![0.1])),
        ];
        for s in bad {
            assert!(s.points().is_err(), "{s:?}");
        }
    }

    #[test]
    fn signal_variance_sets_the_family() {
        let (mut p, mut c) = (
            ProtocolParams::coherent(Direction::Direct),
            ChannelParams::new(0.5, 0.0).unwrap(),
        );
        Parameter::SignalVariance
            .apply(0.1, &mut p, &mut c)
            .unwrap();
        assert_eq!(p.state, StateFamily::Squeezed);
        Parameter::SignalVariance
            .apply(1.0, &mut p, &mut c)
            .unwrap();
        assert_eq!(p.state, StateFamily::Coherent);
        Parameter::DistanceKm.apply(20.0, &mut p, &mut c).unwrap();
        assert!((c.eta - 0.398_107_170_553_497_2).abs() < 1e-15);
    }

    #[test]
    fn ranges_include_the_end_point() {
        let a = Axis::range(Parameter::LossDb, 0.5, 3.0, 0.5).unwrap();
        assert_eq!(a.values.len(), 6);
        assert!((a.values[5] - 3.0).abs() < 1e-12);
        assert!(Axis::range(Parameter::LossDb, 1.0, 0.0, 0.5).is_err());
    }
}
