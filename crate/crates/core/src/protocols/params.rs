use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Modulation variance used to stand in for "infinitely strong" modulation in
/// numeric evaluations.
pub const LARGE_MODULATION: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateFamily {
    Coherent,
    Squeezed,
}

/// Reconciliation direction: error correction referenced to Alice's data
/// (direct) or to Bob's measurement results (reverse).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "dr")]
    Direct,
    #[serde(rename = "rr")]
    Reverse,
}

/// Modulation variance: finite, or the symbolic limit of arbitrarily strong
/// modulation (accepted only by the closed-form asymptotic evaluation).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Modulation {
    Finite(f64),
    Infinite,
}

/// How the Holevo bound is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Six-mode purification: Eve's entropies from the complement state.
    Purification,
    /// Entangling-cloner dilation: Eve's modes evaluated directly.
    Cloner,
    /// Closed forms for infinite modulation and a pure-loss channel.
    Asymptotic,
}

/// Signal state, modulation, trusted noise, reconciliation.
///
/// Variances are in shot-noise units: `v_s` is the signal's `x` variance (its
/// `p` variance is `1/v_s`), `v_m` the Gaussian modulation variance applied to
/// both quadratures, `delta_v` the trusted preparation noise and `n` the
/// trusted detection noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolParams {
    pub state: StateFamily,
    #[serde(rename = "V_S")]
    pub v_s: f64,
    #[serde(rename = "V_M")]
    pub v_m: Modulation,
    #[serde(rename = "dV")]
    pub delta_v: f64,
    #[serde(rename = "N")]
    pub n: f64,
    pub beta: f64,
    pub direction: Direction,
}

impl ProtocolParams {
    /// Coherent-state protocol, `V_M = 1e6`, no trusted noise, `beta = 1`.
    pub fn coherent(direction: Direction) -> Self {
        Self {
            state: StateFamily::Coherent,
            v_s: 1.0,
            v_m: Modulation::Finite(LARGE_MODULATION),
            delta_v: 0.0,
            n: 0.0,
            beta: 1.0,
            direction,
        }
    }

    /// Squeezed-state protocol with signal `x` variance `v_s`.
    pub fn squeezed(v_s: f64, direction: Direction) -> Self {
        Self {
            state: StateFamily::Squeezed,
            v_s,
            ..Self::coherent(direction)
        }
    }

    pub fn with_modulation(mut self, v_m: f64) -> Self {
        self.v_m = Modulation::Finite(v_m);
        self
    }

    pub fn with_infinite_modulation(mut self) -> Self {
        self.v_m = Modulation::Infinite;
        self
    }

    pub fn with_preparation_noise(mut self, delta_v: f64) -> Self {
        self.delta_v = delta_v;
        self
    }

    pub fn with_detection_noise(mut self, n: f64) -> Self {
        self.n = n;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v_s > 0.0 && self.v_s <= 1.0) {
            return Err(Error::Domain(format!(
                "signal variance V_S must lie in (0, 1], got {}",
                self.v_s
            )));
        }
        if self.state == StateFamily::Coherent && self.v_s != 1.0 {
            return Err(Error::Domain(format!(
                "coherent states have V_S = 1, got {}",
                self.v_s
            )));
        }
        if let Modulation::Finite(v) = self.v_m {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!(
                    "modulation variance must be finite and >= 0, got {v}"
                )));
            }
        }
        for (name, v) in [("dV", self.delta_v), ("N", self.n)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!(
                    "trusted noise {name} must be finite and >= 0, got {v}"
                )));
            }
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::Domain(format!(
                "reconciliation efficiency must lie in (0, 1], got {}",
                self.beta
            )));
        }
        Ok(())
    }

    /// Finite modulation variance, or an error for the symbolic limit.
    pub fn finite_modulation(&self) -> Result<f64> {
        match self.v_m {
            Modulation::Finite(v) => Ok(v),
            Modulation::Infinite => Err(Error::Unsupported(
                "symbolic infinite modulation is only accepted by the asymptotic method; \
                 use a large finite V_M for numeric evaluation"
                    .to_string(),
            )),
        }
    }
}

/// Channel transmittance `eta` and input-referred excess noise `eps` (SNU).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelParams {
    pub eta: f64,
    pub eps: f64,
}

impl ChannelParams {
    pub fn new(eta: f64, eps: f64) -> Result<Self> {
        let c = Self { eta, eps };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::Domain(format!(
                "transmittance must lie in (0, 1], got {}",
                self.eta
            )));
        }
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return Err(Error::Domain(format!(
                "excess noise must be finite and >= 0, got {}",
                self.eps
            )));
        }
        Ok(())
    }
}

/// Coupling transmittance of the trusted-noise ancillas and the convergence
/// test on it.
///
/// Trusted noise of variance `dV` is injected by a beamsplitter of
/// transmittance `t` from one arm of an EPR pair of variance `dV/(1-t)`; the
/// model is exact only as `t -> 1`. The key rate is evaluated at `t` and at
/// `t_check`. Its deviation from the limit is linear in `1 - t`, so the
/// remaining bias at `t` is estimated as
/// `|K(t) - K(t_check)| (1 - t) / (t - t_check)` and must not exceed `tol_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PurificationConfig {
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "T_check")]
    pub t_check: f64,
    pub tol_k: f64,
}

impl Default for PurificationConfig {
    fn default() -> Self {
        Self {
            t: 1.0 - 1e-5,
            t_check: 1.0 - 1e-4,
            tol_k: 1e-5,
        }
    }
}

impl PurificationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.t_check && self.t_check < self.t && self.t < 1.0) {
            return Err(Error::Domain(format!(
                "need 0 < T_check < T < 1, got T = {}, T_check = {}",
                self.t, self.t_check
            )));
        }
        if !(self.tol_k > 0.0) {
            return Err(Error::Domain(format!(
                "tol_K must be positive, got {}",
                self.tol_k
            )));
        }
        Ok(())
    }

    /// Factor turning `|K(t) - K(t_check)|` into the estimated bias at `t`.
    pub fn bias_factor(&self) -> f64 {
        (1.0 - self.t) / (self.t - self.t_check)
    }
}

impl fmt::Display for StateFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StateFamily::Coherent => "coherent",
            StateFamily::Squeezed => "squeezed",
        })
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Direct => "dr",
            Direction::Reverse => "rr",
        })
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Purification => "purification",
            Method::Cloner => "cloner",
            Method::Asymptotic => "asymptotic",
        })
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modulation::Finite(v) => write!(f, "{v}"),
            Modulation::Infinite => f.write_str("inf"),
        }
    }
}

fn parse_error(what: &str, s: &str, allowed: &str) -> Error {
    Error::Domain(format!("unknown {what} '{s}', expected {allowed}"))
}

impl FromStr for StateFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "coherent" => Ok(StateFamily::Coherent),
            "squeezed" => Ok(StateFamily::Squeezed),
            _ => Err(parse_error("state family", s, "coherent|squeezed")),
        }
    }
}

impl FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dr" | "direct" => Ok(Direction::Direct),
            "rr" | "reverse" => Ok(Direction::Reverse),
            _ => Err(parse_error("direction", s, "dr|rr")),
        }
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "purification" => Ok(Method::Purification),
            "cloner" => Ok(Method::Cloner),
            "asymptotic" => Ok(Method::Asymptotic),
            _ => Err(parse_error("method", s, "purification|cloner|asymptotic")),
        }
    }
}

impl FromStr for Modulation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "inf" | "infinite" | "infinity" => Ok(Modulation::Infinite),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(Modulation::Finite)
                .ok_or_else(|| parse_error("modulation", s, "a finite number or 'inf'")),
        }
    }
}

impl Serialize for Modulation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Modulation::Finite(v) => serializer.serialize_f64(*v),
            Modulation::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Modulation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Number(f64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Number(v) => Ok(Modulation::Finite(v)),
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}
