//! Scenario flags shared by the `keyrate` and `frontier` commands.

use anyhow::{bail, Result};
use clap::{ArgGroup, Args};
use cvqkd_core::analysis::{db_to_eta, km_to_db, Nuisance};
use cvqkd_core::protocols::{
    ChannelParams, Direction, Method, Modulation, ProtocolParams, PurificationConfig, StateFamily,
    LARGE_MODULATION,
};

use crate::UsageError;

/// A parameter given as a number or to be optimized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Setting {
    Value(f64),
    Infinite,
    Optimize,
}

fn parse_setting(s: &str) -> std::result::Result<Setting, String> {
    match s.to_ascii_lowercase().as_str() {
        "opt" => Ok(Setting::Optimize),
        "inf" => Ok(Setting::Infinite),
        other => other
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(Setting::Value)
            .ok_or_else(|| format!("expected a number, 'opt' or 'inf', got '{s}'")),
    }
}

fn parse_direction(s: &str) -> std::result::Result<Direction, String> {
    s.parse().map_err(|e: cvqkd_core::Error| e.to_string())
}

fn parse_state(s: &str) -> std::result::Result<StateFamily, String> {
    s.parse().map_err(|e: cvqkd_core::Error| e.to_string())
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse().map_err(|e: cvqkd_core::Error| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct ScenarioArgs {
    /// Reconciliation direction: dr or rr.
    #[arg(long, value_parser = parse_direction)]
    pub direction: Direction,

    /// Signal states: coherent or squeezed. Inferred from --vs when omitted.
    #[arg(long, value_parser = parse_state)]
    pub state: Option<StateFamily>,

    /// Signal x variance in SNU (1 for coherent states).
    #[arg(long)]
    pub vs: Option<f64>,

    /// Modulation variance: a number, 'inf', or 'opt' to optimize it.
    /// Numeric methods evaluate 'inf' at V_M = 1e6.
    #[arg(long, default_value = "inf", value_parser = parse_setting)]
    pub vm: Setting,

    /// Trusted preparation noise in SNU, or 'opt' (direct reconciliation).
    #[arg(long, default_value = "0", value_parser = parse_setting)]
    pub dv: Setting,

    /// Trusted detection noise in SNU, or 'opt' (reverse reconciliation).
    #[arg(long, default_value = "0", value_parser = parse_setting)]
    pub n: Setting,

    /// Reconciliation efficiency.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,

    /// Holevo-bound evaluation: purification, cloner or asymptotic.
    #[arg(long, default_value = "cloner", value_parser = parse_method)]
    pub method: Method,

    /// Ancilla coupling transmittance of the trusted-noise purification.
    #[arg(long = "coupling-t")]
    pub coupling_t: Option<f64>,

    /// Second coupling transmittance used for the convergence check.
    #[arg(long = "coupling-t-check")]
    pub coupling_t_check: Option<f64>,

    /// Largest tolerated key-rate bias from the finite coupling, in bits.
    #[arg(long = "tol-k")]
    pub tol_k: Option<f64>,
}

/// Parameters resolved from the flags.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub protocol: ProtocolParams,
    pub over: Vec<Nuisance>,
    pub method: Method,
    pub purification: PurificationConfig,
}

impl ScenarioArgs {
    pub fn resolve(&self) -> Result<Scenario> {
        let state = match (self.state, self.vs) {
            (Some(s), _) => s,
            (None, Some(v)) if v != 1.0 => StateFamily::Squeezed,
            (None, _) => StateFamily::Coherent,
        };
        let mut protocol = match (state, self.vs) {
            (StateFamily::Coherent, None | Some(1.0)) => ProtocolParams::coherent(self.direction),
            (StateFamily::Coherent, Some(v)) => {
                bail!(UsageError(format!(
                    "coherent states have V_S = 1, got --vs {v}"
                )))
            }
            (StateFamily::Squeezed, Some(v)) => ProtocolParams::squeezed(v, self.direction),
            (StateFamily::Squeezed, None) => {
                bail!(UsageError("--state squeezed needs --vs".to_string()))
            }
        }
        .with_beta(self.beta);

        let numeric = self.method != Method::Asymptotic;
        let mut over = Vec::new();
        protocol.v_m = match self.vm {
            Setting::Value(v) => Modulation::Finite(v),
            Setting::Infinite if numeric => Modulation::Finite(LARGE_MODULATION),
            Setting::Infinite => Modulation::Infinite,
            Setting::Optimize => {
                over.push(Nuisance::Modulation);
                Modulation::Finite(LARGE_MODULATION)
            }
        };
        for (setting, nuisance, flag) in [
            (self.dv, Nuisance::PreparationNoise, "--dv"),
            (self.n, Nuisance::DetectionNoise, "--n"),
        ] {
            let value = match setting {
                Setting::Value(v) => v,
                Setting::Optimize => {
                    over.push(nuisance);
                    0.0
                }
                Setting::Infinite => bail!(UsageError(format!("{flag} must be finite"))),
            };
            match nuisance {
                Nuisance::PreparationNoise => protocol.delta_v = value,
                _ => protocol.n = value,
            }
        }
        if !numeric && !over.is_empty() {
            bail!(UsageError(
                "the asymptotic method has nothing to optimize; give fixed values".to_string()
            ));
        }

        let mut purification = PurificationConfig::default();
        if let Some(t) = self.coupling_t {
            purification.t = t;
        }
        if let Some(t) = self.coupling_t_check {
            purification.t_check = t;
        }
        if let Some(tol) = self.tol_k {
            purification.tol_k = tol;
        }
        Ok(Scenario {
            protocol,
            over,
            method: self.method,
            purification,
        })
    }
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("loss").required(true).args(["eta", "db", "km"])))]
pub struct LossArgs {
    /// Channel transmittance.
    #[arg(long)]
    pub eta: Option<f64>,

    /// Channel loss in dB.
    #[arg(long)]
    pub db: Option<f64>,

    /// Fiber length in km at 0.2 dB/km.
    #[arg(long)]
    pub km: Option<f64>,

    /// Channel excess noise in SNU, referred to the channel input.
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
}

impl LossArgs {
    pub fn channel(&self) -> Result<ChannelParams> {
        let eta = match (self.eta, self.db, self.km) {
            (Some(eta), _, _) => eta,
            (_, Some(db), _) => db_to_eta(db)?,
            (_, _, Some(km)) => db_to_eta(km_to_db(km)?)?,
            _ => bail!(UsageError(
                "one of --eta, --db, --km is required".to_string()
            )),
        };
        Ok(ChannelParams::new(eta, self.eps)?)
    }
}
