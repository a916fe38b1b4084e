//! JSON run configuration for `cvqkd sweep` and the sidecar written next to
//! every CSV.

use std::path::Path;

use anyhow::{Context, Result};
use cvqkd_core::analysis::{Axis, Nuisance, Objective, SweepRow, SweepSpec};
use cvqkd_core::protocols::{
    ChannelParams, Method, Modulation, ProtocolParams, PurificationConfig, LARGE_MODULATION,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::UsageError;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL: &str = "cvqkd";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A declarative sweep. Unknown keys are rejected; omitted optional keys
/// take their defaults and appear explicitly in the sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub label: String,
    pub protocol: ProtocolParams,
    pub channel: ChannelParams,
    #[serde(default)]
    pub purification: PurificationConfig,
    #[serde(default = "default_method")]
    pub method: Method,
    #[serde(default = "default_objective")]
    pub objective: Objective,
    #[serde(default)]
    pub optimize_over: Vec<Nuisance>,
    #[serde(default)]
    pub axes: Vec<Axis>,
}

fn default_method() -> Method {
    Method::Cloner
}

fn default_objective() -> Objective {
    Objective::KeyRate
}

impl RunConfig {
    /// Parse and validate. Syntax errors, unknown keys and type errors are
    /// reported with their line and column.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| UsageError(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(UsageError(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                cfg.schema_version
            ))
            .into());
        }
        let cfg = cfg.resolved();
        cfg.spec()
            .validate()
            .map_err(|e| UsageError(format!("invalid config: {e}")))?;
        Ok(cfg)
    }

    /// Numeric methods evaluate `V_M = inf` at a large finite value.
    fn resolved(mut self) -> Self {
        if self.method != Method::Asymptotic && self.protocol.v_m == Modulation::Infinite {
            self.protocol.v_m = Modulation::Finite(LARGE_MODULATION);
        }
        self
    }

    pub fn spec(&self) -> SweepSpec {
        SweepSpec {
            label: self.label.clone(),
            protocol: self.protocol,
            channel: self.channel,
            purification: self.purification,
            method: self.method,
            objective: self.objective,
            optimize_over: self.optimize_over.clone(),
            axes: self.axes.clone(),
        }
    }

    pub fn from_spec(spec: &SweepSpec) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            label: spec.label.clone(),
            protocol: spec.protocol,
            channel: spec.channel,
            purification: spec.purification,
            method: spec.method,
            objective: spec.objective,
            optimize_over: spec.optimize_over.clone(),
            axes: spec.axes.clone(),
        }
        .resolved()
    }
}

/// Scenario ids and messages of the rows that failed.
pub fn row_errors(rows: &[SweepRow]) -> Vec<Value> {
    rows.iter()
        .filter_map(|r| {
            r.error()
                .map(|e| json!({ "scenario_id": r.scenario_id(), "error": e.to_string() }))
        })
        .collect()
}

/// Sidecar document: tool, version, output precision, the resolved
/// configuration and the failed rows. Contains nothing run-dependent, so
/// identical runs give identical files.
pub fn sidecar(configs: Value, precision: usize, rows: &[SweepRow]) -> Value {
    json!({
        "tool": TOOL,
        "version": VERSION,
        "schema_version": SCHEMA_VERSION,
        "precision": precision,
        "config": configs,
        "rows": rows.len(),
        "row_errors": row_errors(rows),
    })
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "schema_version": 1,
        "protocol": {"state": "coherent", "V_S": 1, "V_M": "inf", "dV": 0, "N": 0,
                     "beta": 1, "direction": "rr"},
        "channel": {"eta": 0.5, "eps": 0}
    }"#;

    #[test]
    fn defaults_are_filled_and_infinity_resolved() {
        let cfg = RunConfig::parse(MINIMAL).unwrap();
        assert_eq!(cfg.method, Method::Cloner);
        assert_eq!(cfg.objective, Objective::KeyRate);
        assert_eq!(cfg.protocol.v_m, Modulation::Finite(LARGE_MODULATION));
        assert_eq!(RunConfig::from_spec(&cfg.spec()), cfg);
    }

    #[test]
    fn unknown_keys_name_the_key_and_line() {
        let text = MINIMAL.replace("\"channel\"", "\"chanel\"");
        let err = RunConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("chanel") && err.contains("line 5"), "{err}");
    }

    #[test]
    fn wrong_schema_version_is_rejected() {
        let text = MINIMAL.replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert!(RunConfig::parse(&text).unwrap_err().is::<UsageError>());
    }
}
