//! Channel loss expressed as transmittance, dB or standard-fiber distance.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Attenuation of standard telecom fiber.
pub const FIBER_LOSS_DB_PER_KM: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LossUnit {
    #[serde(rename = "eta")]
    Transmittance,
    #[serde(rename = "dB")]
    Decibel,
    #[serde(rename = "km")]
    Kilometer,
}

/// `dB = -10 log10(eta)`.
pub fn eta_to_db(eta: f64) -> Result<f64> {
    check(eta, LossUnit::Transmittance)?;
    Ok(-10.0 * eta.log10())
}

/// Inverse of [`eta_to_db`].
pub fn db_to_eta(db: f64) -> Result<f64> {
    check(db, LossUnit::Decibel)?;
    Ok(10f64.powf(-db / 10.0))
}

/// Fiber length with the given loss.
pub fn db_to_km(db: f64) -> Result<f64> {
    check(db, LossUnit::Decibel)?;
    Ok(db / FIBER_LOSS_DB_PER_KM)
}

pub fn km_to_db(km: f64) -> Result<f64> {
    check(km, LossUnit::Kilometer)?;
    Ok(km * FIBER_LOSS_DB_PER_KM)
}

/// Convert a loss between any two units.
pub fn convert(value: f64, from: LossUnit, to: LossUnit) -> Result<f64> {
    let db = match from {
        LossUnit::Transmittance => eta_to_db(value)?,
        LossUnit::Decibel => {
            check(value, from)?;
            value
        }
        LossUnit::Kilometer => km_to_db(value)?,
    };
    match to {
        LossUnit::Transmittance => db_to_eta(db),
        LossUnit::Decibel => Ok(db),
        LossUnit::Kilometer => db_to_km(db),
    }
}

fn check(value: f64, unit: LossUnit) -> Result<()> {
    let ok = match unit {
        LossUnit::Transmittance => value > 0.0 && value <= 1.0,
        LossUnit::Decibel | LossUnit::Kilometer => value >= 0.0 && value.is_finite(),
    };
    if ok {
        Ok(())
    } else {
        let range = match unit {
            LossUnit::Transmittance => "(0, 1]",
            _ => "[0, inf)",
        };
        Err(Error::Domain(format!(
            "{unit} must lie in {range}, got {value}"
        )))
    }
}

impl fmt::Display for LossUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LossUnit::Transmittance => "eta",
            LossUnit::Decibel => "dB",
            LossUnit::Kilometer => "km",
        })
    }
}

impl FromStr for LossUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eta" => Ok(LossUnit::Transmittance),
            "dB" | "db" => Ok(LossUnit::Decibel),
            "km" => Ok(LossUnit::Kilometer),
            _ => Err(Error::Domain(format!(
                "unknown loss unit {s:?} (expected eta, dB or km)"
            ))),
        }
    }
}
