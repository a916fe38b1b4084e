//! CSV and JSON rendering of sweep rows.
//!
//! Numbers are printed with a fixed number of significant digits in the
//! shortest of plain or exponent notation (like C's `%g`), non-finite values
//! as `inf`, `-inf` or `NaN`. Parsing a printed value and printing it again
//! gives the same text. Failed rows keep their parameters and leave the
//! result columns empty.

use std::io::Write;

use anyhow::Result;
use cvqkd_core::analysis::{db_to_km, eta_to_db, FrontierRow, KeyRateRow, SweepRow};
use cvqkd_core::protocols::{Modulation, ProtocolParams};
use serde_json::{json, Value};

pub const DEFAULT_PRECISION: usize = 9;

pub const KEY_RATE_COLUMNS: [&str; 18] = [
    "scenario_id",
    "direction",
    "state",
    "V_S",
    "V_M",
    "dV",
    "N",
    "beta",
    "eta",
    "loss_dB",
    "distance_km",
    "eps",
    "method",
    "I_AB_bits",
    "chi_bits",
    "K_bits",
    "converged",
    "warnings",
];

pub const FRONTIER_COLUMNS: [&str; 10] = [
    "scenario_id",
    "eta",
    "loss_dB",
    "distance_km",
    "eps_max",
    "V_M_opt",
    "dV_opt",
    "N_opt",
    "direction",
    "state",
];

/// `x` with `digits` significant digits.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Formats table cells at one precision.
#[derive(Debug, Clone, Copy)]
pub struct Cells {
    pub precision: usize,
}

impl Cells {
    fn num(&self, x: f64) -> String {
        fmt_sig(x, self.precision)
    }

    fn modulation(&self, v: Modulation) -> String {
        match v {
            Modulation::Finite(v) => self.num(v),
            Modulation::Infinite => "inf".to_string(),
        }
    }

    fn loss(&self, eta: f64) -> [String; 3] {
        let db = eta_to_db(eta).ok();
        let km = db.and_then(|d| db_to_km(d).ok());
        let opt = |x: Option<f64>| x.map_or(String::new(), |x| self.num(x));
        [self.num(eta), opt(db), opt(km)]
    }

    pub fn key_rate(&self, row: &KeyRateRow) -> Vec<String> {
        let p = &row.protocol;
        let mut cells = vec![
            row.scenario_id.clone(),
            p.direction.to_string(),
            p.state.to_string(),
            self.num(p.v_s),
            self.modulation(p.v_m),
            self.num(p.delta_v),
            self.num(p.n),
            self.num(p.beta),
        ];
        cells.extend(self.loss(row.channel.eta));
        cells.push(self.num(row.channel.eps));
        match &row.result {
            Ok(r) => cells.extend([
                r.method.to_string(),
                self.num(r.i_ab),
                self.num(r.chi),
                self.num(r.k),
                r.diagnostics.converged.to_string(),
                warnings(r),
            ]),
            Err(e) => cells.extend([
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                format!("error: {e}"),
            ]),
        }
        cells
    }

    pub fn frontier(&self, row: &FrontierRow) -> Vec<String> {
        let mut cells = vec![row.scenario_id.clone()];
        cells.extend(self.loss(row.eta));
        match &row.result {
            Ok(f) => cells.extend([
                self.num(f.eps_max),
                self.modulation(f.protocol.v_m),
                self.num(f.protocol.delta_v),
                self.num(f.protocol.n),
            ]),
            Err(_) => cells.extend([String::new(), String::new(), String::new(), String::new()]),
        }
        cells.extend([
            row.protocol.direction.to_string(),
            row.protocol.state.to_string(),
        ]);
        cells
    }

    /// One key-rate result as a JSON object; non-finite numbers become null.
    pub fn key_rate_json(&self, row: &KeyRateRow) -> Value {
        let p: &ProtocolParams = &row.protocol;
        let num = |x: f64| if x.is_finite() { json!(x) } else { Value::Null };
        let mut v = json!({
            "scenario_id": row.scenario_id,
            "direction": p.direction,
            "state": p.state,
            "V_S": p.v_s,
            "V_M": p.v_m,
            "dV": p.delta_v,
            "N": p.n,
            "beta": p.beta,
            "eta": row.channel.eta,
            "loss_dB": eta_to_db(row.channel.eta).ok(),
            "distance_km": eta_to_db(row.channel.eta).and_then(db_to_km).ok(),
            "eps": row.channel.eps,
        });
        let extra = match &row.result {
            Ok(r) => json!({
                "method": r.method,
                "I_AB_bits": num(r.i_ab),
                "chi_bits": num(r.chi),
                "K_bits": num(r.k),
                "converged": r.diagnostics.converged,
                "diagnostics": r.diagnostics,
            }),
            Err(e) => json!({ "error": e.to_string() }),
        };
        if let (Value::Object(a), Value::Object(b)) = (&mut v, extra) {
            a.extend(b);
        }
        v
    }
}

/// Semicolon-separated notes on a successful evaluation.
fn warnings(r: &cvqkd_core::protocols::KeyRateReport) -> String {
    let d = &r.diagnostics;
    let mut notes = Vec::new();
    if d.clamp_warnings > 0 {
        notes.push(format!(
            "{} clamped symplectic eigenvalues",
            d.clamp_warnings
        ));
    }
    if !d.converged {
        notes.push(format!("ancilla coupling bias {:e} bits", d.t_bias));
    }
    notes.join("; ")
}

/// Write rows of one kind as CSV with a header. Mixed row kinds are a bug in
/// the caller.
pub fn write_csv<W: Write>(out: W, rows: &[SweepRow], cells: Cells) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let frontier = matches!(rows.first(), Some(SweepRow::Frontier(_)));
    if frontier {
        w.write_record(FRONTIER_COLUMNS)?;
    } else {
        w.write_record(KEY_RATE_COLUMNS)?;
    }
    for row in rows {
        let record = match row {
            SweepRow::KeyRate(r) => cells.key_rate(r),
            SweepRow::Frontier(r) => cells.frontier(r),
        };
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Header for an empty table of the given kind.
pub fn write_header<W: Write>(out: W, frontier: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if frontier {
        w.write_record(FRONTIER_COLUMNS)?;
    } else {
        w.write_record(KEY_RATE_COLUMNS)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.5, 9), "0.5");
        assert_eq!(fmt_sig(1.0 / 3.0, 9), "0.333333333");
        assert_eq!(fmt_sig(1e6, 9), "1000000");
        assert_eq!(fmt_sig(1e9, 9), "1e9");
        assert_eq!(fmt_sig(-2.5e-7, 9), "-2.5e-7");
        assert_eq!(fmt_sig(9.9999999996, 9), "10");
        assert_eq!(fmt_sig(123.456, 4), "123.5");
        assert_eq!(fmt_sig(f64::INFINITY, 9), "inf");
        assert_eq!(fmt_sig(-0.0, 9), "0");
    }

    #[test]
    fn printing_is_stable_under_parsing() {
        let mut x = 0.123_456_789_123_f64;
        for _ in 0..200 {
            for digits in [3, 9, 17] {
                let s = fmt_sig(x, digits);
                let back: f64 = s.parse().unwrap();
                assert_eq!(fmt_sig(back, digits), s);
            }
            x *= -3.7;
        }
        assert_eq!(fmt_sig(0.1, 17).parse::<f64>().unwrap(), 0.1);
    }
}
