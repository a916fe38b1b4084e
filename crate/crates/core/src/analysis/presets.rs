//! Sweeps behind the published figure datasets.
//!
//! Each figure is split into panels and each panel into series; a series is
//! an ordinary [`SweepSpec`] whose label identifies it in the scenario ids
//! of its rows. Settings not stated for a figure are documented on the
//! corresponding builder.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::optimize::Nuisance;
use super::sweep::{
    run_sweep_with, Axis, ExecutionMode, Objective, Parameter, SweepRow, SweepSpec,
};
use crate::error::{Error, Result};
use crate::protocols::{ChannelParams, Direction, ProtocolParams, LARGE_MODULATION};

/// Reconciliation efficiency for imperfect reverse reconciliation.
pub const BETA_RR: f64 = 0.95;
/// Reconciliation efficiency for imperfect direct reconciliation.
pub const BETA_DR: f64 = 0.99;
/// Signal variance of the finitely squeezed protocol.
pub const FINITE_SQUEEZING: f64 = 0.1;
/// Signal variance standing in for infinite squeezing.
pub const STRONG_SQUEEZING: f64 = 1e-5;
/// Channel noise assumed for the key-rate-versus-distance figure, which does
/// not state one.
pub const DISTANCE_FIGURE_EPS: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
}

impl Figure {
    pub const ALL: [Figure; 6] = [
        Figure::Fig3,
        Figure::Fig4,
        Figure::Fig5,
        Figure::Fig6,
        Figure::Fig7,
        Figure::Fig8,
    ];
}

/// One plot: its series are concatenated into a single table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Panel {
    /// File stem, e.g. `fig6a`.
    pub name: String,
    pub description: String,
    pub series: Vec<SweepSpec>,
}

impl Panel {
    fn new(name: &str, description: &str, series: Vec<SweepSpec>) -> Self {
        Self {
            name: name.to_string(),
            description: description.to_string(),
            series,
        }
    }

    pub fn objective(&self) -> Objective {
        self.series
            .first()
            .map_or(Objective::KeyRate, |s| s.objective)
    }

    /// Evaluate every series, in order.
    pub fn run(&self, mode: ExecutionMode) -> Result<Vec<SweepRow>> {
        let mut rows = Vec::new();
        for s in &self.series {
            rows.extend(run_sweep_with(s, mode)?);
        }
        Ok(rows)
    }
}

pub fn figure_panels(figure: Figure) -> Result<Vec<Panel>> {
    match figure {
        Figure::Fig3 => fig3(),
        Figure::Fig4 => fig4(),
        Figure::Fig5 => fig5(),
        Figure::Fig6 => fig6(),
        Figure::Fig7 => fig7(),
        Figure::Fig8 => fig8(),
    }
}

fn protocol(v_s: f64, direction: Direction) -> ProtocolParams {
    if v_s == 1.0 {
        ProtocolParams::coherent(direction)
    } else {
        ProtocolParams::squeezed(v_s, direction)
    }
    .with_modulation(LARGE_MODULATION)
}

fn state_label(v_s: f64) -> String {
    if v_s == 1.0 {
        "coherent".to_string()
    } else {
        format!("squeezed_VS{v_s}")
    }
}

fn series(label: String, p: ProtocolParams, eta: f64, eps: f64) -> Result<SweepSpec> {
    Ok(SweepSpec::new(label, p, ChannelParams::new(eta, eps)?))
}

/// Imperfect reconciliation efficiency for the direction.
fn realistic_beta(direction: Direction) -> f64 {
    match direction {
        Direction::Direct => BETA_DR,
        Direction::Reverse => BETA_RR,
    }
}

/// Loss grid of the frontier figures: direct reconciliation fails at 3 dB,
/// reverse reconciliation extends much further.
fn loss_axis(direction: Direction) -> Result<Axis> {
    match direction {
        Direction::Direct => Axis::range(Parameter::LossDb, 0.1, 4.0, 0.1),
        Direction::Reverse => Axis::range(Parameter::LossDb, 0.5, 30.0, 0.5),
    }
}

/// Key rate against fiber distance with imperfect reconciliation, coherent
/// and `V_S = 0.1` states, optimized modulation and channel noise
/// [`DISTANCE_FIGURE_EPS`]. Panel `a` is direct, `a_inset` reverse
/// reconciliation. The distance axes start one step from zero: a lossless
/// channel with excess noise has no entangling-cloner dilation.
fn fig3() -> Result<Vec<Panel>> {
    let mut panels = Vec::new();
    for (name, direction, km) in [
        (
            "fig3a",
            Direction::Direct,
            Axis::range(Parameter::DistanceKm, 0.25, 16.0, 0.25)?,
        ),
        (
            "fig3a_inset",
            Direction::Reverse,
            Axis::range(Parameter::DistanceKm, 2.5, 200.0, 2.5)?,
        ),
    ] {
        let mut s = Vec::new();
        for v_s in [1.0, FINITE_SQUEEZING] {
            let p = protocol(v_s, direction).with_beta(realistic_beta(direction));
            s.push(
                series(
                    format!("{direction}_{}", state_label(v_s)),
                    p,
                    1.0,
                    DISTANCE_FIGURE_EPS,
                )?
                .optimizing(&[Nuisance::Modulation])
                .with_axis(km.clone()),
            );
        }
        panels.push(Panel::new(
            name,
            &format!("key rate vs distance, {direction}, imperfect reconciliation, optimized V_M"),
            s,
        ));
    }
    Ok(panels)
}

/// Excess-noise frontiers. Panel `b`: `beta = 1`, infinite squeezing and
/// modulation. Panel `c`: imperfect reconciliation, `V_S = 0.1`, optimized
/// modulation.
fn fig4() -> Result<Vec<Panel>> {
    let mut ideal = Vec::new();
    let mut realistic = Vec::new();
    for direction in [Direction::Direct, Direction::Reverse] {
        for v_s in [1.0, STRONG_SQUEEZING] {
            ideal.push(
                series(
                    format!("{direction}_{}", state_label(v_s)),
                    protocol(v_s, direction),
                    0.5,
                    0.0,
                )?
                .with_objective(Objective::Frontier)
                .with_axis(loss_axis(direction)?),
            );
        }
        for v_s in [1.0, FINITE_SQUEEZING] {
            let p = protocol(v_s, direction).with_beta(realistic_beta(direction));
            realistic.push(
                series(format!("{direction}_{}", state_label(v_s)), p, 0.5, 0.0)?
                    .with_objective(Objective::Frontier)
                    .optimizing(&[Nuisance::Modulation])
                    .with_axis(loss_axis(direction)?),
            );
        }
    }
    Ok(vec![
        Panel::new(
            "fig4b",
            "frontier, ideal reconciliation and modulation",
            ideal,
        ),
        Panel::new(
            "fig4c",
            "frontier, imperfect reconciliation, optimized V_M",
            realistic,
        ),
    ])
}

/// Frontiers with fixed trusted noise, `beta = 1`, infinite squeezing and
/// modulation: reverse reconciliation with `dV` in {0, 0.5}, direct with `N`
/// in {0, 0.5}.
fn fig5() -> Result<Vec<Panel>> {
    let mut panels = Vec::new();
    for (name, direction, noise) in [
        ("fig5a", Direction::Reverse, Parameter::PreparationNoise),
        ("fig5b", Direction::Direct, Parameter::DetectionNoise),
    ] {
        let mut s = Vec::new();
        for amount in [0.0, 0.5] {
            for v_s in [1.0, STRONG_SQUEEZING] {
                let (mut p, mut c) = (protocol(v_s, direction), ChannelParams::new(0.5, 0.0)?);
                noise.apply(amount, &mut p, &mut c)?;
                s.push(
                    series(
                        format!("{direction}_{}_{noise}{amount}", state_label(v_s)),
                        p,
                        0.5,
                        0.0,
                    )?
                    .with_objective(Objective::Frontier)
                    .with_axis(loss_axis(direction)?),
                );
            }
        }
        panels.push(Panel::new(
            name,
            &format!("frontier with fixed trusted {noise}, {direction}"),
            s,
        ));
    }
    Ok(panels)
}

/// Key rate against trusted noise on the reference side, `beta = 1`,
/// infinite modulation. The noise axis spans 0 to 3 SNU.
fn noise_panels(
    prefix: &str,
    fixed: Option<(Parameter, f64)>,
    eps_a: &[f64],
    eps_b: &[f64],
    eps_c: &[f64],
) -> Result<Vec<Panel>> {
    let noise_axis = |p| Axis::range(p, 0.0, 3.0, 0.05);
    let fix = |mut p: ProtocolParams| -> Result<ProtocolParams> {
        if let Some((param, v)) = fixed {
            param.apply(v, &mut p, &mut ChannelParams::new(0.5, 0.0)?)?;
        }
        Ok(p)
    };
    let mut a = Vec::new();
    for v_s in [1.0, FINITE_SQUEEZING] {
        a.push(
            series(
                state_label(v_s),
                fix(protocol(v_s, Direction::Direct))?,
                0.6,
                0.0,
            )?
            .with_axis(Axis::new(Parameter::Eps, eps_a.to_vec()))
            .with_axis(noise_axis(Parameter::PreparationNoise)?),
        );
    }
    let b = vec![series(
        state_label(1.0),
        fix(protocol(1.0, Direction::Reverse))?,
        0.1,
        0.0,
    )?
    .with_axis(Axis::new(Parameter::Eps, eps_b.to_vec()))
    .with_axis(noise_axis(Parameter::DetectionNoise)?)];
    let c = vec![series(
        state_label(FINITE_SQUEEZING),
        fix(protocol(FINITE_SQUEEZING, Direction::Reverse))?,
        0.1,
        0.0,
    )?
    .with_axis(Axis::new(Parameter::Eps, eps_c.to_vec()))
    .with_axis(noise_axis(Parameter::DetectionNoise)?)];
    let extra = fixed.map_or(String::new(), |(p, v)| format!(", fixed {p} = {v}"));
    Ok(vec![
        Panel::new(
            &format!("{prefix}a"),
            &format!("DR key rate vs dV at eta = 0.6{extra}"),
            a,
        ),
        Panel::new(
            &format!("{prefix}b"),
            &format!("RR coherent key rate vs N at eta = 0.1{extra}"),
            b,
        ),
        Panel::new(
            &format!("{prefix}c"),
            &format!("RR squeezed key rate vs N at eta = 0.1{extra}"),
            c,
        ),
    ])
}

fn fig6() -> Result<Vec<Panel>> {
    noise_panels(
        "fig6",
        None,
        &[0.2, 0.15, 0.1],
        &[0.18, 0.15, 0.12],
        &[0.4, 0.3, 0.2],
    )
}

/// Frontiers without trusted noise and with the optimal reference-side
/// noise; `beta = 1`, infinite modulation, coherent and `V_S = 0.1`.
fn fig7() -> Result<Vec<Panel>> {
    let mut panels = Vec::new();
    for (name, direction, noise, loss) in [
        (
            "fig7a",
            Direction::Direct,
            Nuisance::PreparationNoise,
            Axis::range(Parameter::LossDb, 0.1, 3.0, 0.1)?,
        ),
        (
            "fig7b",
            Direction::Reverse,
            Nuisance::DetectionNoise,
            Axis::range(Parameter::LossDb, 0.5, 20.0, 0.5)?,
        ),
    ] {
        let mut s = Vec::new();
        for optimal in [false, true] {
            for v_s in [1.0, FINITE_SQUEEZING] {
                let tag = if optimal {
                    format!("optimal_{noise}")
                } else {
                    "no_noise".to_string()
                };
                let over: &[Nuisance] = if optimal { &[noise] } else { &[] };
                s.push(
                    series(
                        format!("{direction}_{}_{tag}", state_label(v_s)),
                        protocol(v_s, direction),
                        0.5,
                        0.0,
                    )?
                    .with_objective(Objective::Frontier)
                    .optimizing(over)
                    .with_axis(loss.clone()),
                );
            }
        }
        panels.push(Panel::new(
            name,
            &format!("frontier without and with optimal {noise}, {direction}"),
            s,
        ));
    }
    Ok(panels)
}

/// The key-rate-versus-noise panels with the other trusted noise present:
/// `N = 0.08` for direct, `dV = 0.1` for reverse reconciliation.
fn fig8() -> Result<Vec<Panel>> {
    let mut panels = noise_panels(
        "fig8",
        Some((Parameter::DetectionNoise, 0.08)),
        &[0.15, 0.1],
        &[],
        &[],
    )?;
    let reverse = noise_panels(
        "fig8",
        Some((Parameter::PreparationNoise, 0.1)),
        &[0.15],
        &[0.12, 0.06],
        &[0.25, 0.1],
    )?;
    panels.truncate(1);
    panels.extend(reverse.into_iter().skip(1));
    Ok(panels)
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = match self {
            Figure::Fig3 => 3,
            Figure::Fig4 => 4,
            Figure::Fig5 => 5,
            Figure::Fig6 => 6,
            Figure::Fig7 => 7,
            Figure::Fig8 => 8,
        };
        write!(f, "fig{n}")
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.to_string() == s)
            .ok_or_else(|| Error::Domain(format!("unknown figure {s:?} (expected fig3 .. fig8)")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_figure_builds_valid_sweeps() {
        for fig in Figure::ALL {
            let panels = figure_panels(fig).unwrap();
            assert!(!panels.is_empty());
            for panel in &panels {
                assert!(panel.name.starts_with(&fig.to_string()));
                for s in &panel.series {
                    s.validate().unwrap();
                    assert_eq!(s.objective, panel.objective());
                }
            }
        }
    }

    #[test]
    fn caption_settings() {
        let fig6 = figure_panels(Figure::Fig6).unwrap();
        assert_eq!(fig6[0].series[0].channel.eta, 0.6);
        assert_eq!(fig6[0].series[0].axes[0].values, vec![0.2, 0.15, 0.1]);
        assert_eq!(fig6[1].series[0].channel.eta, 0.1);
        assert_eq!(fig6[1].series[0].axes[0].values, vec![0.18, 0.15, 0.12]);
        let fig8 = figure_panels(Figure::Fig8).unwrap();
        assert_eq!(fig8.len(), 3);
        assert_eq!(fig8[0].series[0].protocol.n, 0.08);
        assert_eq!(fig8[1].series[0].protocol.delta_v, 0.1);
        assert_eq!(fig8[2].series[0].axes[0].values, vec![0.25, 0.1]);
    }

    #[test]
    fn names_round_trip() {
        for fig in Figure::ALL {
            assert_eq!(fig.to_string().parse::<Figure>().unwrap(), fig);
        }
        assert!("fig9".parse::<Figure>().is_err());
    }
}
