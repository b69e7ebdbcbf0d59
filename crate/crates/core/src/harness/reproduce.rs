//! Table recomputation and figure sweep presets.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::{DelayMode, SweepConfig, SINGLE_USER};
use super::curve::BerCurve;
use super::sweep::{run_sweep, SweepResult};
use crate::analysis::{optimal_delays, optimal_tau_two_users, trace_r_inverse_formula};
use crate::error::{Error, Result};
use crate::model::DelayProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableId {
    /// Two-user optimal delay against frame length.
    OptimalTwoUser,
    /// Optimal delay vectors for `K ∈ {4, 6, 8}`, `N = 128`.
    OptimalMultiUser,
    /// `trace(R⁻¹)` of five four-user delay sets.
    TraceComparison,
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table1" => Ok(Self::OptimalTwoUser),
            "table2" => Ok(Self::OptimalMultiUser),
            "table3" => Ok(Self::TraceComparison),
            other => Err(Error::Config(format!("unknown table `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub label: String,
    pub computed: Vec<f64>,
    pub reference: Vec<f64>,
    pub tolerance: f64,
    /// Tolerance is relative to the reference value.
    pub relative: bool,
    pub passed: bool,
}

impl TableRow {
    fn new(label: String, computed: Vec<f64>, reference: Vec<f64>, tolerance: f64, relative: bool) -> Self {
        let passed = computed.len() == reference.len()
            && computed.iter().zip(&reference).all(|(c, r)| {
                let err = (c - r).abs();
                if relative {
                    err <= tolerance * r.abs()
                } else {
                    err <= tolerance
                }
            });
        Self {
            label,
            computed,
            reference,
            tolerance,
            relative,
            passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub table: String,
    pub rows: Vec<TableRow>,
}

impl TableReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }
}

impl fmt::Display for TableReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.table)?;
        for r in &self.rows {
            let show = |v: &[f64]| v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(", ");
            writeln!(
                f,
                "  {:<28} computed [{}]  reference [{}]  {}",
                r.label,
                show(&r.computed),
                show(&r.reference),
                if r.passed { "ok" } else { "MISMATCH" }
            )?;
        }
        Ok(())
    }
}

/// Four-user delay sets compared by their `trace(R⁻¹)` at `N = 128`, with
/// reference values.
pub const TRACE_SETS: [([f64; 3], f64); 5] = [
    ([0.2505, 0.5010, 0.7514], 8.8404e4),
    ([0.4, 0.6, 0.8], 9.6639e4),
    ([0.1, 0.4, 0.7], 1.1065e5),
    ([0.1, 0.2, 0.9], 1.7347e5),
    ([0.01, 0.1, 0.9], 6.7784e5),
];

pub fn trace_set_profile(set: &[f64; 3]) -> DelayProfile {
    DelayProfile::new(vec![0.0, set[0], set[1], set[2]]).expect("reference delay sets are valid")
}

pub fn reproduce_table(id: TableId) -> Result<TableReport> {
    let rows = match id {
        TableId::OptimalTwoUser => {
            let mut rows: Vec<TableRow> = [(10, 0.5240), (32, 0.5077), (64, 0.5039), (128, 0.5019)]
                .into_iter()
                .map(|(n, want)| {
                    TableRow::new(format!("K=2 N={n}"), vec![optimal_tau_two_users(n)], vec![want], 5e-4, false)
                })
                .collect();
            rows.push(TableRow::new(
                "K=2 N=1e6 (limit)".into(),
                vec![optimal_tau_two_users(1_000_000)],
                vec![0.5],
                1e-3,
                false,
            ));
            rows
        }
        TableId::OptimalMultiUser => {
            let reference: [&[f64]; 3] = [
                &[0.2505, 0.5010, 0.7514],
                &[0.1669, 0.3338, 0.5006, 0.6675, 0.8344],
                &[0.1251, 0.2502, 0.3754, 0.5004, 0.6256, 0.7507, 0.8758],
            ];
            [4usize, 6, 8]
                .into_iter()
                .zip(reference)
                .map(|(k, want)| {
                    let opt = optimal_delays(k, 128)?;
                    Ok(TableRow::new(
                        format!("K={k} N=128"),
                        opt.profile.taus()[1..].to_vec(),
                        want.to_vec(),
                        1e-3,
                        false,
                    ))
                })
                .collect::<Result<_>>()?
        }
        TableId::TraceComparison => TRACE_SETS
            .iter()
            .map(|(set, want)| {
                let t = trace_r_inverse_formula(&trace_set_profile(set), 128)?;
                Ok(TableRow::new(format!("{set:?}"), vec![t], vec![*want], 5e-4, true))
            })
            .collect::<Result<_>>()?,
    };
    let table = match id {
        TableId::OptimalTwoUser => "table1: optimal two-user delay",
        TableId::OptimalMultiUser => "table2: optimal delays, N=128",
        TableId::TraceComparison => "table3: trace(R^-1), K=4, N=128",
    };
    Ok(TableReport {
        table: table.into(),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    /// Async MLSD against sync ML and the single-user bound, `K = 2`.
    Fig3,
    /// SIC and belief-propagation variants, `K = 2`.
    Fig4,
    /// Async ZF across six four-user delay sets, `M = 1`.
    Fig5,
    /// Every detector, `K = 2`.
    Fig6,
    /// Async against sync ZF at `K = M = 2` and `K = M = 4`.
    FigZf,
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig3" => Ok(Self::Fig3),
            "fig4" => Ok(Self::Fig4),
            "fig5" => Ok(Self::Fig5),
            "fig6" => Ok(Self::Fig6),
            "fig-zf" => Ok(Self::FigZf),
            other => Err(Error::Config(format!("unknown figure `{other}`"))),
        }
    }
}

/// One sweep of a figure; `label` prefixes its curve names.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub label: String,
    pub config: SweepConfig,
}

fn base(users: usize, antennas: usize, detectors: &[&str], snr_db: Vec<f64>) -> SweepConfig {
    SweepConfig {
        seed: 2024,
        users,
        frame_len: 128,
        antennas,
        idle_tail: true,
        delays: DelayMode::Uniform,
        snr_db,
        detectors: detectors.iter().map(|s| s.to_string()).collect(),
        frames_per_point: 10_000,
        stop_errors: Some(200),
    }
}

fn grid(start: f64, step: f64, stop: f64) -> Vec<f64> {
    let n = ((stop - start) / step).round() as usize;
    (0..=n).map(|i| start + step * i as f64).collect()
}

pub fn figure_preset(id: FigureId) -> Vec<Panel> {
    let panel = |label: &str, config| Panel {
        label: label.into(),
        config,
    };
    match id {
        FigureId::Fig3 => vec![panel(
            "",
            base(2, 1, &["mlsd", "sync-ml", SINGLE_USER], grid(0.0, 2.5, 25.0)),
        )],
        FigureId::Fig4 => vec![panel(
            "",
            base(2, 1, &["sic-fw", "sic-bw", "bp-fw", "bp-bw", "fb-bp"], grid(0.0, 2.5, 25.0)),
        )],
        FigureId::Fig5 => {
            let mut panels: Vec<Panel> = TRACE_SETS
                .iter()
                .map(|(set, _)| {
                    let mut cfg = base(4, 1, &["zf"], grid(0.0, 5.0, 30.0));
                    cfg.delays = DelayMode::Explicit(trace_set_profile(set));
                    panel(&format!("{set:?}"), cfg)
                })
                .collect();
            let mut cfg = base(4, 1, &["zf"], grid(0.0, 5.0, 30.0));
            cfg.delays = DelayMode::Random;
            panels.push(panel("random", cfg));
            panels
        }
        FigureId::Fig6 => vec![panel(
            "",
            base(
                2,
                1,
                &["mlsd", "sic-fw", "sic-bw", "bp-fw", "bp-bw", "fb-bp", "zf", "sync-ml", SINGLE_USER],
                grid(0.0, 2.5, 25.0),
            ),
        )],
        FigureId::FigZf => vec![
            panel("K=2 M=2", base(2, 2, &["zf", "sync-zf"], grid(0.0, 2.5, 25.0))),
            panel("K=4 M=4", base(4, 4, &["zf", "sync-zf"], grid(0.0, 2.5, 25.0))),
        ],
    }
}

/// Runs every panel of a figure; curve names become `label/detector`.
pub fn reproduce_figure(panels: &[Panel], threads: Option<usize>) -> Result<Vec<BerCurve>> {
    let mut curves = Vec::new();
    for p in panels {
        let SweepResult { curves: cs, .. } = run_sweep(&p.config, threads)?;
        for mut c in cs {
            if !p.label.is_empty() {
                c.detector = format!("{}/{}", p.label.replace(", ", " "), c.detector);
            }
            curves.push(c);
        }
    }
    Ok(curves)
}
