//! Quick self-check of the identities and reference values the library
//! relies on. Backs the `validate` CLI command.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::reproduce::{reproduce_table, TableId};
use crate::analysis::{ber_closed_form_from_diag, fiedler_inverse_r11, trace_r_inverse_dense, trace_r_inverse_formula};
use crate::detectors::{detector_by_name, mlsd_viterbi, sequence_metric, DetectorInput, DETECTOR_NAMES};
use crate::error::Result;
use crate::model::{
    build_block_r, build_block_u, build_r_blocks, generate_channel, noise_covariance_diag, simulate_received_async,
    simulate_received_sync, DelayProfile, MatrixSet, SymbolFrame,
};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {:<28} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        Ok(())
    }
}

fn check(name: &str, worst: f64, tol: f64) -> Check {
    Check {
        name: name.into(),
        passed: worst <= tol,
        detail: format!("worst {worst:.3e} (tolerance {tol:.0e})"),
    }
}

fn gram(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..20 {
        let d = DelayProfile::random(rng, 1 + i % 6);
        let n = 1 + i % 9;
        let u = build_block_u(&d, n)?;
        let w: Vec<f64> = noise_covariance_diag(&d, n).iter().map(|s| 1.0 / s).collect();
        let mut scaled = u.clone();
        for (r, wr) in w.iter().enumerate() {
            scaled.row_mut(r).scale_mut(*wr);
        }
        let diff = u.transpose() * scaled - build_block_r(&d, n)?;
        worst = worst.max(diff.abs().max());
    }
    Ok(worst)
}

fn lemma2(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..30 {
        let d = DelayProfile::random(rng, 2 + i % 5);
        let n = 1 + i % 17;
        let f = trace_r_inverse_formula(&d, n)?;
        worst = worst.max((f - trace_r_inverse_dense(&d, n)?).abs() / f);
    }
    Ok(worst)
}

fn fiedler(rng: &mut ChaCha8Rng) -> f64 {
    (2..=8)
        .map(|k| {
            let d = DelayProfile::random(rng, k);
            let prod = fiedler_inverse_r11(&d) * build_r_blocks(&d).r11;
            (prod - nalgebra::DMatrix::identity(k, k)).abs().max()
        })
        .fold(0.0, f64::max)
}

fn rayleigh_formula() -> Result<f64> {
    let mut worst = 0.0f64;
    for e in -10..=20 {
        let d = 10f64.powf(f64::from(e) / 10.0);
        let want = 0.5 * (1.0 - (d / (1.0 + d)).sqrt());
        worst = worst.max((ber_closed_form_from_diag(1.0, 1, d)? - want).abs());
    }
    Ok(worst)
}

/// MLSD against exhaustive search; returns the number of disagreements.
fn mlsd_exhaustive(rng: &mut ChaCha8Rng) -> Result<usize> {
    let mut bad = 0;
    for _ in 0..60 {
        let d = DelayProfile::random(rng, 2);
        let mats = MatrixSet::new(&d, 2)?;
        let h = generate_channel(rng, 2, 1);
        let b = SymbolFrame::random(rng, 2, 2, false);
        let y = simulate_received_async(&mats, &h, &b, 0.3, rng)?;
        let out = mlsd_viterbi(&y, &h, &d, 0.3, false)?;
        let mut best = (f64::INFINITY, 0usize);
        for idx in 0..16usize {
            let s: Vec<i8> = (0..4).map(|i| if (idx >> i) & 1 == 1 { -1 } else { 1 }).collect();
            let m = sequence_metric(&y, &h, &d, 0.3, &SymbolFrame::new(2, 2, s, false)?)?;
            if m < best.0 {
                best = (m, idx);
            }
        }
        let s: Vec<i8> = (0..4).map(|i| if (best.1 >> i) & 1 == 1 { -1 } else { 1 }).collect();
        if out.decisions.as_slice() != s.as_slice() {
            bad += 1;
        }
    }
    Ok(bad)
}

/// Every detector on noiseless samples; returns the names that failed.
fn noiseless(rng: &mut ChaCha8Rng) -> Result<Vec<String>> {
    let d = DelayProfile::new(vec![0.0, 0.4])?;
    let mats = MatrixSet::new(&d, 12)?;
    let h = generate_channel(rng, 2, 2);
    let b = SymbolFrame::random(rng, 12, 2, true);
    let ya = simulate_received_async(&mats, &h, &b, 0.0, rng)?;
    let ys = simulate_received_sync(&h, &b, 0.0, rng)?;
    let input = DetectorInput {
        async_samples: &ya,
        sync_samples: &ys,
        channel: &h,
        matrices: &mats,
        noise_variance: 0.01,
        idle_tail: true,
    };
    let mut failed = Vec::new();
    for name in DETECTOR_NAMES {
        let out = detector_by_name(name)?.detect(&input)?;
        if b.bit_errors(&out.decisions) != 0 {
            failed.push(name.to_string());
        }
    }
    Ok(failed)
}

pub fn run_validation() -> Result<ValidationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut checks = vec![
        check("gram identity", gram(&mut rng)?, 1e-10),
        check("trace closed form", lemma2(&mut rng)?, 1e-8),
        check("fiedler inverse", fiedler(&mut rng), 1e-10),
        check("rayleigh bpsk formula", rayleigh_formula()?, 1e-10),
    ];
    let bad = mlsd_exhaustive(&mut rng)?;
    checks.push(Check {
        name: "mlsd vs exhaustive".into(),
        passed: bad == 0,
        detail: format!("{bad} of 60 instances disagree"),
    });
    let failed = noiseless(&mut rng)?;
    checks.push(Check {
        name: "noiseless detection".into(),
        passed: failed.is_empty(),
        detail: if failed.is_empty() {
            "all detectors exact".into()
        } else {
            format!("failed: {}", failed.join(", "))
        },
    });
    for id in [TableId::OptimalTwoUser, TableId::OptimalMultiUser, TableId::TraceComparison] {
        let report = reproduce_table(id)?;
        let worst = report
            .rows
            .iter()
            .flat_map(|r| r.computed.iter().zip(&r.reference).map(|(c, w)| (c - w).abs()))
            .fold(0.0, f64::max);
        checks.push(Check {
            name: report.table.split(':').next().unwrap_or("table").to_string(),
            passed: report.passed(),
            detail: format!("worst abs deviation {worst:.3e}"),
        });
    }
    Ok(ValidationReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_passes() {
        let report = run_validation().unwrap();
        assert!(report.passed(), "{report}");
    }
}
