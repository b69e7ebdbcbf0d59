//! BER curves with Wilson confidence intervals.

use serde::{Deserialize, Serialize};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `errors` successes out of `trials`.
pub fn wilson_interval(errors: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if errors >= trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerPoint {
    pub snr_db: f64,
    pub frames: u64,
    /// Data bits counted (idle slots excluded).
    pub bits: u64,
    pub errors: u64,
    pub ber: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl BerPoint {
    pub fn from_counts(snr_db: f64, frames: u64, bits: u64, errors: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(errors, bits, Z_95);
        Self {
            snr_db,
            frames,
            bits,
            errors,
            ber: if bits == 0 { 0.0 } else { errors as f64 / bits as f64 },
            ci_low,
            ci_high,
        }
    }

    /// Whether the two 95% intervals are disjoint with `self` below `other`.
    pub fn separated_below(&self, other: &BerPoint) -> bool {
        self.ci_high < other.ci_low
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerCurve {
    pub detector: String,
    pub points: Vec<BerPoint>,
    /// Why the detector produced no (or a partial) curve.
    pub error: Option<String>,
}

impl BerCurve {
    pub fn point_at(&self, snr_db: f64) -> Option<&BerPoint> {
        self.points.iter().find(|p| (p.snr_db - snr_db).abs() < 1e-9)
    }
}
