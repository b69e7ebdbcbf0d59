//! High-SNR slope of a BER curve.

use crate::error::{Error, Result};
use crate::harness::BerCurve;

/// Negated least-squares slope of `log₁₀ BER` against `SNR_dB / 10`, over
/// the points inside `[lo_db, hi_db]` with at least one error.
pub fn estimate_diversity_slope(curve: &BerCurve, window_db: (f64, f64)) -> Result<f64> {
    let pts: Vec<(f64, f64)> = curve
        .points
        .iter()
        .filter(|p| p.snr_db >= window_db.0 && p.snr_db <= window_db.1 && p.errors > 0)
        .map(|p| (p.snr_db / 10.0, p.ber.log10()))
        .collect();
    slope_of(&pts).map(|s| -s).ok_or_else(|| {
        Error::InsufficientData(format!(
            "{}: {} usable points in [{}, {}] dB, need 2",
            curve.detector,
            pts.len(),
            window_db.0,
            window_db.1
        ))
    })
}

fn slope_of(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
