//! Synchronous-sampling baselines: per-slot exhaustive ML and ZF.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::mlsd::{hypothesis, MAX_TRELLIS_STATES};
use super::{check_blocks, DetectionResult};
use crate::error::{Error, Result};
use crate::model::{ChannelRealization, SampleBlock, SamplingMethod, SymbolFrame};

fn frame_len(samples: &[SampleBlock], h: &ChannelRealization) -> Result<usize> {
    let n = samples
        .first()
        .ok_or_else(|| Error::Dimension("no sample blocks".into()))?
        .y
        .len();
    check_blocks(samples, h, SamplingMethod::Sync, n)?;
    if n == 0 {
        return Err(Error::Dimension("empty synchronous block".into()));
    }
    Ok(n)
}

/// Per slot, the hypothesis minimising `Σ_m |y_m(j) - Σ_k h_{k,m} b_k|²`;
/// ties go to the lowest hypothesis index.
pub fn sync_ml(samples: &[SampleBlock], h: &ChannelRealization) -> Result<DetectionResult> {
    let n = frame_len(samples, h)?;
    let k = h.users();
    let hyps = 1usize
        .checked_shl(k as u32)
        .filter(|&s| s <= MAX_TRELLIS_STATES)
        .ok_or(Error::StateSpace {
            states: 2usize.saturating_pow(k as u32),
            cap: MAX_TRELLIS_STATES,
        })?;
    let means: Vec<Vec<Complex64>> = (0..hyps)
        .map(|idx| {
            let b = hypothesis(idx, k);
            (0..h.antennas())
                .map(|m| (0..k).map(|u| h.gain(u, m) * f64::from(b[u])).sum())
                .collect()
        })
        .collect();
    let mut symbols = Vec::with_capacity(n * k);
    let mut total = 0.0;
    for j in 0..n {
        let mut best = (f64::INFINITY, 0);
        for (idx, mean) in means.iter().enumerate() {
            let d: f64 = samples.iter().zip(mean).map(|(s, mu)| (s.y[j] - mu).norm_sqr()).sum();
            if d < best.0 {
                best = (d, idx);
            }
        }
        total += best.0;
        symbols.extend(hypothesis(best.1, k));
    }
    Ok(DetectionResult {
        detector: "sync-ml".into(),
        decisions: SymbolFrame::new(n, k, symbols, false)?,
        soft: None,
        metric: Some(total),
    })
}

pub(crate) fn check_sync_zf(users: usize, antennas: usize) -> Result<()> {
    if antennas < users {
        return Err(Error::Unsupported(format!(
            "synchronous ZF separates K={users} users with M={antennas} antennas; needs M >= K"
        )));
    }
    Ok(())
}

/// Per slot, `(AᴴA)⁻¹Aᴴ y(j)` with `A[m][k] = h_{k,m}`, thresholded on the
/// real part (ties to `+1`).
pub fn sync_zf(samples: &[SampleBlock], h: &ChannelRealization) -> Result<DetectionResult> {
    let n = frame_len(samples, h)?;
    let k = h.users();
    let m = h.antennas();
    check_sync_zf(k, m)?;
    let a = DMatrix::from_fn(m, k, |r, c| h.gain(c, r));
    let ah = a.adjoint();
    let chol = (&ah * &a).cholesky().ok_or(Error::Singular)?;
    let mut symbols = Vec::with_capacity(n * k);
    let mut soft = Vec::with_capacity(n * k);
    for j in 0..n {
        let y = DVector::from_iterator(m, samples.iter().map(|s| s.y[j]));
        let x = chol.solve(&(&ah * y));
        for v in x.iter() {
            soft.push(v.re);
            symbols.push(if v.re >= 0.0 { 1 } else { -1 });
        }
    }
    Ok(DetectionResult {
        detector: "sync-zf".into(),
        decisions: SymbolFrame::new(n, k, symbols, false)?,
        soft: Some(soft),
        metric: None,
    })
}
