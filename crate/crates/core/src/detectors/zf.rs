//! Zero-forcing on the disjoint-interval samples.
//!
//! With noise covariance `σ² diag(ρ)` the weighted normal matrix is
//! `Σ_m H_mᴴ R H_m / σ²`, block tridiagonal with blocks `R11 ∘ C` on the
//! diagonal and `R21 ∘ C` below it, where `C[l][k] = Σ_m h_{l,m}^* h_{k,m}`.
//! The right-hand side `Σ_m H_mᴴ Uᵀ diag(ρ)⁻¹ y_m` reduces to partial sums
//! of samples because every nonzero of `U` in row `(j,l)` equals `ρ_l`.
//! `σ²` cancels from both sides.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{check_blocks, DetectionResult};
use crate::error::{Error, Result};
use crate::linalg::BlockTridiagonal;
use crate::model::{ChannelRealization, MatrixSet, SampleBlock, SamplingMethod, SymbolFrame};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZfSolver {
    /// Block-tridiagonal Cholesky, `O(N K³)`.
    #[default]
    Structured,
    /// Householder QR of the whitened stacked system. Reference path.
    DenseQr,
}

/// Equalised estimate `ỹ = b + ṽ` in frame order. Idle symbols are zero.
pub fn zf_estimate(
    samples: &[SampleBlock],
    h: &ChannelRealization,
    mats: &MatrixSet,
    idle_tail: bool,
    solver: ZfSolver,
) -> Result<Vec<Complex64>> {
    let k = mats.users();
    let n = mats.frame_len;
    if h.users() != k {
        return Err(Error::Dimension(format!(
            "channel has {} users, matrices describe {k}",
            h.users()
        )));
    }
    check_blocks(samples, h, SamplingMethod::Async, mats.async_len())?;
    let data = if idle_tail { n - 1 } else { n };
    let mut out = vec![Complex64::new(0.0, 0.0); n * k];
    if data == 0 {
        return Ok(out);
    }
    let x = match solver {
        ZfSolver::Structured => structured(samples, h, mats, data)?,
        ZfSolver::DenseQr => dense_qr(samples, h, mats, data)?,
    };
    out[..data * k].copy_from_slice(x.as_slice());
    Ok(out)
}

fn structured(samples: &[SampleBlock], h: &ChannelRealization, mats: &MatrixSet, data: usize) -> Result<DVector<Complex64>> {
    let k = mats.users();
    let c = DMatrix::from_fn(k, k, |l, j| {
        (0..h.antennas()).map(|m| h.gain(l, m).conj() * h.gain(j, m)).sum::<Complex64>()
    });
    let hadamard = |r: &DMatrix<f64>| DMatrix::from_fn(k, k, |l, j| c[(l, j)] * r[(l, j)]);
    let system = BlockTridiagonal::new(vec![hadamard(&mats.r11); data], vec![hadamard(&mats.r21); data - 1]);

    let mut rhs = DVector::zeros(data * k);
    for (m, block) in samples.iter().enumerate() {
        let y = &block.y;
        for i in 0..data {
            for user in 0..k {
                let cur: Complex64 = (user..k).map(|l| y[i * k + l]).sum();
                let next: Complex64 = (0..user).map(|l| y[(i + 1) * k + l]).sum();
                rhs[i * k + user] += h.gain(user, m).conj() * (cur + next);
            }
        }
    }
    system.solve(&rhs)
}

fn dense_qr(samples: &[SampleBlock], h: &ChannelRealization, mats: &MatrixSet, data: usize) -> Result<DVector<Complex64>> {
    let k = mats.users();
    let u = mats.dense_u()?;
    let rows = u.nrows();
    let cols = data * k;
    let m_count = h.antennas();
    let mut a = DMatrix::<Complex64>::zeros(rows * m_count, cols);
    let mut b = DVector::<Complex64>::zeros(rows * m_count);
    for (m, block) in samples.iter().enumerate() {
        for r in 0..rows {
            let w = 1.0 / mats.sigma_diag[r].sqrt();
            b[m * rows + r] = block.y[r] * w;
            for col in 0..cols {
                let v = u[(r, col)];
                if v != 0.0 {
                    a[(m * rows + r, col)] = h.gain(col % k, m) * (v * w);
                }
            }
        }
    }
    let qr = a.qr();
    let r = qr.r();
    let scale = r.diagonal().iter().map(|v| v.norm()).fold(0.0, f64::max);
    if r.diagonal().iter().any(|v| !(v.norm() > 1e-12 * scale)) {
        return Err(Error::Singular);
    }
    let qhb = qr.q().adjoint() * b;
    r.solve_upper_triangular(&qhb).ok_or(Error::Singular)
}

pub fn zf_detect(
    samples: &[SampleBlock],
    h: &ChannelRealization,
    mats: &MatrixSet,
    idle_tail: bool,
    solver: ZfSolver,
) -> Result<DetectionResult> {
    let est = zf_estimate(samples, h, mats, idle_tail, solver)?;
    let k = mats.users();
    let n = mats.frame_len;
    let symbols = est
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if idle_tail && i / k + 1 == n {
                0
            } else if v.re >= 0.0 {
                1
            } else {
                -1
            }
        })
        .collect();
    Ok(DetectionResult {
        detector: "zf".into(),
        decisions: SymbolFrame::new(n, k, symbols, idle_tail)?,
        soft: Some(est.iter().map(|v| v.re).collect()),
        metric: None,
    })
}
