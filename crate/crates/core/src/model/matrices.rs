//! Block matrices of the two sampling schemes.
//!
//! With rectangular pulses only the first two blocks of the Toeplitz system
//! survive: `U₁₁` (current slot) and `U₂₁` (spill of slot `j-1` into the
//! samples of slot `j`). Matched-filter sampling gives the symmetric
//! block-tridiagonal `R` with blocks `R₁₁`, `R₁₂ = R₂₁ᵀ`.

use nalgebra::DMatrix;

use super::DelayProfile;
use crate::error::{Error, Result};

/// Largest dimension for which dense `U` or `R` are materialised.
pub const MAX_DENSE_DIM: usize = 16_384;

pub fn build_u11(delays: &DelayProfile) -> DMatrix<f64> {
    let k = delays.users();
    let gaps = delays.gaps();
    DMatrix::from_fn(k, k, |l, c| {
        if l + 1 == k || c <= l {
            gaps[l]
        } else {
            0.0
        }
    })
}

pub fn build_u21(delays: &DelayProfile) -> DMatrix<f64> {
    let k = delays.users();
    let gaps = delays.gaps();
    DMatrix::from_fn(k, k, |l, c| if c > l { gaps[l] } else { 0.0 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RBlocks {
    pub r11: DMatrix<f64>,
    pub r12: DMatrix<f64>,
    pub r21: DMatrix<f64>,
}

pub fn build_r_blocks(delays: &DelayProfile) -> RBlocks {
    let k = delays.users();
    let t = delays.taus();
    let r11 = DMatrix::from_fn(k, k, |l, c| 1.0 - (t[c] - t[l]).abs());
    let r12 = DMatrix::from_fn(k, k, |l, c| if l > c { t[l] - t[c] } else { 0.0 });
    let r21 = r12.transpose();
    RBlocks { r11, r12, r21 }
}

fn check_dense(rows: usize, cols: usize) -> Result<()> {
    if rows > MAX_DENSE_DIM || cols > MAX_DENSE_DIM {
        return Err(Error::TooLarge(format!(
            "dense {rows}x{cols} matrix exceeds the {MAX_DENSE_DIM} limit"
        )));
    }
    Ok(())
}

/// `(N+1)K × NK` block lower-bidiagonal Toeplitz matrix with `U₁₁` on the
/// diagonal and `U₂₁` below it.
pub fn build_block_u(delays: &DelayProfile, frame_len: usize) -> Result<DMatrix<f64>> {
    if frame_len == 0 {
        return Err(Error::Dimension("frame length must be at least 1".into()));
    }
    let k = delays.users();
    check_dense((frame_len + 1) * k, frame_len * k)?;
    let u11 = build_u11(delays);
    let u21 = build_u21(delays);
    let mut u = DMatrix::zeros((frame_len + 1) * k, frame_len * k);
    for j in 0..frame_len {
        u.view_mut((j * k, j * k), (k, k)).copy_from(&u11);
        u.view_mut(((j + 1) * k, j * k), (k, k)).copy_from(&u21);
    }
    Ok(u)
}

/// `NK × NK` symmetric block-tridiagonal Toeplitz matrix.
pub fn build_block_r(delays: &DelayProfile, frame_len: usize) -> Result<DMatrix<f64>> {
    if frame_len == 0 {
        return Err(Error::Dimension("frame length must be at least 1".into()));
    }
    let k = delays.users();
    check_dense(frame_len * k, frame_len * k)?;
    let RBlocks { r11, r12, r21 } = build_r_blocks(delays);
    let mut r = DMatrix::zeros(frame_len * k, frame_len * k);
    for j in 0..frame_len {
        r.view_mut((j * k, j * k), (k, k)).copy_from(&r11);
        if j + 1 < frame_len {
            r.view_mut((j * k, (j + 1) * k), (k, k)).copy_from(&r12);
            r.view_mut(((j + 1) * k, j * k), (k, k)).copy_from(&r21);
        }
    }
    Ok(r)
}

/// Diagonal of the disjoint-interval noise covariance at unit `σ²`; the gap
/// pattern repeated over all `N+1` sample blocks.
pub fn noise_covariance_diag(delays: &DelayProfile, frame_len: usize) -> Vec<f64> {
    delays
        .gaps()
        .iter()
        .copied()
        .cycle()
        .take((frame_len + 1) * delays.users())
        .collect()
}

/// The block generators of both sampling schemes for one delay profile and
/// frame length. Dense `U` and `R` are built on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSet {
    pub delays: DelayProfile,
    pub frame_len: usize,
    pub u11: DMatrix<f64>,
    pub u21: DMatrix<f64>,
    pub r11: DMatrix<f64>,
    pub r12: DMatrix<f64>,
    pub r21: DMatrix<f64>,
    pub sigma_diag: Vec<f64>,
}

impl MatrixSet {
    pub fn new(delays: &DelayProfile, frame_len: usize) -> Result<Self> {
        if frame_len == 0 {
            return Err(Error::Dimension("frame length must be at least 1".into()));
        }
        let RBlocks { r11, r12, r21 } = build_r_blocks(delays);
        Ok(Self {
            delays: delays.clone(),
            frame_len,
            u11: build_u11(delays),
            u21: build_u21(delays),
            r11,
            r12,
            r21,
            sigma_diag: noise_covariance_diag(delays, frame_len),
        })
    }

    pub fn users(&self) -> usize {
        self.delays.users()
    }

    pub fn dense_u(&self) -> Result<DMatrix<f64>> {
        build_block_u(&self.delays, self.frame_len)
    }

    pub fn dense_r(&self) -> Result<DMatrix<f64>> {
        build_block_r(&self.delays, self.frame_len)
    }

    /// Length of one antenna's disjoint-interval sample block.
    pub fn async_len(&self) -> usize {
        (self.frame_len + 1) * self.users()
    }
}
