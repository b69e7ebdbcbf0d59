//! Noise covariance after zero-forcing.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{build_block_r, ChannelRealization, DelayProfile};

/// `σ² (Σ_m H_mᴴ R H_m)⁻¹` with `H_m = I_N ⊗ diag(h[:, m])`.
pub fn zf_noise_covariance(
    h: &ChannelRealization,
    delays: &DelayProfile,
    frame_len: usize,
    noise_variance: f64,
) -> Result<DMatrix<Complex64>> {
    let k = delays.users();
    if h.users() != k {
        return Err(Error::Dimension(format!(
            "channel has {} users, delays describe {k}",
            h.users()
        )));
    }
    let r = build_block_r(delays, frame_len)?;
    let dim = r.nrows();
    let normal = DMatrix::from_fn(dim, dim, |i, j| {
        let (u, v) = (i % k, j % k);
        let c: Complex64 = (0..h.antennas()).map(|m| h.gain(u, m).conj() * h.gain(v, m)).sum();
        c * r[(i, j)]
    });
    let scale = normal.diagonal().iter().map(|v| v.re).fold(0.0, f64::max);
    let chol = normal.cholesky().ok_or(Error::Singular)?;
    let min_pivot = chol.l_dirty().diagonal().iter().map(|v| v.norm_sqr()).fold(f64::INFINITY, f64::min);
    if !(min_pivot > 1e-13 * scale) {
        return Err(Error::Singular);
    }
    Ok(chol.inverse() * Complex64::new(noise_variance, 0.0))
}
