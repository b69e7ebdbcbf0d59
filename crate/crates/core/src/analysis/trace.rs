//! `trace(R⁻¹)` in closed form, the diagonal of `R⁻¹`, and the explicit
//! inverse of `R11`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::BlockTridiagonal;
use crate::model::{build_block_r, build_r_blocks, DelayProfile};

/// Largest `NK` for which [`r_inverse_diagonal`] inverts the dense matrix.
pub const DENSE_DIAG_LIMIT: usize = 4096;

fn check_frame(frame_len: usize) -> Result<()> {
    if frame_len == 0 {
        return Err(Error::Dimension("frame length must be at least 1".into()));
    }
    Ok(())
}

/// Closed-form `trace(R⁻¹)`:
/// `(N-1)(N+1)/(3(1+τ₁-τ_K)) + (2N+1)/(3(N+1+τ₁-τ_K)) + N(N+2)/3 · Σ 1/(τ_{i+1}-τ_i)`.
///
/// Experimental for `K = 1`: the sum is empty and the value is not `N`.
pub fn trace_r_inverse_formula(delays: &DelayProfile, frame_len: usize) -> Result<f64> {
    check_frame(frame_len)?;
    let n = frame_len as f64;
    let taus = delays.taus();
    let span = taus[0] - taus[taus.len() - 1];
    let inner: f64 = taus.windows(2).map(|w| 1.0 / (w[1] - w[0])).sum();
    Ok((n - 1.0) * (n + 1.0) / (3.0 * (1.0 + span))
        + (2.0 * n + 1.0) / (3.0 * (n + 1.0 + span))
        + n * (n + 2.0) / 3.0 * inner)
}

/// Trace of the dense inverse of `R`. Reference for the closed form.
pub fn trace_r_inverse_dense(delays: &DelayProfile, frame_len: usize) -> Result<f64> {
    let r = build_block_r(delays, frame_len)?;
    let inv = r.cholesky().ok_or(Error::Singular)?.inverse();
    Ok(inv.trace())
}

/// `R⁻¹(i,i)` for every subchannel `i` in frame order. Dense inversion up
/// to [`DENSE_DIAG_LIMIT`], block recursion above it.
pub fn r_inverse_diagonal(delays: &DelayProfile, frame_len: usize) -> Result<Vec<f64>> {
    check_frame(frame_len)?;
    let k = delays.users();
    if frame_len * k <= DENSE_DIAG_LIMIT {
        let r = build_block_r(delays, frame_len)?;
        let inv = r.cholesky().ok_or(Error::Singular)?.inverse();
        Ok(inv.diagonal().iter().copied().collect())
    } else {
        r_inverse_diagonal_blocked(delays, frame_len)
    }
}

/// Block-recursion path of [`r_inverse_diagonal`], usable at any size.
pub fn r_inverse_diagonal_blocked(delays: &DelayProfile, frame_len: usize) -> Result<Vec<f64>> {
    check_frame(frame_len)?;
    let blocks = build_r_blocks(delays);
    let sys = BlockTridiagonal::new(vec![blocks.r11; frame_len], vec![blocks.r21; frame_len - 1]);
    Ok(sys
        .inverse_diagonal_blocks()?
        .iter()
        .flat_map(|b| b.diagonal().iter().copied().collect::<Vec<_>>())
        .collect())
}

/// Explicit inverse of `R11`: `-½` times the tridiagonal matrix with
/// off-diagonals `1/(τ_{i+1}-τ_i)`, corners `f = 1/(τ_K-τ₁-2)` and diagonal
///
/// * `d₁ = 1/(τ₁-τ₂) - 1/(τ₁-τ_K+2)`
/// * `d_i = 1/(τ_{i-1}-τ_i) + 1/(τ_i-τ_{i+1})`
/// * `d_K = 1/(τ_{K-1}-τ_K) - 1/(τ₁-τ_K+2)`
pub fn fiedler_inverse_r11(delays: &DelayProfile) -> DMatrix<f64> {
    let t = delays.taus();
    let k = t.len();
    if k == 1 {
        return DMatrix::from_element(1, 1, 1.0);
    }
    let wrap = 1.0 / (t[0] - t[k - 1] + 2.0);
    let f = 1.0 / (t[k - 1] - t[0] - 2.0);
    let mut m = DMatrix::zeros(k, k);
    for i in 0..k - 1 {
        let off = 1.0 / (t[i + 1] - t[i]);
        m[(i, i + 1)] += off;
        m[(i + 1, i)] += off;
    }
    m[(0, k - 1)] += f;
    m[(k - 1, 0)] += f;
    m[(0, 0)] = 1.0 / (t[0] - t[1]) - wrap;
    m[(k - 1, k - 1)] = 1.0 / (t[k - 2] - t[k - 1]) - wrap;
    for i in 1..k - 1 {
        m[(i, i)] = 1.0 / (t[i - 1] - t[i]) + 1.0 / (t[i] - t[i + 1]);
    }
    m * -0.5
}

/// Last row of `R⁻¹` for two users with delay `τ`, in frame order:
/// entry `2i-1` is `(τ-i)/(τ(N+1-τ))` and entry `2i` is `i/(τ(N+1-τ))`.
pub fn last_row_two_users(tau: f64, frame_len: usize) -> Vec<f64> {
    let denom = tau * (frame_len as f64 + 1.0 - tau);
    (1..=frame_len)
        .flat_map(|i| {
            let i = i as f64;
            [(tau - i) / denom, i / denom]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_user_single_slot() {
        let d = DelayProfile::new(vec![0.0, 0.5]).unwrap();
        assert!((trace_r_inverse_formula(&d, 1).unwrap() - 8.0 / 3.0).abs() < 1e-14);
        assert!((trace_r_inverse_dense(&d, 1).unwrap() - 8.0 / 3.0).abs() < 1e-14);
        let f = fiedler_inverse_r11(&d);
        let want = DMatrix::from_row_slice(2, 2, &[4.0 / 3.0, -2.0 / 3.0, -2.0 / 3.0, 4.0 / 3.0]);
        assert!((f - want).norm() < 1e-14);
    }

    #[test]
    fn fiedler_trace_formula() {
        let d = DelayProfile::new(vec![0.0, 0.1, 0.45, 0.7]).unwrap();
        let t = d.taus();
        let want = 1.0 / (2.0 + t[0] - t[3]) + t.windows(2).map(|w| 1.0 / (w[1] - w[0])).sum::<f64>();
        assert!((fiedler_inverse_r11(&d).trace() - want).abs() < 1e-12);
    }

    #[test]
    fn single_user() {
        let d = DelayProfile::uniform(1);
        assert_eq!(fiedler_inverse_r11(&d), DMatrix::from_element(1, 1, 1.0));
        assert_eq!(r_inverse_diagonal(&d, 5).unwrap(), vec![1.0; 5]);
    }

    #[test]
    fn blocked_matches_dense_diagonal() {
        let d = DelayProfile::new(vec![0.0, 0.2, 0.3, 0.85]).unwrap();
        let dense = r_inverse_diagonal(&d, 40).unwrap();
        let blocked = r_inverse_diagonal_blocked(&d, 40).unwrap();
        for (a, b) in dense.iter().zip(&blocked) {
            assert!((a - b).abs() < 1e-9 * a);
        }
    }

    #[test]
    fn zero_frame_rejected() {
        let d = DelayProfile::uniform(2);
        assert!(trace_r_inverse_formula(&d, 0).is_err());
        assert!(r_inverse_diagonal(&d, 0).is_err());
    }
}
