//! Closed-form BER of the ZF subchannels under Rayleigh fading.
//!
//! Subchannel `i` has post-detection SNR `δ₀ Σ_m |h_{k,m}|² / R⁻¹(i,i)` with
//! unit-variance complex gains, i.e. Gamma distributed with shape `M` and
//! mean `M c`, `c = δ₀ / R⁻¹(i,i)`. Averaging the BPSK error `Q(√(2δ))` gives
//!
//! `p_i = √(c/π) / (2 (1+c)^{M+½}) · Γ(M+½)/Γ(M+1) · ₂F₁(1, M+½; M+1; 1/(1+c))`.
//!
//! The SNR above is exact for `M = 1`. With more antennas the true noise
//! variance after ZF is at most `σ² R⁻¹(i,i) / Σ_m |h_{k,m}|²`, so `p_i`
//! bounds the simulated BER from above.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::hypergeometric::hyp2f1_special;
use super::trace::r_inverse_diagonal;
use crate::error::{Error, Result};
use crate::model::DelayProfile;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerFormulaInput {
    /// Subchannel in frame order, `0..N*K`.
    pub index: usize,
    pub delays: DelayProfile,
    pub frame_len: usize,
    pub antennas: u32,
    /// Linear transmit SNR.
    pub delta0: f64,
}

fn gamma_ratio(m: u32) -> f64 {
    let mf = f64::from(m);
    (ln_gamma(mf + 0.5) - ln_gamma(mf + 1.0)).exp()
}

fn check(antennas: u32, delta0: f64) -> Result<()> {
    if antennas == 0 {
        return Err(Error::Unsupported("at least one antenna is needed".into()));
    }
    if !(delta0 > 0.0 && delta0.is_finite()) {
        return Err(Error::Unsupported(format!("SNR must be positive and finite, got {delta0}")));
    }
    Ok(())
}

/// `p_i` from a known `R⁻¹(i,i)`.
pub fn ber_closed_form_from_diag(r_ii: f64, antennas: u32, delta0: f64) -> Result<f64> {
    check(antennas, delta0)?;
    if !(r_ii > 0.0) {
        return Err(Error::Unsupported(format!("R⁻¹(i,i) must be positive, got {r_ii}")));
    }
    let m = f64::from(antennas);
    let c = delta0 / r_ii;
    let x = 1.0 / (1.0 + c);
    let f = hyp2f1_special(antennas, x)?;
    // (1+c)^{-(M+½)} in log space
    let log_head = 0.5 * (c / std::f64::consts::PI).ln() - (m + 0.5) * c.ln_1p();
    Ok(0.5 * log_head.exp() * gamma_ratio(antennas) * f)
}

/// `p_i` with `R⁻¹(i,i)` taken from the inverse of `R`.
pub fn ber_closed_form(inp: &BerFormulaInput) -> Result<f64> {
    let k = inp.delays.users();
    if inp.index >= inp.frame_len * k {
        return Err(Error::Dimension(format!(
            "subchannel {} out of range for N={} K={k}",
            inp.index, inp.frame_len
        )));
    }
    let diag = r_inverse_diagonal(&inp.delays, inp.frame_len)?;
    ber_closed_form_from_diag(diag[inp.index], inp.antennas, inp.delta0)
}

/// Mean of `p_i` over the given subchannel noise-enhancement factors.
pub fn average_ber_from_diag(diag: &[f64], antennas: u32, delta0: f64) -> Result<f64> {
    if diag.is_empty() {
        return Err(Error::InsufficientData("no subchannels".into()));
    }
    let mut sum = 0.0;
    for &r in diag {
        sum += ber_closed_form_from_diag(r, antennas, delta0)?;
    }
    Ok(sum / diag.len() as f64)
}

/// Mean of `p_i` over all `NK` subchannels.
pub fn average_ber_exact(delays: &DelayProfile, frame_len: usize, antennas: u32, delta0: f64) -> Result<f64> {
    average_ber_from_diag(&r_inverse_diagonal(delays, frame_len)?, antennas, delta0)
}

/// `Γ(M+½) / (2√π Γ(M+1))`, the leading coefficient of `p_i` in `(R⁻¹(i,i)/δ₀)^M`.
pub fn high_snr_constant(antennas: u32) -> f64 {
    gamma_ratio(antennas) / (2.0 * std::f64::consts::PI.sqrt())
}

/// High-SNR average: `Const/(NK) · Σ_i (R⁻¹(i,i))^M / δ₀^M`.
pub fn avg_ber_high_snr_from_diag(diag: &[f64], antennas: u32, delta0: f64) -> f64 {
    let m = antennas as i32;
    let sum: f64 = diag.iter().map(|r| (r / delta0).powi(m)).sum();
    high_snr_constant(antennas) * sum / diag.len() as f64
}

pub fn avg_ber_high_snr(delays: &DelayProfile, frame_len: usize, antennas: u32, delta0: f64) -> Result<f64> {
    check(antennas, delta0)?;
    Ok(avg_ber_high_snr_from_diag(
        &r_inverse_diagonal(delays, frame_len)?,
        antennas,
        delta0,
    ))
}
