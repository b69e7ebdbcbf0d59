//! System model for asynchronous uplink transmission with rectangular pulses.
//!
//! `K` users send frames of `N` BPSK symbols to a common receiver with `M`
//! antennas. User `k` arrives with a sub-symbol delay `τ_k` (symbol interval
//! normalised to 1, `τ_1 = 0`). Two sampling schemes are modelled:
//!
//! * disjoint-interval sampling, `K` samples per symbol interval over the
//!   sub-intervals `[τ_l, τ_{l+1})`, giving `(N+1)K` samples with independent
//!   noise: `y = U H b + v`;
//! * matched-filter sampling, one sample per user and slot, giving `NK`
//!   samples with correlated noise: `y = R H b + n`.
//!
//! The [`matrices`] module builds `U`, `R` and their blocks, [`simulate`]
//! draws channels, frames and received samples.

pub mod matrices;
pub mod simulate;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use matrices::{
    build_block_r, build_block_u, build_r_blocks, build_u11, build_u21, noise_covariance_diag,
    MatrixSet, RBlocks, MAX_DENSE_DIM,
};
pub use simulate::{
    generate_channel, noiseless_async_dense, simulate_received_async, simulate_received_sync,
};

/// Ordered relative delays `0 = τ_1 < τ_2 < … < τ_K < 1` and the widths of
/// the sampling sub-intervals they induce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DelayProfile {
    taus: Vec<f64>,
    gaps: Vec<f64>,
}

impl DelayProfile {
    pub fn new(taus: Vec<f64>) -> Result<Self> {
        if taus.is_empty() {
            return Err(Error::InvalidDelays("at least one user is required".into()));
        }
        if taus[0] != 0.0 {
            return Err(Error::InvalidDelays(format!(
                "first delay must be exactly 0, got {}",
                taus[0]
            )));
        }
        for (i, w) in taus.windows(2).enumerate() {
            if !(w[1] > w[0]) || !w[1].is_finite() {
                return Err(Error::InvalidDelays(format!(
                    "delays must be strictly increasing: tau[{}] = {} and tau[{}] = {}",
                    i,
                    w[0],
                    i + 1,
                    w[1]
                )));
            }
        }
        let last = *taus.last().unwrap();
        if !(last < 1.0) {
            return Err(Error::InvalidDelays(format!(
                "largest delay must be below one symbol interval, got {last}"
            )));
        }
        let gaps = taus
            .iter()
            .zip(taus.iter().skip(1).chain(std::iter::once(&1.0)))
            .map(|(a, b)| b - a)
            .collect();
        Ok(Self { taus, gaps })
    }

    /// `τ_k = (k-1)/K`.
    pub fn uniform(users: usize) -> Self {
        assert!(users >= 1, "at least one user is required");
        Self::new((0..users).map(|k| k as f64 / users as f64).collect())
            .expect("uniform delays are valid")
    }

    /// Sorted uniform draws on `(0, 1)` with `τ_1 = 0`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, users: usize) -> Self {
        assert!(users >= 1, "at least one user is required");
        loop {
            let mut taus: Vec<f64> = std::iter::once(0.0)
                .chain((1..users).map(|_| rng.random::<f64>()))
                .collect();
            taus[1..].sort_by(|a, b| a.partial_cmp(b).unwrap());
            if let Ok(p) = Self::new(taus) {
                return p;
            }
        }
    }

    pub fn users(&self) -> usize {
        self.taus.len()
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    /// `gaps[l] = τ_{l+1} - τ_l` with `τ_{K+1} = 1`; these are the sub-interval
    /// widths `ρ_l` and the diagonal of `U₁₁`.
    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }
}

impl TryFrom<Vec<f64>> for DelayProfile {
    type Error = Error;

    fn try_from(taus: Vec<f64>) -> Result<Self> {
        Self::new(taus)
    }
}

impl From<DelayProfile> for Vec<f64> {
    fn from(p: DelayProfile) -> Self {
        p.taus
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modulation {
    #[default]
    Bpsk,
}

impl Modulation {
    /// Symbol values in hypothesis order.
    pub fn alphabet(self) -> &'static [i8] {
        match self {
            Modulation::Bpsk => &[1, -1],
        }
    }
}

/// Converts an SNR in dB to the noise variance at unit symbol power.
pub fn noise_variance_from_snr_db(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub users: usize,
    pub frame_len: usize,
    pub antennas: usize,
    pub noise_variance: f64,
    pub modulation: Modulation,
    pub delays: DelayProfile,
    pub seed: u64,
}

impl SystemConfig {
    pub fn new(delays: DelayProfile, frame_len: usize, antennas: usize, snr_db: f64) -> Result<Self> {
        if frame_len == 0 {
            return Err(Error::Config("frame length must be at least 1".into()));
        }
        if antennas == 0 {
            return Err(Error::Config("at least one receive antenna is required".into()));
        }
        Ok(Self {
            users: delays.users(),
            frame_len,
            antennas,
            noise_variance: noise_variance_from_snr_db(snr_db),
            modulation: Modulation::Bpsk,
            delays,
            seed: 0,
        })
    }
}

/// Complex gains `h[k][m]` from user `k` to antenna `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    users: usize,
    antennas: usize,
    gains: Vec<Complex64>,
}

impl ChannelRealization {
    /// `gains` is row-major `K×M`.
    pub fn new(users: usize, antennas: usize, gains: Vec<Complex64>) -> Result<Self> {
        if gains.len() != users * antennas || users == 0 || antennas == 0 {
            return Err(Error::Dimension(format!(
                "channel with {users} users and {antennas} antennas needs {} gains, got {}",
                users * antennas,
                gains.len()
            )));
        }
        Ok(Self {
            users,
            antennas,
            gains,
        })
    }

    /// Single-antenna channel from per-user gains.
    pub fn single_antenna(gains: Vec<Complex64>) -> Self {
        let users = gains.len();
        Self::new(users, 1, gains).expect("non-empty gain vector")
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    #[inline]
    pub fn gain(&self, user: usize, antenna: usize) -> Complex64 {
        self.gains[user * self.antennas + antenna]
    }

    pub fn antenna_column(&self, antenna: usize) -> Vec<Complex64> {
        (0..self.users).map(|k| self.gain(k, antenna)).collect()
    }

    /// Keeps a subset of antennas.
    pub fn select_antennas(&self, antennas: &[usize]) -> Self {
        let gains = (0..self.users)
            .flat_map(|k| antennas.iter().map(move |&m| (k, m)))
            .map(|(k, m)| self.gain(k, m))
            .collect();
        Self::new(self.users, antennas.len(), gains).expect("valid antenna subset")
    }

    /// `Σ_m |h_{k,m}|²`.
    pub fn user_energy(&self, user: usize) -> f64 {
        (0..self.antennas).map(|m| self.gain(user, m).norm_sqr()).sum()
    }
}

/// Transmitted symbols `b[i][k] = b_k(i)` for slots `i = 1..N`.
///
/// When `idle_tail` is set the last slot carries the guard symbol 0 for every
/// user; all other entries are alphabet members.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolFrame {
    slots: usize,
    users: usize,
    idle_tail: bool,
    symbols: Vec<i8>,
}

impl SymbolFrame {
    /// `symbols` is slot-major: `symbols[i * K + k]`.
    pub fn new(slots: usize, users: usize, symbols: Vec<i8>, idle_tail: bool) -> Result<Self> {
        if symbols.len() != slots * users || slots == 0 || users == 0 {
            return Err(Error::Dimension(format!(
                "frame of {slots} slots and {users} users needs {} symbols, got {}",
                slots * users,
                symbols.len()
            )));
        }
        let alphabet = Modulation::Bpsk.alphabet();
        for (idx, &s) in symbols.iter().enumerate() {
            let slot = idx / users;
            let ok = if idle_tail && slot + 1 == slots {
                s == 0
            } else {
                alphabet.contains(&s)
            };
            if !ok {
                return Err(Error::Dimension(format!(
                    "symbol {s} at slot {slot}, user {} is not allowed",
                    idx % users
                )));
            }
        }
        Ok(Self {
            slots,
            users,
            idle_tail,
            symbols,
        })
    }

    /// Uniform BPSK data; with `idle_tail` the last slot is zeroed.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, slots: usize, users: usize, idle_tail: bool) -> Self {
        let symbols = (0..slots * users)
            .map(|idx| {
                if idle_tail && idx / users + 1 == slots {
                    0
                } else if rng.random::<bool>() {
                    1
                } else {
                    -1
                }
            })
            .collect();
        Self {
            slots,
            users,
            idle_tail,
            symbols,
        }
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn idle_tail(&self) -> bool {
        self.idle_tail
    }

    /// Number of slots carrying data.
    pub fn data_slots(&self) -> usize {
        self.slots - usize::from(self.idle_tail)
    }

    /// `b_k(i)` with 0-based slot and user.
    #[inline]
    pub fn get(&self, slot: usize, user: usize) -> i8 {
        self.symbols[slot * self.users + user]
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.symbols
    }

    /// Bit errors against `other`, skipping the idle slot.
    pub fn bit_errors(&self, other: &SymbolFrame) -> u64 {
        assert_eq!(self.symbols.len(), other.symbols.len());
        let data = self.data_slots() * self.users;
        self.symbols[..data]
            .iter()
            .zip(&other.symbols[..data])
            .filter(|(a, b)| a != b)
            .count() as u64
    }

    /// Per-user error counts over data slots.
    pub fn bit_errors_per_user(&self, other: &SymbolFrame) -> Vec<u64> {
        let mut errs = vec![0u64; self.users];
        for slot in 0..self.data_slots() {
            for (k, e) in errs.iter_mut().enumerate() {
                if self.get(slot, k) != other.get(slot, k) {
                    *e += 1;
                }
            }
        }
        errs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMethod {
    /// `(N+1)K` samples over disjoint sub-intervals.
    Async,
    /// One sample per slot (synchronous reception).
    Sync,
    /// `NK` matched-filter samples with correlated noise.
    Matched,
}

/// Received samples of one antenna.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBlock {
    pub method: SamplingMethod,
    /// For [`SamplingMethod::Async`] `y[j*K + l] = y_l(j)` with 0-based `j` in
    /// `0..=N`; for sync samples `y[j]`.
    pub y: Vec<Complex64>,
}

impl SampleBlock {
    pub fn check_len(&self, method: SamplingMethod, len: usize) -> Result<()> {
        if self.method != method || self.y.len() != len {
            return Err(Error::Dimension(format!(
                "expected {method:?} block of length {len}, got {:?} of length {}",
                self.method,
                self.y.len()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delay_validation() {
        assert!(DelayProfile::new(vec![0.0, 0.5]).is_ok());
        assert!(DelayProfile::new(vec![0.1, 0.5]).is_err());
        assert!(DelayProfile::new(vec![0.0, 0.5, 0.5]).is_err());
        assert!(DelayProfile::new(vec![0.0, 0.6, 0.5]).is_err());
        assert!(DelayProfile::new(vec![0.0, 1.0]).is_err());
        assert!(DelayProfile::new(vec![]).is_err());
        assert!(DelayProfile::new(vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn gaps_sum_to_one() {
        let d = DelayProfile::new(vec![0.0, 0.2, 0.5]).unwrap();
        assert_eq!(d.gaps().len(), 3);
        assert!((d.gaps()[0] - 0.2).abs() < 1e-15);
        assert!((d.gaps()[1] - 0.3).abs() < 1e-15);
        assert!((d.gaps()[2] - 0.5).abs() < 1e-15);
        assert!((d.gaps().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert_eq!(DelayProfile::uniform(1).gaps(), &[1.0]);
    }

    #[test]
    fn frame_rejects_bad_symbols() {
        assert!(SymbolFrame::new(2, 1, vec![1, 0], true).is_ok());
        assert!(SymbolFrame::new(2, 1, vec![1, 0], false).is_err());
        assert!(SymbolFrame::new(2, 1, vec![0, 0], true).is_err());
        assert!(SymbolFrame::new(2, 1, vec![1, 1, 1], false).is_err());
    }

    #[test]
    fn snr_convention() {
        assert!((noise_variance_from_snr_db(10.0) - 0.1).abs() < 1e-15);
        assert_eq!(noise_variance_from_snr_db(0.0), 1.0);
    }
}
