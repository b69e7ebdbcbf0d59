//! Channel, frame and received-sample generation.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{ChannelRealization, MatrixSet, SampleBlock, SamplingMethod, SymbolFrame};
use crate::error::{Error, Result};

/// Circularly-symmetric complex Gaussian with total variance `variance`.
#[inline]
pub(crate) fn complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// i.i.d. unit-variance Rayleigh gains, drawn user-major.
pub fn generate_channel<R: Rng + ?Sized>(rng: &mut R, users: usize, antennas: usize) -> ChannelRealization {
    let gains = (0..users * antennas).map(|_| complex_normal(rng, 1.0)).collect();
    ChannelRealization::new(users, antennas, gains).expect("positive dimensions")
}

fn check_dims(mats: &MatrixSet, h: &ChannelRealization, b: &SymbolFrame) -> Result<()> {
    if h.users() != mats.users() || b.users() != mats.users() || b.slots() != mats.frame_len {
        return Err(Error::Dimension(format!(
            "matrices are for K={} N={}, channel has K={}, frame has K={} N={}",
            mats.users(),
            mats.frame_len,
            h.users(),
            b.users(),
            b.slots()
        )));
    }
    Ok(())
}

/// Noiseless disjoint-interval sample `y_l(j)` for antenna `m` via the
/// per-sample recursion; `slot` is 0-based in `0..=N`.
#[inline]
fn async_sample(mats: &MatrixSet, h: &ChannelRealization, b: &SymbolFrame, m: usize, slot: usize, l: usize) -> Complex64 {
    let k = mats.users();
    let n = mats.frame_len;
    let mut acc = Complex64::new(0.0, 0.0);
    if slot < n {
        for user in 0..=l {
            acc += h.gain(user, m) * f64::from(b.get(slot, user));
        }
    }
    if slot >= 1 {
        for user in l + 1..k {
            acc += h.gain(user, m) * f64::from(b.get(slot - 1, user));
        }
    }
    acc * mats.delays.gaps()[l]
}

/// Disjoint-interval samples for every antenna:
/// `y_l(j) = ρ_l (Σ_{k≤l} h_k b_k(j) + Σ_{k>l} h_k b_k(j-1)) + v_l(j)`
/// with `b(0) = b(N+1) = 0` and `v_l(j)` of variance `σ² ρ_l`.
pub fn simulate_received_async<R: Rng + ?Sized>(
    mats: &MatrixSet,
    h: &ChannelRealization,
    b: &SymbolFrame,
    noise_variance: f64,
    rng: &mut R,
) -> Result<Vec<SampleBlock>> {
    check_dims(mats, h, b)?;
    let k = mats.users();
    let len = mats.async_len();
    let gaps = mats.delays.gaps();
    Ok((0..h.antennas())
        .map(|m| {
            let y = (0..len)
                .map(|idx| {
                    let (slot, l) = (idx / k, idx % k);
                    async_sample(mats, h, b, m, slot, l) + complex_normal(rng, noise_variance * gaps[l])
                })
                .collect();
            SampleBlock {
                method: SamplingMethod::Async,
                y,
            }
        })
        .collect())
}

/// Noiseless `U · H_m · b` through the dense block matrix; the reference for
/// the recursion used by [`simulate_received_async`].
pub fn noiseless_async_dense(
    mats: &MatrixSet,
    h: &ChannelRealization,
    b: &SymbolFrame,
    antenna: usize,
) -> Result<Vec<Complex64>> {
    check_dims(mats, h, b)?;
    let k = mats.users();
    let u = mats.dense_u()?.map(|x| Complex64::new(x, 0.0));
    let hb = DVector::from_fn(mats.frame_len * k, |idx, _| {
        h.gain(idx % k, antenna) * f64::from(b.get(idx / k, idx % k))
    });
    Ok((u * hb).iter().copied().collect())
}

/// Synchronous reception, one sample per slot and antenna:
/// `y_m(j) = Σ_k h_{k,m} b_k(j) + n`, `n` of variance `σ²`.
pub fn simulate_received_sync<R: Rng + ?Sized>(
    h: &ChannelRealization,
    b: &SymbolFrame,
    noise_variance: f64,
    rng: &mut R,
) -> Result<Vec<SampleBlock>> {
    if h.users() != b.users() {
        return Err(Error::Dimension(format!(
            "channel has {} users, frame has {}",
            h.users(),
            b.users()
        )));
    }
    Ok((0..h.antennas())
        .map(|m| {
            let y = (0..b.slots())
                .map(|slot| {
                    let s: Complex64 = (0..b.users())
                        .map(|user| h.gain(user, m) * f64::from(b.get(slot, user)))
                        .sum();
                    s + complex_normal(rng, noise_variance)
                })
                .collect();
            SampleBlock {
                method: SamplingMethod::Sync,
                y,
            }
        })
        .collect())
}
