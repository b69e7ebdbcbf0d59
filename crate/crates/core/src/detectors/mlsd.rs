//! Maximum-likelihood sequence detection on the disjoint-interval samples.
//!
//! The trellis state is the previous symbol vector `b(j-1)`; the branch into
//! `b(j)` is scored on sample block `y(j)` with
//! `Σ_l |y_l(j) - ρ_l (Σ_{k≤l} h_k b_k(j) + Σ_{k>l} h_k b_k(j-1))|² / (σ² ρ_l)`,
//! summed over antennas. The trellis starts in the all-zero state `b(0)` and
//! the final block `y(N+1)` (which only sees `b(N)`) closes it into the
//! all-zero state `b(N+1)`, so the survivor is the exact ML sequence.

use num_complex::Complex64;

use super::{async_frame_len, check_blocks, DetectionResult};
use crate::error::{Error, Result};
use crate::model::{ChannelRealization, DelayProfile, Modulation, SampleBlock, SamplingMethod, SymbolFrame};

/// Largest `|A|^K` accepted by the trellis and by exhaustive per-slot search.
pub const MAX_TRELLIS_STATES: usize = 4096;

/// Symbol vector of hypothesis `index`: bit `k` set means user `k` sent the
/// second alphabet symbol.
pub(crate) fn hypothesis(index: usize, users: usize) -> Vec<i8> {
    let alphabet = Modulation::Bpsk.alphabet();
    (0..users).map(|k| alphabet[(index >> k) & 1]).collect()
}

struct Branches {
    users: usize,
    antennas: usize,
    /// `[c][m][l] = Σ_{k≤l} h_{k,m} b_k` for each candidate vector `c`.
    current: Vec<Complex64>,
    /// `[c][m][l] = Σ_{k>l} h_{k,m} b_k`.
    previous: Vec<Complex64>,
}

impl Branches {
    fn new(vectors: &[Vec<i8>], h: &ChannelRealization) -> Self {
        let users = h.users();
        let antennas = h.antennas();
        let mut current = Vec::with_capacity(vectors.len() * antennas * users);
        let mut previous = Vec::with_capacity(vectors.len() * antennas * users);
        for v in vectors {
            for m in 0..antennas {
                for l in 0..users {
                    let cur: Complex64 = (0..=l).map(|k| h.gain(k, m) * f64::from(v[k])).sum();
                    let prev: Complex64 = (l + 1..users).map(|k| h.gain(k, m) * f64::from(v[k])).sum();
                    current.push(cur);
                    previous.push(prev);
                }
            }
        }
        Self {
            users,
            antennas,
            current,
            previous,
        }
    }

    #[inline]
    fn metric(&self, samples: &[SampleBlock], slot: usize, prev: usize, cur: usize, gaps: &[f64], weights: &[f64]) -> f64 {
        let k = self.users;
        let stride = self.antennas * k;
        let mut total = 0.0;
        for (m, block) in samples.iter().enumerate() {
            let y = &block.y[slot * k..slot * k + k];
            let c = &self.current[cur * stride + m * k..cur * stride + m * k + k];
            let p = &self.previous[prev * stride + m * k..prev * stride + m * k + k];
            for l in 0..k {
                total += (y[l] - (c[l] + p[l]) * gaps[l]).norm_sqr() * weights[l];
            }
        }
        total
    }
}

fn validate(
    samples: &[SampleBlock],
    h: &ChannelRealization,
    delays: &DelayProfile,
    noise_variance: f64,
) -> Result<usize> {
    let k = delays.users();
    if h.users() != k {
        return Err(Error::Dimension(format!(
            "channel has {} users, delays describe {k}",
            h.users()
        )));
    }
    if !(noise_variance > 0.0) {
        return Err(Error::Unsupported(format!(
            "metric needs a positive noise variance, got {noise_variance}"
        )));
    }
    let n = async_frame_len(samples, k)?;
    check_blocks(samples, h, SamplingMethod::Async, (n + 1) * k)?;
    Ok(n)
}

pub fn mlsd_viterbi(
    samples: &[SampleBlock],
    h: &ChannelRealization,
    delays: &DelayProfile,
    noise_variance: f64,
    idle_tail: bool,
) -> Result<DetectionResult> {
    let n = validate(samples, h, delays, noise_variance)?;
    let k = delays.users();
    let states = Modulation::Bpsk.alphabet().len().pow(k as u32);
    if states > MAX_TRELLIS_STATES {
        return Err(Error::StateSpace {
            states,
            cap: MAX_TRELLIS_STATES,
        });
    }
    let gaps = delays.gaps();
    let weights: Vec<f64> = gaps.iter().map(|g| 1.0 / (noise_variance * g)).collect();

    // candidate vectors; index `states` is the all-zero vector
    let mut vectors: Vec<Vec<i8>> = (0..states).map(|s| hypothesis(s, k)).collect();
    let zero = states;
    vectors.push(vec![0; k]);
    let branches = Branches::new(&vectors, h);

    let all: Vec<usize> = (0..states).collect();
    let candidates = |slot: usize| -> &[usize] {
        if slot == n || (idle_tail && slot + 1 == n) {
            std::slice::from_ref(&zero)
        } else {
            &all
        }
    };

    // survivors[slot][i] = predecessor index into candidates(slot - 1)
    let mut survivors: Vec<Vec<usize>> = Vec::with_capacity(n + 1);
    let mut prev_set: &[usize] = std::slice::from_ref(&zero);
    let mut prev_metric = vec![0.0f64];
    for slot in 0..=n {
        let cur_set = candidates(slot);
        let mut metric = Vec::with_capacity(cur_set.len());
        let mut back = Vec::with_capacity(cur_set.len());
        for &c in cur_set {
            let mut best = f64::INFINITY;
            let mut arg = 0;
            for (pi, &p) in prev_set.iter().enumerate() {
                let m = prev_metric[pi] + branches.metric(samples, slot, p, c, gaps, &weights);
                if m < best {
                    best = m;
                    arg = pi;
                }
            }
            metric.push(best);
            back.push(arg);
        }
        survivors.push(back);
        prev_metric = metric;
        prev_set = cur_set;
    }

    // trace back from the terminal zero state
    let mut symbols = vec![0i8; n * k];
    let mut idx = 0usize;
    for slot in (0..=n).rev() {
        let vec_index = candidates(slot)[idx];
        if slot < n {
            symbols[slot * k..slot * k + k].copy_from_slice(&vectors[vec_index]);
        }
        idx = survivors[slot][idx];
    }
    Ok(DetectionResult {
        detector: "mlsd".into(),
        decisions: SymbolFrame::new(n, k, symbols, idle_tail)?,
        soft: None,
        metric: Some(prev_metric[0]),
    })
}

/// The MLSD objective of a given frame, summed directly over all samples.
pub fn sequence_metric(
    samples: &[SampleBlock],
    h: &ChannelRealization,
    delays: &DelayProfile,
    noise_variance: f64,
    frame: &SymbolFrame,
) -> Result<f64> {
    let n = validate(samples, h, delays, noise_variance)?;
    let k = delays.users();
    if frame.slots() != n || frame.users() != k {
        return Err(Error::Dimension("frame does not match samples".into()));
    }
    let gaps = delays.gaps();
    let sym = |slot: usize, user: usize| -> f64 {
        if slot < n {
            f64::from(frame.get(slot, user))
        } else {
            0.0
        }
    };
    let mut total = 0.0;
    for (m, block) in samples.iter().enumerate() {
        for slot in 0..=n {
            for l in 0..k {
                let mut s = Complex64::new(0.0, 0.0);
                for user in 0..=l {
                    s += h.gain(user, m) * sym(slot, user);
                }
                if slot >= 1 {
                    for user in l + 1..k {
                        s += h.gain(user, m) * sym(slot - 1, user);
                    }
                }
                total += (block.y[slot * k + l] - s * gaps[l]).norm_sqr() / (noise_variance * gaps[l]);
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_channel, simulate_received_async, MatrixSet};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn noiseless_recovery() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for k in 1..=3 {
            let delays = DelayProfile::random(&mut rng, k);
            let mats = MatrixSet::new(&delays, 8).unwrap();
            for idle in [false, true] {
                let h = generate_channel(&mut rng, k, 1);
                let b = SymbolFrame::random(&mut rng, 8, k, idle);
                let y = simulate_received_async(&mats, &h, &b, 0.0, &mut rng).unwrap();
                let out = mlsd_viterbi(&y, &h, &delays, 0.1, idle).unwrap();
                assert_eq!(out.decisions, b);
                assert!(out.metric.unwrap() < 1e-20);
            }
        }
    }

    #[test]
    fn single_user_is_symbol_by_symbol() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let delays = DelayProfile::uniform(1);
        let mats = MatrixSet::new(&delays, 30).unwrap();
        let h = generate_channel(&mut rng, 1, 1);
        let b = SymbolFrame::random(&mut rng, 30, 1, false);
        let y = simulate_received_async(&mats, &h, &b, 1.0, &mut rng).unwrap();
        let out = mlsd_viterbi(&y, &h, &delays, 1.0, false).unwrap();
        let g = h.gain(0, 0);
        for slot in 0..30 {
            let want = if (g.conj() * y[0].y[slot]).re >= 0.0 { 1 } else { -1 };
            assert_eq!(out.decisions.get(slot, 0), want);
        }
    }

    #[test]
    fn reported_metric_is_sequence_metric() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let delays = DelayProfile::uniform(2);
        let mats = MatrixSet::new(&delays, 6).unwrap();
        let h = generate_channel(&mut rng, 2, 2);
        let b = SymbolFrame::random(&mut rng, 6, 2, false);
        let y = simulate_received_async(&mats, &h, &b, 0.3, &mut rng).unwrap();
        let out = mlsd_viterbi(&y, &h, &delays, 0.3, false).unwrap();
        let direct = sequence_metric(&y, &h, &delays, 0.3, &out.decisions).unwrap();
        assert!((out.metric.unwrap() - direct).abs() < 1e-9 * direct.max(1.0));
    }

    #[test]
    fn rejects_bad_input() {
        let delays = DelayProfile::uniform(2);
        let h = ChannelRealization::single_antenna(vec![Complex64::new(1.0, 0.0); 2]);
        let y = vec![SampleBlock {
            method: SamplingMethod::Async,
            y: vec![Complex64::new(0.0, 0.0); 5],
        }];
        assert!(mlsd_viterbi(&y, &h, &delays, 1.0, false).is_err());
        let y = vec![SampleBlock {
            method: SamplingMethod::Async,
            y: vec![Complex64::new(0.0, 0.0); 6],
        }];
        assert!(mlsd_viterbi(&y, &h, &delays, 0.0, false).is_err());
        let big = DelayProfile::uniform(13);
        let h = ChannelRealization::single_antenna(vec![Complex64::new(1.0, 0.0); 13]);
        let y = vec![SampleBlock {
            method: SamplingMethod::Async,
            y: vec![Complex64::new(0.0, 0.0); 26],
        }];
        assert!(matches!(
            mlsd_viterbi(&y, &h, &big, 1.0, false),
            Err(Error::StateSpace { .. })
        ));
    }
}
