//! Forward/backward belief propagation.
//!
//! Each pass walks the samples in the same order as SIC, but instead of
//! cancelling hard decisions it marginalises the already-visited symbols in
//! the current sample under their pass posteriors (treated as independent).
//! The interference term at `y_l(j)` holds up to `K-1` such symbols, so each
//! step costs `2^(K-1)` Gaussian evaluations per antenna. Everything is kept as
//! log-odds `ln P(+1)/P(-1)`; the combined metric multiplies the two passes,
//! which adds their log-odds.

use num_complex::Complex64;

use super::schedule::{involved, schedule, Direction};
use super::{async_frame_len, check_blocks, DetectionResult};
use crate::error::{Error, Result};
use crate::model::{ChannelRealization, DelayProfile, SampleBlock, SamplingMethod, SymbolFrame};

/// Per-symbol posteriors `P(b = +1)` in frame order.
#[derive(Debug, Clone, PartialEq)]
pub struct BpPosteriors {
    pub slots: usize,
    pub users: usize,
    pub idle_tail: bool,
    pub forward: Vec<f64>,
    pub backward: Vec<f64>,
    /// Normalised product of the two passes.
    pub combined: Vec<f64>,
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn logsumexp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

struct Problem<'a> {
    samples: &'a [SampleBlock],
    h: &'a ChannelRealization,
    gaps: &'a [f64],
    noise_variance: f64,
    slots: usize,
    users: usize,
    idle_tail: bool,
}

impl<'a> Problem<'a> {
    fn new(
        samples: &'a [SampleBlock],
        h: &'a ChannelRealization,
        delays: &'a DelayProfile,
        noise_variance: f64,
        idle_tail: bool,
    ) -> Result<Self> {
        let users = delays.users();
        if h.users() != users {
            return Err(Error::Dimension(format!(
                "channel has {} users, delays describe {users}",
                h.users()
            )));
        }
        if users > 17 {
            return Err(Error::Unsupported(format!("belief propagation with K={users}")));
        }
        if !(noise_variance > 0.0) {
            return Err(Error::Unsupported(format!(
                "densities need a positive noise variance, got {noise_variance}"
            )));
        }
        let slots = async_frame_len(samples, users)?;
        check_blocks(samples, h, SamplingMethod::Async, (slots + 1) * users)?;
        Ok(Self {
            samples,
            h,
            gaps: delays.gaps(),
            noise_variance,
            slots,
            users,
            idle_tail,
        })
    }

    fn idle(&self, slot: usize) -> bool {
        self.idle_tail && slot + 1 == self.slots
    }

    /// Symbols other than the exposed one that carry data in sample `(slot, l)`.
    fn interferers(&self, slot: usize, l: usize, exposed: (usize, usize)) -> Vec<(usize, usize)> {
        involved(self.slots, self.users, slot, l)
            .filter(|&s| s != exposed && !self.idle(s.0))
            .collect()
    }

    /// `-Σ_m |y_m - g(h_e v + Σ h_i c_i)|² / (g σ²)` for hypothesis `v` and
    /// interferer pattern `pattern` (bit `i` set means `c_i = -1`).
    fn log_density(&self, slot: usize, l: usize, exposed: usize, v: f64, others: &[(usize, usize)], pattern: usize) -> f64 {
        let g = self.gaps[l];
        let mut total = 0.0;
        for (m, block) in self.samples.iter().enumerate() {
            let mut mean = self.h.gain(exposed, m) * v;
            for (i, &(_, u)) in others.iter().enumerate() {
                let c = if (pattern >> i) & 1 == 1 { -1.0 } else { 1.0 };
                mean += self.h.gain(u, m) * c;
            }
            let r: Complex64 = block.y[slot * self.users + l] - mean * g;
            total += r.norm_sqr();
        }
        -total / (g * self.noise_variance)
    }

    /// Log-odds of every symbol after one pass. Idle symbols stay at 0.
    fn pass(&self, direction: Direction) -> Vec<f64> {
        let k = self.users;
        let mut log_odds = vec![0.0f64; self.slots * k];
        for step in schedule(direction, self.slots, k) {
            let (es, eu) = step.exposes;
            if self.idle(es) {
                continue;
            }
            let others = self.interferers(step.slot, step.user, step.exposes);
            let mut lik = [f64::NEG_INFINITY; 2];
            for pattern in 0..1usize << others.len() {
                let mut prior = 0.0;
                for (i, &(s, u)) in others.iter().enumerate() {
                    let lo = log_odds[s * k + u];
                    // ln P(+1) = -softplus(-lo), ln P(-1) = -softplus(lo)
                    prior -= if (pattern >> i) & 1 == 1 { softplus(lo) } else { softplus(-lo) };
                }
                for (slot, v) in [1.0, -1.0].into_iter().enumerate() {
                    let t = prior + self.log_density(step.slot, step.user, eu, v, &others, pattern);
                    lik[slot] = logsumexp(lik[slot], t);
                }
            }
            log_odds[es * k + eu] = lik[0] - lik[1];
        }
        log_odds
    }

    fn probabilities(&self, log_odds: &[f64]) -> Vec<f64> {
        log_odds
            .iter()
            .enumerate()
            .map(|(i, &lo)| if self.idle(i / self.users) { 0.5 } else { sigmoid(lo) })
            .collect()
    }
}

/// Runs both passes and combines them.
pub fn bp_posteriors(
    samples: &[SampleBlock],
    h: &ChannelRealization,
    delays: &DelayProfile,
    noise_variance: f64,
    idle_tail: bool,
) -> Result<BpPosteriors> {
    let p = Problem::new(samples, h, delays, noise_variance, idle_tail)?;
    let fw = p.pass(Direction::Forward);
    let bw = p.pass(Direction::Backward);
    let sum: Vec<f64> = fw.iter().zip(&bw).map(|(a, b)| a + b).collect();
    Ok(BpPosteriors {
        slots: p.slots,
        users: p.users,
        idle_tail,
        forward: p.probabilities(&fw),
        backward: p.probabilities(&bw),
        combined: p.probabilities(&sum),
    })
}

/// Same recursion evaluated with plain probabilities and densities. Only
/// usable where nothing underflows; kept as a cross-check.
pub fn bp_posteriors_linear(
    samples: &[SampleBlock],
    h: &ChannelRealization,
    delays: &DelayProfile,
    noise_variance: f64,
    idle_tail: bool,
) -> Result<BpPosteriors> {
    let p = Problem::new(samples, h, delays, noise_variance, idle_tail)?;
    let k = p.users;
    let run = |direction: Direction| -> Vec<f64> {
        let mut plus = vec![0.5f64; p.slots * k];
        for step in schedule(direction, p.slots, k) {
            let (es, eu) = step.exposes;
            if p.idle(es) {
                continue;
            }
            let others = p.interferers(step.slot, step.user, step.exposes);
            let (mut a, mut b) = (0.0, 0.0);
            for pattern in 0..1usize << others.len() {
                let mut prior = 1.0;
                for (i, &(s, u)) in others.iter().enumerate() {
                    let q = plus[s * k + u];
                    prior *= if (pattern >> i) & 1 == 1 { 1.0 - q } else { q };
                }
                a += prior * p.log_density(step.slot, step.user, eu, 1.0, &others, pattern).exp();
                b += prior * p.log_density(step.slot, step.user, eu, -1.0, &others, pattern).exp();
            }
            plus[es * k + eu] = a / (a + b);
        }
        plus
    };
    let forward = run(Direction::Forward);
    let backward = run(Direction::Backward);
    let combined = forward
        .iter()
        .zip(&backward)
        .enumerate()
        .map(|(i, (f, b))| {
            if p.idle(i / k) {
                0.5
            } else {
                f * b / (f * b + (1.0 - f) * (1.0 - b))
            }
        })
        .collect();
    let idle = |v: Vec<f64>| -> Vec<f64> {
        v.into_iter()
            .enumerate()
            .map(|(i, q)| if p.idle(i / k) { 0.5 } else { q })
            .collect()
    };
    Ok(BpPosteriors {
        slots: p.slots,
        users: k,
        idle_tail,
        forward: idle(forward),
        backward: idle(backward),
        combined,
    })
}

/// Hard decisions (ties to `+1`) from one posterior set.
pub(crate) fn decide(name: &str, plus: &[f64], post: &BpPosteriors) -> DetectionResult {
    let k = post.users;
    let symbols = plus
        .iter()
        .enumerate()
        .map(|(i, &q)| {
            if post.idle_tail && i / k + 1 == post.slots {
                0
            } else if q >= 0.5 {
                1
            } else {
                -1
            }
        })
        .collect();
    DetectionResult {
        detector: name.to_string(),
        decisions: SymbolFrame::new(post.slots, k, symbols, post.idle_tail)
            .expect("decisions respect the frame shape"),
        soft: Some(plus.to_vec()),
        metric: None,
    }
}

/// Combined forward/backward detector.
pub fn fb_belief_propagation(
    samples: &[SampleBlock],
    h: &ChannelRealization,
    delays: &DelayProfile,
    noise_variance: f64,
    idle_tail: bool,
) -> Result<DetectionResult> {
    let post = bp_posteriors(samples, h, delays, noise_variance, idle_tail)?;
    Ok(decide("fb-bp", &post.combined, &post))
}
