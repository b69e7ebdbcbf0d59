//! Delay profiles minimising `trace(R⁻¹)`.
//!
//! With the inner delays spaced evenly, `τ_i = (i-1)/(K-1) · τ_K`, the
//! stationarity condition in `τ_K` is the quartic
//! `A τ⁴ + B τ³ + C τ² + D τ + E = 0`. For two users `A = 0` and the cubic
//! has a closed-form root.

use serde::{Deserialize, Serialize};

use super::trace::trace_r_inverse_formula;
use crate::error::{Error, Result};
use crate::model::DelayProfile;

/// Grid step of the sign-change scan over `(0, 1)`.
pub const SCAN_STEP: f64 = 1e-3;
/// Width at which a bracketed root is accepted.
pub const ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuarticCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
}

impl QuarticCoefficients {
    pub fn new(users: usize, frame_len: usize) -> Self {
        let n = frame_len as f64;
        let q = ((users as f64) - 1.0).powi(2);
        let one_minus = 1.0 - q;
        Self {
            a: one_minus * (n + 2.0) / 3.0,
            b: -2.0 / 3.0 * one_minus * n * n + 2.0 * (4.0 * q - 1.0) * (n + 1.0) / 3.0,
            c: one_minus * n.powi(3) / 3.0 + 2.0 / 3.0 * (1.0 - 4.0 * q) * n * n - 2.0 * q * (3.0 * n + 2.0),
            d: 2.0 / 3.0 * q * (n.powi(3) + 5.0 * n * n + 8.0 * n + 4.0),
            e: -q / 3.0 * (n.powi(3) + 4.0 * n * n + 5.0 * n + 2.0),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        (((self.a * t + self.b) * t + self.c) * t + self.d) * t + self.e
    }

    fn derivative(&self, t: f64) -> f64 {
        ((4.0 * self.a * t + 3.0 * self.b) * t + 2.0 * self.c) * t + self.d
    }

    /// Every root in `(0, 1)` found by a [`SCAN_STEP`] sign scan, bisection
    /// to [`ROOT_TOL`] and one guarded Newton step.
    pub fn roots_in_unit_interval(&self) -> Vec<f64> {
        let steps = (1.0 / SCAN_STEP).round() as usize;
        let mut roots = Vec::new();
        let mut lo = SCAN_STEP * 1e-3;
        let mut f_lo = self.eval(lo);
        for i in 1..=steps {
            let hi = if i == steps { 1.0 - SCAN_STEP * 1e-3 } else { i as f64 * SCAN_STEP };
            let f_hi = self.eval(hi);
            if f_lo == 0.0 {
                roots.push(lo);
            } else if f_lo.signum() != f_hi.signum() && f_hi != 0.0 {
                roots.push(self.bisect(lo, hi, f_lo));
            }
            lo = hi;
            f_lo = f_hi;
        }
        roots
    }

    fn bisect(&self, mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
        let s = f_lo.signum();
        while hi - lo > ROOT_TOL {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid).signum() == s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mid = 0.5 * (lo + hi);
        let slope = self.derivative(mid);
        if slope != 0.0 {
            let polished = mid - self.eval(mid) / slope;
            if (lo..=hi).contains(&polished) {
                return polished;
            }
        }
        mid
    }
}

/// Two-user optimum `τ = (N + 2 - ∛(N³ + 1.5N² - 1.5N - 1)) / 3`.
pub fn optimal_tau_two_users(frame_len: usize) -> f64 {
    let n = frame_len as f64;
    (n + 2.0 - (n.powi(3) + 1.5 * n * n - 1.5 * n - 1.0).cbrt()) / 3.0
}

/// Evenly spaced profile `τ_i = (i-1)/(K-1) · τ_K`.
pub fn profile_from_last(users: usize, tau_last: f64) -> Result<DelayProfile> {
    if users < 2 {
        return Err(Error::Unsupported("a last delay needs at least two users".into()));
    }
    let step = tau_last / (users - 1) as f64;
    let mut taus: Vec<f64> = (0..users).map(|i| i as f64 * step).collect();
    taus[users - 1] = tau_last;
    DelayProfile::new(taus)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalDelays {
    pub profile: DelayProfile,
    pub trace: f64,
    /// All quartic roots found in `(0, 1)`; empty for the closed-form case.
    pub roots: Vec<f64>,
    /// Set when several roots were found and the lowest-trace one was kept.
    pub diagnostic: Option<String>,
}

fn check_local_minimum(profile: &DelayProfile, frame_len: usize, trace: f64) -> Result<()> {
    let taus = profile.taus();
    let h = 1e-6;
    for i in 1..taus.len() {
        for sign in [-1.0, 1.0] {
            let mut moved = taus.to_vec();
            moved[i] += sign * h;
            let Ok(p) = DelayProfile::new(moved) else {
                continue;
            };
            let t = trace_r_inverse_formula(&p, frame_len)?;
            if t < trace - 1e-9 * trace {
                return Err(Error::RootIsolation {
                    message: format!("stationary point is not a minimum: moving τ_{} lowers the trace", i + 1),
                    roots: vec![taus[taus.len() - 1]],
                });
            }
        }
    }
    Ok(())
}

/// Delay profile minimising `trace(R⁻¹)` for `K` users and frame length `N`.
pub fn optimal_delays(users: usize, frame_len: usize) -> Result<OptimalDelays> {
    if users < 2 {
        return Err(Error::Unsupported("optimal delays need at least two users".into()));
    }
    if frame_len == 0 {
        return Err(Error::Dimension("frame length must be at least 1".into()));
    }
    let (profile, roots, diagnostic) = if users == 2 {
        (profile_from_last(2, optimal_tau_two_users(frame_len))?, Vec::new(), None)
    } else {
        let roots = QuarticCoefficients::new(users, frame_len).roots_in_unit_interval();
        if roots.is_empty() {
            return Err(Error::RootIsolation {
                message: format!("no root in (0, 1) for K={users} N={frame_len}"),
                roots,
            });
        }
        let mut best: Option<(f64, DelayProfile)> = None;
        for &r in &roots {
            let p = profile_from_last(users, r)?;
            let t = trace_r_inverse_formula(&p, frame_len)?;
            if best.as_ref().is_none_or(|(bt, _)| t < *bt) {
                best = Some((t, p));
            }
        }
        let diagnostic = (roots.len() > 1).then(|| {
            format!(
                "{} roots in (0, 1): {:?}; kept the one with the lowest trace",
                roots.len(),
                roots
            )
        });
        (best.expect("at least one root").1, roots, diagnostic)
    };
    let trace = trace_r_inverse_formula(&profile, frame_len)?;
    check_local_minimum(&profile, frame_len, trace)?;
    Ok(OptimalDelays {
        profile,
        trace,
        roots,
        diagnostic,
    })
}
