//! `₂F₁(1, M+½; M+1; x)` on `[0, 1)`.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Series terms are summed until the next one drops below this.
pub const SERIES_TOL: f64 = 1e-13;
/// Hard cap on series terms.
pub const SERIES_CAP: usize = 100_000;
/// Above this argument [`hyp2f1_special`] uses the `1 - x` expansion.
pub const SWITCH_X: f64 = 0.95;

fn check(m: u32, x: f64) -> Result<()> {
    if m == 0 {
        return Err(Error::Unsupported("hypergeometric order M must be at least 1".into()));
    }
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Unsupported(format!("argument {x} outside [0, 1)")));
    }
    Ok(())
}

/// Plain power series with the term recurrence
/// `t_{n+1} = t_n · (M+½+n)/(M+1+n) · x`.
pub fn hyp2f1_series(m: u32, x: f64) -> Result<f64> {
    check(m, x)?;
    let b = f64::from(m) + 0.5;
    let c = f64::from(m) + 1.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..SERIES_CAP {
        let nf = n as f64;
        term *= (b + nf) / (c + nf) * x;
        sum += term;
        if term < SERIES_TOL {
            return Ok(sum);
        }
    }
    Err(Error::NoConvergence {
        terms: SERIES_CAP,
        partial: sum,
    })
}

/// Same function through the `1 - x` connection formula (here `c - a - b = -½`):
/// `₂F₁ = -2M · ₂F₁(1, M+½; 3/2; 1-x) + √π Γ(M+1)/Γ(M+½) · x^{-M} (1-x)^{-½}`.
/// The remaining series converges fast for `x` near 1.
fn hyp2f1_near_one(m: u32, x: f64) -> Result<f64> {
    let mf = f64::from(m);
    let z = 1.0 - x;
    let b = mf + 0.5;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut n = 0usize;
    loop {
        let nf = n as f64;
        term *= (b + nf) / (1.5 + nf) * z;
        sum += term;
        n += 1;
        if term.abs() < SERIES_TOL * sum.abs() {
            break;
        }
        if n >= SERIES_CAP {
            return Err(Error::NoConvergence { terms: n, partial: sum });
        }
    }
    let log_ratio = ln_gamma(mf + 1.0) - ln_gamma(mf + 0.5);
    let singular = (0.5 * std::f64::consts::PI.ln() + log_ratio - mf * x.ln() - 0.5 * z.ln()).exp();
    Ok(singular - 2.0 * mf * sum)
}

/// `₂F₁(1, M+½; M+1; x)`, by power series below [`SWITCH_X`] and by the
/// connection formula above it.
pub fn hyp2f1_special(m: u32, x: f64) -> Result<f64> {
    check(m, x)?;
    if x > SWITCH_X {
        hyp2f1_near_one(m, x)
    } else {
        hyp2f1_series(m, x)
    }
}
