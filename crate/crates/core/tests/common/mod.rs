//! Numerical oracles shared by the integration tests.

#![allow(dead_code)]

use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

/// Adaptive Simpson on `[a, b]` to absolute tolerance `tol`, started from
/// equal panels so narrow features are not missed.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let diff = left + right - whole;
        // roundoff floor keeps the recursion finite
        if depth == 0 || diff.abs() <= 15.0 * tol.max(1e-13 * whole.abs()) {
            left + right + diff / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let panels = 64;
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let (lo, hi) = (a + h * i as f64, a + h * (i + 1) as f64);
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            step(f, lo, hi, fa, fm, fb, simpson(fa, fm, fb, hi - lo), tol / panels as f64, 30)
        })
        .sum()
}

/// `E[Q(√(2 c X))]` with `X ~ Gamma(M, 1)` and `c = δ₀ / R⁻¹(i,i)`, by
/// quadrature after `x = v²`.
pub fn rayleigh_ber_quadrature(r_ii: f64, antennas: u32, delta0: f64) -> f64 {
    let c = delta0 / r_ii;
    let m = f64::from(antennas);
    let log_norm = ln_gamma(m);
    let f = |v: f64| {
        if v == 0.0 {
            return 0.0;
        }
        let x = v * v;
        0.5 * erfc((c * x).sqrt()) * ((m - 1.0) * x.ln() - x - log_norm).exp() * 2.0 * v
    };
    adaptive_simpson(&f, 0.0, 8.0, 1e-13)
}

/// `₂F₁(1, M+½; M+1; x)` from the Euler integral with `t = 1 - u²`.
pub fn hyp2f1_euler(antennas: u32, x: f64) -> f64 {
    let m = f64::from(antennas);
    let pre = (ln_gamma(m + 1.0) - ln_gamma(m + 0.5) - ln_gamma(0.5)).exp();
    let f = |u: f64| {
        let w = 1.0 - u * u;
        2.0 * w.powf(m - 0.5) / (1.0 - x * w)
    };
    pre * adaptive_simpson(&f, 0.0, 1.0, 1e-13)
}
