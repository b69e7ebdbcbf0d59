//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! `cargo test --release --test acceptance`

mod common;

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sampling_diversity::analysis::{
    average_ber_exact, avg_ber_high_snr, ber_closed_form_from_diag, estimate_diversity_slope, fiedler_inverse_r11,
    hyp2f1_special, optimal_delays, trace_r_inverse_dense, trace_r_inverse_formula, zf_noise_covariance,
};
use sampling_diversity::detectors::{mlsd_viterbi, sequence_metric};
use sampling_diversity::harness::{
    emit_results, run_sweep, trace_set_profile, BerCurve, DelayMode, OutputFormat, SweepConfig, TRACE_SETS,
};
use sampling_diversity::model::{
    build_block_r, build_block_u, build_r_blocks, generate_channel, noise_covariance_diag,
    noise_variance_from_snr_db, simulate_received_async, DelayProfile, MatrixSet, SymbolFrame,
};

type Verdict = Result<String, String>;

struct Runner {
    failed: Vec<&'static str>,
}

impl Runner {
    fn check(&mut self, name: &'static str, budget: Duration, f: impl FnOnce() -> Verdict) {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(d) if took > budget => Err(format!("{d}; took {took:.2?}, budget {budget:?}")),
            other => other,
        };
        // straight to the handle so the lines survive libtest's capture
        let mut err = std::io::stderr();
        let _ = match outcome {
            Ok(detail) => writeln!(err, "PASS {name:<28} {detail} [{took:.2?}]"),
            Err(detail) => {
                self.failed.push(name);
                writeln!(err, "FAIL {name:<28} {detail} [{took:.2?}]")
            }
        };
    }
}

fn ensure(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}

fn gram_identity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let k = rng.random_range(1..=8);
        let n = rng.random_range(1..=16);
        let d = DelayProfile::random(&mut rng, k);
        let u = build_block_u(&d, n).map_err(|e| e.to_string())?;
        let w = noise_covariance_diag(&d, n);
        let scaled = DMatrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)] / w[i]);
        let gram = u.transpose() * scaled;
        worst = worst.max(max_abs_diff(&gram, &build_block_r(&d, n).map_err(|e| e.to_string())?));
    }
    ensure(worst <= 1e-10, format!("max entry deviation {worst:.2e} over 100 instances"))
}

fn lemma2() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let k = rng.random_range(2..=6);
        let n = rng.random_range(1..=32);
        let d = DelayProfile::random(&mut rng, k);
        let closed = trace_r_inverse_formula(&d, n).map_err(|e| e.to_string())?;
        let dense = trace_r_inverse_dense(&d, n).map_err(|e| e.to_string())?;
        worst = worst.max((closed - dense).abs() / dense);
    }
    ensure(worst <= 1e-8, format!("max relative error {worst:.2e} over 200 instances"))
}

fn table3() -> Verdict {
    let printed = [
        ([0.2505, 0.5010, 0.7514], "8.8404e4"),
        ([0.4, 0.6, 0.8], "9.6639e4"),
        ([0.1, 0.4, 0.7], "1.1065e5"),
        ([0.1, 0.2, 0.9], "1.7347e5"),
        ([0.01, 0.1, 0.9], "6.7784e5"),
    ];
    let mut bad = Vec::new();
    for (set, want) in printed {
        let t = trace_r_inverse_formula(&trace_set_profile(&set), 128).map_err(|e| e.to_string())?;
        let got = format!("{t:.4e}");
        if got != want {
            bad.push(format!("{set:?}: {got} vs {want}"));
        }
    }
    ensure(bad.is_empty(), if bad.is_empty() { "5 of 5 rows match at printed precision".into() } else { bad.join("; ") })
}

fn table1() -> Verdict {
    let printed = [(10, 0.5240), (32, 0.5077), (64, 0.5039), (128, 0.5019)];
    let mut worst: f64 = 0.0;
    for (n, want) in printed {
        let tau = optimal_delays(2, n).map_err(|e| e.to_string())?.profile.taus()[1];
        worst = worst.max((tau - want).abs());
    }
    let limit = optimal_delays(2, 1_000_000).map_err(|e| e.to_string())?.profile.taus()[1];
    ensure(
        worst <= 5e-4 && (limit - 0.5).abs() < 1e-3,
        format!("max deviation {worst:.2e}; tau(N=1e6) = {limit:.6}"),
    )
}

fn table2() -> Verdict {
    let printed: [(usize, &[f64]); 3] = [
        (4, &[0.2505, 0.5010, 0.7514]),
        (6, &[0.1669, 0.3338, 0.5006, 0.6675, 0.8344]),
        (8, &[0.1251, 0.2502, 0.3754, 0.5004, 0.6256, 0.7507, 0.8758]),
    ];
    let mut worst: f64 = 0.0;
    for (k, want) in printed {
        let opt = optimal_delays(k, 128).map_err(|e| e.to_string())?;
        for (got, w) in opt.profile.taus()[1..].iter().zip(want) {
            worst = worst.max((got - w).abs());
        }
    }
    ensure(worst <= 1e-3, format!("max per-entry deviation {worst:.2e}"))
}

fn mlsd_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let k = 2;
    let mut count = 0;
    let mut worst_metric: f64 = 0.0;
    for n in [2usize, 3, 4] {
        for i in 0..500 {
            let idle = i % 2 == 1;
            let d = DelayProfile::random(&mut rng, k);
            let mats = MatrixSet::new(&d, n).map_err(|e| e.to_string())?;
            let h = generate_channel(&mut rng, k, 1);
            let b = SymbolFrame::random(&mut rng, n, k, idle);
            let s2 = noise_variance_from_snr_db([0.0, 5.0, 10.0][i % 3]);
            let y = simulate_received_async(&mats, &h, &b, s2, &mut rng).map_err(|e| e.to_string())?;
            let got = mlsd_viterbi(&y, &h, &d, s2, idle).map_err(|e| e.to_string())?;

            let free = if idle { (n - 1) * k } else { n * k };
            let mut best: Option<(f64, SymbolFrame)> = None;
            for bits in 0..1u32 << free {
                let mut symbols: Vec<i8> = (0..free).map(|j| if bits >> j & 1 == 1 { -1 } else { 1 }).collect();
                symbols.resize(n * k, 0);
                let frame = SymbolFrame::new(n, k, symbols, idle).map_err(|e| e.to_string())?;
                let m = sequence_metric(&y, &h, &d, s2, &frame).map_err(|e| e.to_string())?;
                if best.as_ref().is_none_or(|(bm, _)| m < *bm) {
                    best = Some((m, frame));
                }
            }
            let (best_metric, best_frame) = best.expect("at least one hypothesis");
            if got.decisions != best_frame {
                return Err(format!("N={n} instance {i}: decisions differ from exhaustive search"));
            }
            let metric = got.metric.expect("mlsd reports its metric");
            worst_metric = worst_metric.max((metric - best_metric).abs() / best_metric.abs().max(1.0));
            count += 1;
        }
    }
    ensure(
        worst_metric <= 1e-9,
        format!("{count} instances agree; worst metric deviation {worst_metric:.1e}"),
    )
}

fn appendix_a() -> Verdict {
    let mut worst_closed: f64 = 0.0;
    for i in 0..20 {
        let d0 = 10f64.powf(-2.0 + 6.0 * i as f64 / 19.0);
        let p = ber_closed_form_from_diag(1.0, 1, d0).map_err(|e| e.to_string())?;
        let want = 0.5 * (1.0 - (d0 / (1.0 + d0)).sqrt());
        worst_closed = worst_closed.max((p - want).abs());
    }
    let mut worst_quad: f64 = 0.0;
    for r in [0.5, 1.0, 4.0] {
        for d0 in [0.1, 1.0, 10.0, 100.0, 1000.0] {
            let p = ber_closed_form_from_diag(r, 1, d0).map_err(|e| e.to_string())?;
            worst_quad = worst_quad.max((p - common::rayleigh_ber_quadrature(r, 1, d0)).abs());
        }
    }
    let mut worst_2f1: f64 = 0.0;
    for m in [1, 2, 4] {
        for x in [0.1, 0.5, 0.9, 0.99] {
            let v = hyp2f1_special(m, x).map_err(|e| e.to_string())?;
            worst_2f1 = worst_2f1.max((v / common::hyp2f1_euler(m, x) - 1.0).abs());
        }
    }
    ensure(
        worst_closed <= 1e-10 && worst_quad <= 1e-8 && worst_2f1 <= 1e-10,
        format!(
            "rayleigh closed form {worst_closed:.1e}, quadrature {worst_quad:.1e}, 2F1 euler rel {worst_2f1:.1e}"
        ),
    )
}

fn appendix_b() -> Verdict {
    let d = DelayProfile::uniform(2);
    let mut ratios = Vec::new();
    for m in [1, 2] {
        let approx = avg_ber_high_snr(&d, 8, m, 1e6).map_err(|e| e.to_string())?;
        let exact = average_ber_exact(&d, 8, m, 1e6).map_err(|e| e.to_string())?;
        ratios.push(approx / exact);
    }
    ensure(
        ratios.iter().all(|r| (0.98..=1.02).contains(r)),
        format!("approx/exact = {:.5} (M=1), {:.5} (M=2)", ratios[0], ratios[1]),
    )
}

fn appendix_c() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut worst_fiedler: f64 = 0.0;
    for _ in 0..200 {
        let k = rng.random_range(1..=8);
        let d = DelayProfile::random(&mut rng, k);
        let prod = fiedler_inverse_r11(&d) * build_r_blocks(&d).r11;
        worst_fiedler = worst_fiedler.max(max_abs_diff(&prod, &DMatrix::identity(k, k)));
    }
    let mut worst_row: f64 = 0.0;
    for _ in 0..100 {
        let tau: f64 = rng.random_range(0.01..0.99);
        let n = rng.random_range(1..=16);
        let d = DelayProfile::new(vec![0.0, tau]).map_err(|e| e.to_string())?;
        let inv = build_block_r(&d, n)
            .map_err(|e| e.to_string())?
            .try_inverse()
            .ok_or("R is singular")?;
        let denom = tau * (n as f64 + 1.0 - tau);
        for i in 1..=n {
            let fi = i as f64;
            worst_row = worst_row
                .max((inv[(2 * n - 1, 2 * i - 2)] - (tau - fi) / denom).abs())
                .max((inv[(2 * n - 1, 2 * i - 1)] - fi / denom).abs());
        }
    }
    ensure(
        worst_fiedler <= 1e-10 && worst_row <= 1e-9,
        format!("fiedler {worst_fiedler:.1e}, K=2 last row {worst_row:.1e}"),
    )
}

fn curve<'a>(curves: &'a [BerCurve], name: &str) -> &'a BerCurve {
    curves.iter().find(|c| c.detector == name).expect("curve present")
}

fn diversity_slopes() -> Verdict {
    let cfg = SweepConfig {
        seed: 2024,
        users: 2,
        frame_len: 16,
        antennas: 2,
        snr_db: vec![15.0, 17.5, 20.0, 22.5, 25.0],
        detectors: vec!["zf".into(), "sync-zf".into()],
        frames_per_point: 1_000_000,
        stop_errors: Some(200),
        ..SweepConfig::default()
    };
    let result = run_sweep(&cfg, None).map_err(|e| e.to_string())?;
    let zf = estimate_diversity_slope(curve(&result.curves, "zf"), (15.0, 25.0)).map_err(|e| e.to_string())?;
    let sync = estimate_diversity_slope(curve(&result.curves, "sync-zf"), (15.0, 25.0)).map_err(|e| e.to_string())?;
    ensure(
        (1.7..=2.3).contains(&zf) && (0.8..=1.2).contains(&sync),
        format!("async zf {zf:.3} (want 1.7..2.3), sync zf {sync:.3} (want 0.8..1.2)"),
    )
}

fn orderings_8db() -> Verdict {
    let cfg = SweepConfig {
        seed: 2024,
        users: 2,
        frame_len: 128,
        antennas: 1,
        snr_db: vec![8.0],
        detectors: ["mlsd", "sync-ml", "fb-bp", "sic-fw", "sic-bw"].map(String::from).to_vec(),
        frames_per_point: 10_000,
        stop_errors: None,
        ..SweepConfig::default()
    };
    let result = run_sweep(&cfg, None).map_err(|e| e.to_string())?;
    let at = |name: &str| curve(&result.curves, name).point_at(8.0).expect("8 dB point").clone();
    let (mlsd, sync, fb, fw, bw) = (at("mlsd"), at("sync-ml"), at("fb-bp"), at("sic-fw"), at("sic-bw"));
    ensure(
        mlsd.frames >= 10_000
            && mlsd.separated_below(&sync)
            && fb.separated_below(&fw)
            && fb.separated_below(&bw),
        format!(
            "mlsd {:.4e} vs sync-ml {:.4e}; fb-bp {:.4e} vs sic-fw {:.4e}, sic-bw {:.4e}",
            mlsd.ber, sync.ber, fb.ber, fw.ber, bw.ber
        ),
    )
}

fn fig5_ordering() -> Verdict {
    let base = SweepConfig {
        seed: 2024,
        users: 4,
        frame_len: 128,
        antennas: 1,
        snr_db: vec![20.0],
        detectors: vec!["zf".into()],
        frames_per_point: 2000,
        stop_errors: None,
        ..SweepConfig::default()
    };
    let ber_of = |delays: DelayMode| -> Result<f64, String> {
        let cfg = SweepConfig { delays, ..base.clone() };
        let result = run_sweep(&cfg, None).map_err(|e| e.to_string())?;
        Ok(result.curves[0].points[0].ber)
    };
    let mut rows = Vec::new();
    for (set, _) in TRACE_SETS {
        let d = trace_set_profile(&set);
        let trace = trace_r_inverse_formula(&d, 128).map_err(|e| e.to_string())?;
        rows.push((trace, ber_of(DelayMode::Explicit(d))?));
    }
    let random = ber_of(DelayMode::Random)?;
    let mut by_trace = rows.clone();
    by_trace.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut by_ber = rows.clone();
    by_ber.sort_by(|a, b| a.1.total_cmp(&b.1));
    let bers: Vec<String> = by_trace.iter().map(|r| format!("{:.4}", r.1)).collect();
    let (best, worst) = (by_trace[0].1, by_trace[by_trace.len() - 1].1);
    ensure(
        by_trace == by_ber && random > best && random < worst,
        format!("ber by ascending trace [{}], random {random:.4}", bers.join(", ")),
    )
}

fn large_m() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let (k, m, n) = (2, 200, 16);
    let d = DelayProfile::uniform(k);
    let mut total = 0.0;
    for _ in 0..50 {
        let h = generate_channel(&mut rng, k, m);
        let cov = zf_noise_covariance(&h, &d, n, 1.0).map_err(|e| e.to_string())?;
        let scaled = cov * Complex64::new(m as f64, 0.0);
        let mut off: f64 = 0.0;
        for i in 0..scaled.nrows() {
            for j in 0..scaled.ncols() {
                if i != j {
                    off = off.max(scaled[(i, j)].norm());
                }
            }
        }
        total += off;
    }
    let avg = total / 50.0;
    ensure(avg < 0.15, format!("mean max off-diagonal of M*COV/sigma^2 = {avg:.4}"))
}

fn determinism() -> Verdict {
    let cfg = SweepConfig {
        seed: 99,
        users: 2,
        frame_len: 32,
        antennas: 1,
        snr_db: vec![0.0, 5.0, 10.0],
        detectors: ["mlsd", "sic-fw", "sic-bw", "bp-fw", "bp-bw", "fb-bp", "zf", "sync-ml", "single-user"]
            .map(String::from)
            .to_vec(),
        frames_per_point: 400,
        stop_errors: Some(50),
        ..SweepConfig::default()
    };
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = Vec::new();
    for threads in [1, 8] {
        let result = run_sweep(&cfg, Some(threads)).map_err(|e| e.to_string())?;
        for (format, ext) in [(OutputFormat::Csv, "csv"), (OutputFormat::Json, "json")] {
            let path = dir.path().join(format!("t{threads}.{ext}"));
            emit_results(&result, &path, format).map_err(|e| e.to_string())?;
            files.push(std::fs::read(&path).map_err(|e| e.to_string())?);
        }
    }
    ensure(
        files[0] == files[2] && files[1] == files[3],
        format!("csv {} bytes, json {} bytes identical at 1 and 8 threads", files[0].len(), files[1].len()),
    )
}

#[test]
fn acceptance() {
    let mut r = Runner { failed: Vec::new() };
    let s = Duration::from_secs;
    r.check("gram identity", s(1), gram_identity);
    r.check("lemma 2 trace", s(10), lemma2);
    r.check("table III", s(1), table3);
    r.check("table I", s(1), table1);
    r.check("table II", s(1), table2);
    r.check("mlsd oracle", s(30), mlsd_oracle);
    r.check("closed-form ber", s(5), appendix_a);
    r.check("high-snr consistency", s(1), appendix_b);
    r.check("fiedler and last row", s(5), appendix_c);
    r.check("diversity slopes", s(600), diversity_slopes);
    r.check("orderings at 8 dB", s(600), orderings_8db);
    r.check("delay-set ordering", s(600), fig5_ordering);
    r.check("large-M covariance", s(30), large_m);
    r.check("determinism", s(60), determinism);
    assert!(r.failed.is_empty(), "failed: {:?}", r.failed);
}
