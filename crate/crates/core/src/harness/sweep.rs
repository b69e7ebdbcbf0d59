//! Seeded, parallel Monte-Carlo BER sweeps.
//!
//! Every frame draws its randomness from ChaCha8 streams keyed by
//! `(seed, point, frame, purpose)`, so a frame's outcome does not depend on
//! which thread runs it or on which other detectors are enabled. Frames run
//! in fixed batches of [`BATCH`]; early stopping is decided between batches,
//! which keeps the counted frames independent of the thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{DelayMode, SweepConfig, SINGLE_USER};
use super::curve::{BerCurve, BerPoint};
use crate::analysis::optimal_delays;
use crate::detectors::{detector_by_name, mlsd_viterbi, Detector, DetectorInput};
use crate::error::{Error, Result};
use crate::model::{
    generate_channel, noise_variance_from_snr_db, simulate_received_async, simulate_received_sync,
    ChannelRealization, DelayProfile, MatrixSet, SamplingMethod, SymbolFrame,
};

/// Frames per scheduling batch.
pub const BATCH: u64 = 64;
/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "SAMPLING_DIVERSITY_THREADS";

#[derive(Debug, Clone, Copy)]
#[repr(u64)]
enum Stream {
    Data = 1,
    AsyncNoise = 2,
    SyncNoise = 3,
    SingleUserNoise = 4,
    Delays = 5,
}

fn stream(seed: u64, point: usize, frame: u64, purpose: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((point as u64) << 48) ^ (frame << 8) ^ purpose as u64);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub curves: Vec<BerCurve>,
}

enum Entry {
    Real(Box<dyn Detector>),
    SingleUser,
}

impl Entry {
    fn sampling(&self) -> SamplingMethod {
        match self {
            Entry::Real(d) => d.sampling(),
            Entry::SingleUser => SamplingMethod::Async,
        }
    }
}

/// Worker count: explicit value, else [`THREADS_ENV`], else rayon's default.
pub fn resolve_threads(threads: Option<usize>) -> Result<usize> {
    if let Some(t) = threads {
        return if t == 0 {
            Err(Error::Config("thread count must be at least 1".into()))
        } else {
            Ok(t)
        };
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| Error::Config(format!("{THREADS_ENV}=`{v}` is not a positive integer"))),
        Err(_) => Ok(rayon::current_num_threads()),
    }
}

struct Frame<'a> {
    cfg: &'a SweepConfig,
    entries: &'a [Entry],
    fixed: Option<&'a MatrixSet>,
    single: &'a MatrixSet,
}

/// Per-detector outcome of one frame: error count or failure message.
type Outcome = Vec<std::result::Result<u64, String>>;

impl Frame<'_> {
    fn run(&self, point: usize, frame: u64, active: &[bool]) -> Outcome {
        let cfg = self.cfg;
        let k = cfg.users;
        let sigma2 = noise_variance_from_snr_db(cfg.snr_db[point]);
        let mut rng = stream(cfg.seed, point, frame, Stream::Data);
        let h = generate_channel(&mut rng, k, cfg.antennas);
        let b = SymbolFrame::random(&mut rng, cfg.frame_len, k, cfg.idle_tail);

        let random_mats;
        let mats = match self.fixed {
            Some(m) => m,
            None => {
                let mut r = stream(cfg.seed, point, frame, Stream::Delays);
                random_mats = MatrixSet::new(&DelayProfile::random(&mut r, k), cfg.frame_len)
                    .expect("frame length validated");
                &random_mats
            }
        };
        let wants = |m: SamplingMethod| {
            self.entries
                .iter()
                .zip(active)
                .any(|(e, &a)| a && e.sampling() == m && !matches!(e, Entry::SingleUser))
        };
        let async_samples = if wants(SamplingMethod::Async) {
            let mut r = stream(cfg.seed, point, frame, Stream::AsyncNoise);
            simulate_received_async(mats, &h, &b, sigma2, &mut r).expect("dimensions agree")
        } else {
            Vec::new()
        };
        let sync_samples = if wants(SamplingMethod::Sync) {
            let mut r = stream(cfg.seed, point, frame, Stream::SyncNoise);
            simulate_received_sync(&h, &b, sigma2, &mut r).expect("dimensions agree")
        } else {
            Vec::new()
        };
        let input = DetectorInput {
            async_samples: &async_samples,
            sync_samples: &sync_samples,
            channel: &h,
            matrices: mats,
            noise_variance: sigma2,
            idle_tail: cfg.idle_tail,
        };
        self.entries
            .iter()
            .zip(active)
            .map(|(e, &a)| {
                if !a {
                    return Ok(0);
                }
                match e {
                    Entry::Real(d) => d
                        .detect(&input)
                        .map(|out| b.bit_errors(&out.decisions))
                        .map_err(|e| e.to_string()),
                    Entry::SingleUser => self.single_user(point, frame, &h, &b, sigma2),
                }
            })
            .collect()
    }

    /// Each user alone on the channel, detected by one-user MLSD.
    fn single_user(
        &self,
        point: usize,
        frame: u64,
        h: &ChannelRealization,
        b: &SymbolFrame,
        sigma2: f64,
    ) -> std::result::Result<u64, String> {
        let cfg = self.cfg;
        let mut rng = stream(cfg.seed, point, frame, Stream::SingleUserNoise);
        let mut errors = 0;
        for user in 0..cfg.users {
            let gains: Vec<_> = (0..cfg.antennas).map(|m| h.gain(user, m)).collect();
            let hu = ChannelRealization::new(1, cfg.antennas, gains).map_err(|e| e.to_string())?;
            let column: Vec<i8> = (0..cfg.frame_len).map(|s| b.get(s, user)).collect();
            let bu = SymbolFrame::new(cfg.frame_len, 1, column, cfg.idle_tail).map_err(|e| e.to_string())?;
            let y = simulate_received_async(self.single, &hu, &bu, sigma2, &mut rng).map_err(|e| e.to_string())?;
            let out = mlsd_viterbi(&y, &hu, &self.single.delays, sigma2, cfg.idle_tail).map_err(|e| e.to_string())?;
            errors += bu.bit_errors(&out.decisions);
        }
        Ok(errors)
    }
}

fn resolve_delays(cfg: &SweepConfig) -> Result<Option<DelayProfile>> {
    Ok(match &cfg.delays {
        DelayMode::Uniform => Some(DelayProfile::uniform(cfg.users)),
        DelayMode::Optimal => Some(optimal_delays(cfg.users, cfg.frame_len)?.profile),
        DelayMode::Explicit(p) => Some(p.clone()),
        DelayMode::Random => None,
    })
}

/// Runs every detector over the SNR grid. A detector that cannot handle the
/// configuration, or fails on some frame, gets an `error` on its curve while
/// the others continue.
pub fn run_sweep(cfg: &SweepConfig, threads: Option<usize>) -> Result<SweepResult> {
    cfg.validate()?;
    let threads = resolve_threads(threads)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;

    let fixed = resolve_delays(cfg)?.map(|d| MatrixSet::new(&d, cfg.frame_len)).transpose()?;
    let single = MatrixSet::new(&DelayProfile::uniform(1), cfg.frame_len)?;
    let mut entries = Vec::with_capacity(cfg.detectors.len());
    let mut curves: Vec<BerCurve> = Vec::with_capacity(cfg.detectors.len());
    for name in &cfg.detectors {
        let (entry, error) = if name == SINGLE_USER {
            (Some(Entry::SingleUser), None)
        } else {
            let d = detector_by_name(name)?;
            match d.check(cfg.users, cfg.antennas) {
                Ok(()) => (Some(Entry::Real(d)), None),
                Err(e) => (None, Some(e.to_string())),
            }
        };
        entries.push(entry);
        curves.push(BerCurve {
            detector: name.clone(),
            points: Vec::new(),
            error,
        });
    }
    let runnable: Vec<usize> = (0..entries.len()).filter(|&i| entries[i].is_some()).collect();
    let live: Vec<Entry> = entries.into_iter().flatten().collect();
    let frame = Frame {
        cfg,
        entries: &live,
        fixed: fixed.as_ref(),
        single: &single,
    };
    let bits_per_frame = cfg.bits_per_frame();

    let mut failed = vec![false; live.len()];
    for (point, &snr) in cfg.snr_db.iter().enumerate() {
        let mut errors = vec![0u64; live.len()];
        let mut frames = vec![0u64; live.len()];
        let mut active: Vec<bool> = failed.iter().map(|f| !f).collect();
        let mut next = 0u64;
        while next < cfg.frames_per_point && active.iter().any(|&a| a) {
            let batch = BATCH.min(cfg.frames_per_point - next);
            let outcomes: Vec<Outcome> = pool.install(|| {
                (next..next + batch)
                    .into_par_iter()
                    .map(|f| frame.run(point, f, &active))
                    .collect()
            });
            for d in 0..live.len() {
                if !active[d] {
                    continue;
                }
                match outcomes.iter().map(|o| o[d].clone()).collect::<std::result::Result<Vec<u64>, String>>() {
                    Ok(errs) => {
                        errors[d] += errs.iter().sum::<u64>();
                        frames[d] += batch;
                    }
                    Err(msg) => {
                        failed[d] = true;
                        active[d] = false;
                        curves[runnable[d]].error = Some(format!("at {snr} dB: {msg}"));
                    }
                }
                if cfg.stop_errors.is_some_and(|s| errors[d] >= s) {
                    active[d] = false;
                }
            }
            next += batch;
        }
        for d in 0..live.len() {
            if failed[d] && frames[d] == 0 {
                continue;
            }
            curves[runnable[d]]
                .points
                .push(BerPoint::from_counts(snr, frames[d], frames[d] * bits_per_frame, errors[d]));
        }
    }
    Ok(SweepResult {
        config: cfg.clone(),
        curves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(detectors: &[&str]) -> SweepConfig {
        SweepConfig {
            seed: 11,
            users: 2,
            frame_len: 16,
            antennas: 1,
            snr_db: vec![0.0, 10.0],
            detectors: detectors.iter().map(|s| s.to_string()).collect(),
            frames_per_point: 150,
            stop_errors: None,
            ..SweepConfig::default()
        }
    }

    #[test]
    fn bit_accounting() {
        let cfg = small(&["mlsd", "sync-ml", "single-user"]);
        let res = run_sweep(&cfg, Some(2)).unwrap();
        for c in &res.curves {
            assert!(c.error.is_none());
            for p in &c.points {
                assert_eq!(p.frames, 150);
                assert_eq!(p.bits, 150 * 15 * 2);
            }
        }
    }

    #[test]
    fn thread_count_does_not_matter() {
        let mut cfg = small(&["mlsd", "zf", "fb-bp", "sync-zf"]);
        cfg.stop_errors = Some(40);
        cfg.delays = DelayMode::Random;
        let a = run_sweep(&cfg, Some(1)).unwrap();
        let b = run_sweep(&cfg, Some(4)).unwrap();
        assert_eq!(a, b);
        // sync-zf with M < K is reported, not fatal
        assert!(a.curves[3].error.is_some());
        assert!(a.curves[3].points.is_empty());
        // early stop lands on a batch boundary
        let p = &a.curves[0].points[0];
        assert!(p.errors >= 40 && p.frames % BATCH == 0 || p.frames == 150);
    }

    #[test]
    fn enabling_detectors_does_not_change_others() {
        let a = run_sweep(&small(&["zf"]), Some(2)).unwrap();
        let b = run_sweep(&small(&["mlsd", "zf", "sync-ml"]), Some(2)).unwrap();
        assert_eq!(a.curves[0], b.curves[1]);
    }

    #[test]
    fn zero_thread_count_rejected() {
        assert!(run_sweep(&small(&["zf"]), Some(0)).is_err());
    }
}
