//! Multiuser detectors behind a common interface.
//!
//! Asynchronous detectors consume the disjoint-interval samples of
//! [`SamplingMethod::Async`]; the synchronous baselines consume one sample
//! per slot. Every detector is a pure function of its input and can be shared
//! across threads.

mod bp;
mod mlsd;
mod schedule;
mod sic;
mod sync;
mod zf;

use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::model::{ChannelRealization, MatrixSet, SampleBlock, SamplingMethod, SymbolFrame};

pub use bp::{bp_posteriors, fb_belief_propagation, BpPosteriors};
pub use mlsd::{mlsd_viterbi, sequence_metric, MAX_TRELLIS_STATES};
pub use schedule::Direction;
pub use sic::sic_hard;
pub use sync::{sync_ml, sync_zf};
pub use zf::{zf_detect, zf_estimate, ZfSolver};

#[doc(hidden)]
pub use bp::bp_posteriors_linear;

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    pub detector: String,
    pub decisions: SymbolFrame,
    /// Per-symbol soft values in frame order: posterior `P(b = +1)` for BP,
    /// the real part of the equalised estimate for ZF and SIC.
    pub soft: Option<Vec<f64>>,
    /// Path metric (MLSD) or residual, when the detector has one.
    pub metric: Option<f64>,
}

/// Everything a detector may need for one frame.
#[derive(Debug, Clone, Copy)]
pub struct DetectorInput<'a> {
    pub async_samples: &'a [SampleBlock],
    pub sync_samples: &'a [SampleBlock],
    pub channel: &'a ChannelRealization,
    pub matrices: &'a MatrixSet,
    pub noise_variance: f64,
    /// Last slot is the idle guard symbol (known zero).
    pub idle_tail: bool,
}

pub trait Detector: Send + Sync + Debug {
    fn name(&self) -> &'static str;

    fn sampling(&self) -> SamplingMethod;

    /// Rejects system dimensions the detector cannot handle.
    fn check(&self, users: usize, antennas: usize) -> Result<()> {
        let _ = (users, antennas);
        Ok(())
    }

    fn detect(&self, input: &DetectorInput<'_>) -> Result<DetectionResult>;
}

pub const DETECTOR_NAMES: &[&str] = &[
    "mlsd", "sic-fw", "sic-bw", "bp-fw", "bp-bw", "fb-bp", "zf", "sync-ml", "sync-zf",
];

pub fn detector_by_name(name: &str) -> Result<Box<dyn Detector>> {
    Ok(match name {
        "mlsd" => Box::new(Mlsd),
        "sic-fw" => Box::new(Sic(Direction::Forward)),
        "sic-bw" => Box::new(Sic(Direction::Backward)),
        "bp-fw" => Box::new(Bp(BpMode::Forward)),
        "bp-bw" => Box::new(Bp(BpMode::Backward)),
        "fb-bp" => Box::new(Bp(BpMode::Combined)),
        "zf" => Box::new(Zf),
        "sync-ml" => Box::new(SyncMl),
        "sync-zf" => Box::new(SyncZf),
        other => return Err(Error::UnknownDetector(other.to_string())),
    })
}

#[derive(Debug)]
struct Mlsd;

impl Detector for Mlsd {
    fn name(&self) -> &'static str {
        "mlsd"
    }

    fn sampling(&self) -> SamplingMethod {
        SamplingMethod::Async
    }

    fn check(&self, users: usize, _antennas: usize) -> Result<()> {
        let states = 2usize.checked_pow(users as u32).unwrap_or(usize::MAX);
        if states > MAX_TRELLIS_STATES {
            return Err(Error::StateSpace {
                states,
                cap: MAX_TRELLIS_STATES,
            });
        }
        Ok(())
    }

    fn detect(&self, input: &DetectorInput<'_>) -> Result<DetectionResult> {
        mlsd_viterbi(
            input.async_samples,
            input.channel,
            &input.matrices.delays,
            input.noise_variance,
            input.idle_tail,
        )
    }
}

#[derive(Debug)]
struct Sic(Direction);

impl Detector for Sic {
    fn name(&self) -> &'static str {
        match self.0 {
            Direction::Forward => "sic-fw",
            Direction::Backward => "sic-bw",
        }
    }

    fn sampling(&self) -> SamplingMethod {
        SamplingMethod::Async
    }

    fn detect(&self, input: &DetectorInput<'_>) -> Result<DetectionResult> {
        sic_hard(
            input.async_samples,
            input.channel,
            &input.matrices.delays,
            self.0,
            input.idle_tail,
        )
    }
}

#[derive(Debug, Clone, Copy)]
enum BpMode {
    Forward,
    Backward,
    Combined,
}

#[derive(Debug)]
struct Bp(BpMode);

impl Detector for Bp {
    fn name(&self) -> &'static str {
        match self.0 {
            BpMode::Forward => "bp-fw",
            BpMode::Backward => "bp-bw",
            BpMode::Combined => "fb-bp",
        }
    }

    fn sampling(&self) -> SamplingMethod {
        SamplingMethod::Async
    }

    fn check(&self, users: usize, _antennas: usize) -> Result<()> {
        if users > 16 {
            return Err(Error::Unsupported(format!(
                "belief propagation marginalises 2^(K-1) interferer patterns; K={users} is too large"
            )));
        }
        Ok(())
    }

    fn detect(&self, input: &DetectorInput<'_>) -> Result<DetectionResult> {
        let post = bp_posteriors(
            input.async_samples,
            input.channel,
            &input.matrices.delays,
            input.noise_variance,
            input.idle_tail,
        )?;
        let p = match self.0 {
            BpMode::Forward => &post.forward,
            BpMode::Backward => &post.backward,
            BpMode::Combined => &post.combined,
        };
        Ok(bp::decide(self.name(), p, &post))
    }
}

#[derive(Debug)]
struct Zf;

impl Detector for Zf {
    fn name(&self) -> &'static str {
        "zf"
    }

    fn sampling(&self) -> SamplingMethod {
        SamplingMethod::Async
    }

    fn detect(&self, input: &DetectorInput<'_>) -> Result<DetectionResult> {
        zf_detect(
            input.async_samples,
            input.channel,
            input.matrices,
            input.idle_tail,
            ZfSolver::Structured,
        )
    }
}

#[derive(Debug)]
struct SyncMl;

impl Detector for SyncMl {
    fn name(&self) -> &'static str {
        "sync-ml"
    }

    fn sampling(&self) -> SamplingMethod {
        SamplingMethod::Sync
    }

    fn check(&self, users: usize, _antennas: usize) -> Result<()> {
        let hyps = 2usize.checked_pow(users as u32).unwrap_or(usize::MAX);
        if hyps > MAX_TRELLIS_STATES {
            return Err(Error::StateSpace {
                states: hyps,
                cap: MAX_TRELLIS_STATES,
            });
        }
        Ok(())
    }

    fn detect(&self, input: &DetectorInput<'_>) -> Result<DetectionResult> {
        sync_ml(input.sync_samples, input.channel)
    }
}

#[derive(Debug)]
struct SyncZf;

impl Detector for SyncZf {
    fn name(&self) -> &'static str {
        "sync-zf"
    }

    fn sampling(&self) -> SamplingMethod {
        SamplingMethod::Sync
    }

    fn check(&self, users: usize, antennas: usize) -> Result<()> {
        sync::check_sync_zf(users, antennas)
    }

    fn detect(&self, input: &DetectorInput<'_>) -> Result<DetectionResult> {
        sync_zf(input.sync_samples, input.channel)
    }
}

/// Checks one antenna block per channel antenna, each of the expected
/// sampling method and length.
pub(crate) fn check_blocks(
    samples: &[SampleBlock],
    h: &ChannelRealization,
    method: SamplingMethod,
    len: usize,
) -> Result<()> {
    if samples.len() != h.antennas() {
        return Err(Error::Dimension(format!(
            "{} sample blocks for a {}-antenna channel",
            samples.len(),
            h.antennas()
        )));
    }
    samples.iter().try_for_each(|s| s.check_len(method, len))
}

/// Frame length implied by disjoint-interval blocks of `K` users.
pub(crate) fn async_frame_len(samples: &[SampleBlock], users: usize) -> Result<usize> {
    let len = samples
        .first()
        .ok_or_else(|| Error::Dimension("no sample blocks".into()))?
        .y
        .len();
    if len < 2 * users || len % users != 0 {
        return Err(Error::Dimension(format!(
            "async block length {len} is not (N+1)K for K={users}"
        )));
    }
    Ok(len / users - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_round_trip() {
        for name in DETECTOR_NAMES {
            assert_eq!(detector_by_name(name).unwrap().name(), *name);
        }
        assert!(matches!(
            detector_by_name("nope"),
            Err(Error::UnknownDetector(_))
        ));
    }

    #[test]
    fn sync_zf_needs_antennas() {
        let d = detector_by_name("sync-zf").unwrap();
        assert!(d.check(2, 2).is_ok());
        assert!(matches!(d.check(3, 2), Err(Error::Unsupported(_))));
    }
}
