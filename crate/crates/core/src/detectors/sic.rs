//! Successive interference cancellation with hard decisions.

use num_complex::Complex64;

use super::schedule::{involved, schedule, Direction};
use super::{async_frame_len, check_blocks, DetectionResult};
use crate::error::{Error, Result};
use crate::model::{ChannelRealization, DelayProfile, SampleBlock, SamplingMethod, SymbolFrame};

/// Decodes one symbol per sample in forward (`b_1(1), b_2(1), …`) or
/// backward (`b_K(N), b_{K-1}(N), …`) order, subtracting the reconstructed
/// contribution of every previously decided symbol. The decision statistic is
/// `Re(Σ_m h_{l,m}^* r_m)`; ties go to `+1`.
pub fn sic_hard(
    samples: &[SampleBlock],
    h: &ChannelRealization,
    delays: &DelayProfile,
    direction: Direction,
    idle_tail: bool,
) -> Result<DetectionResult> {
    let k = delays.users();
    if h.users() != k {
        return Err(Error::Dimension(format!(
            "channel has {} users, delays describe {k}",
            h.users()
        )));
    }
    let n = async_frame_len(samples, k)?;
    check_blocks(samples, h, SamplingMethod::Async, (n + 1) * k)?;
    let gaps = delays.gaps();
    let idle = |slot: usize| idle_tail && slot + 1 == n;

    let mut decided = vec![0i8; n * k];
    let mut soft = vec![0.0f64; n * k];
    for step in schedule(direction, n, k) {
        let (es, eu) = step.exposes;
        if idle(es) {
            continue;
        }
        let g = gaps[step.user];
        let mut stat = 0.0;
        let mut energy = 0.0;
        for (m, block) in samples.iter().enumerate() {
            let mut known = Complex64::new(0.0, 0.0);
            for (s, u) in involved(n, k, step.slot, step.user) {
                if (s, u) != (es, eu) {
                    known += h.gain(u, m) * f64::from(decided[s * k + u]);
                }
            }
            let residual = block.y[step.slot * k + step.user] - known * g;
            let hm = h.gain(eu, m);
            stat += (hm.conj() * residual).re;
            energy += hm.norm_sqr();
        }
        decided[es * k + eu] = if stat >= 0.0 { 1 } else { -1 };
        soft[es * k + eu] = if energy > 0.0 { stat / (g * energy) } else { 0.0 };
    }
    Ok(DetectionResult {
        detector: match direction {
            Direction::Forward => "sic-fw",
            Direction::Backward => "sic-bw",
        }
        .into(),
        decisions: SymbolFrame::new(n, k, decided, idle_tail)?,
        soft: Some(soft),
        metric: None,
    })
}
