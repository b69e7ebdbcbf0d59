//! Asynchronous against synchronous zero-forcing with two users and two
//! antennas, and the diversity order read off the high-SNR slope.

use sampling_diversity::analysis::estimate_diversity_slope;
use sampling_diversity::harness::{run_sweep, SweepConfig};

fn main() -> sampling_diversity::Result<()> {
    let cfg = SweepConfig {
        seed: 5,
        users: 2,
        frame_len: 64,
        antennas: 2,
        snr_db: vec![10.0, 15.0, 20.0, 25.0],
        detectors: vec!["zf".into(), "sync-zf".into()],
        frames_per_point: 4000,
        stop_errors: Some(100),
        ..SweepConfig::default()
    };
    let result = run_sweep(&cfg, None)?;
    for c in &result.curves {
        for p in &c.points {
            println!("{:<8} {:>5.1} dB  ber {:.3e}  ({} errors)", c.detector, p.snr_db, p.ber, p.errors);
        }
        println!("{:<8} slope over 15-25 dB: {:.2}\n", c.detector, estimate_diversity_slope(c, (15.0, 25.0))?);
    }
    Ok(())
}
