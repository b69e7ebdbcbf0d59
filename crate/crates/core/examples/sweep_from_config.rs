//! Runs a sweep from a config file and prints CSV.
//!
//! `cargo run --release --example sweep_from_config -- configs/fig3_quick.conf`

use sampling_diversity::harness::{render, run_sweep, OutputFormat, SweepConfig};

fn main() -> sampling_diversity::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/fig3_quick.conf").into());
    let cfg = SweepConfig::from_file(path.as_ref())?;
    let result = run_sweep(&cfg, None)?;
    print!("{}", render(&result, OutputFormat::Csv)?);
    Ok(())
}
