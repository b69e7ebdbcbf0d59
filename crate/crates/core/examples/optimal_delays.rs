//! Delay profiles minimising `trace(R⁻¹)`, compared with uniform spacing.

use sampling_diversity::analysis::{optimal_delays, optimal_tau_two_users, trace_r_inverse_formula};
use sampling_diversity::model::DelayProfile;

fn main() -> sampling_diversity::Result<()> {
    for n in [10, 32, 64, 128, 1_000_000] {
        println!("K=2 N={n:<8} tau = {:.6}", optimal_tau_two_users(n));
    }
    let n = 128;
    for k in [3, 4, 6, 8] {
        let opt = optimal_delays(k, n)?;
        let uniform = trace_r_inverse_formula(&DelayProfile::uniform(k), n)?;
        let taus: Vec<String> = opt.profile.taus().iter().map(|t| format!("{t:.4}")).collect();
        println!(
            "K={k} N={n}  [{}]  trace {:.6e} (uniform {:.6e})",
            taus.join(", "),
            opt.trace,
            uniform
        );
    }
    Ok(())
}
