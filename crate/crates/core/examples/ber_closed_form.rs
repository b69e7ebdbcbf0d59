//! Average zero-forcing BER from the closed form and its high-SNR
//! approximation, for one and two antennas.

use sampling_diversity::analysis::{average_ber_exact, avg_ber_high_snr, ber_closed_form_from_diag};
use sampling_diversity::model::{noise_variance_from_snr_db, DelayProfile};

fn main() -> sampling_diversity::Result<()> {
    // single subchannel with R⁻¹(i,i) = 1 is plain Rayleigh BPSK
    let p = ber_closed_form_from_diag(1.0, 1, 10.0)?;
    println!("rayleigh bpsk at 10 dB: {p:.6e}\n");

    let delays = DelayProfile::uniform(2);
    let n = 8;
    println!(" snr   M   exact        high-snr");
    for m in [1, 2] {
        for snr_db in (0..=60).step_by(10) {
            let d0 = 1.0 / noise_variance_from_snr_db(snr_db as f64);
            println!(
                "{snr_db:>4} {m:>3}   {:.4e}   {:.4e}",
                average_ber_exact(&delays, n, m, d0)?,
                avg_ber_high_snr(&delays, n, m, d0)?
            );
        }
    }
    Ok(())
}
