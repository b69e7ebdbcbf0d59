//! Asynchronous MLSD against per-slot synchronous ML on the same channel and
//! symbols, `K = 2`, one antenna.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sampling_diversity::detectors::{mlsd_viterbi, sync_ml};
use sampling_diversity::model::{
    generate_channel, noise_variance_from_snr_db, simulate_received_async, simulate_received_sync, DelayProfile,
    MatrixSet, SymbolFrame,
};

fn main() -> sampling_diversity::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let delays = DelayProfile::uniform(2);
    let n = 128;
    let mats = MatrixSet::new(&delays, n)?;
    let frames = 300;
    for snr_db in [4.0, 8.0, 12.0] {
        let s2 = noise_variance_from_snr_db(snr_db);
        let (mut e_async, mut e_sync, mut bits) = (0, 0, 0);
        for _ in 0..frames {
            let h = generate_channel(&mut rng, 2, 1);
            let b = SymbolFrame::random(&mut rng, n, 2, true);
            let ya = simulate_received_async(&mats, &h, &b, s2, &mut rng)?;
            let ys = simulate_received_sync(&h, &b, s2, &mut rng)?;
            e_async += mlsd_viterbi(&ya, &h, &delays, s2, true)?.decisions.bit_errors(&b);
            e_sync += sync_ml(&ys, &h)?.decisions.bit_errors(&b);
            bits += b.data_slots() as u64 * 2;
        }
        println!(
            "{snr_db:>5.1} dB  mlsd {:.3e}  sync-ml {:.3e}",
            e_async as f64 / bits as f64,
            e_sync as f64 / bits as f64
        );
    }
    Ok(())
}
