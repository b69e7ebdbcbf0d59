//! Hard SIC in both directions and belief propagation on one noisy frame.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sampling_diversity::detectors::{bp_posteriors, fb_belief_propagation, sic_hard, Direction};
use sampling_diversity::model::{
    generate_channel, noise_variance_from_snr_db, simulate_received_async, DelayProfile, MatrixSet, SymbolFrame,
};

fn main() -> sampling_diversity::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let delays = DelayProfile::new(vec![0.0, 0.5])?;
    let n = 64;
    let mats = MatrixSet::new(&delays, n)?;
    let s2 = noise_variance_from_snr_db(6.0);
    let h = generate_channel(&mut rng, 2, 1);
    let b = SymbolFrame::random(&mut rng, n, 2, true);
    let y = simulate_received_async(&mats, &h, &b, s2, &mut rng)?;

    for dir in [Direction::Forward, Direction::Backward] {
        let out = sic_hard(&y, &h, &delays, dir, true)?;
        println!("{:<7} errors {}", out.detector, out.decisions.bit_errors(&b));
    }
    let fb = fb_belief_propagation(&y, &h, &delays, s2, true)?;
    println!("{:<7} errors {}", fb.detector, fb.decisions.bit_errors(&b));

    let post = bp_posteriors(&y, &h, &delays, s2, true)?;
    println!("\nslot user  sent  P_fw(+1) P_bw(+1) P_fb(+1)");
    for i in 0..8 {
        println!(
            "{:>4} {:>4} {:>5}  {:.4}   {:.4}   {:.4}",
            i / 2,
            i % 2,
            b.as_slice()[i],
            post.forward[i],
            post.backward[i],
            post.combined[i]
        );
    }
    Ok(())
}
