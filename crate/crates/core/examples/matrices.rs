//! Sampling matrices for a three-user profile: the `U` and `R` blocks and the
//! identity `Uᵀ Σ⁻¹ U = R` on the full frame.

use nalgebra::{DMatrix, DVector};
use sampling_diversity::model::{build_block_r, build_block_u, noise_covariance_diag, DelayProfile, MatrixSet};

fn main() -> sampling_diversity::Result<()> {
    let delays = DelayProfile::new(vec![0.0, 0.3, 0.7])?;
    let n = 4;
    let mats = MatrixSet::new(&delays, n)?;
    println!("gaps = {:?}", delays.gaps());
    println!("U11 ={}U21 ={}", mats.u11, mats.u21);
    println!("R11 ={}R21 ={}", mats.r11, mats.r21);

    let u = build_block_u(&delays, n)?;
    let r = build_block_r(&delays, n)?;
    let w = noise_covariance_diag(&delays, n);
    let inv = DVector::from_iterator(w.len(), w.iter().map(|x| 1.0 / x));
    let gram = u.transpose() * DMatrix::from_diagonal(&inv) * &u;
    println!("U is {}x{}, R is {}x{}", u.nrows(), u.ncols(), r.nrows(), r.ncols());
    println!("max |UᵀΣ⁻¹U - R| = {:.3e}", (gram - r).abs().max());
    Ok(())
}
