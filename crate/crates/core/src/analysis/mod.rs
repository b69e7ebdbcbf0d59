//! Closed-form performance analysis of zero-forcing on disjoint-interval
//! samples: subchannel BER, `trace(R⁻¹)`, optimal delays, and curve slopes.

mod ber;
mod covariance;
mod delays;
mod diversity;
mod hypergeometric;
mod trace;

pub use ber::{
    average_ber_exact, average_ber_from_diag, avg_ber_high_snr, avg_ber_high_snr_from_diag, ber_closed_form,
    ber_closed_form_from_diag, high_snr_constant, BerFormulaInput,
};
pub use covariance::zf_noise_covariance;
pub use delays::{
    optimal_delays, optimal_tau_two_users, profile_from_last, OptimalDelays, QuarticCoefficients, ROOT_TOL, SCAN_STEP,
};
pub use diversity::estimate_diversity_slope;
pub use hypergeometric::{hyp2f1_series, hyp2f1_special, SERIES_CAP, SERIES_TOL, SWITCH_X};
pub use trace::{
    fiedler_inverse_r11, last_row_two_users, r_inverse_diagonal, r_inverse_diagonal_blocked, trace_r_inverse_dense,
    trace_r_inverse_formula, DENSE_DIAG_LIMIT,
};
