//! Local smoothing identity for a smooth bump on `1 <= xi <= 2`.
//!
//! Prints the measured and exact `L^inf_x L^r-hat_t` norms of the free
//! evolution for each `(alpha, r)` at the default and the doubled window.
//!
//! ```text
//! cargo run --release --example smoothing
//! ```

use std::f64::consts::PI;

use dgbo::linear_verifier::{local_smoothing_check, smooth_band_with, BAND_SHARPNESS};
use dgbo::spectral_core::{make_grid, SpaceTimeGrid};

fn main() {
    let hw: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(64.0);
    let nx: usize = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(1024);
    let space = make_grid(hw * PI, nx).expect("grid");
    let a: f64 = std::env::args().nth(3).and_then(|s| s.parse().ok()).unwrap_or(BAND_SHARPNESS);
    let phi = smooth_band_with(space, 1.0, 2.0, a);
    println!("{:>6} {:>6} {:>14} {:>14} {:>11} {:>11} {:>11}", "alpha", "r", "lhs", "rhs", "rel_err", "rel_err_x2", "spread");
    for alpha in [0.25, 0.5, 1.0] {
        for r in [1.25, 1.5, 2.0] {
            let base = SpaceTimeGrid::new(space, 8.0, 512).expect("grid");
            let wide = SpaceTimeGrid::new(space, 16.0, 1024).expect("grid");
            let a = local_smoothing_check(&phi, r, alpha, &base).expect("check");
            let b = local_smoothing_check(&phi, r, alpha, &wide).expect("check");
            println!(
                "{alpha:>6} {r:>6} {:>14.8e} {:>14.8e} {:>11.3e} {:>11.3e} {:>11.3e}",
                a.lhs, a.rhs, a.rel_error, b.rel_error, a.spread
            );
        }
    }
}
