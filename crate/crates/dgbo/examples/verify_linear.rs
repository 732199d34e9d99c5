//! Strichartz and linear restriction-space estimate ratios over random data.
//!
//! ```text
//! cargo run --release --example verify_linear -- [alpha] [r]
//! ```

use std::f64::consts::PI;

use dgbo::linear_verifier::{
    cutoff_free_wave, linear_estimates_check, random_band, strichartz_ratio, LinearInput, LinearParams,
};
use dgbo::spectral_core::{make_grid, SpaceTimeGrid};

fn main() {
    let arg = |i: usize, d: f64| std::env::args().nth(i).and_then(|s| s.parse().ok()).unwrap_or(d);
    let (alpha, r) = (arg(1, 1.0), arg(2, 2.0));
    let space = make_grid(32.0 * PI, 512).expect("grid");
    let tgrid = SpaceTimeGrid::new(space, 8.0, 256).expect("grid");
    let lp = LinearParams { s: 0.0, b: 1.0 / r + 0.05, b_prime: -(r - 1.0) / r + 0.1, r, alpha };
    println!("{:>4} {:>14} {:>14} {:>14} {:>14}", "seed", "(inf,2)", "(3r,3r)", "homogeneous", "duhamel T=1");
    for seed in 0..8 {
        let phi = random_band(space, 1.0, 4.0, seed);
        let a = strichartz_ratio(&phi, f64::INFINITY, 2.0, r, alpha, &tgrid).expect("ratio");
        let b = strichartz_ratio(&phi, 3.0 * r, 3.0 * r, r, alpha, &tgrid).expect("ratio");
        let h = linear_estimates_check(LinearInput::Homogeneous { phi: &phi, tgrid: &tgrid }, &lp).expect("homogeneous");
        let forcing = cutoff_free_wave(&phi, &tgrid, alpha);
        let d = linear_estimates_check(LinearInput::Duhamel { forcing: &forcing, t_cut: 1.0 }, &lp).expect("duhamel");
        println!("{seed:>4} {a:>14.8e} {b:>14.8e} {h:>14.8e} {d:>14.8e}");
    }
}
