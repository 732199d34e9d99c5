//! Integrates smooth small data and prints the conservation diagnostics.
//!
//! ```text
//! cargo run --release --example solve -- [alpha] [T]
//! ```

use dgbo::solver::{gaussian_data, solve, SolveConfig};

fn main() {
    let alpha: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let t_final: f64 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let cfg = SolveConfig { alpha, t_final, ..Default::default() };
    let u0 = gaussian_data(cfg.grid().expect("grid"), 0.05);
    let run = solve(&u0, &cfg).expect("solve");
    println!("{:>8} {:>22} {:>22} {:>22}", "t", "mean", "l2", "energy");
    for d in &run.diagnostics {
        println!("{:>8.3} {:>22.15e} {:>22.15e} {:>22.15e}", d.t, d.mean, d.l2, d.energy);
    }
    let (m, l2, e) = run.drifts();
    println!("drift: mean {m:.2e}  L2 {l2:.2e}  energy {e:.2e}");
}
