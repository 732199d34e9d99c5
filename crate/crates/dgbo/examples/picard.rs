//! Picard iteration in the restriction space, compared with the time stepper.
//!
//! ```text
//! cargo run --release --example picard -- [alpha] [r] [s]
//! ```

use dgbo::solver::{gaussian_data, picard_iterate, solve, SolveConfig};

fn main() {
    let arg = |i: usize, d: f64| std::env::args().nth(i).and_then(|s| s.parse().ok()).unwrap_or(d);
    let cfg = SolveConfig { alpha: arg(1, 1.0), r: arg(2, 1.9), s: arg(3, 0.0), t_final: 0.5, ..Default::default() };
    let u0 = gaussian_data(cfg.grid().expect("grid"), 0.05);
    let p = picard_iterate(&u0, &cfg).expect("picard");
    println!("t_width {}  n_t {}", p.grid.t_width(), p.grid.time.len());
    for (n, d) in p.differences.iter().enumerate() {
        let kappa = n.checked_sub(1).map(|j| format!("{:.3e}", p.contraction_factors[j])).unwrap_or_default();
        println!("iter {:>2}  |u^(n+1) - u^n| = {d:.3e}  kappa {kappa}", n + 1);
    }
    println!("converged {}  diverged {}", p.converged, p.diverged);
    let a = p.state_at(cfg.t_final).expect("lattice time");
    let b = solve(&u0, &cfg).expect("solve").final_state;
    println!("relative L2 gap to the time stepper at T: {:.3e}", a.sub(&b).l2_norm() / b.l2_norm());
}
