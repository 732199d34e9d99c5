//! Picard contraction factors on a grid of offsets from the threshold.
//!
//! ```text
//! cargo run --release --example sweep
//! ```

use dgbo::probes::threshold_sweep;
use dgbo::solver::SolveConfig;

fn main() {
    let base = SolveConfig { t_final: 0.1, ..Default::default() };
    for (alpha, r) in [(1.0, 1.9), (0.75, 1.6), (0.5, 1.4)] {
        let recs = threshold_sweep(&[alpha], &[r], &[0.0, 0.25, 0.5, 1.0], &base, 0.01, 0).expect("admissible");
        for rec in recs {
            let k: Vec<String> = rec.contraction_factors.iter().map(|k| format!("{k:.2e}")).collect();
            println!(
                "alpha {alpha:<5} r {r:<4} s {:>8.4}  converged {:<5} kappa [{}]{}",
                rec.s,
                rec.converged,
                k.join(", "),
                rec.error.map(|e| format!("  error: {e}")).unwrap_or_default()
            );
        }
    }
}
