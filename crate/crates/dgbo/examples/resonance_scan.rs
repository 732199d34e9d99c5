//! Sampled `|Omega| / bound` for each interaction case and several `alpha`.
//!
//! ```text
//! cargo run --release --example resonance_scan -- [N]
//! ```

use dgbo::dyadic::DyadicIndex;
use dgbo::resonance::{representative_cases, resonance_bound_ratio};

fn main() {
    let n: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(256);
    let n = DyadicIndex::new(n).expect("power of two");
    println!("{:<20} {:>6} {:>6} {:>6} {:>6} {:>11} {:>11} {:>9}", "case", "alpha", "N1", "N2", "N", "min", "max", "max/min");
    for alpha in [0.25, 0.5, 1.0] {
        for case in representative_cases(n).expect("N >= 16") {
            let st = resonance_bound_ratio(&case, alpha, 10_000, 0).expect("samples");
            println!(
                "{:<20} {alpha:>6} {:>6} {:>6} {:>6} {:>11.4e} {:>11.4e} {:>9.3}",
                case.kind.name(),
                case.n1.value(),
                case.n2.value(),
                case.n.value(),
                st.min,
                st.max,
                st.max / st.min
            );
        }
    }
}
