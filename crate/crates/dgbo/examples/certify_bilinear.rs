//! Block-bound certification sweep for every lemma at one `(r, alpha)`.
//!
//! Prints the fitted worst-case slopes in `N_max` and `L_max`. Pass `full` as
//! the third argument for the complete grid.
//!
//! ```text
//! cargo run --release --example certify_bilinear -- [r] [alpha] [smoke|full]
//! ```

use dgbo::bilinear_certifier::{certify_case, Lemma, SweepSpec};

fn main() {
    let arg = |i: usize, d: f64| std::env::args().nth(i).and_then(|s| s.parse().ok()).unwrap_or(d);
    let (r, alpha) = (arg(1, 2.0), arg(2, 1.0));
    let spec = match std::env::args().nth(3).as_deref() {
        Some("full") => SweepSpec::full(),
        _ => SweepSpec::smoke(),
    };
    let fmt = |v: Option<f64>| v.map(|x| format!("{x:+.3}")).unwrap_or_else(|| "n/a".into());
    println!("{:<10} {:>8} {:>8} {:>8} {:>11}", "lemma", "records", "slope_N", "slope_L", "max ratio");
    for lemma in Lemma::all() {
        let o = certify_case(lemma, &spec, r, alpha, 1).expect("certify");
        println!("{:<10} {:>8} {:>8} {:>8} {:>11.4e}", lemma.id(), o.records.len(), fmt(o.slope_n), fmt(o.slope_l), o.max_ratio);
    }
}
