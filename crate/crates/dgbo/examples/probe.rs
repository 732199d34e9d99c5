//! Second-iterate growth table for high-low data.
//!
//! ```text
//! cargo run --release --example probe -- [alpha] [s]
//! ```

use dgbo::probes::illposedness_probe;

fn main() {
    let arg = |i: usize, d: f64| std::env::args().nth(i).and_then(|s| s.parse().ok()).unwrap_or(d);
    let (alpha, s) = (arg(1, 0.25), arg(2, 0.0));
    let ns: Vec<u64> = (4..=9).map(|k| 1 << k).collect();
    let rows = illposedness_probe(&ns, alpha, s, &[1.2, 2.0], 1.0, 0).expect("probe");
    let fmt = |v: Option<f64>| v.map(|x| format!("{x:+.3}")).unwrap_or_else(|| "-".into());
    println!("{:>4} {:>5} {:>12} {:>12} {:>8} {:>8}", "r", "N", "Hs ratio", "Hr ratio", "Hs tr", "Hr tr");
    for p in rows {
        println!("{:>4} {:>5} {:>12.5e} {:>12.5e} {:>8} {:>8}", p.r, p.n, p.hs_ratio, p.hr_ratio, fmt(p.hs_trend), fmt(p.hr_trend));
    }
}
