//! Regularity threshold over the admissible `(alpha, r)` range.
//!
//! ```text
//! cargo run --release --example threshold
//! ```

use dgbo::probes::threshold;

fn main() {
    let alphas = [0.25, 0.5, 0.75, 1.0];
    print!("{:>6}", "r\\a");
    for a in alphas {
        print!(" {a:>10}");
    }
    println!();
    for i in 1..10 {
        let r = 1.0 + 0.1 * i as f64;
        print!("{r:>6.2}");
        for a in alphas {
            match threshold(a, r) {
                Ok(v) => print!(" {v:>10.6}"),
                Err(_) => print!(" {:>10}", "-"),
            }
        }
        println!();
    }
    println!("limit r -> 2 at alpha = 1: {:.10}", threshold(1.0, 2.0 - 1e-12).expect("admissible"));
}
