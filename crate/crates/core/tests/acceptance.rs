//! One line per acceptance criterion; exits non-zero if a primary one fails.

use std::time::Instant;

use transmon_kerr::acceptance;

fn main() {
    let start = Instant::now();
    let report = acceptance::run_all();
    println!();
    for c in &report {
        println!("{c}");
    }
    let failed: Vec<_> = report.iter().filter(|c| c.primary && !c.passed).collect();
    println!(
        "\nacceptance: {} primary criteria, {} failed, {:.0} s",
        report.iter().filter(|c| c.primary).count(),
        failed.len(),
        start.elapsed().as_secs_f64()
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
