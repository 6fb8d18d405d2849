//! Deterministic SNR against the probe strength, then a simplex refinement.
//!
//! ```text
//! cargo run --release --example snr_beta_sweep
//! ```

use transmon_kerr::qutrit::SystemParams;
use transmon_kerr::snr::{self, linspace, Axis, SweepSpec};

fn main() -> transmon_kerr::Result<()> {
    let p = SystemParams { gamma_b: 1.0, gamma_c: 2.0, gamma_con: 0.6672, ..Default::default() };
    let spec = SweepSpec::new(p, vec![(Axis::Beta, linspace(0.05, 1.2, 24))]);
    let o = snr::optimize(&spec)?;
    println!("{:>6} {:>10} {:>10} {:>8}", "beta", "E[S1]", "sigma", "SNR");
    for pt in &o.table {
        let r = pt.outcome.as_ref().expect("grid point");
        println!("{:>6.3} {:>10.4} {:>10.4} {:>8.4}", pt.values[0], r.mean_s1, r.sigma_s, r.snr);
    }
    println!(
        "grid optimum beta = {:.3} (SNR {:.5}); refined beta = {:.4} (SNR {:.5}) after {} iterations",
        o.grid_values[0], o.grid_result.snr, o.params.beta, o.result.snr, o.iterations
    );
    Ok(())
}
