//! Transmon response `<y>(t)` to a single photon for the three pulse shapes.
//!
//! ```text
//! cargo run --release --example polarisation
//! ```

use transmon_kerr::fock;
use transmon_kerr::pulse::{PulseKind, PulseShape, TimeGrid};
use transmon_kerr::qutrit::SystemParams;

fn main() -> transmon_kerr::Result<()> {
    let base = SystemParams { gamma_b: 1.0, gamma_c: 2.0, gamma_con: 0.6672, ..Default::default() };
    println!("{:<12} {:>6} {:>10} {:>10} {:>10}", "pulse", "beta", "peak |y|", "t_peak", "E[S1]");
    for (kind, beta) in [(PulseKind::Exponential, 0.4), (PulseKind::Rectangular, 0.47), (PulseKind::Gaussian, 0.59)] {
        let p = SystemParams { beta, ..base };
        let pulse = PulseShape::for_bandwidth(kind, p.gamma_con)?;
        let grid = TimeGrid::for_pulse(&pulse, 1e-3, p.gamma_b)?;
        let ev = fock::evolve_hierarchy(&p, &pulse, &grid)?;
        let (k, peak) = ev
            .polarisation
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |b, (i, y)| if y.abs() > b.1 { (i, y.abs()) } else { b });
        let s = fock::expected_signal(&p, &pulse, &grid)?;
        println!("{:<12} {beta:>6.2} {peak:>10.4} {:>10.3} {s:>10.4}", format!("{kind:?}"), ev.times[k]);
    }
    println!("bound sqrt(gamma_c) = {:.4}", base.gamma_c.sqrt());
    Ok(())
}
