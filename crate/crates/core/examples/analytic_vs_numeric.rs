//! Closed-form polarisation against the integrated Fock hierarchy.

use transmon_kerr::analytic;
use transmon_kerr::fock;
use transmon_kerr::pulse::{PulseShape, TimeGrid};
use transmon_kerr::qutrit::SystemParams;

fn main() -> transmon_kerr::Result<()> {
    for (beta, gcon) in [(1.0, 1.0), (0.4, 0.6672), (0.8, 0.3)] {
        let p = SystemParams { gamma_b: 1.0, gamma_c: 2.0, gamma_con: gcon, beta, ..Default::default() };
        let pulse = PulseShape::exponential(gcon)?;
        let grid = TimeGrid::for_pulse(&pulse, 1e-3, p.gamma_b)?;
        let a = analytic::solve_rho11(&p, &grid)?;
        let f = fock::evolve_hierarchy(&p, &pulse, &grid)?;
        let err = a.polarisation.iter().zip(&f.polarisation).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        println!("beta = {beta}, gamma_con = {gcon}: max |analytic - numeric| = {err:.2e}");
    }
    Ok(())
}
