//! Four-level transmon with a strong dressing drive against its reduced
//! three-level ladder.

use transmon_kerr::pulse::TimeGrid;
use transmon_kerr::variants::four_level::{compare_four_level, four_level_reduce, FourLevelParams};

fn main() -> transmon_kerr::Result<()> {
    let grid = TimeGrid::new(20.0, 2e-3)?;
    for omega in [5.0, 10.0, 20.0, 40.0] {
        let p4 = FourLevelParams::resonant(omega, 0.0, 1.0, 1.0, 1.0);
        let red = four_level_reduce(&p4)?;
        let c = compare_four_level(&p4, &grid)?;
        println!(
            "Omega = {omega:>4}: theta = {:.4}, lambda_- = {:>7.3}, sup |pop4 - pop3| = {:.4}",
            red.theta,
            red.lambda_minus,
            c.sup_norm()
        );
    }
    Ok(())
}
