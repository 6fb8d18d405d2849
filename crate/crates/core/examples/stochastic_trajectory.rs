//! A single conditional trajectory: the homodyne record and its running
//! integral, printed every 0.5 time units.

use transmon_kerr::cascade::{self, SmeScheme};
use transmon_kerr::pulse::{PulseShape, TimeGrid};
use transmon_kerr::qutrit::SystemParams;

fn main() -> transmon_kerr::Result<()> {
    let p = SystemParams { gamma_b: 1.0, gamma_c: 2.0, gamma_con: 0.6672, beta: 0.45, ..Default::default() };
    let pulse = PulseShape::exponential(p.gamma_con)?;
    let grid = TimeGrid::for_pulse(&pulse, 1e-3, p.gamma_b)?;
    let ops = cascade::cascade_operators(&p, None, grid.dt, SmeScheme::Kraus)?;
    for n in [0, 1] {
        let tr = cascade::simulate_trajectory(&ops, &grid, 3, n)?;
        let stride = (0.5 / grid.dt).round() as usize;
        let mut running = 0.0;
        print!("n = {n}: S(t) =");
        for (k, j) in tr.j_samples.iter().enumerate() {
            running += j * grid.dt;
            if (k + 1) % stride == 0 && (k + 1) / stride <= 12 {
                print!(" {running:.2}");
            }
        }
        println!("\n        S = {:.4}, max |<y>| = {:.4}", tr.signal, tr.max_abs_record_mean);
    }
    Ok(())
}
