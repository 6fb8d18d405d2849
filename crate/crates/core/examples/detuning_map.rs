//! SNR over transmon detunings at fixed probe strength.

use transmon_kerr::qutrit::SystemParams;
use transmon_kerr::snr::{self, linspace, Axis, SweepSpec};

fn main() -> transmon_kerr::Result<()> {
    let p = SystemParams { gamma_b: 1.0, gamma_c: 2.0, gamma_con: 0.6772, beta: 0.4, ..Default::default() };
    let g = linspace(-2.0, 2.0, 9);
    let spec = SweepSpec::new(p, vec![(Axis::DeltaB, g.clone()), (Axis::DeltaC, g.clone())]);
    let table = snr::sweep(&spec)?;
    print!("db\\dc ");
    for dc in &g {
        print!("{dc:>7.2}");
    }
    println!();
    for (i, db) in g.iter().enumerate() {
        print!("{db:>6.2}");
        for pt in &table[i * g.len()..(i + 1) * g.len()] {
            print!("{:>7.3}", pt.outcome.as_ref().map_or(f64::NAN, |r| r.snr));
        }
        println!();
    }
    if let Some(best) = snr::best_point(&table) {
        println!("argmax at ({}, {})", best.values[0], best.values[1]);
    }
    Ok(())
}
