//! SNR with a squeezed vacuum in the measurement port.

use transmon_kerr::pulse::{PulseShape, TimeGrid};
use transmon_kerr::qutrit::SystemParams;
use transmon_kerr::snr::{self, linspace};
use transmon_kerr::variants::SqueezeParams;

fn main() -> transmon_kerr::Result<()> {
    let p = SystemParams { gamma_b: 1.0, gamma_c: 2.0, gamma_con: 0.6672, beta: 0.4, ..Default::default() };
    let pulse = PulseShape::exponential(p.gamma_con)?;
    let grid = TimeGrid::for_pulse(&pulse, 1e-3, p.gamma_b)?;
    let mut s0 = None;
    println!("{:>5} {:>7} {:>8} {:>8}", "r", "dB", "L", "SNR");
    for r in linspace(0.0, 1.5, 16) {
        let sq = SqueezeParams::noise_reducing(r)?;
        let s = snr::estimate_snr_deterministic_squeezed(&p, Some(&sq), &pulse, &grid)?.snr;
        let base = *s0.get_or_insert(s);
        println!("{r:>5.2} {:>7.2} {:>8.4} {s:>8.4}  ({:+.1}%)", sq.db(), sq.l(), 100.0 * (s / base - 1.0));
    }
    Ok(())
}
