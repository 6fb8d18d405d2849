//! An ensemble of N transmons behaves like one with rates scaled by N and
//! time by 1/N; the SNR does not change.

use transmon_kerr::pulse::{PulseShape, TimeGrid};
use transmon_kerr::qutrit::SystemParams;
use transmon_kerr::snr;
use transmon_kerr::variants::ensemble_rescaled_params;

fn main() -> transmon_kerr::Result<()> {
    let p = SystemParams { gamma_b: 1.0, gamma_c: 2.0, gamma_con: 0.6672, beta: 0.4, ..Default::default() };
    let pulse = PulseShape::exponential(p.gamma_con)?;
    let base = TimeGrid::for_pulse(&pulse, 1e-3, p.gamma_b)?;
    for n in [1, 2, 5, 10, 100] {
        let s = ensemble_rescaled_params(&p, n)?;
        let grid = s.grid(&base)?;
        let r = snr::estimate_snr_deterministic(&s.params, &PulseShape::exponential(s.params.gamma_con)?, &grid)?;
        println!(
            "N = {n:>3}: T = {:>8.4}, beta = {:>7.4}, SNR = {:.12}",
            grid.t_end, s.params.beta, r.snr
        );
    }
    Ok(())
}
