//! SNR of a chain of identical transmon detectors with transmission losses.

use transmon_kerr::qutrit::SystemParams;
use transmon_kerr::snr::{self, linspace, Axis, SweepSpec};
use transmon_kerr::variants::snr_cascade;
use transmon_kerr::variants::transmission::{group_velocity, CascadeParams, NumeratorVariant, DEFAULT_EPS_EFF};

fn main() -> transmon_kerr::Result<()> {
    let p = SystemParams { gamma_b: 1.0, gamma_c: 2.0, gamma_con: 0.6672, ..Default::default() };
    let o = snr::optimize(&SweepSpec::new(p, vec![(Axis::Beta, linspace(0.05, 1.2, 24))]))?;
    let node = CascadeParams::on_resonance(20, o.params.beta, &p, group_velocity(DEFAULT_EPS_EFF)?, NumeratorVariant::SqrtGammaC)?;
    println!("single detector SNR {:.4}, |t|^2 = {:.4}", o.result.snr, node.t_trans);
    for n in [1, 2, 3, 5, 10, 20] {
        println!(
            "n = {n:>2}: SNR_n = {:.4} (lossless {:.4})",
            snr_cascade(n, o.result.snr, node.t_trans)?,
            snr_cascade(n, o.result.snr, 1.0)?
        );
    }
    Ok(())
}
