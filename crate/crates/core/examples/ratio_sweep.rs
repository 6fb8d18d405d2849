//! Optimized SNR as the decay ratio gamma_c / gamma_b grows.

use transmon_kerr::qutrit::SystemParams;
use transmon_kerr::snr::linspace;
use transmon_kerr::variants::ratio_sweep;

fn main() -> transmon_kerr::Result<()> {
    let p = SystemParams { gamma_b: 1.0, gamma_c: 2.0, gamma_con: 0.6672, ..Default::default() };
    for r in ratio_sweep(&[1.0, 2.0, 5.0, 10.0, 30.0, 100.0], &p, &linspace(0.05, 1.2, 24), 1e-3)? {
        println!("gamma_c / gamma_b = {:>5}: beta_opt = {:.4}, SNR = {:.4}", r.ratio, r.beta_opt, r.snr_opt);
    }
    Ok(())
}
