//! Transmission of a probe past a driven transmon along `Δb = Δc`.

use transmon_kerr::qutrit::SystemParams;
use transmon_kerr::snr::linspace;
use transmon_kerr::variants::transmission::{group_velocity, transmission, window_width, NumeratorVariant, DEFAULT_EPS_EFF};

fn main() -> transmon_kerr::Result<()> {
    let p = SystemParams { gamma_b: 1.0, gamma_c: 2.0, ..Default::default() };
    let alpha = 2.0;
    let vg = group_velocity(DEFAULT_EPS_EFF)?;
    for variant in [NumeratorVariant::SqrtGammaC, NumeratorVariant::GammaC] {
        println!("{variant:?}");
        for d in linspace(-8.0, 8.0, 17) {
            let t = transmission(d, d, alpha, &p, vg, variant)?;
            println!("{d:>6.1} {:>8.4} {}", t.norm_sqr(), "*".repeat((50.0 * t.norm_sqr()) as usize));
        }
        let w = window_width(alpha, &p, vg, variant, 10.0, 1e-3)?;
        println!("window width {w:.3}, 2 sqrt(gamma_c) alpha = {:.3}\n", 2.0 * p.gamma_c.sqrt() * alpha);
    }
    Ok(())
}
