//! Stochastic ensembles with and without a photon, binned into a histogram.
//!
//! The ensemble size is the first argument (default 1000).
//!
//! ```text
//! cargo run --release --example histogram -- 2000
//! ```

use transmon_kerr::pulse::{PulseShape, TimeGrid};
use transmon_kerr::qutrit::SystemParams;
use transmon_kerr::snr::{self, Histogram, StochasticSettings};

fn main() -> transmon_kerr::Result<()> {
    let n_traj = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1000);
    let p = SystemParams { gamma_b: 1.0, gamma_c: 2.0, gamma_con: 0.6672, beta: 0.45, ..Default::default() };
    let pulse = PulseShape::exponential(p.gamma_con)?;
    let grid = TimeGrid::for_pulse(&pulse, 1e-3, p.gamma_b)?;
    let settings = StochasticSettings { n_traj, base_seed: 7, ..Default::default() };
    let (s1, s0) = snr::simulate_signal_pair(&p, None, &grid, &settings)?;
    let st = snr::estimate_snr_stochastic(&s1, &s0)?;
    let det = snr::estimate_snr_deterministic(&p, &pulse, &grid)?;
    let h = Histogram::freedman_diaconis(&s0.values, &s1.values)?;
    let peak = h.counts_n0.iter().chain(&h.counts_n1).copied().max().unwrap_or(1).max(1);
    for k in 0..h.counts_n0.len() {
        let bar = |c: usize| "#".repeat(40 * c / peak);
        println!("{:>8.2} | {:<40} | {}", h.bin_edges[k], bar(h.counts_n0[k]), bar(h.counts_n1[k]));
    }
    println!(
        "n = {n_traj}: stochastic SNR {:.4} +- {:.4}, deterministic {:.4}",
        st.snr,
        st.stderr_snr.unwrap_or(f64::NAN),
        det.snr
    );
    Ok(())
}
