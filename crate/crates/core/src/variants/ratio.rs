//! Optimised SNR as a function of `gamma_c / gamma_b`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qutrit::SystemParams;
use crate::snr::{optimize, Axis, SnrResult, SweepSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub ratio: f64,
    pub beta_opt: f64,
    pub snr_opt: f64,
    pub result: SnrResult,
}

/// Optimise over `β` on `betas` (grid then simplex) for each ratio, keeping
/// the rest of `p` and the step `dt`.
pub fn ratio_sweep(ratios: &[f64], p: &SystemParams, betas: &[f64], dt: f64) -> Result<Vec<RatioPoint>> {
    if ratios.iter().any(|r| !(1.0..=100.0).contains(r)) {
        return Err(Error::invalid("ratios must lie in [1, 100]"));
    }
    ratios
        .iter()
        .map(|&ratio| {
            let base = SystemParams { gamma_c: ratio * p.gamma_b, ..*p };
            let mut spec = SweepSpec::new(base, vec![(Axis::Beta, betas.to_vec())]);
            spec.dt = dt;
            let opt = optimize(&spec)?;
            Ok(RatioPoint { ratio, beta_opt: opt.params.beta, snr_opt: opt.result.snr, result: opt.result })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snr::linspace;

    #[test]
    fn rejects_out_of_range() {
        assert!(ratio_sweep(&[0.5], &SystemParams::default(), &[0.4], 1e-2).is_err());
    }

    #[test]
    fn baseline_ratio_matches_direct_optimum() {
        let p = SystemParams::default();
        let betas = linspace(0.1, 1.0, 10);
        let r = ratio_sweep(&[2.0], &p, &betas, 1e-2).unwrap();
        let mut spec = SweepSpec::new(p, vec![(Axis::Beta, betas)]);
        spec.dt = 1e-2;
        let o = optimize(&spec).unwrap();
        assert_eq!(r[0].snr_opt, o.result.snr);
        assert_eq!(r[0].beta_opt, o.params.beta);
    }
}
