//! Ensemble of `N` transmons acting as one collective emitter.
//!
//! Rates and energies grow by `N` and the probe amplitude by `√N`. The
//! resulting equations are the single-transmon ones on the time axis
//! `t' = N t`, so the optimised SNR cannot change.

use crate::error::{Error, Result};
use crate::pulse::TimeGrid;
use crate::qutrit::SystemParams;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnsembleScaling {
    pub n: usize,
    pub params: SystemParams,
    /// Factor applied to times and steps, `1/N`.
    pub time_scale: f64,
    /// `<y_N>(t/N) = polarisation_scale <y_1>(t)`.
    pub polarisation_scale: f64,
}

impl EnsembleScaling {
    /// The base grid on the compressed time axis, with the same step count.
    pub fn grid(&self, base: &TimeGrid) -> Result<TimeGrid> {
        TimeGrid::from_steps(base.dt * self.time_scale, base.n_steps)
    }
}

pub fn ensemble_rescaled_params(p: &SystemParams, n: usize) -> Result<EnsembleScaling> {
    if n == 0 {
        return Err(Error::invalid("ensemble size must be at least 1"));
    }
    let nf = n as f64;
    let params = SystemParams {
        gamma_b: p.gamma_b * nf,
        gamma_c: p.gamma_c * nf,
        gamma_con: p.gamma_con * nf,
        delta_b: p.delta_b * nf,
        delta_c: p.delta_c * nf,
        beta: p.beta * nf.sqrt(),
        ..*p
    };
    Ok(EnsembleScaling { n, params, time_scale: 1.0 / nf, polarisation_scale: nf.sqrt() })
}
