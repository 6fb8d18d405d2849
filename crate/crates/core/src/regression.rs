//! Mean and variance of the integrated homodyne signal for a linear
//! (unconditional) evolution, via the quantum regression theorem.
//!
//! With record `J = <o>(t) + s ξ(t)` the integrated signal `S = ∫_0^T J dt`
//! has
//!
//! ```text
//! Var S = s² T + 2 ∫_0^T dt ∫_t^T dt' <o e^{G(t',t)} K x(t)> - S̄²
//! ```
//!
//! where `K` is the measurement kick. The inner integral is the adjoint
//! state `Y(t) = ∫_t^T e^{G(t',t)}† o dt'`, which obeys
//! `dY/dt = -o - G(t)† Y` with `Y(T) = 0`, so one backward sweep replaces the
//! quadratic number of propagations.

use crate::error::{Error, Result};
use crate::ode::{rk4_step_staged, OdeState, Stage};
use crate::pulse::{trapezoid, TimeGrid};

/// Linear time-dependent dynamics `dx/dt = G(t) x` with a measured record.
pub trait RecordDynamics {
    type State: OdeState;

    fn initial(&self) -> Self::State;

    /// `G(t) x` for the RK4 stage of the step `[t0, t0 + h]`.
    fn forward(&self, t0: f64, h: f64, stage: Stage, x: &Self::State) -> Self::State;

    /// `G(t)† y` under the Hilbert-Schmidt inner product.
    fn adjoint(&self, t0: f64, h: f64, stage: Stage, y: &Self::State) -> Self::State;

    /// Noise-free record `<o>` in state `x`.
    fn signal(&self, x: &Self::State) -> f64;

    /// `o` embedded in the state space, so that `signal(x) = Re <o, x>`.
    fn observable(&self) -> Self::State;

    fn kick(&self, x: &Self::State) -> Self::State;

    /// `Re <y, x>`.
    fn inner(&self, y: &Self::State, x: &Self::State) -> f64;

    /// `s²`.
    fn noise_density(&self) -> f64;
}

/// Deterministic signal statistics for one photon number.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalMoments {
    pub mean: f64,
    pub variance: f64,
    /// `<o>(t_k)` on the grid.
    pub record: Vec<f64>,
}

pub fn evolve<R: RecordDynamics>(sys: &R, grid: &TimeGrid) -> Vec<R::State> {
    let mut xs = Vec::with_capacity(grid.n_steps + 1);
    let mut x = sys.initial();
    xs.push(x.clone());
    for k in 0..grid.n_steps {
        let t0 = grid.time(k);
        x = rk4_step_staged(grid.dt, &x, |st, y| sys.forward(t0, grid.dt, st, y));
        xs.push(x.clone());
    }
    xs
}

fn scaled<S: OdeState>(x: &S, a: f64) -> S {
    let mut z = x.clone();
    z.axpy(a - 1.0, x);
    z
}

/// Mean and variance with one forward and one backward sweep.
pub fn signal_moments<R: RecordDynamics>(sys: &R, grid: &TimeGrid) -> Result<SignalMoments> {
    let xs = evolve(sys, grid);
    let record: Vec<f64> = xs.iter().map(|x| sys.signal(x)).collect();
    let mean = trapezoid(&record, grid.dt);

    let o = sys.observable();
    let mut y = scaled(&o, 0.0);
    let mut kernel = vec![0.0; grid.n_steps + 1];
    for k in (0..grid.n_steps).rev() {
        let t0 = grid.time(k + 1);
        let h = -grid.dt;
        y = rk4_step_staged(h, &y, |st, v| {
            let mut d = sys.adjoint(t0, h, st, v);
            d.axpy(1.0, &o);
            scaled(&d, -1.0)
        });
        kernel[k] = sys.inner(&y, &sys.kick(&xs[k]));
    }
    let variance = sys.noise_density() * grid.t_end + 2.0 * trapezoid(&kernel, grid.dt) - mean * mean;
    check_variance(variance, sys.noise_density() * grid.t_end)?;
    Ok(SignalMoments { mean, variance, record })
}

/// Reference implementation: propagate the kicked state forward from every
/// grid time and integrate the record. Quadratic in the number of steps.
pub fn signal_moments_reintegrated<R: RecordDynamics>(sys: &R, grid: &TimeGrid) -> Result<SignalMoments> {
    let xs = evolve(sys, grid);
    let record: Vec<f64> = xs.iter().map(|x| sys.signal(x)).collect();
    let mean = trapezoid(&record, grid.dt);
    let mut kernel = vec![0.0; grid.n_steps + 1];
    for k in 0..grid.n_steps {
        let mut z = sys.kick(&xs[k]);
        let mut vals = Vec::with_capacity(grid.n_steps + 1 - k);
        vals.push(sys.signal(&z));
        for j in k..grid.n_steps {
            let t0 = grid.time(j);
            z = rk4_step_staged(grid.dt, &z, |st, v| sys.forward(t0, grid.dt, st, v));
            vals.push(sys.signal(&z));
        }
        kernel[k] = trapezoid(&vals, grid.dt);
    }
    let variance = sys.noise_density() * grid.t_end + 2.0 * trapezoid(&kernel, grid.dt) - mean * mean;
    check_variance(variance, sys.noise_density() * grid.t_end)?;
    Ok(SignalMoments { mean, variance, record })
}

fn check_variance(v: f64, scale: f64) -> Result<()> {
    if !v.is_finite() || v < -1e-6 * scale.max(1.0) {
        return Err(Error::NumericalConsistency(format!("signal variance {v:.6e} is negative")));
    }
    Ok(())
}
