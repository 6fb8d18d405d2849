//! One-photon wave-packet envelopes and time grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::Stage;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseKind {
    Exponential,
    Gaussian,
    Rectangular,
}

/// Real, non-negative envelope `f(t)` with `∫_0^∞ |f|² dt = 1`.
///
/// `width` is the characteristic time `tau`: the decay time of the
/// exponential, the standard width of the Gaussian and the duration of the
/// rectangle. `offset` is the Gaussian centre or the rectangle start.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseShape {
    pub kind: PulseKind,
    pub width: f64,
    pub offset: f64,
}

impl PulseShape {
    pub fn new(kind: PulseKind, width: f64, offset: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::invalid("pulse width must be positive"));
        }
        if !(offset.is_finite() && offset >= 0.0) {
            return Err(Error::invalid("pulse offset must be non-negative"));
        }
        Ok(PulseShape { kind, width, offset })
    }

    /// Default shape of the given kind for a source bandwidth `gamma_con`:
    /// `tau = 1/gamma_con`, Gaussians centred at `3 tau`.
    pub fn for_bandwidth(kind: PulseKind, gamma_con: f64) -> Result<Self> {
        if !(gamma_con.is_finite() && gamma_con > 0.0) {
            return Err(Error::invalid("gamma_con must be positive"));
        }
        let tau = 1.0 / gamma_con;
        let offset = match kind {
            PulseKind::Gaussian => 3.0 * tau,
            _ => 0.0,
        };
        Self::new(kind, tau, offset)
    }

    pub fn exponential(gamma_con: f64) -> Result<Self> {
        Self::for_bandwidth(PulseKind::Exponential, gamma_con)
    }

    fn gaussian_amp2(&self) -> f64 {
        let tau = self.width;
        let z0 = self.offset / tau;
        1.0 / (tau * std::f64::consts::PI.sqrt() * 0.5 * (1.0 + libm::erf(z0)))
    }

    /// `f(t)`; errors for negative times.
    pub fn amplitude(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::invalid(format!("pulse evaluated at negative time {t}")));
        }
        Ok(self.value(t))
    }

    /// `f(t)` for `t >= 0`. On a jump of the rectangle `|f|²` takes the mean
    /// of its one-sided limits, which keeps the trapezoid rule exact.
    pub fn value(&self, t: f64) -> f64 {
        let tau = self.width;
        match self.kind {
            PulseKind::Exponential => (-0.5 * t / tau).exp() / tau.sqrt(),
            PulseKind::Gaussian => {
                let z = (t - self.offset) / tau;
                self.gaussian_amp2().sqrt() * (-0.5 * z * z).exp()
            }
            PulseKind::Rectangular => {
                let (lo, hi) = (self.offset, self.offset + tau);
                let edge = (t == lo && lo > 0.0) || t == hi;
                if edge {
                    (0.5 / tau).sqrt()
                } else if t > lo && t < hi || t == 0.0 && lo == 0.0 {
                    1.0 / tau.sqrt()
                } else {
                    0.0
                }
            }
        }
    }

    /// Value used by an integrator stage on `[t0, t0 + h]`: one-sided limits
    /// at the ends so a rectangle edge on a grid point does not leak into the
    /// neighbouring step.
    pub fn stage_value(&self, t0: f64, h: f64, stage: Stage) -> f64 {
        let t = match stage {
            Stage::Start => t0,
            Stage::Mid => t0 + 0.5 * h,
            Stage::End => t0 + h,
        };
        if self.kind != PulseKind::Rectangular {
            return self.value(t.max(0.0));
        }
        let inside = |x: f64| x > self.offset && x < self.offset + self.width;
        let tol = 1e-9 * h.abs();
        let (lo, hi) = if h >= 0.0 { (t0, t0 + h) } else { (t0 + h, t0) };
        let probe = match stage {
            Stage::Mid => t,
            _ if (t - lo).abs() <= tol => lo + tol.max(f64::EPSILON * lo.abs()) * 2.0,
            _ if (t - hi).abs() <= tol => hi - tol.max(f64::EPSILON * hi.abs()) * 2.0,
            _ => t,
        };
        if inside(probe) {
            1.0 / self.width.sqrt()
        } else {
            0.0
        }
    }

    /// `∫_0^t |f|² ds` in closed form.
    pub fn cumulative(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        let tau = self.width;
        match self.kind {
            PulseKind::Exponential => -(-t / tau).exp_m1(),
            PulseKind::Gaussian => {
                let z0 = self.offset / tau;
                let z = (t - self.offset) / tau;
                (libm::erf(z) + libm::erf(z0)) / (1.0 + libm::erf(z0))
            }
            PulseKind::Rectangular => ((t - self.offset) / tau).clamp(0.0, 1.0),
        }
    }

    /// Earliest time with `∫_0^T |f|² >= 1 - epsilon`, not grid aligned.
    pub fn capture_time(&self, epsilon: f64) -> Result<f64> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::invalid("epsilon must lie in (0, 1)"));
        }
        let tau = self.width;
        Ok(match self.kind {
            PulseKind::Exponential => -tau * epsilon.ln(),
            PulseKind::Rectangular => self.offset + tau,
            PulseKind::Gaussian => {
                let target = 1.0 - epsilon;
                let (mut lo, mut hi) = (0.0, self.offset + 40.0 * tau);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.cumulative(mid) >= target {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                hi
            }
        })
    }
}

/// Smallest multiple of `dt` capturing all but `epsilon` of the photon.
pub fn capture_horizon(pulse: &PulseShape, epsilon: f64, dt: f64) -> Result<f64> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::invalid("dt must be positive"));
    }
    let t = pulse.capture_time(epsilon)?;
    let n = (t / dt - 1e-9).ceil().max(1.0);
    Ok(n * dt)
}

/// Uniform grid `t_k = k dt`, `k = 0..=n_steps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_end: f64,
    pub dt: f64,
    pub n_steps: usize,
}

impl TimeGrid {
    /// Grid over `[0, t_end]` with step as close to `dt` as divides `t_end`.
    pub fn new(t_end: f64, dt: f64) -> Result<Self> {
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(Error::invalid("grid end time must be positive"));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::invalid("dt must be positive"));
        }
        let n = ((t_end / dt).round() as usize).max(1);
        Ok(TimeGrid { t_end, dt: t_end / n as f64, n_steps: n })
    }

    pub fn from_steps(dt: f64, n_steps: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) || n_steps == 0 {
            return Err(Error::invalid("grid needs a positive step and at least one step"));
        }
        Ok(TimeGrid { t_end: dt * n_steps as f64, dt, n_steps })
    }

    /// Default horizon for a pulse: capture to `e^-10`, then `5/gamma_b` of
    /// ring-down. Rectangular pulses get a step that divides their duration.
    pub fn for_pulse(pulse: &PulseShape, dt: f64, gamma_b: f64) -> Result<Self> {
        if !(gamma_b.is_finite() && gamma_b > 0.0) {
            return Err(Error::invalid("gamma_b must be positive"));
        }
        let dt = match pulse.kind {
            PulseKind::Rectangular => pulse.width / (pulse.width / dt).ceil(),
            _ => dt,
        };
        let t_cap = capture_horizon(pulse, (-10f64).exp(), dt)?;
        let n_cap = (t_cap / dt).round() as usize;
        let n_ring = ((5.0 / gamma_b) / dt - 1e-9).ceil() as usize;
        Self::from_steps(dt, n_cap + n_ring)
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n_steps).map(|k| self.time(k)).collect()
    }

    pub fn with_dt(&self, dt: f64) -> Result<Self> {
        Self::new(self.t_end, dt)
    }
}

/// Trapezoid rule on uniformly spaced samples.
pub fn trapezoid(values: &[f64], dt: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => dt * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])),
    }
}

/// Trapezoid sum of `|f|²` over the grid.
pub fn grid_norm(pulse: &PulseShape, grid: &TimeGrid) -> f64 {
    let v: Vec<f64> = grid.times().iter().map(|&t| pulse.value(t).powi(2)).collect();
    trapezoid(&v, grid.dt)
}
