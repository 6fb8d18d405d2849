//! Fixed-step classical Runge-Kutta integration.

use nalgebra::SMatrix;

use crate::C64;

/// A state that can be combined linearly by the integrator.
pub trait OdeState: Clone {
    /// `self += a * x`
    fn axpy(&mut self, a: f64, x: &Self);
}

impl<const R: usize, const C: usize> OdeState for SMatrix<C64, R, C> {
    fn axpy(&mut self, a: f64, x: &Self) {
        for (s, v) in self.iter_mut().zip(x.iter()) {
            *s += v * a;
        }
    }
}

impl OdeState for f64 {
    fn axpy(&mut self, a: f64, x: &Self) {
        *self += a * x;
    }
}

impl<S: OdeState, const N: usize> OdeState for [S; N] {
    fn axpy(&mut self, a: f64, x: &Self) {
        for (s, v) in self.iter_mut().zip(x.iter()) {
            s.axpy(a, v);
        }
    }
}

/// RK4 stage within a step: where the right-hand side is being evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Start,
    Mid,
    End,
}

/// One RK4 step of `dy/dt = f(t, y)` from `t` to `t + h`. A negative `h`
/// integrates backwards.
pub fn rk4_step<S, F>(t: f64, h: f64, y: &S, mut f: F) -> S
where
    S: OdeState,
    F: FnMut(f64, &S) -> S,
{
    rk4_step_staged(h, y, |stage, y| {
        let ts = match stage {
            Stage::Start => t,
            Stage::Mid => t + 0.5 * h,
            Stage::End => t + h,
        };
        f(ts, y)
    })
}

/// RK4 step where the right-hand side receives the stage instead of a time.
/// Drivers with jumps on grid points use this to pick one-sided limits.
pub fn rk4_step_staged<S, F>(h: f64, y: &S, mut f: F) -> S
where
    S: OdeState,
    F: FnMut(Stage, &S) -> S,
{
    let k1 = f(Stage::Start, y);
    let mut tmp = y.clone();
    tmp.axpy(0.5 * h, &k1);
    let k2 = f(Stage::Mid, &tmp);
    let mut tmp = y.clone();
    tmp.axpy(0.5 * h, &k2);
    let k3 = f(Stage::Mid, &tmp);
    let mut tmp = y.clone();
    tmp.axpy(h, &k3);
    let k4 = f(Stage::End, &tmp);

    let mut out = y.clone();
    out.axpy(h / 6.0, &k1);
    out.axpy(h / 3.0, &k2);
    out.axpy(h / 3.0, &k3);
    out.axpy(h / 6.0, &k4);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_is_fourth_order() {
        let exact = (-1.0f64).exp();
        let err = |n: usize| {
            let h = 1.0 / n as f64;
            let mut y = [1.0];
            for k in 0..n {
                y = rk4_step(k as f64 * h, h, &y, |_, y| [-y[0]]);
            }
            (y[0] - exact).abs()
        };
        let order = (err(10) / err(20)).log2();
        assert!(order > 3.9, "observed order {order}");
    }

    #[test]
    fn backward_step_inverts_forward_step() {
        let f = |t: f64, y: &[f64; 2]| [y[1], -y[0] + t.sin()];
        let y0 = [0.3, -0.2];
        let y1 = rk4_step(0.0, 1e-3, &y0, f);
        let y2 = rk4_step(1e-3, -1e-3, &y1, f);
        assert!((y2[0] - y0[0]).abs() < 1e-14);
        assert!((y2[1] - y0[1]).abs() < 1e-14);
    }
}
