//! N-type four-level transmon reduced to a ladder on dressed states.
//!
//! Levels `0..=3`; the signal couples 0–1, a strong drive `Ω` couples 1–2 and
//! the probe couples 2–3. Decay runs 1→0, 2→1 and 3→2. The drive dresses
//! 1–2 into `|±>`, with `|-> = cos θ |1> - sin θ |2>` and
//! `tan 2θ = Ω/Δ12`; tuning signal and probe to `|->` leaves the ladder
//! `|0> ↔ |-> ↔ |3>`.

use nalgebra::SMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::{Lindbladian, Op};
use crate::ode::rk4_step;
use crate::pulse::TimeGrid;
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourLevelParams {
    pub omega_drive: f64,
    pub delta_12: f64,
    pub delta_10: f64,
    pub delta_32: f64,
    pub gamma_01: f64,
    pub gamma_12: f64,
    pub gamma_32: f64,
    pub alpha: f64,
    pub beta_sig: f64,
}

impl FourLevelParams {
    /// Signal and probe resonant with `|->`.
    pub fn resonant(omega_drive: f64, delta_12: f64, gamma: f64, alpha: f64, beta_sig: f64) -> Self {
        let mut p = FourLevelParams {
            omega_drive,
            delta_12,
            delta_10: 0.0,
            delta_32: 0.0,
            gamma_01: gamma,
            gamma_12: gamma,
            gamma_32: gamma,
            alpha,
            beta_sig,
        };
        let lm = p.lambda_minus();
        p.delta_10 = lm;
        p.delta_32 = lm;
        p
    }

    pub fn theta_mix(&self) -> f64 {
        0.5 * self.omega_drive.atan2(self.delta_12)
    }

    fn root(&self) -> f64 {
        self.delta_12.hypot(self.omega_drive)
    }

    pub fn lambda_plus(&self) -> f64 {
        0.5 * self.delta_12 + 0.5 * self.root()
    }

    pub fn lambda_minus(&self) -> f64 {
        0.5 * self.delta_12 - 0.5 * self.root()
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.omega_drive,
            self.delta_12,
            self.delta_10,
            self.delta_32,
            self.gamma_01,
            self.gamma_12,
            self.gamma_32,
            self.alpha,
            self.beta_sig,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("four-level parameters must be finite"));
        }
        if [self.gamma_01, self.gamma_12, self.gamma_32].iter().any(|&g| g < 0.0) {
            return Err(Error::invalid("four-level decay rates must be non-negative"));
        }
        if self.omega_drive == 0.0 && self.delta_12 == 0.0 {
            return Err(Error::DegenerateDressing("omega_drive and delta_12 both vanish".into()));
        }
        Ok(())
    }

    /// `H = Δ10 σ00 + Δ12 σ22 + Δ32 σ33 + √γ01 β (σ01 + σ10) + Ω/2 (σ12 + σ21) + √γ32 α (σ23 + σ32)`.
    pub fn hamiltonian(&self) -> Op<4> {
        let mut h = Op::<4>::zeros();
        h[(0, 0)] = C64::from(self.delta_10);
        h[(2, 2)] = C64::from(self.delta_12);
        h[(3, 3)] = C64::from(self.delta_32);
        let g = [
            (0, 1, self.gamma_01.sqrt() * self.beta_sig),
            (1, 2, 0.5 * self.omega_drive),
            (2, 3, self.gamma_32.sqrt() * self.alpha),
        ];
        for (i, j, v) in g {
            h[(i, j)] = C64::from(v);
            h[(j, i)] = C64::from(v);
        }
        h
    }

    pub fn jumps(&self) -> Vec<Op<4>> {
        [(0, 1, self.gamma_01), (1, 2, self.gamma_12), (2, 3, self.gamma_32)]
            .iter()
            .map(|&(i, j, g)| {
                let mut l = Op::<4>::zeros();
                l[(i, j)] = C64::from(g.sqrt());
                l
            })
            .collect()
    }
}

/// Effective ladder on `(|0>, |->, |3>)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedLadder {
    pub theta: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    /// `cos θ √γ01 β`.
    pub coupling_0m: f64,
    /// `sin θ √γ32 α`.
    pub coupling_m3: f64,
    /// Jump amplitudes `|0><-|`, `|-><3|` and the dephasing of `|->`.
    pub decay_0m: f64,
    pub decay_m3: f64,
    pub dephasing_m: f64,
}

const RESONANCE_TOL: f64 = 1e-9;

pub fn four_level_reduce(p4: &FourLevelParams) -> Result<ReducedLadder> {
    p4.validate()?;
    let lm = p4.lambda_minus();
    let scale = 1.0 + lm.abs();
    if (p4.delta_10 - lm).abs() > RESONANCE_TOL * scale || (p4.delta_32 - lm).abs() > RESONANCE_TOL * scale {
        return Err(Error::invalid("signal and probe must be resonant with the lower dressed state"));
    }
    let th = p4.theta_mix();
    let (s, c) = th.sin_cos();
    Ok(ReducedLadder {
        theta: th,
        lambda_plus: p4.lambda_plus(),
        lambda_minus: lm,
        coupling_0m: c * p4.gamma_01.sqrt() * p4.beta_sig,
        coupling_m3: s * p4.gamma_32.sqrt() * p4.alpha,
        decay_0m: p4.gamma_01.sqrt() * c,
        decay_m3: p4.gamma_32.sqrt() * s,
        dephasing_m: p4.gamma_12.sqrt() * c * s,
    })
}

impl ReducedLadder {
    pub fn hamiltonian(&self) -> Op<3> {
        let mut h = Op::<3>::zeros();
        h[(0, 1)] = C64::from(self.coupling_0m);
        h[(1, 0)] = C64::from(self.coupling_0m);
        h[(1, 2)] = C64::from(self.coupling_m3);
        h[(2, 1)] = C64::from(self.coupling_m3);
        h
    }

    pub fn jumps(&self) -> Vec<Op<3>> {
        let mut a = Op::<3>::zeros();
        a[(0, 1)] = C64::from(self.decay_0m);
        let mut b = Op::<3>::zeros();
        b[(1, 2)] = C64::from(self.decay_m3);
        let mut d = Op::<3>::zeros();
        d[(1, 1)] = C64::from(self.dephasing_m);
        vec![a, b, d]
    }
}

/// Populations of the top level in both models, starting from `|0>`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourLevelComparison {
    pub times: Vec<f64>,
    pub pop4: Vec<f64>,
    pub pop3: Vec<f64>,
    /// Largest deviation of `Tr ρ` from 1 in the four-level run.
    pub trace_drift: f64,
}

impl FourLevelComparison {
    pub fn sup_norm(&self) -> f64 {
        self.pop4.iter().zip(&self.pop3).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

fn evolve<const D: usize>(l: &Lindbladian<D>, grid: &TimeGrid) -> Vec<Op<D>> {
    let mut x = SMatrix::<C64, D, D>::zeros();
    x[(0, 0)] = C64::from(1.0);
    let mut out = Vec::with_capacity(grid.n_steps + 1);
    out.push(x);
    for k in 0..grid.n_steps {
        x = rk4_step(grid.time(k), grid.dt, &x, |_, r| l.apply(r));
        out.push(x);
    }
    out
}

pub fn compare_four_level(p4: &FourLevelParams, grid: &TimeGrid) -> Result<FourLevelComparison> {
    let red = four_level_reduce(p4)?;
    let full = evolve(&Lindbladian::new(&p4.hamiltonian(), &p4.jumps()), grid);
    let small = evolve(&Lindbladian::new(&red.hamiltonian(), &red.jumps()), grid);
    let trace_drift = full.iter().map(|r| (r.trace() - C64::from(1.0)).norm()).fold(0.0, f64::max);
    if !(trace_drift <= 1e-8) {
        return Err(Error::IntegrationFailure {
            t: grid.t_end,
            reason: format!("four-level trace drifted by {trace_drift:e}"),
        });
    }
    Ok(FourLevelComparison {
        times: grid.times(),
        pop4: full.iter().map(|r| r[(3, 3)].re).collect(),
        pop3: small.iter().map(|r| r[(2, 2)].re).collect(),
        trace_drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn symmetric_dressing() {
        let p = FourLevelParams::resonant(10.0, 0.0, 1.0, 1.0, 1.0);
        let r = four_level_reduce(&p).unwrap();
        assert!((r.theta - FRAC_PI_4).abs() < 1e-15);
        assert!((r.lambda_plus - 5.0).abs() < 1e-15 && (r.lambda_minus + 5.0).abs() < 1e-15);
        assert!((r.coupling_0m - r.coupling_m3).abs() < 1e-15);
    }

    #[test]
    fn weak_drive_decouples_probe() {
        let p = FourLevelParams::resonant(1e-8, 2.0, 1.0, 1.0, 1.0);
        let r = four_level_reduce(&p).unwrap();
        assert!(r.theta.abs() < 1e-8 && r.coupling_m3.abs() < 1e-8);
    }

    #[test]
    fn errors() {
        let p = FourLevelParams::resonant(0.0, 0.0, 1.0, 1.0, 1.0);
        assert!(matches!(four_level_reduce(&p), Err(Error::DegenerateDressing(_))));
        let mut p = FourLevelParams::resonant(5.0, 0.0, 1.0, 1.0, 1.0);
        p.delta_32 += 0.1;
        assert!(four_level_reduce(&p).is_err());
    }

    #[test]
    fn lower_dressed_state_is_eigenvector() {
        let p = FourLevelParams::resonant(3.0, 1.7, 1.0, 1.0, 1.0);
        let (s, c) = p.theta_mix().sin_cos();
        let mut h = p.hamiltonian();
        h[(0, 1)] = C64::from(0.0);
        h[(1, 0)] = C64::from(0.0);
        h[(2, 3)] = C64::from(0.0);
        h[(3, 2)] = C64::from(0.0);
        let v = nalgebra::Vector4::new(C64::from(0.0), C64::from(c), C64::from(-s), C64::from(0.0));
        let hv = h * v;
        assert!((hv - v * C64::from(p.lambda_minus())).norm() < 1e-12);
    }

    #[test]
    fn reduction_improves_with_drive() {
        let grid = TimeGrid::new(20.0, 2e-3).unwrap();
        let d: Vec<f64> = [5.0, 10.0, 20.0, 40.0]
            .iter()
            .map(|&om| compare_four_level(&FourLevelParams::resonant(om, 0.0, 1.0, 1.0, 1.0), &grid).unwrap().sup_norm())
            .collect();
        assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
    }

    proptest! {
        #[test]
        fn dressing_identities(om in -50.0f64..50.0, d in -50.0f64..50.0, g in 0.1f64..3.0, a in 0.1f64..3.0, b in 0.1f64..3.0) {
            prop_assume!(om.abs() > 1e-3 || d.abs() > 1e-3);
            let p = FourLevelParams::resonant(om, d, g, a, b);
            prop_assert!((p.lambda_plus() + p.lambda_minus() - d).abs() < 1e-12 * (1.0 + d.abs() + om.abs()));
            let prod = p.lambda_plus() * p.lambda_minus() + om * om / 4.0;
            prop_assert!(prod.abs() < 1e-12 * (1.0 + d * d + om * om));
            let r = four_level_reduce(&p).unwrap();
            let x = r.coupling_0m / (g.sqrt() * b);
            let y = r.coupling_m3 / (g.sqrt() * a);
            prop_assert!((x * x + y * y - 1.0).abs() < 1e-12);
        }
    }
}
