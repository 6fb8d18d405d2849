//! One-photon Fock-state master-equation hierarchy.
//!
//! A transmon driven through `L_b` by a one-photon wave packet `f(t)` is
//! described by four generalised density matrices `ρ_mn`, `m, n ∈ {0, 1}`:
//!
//! ```text
//! dρ_mn/dt = L ρ_mn + √n f* [L_b, ρ_m,n-1] + √m f [ρ_m-1,n, L_b†]
//! ```
//!
//! `ρ_11` is the physical transmon state; `ρ_01` and `ρ_10 = ρ_01†` are
//! traceless coherences. The `(1, 0)` block is integrated on its own rather
//! than taken as the adjoint of `(0, 1)`, so their agreement checks the
//! integrator.

use crate::error::{Error, Result};
use crate::lindblad::{hermiticity_defect, max_abs, Op, SparseOp};
use crate::model::{self, MeasuredSystem};
use crate::ode::Stage;
use crate::pulse::{trapezoid, PulseShape, TimeGrid};
use crate::qutrit::{self, min_eigenvalue, SystemParams};
use crate::regression::{self, RecordDynamics, SignalMoments};
use crate::variants::SqueezeParams;
use crate::C64;

/// Blocks in the order `(00, 01, 10, 11)`.
pub type Blocks = [Op<3>; 4];

#[derive(Clone, Debug, PartialEq)]
pub struct FockHierarchy {
    pub rho00: Op<3>,
    pub rho01: Op<3>,
    pub rho10: Op<3>,
    pub rho11: Op<3>,
}

impl From<&Blocks> for FockHierarchy {
    fn from(b: &Blocks) -> Self {
        FockHierarchy { rho00: b[0], rho01: b[1], rho10: b[2], rho11: b[3] }
    }
}

impl FockHierarchy {
    pub fn ground() -> Self {
        let g = qutrit::DensityMatrix::ground().into_inner();
        FockHierarchy { rho00: g, rho01: Op::<3>::zeros(), rho10: Op::<3>::zeros(), rho11: g }
    }

    pub fn blocks(&self) -> Blocks {
        [self.rho00, self.rho01, self.rho10, self.rho11]
    }
}

/// The hierarchy as a linear system with the homodyne record of `ρ_11`.
pub struct FockDynamics {
    system: MeasuredSystem<3>,
    pulse: Option<PulseShape>,
    lb: SparseOp<3>,
    lbd: SparseOp<3>,
    observable: Op<3>,
}

impl FockDynamics {
    /// `pulse = None` is the zero-photon drive `f ≡ 0`.
    pub fn new(system: MeasuredSystem<3>, lb: Op<3>, pulse: Option<PulseShape>) -> Self {
        let observable = system.record_observable();
        FockDynamics {
            lb: SparseOp::from_dense(&lb),
            lbd: SparseOp::from_dense(&lb.adjoint()),
            system,
            pulse,
            observable,
        }
    }

    pub fn for_params(p: &SystemParams, pulse: Option<PulseShape>) -> Result<Self> {
        Self::squeezed(p, None, pulse)
    }

    /// Hierarchy with the probe in a squeezed bath.
    pub fn squeezed(p: &SystemParams, sq: Option<&SqueezeParams>, pulse: Option<PulseShape>) -> Result<Self> {
        Ok(Self::new(model::transmon(p, sq)?, qutrit::l_b(p), pulse))
    }

    pub fn system(&self) -> &MeasuredSystem<3> {
        &self.system
    }

    fn f(&self, t0: f64, h: f64, stage: Stage) -> f64 {
        self.pulse.map_or(0.0, |p| p.stage_value(t0, h, stage))
    }

    /// `[A, X]` for sparse `A`, scaled by `c` and added to `out`.
    fn comm_acc(a: &SparseOp<3>, x: &Op<3>, c: C64, out: &mut Op<3>) {
        let ax = a.left_mul(x);
        let xa = a.right_mul(x);
        *out += (ax - xa) * c;
    }
}

impl RecordDynamics for FockDynamics {
    type State = Blocks;

    fn initial(&self) -> Blocks {
        FockHierarchy::ground().blocks()
    }

    fn forward(&self, t0: f64, h: f64, stage: Stage, x: &Blocks) -> Blocks {
        let g = self.system.generator();
        let f = C64::from(self.f(t0, h, stage));
        let mut d = [g.apply(&x[0]), g.apply(&x[1]), g.apply(&x[2]), g.apply(&x[3])];
        if f.norm() > 0.0 {
            // √n f* [L_b, ρ_m,n-1]
            Self::comm_acc(&self.lb, &x[0], f.conj(), &mut d[1]);
            Self::comm_acc(&self.lb, &x[2], f.conj(), &mut d[3]);
            // √m f [ρ_m-1,n, L_b†] = -f [L_b†, ρ_m-1,n]
            Self::comm_acc(&self.lbd, &x[0], -f, &mut d[2]);
            Self::comm_acc(&self.lbd, &x[1], -f, &mut d[3]);
        }
        d
    }

    fn adjoint(&self, t0: f64, h: f64, stage: Stage, y: &Blocks) -> Blocks {
        let g = self.system.generator();
        let f = C64::from(self.f(t0, h, stage));
        let mut d = [g.apply_adjoint(&y[0]), g.apply_adjoint(&y[1]), g.apply_adjoint(&y[2]), g.apply_adjoint(&y[3])];
        if f.norm() > 0.0 {
            Self::comm_acc(&self.lbd, &y[1], f, &mut d[0]);
            Self::comm_acc(&self.lb, &y[2], -f.conj(), &mut d[0]);
            Self::comm_acc(&self.lb, &y[3], -f.conj(), &mut d[1]);
            Self::comm_acc(&self.lbd, &y[3], f, &mut d[2]);
        }
        d
    }

    fn signal(&self, x: &Blocks) -> f64 {
        (self.observable * x[3]).trace().re
    }

    fn observable(&self) -> Blocks {
        let z = Op::<3>::zeros();
        [z, z, z, self.observable]
    }

    fn kick(&self, x: &Blocks) -> Blocks {
        [self.system.kick(&x[0]), self.system.kick(&x[1]), self.system.kick(&x[2]), self.system.kick(&x[3])]
    }

    fn inner(&self, y: &Blocks, x: &Blocks) -> f64 {
        y.iter().zip(x.iter()).map(|(a, b)| (a.adjoint() * b).trace().re).sum()
    }

    fn noise_density(&self) -> f64 {
        self.system.noise_density()
    }
}

/// Stored hierarchy trajectory.
#[derive(Clone, Debug)]
pub struct FockEvolution {
    pub times: Vec<f64>,
    pub states: Vec<FockHierarchy>,
    /// `<y>` from `ρ_11` at each time.
    pub polarisation: Vec<f64>,
}

/// Check the hierarchy invariants; tolerance on the trace drift is `1e-6`.
fn check_state(s: &Blocks, t: f64) -> Result<()> {
    let fail = |reason: String| Err(Error::IntegrationFailure { t, reason });
    let tr = s[3].trace();
    if !tr.re.is_finite() || (tr - C64::from(1.0)).norm() > 1e-6 {
        return fail(format!("trace of rho11 drifted to {tr}"));
    }
    if s[1].trace().norm() > 1e-6 {
        return fail("rho01 lost tracelessness".into());
    }
    Ok(())
}

pub fn evolve_with(dynamics: &FockDynamics, p: &SystemParams, grid: &TimeGrid) -> Result<FockEvolution> {
    let xs = regression::evolve(dynamics, grid);
    let times = grid.times();
    let mut states = Vec::with_capacity(xs.len());
    let mut pol = Vec::with_capacity(xs.len());
    for (x, &t) in xs.iter().zip(times.iter()) {
        check_state(x, t)?;
        pol.push(qutrit::polarisation(&x[3], p)?);
        states.push(FockHierarchy::from(x));
    }
    Ok(FockEvolution { times, states, polarisation: pol })
}

/// Integrate the hierarchy from the ground state.
pub fn evolve_hierarchy(p: &SystemParams, pulse: &PulseShape, grid: &TimeGrid) -> Result<FockEvolution> {
    let dynamics = FockDynamics::for_params(p, Some(*pulse))?;
    evolve_with(&dynamics, p, grid)
}

/// `E[S_1] = ∫ <y> dt` by the trapezoid rule.
pub fn expected_signal(p: &SystemParams, pulse: &PulseShape, grid: &TimeGrid) -> Result<f64> {
    let ev = evolve_hierarchy(p, pulse, grid)?;
    Ok(trapezoid(&ev.polarisation, grid.dt))
}

/// Mean and regression variance of the one-photon signal.
pub fn signal_moments(p: &SystemParams, pulse: &PulseShape, grid: &TimeGrid) -> Result<SignalMoments> {
    let dynamics = FockDynamics::for_params(p, Some(*pulse))?;
    regression::signal_moments(&dynamics, grid)
}

/// Largest deviation from the hierarchy invariants over a stored run:
/// `(trace drift of ρ11, |Tr ρ01|, ‖ρ10 - ρ01†‖, min eigenvalue of ρ11, Hermiticity of ρ11)`.
pub fn invariant_report(ev: &FockEvolution) -> (f64, f64, f64, f64, f64) {
    let mut r = (0.0f64, 0.0f64, 0.0f64, f64::INFINITY, 0.0f64);
    for s in &ev.states {
        r.0 = r.0.max((s.rho11.trace() - C64::from(1.0)).norm());
        r.1 = r.1.max(s.rho01.trace().norm());
        r.2 = r.2.max(max_abs(&(s.rho10 - s.rho01.adjoint())));
        r.3 = r.3.min(min_eigenvalue(&s.rho11));
        r.4 = r.4.max(hermiticity_defect(&s.rho11));
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::PulseKind;

    fn fig2() -> SystemParams {
        SystemParams { beta: 0.4, gamma_con: 0.6672, ..Default::default() }
    }

    #[test]
    fn zero_photon_is_dark() {
        let p = fig2();
        let grid = TimeGrid::new(10.0, 1e-2).unwrap();
        let dynamics = FockDynamics::for_params(&p, None).unwrap();
        let ev = evolve_with(&dynamics, &p, &grid).unwrap();
        let g = FockHierarchy::ground();
        for s in &ev.states {
            assert_eq!(s.rho11, g.rho11);
        }
        assert!(ev.polarisation.iter().all(|&y| y == 0.0));
    }

    #[test]
    fn rho00_is_stationary() {
        for beta in [0.0, 0.4, 1.3] {
            let p = SystemParams { beta, delta_b: 0.5, ..fig2() };
            let pulse = PulseShape::exponential(p.gamma_con).unwrap();
            let grid = TimeGrid::new(8.0, 1e-2).unwrap();
            let ev = evolve_hierarchy(&p, &pulse, &grid).unwrap();
            let g = FockHierarchy::ground().rho00;
            assert!(ev.states.iter().all(|s| s.rho00 == g));
        }
    }

    #[test]
    fn invariants_hold_for_all_shapes() {
        for kind in [PulseKind::Exponential, PulseKind::Gaussian, PulseKind::Rectangular] {
            for beta in [0.1, 0.4, 1.0] {
                let p = SystemParams { beta, delta_b: 0.3, delta_c: -0.4, ..fig2() };
                let pulse = PulseShape::for_bandwidth(kind, p.gamma_con).unwrap();
                let grid = TimeGrid::for_pulse(&pulse, 1e-2, 1.0).unwrap();
                let ev = evolve_hierarchy(&p, &pulse, &grid).unwrap();
                let (tr, tr01, herm, ev_min, h11) = invariant_report(&ev);
                assert!(tr < 1e-8 && tr01 < 1e-10 && herm < 1e-10 && ev_min > -1e-8 && h11 < 1e-10,
                    "{kind:?} {beta}: {tr:e} {tr01:e} {herm:e} {ev_min:e} {h11:e}");
                let bound = p.gamma_c.sqrt();
                assert!(ev.polarisation.iter().all(|y| y.abs() <= bound));
                let s = trapezoid(&ev.polarisation, grid.dt);
                assert!(s.abs() <= bound * grid.t_end);
            }
        }
    }

    #[test]
    fn adjoint_matches_forward_duality() {
        let p = SystemParams { delta_b: 0.2, ..fig2() };
        let d = FockDynamics::for_params(&p, PulseShape::exponential(p.gamma_con).ok()).unwrap();
        let mk = |s: f64| -> Blocks {
            let m = |k: f64| Op::<3>::from_fn(|i, j| C64::new((i as f64 + k * j as f64 + s).sin(), (k * i as f64 - s * j as f64).cos()));
            [m(0.3), m(1.1), m(-0.7), m(2.0)]
        };
        let (x, y) = (mk(0.1), mk(0.9));
        let gx = d.forward(0.4, 0.1, Stage::Mid, &x);
        let gy = d.adjoint(0.4, 0.1, Stage::Mid, &y);
        let lhs: C64 = y.iter().zip(gx.iter()).map(|(a, b)| (a.adjoint() * b).trace()).sum();
        let rhs: C64 = gy.iter().zip(x.iter()).map(|(a, b)| (a.adjoint() * b).trace()).sum();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn adjoint_variance_matches_reintegration() {
        let p = fig2();
        let pulse = PulseShape::exponential(p.gamma_con).unwrap();
        let grid = TimeGrid::new(12.0, 2e-2).unwrap();
        let d = FockDynamics::for_params(&p, Some(pulse)).unwrap();
        let a = regression::signal_moments(&d, &grid).unwrap();
        let b = regression::signal_moments_reintegrated(&d, &grid).unwrap();
        assert_eq!(a.mean, b.mean);
        assert!((a.variance - b.variance).abs() < 1e-3 * a.variance, "{} {}", a.variance, b.variance);
    }

    #[test]
    fn vacuum_noise_without_probe() {
        let p = SystemParams { beta: 0.0, ..fig2() };
        let pulse = PulseShape::exponential(p.gamma_con).unwrap();
        let grid = TimeGrid::new(10.0, 1e-2).unwrap();
        let m = signal_moments(&p, &pulse, &grid).unwrap();
        assert_eq!(m.mean, 0.0);
        assert!((m.variance - grid.t_end).abs() < 1e-12);
    }
}
