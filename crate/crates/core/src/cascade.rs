//! Homodyne trajectories of the source cavity cascaded into the transmon.
//!
//! Each step draws `ΔW ~ N(0, dt)` from a per-trajectory ChaCha stream
//! seeded with `base_seed + k`, records
//! `J_k = s (Tr[(c + c†) ρ_k] + ΔW / dt)` and updates the conditional state.
//! The default update is the Kraus form
//!
//! ```text
//! M = I + K dt + c dY + ½ c² (dY² - dt),   dY = Tr[(c + c†) ρ] dt + ΔW
//! ρ' ∝ M ρ M† + Σ_j J_j ρ J_j† dt
//! ```
//!
//! with `K = -iH - ½ Σ L†L` over all jumps. It agrees with the
//! Euler–Maruyama update of the normalised equation to first order and keeps
//! the state positive at the default step, where plain Euler–Maruyama
//! produces negative eigenvalues of order `1e-3` on long runs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::{max_abs, Op, SparseOp};
use crate::model::{self, MeasuredSystem};
use crate::ode::{rk4_step_staged, Stage};
use crate::pulse::TimeGrid;
use crate::qutrit::{self, SystemParams};
use crate::regression::RecordDynamics;
use crate::variants::SqueezeParams;
use crate::C64;

/// Smallest eigenvalue tolerated after a Kraus step.
pub const POSITIVITY_FLOOR: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmeScheme {
    #[default]
    Kraus,
    EulerMaruyama,
}

/// Operators of a measured system prepared for stepping at a fixed `dt`.
#[derive(Clone, Debug)]
pub struct SmeOperators<const D: usize> {
    pub system: MeasuredSystem<D>,
    pub dt: f64,
    pub scheme: SmeScheme,
    a: SparseOp<D>,
    a_adj: SparseOp<D>,
    c: SparseOp<D>,
    c_adj: SparseOp<D>,
    c2: SparseOp<D>,
    c2_adj: SparseOp<D>,
    jumps: Vec<(SparseOp<D>, SparseOp<D>)>,
    observable: SparseOp<D>,
    observable_bound: f64,
    floor: f64,
}

impl<const D: usize> SmeOperators<D> {
    pub fn new(system: MeasuredSystem<D>, dt: f64, scheme: SmeScheme) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::invalid("dt must be positive"));
        }
        let k = system.generator().k();
        let a = Op::<D>::identity() + k * C64::from(dt);
        let c = system.measured;
        let c2 = c * c;
        let obs = system.record_observable();
        let bound = spectral_radius_hermitian(&obs);
        let jumps = system
            .jumps
            .iter()
            .map(|l| (SparseOp::from_dense(l), SparseOp::from_dense(&l.adjoint())))
            .collect();
        Ok(SmeOperators {
            a: SparseOp::from_dense(&a),
            a_adj: SparseOp::from_dense(&a.adjoint()),
            c: SparseOp::from_dense(&c),
            c_adj: SparseOp::from_dense(&c.adjoint()),
            c2: SparseOp::from_dense(&c2),
            c2_adj: SparseOp::from_dense(&c2.adjoint()),
            jumps,
            observable: SparseOp::from_dense(&obs),
            observable_bound: bound,
            // Euler steps from a pure state open coherences before populations,
            // so eigenvalues of order -dt² are expected and not a failure.
            floor: match scheme {
                SmeScheme::Kraus => POSITIVITY_FLOOR,
                SmeScheme::EulerMaruyama => POSITIVITY_FLOOR.max(dt),
            },
            system,
            dt,
            scheme,
        })
    }

    /// `Tr[(c + c†) ρ]`, the drift of the innovation.
    fn innovation_mean(&self, rho: &Op<D>) -> f64 {
        let cr = self.c.left_mul(rho);
        2.0 * cr.trace().re
    }

    /// `<s (c + c†)>`, the noise-free record.
    pub fn record_mean(&self, rho: &Op<D>) -> f64 {
        self.observable.left_mul(rho).trace().re
    }

    pub fn record_bound(&self) -> f64 {
        self.observable_bound
    }
}

fn spectral_radius_hermitian<const D: usize>(m: &Op<D>) -> f64 {
    let h = nalgebra::DMatrix::from_fn(D, D, |i, j| m[(i, j)]);
    h.symmetric_eigenvalues().iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

/// `true` when `m + shift I` admits a Cholesky factorisation.
pub fn is_positive_shifted<const D: usize>(m: &Op<D>, shift: f64) -> bool {
    let mut l = [[C64::from(0.0); D]; D];
    for j in 0..D {
        let mut d = m[(j, j)].re + shift;
        for k in 0..j {
            d -= l[j][k].norm_sqr();
        }
        if !(d > 0.0) {
            return false;
        }
        let d = d.sqrt();
        l[j][j] = C64::from(d);
        for i in j + 1..D {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[i][k] * l[j][k].conj();
            }
            l[i][j] = s / d;
        }
    }
    true
}

/// One conditional update. Returns the new state and the record sample
/// `J = s (Tr[(c + c†) ρ] + ΔW/dt)` taken before the update.
pub fn sme_step<const D: usize>(rho: &Op<D>, dw: f64, ops: &SmeOperators<D>) -> Result<(Op<D>, f64)> {
    let dt = ops.dt;
    let mean = ops.innovation_mean(rho);
    let j = ops.system.record_scale * (mean + dw / dt);
    let mut next = match ops.scheme {
        SmeScheme::Kraus => {
            let dy = mean * dt + dw;
            let q = 0.5 * (dy * dy - dt);
            let (dyc, qc) = (C64::from(dy), C64::from(q));
            let mut x = ops.a.left_mul(rho);
            x += ops.c.left_mul(rho) * dyc;
            x += ops.c2.left_mul(rho) * qc;
            let mut out = ops.a_adj.right_mul(&x);
            out += ops.c_adj.right_mul(&x) * dyc;
            out += ops.c2_adj.right_mul(&x) * qc;
            for (l, ld) in &ops.jumps {
                let lr = l.left_mul(rho);
                out += ld.right_mul(&lr) * C64::from(dt);
            }
            out
        }
        SmeScheme::EulerMaruyama => {
            let drift = ops.system.generator().apply(rho);
            let cr = ops.c.left_mul(rho);
            let h = cr + cr.adjoint() - rho * C64::from(mean);
            rho + drift * C64::from(dt) + h * C64::from(dw)
        }
    };
    next = (next + next.adjoint()) * C64::from(0.5);
    let tr = next.trace().re;
    if !(tr.is_finite() && tr > 0.0) {
        return Err(Error::StepSize { t: f64::NAN, reason: format!("trace became {tr}") });
    }
    next *= C64::from(1.0 / tr);
    if !is_positive_shifted(&next, ops.floor) {
        return Err(Error::StepSize {
            t: f64::NAN,
            reason: format!("eigenvalue below -{:e}", ops.floor),
        });
    }
    Ok((next, j))
}

/// Cascade operators for the given parameters.
pub fn cascade_operators(
    p: &SystemParams,
    sq: Option<&SqueezeParams>,
    dt: f64,
    scheme: SmeScheme,
) -> Result<SmeOperators<6>> {
    SmeOperators::new(model::cascade(p, sq)?, dt, scheme)
}

/// Squeezed-probe update of the joint state. Builds the operators on every
/// call; loops should construct [`SmeOperators`] once instead.
pub fn squeezed_sme_step(rho: &Op<6>, dw: f64, dt: f64, p: &SystemParams, sq: &SqueezeParams) -> Result<(Op<6>, f64)> {
    let ops = cascade_operators(p, Some(sq), dt, SmeScheme::default())?;
    sme_step(rho, dw, &ops)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub seed: u64,
    pub grid: TimeGrid,
    pub j_samples: Vec<f64>,
    pub signal: f64,
    pub n_photon: u8,
    /// Largest `|<s (c + c†)>|` along the trajectory.
    pub max_abs_record_mean: f64,
}

/// Summary of a trajectory without the per-step record.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectorySummary {
    pub signal: f64,
    pub noise_integral: f64,
    pub max_abs_record_mean: f64,
}

fn check_photon(n_photon: u8) -> Result<()> {
    if n_photon > 1 {
        return Err(Error::invalid("photon number must be 0 or 1"));
    }
    Ok(())
}

/// Run one trajectory. `visit(k, ρ_k, J_k)` sees every step; `snapshots`
/// receives the state after the listed step counts.
fn run<const D: usize>(
    ops: &SmeOperators<D>,
    initial: &Op<D>,
    grid: &TimeGrid,
    seed: u64,
    mut visit: impl FnMut(usize, &Op<D>, f64),
) -> Result<TrajectorySummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sdt = grid.dt.sqrt();
    let mut rho = *initial;
    let mut signal = 0.0;
    let mut noise = 0.0;
    let mut max_y = 0.0f64;
    let bound = ops.record_bound() * (1.0 + 1e-9) + 1e-12;
    for k in 0..grid.n_steps {
        let z: f64 = StandardNormal.sample(&mut rng);
        let dw = sdt * z;
        let y = ops.record_mean(&rho);
        if y.abs() > bound {
            return Err(Error::NumericalConsistency(format!(
                "record mean {y} exceeds the operator bound {bound} at t = {}",
                grid.time(k)
            )));
        }
        max_y = max_y.max(y.abs());
        let (next, j) = sme_step(&rho, dw, ops).map_err(|e| match e {
            Error::StepSize { reason, .. } => Error::StepSize { t: grid.time(k), reason },
            other => other,
        })?;
        visit(k, &rho, j);
        signal += j * grid.dt;
        noise += dw;
        rho = next;
    }
    visit(grid.n_steps, &rho, f64::NAN);
    Ok(TrajectorySummary { signal, noise_integral: noise, max_abs_record_mean: max_y })
}

/// One seeded trajectory starting from `|n_photon> ⊗ |a>`.
pub fn simulate_trajectory(
    ops: &SmeOperators<6>,
    grid: &TimeGrid,
    seed: u64,
    n_photon: u8,
) -> Result<TrajectoryRecord> {
    check_photon(n_photon)?;
    check_grid(ops.dt, grid)?;
    let mut j_samples = Vec::with_capacity(grid.n_steps);
    let s = run(ops, &model::joint_initial(n_photon), grid, seed, |k, _, j| {
        if k < grid.n_steps {
            j_samples.push(j);
        }
    })
    .map_err(|e| Error::Trajectory { seed, source: Box::new(e) })?;
    Ok(TrajectoryRecord {
        seed,
        grid: *grid,
        j_samples,
        signal: s.signal,
        n_photon,
        max_abs_record_mean: s.max_abs_record_mean,
    })
}

/// Conditional joint states after the listed step counts.
pub fn conditional_states(
    ops: &SmeOperators<6>,
    grid: &TimeGrid,
    seed: u64,
    n_photon: u8,
    steps: &[usize],
) -> Result<Vec<Op<6>>> {
    check_photon(n_photon)?;
    check_grid(ops.dt, grid)?;
    let mut out = vec![Op::<6>::zeros(); steps.len()];
    run(ops, &model::joint_initial(n_photon), grid, seed, |k, rho, _| {
        for (slot, &s) in out.iter_mut().zip(steps) {
            if s == k {
                *slot = *rho;
            }
        }
    })
    .map_err(|e| Error::Trajectory { seed, source: Box::new(e) })?;
    Ok(out)
}

fn check_grid(dt: f64, grid: &TimeGrid) -> Result<()> {
    if (dt - grid.dt).abs() > 1e-15 * dt.max(1.0) {
        return Err(Error::invalid(format!(
            "operators prepared for dt = {dt} but grid has dt = {}",
            grid.dt
        )));
    }
    Ok(())
}

/// Integrated signals of an ensemble, ordered by seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalSamples {
    pub values: Vec<f64>,
    pub n_photon: u8,
    pub n_traj: usize,
    pub base_seed: u64,
    /// `∫ dW` per trajectory, for noise calibration.
    pub noise_integrals: Vec<f64>,
    pub max_abs_record_mean: f64,
}

impl SignalSamples {
    pub fn new(values: Vec<f64>, n_photon: u8) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InsufficientSamples { needed: 2, got: values.len() });
        }
        Ok(SignalSamples {
            n_traj: values.len(),
            noise_integrals: vec![],
            values,
            n_photon,
            base_seed: 0,
            max_abs_record_mean: 0.0,
        })
    }
}

/// `n_traj` trajectories with seeds `base_seed + k`, run in parallel.
pub fn simulate_ensemble<const D: usize>(
    ops: &SmeOperators<D>,
    initial: &Op<D>,
    grid: &TimeGrid,
    n_traj: usize,
    base_seed: u64,
    n_photon: u8,
) -> Result<SignalSamples> {
    check_photon(n_photon)?;
    check_grid(ops.dt, grid)?;
    if n_traj < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: n_traj });
    }
    let results: Vec<Result<TrajectorySummary>> = (0..n_traj as u64)
        .into_par_iter()
        .map(|k| {
            let seed = base_seed.wrapping_add(k);
            run(ops, initial, grid, seed, |_, _, _| {})
                .map_err(|e| Error::Trajectory { seed, source: Box::new(e) })
        })
        .collect();
    let mut values = Vec::with_capacity(n_traj);
    let mut noise = Vec::with_capacity(n_traj);
    let mut max_y = 0.0f64;
    for r in results {
        let s = r?;
        values.push(s.signal);
        noise.push(s.noise_integral);
        max_y = max_y.max(s.max_abs_record_mean);
    }
    Ok(SignalSamples {
        values,
        n_photon,
        n_traj,
        base_seed,
        noise_integrals: noise,
        max_abs_record_mean: max_y,
    })
}

/// Ensemble of the cascaded model for `n_photon` control photons.
pub fn simulate_cascade_ensemble(
    ops: &SmeOperators<6>,
    grid: &TimeGrid,
    n_traj: usize,
    base_seed: u64,
    n_photon: u8,
) -> Result<SignalSamples> {
    simulate_ensemble(ops, &model::joint_initial(n_photon), grid, n_traj, base_seed, n_photon)
}

/// Joint state evolution without measurement.
pub struct CascadeDynamics {
    system: MeasuredSystem<6>,
    initial: Op<6>,
    observable: Op<6>,
}

impl CascadeDynamics {
    pub fn new(system: MeasuredSystem<6>, n_photon: u8) -> Result<Self> {
        check_photon(n_photon)?;
        let observable = system.record_observable();
        Ok(CascadeDynamics { system, initial: model::joint_initial(n_photon), observable })
    }
}

impl RecordDynamics for CascadeDynamics {
    type State = Op<6>;

    fn initial(&self) -> Op<6> {
        self.initial
    }

    fn forward(&self, _t0: f64, _h: f64, _stage: Stage, x: &Op<6>) -> Op<6> {
        self.system.generator().apply(x)
    }

    fn adjoint(&self, _t0: f64, _h: f64, _stage: Stage, y: &Op<6>) -> Op<6> {
        self.system.generator().apply_adjoint(y)
    }

    fn signal(&self, x: &Op<6>) -> f64 {
        (self.observable * x).trace().re
    }

    fn observable(&self) -> Op<6> {
        self.observable
    }

    fn kick(&self, x: &Op<6>) -> Op<6> {
        self.system.kick(x)
    }

    fn inner(&self, y: &Op<6>, x: &Op<6>) -> f64 {
        (y.adjoint() * x).trace().re
    }

    fn noise_density(&self) -> f64 {
        self.system.noise_density()
    }
}

/// Unconditional evolution traced over the cavity.
#[derive(Clone, Debug)]
pub struct UnconditionalEvolution {
    pub times: Vec<f64>,
    pub joint: Vec<Op<6>>,
    pub reduced: Vec<Op<3>>,
    pub polarisation: Vec<f64>,
    pub cavity_population: Vec<f64>,
}

pub fn unconditional_evolve(p: &SystemParams, grid: &TimeGrid, n_photon: u8) -> Result<UnconditionalEvolution> {
    let dynamics = CascadeDynamics::new(model::cascade(p, None)?, n_photon)?;
    let mut x = dynamics.initial();
    let times = grid.times();
    let mut joint = Vec::with_capacity(times.len());
    joint.push(x);
    for k in 0..grid.n_steps {
        x = rk4_step_staged(grid.dt, &x, |st, v| dynamics.forward(grid.time(k), grid.dt, st, v));
        let tr = x.trace();
        if (tr - C64::from(1.0)).norm() > 1e-6 || max_abs(&x).is_nan() {
            return Err(Error::IntegrationFailure {
                t: grid.time(k + 1),
                reason: format!("joint trace drifted to {tr}"),
            });
        }
        joint.push(x);
    }
    let reduced: Vec<Op<3>> = joint.iter().map(model::reduce).collect();
    let polarisation = reduced
        .iter()
        .map(|r| qutrit::polarisation(r, p))
        .collect::<Result<Vec<_>>>()?;
    let cavity_population = joint.iter().map(model::cavity_population).collect();
    Ok(UnconditionalEvolution { times, joint, reduced, polarisation, cavity_population })
}
