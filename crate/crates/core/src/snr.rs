//! Signal-to-noise estimators, histograms, parameter sweeps and the optimizer.
//!
//! `SNR = |E[S1] - E[S0]| / (√2 σ)` with `σ² = (Var S0 + Var S1) / 2`. The
//! photon-free mean vanishes identically in the deterministic pipeline, and
//! the per-class deviations are reported next to the pooled one.

use std::fmt;

use log::{debug, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cascade::{self, SignalSamples, SmeScheme};
use crate::error::{Error, Result};
use crate::fock::FockDynamics;
use crate::pulse::{PulseKind, PulseShape, TimeGrid};
use crate::qutrit::SystemParams;
use crate::regression;
use crate::variants::SqueezeParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnrMethod {
    #[serde(alias = "stochastic")]
    StochasticEnsemble,
    #[serde(alias = "regression")]
    RegressionAnalytic,
}

impl fmt::Display for SnrMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SnrMethod::StochasticEnsemble => "stochastic",
            SnrMethod::RegressionAnalytic => "regression",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnrResult {
    pub mean_s1: f64,
    pub mean_s0: f64,
    /// Pooled standard deviation.
    pub sigma_s: f64,
    pub snr: f64,
    /// Present for ensemble estimates only.
    pub stderr_snr: Option<f64>,
    /// Trajectories per photon number; zero for the deterministic method.
    pub n_traj: usize,
    pub method: SnrMethod,
    pub sd_s0: f64,
    pub sd_s1: f64,
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, v)
}

/// Ensemble estimate from the one-photon and zero-photon signals.
///
/// The standard error propagates the sampling error of the mean difference
/// and of the pooled variance (normal theory, `Var s² = 2σ⁴/(n-1)`).
pub fn estimate_snr_stochastic(s1: &SignalSamples, s0: &SignalSamples) -> Result<SnrResult> {
    for s in [s1, s0] {
        if s.values.len() < 2 {
            return Err(Error::InsufficientSamples { needed: 2, got: s.values.len() });
        }
    }
    let (m1, v1) = mean_var(&s1.values);
    let (m0, v0) = mean_var(&s0.values);
    let (n1, n0) = (s1.values.len() as f64, s0.values.len() as f64);
    let var = 0.5 * (v0 + v1);
    if !(var > 0.0) {
        return Err(Error::NumericalConsistency("pooled signal variance is zero".into()));
    }
    let sigma = var.sqrt();
    let diff = m1 - m0;
    let snr = diff.abs() / (2f64.sqrt() * sigma);
    let se_diff = (v1 / n1 + v0 / n0).sqrt();
    let var_var = 0.25 * (2.0 * v1 * v1 / (n1 - 1.0) + 2.0 * v0 * v0 / (n0 - 1.0));
    let se_sigma = var_var.sqrt() / (2.0 * sigma);
    let stderr = ((se_diff / (2f64.sqrt() * sigma)).powi(2) + (snr * se_sigma / sigma).powi(2)).sqrt();
    Ok(SnrResult {
        mean_s1: m1,
        mean_s0: m0,
        sigma_s: sigma,
        snr,
        stderr_snr: Some(stderr),
        n_traj: s1.values.len(),
        method: SnrMethod::StochasticEnsemble,
        sd_s0: v0.sqrt(),
        sd_s1: v1.sqrt(),
    })
}

/// Fock hierarchy mean and regression variance; the zero-photon signal has
/// mean 0 and variance `s² T`.
pub fn estimate_snr_deterministic(p: &SystemParams, pulse: &PulseShape, grid: &TimeGrid) -> Result<SnrResult> {
    estimate_snr_deterministic_squeezed(p, None, pulse, grid)
}

pub fn estimate_snr_deterministic_squeezed(
    p: &SystemParams,
    sq: Option<&SqueezeParams>,
    pulse: &PulseShape,
    grid: &TimeGrid,
) -> Result<SnrResult> {
    let dynamics = FockDynamics::squeezed(p, sq, Some(*pulse))?;
    let m = regression::signal_moments(&dynamics, grid)?;
    let v0 = dynamics.system().noise_density() * grid.t_end;
    let v1 = m.variance.max(0.0);
    let sigma = (0.5 * (v0 + v1)).sqrt();
    Ok(SnrResult {
        mean_s1: m.mean,
        mean_s0: 0.0,
        sigma_s: sigma,
        snr: m.mean.abs() / (2f64.sqrt() * sigma),
        stderr_snr: None,
        n_traj: 0,
        method: SnrMethod::RegressionAnalytic,
        sd_s0: v0.sqrt(),
        sd_s1: v1.sqrt(),
    })
}

/// Settings for ensemble estimates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StochasticSettings {
    pub n_traj: usize,
    pub base_seed: u64,
    #[serde(default)]
    pub scheme: SmeScheme,
}

impl Default for StochasticSettings {
    fn default() -> Self {
        StochasticSettings { n_traj: 5000, base_seed: 1, scheme: SmeScheme::Kraus }
    }
}

/// Both ensembles of the cascaded model. The one-photon ensemble uses seeds
/// `base_seed..base_seed + n`, the zero-photon one the next `n` seeds.
pub fn simulate_signal_pair(
    p: &SystemParams,
    sq: Option<&SqueezeParams>,
    grid: &TimeGrid,
    settings: &StochasticSettings,
) -> Result<(SignalSamples, SignalSamples)> {
    let ops = cascade::cascade_operators(p, sq, grid.dt, settings.scheme)?;
    let n = settings.n_traj;
    let s1 = cascade::simulate_cascade_ensemble(&ops, grid, n, settings.base_seed, 1)?;
    let s0 = cascade::simulate_cascade_ensemble(&ops, grid, n, settings.base_seed.wrapping_add(n as u64), 0)?;
    Ok((s1, s0))
}

/// Per-class counts over common bin edges.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts_n0: Vec<usize>,
    pub counts_n1: Vec<usize>,
}

const MAX_BINS: usize = 10_000;

/// Quantile with linear interpolation between order statistics.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl Histogram {
    /// Freedman–Diaconis bins on the pooled samples.
    pub fn freedman_diaconis(s0: &[f64], s1: &[f64]) -> Result<Self> {
        let mut all: Vec<f64> = s0.iter().chain(s1).copied().collect();
        if all.len() < 2 {
            return Err(Error::InsufficientSamples { needed: 2, got: all.len() });
        }
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("histogram samples must be finite"));
        }
        all.sort_by(f64::total_cmp);
        let (lo, hi) = (all[0], all[all.len() - 1]);
        let iqr = quantile(&all, 0.75) - quantile(&all, 0.25);
        let width = 2.0 * iqr / (all.len() as f64).cbrt();
        let edges = if hi == lo {
            vec![lo - 0.5, lo + 0.5]
        } else {
            let nb = if width > 0.0 { ((hi - lo) / width).ceil() as usize } else { 1 };
            let nb = nb.clamp(1, MAX_BINS);
            let w = (hi - lo) / nb as f64;
            let mut e: Vec<f64> = (0..nb).map(|k| lo + k as f64 * w).collect();
            e.push(hi);
            e
        };
        Self::with_edges(edges, s0, s1)
    }

    /// Bins are `[e_k, e_{k+1})` except the last, which is closed. Samples
    /// outside the edges are an error.
    pub fn with_edges(bin_edges: Vec<f64>, s0: &[f64], s1: &[f64]) -> Result<Self> {
        if bin_edges.len() < 2 || bin_edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("bin edges must be strictly increasing"));
        }
        let count = |s: &[f64]| -> Result<Vec<usize>> {
            let mut c = vec![0; bin_edges.len() - 1];
            let last = bin_edges.len() - 1;
            for &v in s {
                if !(v >= bin_edges[0] && v <= bin_edges[last]) {
                    return Err(Error::invalid(format!("sample {v} outside histogram range")));
                }
                let k = bin_edges.partition_point(|&e| e <= v).saturating_sub(1).min(last - 1);
                c[k] += 1;
            }
            Ok(c)
        };
        Ok(Histogram { counts_n0: count(s0)?, counts_n1: count(s1)?, bin_edges })
    }
}

/// Swept parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Beta,
    DeltaB,
    DeltaC,
    GammaCon,
    GammaC,
}

impl Axis {
    pub fn apply(self, p: &mut SystemParams, v: f64) {
        match self {
            Axis::Beta => p.beta = v,
            Axis::DeltaB => p.delta_b = v,
            Axis::DeltaC => p.delta_c = v,
            Axis::GammaCon => p.gamma_con = v,
            Axis::GammaC => p.gamma_c = v,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimizer {
    GridOnly,
    #[default]
    GridThenSimplex,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub axes: Vec<(Axis, Vec<f64>)>,
    pub fixed: SystemParams,
    pub pulse: PulseKind,
    pub dt: f64,
    pub squeeze: Option<SqueezeParams>,
    pub method: SnrMethod,
    pub stochastic: StochasticSettings,
    pub optimizer: Optimizer,
}

impl SweepSpec {
    /// Deterministic sweep of the exponential pulse at `dt = 1e-3`.
    pub fn new(fixed: SystemParams, axes: Vec<(Axis, Vec<f64>)>) -> Self {
        SweepSpec {
            axes,
            fixed,
            pulse: PulseKind::Exponential,
            dt: 1e-3,
            squeeze: None,
            method: SnrMethod::RegressionAnalytic,
            stochastic: StochasticSettings::default(),
            optimizer: Optimizer::GridThenSimplex,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() {
            return Err(Error::invalid("sweep needs at least one axis"));
        }
        for (a, g) in &self.axes {
            if g.is_empty() || g.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!("grid for {a:?} must be non-empty and finite")));
            }
            if self.axes.iter().filter(|(b, _)| b == a).count() > 1 {
                return Err(Error::invalid(format!("axis {a:?} listed twice")));
            }
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid("dt must be positive"));
        }
        if self.method == SnrMethod::StochasticEnsemble && self.pulse != PulseKind::Exponential {
            return Err(Error::UnsupportedRegime(
                "trajectory simulation models the exponential pulse only".into(),
            ));
        }
        self.fixed.validate()
    }

    /// Parameters at one point of the axes.
    pub fn params_at(&self, values: &[f64]) -> SystemParams {
        let mut p = self.fixed;
        for ((a, _), &v) in self.axes.iter().zip(values) {
            a.apply(&mut p, v);
        }
        p
    }

    /// Grid points in row-major order, first axis outermost.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![]];
        for (_, g) in &self.axes {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    g.iter().map(move |&v| {
                        let mut x = prefix.clone();
                        x.push(v);
                        x
                    })
                })
                .collect();
        }
        out
    }

    /// SNR at a parameter set; `index` separates the seeds of sweep points.
    pub fn evaluate(&self, p: &SystemParams, index: usize) -> Result<SnrResult> {
        p.validate()?;
        let pulse = PulseShape::for_bandwidth(self.pulse, p.gamma_con)?;
        let grid = TimeGrid::for_pulse(&pulse, self.dt, p.gamma_b)?;
        match self.method {
            SnrMethod::RegressionAnalytic => {
                estimate_snr_deterministic_squeezed(p, self.squeeze.as_ref(), &pulse, &grid)
            }
            SnrMethod::StochasticEnsemble => {
                let mut st = self.stochastic;
                let stride = 2 * st.n_traj as u64;
                st.base_seed = st.base_seed.wrapping_add(stride.wrapping_mul(index as u64));
                let (s1, s0) = simulate_signal_pair(p, self.squeeze.as_ref(), &grid, &st)?;
                estimate_snr_stochastic(&s1, &s0)
            }
        }
    }
}

#[derive(Debug)]
pub struct SweepPoint {
    pub values: Vec<f64>,
    pub params: SystemParams,
    pub outcome: Result<SnrResult>,
}

/// Evaluate every grid point. Failures are kept in the table.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepPoint>> {
    spec.validate()?;
    let points = spec.points();
    Ok(points
        .into_par_iter()
        .enumerate()
        .map(|(i, values)| {
            let params = spec.params_at(&values);
            let outcome = spec.evaluate(&params, i);
            if let Err(e) = &outcome {
                warn!("sweep point {values:?} failed: {e}");
            }
            SweepPoint { values, params, outcome }
        })
        .collect())
}

/// Best successful point; ties go to the lexicographically smallest values.
pub fn best_point(points: &[SweepPoint]) -> Option<&SweepPoint> {
    points
        .iter()
        .filter(|p| matches!(&p.outcome, Ok(r) if r.snr.is_finite()))
        .min_by(|a, b| {
            let (ra, rb) = (a.outcome.as_ref().unwrap().snr, b.outcome.as_ref().unwrap().snr);
            rb.total_cmp(&ra).then_with(|| {
                a.values
                    .iter()
                    .zip(&b.values)
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
        })
}

#[derive(Debug)]
pub struct Optimum {
    pub grid_values: Vec<f64>,
    pub grid_result: SnrResult,
    pub values: Vec<f64>,
    pub params: SystemParams,
    pub result: SnrResult,
    pub iterations: usize,
    pub table: Vec<SweepPoint>,
}

pub const SIMPLEX_MAX_ITER: usize = 200;
pub const SIMPLEX_FTOL: f64 = 1e-4;

/// Grid search, then Nelder–Mead from the best grid point inside the box
/// spanned by each axis grid. Axes with a single value stay fixed.
pub fn optimize(spec: &SweepSpec) -> Result<Optimum> {
    if spec.method == SnrMethod::StochasticEnsemble {
        return Err(Error::invalid("optimisation over ensemble estimates is not supported"));
    }
    let table = sweep(spec)?;
    let best = best_point(&table)
        .ok_or_else(|| Error::NumericalConsistency("no sweep point produced a finite SNR".into()))?;
    let grid_values = best.values.clone();
    let grid_result = best.outcome.as_ref().unwrap().clone();
    let mut out = Optimum {
        values: grid_values.clone(),
        params: best.params,
        result: grid_result.clone(),
        grid_values,
        grid_result,
        iterations: 0,
        table: vec![],
    };

    let free: Vec<usize> = (0..spec.axes.len()).filter(|&i| spec.axes[i].1.len() > 1).collect();
    if spec.optimizer == Optimizer::GridThenSimplex && !free.is_empty() {
        let bounds: Vec<(f64, f64)> = free
            .iter()
            .map(|&i| {
                let g = &spec.axes[i].1;
                (g.iter().cloned().fold(f64::INFINITY, f64::min), g.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
            })
            .collect();
        let steps: Vec<f64> = free
            .iter()
            .zip(&bounds)
            .map(|(&i, (lo, hi))| (hi - lo) / (spec.axes[i].1.len() - 1) as f64)
            .collect();
        let embed = |x: &[f64]| {
            let mut v = out.grid_values.clone();
            for (&i, &xi) in free.iter().zip(x) {
                v[i] = xi;
            }
            v
        };
        let objective = |x: &[f64]| -> f64 {
            match spec.evaluate(&spec.params_at(&embed(x)), 0) {
                Ok(r) if r.snr.is_finite() => -r.snr,
                Ok(_) | Err(_) => {
                    debug!("objective not finite at {x:?}");
                    f64::INFINITY
                }
            }
        };
        let x0: Vec<f64> = free.iter().map(|&i| out.grid_values[i]).collect();
        let nm = nelder_mead(objective, &x0, &steps, &bounds, SIMPLEX_MAX_ITER, SIMPLEX_FTOL);
        out.iterations = nm.iterations;
        if -nm.value > out.grid_result.snr {
            let v = embed(&nm.x);
            let p = spec.params_at(&v);
            out.result = spec.evaluate(&p, 0)?;
            out.values = v;
            out.params = p;
        }
    }
    out.table = table;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

/// Bounded Nelder–Mead minimisation. Trial points are clamped to `bounds`.
/// Stops when the spread of values is below `ftol` and every vertex lies
/// within `1e-3` initial steps of the best one.
pub fn nelder_mead(
    f: impl Fn(&[f64]) -> f64,
    x0: &[f64],
    steps: &[f64],
    bounds: &[(f64, f64)],
    max_iter: usize,
    ftol: f64,
) -> SimplexResult {
    let n = x0.len();
    let clamp = |x: Vec<f64>| -> Vec<f64> {
        x.into_iter().zip(bounds).map(|(v, &(lo, hi))| v.clamp(lo, hi)).collect()
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        // Step away from a bound when starting on it.
        x[i] += if x0[i] + steps[i] <= bounds[i].1 { steps[i] } else { -steps[i] };
        let x = clamp(x);
        let v = f(&x);
        simplex.push((x, v));
    }
    let lincomb = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect() };
    let mut iterations = 0;
    while iterations < max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        let size_ok = simplex
            .iter()
            .all(|(x, _)| x.iter().zip(&simplex[0].0).zip(steps).all(|((a, b), s)| (a - b).abs() <= 1e-3 * s));
        if spread.is_finite() && spread <= ftol && size_ok {
            break;
        }
        iterations += 1;
        let centroid: Vec<f64> =
            (0..n).map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / n as f64).collect();
        let worst = simplex[n].clone();
        let xr = clamp(lincomb(&centroid, &worst.0, -1.0));
        let fr = f(&xr);
        if fr < simplex[0].1 {
            let xe = clamp(lincomb(&centroid, &worst.0, -2.0));
            let fe = f(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst.1 {
                let xc = clamp(lincomb(&centroid, &xr, 0.5));
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = clamp(lincomb(&centroid, &worst.0, 0.5));
                let fc = f(&xc);
                (xc, fc)
            };
            if fc < worst.1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    v.0 = lincomb(&best, &v.0, 0.5);
                    v.1 = f(&v.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    SimplexResult { x, value, iterations }
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn samples(v: Vec<f64>, n: u8) -> SignalSamples {
        SignalSamples::new(v, n).unwrap()
    }

    fn gaussian(mu: f64, sd: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = Normal::new(mu, sd).unwrap();
        (0..n).map(|_| d.sample(&mut rng)).collect()
    }

    #[test]
    fn identical_samples_give_zero() {
        let v = gaussian(0.3, 1.0, 500, 1);
        let r = estimate_snr_stochastic(&samples(v.clone(), 1), &samples(v, 0)).unwrap();
        assert_eq!(r.snr, 0.0);
        assert!(r.stderr_snr.unwrap() > 0.0);
    }

    #[test]
    fn synthetic_estimator_is_consistent() {
        let (mu, sd) = (1.5, 2.0);
        let r = estimate_snr_stochastic(
            &samples(gaussian(mu, sd, 200_000, 2), 1),
            &samples(gaussian(0.0, sd, 200_000, 3), 0),
        )
        .unwrap();
        let exact = mu / (2f64.sqrt() * sd);
        assert!((r.snr - exact).abs() < 3.0 * r.stderr_snr.unwrap(), "{} {}", r.snr, exact);
        assert!(r.stderr_snr.unwrap() < 3e-3);
    }

    #[test]
    fn too_few_samples() {
        let one = SignalSamples { values: vec![1.0], ..samples(vec![1.0, 2.0], 1) };
        assert!(matches!(
            estimate_snr_stochastic(&one, &samples(vec![1.0, 2.0], 0)),
            Err(Error::InsufficientSamples { .. })
        ));
    }

    proptest! {
        #[test]
        fn snr_is_scale_invariant(scale in 1e-3f64..1e3, seed in 0u64..1000) {
            let a = gaussian(1.0, 1.0, 50, seed);
            let b = gaussian(0.0, 1.0, 50, seed + 1);
            let r = estimate_snr_stochastic(&samples(a.clone(), 1), &samples(b.clone(), 0)).unwrap();
            let sa = a.iter().map(|v| v * scale).collect();
            let sb = b.iter().map(|v| v * scale).collect();
            let s = estimate_snr_stochastic(&samples(sa, 1), &samples(sb, 0)).unwrap();
            prop_assert!((r.snr - s.snr).abs() < 1e-12 * r.snr.max(1.0));
        }

        #[test]
        fn histogram_conserves_counts(n0 in 2usize..300, n1 in 2usize..300, seed in 0u64..1000) {
            let a = gaussian(0.0, 1.0, n0, seed);
            let b = gaussian(2.0, 1.5, n1, seed + 7);
            let h = Histogram::freedman_diaconis(&a, &b).unwrap();
            prop_assert_eq!(h.counts_n0.iter().sum::<usize>(), n0);
            prop_assert_eq!(h.counts_n1.iter().sum::<usize>(), n1);
            prop_assert!(h.bin_edges.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn histogram_degenerate_and_edges() {
        let h = Histogram::freedman_diaconis(&[1.0, 1.0], &[1.0]).unwrap();
        assert_eq!(h.counts_n0, vec![2]);
        let h = Histogram::with_edges(vec![0.0, 1.0, 2.0], &[0.0, 1.0, 2.0], &[]).unwrap();
        assert_eq!(h.counts_n0, vec![1, 2]);
        assert!(Histogram::with_edges(vec![0.0, 1.0], &[3.0], &[]).is_err());
        assert!(Histogram::with_edges(vec![1.0, 1.0], &[], &[]).is_err());
    }

    #[test]
    fn deterministic_zero_beta_and_zero_photon_variance() {
        let p = SystemParams { beta: 0.0, ..Default::default() };
        let pulse = PulseShape::exponential(p.gamma_con).unwrap();
        let grid = TimeGrid::new(10.0, 1e-2).unwrap();
        let r = estimate_snr_deterministic(&p, &pulse, &grid).unwrap();
        assert_eq!(r.snr, 0.0);
        assert!((r.sd_s0 - 10f64.sqrt()).abs() < 1e-12);
        assert!(r.stderr_snr.is_none() && r.n_traj == 0);
    }

    #[test]
    fn one_point_sweep_equals_direct_estimate() {
        let p = SystemParams::default();
        let mut spec = SweepSpec::new(p, vec![(Axis::Beta, vec![0.4])]);
        spec.dt = 1e-2;
        let t = sweep(&spec).unwrap();
        let pulse = PulseShape::exponential(p.gamma_con).unwrap();
        let grid = TimeGrid::for_pulse(&pulse, 1e-2, 1.0).unwrap();
        let d = estimate_snr_deterministic(&p, &pulse, &grid).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].outcome.as_ref().unwrap(), &d);
    }

    #[test]
    fn sweep_points_are_row_major() {
        let spec = SweepSpec::new(
            SystemParams::default(),
            vec![(Axis::DeltaB, vec![1.0, 2.0]), (Axis::DeltaC, vec![3.0, 4.0, 5.0])],
        );
        let pts = spec.points();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[1], vec![1.0, 4.0]);
        assert_eq!(pts[3], vec![2.0, 3.0]);
    }

    #[test]
    fn ties_prefer_smallest_values() {
        let mk = |v: Vec<f64>, snr: f64| SweepPoint {
            values: v,
            params: SystemParams::default(),
            outcome: Ok(SnrResult {
                mean_s1: 0.0,
                mean_s0: 0.0,
                sigma_s: 1.0,
                snr,
                stderr_snr: None,
                n_traj: 0,
                method: SnrMethod::RegressionAnalytic,
                sd_s0: 1.0,
                sd_s1: 1.0,
            }),
        };
        let pts = vec![mk(vec![1.0, 0.0], 0.5), mk(vec![0.0, 2.0], 0.5), mk(vec![0.0, 3.0], 0.4)];
        assert_eq!(best_point(&pts).unwrap().values, vec![0.0, 2.0]);
    }

    #[test]
    fn simplex_finds_quadratic_minimum_in_box() {
        let f = |x: &[f64]| (x[0] - 0.3).powi(2) + 2.0 * (x[1] + 0.2).powi(2);
        let r = nelder_mead(f, &[0.0, 0.0], &[0.5, 0.5], &[(-1.0, 1.0), (-1.0, 1.0)], 200, 1e-12);
        assert!((r.x[0] - 0.3).abs() < 1e-4 && (r.x[1] + 0.2).abs() < 1e-4, "{r:?}");
        let r = nelder_mead(f, &[0.0, 0.0], &[0.5, 0.5], &[(0.5, 1.0), (-1.0, 1.0)], 200, 1e-12);
        assert!((r.x[0] - 0.5).abs() < 1e-4);
    }

    #[test]
    fn optimize_refuses_ensembles() {
        let mut spec = SweepSpec::new(SystemParams::default(), vec![(Axis::Beta, vec![0.4])]);
        spec.method = SnrMethod::StochasticEnsemble;
        assert!(optimize(&spec).is_err());
    }
}
