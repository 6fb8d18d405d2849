//! Closed-form polarisation on resonance for `gamma_c = 2 gamma_b` and an
//! exponential wave packet.
//!
//! Coefficients are Gell-Mann components in the basis `(|c>, |b>, |a>)` (see
//! [`crate::qutrit::gell_mann`]). The coherence block has only two
//! independent components,
//!
//! ```text
//! a5_01(t) = C1 (C5 e^{-θ1 t} + C6 e^{-θ2 t} - C7 e^{-γcon t/2})
//! a6_01(t) = C1 (C2 e^{-θ1 t} + C3 e^{-θ2 t} + C4 e^{-γcon t/2})
//! a4_01 = i a5_01,  a7_01 = -i a6_01
//! ```
//!
//! with `θ = sqrt(γ - 32β²)`, `θ1,2 = 3γ/4 ± sqrt(γ) θ/4` and
//!
//! ```text
//! C1 = sqrt(γ γcon) / (θ [2γ(4β² + γ) - 3γ γcon + γcon²])
//! C2 = 2 sqrt(γ) (8β² - γ + sqrt(γ) θ) + γcon (sqrt(γ) - θ)
//! C3 = 2 sqrt(γ) (-8β² + γ + sqrt(γ) θ) - γcon (sqrt(γ) + θ)
//! C4 = -4γθ + 2γcon θ
//! C5 = 2√2 β (-3γ + 2γcon + sqrt(γ) θ)
//! C6 = 2√2 β (3γ - 2γcon + sqrt(γ) θ)
//! C7 = 4 sqrt(2γ) β θ
//! ```
//!
//! (`γ = gamma_b`). The population block `x = (a2, a3, a8)` of `ρ_11` obeys
//! `dx/dt = A x + B(t)`, solved by eigendecomposition of `A` with the
//! exponential integrals done in closed form. `<y> = -sqrt(gamma_c) a2`.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock;
use crate::ode::rk4_step;
use crate::pulse::{PulseShape, TimeGrid};
use crate::qutrit::{OmegaConvention, SystemParams};
use crate::regression::SignalMoments;
use crate::C64;

/// Constants of the closed form. `c[k]` holds `C_{k+1}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticCoeffs {
    pub theta: C64,
    pub theta1: C64,
    pub theta2: C64,
    pub c: [C64; 7],
    pub gamma_b: f64,
    pub gamma_con: f64,
    pub beta: f64,
}

/// Check that `p` lies where the closed form applies.
pub fn check_regime(p: &SystemParams) -> Result<()> {
    p.validate()?;
    if p.delta_b != 0.0 || p.delta_c != 0.0 {
        return Err(Error::UnsupportedRegime("closed form needs zero detunings".into()));
    }
    if (p.gamma_c - 2.0 * p.gamma_b).abs() > 1e-12 * p.gamma_b {
        return Err(Error::UnsupportedRegime("closed form needs gamma_c = 2 gamma_b".into()));
    }
    if p.omega_p_convention != OmegaConvention::SqrtGammaC {
        return Err(Error::UnsupportedRegime(
            "closed form assumes omega_p = sqrt(gamma_c) beta".into(),
        ));
    }
    Ok(())
}

pub fn coeffs(p: &SystemParams) -> Result<AnalyticCoeffs> {
    check_regime(p)?;
    let g = p.gamma_b;
    let gc = p.gamma_con;
    let b = p.beta;
    let sg = g.sqrt();
    let theta = C64::from(g - 32.0 * b * b).sqrt();
    let theta1 = C64::from(0.75 * g) + theta * (sg / 4.0);
    let theta2 = C64::from(0.75 * g) - theta * (sg / 4.0);
    let den = 2.0 * g * (4.0 * b * b + g) - 3.0 * g * gc + gc * gc;
    let c1 = C64::from((g * gc).sqrt()) / (theta * den);
    let c2 = (C64::from(8.0 * b * b - g) + theta * sg) * (2.0 * sg) + (C64::from(sg) - theta) * gc;
    let c3 = (C64::from(-8.0 * b * b + g) + theta * sg) * (2.0 * sg) - (C64::from(sg) + theta) * gc;
    let c4 = theta * (-4.0 * g + 2.0 * gc);
    let r2b = 2.0 * 2f64.sqrt() * b;
    let c5 = (C64::from(-3.0 * g + 2.0 * gc) + theta * sg) * r2b;
    let c6 = (C64::from(3.0 * g - 2.0 * gc) + theta * sg) * r2b;
    let c7 = theta * (4.0 * (2.0 * g).sqrt() * b);
    Ok(AnalyticCoeffs {
        theta,
        theta1,
        theta2,
        c: [c1, c2, c3, c4, c5, c6, c7],
        gamma_b: g,
        gamma_con: gc,
        beta: b,
    })
}

impl AnalyticCoeffs {
    /// True near the critical probe amplitude or a vanishing `C1`
    /// denominator, where the closed form cancels catastrophically.
    pub fn is_singular(&self) -> bool {
        let g = self.gamma_b;
        let gc = self.gamma_con;
        let den = 2.0 * g * (4.0 * self.beta * self.beta + g) - 3.0 * g * gc + gc * gc;
        self.theta.norm() < 1e-4 * g.sqrt() || den.abs() < 1e-6 * g * g
    }

    /// Decay rates of the three exponentials `(θ1, θ2, γcon/2)`.
    fn rates(&self) -> [C64; 3] {
        [self.theta1, self.theta2, C64::from(0.5 * self.gamma_con)]
    }

    /// `(a5, a6)` amplitudes per exponential.
    fn amplitudes(&self) -> ([C64; 3], [C64; 3]) {
        let c = &self.c;
        (
            [c[0] * c[4], c[0] * c[5], -c[0] * c[6]],
            [c[0] * c[1], c[0] * c[2], c[0] * c[3]],
        )
    }
}

/// `(a4, a5, a6, a7)` of the coherence block at time `t`.
pub fn rho01_coefficients(p: &SystemParams, t: f64) -> Result<[C64; 4]> {
    if t < 0.0 {
        return Err(Error::invalid("time must be non-negative"));
    }
    let k = coeffs(p)?;
    if k.is_singular() {
        return Err(Error::SingularParameter(format!(
            "closed form is singular at beta = {}, gamma_con = {}",
            p.beta, p.gamma_con
        )));
    }
    let (a5c, a6c) = k.amplitudes();
    let rates = k.rates();
    let mut a5 = C64::from(0.0);
    let mut a6 = C64::from(0.0);
    for i in 0..3 {
        let e = (-rates[i] * t).exp();
        a5 += a5c[i] * e;
        a6 += a6c[i] * e;
    }
    let i = Complex64::new(0.0, 1.0);
    Ok([i * a5, a5, a6, -i * a6])
}

/// `A` of `dx/dt = A x + B(t)` for `x = (a2, a3, a8)`.
pub fn bloch_matrix(gamma_b: f64, beta: f64) -> Matrix3<f64> {
    let g = gamma_b;
    let w = 2.0 * (2.0 * g).sqrt() * beta;
    let s3 = 3f64.sqrt();
    Matrix3::new(
        -1.5 * g, -w, 0.0, //
        w, -2.5 * g, -s3 * g / 2.0, //
        0.0, s3 * g / 2.0, -0.5 * g,
    )
}

/// Constant part of `B(t)`.
pub fn bloch_constant(gamma_b: f64) -> Vector3<f64> {
    Vector3::new(0.0, -gamma_b, -gamma_b / 3f64.sqrt())
}

pub fn initial_bloch() -> Vector3<f64> {
    Vector3::new(0.0, 0.0, -2.0 / 3f64.sqrt())
}

/// The population Bloch equations.
#[derive(Clone, Debug)]
pub struct BlochSystem {
    pub a: Matrix3<f64>,
    pub coeffs: AnalyticCoeffs,
    pub x0: Vector3<f64>,
    /// Forcing `B(t) = Σ_k g_k e^{-κ_k t}`.
    forcing: Vec<(C64, Vector3<C64>)>,
}

impl BlochSystem {
    pub fn new(p: &SystemParams) -> Result<Self> {
        let k = coeffs(p)?;
        let g = p.gamma_b;
        let sg = g.sqrt();
        let s3g = (3.0 * g).sqrt();
        let fpre = p.gamma_con.sqrt();
        let (a5c, a6c) = k.amplitudes();
        let rates = k.rates();
        let b0 = bloch_constant(g);
        let mut forcing = vec![(C64::from(0.0), b0.map(C64::from))];
        for i in 0..3 {
            // f(t) a(t) with f = sqrt(γcon) e^{-γcon t/2}
            let kappa = rates[i] + 0.5 * p.gamma_con;
            let v = Vector3::new(-a5c[i] * (2.0 * sg), a6c[i] * (2.0 * sg), -a6c[i] * (2.0 * s3g)) * C64::from(fpre);
            forcing.push((kappa, v));
        }
        Ok(BlochSystem { a: bloch_matrix(g, p.beta), coeffs: k, x0: initial_bloch(), forcing })
    }

    pub fn forcing(&self, t: f64) -> Vector3<f64> {
        let mut b = Vector3::<C64>::zeros();
        for (kappa, v) in &self.forcing {
            b += v * (-kappa * t).exp();
        }
        b.map(|z| z.re)
    }

    /// `x∞ = -A⁻¹ B∞` once the pulse has passed.
    pub fn steady_state(&self) -> Result<Vector3<f64>> {
        let inv = self
            .a
            .try_inverse()
            .ok_or_else(|| Error::SingularParameter("Bloch matrix is singular".into()))?;
        Ok(-(inv * bloch_constant(self.coeffs.gamma_b)))
    }

    /// Eigendecomposition `A = V diag(λ) V⁻¹`, or `None` when `A` is close
    /// to defective.
    fn eigen(&self) -> Option<(Vector3<C64>, Matrix3<C64>, Matrix3<C64>)> {
        let lam = self.a.complex_eigenvalues();
        let ac = self.a.map(C64::from);
        let mut v = Matrix3::<C64>::zeros();
        for i in 0..3 {
            let m = ac - Matrix3::<C64>::identity() * lam[i];
            let rows = [m.row(0).transpose(), m.row(1).transpose(), m.row(2).transpose()];
            let cross = |x: &Vector3<C64>, y: &Vector3<C64>| {
                Vector3::new(x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0])
            };
            let cands = [cross(&rows[0], &rows[1]), cross(&rows[0], &rows[2]), cross(&rows[1], &rows[2])];
            let best = cands.iter().max_by(|x, y| x.norm().total_cmp(&y.norm()))?;
            if best.norm() < 1e-14 {
                return None;
            }
            v.set_column(i, &(best / C64::from(best.norm())));
        }
        let det = v.determinant().norm();
        if det < 1e-8 {
            return None;
        }
        let q = v.try_inverse()?;
        Some((lam, v, q))
    }

    /// `x(t) = V [e^{Λt} Q x0 + Σ_k φ(λ, κ_k, t) Q g_k]`.
    pub fn solve(&self, times: &[f64]) -> Result<Vec<Vector3<f64>>> {
        let (lam, v, q) = self.eigen().ok_or_else(|| {
            Error::SingularParameter("Bloch matrix is nearly defective".into())
        })?;
        let qx0 = q * self.x0.map(C64::from);
        let qg: Vec<(C64, Vector3<C64>)> = self.forcing.iter().map(|(k, g)| (*k, q * g)).collect();
        let mut out = Vec::with_capacity(times.len());
        for &t in times {
            let mut y = Vector3::<C64>::zeros();
            for i in 0..3 {
                let el = (lam[i] * t).exp();
                let mut s = el * qx0[i];
                for (kappa, g) in &qg {
                    s += phi(lam[i], *kappa, t) * g[i];
                }
                y[i] = s;
            }
            let x = v * y;
            out.push(x.map(|z| z.re));
        }
        Ok(out)
    }

    /// Direct RK4 integration of the same equations.
    pub fn integrate(&self, grid: &TimeGrid) -> Vec<Vector3<f64>> {
        let mut x = [self.x0[0], self.x0[1], self.x0[2]];
        let mut out = Vec::with_capacity(grid.n_steps + 1);
        out.push(self.x0);
        for k in 0..grid.n_steps {
            x = rk4_step(grid.time(k), grid.dt, &x, |t, y| {
                let d = self.a * Vector3::new(y[0], y[1], y[2]) + self.forcing(t);
                [d[0], d[1], d[2]]
            });
            out.push(Vector3::new(x[0], x[1], x[2]));
        }
        out
    }
}

/// `∫_0^t e^{λ(t-s)} e^{-κ s} ds`.
fn phi(lambda: C64, kappa: C64, t: f64) -> C64 {
    let s = lambda + kappa;
    if s.norm() * t.max(1.0) < 1e-9 {
        return (lambda * t).exp() * t;
    }
    ((lambda * t).exp() - (-kappa * t).exp()) / s
}

#[derive(Clone, Debug)]
pub struct AnalyticSolution {
    pub times: Vec<f64>,
    pub x: Vec<Vector3<f64>>,
    pub polarisation: Vec<f64>,
    /// Set when the closed form was singular and the equations were
    /// integrated numerically instead.
    pub fallback: bool,
}

/// `ρ_11` populations and `<y>` on the grid.
pub fn solve_rho11(p: &SystemParams, grid: &TimeGrid) -> Result<AnalyticSolution> {
    let sys = BlochSystem::new(p)?;
    let times = grid.times();
    let sgc = p.gamma_c.sqrt();
    let closed = if sys.coeffs.is_singular() { None } else { sys.solve(&times).ok() };
    let (x, fallback) = match closed {
        Some(x) => (x, false),
        None => {
            log::warn!(
                "closed form singular at beta = {}, gamma_con = {}; integrating the hierarchy",
                p.beta,
                p.gamma_con
            );
            let pulse = PulseShape::exponential(p.gamma_con)?;
            let ev = fock::evolve_hierarchy(p, &pulse, grid)?;
            let x = ev
                .states
                .iter()
                .map(|s| {
                    let a = crate::qutrit::gell_mann::decompose(&s.rho11).a;
                    Vector3::new(a[1].re, a[2].re, a[7].re)
                })
                .collect();
            (x, true)
        }
    };
    let polarisation = x.iter().map(|v| -sgc * v[0]).collect();
    Ok(AnalyticSolution { times, x, polarisation, fallback })
}

/// Signal mean and variance from the regression theorem, using the
/// hierarchy states for the unconditional evolution.
pub fn variance_regression(p: &SystemParams, pulse: &PulseShape, grid: &TimeGrid) -> Result<f64> {
    let m: SignalMoments = fock::signal_moments(p, pulse, grid)?;
    Ok(m.variance)
}
