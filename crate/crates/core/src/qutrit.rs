//! Transmon operator algebra.
//!
//! Internal basis order is `(|a>, |b>, |c>)` with `|a>` the ground state. The
//! joint cavity-transmon space has dimension 6 and index `cavity * 3 + level`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::{hermiticity_defect, Op};
use crate::C64;

pub use crate::lindblad::{dissipator, meas_superop};

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-8;
pub const POSITIVITY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Level {
    A,
    B,
    C,
}

impl Level {
    pub fn index(self) -> usize {
        match self {
            Level::A => 0,
            Level::B => 1,
            Level::C => 2,
        }
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "a" | "A" => Ok(Level::A),
            "b" | "B" => Ok(Level::B),
            "c" | "C" => Ok(Level::C),
            other => Err(Error::invalid(format!("unknown level label '{other}'"))),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Level::A => "a",
            Level::B => "b",
            Level::C => "c",
        };
        f.write_str(s)
    }
}

/// Which rate sets the probe Rabi frequency `omega_p = sqrt(rate) * beta`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaConvention {
    #[default]
    SqrtGammaC,
    SqrtGammaCon,
}

/// Physical parameters, all rates in units of `gamma_b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemParams {
    pub gamma_b: f64,
    pub gamma_c: f64,
    pub gamma_con: f64,
    pub delta_b: f64,
    pub delta_c: f64,
    pub beta: f64,
    pub omega_p_convention: OmegaConvention,
    /// Local-oscillator phase applied to the measured `L_c`.
    pub lo_phase: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            gamma_b: 1.0,
            gamma_c: 2.0,
            gamma_con: 0.6672,
            delta_b: 0.0,
            delta_c: 0.0,
            beta: 0.4,
            omega_p_convention: OmegaConvention::SqrtGammaC,
            lo_phase: -FRAC_PI_2,
        }
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("gamma_b", self.gamma_b),
            ("gamma_c", self.gamma_c),
            ("gamma_con", self.gamma_con),
            ("delta_b", self.delta_b),
            ("delta_c", self.delta_c),
            ("beta", self.beta),
            ("lo_phase", self.lo_phase),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be finite")));
            }
        }
        for (name, v) in &fields[..3] {
            if *v <= 0.0 {
                return Err(Error::invalid(format!("{name} must be positive")));
            }
        }
        if self.beta < 0.0 {
            return Err(Error::invalid("beta must be non-negative"));
        }
        Ok(())
    }

    pub fn omega_p(&self) -> f64 {
        match self.omega_p_convention {
            OmegaConvention::SqrtGammaC => self.gamma_c.sqrt() * self.beta,
            OmegaConvention::SqrtGammaCon => self.gamma_con.sqrt() * self.beta,
        }
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }
}

fn unit<const D: usize>(i: usize, j: usize) -> Op<D> {
    let mut m = Op::<D>::zeros();
    m[(i, j)] = Complex64::new(1.0, 0.0);
    m
}

/// `|i><j|` on the transmon, tensored with the cavity identity when `D = 6`.
pub fn sigma<const D: usize>(i: Level, j: Level) -> Result<Op<D>> {
    match D {
        3 => Ok(unit::<D>(i.index(), j.index())),
        6 => {
            let mut m = Op::<D>::zeros();
            for cav in 0..2 {
                m[(cav * 3 + i.index(), cav * 3 + j.index())] = Complex64::new(1.0, 0.0);
            }
            Ok(m)
        }
        _ => Err(Error::invalid(format!("dimension {D} is not 3 or 6"))),
    }
}

/// Label-based constructor, e.g. `sigma_str::<3>("a", "b")`.
pub fn sigma_str<const D: usize>(i: &str, j: &str) -> Result<Op<D>> {
    sigma::<D>(i.parse()?, j.parse()?)
}

pub(crate) fn s3(i: Level, j: Level) -> Op<3> {
    unit::<3>(i.index(), j.index())
}

/// Probe Hamiltonian `Δc σcc + Δb σbb + Ωp (σbc + σcb)`.
pub fn hamiltonian(p: &SystemParams) -> Op<3> {
    use Level::*;
    let om = p.omega_p();
    s3(C, C) * C64::from(p.delta_c)
        + s3(B, B) * C64::from(p.delta_b)
        + (s3(B, C) + s3(C, B)) * C64::from(om)
}

pub fn l_b(p: &SystemParams) -> Op<3> {
    s3(Level::A, Level::B) * C64::from(p.gamma_b.sqrt())
}

pub fn l_c(p: &SystemParams) -> Op<3> {
    s3(Level::B, Level::C) * C64::from(p.gamma_c.sqrt())
}

/// Polarisation operator `y = -i sqrt(gamma_c) (σbc - σcb)`.
pub fn y_operator(p: &SystemParams) -> Op<3> {
    use Level::*;
    (s3(B, C) - s3(C, B)) * Complex64::new(0.0, -p.gamma_c.sqrt())
}

/// `<y> = Tr[y ρ]` for a transmon state.
pub fn polarisation(rho: &Op<3>, p: &SystemParams) -> Result<f64> {
    let v = (y_operator(p) * rho).trace();
    if v.im.abs() > HERMITICITY_TOL {
        return Err(Error::NumericalConsistency(format!(
            "polarisation has imaginary part {:.3e}",
            v.im
        )));
    }
    Ok(v.re)
}

pub fn min_eigenvalue<const D: usize>(m: &Op<D>) -> f64 {
    let h = nalgebra::DMatrix::from_fn(D, D, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    h.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Physical state: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<const D: usize>(Op<D>);

impl<const D: usize> DensityMatrix<D> {
    pub fn new(m: Op<D>) -> Result<Self> {
        let herm = hermiticity_defect(&m);
        if herm > HERMITICITY_TOL {
            return Err(Error::NumericalConsistency(format!(
                "state is not Hermitian (defect {herm:.3e})"
            )));
        }
        let tr = m.trace();
        if (tr - C64::from(1.0)).norm() > TRACE_TOL {
            return Err(Error::NumericalConsistency(format!(
                "state trace is {tr} instead of 1"
            )));
        }
        let ev = min_eigenvalue(&m);
        if ev < -POSITIVITY_TOL {
            return Err(Error::NumericalConsistency(format!(
                "state has negative eigenvalue {ev:.3e}"
            )));
        }
        Ok(DensityMatrix(m))
    }

    /// Pure basis state `|k><k|`.
    pub fn basis(k: usize) -> Result<Self> {
        if k >= D {
            return Err(Error::invalid(format!("basis index {k} out of range")));
        }
        Ok(DensityMatrix(unit::<D>(k, k)))
    }

    pub fn matrix(&self) -> &Op<D> {
        &self.0
    }

    pub fn into_inner(self) -> Op<D> {
        self.0
    }
}

impl DensityMatrix<3> {
    pub fn ground() -> Self {
        DensityMatrix(s3(Level::A, Level::A))
    }
}

/// Gell-Mann parameterisation `ρ = I/3 + ½ Σ a_k λ_k`.
///
/// The generators are the standard ones in the basis `(|c>, |b>, |a>)`, so
/// that the ground state has `a8 = -2/√3` and the polarisation is
/// `<y> = -sqrt(gamma_c) a2`.
pub mod gell_mann {
    use super::*;

    /// Internal level index of the k-th Gell-Mann basis vector.
    pub const BASIS_ORDER: [Level; 3] = [Level::C, Level::B, Level::A];

    #[derive(Clone, Copy, Debug, PartialEq)]
    pub struct GellMannVector {
        pub a: [C64; 8],
    }

    fn e(i: usize, j: usize) -> Op<3> {
        s3(BASIS_ORDER[i], BASIS_ORDER[j])
    }

    /// The eight generators, index 0 holding λ1.
    pub fn lambdas() -> [Op<3>; 8] {
        let i = Complex64::new(0.0, 1.0);
        let sym = |p, q| e(p, q) + e(q, p);
        let asym = |p, q| (e(q, p) - e(p, q)) * i;
        [
            sym(0, 1),
            asym(0, 1),
            e(0, 0) - e(1, 1),
            sym(0, 2),
            asym(0, 2),
            sym(1, 2),
            asym(1, 2),
            (e(0, 0) + e(1, 1) - e(2, 2) * C64::from(2.0)) * C64::from(1.0 / 3f64.sqrt()),
        ]
    }

    pub fn decompose(rho: &Op<3>) -> GellMannVector {
        let l = lambdas();
        let mut a = [C64::from(0.0); 8];
        for k in 0..8 {
            a[k] = (l[k] * rho).trace();
        }
        GellMannVector { a }
    }

    /// Rebuild the matrix; `traceful` adds the `I/3` part of a unit-trace state.
    pub fn compose(v: &GellMannVector, traceful: bool) -> Op<3> {
        let l = lambdas();
        let mut m = if traceful {
            Op::<3>::identity() * C64::from(1.0 / 3.0)
        } else {
            Op::<3>::zeros()
        };
        for k in 0..8 {
            m += l[k] * (v.a[k] * 0.5);
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::gell_mann::*;
    use super::*;
    use crate::lindblad::max_abs;
    use proptest::prelude::*;

    fn approx(a: &Op<3>, b: &Op<3>, tol: f64) -> bool {
        max_abs(&(a - b)) < tol
    }

    #[test]
    fn sigma_is_matrix_unit() {
        let m = sigma::<3>(Level::A, Level::B).unwrap();
        assert_eq!(m[(0, 1)], C64::from(1.0));
        assert_eq!(m.iter().filter(|z| z.norm() > 0.0).count(), 1);
        let bc = sigma_str::<3>("b", "c").unwrap();
        assert_eq!(bc.adjoint(), sigma_str::<3>("c", "b").unwrap());
        assert!(sigma_str::<3>("a", "d").is_err());
        assert!(sigma::<4>(Level::A, Level::B).is_err());
    }

    #[test]
    fn sigma_orthonormality() {
        let lv = [Level::A, Level::B, Level::C];
        for &i in &lv {
            for &j in &lv {
                for &k in &lv {
                    for &l in &lv {
                        let tr = (s3(i, j) * s3(k, l)).trace();
                        let expect = if j == k && i == l { 1.0 } else { 0.0 };
                        assert_eq!(tr, C64::from(expect));
                    }
                }
            }
        }
    }

    #[test]
    fn sigma6_tensors_cavity_identity() {
        let m = sigma::<6>(Level::B, Level::C).unwrap();
        assert_eq!(m[(1, 2)], C64::from(1.0));
        assert_eq!(m[(4, 5)], C64::from(1.0));
        assert_eq!(m.iter().filter(|z| z.norm() > 0.0).count(), 2);
    }

    #[test]
    fn hamiltonian_cases() {
        let p = SystemParams { beta: 0.0, ..Default::default() };
        assert_eq!(hamiltonian(&p), Op::<3>::zeros());
        let p = SystemParams { beta: 0.7, delta_b: 0.3, delta_c: -1.1, ..Default::default() };
        let h = hamiltonian(&p);
        assert!(hermiticity_defect(&h) == 0.0);
        let p = SystemParams { beta: 0.7, ..Default::default() };
        let mut ev: Vec<f64> = hamiltonian(&p).symmetric_eigenvalues().iter().cloned().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let om = 2f64.sqrt() * 0.7;
        assert!((ev[0] + om).abs() < 1e-12 && ev[1].abs() < 1e-12 && (ev[2] - om).abs() < 1e-12);
        let q = SystemParams { omega_p_convention: OmegaConvention::SqrtGammaCon, ..p };
        assert!((q.omega_p() - 0.6672f64.sqrt() * 0.7).abs() < 1e-15);
    }

    #[test]
    fn dissipator_examples() {
        use Level::*;
        let sab = s3(A, B);
        let d = dissipator(&sab, &s3(B, B));
        assert!(approx(&d, &(s3(A, A) - s3(B, B)), 1e-15));
        assert!(approx(&dissipator(&sab, &s3(A, A)), &Op::<3>::zeros(), 1e-15));
    }

    #[test]
    fn meas_superop_hand_value() {
        use Level::*;
        // ρ = (|b>+|c>)(<b|+<c|)/2, r = -i σbc.
        let rho = (s3(B, B) + s3(B, C) + s3(C, B) + s3(C, C)) * C64::from(0.5);
        let r = s3(B, C) * Complex64::new(0.0, -1.0);
        // rρ = -i/2 (|b><b| + |b><c|); its trace plus conjugate is zero,
        // so H[r]ρ = rρ + ρr† = -i/2 (|b><c| - |c><b|).
        let expect = (s3(B, C) - s3(C, B)) * Complex64::new(0.0, -0.5);
        assert!(approx(&meas_superop(&r, &rho), &expect, 1e-15));
    }

    #[test]
    fn polarisation_examples() {
        use Level::*;
        let p = SystemParams::default();
        assert_eq!(polarisation(&s3(A, A), &p).unwrap(), 0.0);
        let i = Complex64::new(0.0, 1.0);
        // (|b> + i|c>)(<b| - i<c|)/2 saturates the bound from above,
        // its conjugate (|b> - i|c>)(<b| + i<c|)/2 from below.
        let plus = (s3(B, B) + s3(C, C) + s3(C, B) * i - s3(B, C) * i) * C64::from(0.5);
        let minus = (s3(B, B) + s3(C, C) - s3(C, B) * i + s3(B, C) * i) * C64::from(0.5);
        assert!((polarisation(&plus, &p).unwrap() - p.gamma_c.sqrt()).abs() < 1e-14);
        assert!((polarisation(&minus, &p).unwrap() + p.gamma_c.sqrt()).abs() < 1e-14);
        let bad = s3(B, C);
        assert!(matches!(polarisation(&bad, &p), Err(Error::NumericalConsistency(_))));
    }

    #[test]
    fn y_operator_norm_is_sqrt_gamma_c() {
        let p = SystemParams { gamma_c: 3.7, ..Default::default() };
        let y = y_operator(&p);
        let ev = y.symmetric_eigenvalues();
        let max = ev.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!((max - 3.7f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn params_validation_messages() {
        let p = SystemParams { gamma_b: -1.0, ..Default::default() };
        assert_eq!(
            p.validate().unwrap_err().to_string(),
            "invalid argument: gamma_b must be positive"
        );
        let p = SystemParams { beta: f64::NAN, ..Default::default() };
        assert!(p.validate().is_err());
        assert!(SystemParams::default().validate().is_ok());
    }

    #[test]
    fn density_matrix_checks() {
        assert!(DensityMatrix::<3>::new(s3(Level::A, Level::A)).is_ok());
        assert!(DensityMatrix::<3>::new(s3(Level::A, Level::B)).is_err());
        assert!(DensityMatrix::<3>::new(s3(Level::A, Level::A) * C64::from(2.0)).is_err());
        let neg = s3(Level::A, Level::A) * C64::from(1.5) - s3(Level::B, Level::B) * C64::from(0.5);
        assert!(DensityMatrix::<3>::new(neg).is_err());
        assert!(DensityMatrix::<6>::basis(6).is_err());
    }

    #[test]
    fn gell_mann_orthonormal_and_ground_state() {
        let l = lambdas();
        for i in 0..8 {
            assert!(hermiticity_defect(&l[i]) == 0.0);
            assert!(l[i].trace().norm() < 1e-15);
            for j in 0..8 {
                let tr = (l[i] * l[j]).trace();
                let expect = if i == j { 2.0 } else { 0.0 };
                assert!((tr - C64::from(expect)).norm() < 1e-15);
            }
        }
        let id = Op::<3>::identity() * C64::from(1.0 / 3.0);
        assert!(decompose(&id).a.iter().all(|z| z.norm() < 1e-16));
        let g = decompose(&s3(Level::A, Level::A));
        assert!((g.a[7].re + 2.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!(g.a[..7].iter().all(|z| z.norm() < 1e-16));
    }

    #[test]
    fn polarisation_is_minus_sqrt_gamma_c_times_a2() {
        use Level::*;
        let i = Complex64::new(0.0, 1.0);
        let rho = (s3(B, B) + s3(C, C) + s3(C, B) * i - s3(B, C) * i) * C64::from(0.5);
        let p = SystemParams::default();
        let a2 = decompose(&rho).a[1].re;
        assert!((polarisation(&rho, &p).unwrap() + p.gamma_c.sqrt() * a2).abs() < 1e-14);
    }

    fn arb_matrix() -> impl Strategy<Value = Op<3>> {
        proptest::collection::vec(-1.0f64..1.0, 18).prop_map(|v| {
            Op::<3>::from_fn(|i, j| Complex64::new(v[2 * (3 * i + j)], v[2 * (3 * i + j) + 1]))
        })
    }

    fn arb_state() -> impl Strategy<Value = Op<3>> {
        arb_matrix().prop_map(|m| {
            let r = m * m.adjoint() + Op::<3>::identity() * C64::from(1e-3);
            let tr = r.trace();
            r / tr
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn superoperators_are_traceless_and_hermitian(r in arb_matrix(), rho in arb_state()) {
            let d = dissipator(&r, &rho);
            let h = meas_superop(&r, &rho);
            prop_assert!(d.trace().norm() < 1e-12);
            prop_assert!(h.trace().norm() < 1e-12);
            prop_assert!(hermiticity_defect(&d) < 1e-12);
            prop_assert!(hermiticity_defect(&h) < 1e-12);
        }

        #[test]
        fn gell_mann_round_trip(rho in arb_state(), m in arb_matrix()) {
            let back = compose(&decompose(&rho), true);
            prop_assert!(max_abs(&(back - rho)) < 1e-12);
            let traceless = m - Op::<3>::identity() * (m.trace() / 3.0);
            let back = compose(&decompose(&traceless), false);
            prop_assert!(max_abs(&(back - traceless)) < 1e-12);
        }

        #[test]
        fn polarisation_bounded(rho in arb_state(), gc in 0.1f64..10.0) {
            let p = SystemParams { gamma_c: gc, ..Default::default() };
            let y = polarisation(&rho, &p).unwrap();
            prop_assert!(y.abs() <= gc.sqrt() * (1.0 + 1e-12));
        }
    }
}
