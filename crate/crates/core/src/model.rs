//! Measured open systems: the bare transmon and the source cavity cascaded
//! into it.
//!
//! Both are described by a Hamiltonian, unmeasured jump operators and one
//! homodyne-measured jump `c`. The photocurrent is
//! `J = s (Tr[(c + c†) ρ] + ξ)` with `s` the record scale, so that with the
//! default local-oscillator phase `s (c + c†)` is the polarisation `y`.

use num_complex::Complex64;

use crate::error::Result;
use crate::lindblad::{Lindbladian, Op, SparseOp};
use crate::qutrit::{self, Level, SystemParams};
use crate::variants::SqueezeParams;
use crate::C64;

#[derive(Clone, Debug)]
pub struct MeasuredSystem<const D: usize> {
    pub hamiltonian: Op<D>,
    pub jumps: Vec<Op<D>>,
    pub measured: Op<D>,
    pub record_scale: f64,
    generator: Lindbladian<D>,
}

impl<const D: usize> MeasuredSystem<D> {
    pub fn new(hamiltonian: Op<D>, jumps: Vec<Op<D>>, measured: Op<D>, record_scale: f64) -> Self {
        let mut all = jumps.clone();
        all.push(measured);
        let generator = Lindbladian::new(&hamiltonian, &all);
        MeasuredSystem { hamiltonian, jumps, measured, record_scale, generator }
    }

    /// Unconditional generator, including the dissipation of the measured channel.
    pub fn generator(&self) -> &Lindbladian<D> {
        &self.generator
    }

    /// `s (c + c†)`, whose expectation is the noise-free photocurrent.
    pub fn record_observable(&self) -> Op<D> {
        (self.measured + self.measured.adjoint()) * C64::from(self.record_scale)
    }

    /// Operand of the two-time correlation: `s (c X + X c†)`.
    pub fn kick(&self, x: &Op<D>) -> Op<D> {
        (self.measured * x + x * self.measured.adjoint()) * C64::from(self.record_scale)
    }

    pub fn sparse_measured(&self) -> SparseOp<D> {
        SparseOp::from_dense(&self.measured)
    }

    /// White-noise power of the record per unit time.
    pub fn noise_density(&self) -> f64 {
        self.record_scale * self.record_scale
    }
}

/// Measured probe jump, plain or in a squeezed bath.
///
/// For squeezing `(N, M, L)` the operator is
/// `sqrt(gamma_c / L) [(N + 1 + M) e^{iφ} σbc - (N + M*) e^{-iφ} σcb]`, whose
/// dissipator equals the squeezed-bath Lindbladian of the `b-c` channel.
pub fn measured_jump(p: &SystemParams, sq: Option<&SqueezeParams>) -> (Op<3>, f64) {
    let phase = Complex64::from_polar(1.0, p.lo_phase);
    match sq {
        Some(s) if !s.is_vacuum() => {
            let (n, m, l) = (s.n(), s.m(), s.l());
            let pref = (p.gamma_c / l).sqrt();
            let c = (qutrit::s3(Level::B, Level::C) * ((C64::from(n + 1.0) + m) * phase)
                - qutrit::s3(Level::C, Level::B) * ((C64::from(n) + m.conj()) * phase.conj()))
                * C64::from(pref);
            (c, l.sqrt())
        }
        _ => (qutrit::l_c(p) * phase, 1.0),
    }
}

/// Bare transmon driven by the probe.
pub fn transmon(p: &SystemParams, sq: Option<&SqueezeParams>) -> Result<MeasuredSystem<3>> {
    p.validate()?;
    let (c, scale) = measured_jump(p, sq);
    Ok(MeasuredSystem::new(qutrit::hamiltonian(p), vec![qutrit::l_b(p)], c, scale))
}

/// Embed a transmon operator as `I_cavity ⊗ X`.
pub fn lift(x: &Op<3>) -> Op<6> {
    let mut m = Op::<6>::zeros();
    for cav in 0..2 {
        for i in 0..3 {
            for j in 0..3 {
                m[(cav * 3 + i, cav * 3 + j)] = x[(i, j)];
            }
        }
    }
    m
}

/// Cavity annihilation operator `|0><1| ⊗ I`.
pub fn cavity_annihilation() -> Op<6> {
    let mut m = Op::<6>::zeros();
    for i in 0..3 {
        m[(i, 3 + i)] = C64::from(1.0);
    }
    m
}

/// Trace over the cavity.
pub fn reduce(rho: &Op<6>) -> Op<3> {
    Op::<3>::from_fn(|i, j| rho[(i, j)] + rho[(3 + i, 3 + j)])
}

/// Cavity with `n_photon` excitations and the transmon in its ground state.
pub fn joint_initial(n_photon: u8) -> Op<6> {
    let mut m = Op::<6>::zeros();
    let k = if n_photon == 0 { 0 } else { 3 };
    m[(k, k)] = C64::from(1.0);
    m
}

pub fn cavity_population(rho: &Op<6>) -> f64 {
    (0..3).map(|i| rho[(3 + i, 3 + i)].re).sum()
}

/// Source cavity of bandwidth `gamma_con` cascaded into the transmon.
///
/// The cascaded master equation is a Lindblad equation with the collective
/// jump `sqrt(gamma_con) a + L_b`, the extra Hamiltonian
/// `(i/2)(sqrt(gamma_con) a† L_b - h.c.)`, and the measured probe jump.
pub fn cascade(p: &SystemParams, sq: Option<&SqueezeParams>) -> Result<MeasuredSystem<6>> {
    p.validate()?;
    let (c, scale) = measured_jump(p, sq);
    let c1 = cavity_annihilation() * C64::from(p.gamma_con.sqrt());
    let c2 = lift(&qutrit::l_b(p));
    let hc = (c1.adjoint() * c2 - c2.adjoint() * c1) * Complex64::new(0.0, 0.5);
    let h = lift(&qutrit::hamiltonian(p)) + hc;
    Ok(MeasuredSystem::new(h, vec![c1 + c2], lift(&c), scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::{commutator, dissipator, max_abs};

    fn params() -> SystemParams {
        SystemParams { beta: 0.4, delta_b: 0.3, delta_c: -0.2, ..Default::default() }
    }

    #[test]
    fn record_observable_is_polarisation_at_default_phase() {
        let p = params();
        let t = transmon(&p, None).unwrap();
        assert!(max_abs(&(t.record_observable() - qutrit::y_operator(&p))) < 1e-15);
        let sq = SqueezeParams::new(0.7, 0.4).unwrap();
        let t = transmon(&p, Some(&sq)).unwrap();
        assert!(max_abs(&(t.record_observable() - qutrit::y_operator(&p))) < 1e-14);
    }

    #[test]
    fn cascade_matches_explicit_cascaded_equation() {
        // dρ = -i[H_s, ρ] + γcon D[a]ρ + D[L_b]ρ + D[L_c]ρ
        //      + sqrt(γcon) ([L_b, ρ a†] + [a ρ, L_b†])
        let p = params();
        let sys = cascade(&p, None).unwrap();
        let a = cavity_annihilation();
        let lb = lift(&qutrit::l_b(&p));
        let lc = lift(&qutrit::l_c(&p));
        let hs = lift(&qutrit::hamiltonian(&p));
        let x0 = Op::<6>::from_fn(|i, j| Complex64::new((i + 2 * j) as f64 * 0.1, (i as f64 - j as f64) * 0.05));
        let rho = x0 * x0.adjoint();
        let g = p.gamma_con;
        let explicit = commutator(&hs, &rho) * Complex64::new(0.0, -1.0)
            + dissipator(&a, &rho) * C64::from(g)
            + dissipator(&lb, &rho)
            + dissipator(&lc, &rho)
            + (commutator(&lb, &(rho * a.adjoint())) + commutator(&(a * rho), &lb.adjoint()))
                * C64::from(g.sqrt());
        assert!(max_abs(&(sys.generator().apply(&rho) - explicit)) < 1e-13);
    }

    #[test]
    fn squeezed_jump_reproduces_squeezed_bath() {
        let p = params();
        let sq = SqueezeParams::new(0.6, 1.1).unwrap();
        let (c, _) = measured_jump(&p, Some(&sq));
        let s = qutrit::s3(Level::B, Level::C);
        let sd = s.adjoint();
        let (n, m) = (sq.n(), sq.m());
        let x0 = Op::<3>::from_fn(|i, j| Complex64::new(0.3 * i as f64 + 0.1, 0.2 * j as f64 - 0.1));
        let rho = x0 * x0.adjoint();
        let bath = (dissipator(&s, &rho) * C64::from(n + 1.0)
            + dissipator(&sd, &rho) * C64::from(n)
            + s * rho * s * m
            + sd * rho * sd * m.conj())
            * C64::from(p.gamma_c);
        let lhs = dissipator(&c, &rho);
        assert!(max_abs(&(lhs - bath)) < 1e-13, "{}", max_abs(&(lhs - bath)));
    }

    #[test]
    fn reduce_and_initial_states() {
        let r = joint_initial(1);
        assert_eq!(reduce(&r), qutrit::s3(Level::A, Level::A));
        assert_eq!(cavity_population(&r), 1.0);
        assert_eq!(cavity_population(&joint_initial(0)), 0.0);
    }
}
