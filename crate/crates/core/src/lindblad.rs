//! Sparse operators and Lindblad generators on small fixed-size Hilbert spaces.
//!
//! Every operator used by the transmon and cascaded models is a handful of
//! matrix units, so products are done by walking the nonzero entries instead
//! of dense matrix multiplication. This matters for the stochastic ensembles,
//! which apply the generator a few hundred million times.

use nalgebra::SMatrix;
use num_complex::Complex64;

use crate::C64;

pub type Op<const D: usize> = SMatrix<C64, D, D>;

pub fn adjoint<const D: usize>(m: &Op<D>) -> Op<D> {
    m.adjoint()
}

pub fn commutator<const D: usize>(a: &Op<D>, b: &Op<D>) -> Op<D> {
    a * b - b * a
}

pub fn trace<const D: usize>(m: &Op<D>) -> C64 {
    m.trace()
}

/// Largest absolute entry of `m - m†`.
pub fn hermiticity_defect<const D: usize>(m: &Op<D>) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs<const D: usize>(m: &Op<D>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Operator stored as its list of nonzero entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOp<const D: usize> {
    entries: Vec<(usize, usize, C64)>,
}

impl<const D: usize> SparseOp<D> {
    pub fn from_dense(m: &Op<D>) -> Self {
        let mut entries = Vec::new();
        for i in 0..D {
            for j in 0..D {
                let v = m[(i, j)];
                if v != Complex64::new(0.0, 0.0) {
                    entries.push((i, j, v));
                }
            }
        }
        SparseOp { entries }
    }

    pub fn to_dense(&self) -> Op<D> {
        let mut m = Op::<D>::zeros();
        for &(i, j, v) in &self.entries {
            m[(i, j)] += v;
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        SparseOp {
            entries: self.entries.iter().map(|&(i, j, v)| (j, i, v.conj())).collect(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// `out += self * x`
    #[inline]
    pub fn left_mul_acc(&self, x: &Op<D>, out: &mut Op<D>) {
        for &(i, k, v) in &self.entries {
            for j in 0..D {
                out[(i, j)] += v * x[(k, j)];
            }
        }
    }

    /// `out += x * self`
    #[inline]
    pub fn right_mul_acc(&self, x: &Op<D>, out: &mut Op<D>) {
        for &(k, j, v) in &self.entries {
            for i in 0..D {
                out[(i, j)] += x[(i, k)] * v;
            }
        }
    }

    pub fn left_mul(&self, x: &Op<D>) -> Op<D> {
        let mut out = Op::<D>::zeros();
        self.left_mul_acc(x, &mut out);
        out
    }

    pub fn right_mul(&self, x: &Op<D>) -> Op<D> {
        let mut out = Op::<D>::zeros();
        self.right_mul_acc(x, &mut out);
        out
    }
}

/// Generator `X -> K X + X K† + Σ_j A_j X B_j` in the form produced by a
/// Hamiltonian and a set of jump operators, with `K = -iH - ½ Σ L†L` and
/// `(A_j, B_j) = (L_j, L_j†)`.
///
/// The same representation also carries non-standard sandwich terms, which
/// the hierarchy couplings do not need but the squeezed bath check uses.
#[derive(Clone, Debug)]
pub struct Lindbladian<const D: usize> {
    k: SparseOp<D>,
    k_adj: SparseOp<D>,
    sandwiches: Vec<(SparseOp<D>, SparseOp<D>)>,
    sandwiches_adj: Vec<(SparseOp<D>, SparseOp<D>)>,
}

impl<const D: usize> Lindbladian<D> {
    pub fn new(hamiltonian: &Op<D>, jumps: &[Op<D>]) -> Self {
        let mut k = hamiltonian * Complex64::new(0.0, -1.0);
        for l in jumps {
            k -= l.adjoint() * l * C64::from(0.5);
        }
        let sandwiches: Vec<_> = jumps
            .iter()
            .map(|l| (l.clone_owned(), l.adjoint()))
            .collect();
        Self::from_parts(&k, &sandwiches)
    }

    /// Build from an explicit `K` and sandwich pairs `(A, B)` meaning `A X B`.
    pub fn from_parts(k: &Op<D>, sandwiches: &[(Op<D>, Op<D>)]) -> Self {
        let k_sparse = SparseOp::from_dense(k);
        let k_adj = k_sparse.adjoint();
        let sw: Vec<_> = sandwiches
            .iter()
            .map(|(a, b)| (SparseOp::from_dense(a), SparseOp::from_dense(b)))
            .collect();
        let sw_adj = sw.iter().map(|(a, b)| (a.adjoint(), b.adjoint())).collect();
        Lindbladian {
            k: k_sparse,
            k_adj,
            sandwiches: sw,
            sandwiches_adj: sw_adj,
        }
    }

    pub fn k(&self) -> Op<D> {
        self.k.to_dense()
    }

    /// Apply the generator to an arbitrary (not necessarily Hermitian) operator.
    pub fn apply(&self, x: &Op<D>) -> Op<D> {
        let mut out = self.k.left_mul(x);
        self.k_adj.right_mul_acc(x, &mut out);
        for (a, b) in &self.sandwiches {
            let ax = a.left_mul(x);
            b.right_mul_acc(&ax, &mut out);
        }
        out
    }

    /// Apply the generator to a Hermitian operator, using `X K† = (K X)†`.
    pub fn apply_hermitian(&self, x: &Op<D>) -> Op<D> {
        let kx = self.k.left_mul(x);
        let mut out = kx + kx.adjoint();
        for (a, b) in &self.sandwiches {
            let ax = a.left_mul(x);
            b.right_mul_acc(&ax, &mut out);
        }
        out
    }

    /// Hilbert-Schmidt adjoint: `Y -> K† Y + Y K + Σ A† Y B†`.
    pub fn apply_adjoint(&self, y: &Op<D>) -> Op<D> {
        let mut out = self.k_adj.left_mul(y);
        self.k.right_mul_acc(y, &mut out);
        for (a, b) in &self.sandwiches_adj {
            let ay = a.left_mul(y);
            b.right_mul_acc(&ay, &mut out);
        }
        out
    }
}

/// `D[r]ρ = r ρ r† - ½ (r†r ρ + ρ r†r)`
pub fn dissipator<const D: usize>(r: &Op<D>, rho: &Op<D>) -> Op<D> {
    let rd = r.adjoint();
    let rdr = rd * r;
    r * rho * rd - (rdr * rho + rho * rdr) * C64::from(0.5)
}

/// `H[r]ρ = r ρ + ρ r† - Tr[r ρ + ρ r†] ρ`
pub fn meas_superop<const D: usize>(r: &Op<D>, rho: &Op<D>) -> Op<D> {
    let s = r * rho + rho * r.adjoint();
    let tr = s.trace();
    s - rho * tr
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix3;

    fn random_op(seed: u64) -> Op<3> {
        // small deterministic LCG, enough for algebra checks
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        Matrix3::from_fn(|_, _| Complex64::new(next(), next()))
    }

    #[test]
    fn sparse_products_match_dense() {
        let a = random_op(1);
        let x = random_op(2);
        let sa = SparseOp::from_dense(&a);
        assert!(max_abs(&(sa.left_mul(&x) - a * x)) < 1e-14);
        assert!(max_abs(&(sa.right_mul(&x) - x * a)) < 1e-14);
        assert_eq!(sa.to_dense(), a);
    }

    #[test]
    fn generator_matches_explicit_lindblad_form() {
        let h0 = random_op(3);
        let h = (h0 + h0.adjoint()) * C64::from(0.5);
        let l1 = random_op(4);
        let l2 = random_op(5);
        let x = random_op(6);
        let gen = Lindbladian::new(&h, &[l1, l2]);
        let direct = (h * x - x * h) * Complex64::new(0.0, -1.0)
            + dissipator(&l1, &x)
            + dissipator(&l2, &x);
        assert!(max_abs(&(gen.apply(&x) - direct)) < 1e-13);
    }

    #[test]
    fn adjoint_is_hilbert_schmidt_dual() {
        let h0 = random_op(7);
        let h = (h0 + h0.adjoint()) * C64::from(0.5);
        let gen = Lindbladian::new(&h, &[random_op(8)]);
        let x = random_op(9);
        let y = random_op(10);
        let lhs = (y.adjoint() * gen.apply(&x)).trace();
        let rhs = (gen.apply_adjoint(&y).adjoint() * x).trace();
        assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn hermitian_fast_path_agrees() {
        let h0 = random_op(11);
        let h = (h0 + h0.adjoint()) * C64::from(0.5);
        let gen = Lindbladian::new(&h, &[random_op(12)]);
        let x0 = random_op(13);
        let x = x0 * x0.adjoint();
        assert!(max_abs(&(gen.apply(&x) - gen.apply_hermitian(&x))) < 1e-14);
    }
}
