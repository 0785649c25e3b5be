//! Linear maps `M_n → M_m` represented by their Choi matrices.
//!
//! The Choi matrix of `Φ` is `ρ_Φ = Σ_ij E_ij ⊗ Φ(E_ij)`, so with the index
//! convention of [`crate::states`] the `m × m` block `(i, j)` of `ρ_Φ` is
//! `Φ(E_ij)`. A bipartite state read as a Choi matrix gives the map `Φ_ρ`
//! whose marginal identities drive the copula construction.
//!
//! Composition with multiplication operators acts on the Choi matrix as
//!
//! ```text
//! ρ_{L_B∘Φ} = (I ⊗ B) ρ_Φ          ρ_{R_B∘Φ} = ρ_Φ (I ⊗ B)
//! ρ_{Φ∘L_A} = (Aᵀ ⊗ I) ρ_Φ         ρ_{Φ∘R_A} = ρ_Φ (Aᵀ ⊗ I)
//! ```
//!
//! where `ᵀ` is the plain (non-conjugating) transpose.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matcore::{
    check_shape, condition_number, eig_hermitian_unchecked, hermitian_defect, hermitian_part,
    identity, kron, matrix_unit, trace, CMatrix, ZERO,
};
use crate::random::{pure_state, rng};
use crate::states::DensityMatrix;

/// Largest condition number accepted by [`ChoiOperator::sandwich_transform`].
pub const MAX_TRANSFORM_CONDITION: f64 = 1e12;

const HERMITIAN_MARKER_TOL: f64 = 1e-10;
const STRICT_POSITIVITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ChoiOperator {
    choi: CMatrix,
    dim_in: usize,
    dim_out: usize,
    hermitian: bool,
}

impl ChoiOperator {
    pub fn new(choi: CMatrix, dim_in: usize, dim_out: usize) -> Result<Self> {
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::InvalidDimensions(format!(
                "map dimensions must be positive, got ({dim_in}, {dim_out})"
            )));
        }
        let d = dim_in * dim_out;
        check_shape(&choi, d, d)?;
        crate::matcore::check_finite(&choi)?;
        Ok(Self::from_parts(choi, dim_in, dim_out))
    }

    fn from_parts(choi: CMatrix, dim_in: usize, dim_out: usize) -> Self {
        let hermitian = hermitian_defect(&choi) <= HERMITIAN_MARKER_TOL;
        Self {
            choi,
            dim_in,
            dim_out,
            hermitian,
        }
    }

    /// Reads a state on `M_n ⊗ M_m` as the Choi matrix of `Φ_ρ: M_n → M_m`.
    pub fn from_state(rho: &DensityMatrix) -> Self {
        let (n, m) = rho.dims();
        Self {
            choi: rho.matrix().clone(),
            dim_in: n,
            dim_out: m,
            hermitian: true,
        }
    }

    /// `Σ E_ij ⊗ f(E_ij)`.
    pub fn from_map(
        dim_in: usize,
        dim_out: usize,
        f: impl Fn(&CMatrix) -> CMatrix,
    ) -> Result<Self> {
        let mut choi = CMatrix::zeros(dim_in * dim_out, dim_in * dim_out);
        for i in 0..dim_in {
            for j in 0..dim_in {
                let out = f(&matrix_unit(dim_in, i, j));
                check_shape(&out, dim_out, dim_out)?;
                choi.view_mut((i * dim_out, j * dim_out), (dim_out, dim_out))
                    .copy_from(&out);
            }
        }
        Self::new(choi, dim_in, dim_out)
    }

    /// The identity map on `M_n`.
    pub fn identity_map(n: usize) -> Self {
        let mut choi = CMatrix::zeros(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                choi[(i * n + i, j * n + j)] = Complex64::new(1.0, 0.0);
            }
        }
        Self::from_parts(choi, n, n)
    }

    /// `X ↦ Tr(X) I_m`, whose Choi matrix is `I_{nm}`.
    pub fn trace_map(n: usize, m: usize) -> Self {
        Self::from_parts(identity(n * m), n, m)
    }

    pub fn choi(&self) -> &CMatrix {
        &self.choi
    }

    pub fn into_choi(self) -> CMatrix {
        self.choi
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    /// Whether the Choi matrix is Hermitian, i.e. the map preserves Hermiticity.
    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// `Φ(E_ij)`.
    pub fn block(&self, i: usize, j: usize) -> CMatrix {
        let m = self.dim_out;
        self.choi.view((i * m, j * m), (m, m)).into_owned()
    }

    /// `Φ(X) = Σ_ij X[i,j] Φ(E_ij)`.
    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        let (n, m) = (self.dim_in, self.dim_out);
        check_shape(x, n, n)?;
        let mut out = CMatrix::zeros(m, m);
        for i in 0..n {
            for j in 0..n {
                let w = x[(i, j)];
                if w == ZERO {
                    continue;
                }
                for l in 0..m {
                    for k in 0..m {
                        out[(k, l)] += w * self.choi[(i * m + k, j * m + l)];
                    }
                }
            }
        }
        debug_assert!(
            (&out - self.apply_via_partial_trace(x)).norm()
                <= 1e-13 * (1.0 + x.norm() * self.choi.norm()),
            "blockwise and partial-trace evaluations of the map disagree"
        );
        Ok(out)
    }

    /// `Tr₁[(Xᵀ ⊗ I) ρ_Φ]`, the slow route used to cross-check [`Self::apply`].
    pub fn apply_via_partial_trace(&self, x: &CMatrix) -> CMatrix {
        let (n, m) = (self.dim_in, self.dim_out);
        let lifted = kron(&x.transpose(), &identity(m)) * &self.choi;
        CMatrix::from_fn(m, m, |k, l| {
            (0..n).map(|i| lifted[(i * m + k, i * m + l)]).sum()
        })
    }

    /// Hilbert–Schmidt adjoint: `Φ*(Y)[i,j] = ⟨Φ(E_ij), Y⟩ = Tr(Φ(E_ij)* Y)`.
    pub fn apply_adjoint(&self, y: &CMatrix) -> Result<CMatrix> {
        let (n, m) = (self.dim_in, self.dim_out);
        check_shape(y, m, m)?;
        Ok(CMatrix::from_fn(n, n, |i, j| {
            let mut acc = ZERO;
            for l in 0..m {
                for k in 0..m {
                    acc += self.choi[(i * m + k, j * m + l)].conj() * y[(k, l)];
                }
            }
            acc
        }))
    }

    /// The Choi operator of `Φ*: M_m → M_n`.
    pub fn adjoint(&self) -> Self {
        let (n, m) = (self.dim_in, self.dim_out);
        let choi = CMatrix::from_fn(n * m, n * m, |r, c| {
            let (k, i) = (r / n, r % n);
            let (l, j) = (c / n, c % n);
            self.choi[(i * m + k, j * m + l)].conj()
        });
        Self {
            choi,
            dim_in: m,
            dim_out: n,
            hermitian: self.hermitian,
        }
    }

    /// Choi operator of `L_B ∘ Φ`.
    pub fn post_multiply_left(&self, b: &CMatrix) -> Result<Self> {
        check_shape(b, self.dim_out, self.dim_out)?;
        let w = kron(&identity(self.dim_in), b);
        Ok(Self::from_parts(w * &self.choi, self.dim_in, self.dim_out))
    }

    /// Choi operator of `R_B ∘ Φ`.
    pub fn post_multiply_right(&self, b: &CMatrix) -> Result<Self> {
        check_shape(b, self.dim_out, self.dim_out)?;
        let w = kron(&identity(self.dim_in), b);
        Ok(Self::from_parts(&self.choi * w, self.dim_in, self.dim_out))
    }

    /// Choi operator of `Φ ∘ L_A`.
    pub fn pre_multiply_left(&self, a: &CMatrix) -> Result<Self> {
        check_shape(a, self.dim_in, self.dim_in)?;
        let w = kron(&a.transpose(), &identity(self.dim_out));
        Ok(Self::from_parts(w * &self.choi, self.dim_in, self.dim_out))
    }

    /// Choi operator of `Φ ∘ R_A`.
    pub fn pre_multiply_right(&self, a: &CMatrix) -> Result<Self> {
        check_shape(a, self.dim_in, self.dim_in)?;
        let w = kron(&a.transpose(), &identity(self.dim_out));
        Ok(Self::from_parts(&self.choi * w, self.dim_in, self.dim_out))
    }

    /// Choi operator of `X ↦ B Φ(A X A*) B*`, namely
    /// `(Aᵀ ⊗ B) ρ_Φ (Aᵀ ⊗ B)*`.
    pub fn sandwich_transform(&self, a: &CMatrix, b: &CMatrix) -> Result<Self> {
        check_shape(a, self.dim_in, self.dim_in)?;
        check_shape(b, self.dim_out, self.dim_out)?;
        for t in [a, b] {
            let condition = condition_number(t);
            if !(condition <= MAX_TRANSFORM_CONDITION) {
                return Err(Error::SingularTransform { condition });
            }
        }
        let w = kron(&a.transpose(), b);
        let mut choi = &w * &self.choi * w.adjoint();
        if self.hermitian {
            choi = hermitian_part(&choi);
        }
        Ok(Self {
            choi,
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            hermitian: self.hermitian,
        })
    }

    /// Falsification probe for strict positivity: `trials` random rank-one
    /// projectors must all map to positive definite matrices.
    pub fn is_strictly_positive_sample(&self, trials: usize, seed: u64) -> Result<bool> {
        if trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        let mut r = rng(seed);
        for _ in 0..trials {
            let p = pure_state(self.dim_in, &mut r);
            let out = self.apply(&p)?;
            if hermitian_defect(&out) > HERMITIAN_MARKER_TOL {
                return Ok(false);
            }
            let scale = trace(&out).re;
            let lo = eig_hermitian_unchecked(&hermitian_part(&out)).min();
            if !(scale > 0.0 && lo > STRICT_POSITIVITY_TOL * scale) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub fn choi_from_state(rho: &DensityMatrix) -> ChoiOperator {
    ChoiOperator::from_state(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::frobenius_inner;
    use crate::random::{ginibre, haar_unitary};
    use crate::states::{partial_trace_first, partial_trace_second, random_full_rank_state};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn maximally_mixed_blocks() {
        let phi = ChoiOperator::from_state(&DensityMatrix::maximally_mixed(2, 2));
        for i in 0..2 {
            for j in 0..2 {
                let expected = if i == j {
                    identity(2) * c(0.25)
                } else {
                    CMatrix::zeros(2, 2)
                };
                assert_eq!(phi.block(i, j), expected);
            }
        }
        let x = ginibre(2, 2, &mut rng(1));
        let out = phi.apply(&x).unwrap();
        assert!((out - identity(2) * trace(&x) * c(0.25)).norm() < 1e-15);
        let adj = phi.apply_adjoint(&identity(2)).unwrap();
        assert!((adj - identity(2) * c(0.5)).norm() < 1e-15);
    }

    #[test]
    fn bell_state_is_half_identity() {
        // ρ = (1/2) Σ E_ij ⊗ E_ij, so every block is E_ij / 2
        let phi = ChoiOperator::from_state(&DensityMatrix::maximally_entangled(2));
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(phi.block(i, j), matrix_unit(2, i, j) * c(0.5));
            }
        }
        let x = ginibre(2, 2, &mut rng(2));
        let out = phi.apply(&x).unwrap();
        assert!((out - x * c(0.5)).norm() < 1e-15);
    }

    #[test]
    fn product_state_map() {
        let mut r = rng(3);
        let r1 = crate::random::ginibre_state(2, &mut r);
        let r2 = crate::random::ginibre_state(3, &mut r);
        let phi = ChoiOperator::from_state(&DensityMatrix::product(&r1, &r2).unwrap());
        let x = ginibre(2, 2, &mut r);
        let expected = &r2 * trace(&(&x * r1.transpose()));
        assert!((phi.apply(&x).unwrap() - expected).norm() < 1e-14);
    }

    #[test]
    fn marginals_from_identity() {
        let rho = random_full_rank_state(2, 3, 4).unwrap();
        let phi = ChoiOperator::from_state(&rho);
        let out = phi.apply(&identity(2)).unwrap();
        assert!((out - partial_trace_first(&rho)).norm() < 1e-14);
        // the adjoint returns the first marginal transposed
        let adj = phi.apply_adjoint(&identity(3)).unwrap();
        assert!((adj - partial_trace_second(&rho).transpose()).norm() < 1e-14);
    }

    #[test]
    fn zero_in_zero_out() {
        let phi = ChoiOperator::from_state(&random_full_rank_state(2, 2, 5).unwrap());
        assert_eq!(
            phi.apply(&CMatrix::zeros(2, 2)).unwrap(),
            CMatrix::zeros(2, 2)
        );
        assert_eq!(
            phi.apply_adjoint(&CMatrix::zeros(2, 2)).unwrap(),
            CMatrix::zeros(2, 2)
        );
        assert!(matches!(
            phi.apply(&identity(3)),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn adjoint_identity_holds() {
        let mut r = rng(6);
        let phi = ChoiOperator::new(ginibre(6, 6, &mut r), 2, 3).unwrap();
        let x = ginibre(2, 2, &mut r);
        let y = ginibre(3, 3, &mut r);
        let lhs = frobenius_inner(&phi.apply(&x).unwrap(), &y).unwrap();
        let rhs = frobenius_inner(&x, &phi.apply_adjoint(&y).unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-13);

        let adj = phi.adjoint();
        assert!((adj.apply(&y).unwrap() - phi.apply_adjoint(&y).unwrap()).norm() < 1e-13);
    }

    #[test]
    fn sandwich_identity_is_noop() {
        let phi = ChoiOperator::from_state(&random_full_rank_state(2, 2, 7).unwrap());
        let same = phi.sandwich_transform(&identity(2), &identity(2)).unwrap();
        assert!((same.choi() - phi.choi()).norm() < 1e-15);
    }

    #[test]
    fn sandwich_with_unitary_output() {
        let phi = ChoiOperator::from_state(&random_full_rank_state(2, 2, 8).unwrap());
        let u = haar_unitary(2, &mut rng(8));
        let moved = phi.sandwich_transform(&identity(2), &u).unwrap();
        let w = kron(&identity(2), &u);
        assert!((moved.choi() - &w * phi.choi() * w.adjoint()).norm() < 1e-14);
    }

    #[test]
    fn sandwich_diagonal_on_maximally_mixed() {
        // (Aᵀ⊗B)(I/4)(Aᵀ⊗B)* with A = diag(a), B = diag(b) is diag(a_i² b_k²)/4
        let phi = ChoiOperator::from_state(&DensityMatrix::maximally_mixed(2, 2));
        let a = CMatrix::from_diagonal(&nalgebra::dvector![c(2.0), c(3.0)]);
        let b = CMatrix::from_diagonal(&nalgebra::dvector![c(0.5), c(5.0)]);
        let out = phi.sandwich_transform(&a, &b).unwrap();
        let expected = [1.0, 100.0, 2.25, 225.0].map(|x| c(x / 4.0));
        for (k, e) in expected.iter().enumerate() {
            assert!((out.choi()[(k, k)] - e).norm() < 1e-13);
        }
        assert!((out.choi() - CMatrix::from_diagonal(&out.choi().diagonal())).norm() == 0.0);
    }

    #[test]
    fn sandwich_rejects_singular() {
        let phi = ChoiOperator::from_state(&DensityMatrix::maximally_mixed(2, 2));
        let mut a = identity(2);
        a[(1, 1)] = ZERO;
        assert!(matches!(
            phi.sandwich_transform(&a, &identity(2)),
            Err(Error::SingularTransform { .. })
        ));
    }

    #[test]
    fn strict_positivity_probe() {
        let phi = ChoiOperator::from_state(&random_full_rank_state(2, 2, 9).unwrap());
        assert!(phi.is_strictly_positive_sample(50, 1).unwrap());
        let e11 = matrix_unit(2, 0, 0);
        let degenerate = ChoiOperator::new(kron(&e11, &e11), 2, 2).unwrap();
        assert!(!degenerate.is_strictly_positive_sample(50, 1).unwrap());
        assert!(phi.is_strictly_positive_sample(0, 1).is_err());
    }

    #[test]
    fn special_maps() {
        let x = ginibre(3, 3, &mut rng(10));
        let id = ChoiOperator::identity_map(3);
        assert!((id.apply(&x).unwrap() - &x).norm() < 1e-15);
        let tr = ChoiOperator::trace_map(3, 2);
        assert!((tr.apply(&x).unwrap() - identity(2) * trace(&x)).norm() < 1e-15);
        let built = ChoiOperator::from_map(3, 2, |e| identity(2) * trace(e)).unwrap();
        assert_eq!(built.choi(), tr.choi());
        assert!(tr.is_hermitian());
    }
}
