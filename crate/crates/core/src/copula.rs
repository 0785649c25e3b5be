//! Copulas of bipartite states.
//!
//! For a full-rank state `ρ` on `M_n ⊗ M_m` the map `Φ = Φ_ρ` is strictly
//! positive, so `T = inv ∘ Φ* ∘ inv ∘ Φ` is a strict contraction of the
//! Hilbert projective metric on `M_n`. Its unique fixed ray `φ` (with
//! `T(φ) = λφ`, `λ = n/m`) yields positive definite scalers
//!
//! ```text
//! φ₁ = (1/m) Φ(φ)⁻¹        φ₀ = n Φ*(φ₁)
//! Φ(φ₀⁻¹) = (1/m) φ₁⁻¹     Φ*(φ₁) = (1/n) φ₀
//! ```
//!
//! and any factorizations `φ₀ = ψ₀*ψ₀`, `φ₁ = ψ₁*ψ₁` give the precopula
//! `χ = ((ψ₀⁻¹)ᵀ ⊗ ψ₁) ρ ((ψ₀⁻¹)ᵀ ⊗ ψ₁)*`. Different factorizations change
//! `χ` only by a local unitary conjugation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::choi::ChoiOperator;
use crate::error::{Error, Result};
use crate::matcore::{
    cholesky_factor, cholesky_like_factor, conj, eig_hermitian_unchecked, hermitian_part, identity,
    kron, rel_diff, trace, CMatrix, DEFAULT_RANK_TOL,
};
use crate::pmetric::{hilbert_distance, ProjectiveDistance};
use crate::states::{partial_transpose_second, DensityMatrix};

/// Smallest eigenvalue ratio an intermediate of `T` may have before inversion.
pub const SINGULAR_INTERMEDIATE: f64 = 1e-14;

/// Relative tolerance on the two scaling equations.
pub const SCALING_EQUATION_TOL: f64 = 1e-9;

/// Marginal tolerance used by [`copula_invariants`] to accept a precopula.
pub const INVARIANT_PRECOPULA_TOL: f64 = 1e-8;

/// Solver settings; mirrors the JSON config accepted by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Stop once successive iterates are this close in the Hilbert metric.
    pub tol: f64,
    /// Largest accepted Frobenius deviation of either marginal from uniform.
    pub marginal_tol: f64,
    pub max_iter: usize,
    /// Minimum eigenvalue a state needs to count as full rank.
    pub rank_tol: f64,
    /// Replace `ρ` by `(1−ε)ρ + ε I/(nm)` before solving.
    pub regularize: bool,
    pub reg_eps: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            marginal_tol: 1e-10,
            max_iter: 1000,
            rank_tol: DEFAULT_RANK_TOL,
            regularize: false,
            reg_eps: 1e-8,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        positive("tol", self.tol)?;
        positive("marginal_tol", self.marginal_tol)?;
        positive("rank_tol", self.rank_tol)?;
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
        }
        if self.regularize && !(self.reg_eps > 0.0 && self.reg_eps < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "reg_eps must lie in (0, 1), got {}",
                self.reg_eps
            )));
        }
        Ok(())
    }
}

/// How the scalers `φ₀`, `φ₁` are factored as `ψ*ψ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Factorization {
    /// Hermitian square root.
    #[default]
    SquareRoot,
    /// Adjoint of the lower Cholesky factor.
    Cholesky,
}

impl Factorization {
    pub fn factor(self, a: &CMatrix) -> Result<CMatrix> {
        match self {
            Factorization::SquareRoot => cholesky_like_factor(a),
            Factorization::Cholesky => cholesky_factor(a),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointReport {
    /// Trace-one representative of the fixed ray.
    pub phi_ray: CMatrix,
    /// `Tr T(φ)` for the trace-one `φ`.
    pub lambda: f64,
    pub iterations: usize,
    /// Hilbert distance between the last two iterates.
    pub final_step: f64,
    pub converged: bool,
    /// Hilbert distance of every step, in order.
    pub steps: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalerPair {
    pub phi0: CMatrix,
    pub phi1: CMatrix,
    pub psi0: CMatrix,
    pub psi1: CMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CopulaResult {
    pub chi: DensityMatrix,
    pub scalers: ScalerPair,
    pub report: FixedPointReport,
    pub marginal_residual: f64,
    /// `ε` when the input was regularized before solving.
    pub regularized_with: Option<f64>,
}

impl CopulaResult {
    /// `(a, b)` with `χ ∝ (a*⊗b*) ρ (a⊗b)`, i.e. `a = conj(ψ₀⁻¹)`, `b = ψ₁*`.
    pub fn connection_matrices(&self) -> Result<(CMatrix, CMatrix)> {
        let psi0_inv = invert(&self.scalers.psi0)?;
        Ok((conj(&psi0_inv), self.scalers.psi1.adjoint()))
    }
}

fn invert(a: &CMatrix) -> Result<CMatrix> {
    a.clone().try_inverse().ok_or(Error::SingularTransform {
        condition: f64::INFINITY,
    })
}

/// Inverse of a Hermitian positive definite intermediate of `T`.
fn inverse_pd(a: &CMatrix) -> Result<CMatrix> {
    let spec = eig_hermitian_unchecked(&hermitian_part(a));
    let (lo, hi) = (spec.min(), spec.max());
    if !(hi > 0.0) || lo < SINGULAR_INTERMEDIATE * hi {
        return Err(Error::SingularIntermediate {
            ratio: if hi > 0.0 { lo / hi } else { 0.0 },
        });
    }
    Ok(spec.map(|x| 1.0 / x))
}

fn normalize_trace(a: &CMatrix) -> CMatrix {
    a / Complex64::new(trace(a).re, 0.0)
}

/// One application of `T = inv ∘ Φ* ∘ inv ∘ Φ`.
pub fn apply_t(phi: &ChoiOperator, x: &CMatrix) -> Result<CMatrix> {
    let forward = inverse_pd(&phi.apply(x)?)?;
    inverse_pd(&phi.apply_adjoint(&forward)?)
}

fn step_distance(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    match hilbert_distance(a, b, DEFAULT_RANK_TOL)? {
        ProjectiveDistance::Finite(v) => Ok(v),
        ProjectiveDistance::Infinite => Err(Error::SingularIntermediate { ratio: 0.0 }),
    }
}

/// Iterates the trace-normalized map `T` from `init` (default `I/n`) until
/// successive iterates are within `tol` in the Hilbert metric.
pub fn fixed_point_iterate(
    phi: &ChoiOperator,
    tol: f64,
    max_iter: usize,
    init: Option<&CMatrix>,
) -> Result<FixedPointReport> {
    let n = phi.dim_in();
    let mut current = match init {
        Some(x) => {
            crate::matcore::check_shape(x, n, n)?;
            let spec = crate::matcore::eig_hermitian(x)?;
            if !(spec.min() > 0.0) {
                return Err(Error::NotPositiveDefinite {
                    min_eigenvalue: spec.min(),
                    max_eigenvalue: spec.max(),
                });
            }
            normalize_trace(&hermitian_part(x))
        }
        None => identity(n) / Complex64::new(n as f64, 0.0),
    };

    let mut steps = Vec::new();
    let mut converged = false;
    for _ in 0..max_iter {
        let next = normalize_trace(&apply_t(phi, &current)?);
        let step = step_distance(&next, &current)?;
        steps.push(step);
        current = next;
        if step <= tol {
            converged = true;
            break;
        }
    }

    let lambda = trace(&apply_t(phi, &current)?).re;
    let report = FixedPointReport {
        phi_ray: current,
        lambda,
        iterations: steps.len(),
        final_step: steps.last().copied().unwrap_or(f64::INFINITY),
        converged,
        steps,
    };
    if converged {
        Ok(report)
    } else {
        Err(Error::NotConverged {
            report: Box::new(report),
        })
    }
}

/// Relative residuals of `Φ(φ₀⁻¹) = (1/m)φ₁⁻¹` and `Φ*(φ₁) = (1/n)φ₀`.
pub fn scaling_equation_residuals(
    phi: &ChoiOperator,
    phi0: &CMatrix,
    phi1: &CMatrix,
) -> Result<(f64, f64)> {
    let (n, m) = (phi.dim_in() as f64, phi.dim_out() as f64);
    let lhs1 = phi.apply(&invert(phi0)?)?;
    let rhs1 = invert(phi1)? / Complex64::new(m, 0.0);
    let lhs2 = phi.apply_adjoint(phi1)?;
    let rhs2 = phi0 / Complex64::new(n, 0.0);
    Ok((rel_diff(&lhs1, &rhs1), rel_diff(&lhs2, &rhs2)))
}

pub fn extract_scalers(phi: &ChoiOperator, report: &FixedPointReport) -> Result<ScalerPair> {
    extract_scalers_with(phi, report, Factorization::SquareRoot)
}

/// `φ₁ = (1/m) Φ(φ)⁻¹`, `φ₀ = n Φ*(φ₁)` and their factors, checked
/// against both scaling equations.
pub fn extract_scalers_with(
    phi: &ChoiOperator,
    report: &FixedPointReport,
    factorization: Factorization,
) -> Result<ScalerPair> {
    if !report.converged {
        return Err(Error::NotConverged {
            report: Box::new(report.clone()),
        });
    }
    let (n, m) = (phi.dim_in() as f64, phi.dim_out() as f64);
    let phi1 = inverse_pd(&phi.apply(&report.phi_ray)?)? / Complex64::new(m, 0.0);
    let phi0 = hermitian_part(&phi.apply_adjoint(&phi1)?) * Complex64::new(n, 0.0);

    let (first, second) = scaling_equation_residuals(phi, &phi0, &phi1)?;
    if !(first <= SCALING_EQUATION_TOL && second <= SCALING_EQUATION_TOL) {
        return Err(Error::VerificationFailed { first, second });
    }
    let psi0 = factorization.factor(&phi0)?;
    let psi1 = factorization.factor(&phi1)?;
    Ok(ScalerPair {
        phi0,
        phi1,
        psi0,
        psi1,
    })
}

pub fn copula_of(rho: &DensityMatrix, cfg: &SolverConfig) -> Result<CopulaResult> {
    copula_of_with(rho, cfg, Factorization::SquareRoot)
}

/// Full pipeline: Choi map, fixed point, scalers, precopula representative.
pub fn copula_of_with(
    rho: &DensityMatrix,
    cfg: &SolverConfig,
    factorization: Factorization,
) -> Result<CopulaResult> {
    cfg.validate()?;
    let (n, m) = rho.dims();
    let (state, regularized_with) = if cfg.regularize {
        let eps = cfg.reg_eps;
        let d = (n * m) as f64;
        let mixed = rho.matrix() * Complex64::new(1.0 - eps, 0.0)
            + identity(n * m) * Complex64::new(eps / d, 0.0);
        (DensityMatrix::new(mixed, n, m)?, Some(eps))
    } else {
        let min_eigenvalue = rho.min_eigenvalue();
        if !(min_eigenvalue > cfg.rank_tol) {
            return Err(Error::RankDeficient { min_eigenvalue });
        }
        (rho.clone(), None)
    };

    let phi = ChoiOperator::from_state(&state);
    let report = fixed_point_iterate(&phi, cfg.tol, cfg.max_iter, None)?;
    let scalers = extract_scalers_with(&phi, &report, factorization)?;
    let transformed = phi.sandwich_transform(&invert(&scalers.psi0)?, &scalers.psi1)?;
    let chi_mat = normalize_trace(&hermitian_part(transformed.choi()));
    let chi = DensityMatrix::new(chi_mat, n, m)?;
    let marginal_residual = chi.marginal_residual();
    if !(marginal_residual <= cfg.marginal_tol) {
        return Err(Error::PrecopulaCheckFailed {
            residual: marginal_residual,
        });
    }
    Ok(CopulaResult {
        chi,
        scalers,
        report,
        marginal_residual,
        regularized_with,
    })
}

/// `‖(a*⊗b*) ρ (a⊗b) / Tr(·) − χ‖_F`.
pub fn verify_connection(
    rho: &DensityMatrix,
    chi: &DensityMatrix,
    a: &CMatrix,
    b: &CMatrix,
) -> Result<f64> {
    let (n, m) = rho.dims();
    if chi.dims() != (n, m) {
        return Err(Error::ShapeMismatch {
            expected: (n * m, n * m),
            got: chi.matrix().shape(),
        });
    }
    crate::matcore::check_shape(a, n, n)?;
    crate::matcore::check_shape(b, m, m)?;
    let w = kron(a, b);
    let moved = w.adjoint() * rho.matrix() * &w;
    Ok((normalize_trace(&moved) - chi.matrix()).norm())
}

/// Local-unitary invariants of a precopula. Equal copula classes give
/// equal fingerprints; the converse need not hold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CopulaFingerprint {
    /// Ascending spectrum of `χ`.
    pub spectrum: Vec<f64>,
    /// `Tr χ²`.
    pub purity: f64,
    /// `Tr χ³`.
    pub cubic_moment: f64,
    /// Ascending spectrum of the partial transpose of `χ`.
    pub partial_transpose_spectrum: Vec<f64>,
}

impl CopulaFingerprint {
    /// Flattened as spectrum, `Tr χ²`, `Tr χ³`, partial-transpose spectrum.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut out = self.spectrum.clone();
        out.push(self.purity);
        out.push(self.cubic_moment);
        out.extend_from_slice(&self.partial_transpose_spectrum);
        out
    }

    pub fn max_abs_difference(&self, other: &Self) -> f64 {
        let (a, b) = (self.to_vec(), other.to_vec());
        if a.len() != b.len() {
            return f64::INFINITY;
        }
        a.iter()
            .zip(&b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

pub fn copula_invariants(chi: &DensityMatrix) -> Result<CopulaFingerprint> {
    let residual = chi.marginal_residual();
    if !(residual <= INVARIANT_PRECOPULA_TOL) {
        return Err(Error::NotPrecopula { residual });
    }
    let (n, m) = chi.dims();
    let mat = chi.matrix();
    let spectrum = eig_hermitian_unchecked(mat).eigenvalues;
    let purity = spectrum.iter().map(|x| x * x).sum();
    let cubic_moment = spectrum.iter().map(|x| x * x * x).sum();
    let pt = hermitian_part(&partial_transpose_second(mat, n, m));
    let partial_transpose_spectrum = eig_hermitian_unchecked(&pt).eigenvalues;
    Ok(CopulaFingerprint {
        spectrum,
        purity,
        cubic_moment,
        partial_transpose_spectrum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{ginibre_state, haar_unitary, rng};
    use crate::states::{random_full_rank_state, random_separable_state};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn defaults() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn maximally_mixed_is_fixed_immediately() {
        let phi = ChoiOperator::from_state(&DensityMatrix::maximally_mixed(2, 2));
        let report = fixed_point_iterate(&phi, 1e-12, 100, None).unwrap();
        assert_eq!(report.iterations, 1);
        assert!((&report.phi_ray - identity(2) * c(0.5)).norm() < 1e-15);
        assert!((report.lambda - 1.0).abs() < 1e-14);
    }

    #[test]
    fn maximally_mixed_scalers() {
        // φ = I/2: Φ(φ) = I/4, φ₁ = (1/2)(4I) = 2I, φ₀ = 2 Φ*(2I) = 2I
        let phi = ChoiOperator::from_state(&DensityMatrix::maximally_mixed(2, 2));
        let report = fixed_point_iterate(&phi, 1e-12, 100, None).unwrap();
        let s = extract_scalers(&phi, &report).unwrap();
        assert!((&s.phi0 - identity(2) * c(2.0)).norm() < 1e-14);
        assert!((&s.phi1 - identity(2) * c(2.0)).norm() < 1e-14);
        let (r1, r2) = scaling_equation_residuals(&phi, &s.phi0, &s.phi1).unwrap();
        assert!(r1 < 1e-12 && r2 < 1e-12);
    }

    #[test]
    fn scaler_gauge_freedom() {
        let rho = random_full_rank_state(2, 3, 21).unwrap();
        let phi = ChoiOperator::from_state(&rho);
        let report = fixed_point_iterate(&phi, 1e-12, 1000, None).unwrap();
        let s = extract_scalers(&phi, &report).unwrap();
        // both scalers share one positive constant
        let k = c(3.7);
        let (r1, r2) = scaling_equation_residuals(&phi, &(&s.phi0 * k), &(&s.phi1 * k)).unwrap();
        assert!(r1 < 1e-9 && r2 < 1e-9);
        let (r1, _) = scaling_equation_residuals(&phi, &(&s.phi0 * k), &(&s.phi1 / k)).unwrap();
        assert!(r1 > 0.5);
    }

    #[test]
    fn product_state_scalers_follow_factors() {
        let mut r = rng(4);
        let r1 = ginibre_state(2, &mut r);
        let r2 = ginibre_state(3, &mut r);
        let rho = DensityMatrix::product(&r1, &r2).unwrap();
        let phi = ChoiOperator::from_state(&rho);
        let report = fixed_point_iterate(&phi, 1e-12, 1000, None).unwrap();
        let s = extract_scalers(&phi, &report).unwrap();
        // φ₀ ∝ ρ₁ᵀ and φ₁ ∝ ρ₂⁻¹
        let t0 = r1.transpose();
        let ratio0 = trace(&s.phi0).re / trace(&t0).re;
        assert!(rel_diff(&s.phi0, &(&t0 * c(ratio0))) < 1e-10);
        let inv2 = r2.clone().try_inverse().unwrap();
        let ratio1 = trace(&s.phi1).re / trace(&inv2).re;
        assert!(rel_diff(&s.phi1, &(&inv2 * c(ratio1))) < 1e-10);

        let out = copula_of(&rho, &defaults()).unwrap();
        assert!((out.chi.matrix() - identity(6) * c(1.0 / 6.0)).norm() < 1e-10);
    }

    #[test]
    fn precopula_maps_to_itself() {
        let chi0 = DensityMatrix::new(
            CMatrix::from_diagonal(&nalgebra::dvector![c(0.4), c(0.1), c(0.1), c(0.4)]),
            2,
            2,
        )
        .unwrap();
        let out = copula_of(&chi0, &defaults()).unwrap();
        assert!((out.chi.matrix() - chi0.matrix()).norm() < 1e-10);
        let mixed = DensityMatrix::maximally_mixed(2, 2);
        let out = copula_of(&mixed, &defaults()).unwrap();
        assert!((out.chi.matrix() - mixed.matrix()).norm() < 1e-14);
    }

    #[test]
    fn precopula_fixed_ray_is_identity() {
        let chi = copula_of(&random_full_rank_state(2, 2, 5).unwrap(), &defaults())
            .unwrap()
            .chi;
        let phi = ChoiOperator::from_state(&chi);
        let report = fixed_point_iterate(&phi, 1e-12, 100, None).unwrap();
        assert!((&report.phi_ray - identity(2) * c(0.5)).norm() < 1e-12);
    }

    #[test]
    fn random_state_converges_with_expected_lambda() {
        for (n, m, seed) in [(2, 2, 1), (2, 3, 2), (3, 2, 3)] {
            let phi = ChoiOperator::from_state(&random_full_rank_state(n, m, seed).unwrap());
            let report = fixed_point_iterate(&phi, 1e-12, 1000, None).unwrap();
            assert!(report.converged && report.iterations < 200);
            assert!((report.lambda - n as f64 / m as f64).abs() < 1e-8);
        }
    }

    #[test]
    fn different_inits_share_the_ray() {
        let phi = ChoiOperator::from_state(&random_full_rank_state(2, 2, 6).unwrap());
        let a = fixed_point_iterate(&phi, 1e-12, 1000, None).unwrap();
        let init = ginibre_state(2, &mut rng(6));
        let b = fixed_point_iterate(&phi, 1e-12, 1000, Some(&init)).unwrap();
        let d = hilbert_distance(&a.phi_ray, &b.phi_ray, DEFAULT_RANK_TOL).unwrap();
        assert!(d.as_f64() < 1e-8);
    }

    #[test]
    fn not_converged_carries_report() {
        let phi = ChoiOperator::from_state(&random_full_rank_state(3, 3, 7).unwrap());
        match fixed_point_iterate(&phi, 1e-15, 2, None) {
            Err(Error::NotConverged { report }) => {
                assert!(!report.converged);
                assert_eq!(report.iterations, 2);
            }
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }

    #[test]
    fn extract_requires_convergence() {
        let phi = ChoiOperator::from_state(&DensityMatrix::maximally_mixed(2, 2));
        let mut report = fixed_point_iterate(&phi, 1e-12, 10, None).unwrap();
        report.converged = false;
        assert!(matches!(
            extract_scalers(&phi, &report),
            Err(Error::NotConverged { .. })
        ));
    }

    #[test]
    fn rank_deficient_needs_regularization() {
        let bell = DensityMatrix::maximally_entangled(2);
        assert!(matches!(
            copula_of(&bell, &defaults()),
            Err(Error::RankDeficient { .. })
        ));
        let cfg = SolverConfig {
            regularize: true,
            ..defaults()
        };
        let out = copula_of(&bell, &cfg).unwrap();
        assert_eq!(out.regularized_with, Some(1e-8));
        assert!(out.marginal_residual <= 1e-10);
    }

    #[test]
    fn connection_reproduces_copula() {
        let rho = random_full_rank_state(2, 3, 8).unwrap();
        let out = copula_of(&rho, &defaults()).unwrap();
        let (a, b) = out.connection_matrices().unwrap();
        assert!(verify_connection(&rho, &out.chi, &a, &b).unwrap() < 1e-10);
        assert_eq!(
            verify_connection(&rho, &rho, &identity(2), &identity(3)).unwrap(),
            0.0
        );
        let mut r = rng(8);
        let wrong_a = crate::random::ginibre(2, 2, &mut r);
        let wrong_b = crate::random::ginibre(3, 3, &mut r);
        assert!(verify_connection(&rho, &out.chi, &wrong_a, &wrong_b).unwrap() > 1e-3);
    }

    #[test]
    fn complex_state_marginals_are_uniform() {
        // a conjugated transpose in the transform would break this on complex input
        let rho = random_full_rank_state(3, 2, 9).unwrap();
        assert!(rho.matrix().iter().any(|z| z.im.abs() > 1e-3));
        let out = copula_of(&rho, &defaults()).unwrap();
        assert!(out.marginal_residual < 1e-10);
        let w = kron(
            &invert(&out.scalers.psi0).unwrap().adjoint(),
            &out.scalers.psi1,
        );
        let wrong = normalize_trace(&(&w * rho.matrix() * w.adjoint()));
        let wrong = DensityMatrix::new(wrong, 3, 2).unwrap();
        assert!(wrong.marginal_residual() > 1e-6);
    }

    #[test]
    fn fingerprints() {
        let mixed = copula_invariants(&DensityMatrix::maximally_mixed(2, 2)).unwrap();
        for x in &mixed.spectrum {
            assert!((x - 0.25).abs() < 1e-15);
        }
        let chi = copula_of(&random_full_rank_state(2, 2, 10).unwrap(), &defaults())
            .unwrap()
            .chi;
        let mut r = rng(10);
        let moved = chi
            .conjugate_local(&haar_unitary(2, &mut r), &haar_unitary(2, &mut r))
            .unwrap();
        let (fa, fb) = (
            copula_invariants(&chi).unwrap(),
            copula_invariants(&moved).unwrap(),
        );
        assert!(fa.max_abs_difference(&fb) < 1e-10);
        let other = copula_of(&random_full_rank_state(2, 2, 11).unwrap(), &defaults())
            .unwrap()
            .chi;
        assert!(fa.max_abs_difference(&copula_invariants(&other).unwrap()) > 1e-6);
        let p = random_separable_state(2, 2, 1, 3).unwrap();
        assert!(matches!(
            copula_invariants(&p),
            Err(Error::NotPrecopula { .. })
        ));
    }

    #[test]
    fn config_validation() {
        let bad = SolverConfig {
            tol: 0.0,
            ..defaults()
        };
        assert!(bad.validate().is_err());
        let bad = SolverConfig {
            max_iter: 0,
            ..defaults()
        };
        assert!(bad.validate().is_err());
        let bad = SolverConfig {
            regularize: true,
            reg_eps: 1.5,
            ..defaults()
        };
        assert!(bad.validate().is_err());
    }
}
