//! Hilbert–Birkhoff projective metric on the PSD cone.
//!
//! For positive definite `A`, `B` the distance is
//! `log(max σ(AB⁻¹) / min σ(AB⁻¹))`, evaluated here through the Hermitian
//! matrix `B^{-1/2} A B^{-1/2}` which has the same spectrum. Singular
//! arguments are compared on their supports: equal supports reduce to the
//! formula above on the common support, different supports are infinitely
//! far apart.
//!
//! The diameter and contraction estimators sample states, so they only
//! ever return lower bounds of the suprema that define `Δ(Φ)` and `δ(Φ)`.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::choi::ChoiOperator;
use crate::error::{Error, Result};
use crate::matcore::{
    eig_hermitian, eig_hermitian_unchecked, hermitian_part, trace, CMatrix, HermitianSpectrum,
};
use crate::random::{ginibre_state, pure_state, substream, SeededRng};

/// Principal-angle tolerance for deciding two supports coincide.
pub const SUPPORT_TOL: f64 = 1e-8;

/// Weights used to pull random states towards the boundary of the cone.
pub const BOUNDARY_WEIGHTS: [f64; 3] = [1e-2, 1e-4, 1e-6];

/// Input pairs closer than this are skipped by [`estimate_contraction`].
pub const PAIR_SKIP: f64 = 1e-8;

const ZERO_NORM: f64 = 1e-14;

/// Nonnegative extended real.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ProjectiveDistance {
    Finite(f64),
    Infinite,
}

impl ProjectiveDistance {
    pub fn is_finite(self) -> bool {
        matches!(self, ProjectiveDistance::Finite(_))
    }

    pub fn value(self) -> Option<f64> {
        match self {
            ProjectiveDistance::Finite(v) => Some(v),
            ProjectiveDistance::Infinite => None,
        }
    }

    /// `f64::INFINITY` for the infinite branch.
    pub fn as_f64(self) -> f64 {
        self.value().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for ProjectiveDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjectiveDistance::Finite(v) => write!(f, "{v}"),
            ProjectiveDistance::Infinite => f.write_str("inf"),
        }
    }
}

fn canonical_order(a: &CMatrix, b: &CMatrix) -> Ordering {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

fn psd_spectrum(a: &CMatrix, rank_tol: f64) -> Result<HermitianSpectrum> {
    if a.norm() <= ZERO_NORM {
        return Err(Error::ZeroMatrix);
    }
    let spec = eig_hermitian(a)?;
    if spec.min() < -rank_tol * spec.max().abs().max(1.0) {
        return Err(Error::NotPsd {
            min_eigenvalue: spec.min(),
        });
    }
    Ok(spec)
}

/// Columns of the eigenbasis spanning the support.
fn support(spec: &HermitianSpectrum, rank_tol: f64) -> CMatrix {
    let cut = rank_tol * spec.max();
    let keep: Vec<usize> = (0..spec.eigenvalues.len())
        .filter(|&k| spec.eigenvalues[k] > cut)
        .collect();
    spec.eigenvectors.select_columns(&keep)
}

/// Hilbert projective distance between two nonzero PSD matrices.
///
/// Symmetric bit-for-bit. Computed as `ln λ_max(B⁻¹A) + ln λ_max(A⁻¹B)`
/// on the common support.
pub fn hilbert_distance(a: &CMatrix, b: &CMatrix, rank_tol: f64) -> Result<ProjectiveDistance> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            expected: a.shape(),
            got: b.shape(),
        });
    }
    let spec_a = psd_spectrum(a, rank_tol)?;
    let spec_b = psd_spectrum(b, rank_tol)?;
    let basis_a = support(&spec_a, rank_tol);
    let basis_b = support(&spec_b, rank_tol);
    let d = a.nrows();
    let r = basis_b.ncols();

    if basis_a.ncols() != r {
        return Ok(ProjectiveDistance::Infinite);
    }
    if r < d {
        let gap = &basis_a * basis_a.adjoint() - &basis_b * basis_b.adjoint();
        let angle = eig_hermitian_unchecked(&hermitian_part(&gap))
            .eigenvalues
            .iter()
            .fold(0.0f64, |acc, x| acc.max(x.abs()));
        if angle > SUPPORT_TOL {
            return Ok(ProjectiveDistance::Infinite);
        }
    }

    let (a, b) = if r < d {
        let basis = match canonical_order(a, b) {
            Ordering::Greater => &basis_a,
            _ => &basis_b,
        };
        (basis.adjoint() * a * basis, basis.adjoint() * b * basis)
    } else {
        (a.clone(), b.clone())
    };
    // hi(B⁻¹A)·hi(A⁻¹B) = hi/lo, and largest eigenvalues keep full relative
    // accuracy where the smallest one would not
    let up = top_pencil_eigenvalue(&a, &b);
    let down = top_pencil_eigenvalue(&b, &a);
    if !(up > 0.0 && down > 0.0 && up.is_finite() && down.is_finite()) {
        return Ok(ProjectiveDistance::Infinite);
    }
    Ok(ProjectiveDistance::Finite((up.ln() + down.ln()).max(0.0)))
}

/// `λ_max(W^{-1/2} X W^{-1/2})` for trace-normalized `X` and `W`, with `W`
/// positive definite.
fn top_pencil_eigenvalue(x: &CMatrix, w: &CMatrix) -> f64 {
    let spec = eig_hermitian_unchecked(&(w / trace(w)));
    let x = x / trace(x);
    let v = &spec.eigenvectors;
    let rotated = v.adjoint() * x * v;
    let r = rotated.nrows();
    let whitened = CMatrix::from_fn(r, r, |i, j| {
        rotated[(i, j)] / Complex64::new((spec.eigenvalues[i] * spec.eigenvalues[j]).sqrt(), 0.0)
    });
    eig_hermitian_unchecked(&hermitian_part(&whitened)).max()
}

fn boundary_state(d: usize, weight: f64, rng: &mut SeededRng) -> CMatrix {
    let edge = pure_state(d, rng);
    let bulk = ginibre_state(d, rng);
    edge * Complex64::new(1.0 - weight, 0.0) + bulk * Complex64::new(weight, 0.0)
}

/// Interior Ginibre state or a boundary mixture, chosen uniformly.
fn sample_state(d: usize, rng: &mut SeededRng) -> CMatrix {
    use rand::Rng;
    match rng.random_range(0..=BOUNDARY_WEIGHTS.len()) {
        0 => ginibre_state(d, rng),
        k => boundary_state(d, BOUNDARY_WEIGHTS[k - 1], rng),
    }
}

fn image_distance(phi: &ChoiOperator, x: &CMatrix, y: &CMatrix) -> Result<f64> {
    let fx = hermitian_part(&phi.apply(x)?);
    let fy = hermitian_part(&phi.apply(y)?);
    match hilbert_distance(&fx, &fy, crate::matcore::DEFAULT_RANK_TOL)? {
        ProjectiveDistance::Finite(v) => Ok(v),
        ProjectiveDistance::Infinite => Err(Error::InfiniteDistance),
    }
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    Ok(())
}

/// Sampled lower bound of the projective diameter `Δ(Φ)`.
///
/// Pair `k` is drawn from sub-stream `k` of `seed`, so the result does not
/// depend on evaluation order.
pub fn estimate_diameter(phi: &ChoiOperator, samples: usize, seed: u64) -> Result<f64> {
    check_samples(samples)?;
    let n = phi.dim_in();
    let mut best = 0.0f64;
    for k in 0..samples {
        let mut rng = substream(seed, k as u64);
        let x = sample_state(n, &mut rng);
        let y = sample_state(n, &mut rng);
        best = best.max(image_distance(phi, &x, &y)?);
    }
    Ok(best)
}

/// Sampled lower bound of the Birkhoff contraction ratio `δ(Φ)`.
///
/// Half of the pairs are independent draws, half are a state and a small
/// perturbation of it, since the ratio is largest for nearby inputs.
pub fn estimate_contraction(phi: &ChoiOperator, samples: usize, seed: u64) -> Result<f64> {
    check_samples(samples)?;
    let n = phi.dim_in();
    let mut best = 0.0f64;
    for k in 0..samples {
        let mut rng = substream(seed, k as u64);
        let x = sample_state(n, &mut rng);
        let y = if k % 2 == 0 {
            sample_state(n, &mut rng)
        } else {
            let t = 10f64.powi(-1 - (k as i32 / 2) % 4);
            &x * Complex64::new(1.0 - t, 0.0) + ginibre_state(n, &mut rng) * Complex64::new(t, 0.0)
        };
        let d_in = hilbert_distance(&x, &y, crate::matcore::DEFAULT_RANK_TOL)?;
        let d_in = match d_in {
            ProjectiveDistance::Finite(v) if v >= PAIR_SKIP => v,
            _ => continue,
        };
        best = best.max(image_distance(phi, &x, &y)? / d_in);
    }
    Ok(best)
}

/// `tanh(Δ/4)`, the contraction ratio implied by a diameter.
pub fn birkhoff_ratio(diameter: f64) -> f64 {
    (0.25 * diameter).tanh()
}

/// Sampled contraction ratio next to `tanh(Δ̂/4)` for the sampled diameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionDiagnostic {
    pub sampled_ratio: f64,
    pub diameter_lower_bound: f64,
    pub birkhoff_ratio: f64,
}

pub fn contraction_diagnostic(
    phi: &ChoiOperator,
    samples: usize,
    seed: u64,
) -> Result<ContractionDiagnostic> {
    let sampled_ratio = estimate_contraction(phi, samples, seed)?;
    let diameter_lower_bound = estimate_diameter(phi, samples, seed.wrapping_add(1))?;
    Ok(ContractionDiagnostic {
        sampled_ratio,
        diameter_lower_bound,
        birkhoff_ratio: birkhoff_ratio(diameter_lower_bound),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{identity, matrix_unit, DEFAULT_RANK_TOL};
    use crate::states::{random_full_rank_state, DensityMatrix};

    fn diag(values: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            values.len(),
            values.iter().map(|&x| Complex64::new(x, 0.0)),
        ))
    }

    fn dist(a: &CMatrix, b: &CMatrix) -> ProjectiveDistance {
        hilbert_distance(a, b, DEFAULT_RANK_TOL).unwrap()
    }

    #[test]
    fn self_and_scaled_distance_vanish() {
        let a = ginibre_state(3, &mut crate::random::rng(1));
        assert!(dist(&a, &a).as_f64() < 1e-14);
        assert!(dist(&a, &(&a * Complex64::new(7.5, 0.0))).as_f64() < 1e-13);
    }

    #[test]
    fn diagonal_distance() {
        let d = dist(&diag(&[2.0, 1.0]), &identity(2)).as_f64();
        assert!((d - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn disjoint_supports_are_infinite() {
        assert_eq!(
            dist(&matrix_unit(2, 0, 0), &matrix_unit(2, 1, 1)),
            ProjectiveDistance::Infinite
        );
        assert_eq!(
            dist(&matrix_unit(2, 0, 0), &identity(2)),
            ProjectiveDistance::Infinite
        );
    }

    #[test]
    fn common_singular_support_is_finite() {
        let a = diag(&[3.0, 1.0, 0.0]);
        let b = diag(&[1.0, 1.0, 0.0]);
        assert!((dist(&a, &b).as_f64() - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_arguments() {
        let z = CMatrix::zeros(2, 2);
        assert!(matches!(
            hilbert_distance(&z, &identity(2), DEFAULT_RANK_TOL),
            Err(Error::ZeroMatrix)
        ));
        assert!(matches!(
            hilbert_distance(&diag(&[1.0, -1.0]), &identity(2), DEFAULT_RANK_TOL),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn constant_maps_have_zero_diameter() {
        let psi = ChoiOperator::trace_map(2, 3);
        assert!(estimate_diameter(&psi, 20, 1).unwrap() < 1e-14);
        assert!(estimate_contraction(&psi, 20, 1).unwrap() < 1e-6);
        let mixed = ChoiOperator::from_state(&DensityMatrix::maximally_mixed(2, 2));
        assert!(estimate_diameter(&mixed, 20, 1).unwrap() < 1e-14);
    }

    #[test]
    fn identity_map_is_an_isometry() {
        let id = ChoiOperator::identity_map(3);
        let r = estimate_contraction(&id, 40, 2).unwrap();
        assert!((r - 1.0).abs() < 1e-9, "ratio {r}");
    }

    #[test]
    fn full_rank_state_contracts() {
        let phi = ChoiOperator::from_state(&random_full_rank_state(2, 2, 3).unwrap());
        let diag = contraction_diagnostic(&phi, 200, 3).unwrap();
        assert!(diag.diameter_lower_bound > 0.0 && diag.diameter_lower_bound.is_finite());
        assert!(diag.sampled_ratio < 1.0);
        assert!(diag.birkhoff_ratio < 1.0);
    }

    #[test]
    fn estimators_need_two_samples() {
        let phi = ChoiOperator::trace_map(2, 2);
        assert!(estimate_diameter(&phi, 1, 0).is_err());
        assert!(estimate_contraction(&phi, 1, 0).is_err());
    }
}
