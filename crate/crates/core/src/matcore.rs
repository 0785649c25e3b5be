//! Dense complex-matrix kernel.
//!
//! Every other module works with [`CMatrix`], a heap-allocated column-major
//! `nalgebra` matrix of `Complex64`. This module adds the handful of
//! Hermitian primitives the copula pipeline needs on top of it: a sorted,
//! phase-fixed eigendecomposition, square-root and Cholesky factors, the
//! support pseudo-inverse, the Kronecker product, and the Hilbert–Schmidt
//! inner product `<X, Y> = Tr(X* Y)`.
//!
//! Tolerances are relative to the largest magnitude in the input unless a
//! function says otherwise.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix.
pub type CMatrix = DMatrix<Complex64>;

/// Dense real matrix.
pub type RMatrix = DMatrix<f64>;

/// Default relative cut-off separating kernel directions from round-off.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Relative anti-Hermitian defect accepted by [`eig_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Relative threshold below which [`cholesky_like_factor`] rejects a matrix.
pub const PD_TOL: f64 = 1e-12;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Eigendecomposition of a Hermitian matrix.
///
/// `eigenvalues` are ascending; column `k` of `eigenvectors` belongs to
/// `eigenvalues[k]` and has its first non-negligible component real and
/// positive.
#[derive(Debug, Clone)]
pub struct HermitianSpectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl HermitianSpectrum {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("spectrum is never empty")
    }

    /// `V f(diag(λ)) V*`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let v = &self.eigenvectors;
        let n = v.nrows();
        let mut scaled = v.clone();
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let s = f(lam);
            for i in 0..n {
                scaled[(i, k)] *= s;
            }
        }
        hermitian_part(&(scaled * v.adjoint()))
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(|x| x)
    }
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn check_finite(a: &CMatrix) -> Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub fn check_square(a: &CMatrix) -> Result<usize> {
    if a.nrows() == a.ncols() {
        Ok(a.nrows())
    } else {
        Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        })
    }
}

pub fn check_shape(a: &CMatrix, rows: usize, cols: usize) -> Result<()> {
    if a.shape() == (rows, cols) {
        Ok(())
    } else {
        Err(Error::ShapeMismatch {
            expected: (rows, cols),
            got: a.shape(),
        })
    }
}

/// Maximum absolute row sum.
pub fn norm_inf(a: &CMatrix) -> f64 {
    a.row_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `‖a − a*‖∞ / ‖a‖∞`, or the absolute defect when `a` is zero.
pub fn hermitian_defect(a: &CMatrix) -> f64 {
    let defect = norm_inf(&(a - a.adjoint()));
    let scale = norm_inf(a);
    if scale > 0.0 {
        defect / scale
    } else {
        defect
    }
}

pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

pub fn trace(a: &CMatrix) -> Complex64 {
    a.diagonal().iter().sum()
}

/// Entrywise complex conjugate.
pub fn conj(a: &CMatrix) -> CMatrix {
    a.map(|z| z.conj())
}

fn check_hermitian(a: &CMatrix, tol: f64) -> Result<()> {
    check_square(a)?;
    check_finite(a)?;
    let defect = hermitian_defect(a);
    if defect > tol {
        return Err(Error::NotHermitian { defect });
    }
    Ok(())
}

/// Ascending eigendecomposition of a Hermitian matrix.
pub fn eig_hermitian(a: &CMatrix) -> Result<HermitianSpectrum> {
    check_hermitian(a, HERMITIAN_TOL)?;
    Ok(eig_hermitian_unchecked(&hermitian_part(a)))
}

pub(crate) fn eig_hermitian_unchecked(a: &CMatrix) -> HermitianSpectrum {
    let n = a.nrows();
    let eig = a.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let pivot = col
            .iter()
            .copied()
            .find(|z| z.norm() > 1e-12)
            .unwrap_or(ONE);
        let phase = pivot.conj() / pivot.norm();
        for i in 0..n {
            eigenvectors[(i, dst)] = col[i] * phase;
        }
    }
    HermitianSpectrum {
        eigenvalues,
        eigenvectors,
    }
}

fn check_positive_definite(spec: &HermitianSpectrum) -> Result<()> {
    let (lo, hi) = (spec.min(), spec.max());
    if hi <= 0.0 || lo <= PD_TOL * hi {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: lo,
            max_eigenvalue: hi,
        });
    }
    Ok(())
}

/// Factor `ψ` with `ψ* ψ = a`, using the Hermitian square root.
pub fn cholesky_like_factor(a: &CMatrix) -> Result<CMatrix> {
    let spec = eig_hermitian(a)?;
    check_positive_definite(&spec)?;
    Ok(spec.map(f64::sqrt))
}

/// Upper-triangular factor `R` with `R* R = a` (the adjoint of the Cholesky factor).
pub fn cholesky_factor(a: &CMatrix) -> Result<CMatrix> {
    let spec = eig_hermitian(a)?;
    check_positive_definite(&spec)?;
    let chol = hermitian_part(a)
        .cholesky()
        .ok_or(Error::NotPositiveDefinite {
            min_eigenvalue: spec.min(),
            max_eigenvalue: spec.max(),
        })?;
    Ok(chol.l().adjoint())
}

/// Moore–Penrose pseudo-inverse of a Hermitian PSD matrix.
///
/// Eigenvalues `≤ rank_tol · λ_max` are treated as kernel.
pub fn inv_psd(a: &CMatrix, rank_tol: f64) -> Result<CMatrix> {
    let spec = eig_hermitian(a)?;
    let cut = rank_tol * spec.max().max(0.0);
    Ok(spec.map(|x| if x > cut { 1.0 / x } else { 0.0 }))
}

/// `a^{-1/2}` for positive definite `a`.
pub fn inv_sqrt_pd(a: &CMatrix) -> Result<CMatrix> {
    let spec = eig_hermitian(a)?;
    check_positive_definite(&spec)?;
    Ok(spec.map(|x| 1.0 / x.sqrt()))
}

/// Kronecker product with `(A⊗B)[(i·p+k),(j·q+l)] = A[i,j]·B[k,l]`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Hilbert–Schmidt inner product `Tr(x* y)`.
pub fn frobenius_inner(x: &CMatrix, y: &CMatrix) -> Result<Complex64> {
    check_shape(y, x.nrows(), x.ncols())?;
    Ok(x.iter().zip(y.iter()).map(|(a, b)| a.conj() * b).sum())
}

/// 2-norm condition number via singular values (`∞` for singular input).
pub fn condition_number(a: &CMatrix) -> f64 {
    let sv = a.clone().singular_values();
    let hi = sv.iter().copied().fold(0.0, f64::max);
    let lo = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if lo > 0.0 {
        hi / lo
    } else {
        f64::INFINITY
    }
}

/// Relative Frobenius distance `‖a − b‖_F / max(‖b‖_F, tiny)`.
pub fn rel_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    let scale = b.norm().max(f64::MIN_POSITIVE);
    (a - b).norm() / scale
}

/// Matrix unit `E_ij` of size `n×n`.
pub fn matrix_unit(n: usize, i: usize, j: usize) -> CMatrix {
    let mut e = CMatrix::zeros(n, n);
    e[(i, j)] = ONE;
    e
}
