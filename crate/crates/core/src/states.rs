//! Bipartite density matrices.
//!
//! A state on `M_n ⊗ M_m` is stored as an `nm × nm` matrix whose row and
//! column index `(i, k)` (first factor `i < n`, second factor `k < m`) maps
//! to `i·m + k`. This is the ordering produced by [`kron`] and the one the
//! Choi matrix `Σ E_ij ⊗ Φ(E_ij)` uses, so block `(i, j)` of a state is the
//! `m × m` matrix `ρ[(i, ·), (j, ·)]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{
    check_finite, eig_hermitian_unchecked, hermitian_defect, hermitian_part, kron, trace, CMatrix,
};
use crate::random::{ginibre_state, probability_vector, substream};

/// Eigenvalue threshold separating PPT from NPT states.
pub const PPT_TOL: f64 = 1e-10;

const RESAMPLE_ATTEMPTS: usize = 10;
const FULL_RANK_FLOOR: f64 = 1e-12;

/// Acceptance thresholds used when constructing a [`DensityMatrix`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Validation {
    /// Relative anti-Hermitian defect in the ∞-norm.
    pub hermitian: f64,
    /// Absolute deviation of the trace from one.
    pub trace: f64,
    /// Most negative eigenvalue tolerated.
    pub psd: f64,
}

impl Validation {
    pub const INTERNAL: Validation = Validation {
        hermitian: 1e-10,
        trace: 1e-10,
        psd: 1e-10,
    };

    /// Looser thresholds for states read from files with truncated decimals.
    pub const FILE: Validation = Validation {
        hermitian: 1e-8,
        trace: 1e-8,
        psd: 1e-8,
    };
}

/// Hermitian, PSD, trace-one matrix on `M_n ⊗ M_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
    dim_a: usize,
    dim_b: usize,
}

impl DensityMatrix {
    pub fn new(mat: CMatrix, dim_a: usize, dim_b: usize) -> Result<Self> {
        Self::with_validation(mat, dim_a, dim_b, Validation::INTERNAL)
    }

    /// Validates `mat` against `limits`, then stores its Hermitian part
    /// rescaled to unit trace (the rescale is skipped when the trace is
    /// already one to round-off, so stored values survive a file round trip).
    pub fn with_validation(
        mat: CMatrix,
        dim_a: usize,
        dim_b: usize,
        limits: Validation,
    ) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::InvalidDimensions(format!(
                "factor dimensions must be positive, got ({dim_a}, {dim_b})"
            )));
        }
        let d = dim_a * dim_b;
        if mat.shape() != (d, d) {
            return Err(Error::InvalidDimensions(format!(
                "dims ({dim_a}, {dim_b}) need a {d}x{d} matrix, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        check_finite(&mat)?;
        let defect = hermitian_defect(&mat);
        if defect > limits.hermitian {
            return Err(Error::NotHermitian { defect });
        }
        let tr = trace(&mat);
        if (tr.re - 1.0).abs() > limits.trace || tr.im.abs() > limits.trace {
            return Err(Error::InvalidTrace { trace: tr.re });
        }
        let herm = hermitian_part(&mat);
        let min_eigenvalue = eig_hermitian_unchecked(&herm).min();
        if min_eigenvalue < -limits.psd {
            return Err(Error::NotPsd { min_eigenvalue });
        }
        let scale = trace(&herm).re;
        let mat = if (scale - 1.0).abs() > 1e-14 {
            herm / Complex64::new(scale, 0.0)
        } else {
            herm
        };
        Ok(Self { mat, dim_a, dim_b })
    }

    /// `I/(nm)`.
    pub fn maximally_mixed(dim_a: usize, dim_b: usize) -> Self {
        let d = dim_a * dim_b;
        Self {
            mat: CMatrix::identity(d, d) / Complex64::new(d as f64, 0.0),
            dim_a,
            dim_b,
        }
    }

    /// `|Ω⟩⟨Ω|` with `|Ω⟩ = Σ_i |ii⟩ / √d`.
    pub fn maximally_entangled(d: usize) -> Self {
        let mut mat = CMatrix::zeros(d * d, d * d);
        let w = Complex64::new(1.0 / d as f64, 0.0);
        for i in 0..d {
            for j in 0..d {
                mat[(i * d + i, j * d + j)] = w;
            }
        }
        Self {
            mat,
            dim_a: d,
            dim_b: d,
        }
    }

    /// `ρ₁ ⊗ ρ₂` for single-system states.
    pub fn product(rho1: &CMatrix, rho2: &CMatrix) -> Result<Self> {
        Self::new(kron(rho1, rho2), rho1.nrows(), rho2.nrows())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn min_eigenvalue(&self) -> f64 {
        eig_hermitian_unchecked(&self.mat).min()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eig_hermitian_unchecked(&self.mat).eigenvalues
    }

    /// `(U⊗V) ρ (U⊗V)*`.
    pub fn conjugate_local(&self, u: &CMatrix, v: &CMatrix) -> Result<Self> {
        let w = kron(u, v);
        Self::new(&w * &self.mat * w.adjoint(), self.dim_a, self.dim_b)
    }

    /// `max(‖Tr₁ρ − I_m/m‖_F, ‖Tr₂ρ − I_n/n‖_F)`.
    pub fn marginal_residual(&self) -> f64 {
        let (n, m) = self.dims();
        let r1 = (partial_trace_first(self) - uniform(m)).norm();
        let r2 = (partial_trace_second(self) - uniform(n)).norm();
        r1.max(r2)
    }
}

fn uniform(d: usize) -> CMatrix {
    CMatrix::identity(d, d) / Complex64::new(d as f64, 0.0)
}

/// Marginal on the second factor: `(Tr₁ρ)[k,l] = Σ_i ρ[(i,k),(i,l)]`.
pub fn partial_trace_first(rho: &DensityMatrix) -> CMatrix {
    let (n, m) = rho.dims();
    let a = rho.matrix();
    CMatrix::from_fn(m, m, |k, l| (0..n).map(|i| a[(i * m + k, i * m + l)]).sum())
}

/// Marginal on the first factor: `(Tr₂ρ)[i,j] = Σ_k ρ[(i,k),(j,k)]`.
pub fn partial_trace_second(rho: &DensityMatrix) -> CMatrix {
    let (n, m) = rho.dims();
    let a = rho.matrix();
    CMatrix::from_fn(n, n, |i, j| (0..m).map(|k| a[(i * m + k, j * m + k)]).sum())
}

/// Transpose on the second factor of an `nm × nm` matrix:
/// `out[(i,k),(j,l)] = a[(i,l),(j,k)]`.
pub fn partial_transpose_second(a: &CMatrix, n: usize, m: usize) -> CMatrix {
    assert_eq!(a.shape(), (n * m, n * m), "partial transpose shape");
    CMatrix::from_fn(n * m, n * m, |r, c| {
        let (i, k) = (r / m, r % m);
        let (j, l) = (c / m, c % m);
        a[(i * m + l, j * m + k)]
    })
}

/// True iff both marginals are maximally mixed within `tol` (Frobenius).
pub fn is_precopula(rho: &DensityMatrix, tol: f64) -> bool {
    rho.marginal_residual() <= tol
}

/// Full-rank state `G G* / Tr(G G*)` from a standard complex Ginibre `G`.
///
/// Rank-deficient draws are redrawn from fresh sub-streams of `seed`.
pub fn random_full_rank_state(n: usize, m: usize, seed: u64) -> Result<DensityMatrix> {
    check_dims(n, m)?;
    for attempt in 0..RESAMPLE_ATTEMPTS {
        let mut rng = substream(seed, attempt as u64);
        let rho = DensityMatrix::new(ginibre_state(n * m, &mut rng), n, m)?;
        if rho.min_eigenvalue() > FULL_RANK_FLOOR {
            return Ok(rho);
        }
    }
    Err(Error::DegenerateSample {
        attempts: RESAMPLE_ATTEMPTS,
    })
}

/// `Σ p_i ρ¹_i ⊗ ρ²_i` with `terms` random full-rank factors.
///
/// With `terms ≥ nm` the result is full rank almost surely and that is
/// checked; fewer terms give a (possibly rank-deficient) separable state.
pub fn random_separable_state(
    n: usize,
    m: usize,
    terms: usize,
    seed: u64,
) -> Result<DensityMatrix> {
    check_dims(n, m)?;
    if terms == 0 {
        return Err(Error::InvalidArgument("terms must be at least 1".into()));
    }
    let require_full_rank = terms >= n * m;
    for attempt in 0..RESAMPLE_ATTEMPTS {
        let mut rng = substream(seed, attempt as u64);
        let weights = probability_vector(terms, &mut rng);
        let mut acc = CMatrix::zeros(n * m, n * m);
        for p in weights {
            let r1 = ginibre_state(n, &mut rng);
            let r2 = ginibre_state(m, &mut rng);
            acc += kron(&r1, &r2) * Complex64::new(p, 0.0);
        }
        let rho = DensityMatrix::new(acc, n, m)?;
        if !require_full_rank || rho.min_eigenvalue() > FULL_RANK_FLOOR {
            return Ok(rho);
        }
    }
    Err(Error::DegenerateSample {
        attempts: RESAMPLE_ATTEMPTS,
    })
}

fn check_dims(n: usize, m: usize) -> Result<()> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidDimensions(format!(
            "factor dimensions must be positive, got ({n}, {m})"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Separability {
    Separable,
    Entangled,
    Inconclusive,
}

/// Outcome of the positive-partial-transpose test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityVerdict {
    pub tag: Separability,
    pub min_pt_eigenvalue: f64,
}

/// Peres–Horodecki test; exact for `2⊗2`, `2⊗3` and `3⊗2`.
pub fn ppt_verdict(rho: &DensityMatrix) -> SeparabilityVerdict {
    let (n, m) = rho.dims();
    let pt = partial_transpose_second(rho.matrix(), n, m);
    let min_pt_eigenvalue = eig_hermitian_unchecked(&hermitian_part(&pt)).min();
    let exact = matches!((n, m), (2, 2) | (2, 3) | (3, 2)) || n == 1 || m == 1;
    let tag = if min_pt_eigenvalue < -PPT_TOL {
        Separability::Entangled
    } else if exact {
        Separability::Separable
    } else {
        Separability::Inconclusive
    };
    SeparabilityVerdict {
        tag,
        min_pt_eigenvalue,
    }
}
