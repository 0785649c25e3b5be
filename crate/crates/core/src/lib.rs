//! # qcopula
//!
//! Quantum copulas of bipartite states.
//!
//! Every full-rank state `ρ` on `M_n ⊗ M_m` can be brought to a state with
//! maximally mixed marginals by an invertible local transformation
//! `ρ ↦ (A⊗B) ρ (A⊗B)*`. The pair `(A, B)` is unique up to local
//! unitaries, so the resulting precopula is unique up to `U⊗V`
//! conjugation, and the transformation preserves separability.
//!
//! The construction reads `ρ` as the Choi matrix of a strictly positive
//! map `Φ`, finds the fixed ray of `inv ∘ Φ* ∘ inv ∘ Φ` by contraction in
//! the Hilbert projective metric, and factors the resulting scalers.
//!
//! ## Modules
//!
//! - [`matcore`]: dense complex linear algebra (backed by `nalgebra`).
//! - [`states`]: density matrices, marginals, samplers, PPT test.
//! - [`choi`]: Choi operators, map application, adjoint, transforms.
//! - [`pmetric`]: Hilbert projective metric and contraction estimators.
//! - [`copula`]: the fixed-point solver and copula construction.
//! - [`sinkhorn`]: classical matrix scaling, the commutative analogue.
//! - [`io`]: JSON documents shared with the CLI and bindings.
//!
//! ```
//! use qcopula::{copula_of, random_full_rank_state, SolverConfig};
//!
//! let rho = random_full_rank_state(2, 2, 7).unwrap();
//! let out = copula_of(&rho, &SolverConfig::default()).unwrap();
//! assert!(out.marginal_residual <= 1e-10);
//! ```

#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod choi;
pub mod copula;
pub mod error;
pub mod io;
pub mod matcore;
pub mod pmetric;
pub mod random;
pub mod sinkhorn;
pub mod states;

pub use choi::{choi_from_state, ChoiOperator};
pub use copula::{
    copula_invariants, copula_of, copula_of_with, extract_scalers, extract_scalers_with,
    fixed_point_iterate, scaling_equation_residuals, verify_connection, CopulaFingerprint,
    CopulaResult, Factorization, FixedPointReport, ScalerPair, SolverConfig,
};
pub use error::{Error, Result};
pub use matcore::{CMatrix, RMatrix};
pub use num_complex::Complex64;
pub use pmetric::{hilbert_distance, ProjectiveDistance};
pub use sinkhorn::{sinkhorn_scale, verify_uniqueness, ScalingPair};
pub use states::{
    is_precopula, partial_trace_first, partial_trace_second, ppt_verdict, random_full_rank_state,
    random_separable_state, DensityMatrix, Separability, SeparabilityVerdict,
};
