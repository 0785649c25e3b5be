//! JSON documents written by the CLI.

use qcopula::copula::FixedPointReport;
use qcopula::io::{DensityMatrixJson, Fixed, FixedComplexMatrix, FixedRealMatrix, FixedVec};
use qcopula::states::{ppt_verdict, DensityMatrix, SeparabilityVerdict};
use qcopula::{CopulaResult, ScalingPair, SolverConfig};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// `sha256:<hex>` of the raw input bytes.
pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

#[derive(Debug, Serialize)]
pub struct ResultSummary {
    pub converged: bool,
    pub iterations: usize,
    pub lambda: Fixed,
    pub final_step: Fixed,
    pub marginal_residual: Option<Fixed>,
    pub regularized_with: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct Verdicts {
    pub input: SeparabilityVerdict,
    pub copula: Option<SeparabilityVerdict>,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub input_digest: String,
    pub result: ResultSummary,
    pub verdicts: Verdicts,
    /// Wall-clock time of the solve; `null` under `--no-timing`.
    pub timing_ms: Option<f64>,
    pub config: SolverConfig,
}

#[derive(Debug, Serialize)]
pub struct CopulaDocument<'a> {
    pub chi: DensityMatrixJson<'a>,
    pub psi0: FixedComplexMatrix<'a>,
    pub psi1: FixedComplexMatrix<'a>,
    pub report: RunReport,
}

impl<'a> CopulaDocument<'a> {
    pub fn new(
        rho: &DensityMatrix,
        result: &'a CopulaResult,
        cfg: &SolverConfig,
        input_digest: String,
        timing_ms: Option<f64>,
    ) -> Self {
        let fp = &result.report;
        Self {
            chi: DensityMatrixJson::new(&result.chi),
            psi0: FixedComplexMatrix(&result.scalers.psi0),
            psi1: FixedComplexMatrix(&result.scalers.psi1),
            report: RunReport {
                input_digest,
                result: ResultSummary {
                    converged: fp.converged,
                    iterations: fp.iterations,
                    lambda: Fixed(fp.lambda),
                    final_step: Fixed(fp.final_step),
                    marginal_residual: Some(Fixed(result.marginal_residual)),
                    regularized_with: result.regularized_with,
                },
                verdicts: Verdicts {
                    input: ppt_verdict(rho),
                    copula: Some(ppt_verdict(&result.chi)),
                },
                timing_ms,
                config: *cfg,
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }
}

/// Written when the fixed-point iteration stops at `max_iter`.
#[derive(Debug, Serialize)]
pub struct NotConvergedDocument {
    pub report: RunReport,
}

impl NotConvergedDocument {
    pub fn new(
        rho: &DensityMatrix,
        fp: &FixedPointReport,
        cfg: &SolverConfig,
        input_digest: String,
        timing_ms: Option<f64>,
    ) -> Self {
        Self {
            report: RunReport {
                input_digest,
                result: ResultSummary {
                    converged: false,
                    iterations: fp.iterations,
                    lambda: Fixed(fp.lambda),
                    final_step: Fixed(fp.final_step),
                    marginal_residual: None,
                    regularized_with: cfg.regularize.then_some(cfg.reg_eps),
                },
                verdicts: Verdicts {
                    input: ppt_verdict(rho),
                    copula: None,
                },
                timing_ms,
                config: *cfg,
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }
}

#[derive(Serialize)]
struct ScalingDocument<'a> {
    d1: FixedVec<'a>,
    d2: FixedVec<'a>,
    scaled: FixedRealMatrix<'a>,
    max_deviation: Fixed,
}

pub fn scaling_json(pair: &ScalingPair) -> String {
    let doc = ScalingDocument {
        d1: FixedVec(&pair.d1),
        d2: FixedVec(&pair.d2),
        scaled: FixedRealMatrix(&pair.scaled),
        max_deviation: Fixed(pair.max_deviation()),
    };
    serde_json::to_string_pretty(&doc).expect("document serializes")
}
