//! Property suites run over seeded random states.
//!
//! Case `k` uses seed `seed + k`; cases run on a rayon pool and are reported
//! in index order.

use std::collections::BTreeMap;
use std::str::FromStr;

use qcopula::choi::ChoiOperator;
use qcopula::matcore::inv_psd;
use qcopula::pmetric::{hilbert_distance, ProjectiveDistance};
use qcopula::random::{ginibre_state, pure_state, substream};
use qcopula::states::{ppt_verdict, random_full_rank_state, random_separable_state};
use qcopula::{copula_of, fixed_point_iterate, Complex64, SolverConfig};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::CliError;

pub const SUITES: [&str; 5] = [
    "preserve-separability",
    "uniqueness",
    "convergence",
    "lambda",
    "metric-axioms",
];

/// Iteration cap used by the `convergence` suite.
pub const CONVERGENCE_CAP: usize = 200;
pub const LAMBDA_TOL: f64 = 1e-8;
pub const RAY_TOL: f64 = 1e-8;
const STARTS: u64 = 5;
const HISTOGRAM_WIDTH: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    PreserveSeparability,
    Uniqueness,
    Convergence,
    Lambda,
    MetricAxioms,
}

impl FromStr for Suite {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Ok(match s {
            "preserve-separability" => Suite::PreserveSeparability,
            "uniqueness" => Suite::Uniqueness,
            "convergence" => Suite::Convergence,
            "lambda" => Suite::Lambda,
            "metric-axioms" => Suite::MetricAxioms,
            _ => return Err(()),
        })
    }
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::PreserveSeparability => SUITES[0],
            Suite::Uniqueness => SUITES[1],
            Suite::Convergence => SUITES[2],
            Suite::Lambda => SUITES[3],
            Suite::MetricAxioms => SUITES[4],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseResult {
    pub index: usize,
    pub seed: u64,
    pub pass: bool,
    /// The quantity checked against the suite tolerance.
    pub residual: Option<f64>,
    pub iterations: Option<usize>,
    pub detail: Option<String>,
}

impl CaseResult {
    fn failed(index: usize, seed: u64, err: impl ToString) -> Self {
        Self {
            index,
            seed,
            pass: false,
            residual: None,
            iterations: None,
            detail: Some(err.to_string()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HistogramBin {
    pub from: usize,
    pub to: usize,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteSummary {
    pub suite: &'static str,
    pub seed: u64,
    pub count: usize,
    pub dims: [usize; 2],
    pub passed: usize,
    pub failed: usize,
    pub max_residual: Option<f64>,
    pub max_iterations: Option<usize>,
    pub median_iterations: Option<usize>,
    pub histogram: Option<Vec<HistogramBin>>,
    pub config: SolverConfig,
    pub cases: Vec<CaseResult>,
}

impl SuiteSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

/// Threads for experiments: `QCOPULA_THREADS`, where unset or 0 means automatic.
pub fn thread_count() -> Result<usize, CliError> {
    match std::env::var("QCOPULA_THREADS") {
        Err(_) => Ok(0),
        Ok(v) => v.trim().parse().map_err(|_| {
            CliError::Core(qcopula::Error::InvalidArgument(format!(
                "QCOPULA_THREADS must be a non-negative integer, got '{v}'"
            )))
        }),
    }
}

pub fn run_suite(
    suite: Suite,
    seed: u64,
    count: usize,
    dims: (usize, usize),
    cfg: &SolverConfig,
) -> Result<SuiteSummary, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count()?)
        .build()
        .map_err(|e| CliError::Core(qcopula::Error::InvalidArgument(e.to_string())))?;
    let cases: Vec<CaseResult> = pool.install(|| {
        (0..count)
            .into_par_iter()
            .map(|index| {
                let case_seed = seed.wrapping_add(index as u64);
                run_case(suite, index, case_seed, dims, cfg)
            })
            .collect()
    });

    let passed = cases.iter().filter(|c| c.pass).count();
    let max_residual = cases.iter().filter_map(|c| c.residual).reduce(f64::max);
    let mut iterations: Vec<usize> = cases.iter().filter_map(|c| c.iterations).collect();
    iterations.sort_unstable();
    let histogram = (suite == Suite::Convergence).then(|| histogram(&iterations));
    Ok(SuiteSummary {
        suite: suite.name(),
        seed,
        count,
        dims: [dims.0, dims.1],
        passed,
        failed: cases.len() - passed,
        max_residual,
        max_iterations: iterations.last().copied(),
        median_iterations: iterations.get(iterations.len() / 2).copied(),
        histogram,
        config: *cfg,
        cases,
    })
}

fn histogram(sorted: &[usize]) -> Vec<HistogramBin> {
    let mut bins = BTreeMap::new();
    for &it in sorted {
        *bins.entry(it / HISTOGRAM_WIDTH).or_insert(0) += 1;
    }
    bins.into_iter()
        .map(|(b, count)| HistogramBin {
            from: b * HISTOGRAM_WIDTH,
            to: (b + 1) * HISTOGRAM_WIDTH - 1,
            count,
        })
        .collect()
}

fn run_case(
    suite: Suite,
    index: usize,
    seed: u64,
    dims: (usize, usize),
    cfg: &SolverConfig,
) -> CaseResult {
    let outcome = match suite {
        Suite::PreserveSeparability => preserve_separability(index, seed, dims, cfg),
        Suite::Uniqueness => uniqueness(index, seed, dims, cfg),
        Suite::Convergence => convergence(index, seed, dims, cfg),
        Suite::Lambda => lambda(index, seed, dims, cfg),
        Suite::MetricAxioms => metric_axioms(index, seed, dims),
    };
    outcome.unwrap_or_else(|e| CaseResult::failed(index, seed, e))
}

type CaseOutcome = Result<CaseResult, qcopula::Error>;

fn preserve_separability(
    index: usize,
    seed: u64,
    (n, m): (usize, usize),
    cfg: &SolverConfig,
) -> CaseOutcome {
    // even cases are constructed separable, odd cases are generic random states
    let rho = if index % 2 == 0 {
        random_separable_state(n, m, 2 * n * m, seed)?
    } else {
        random_full_rank_state(n, m, seed)?
    };
    let out = copula_of(&rho, cfg)?;
    let (before, after) = (ppt_verdict(&rho).tag, ppt_verdict(&out.chi).tag);
    Ok(CaseResult {
        index,
        seed,
        pass: before == after,
        residual: Some(out.marginal_residual),
        iterations: Some(out.report.iterations),
        detail: Some(format!("{before:?} -> {after:?}")),
    })
}

fn uniqueness(index: usize, seed: u64, (n, m): (usize, usize), cfg: &SolverConfig) -> CaseOutcome {
    let rho = random_full_rank_state(n, m, seed)?;
    let phi = ChoiOperator::from_state(&rho);
    let reference = fixed_point_iterate(&phi, cfg.tol, cfg.max_iter, None)?;
    let mut worst = 0.0f64;
    for start in 0..STARTS {
        let init = ginibre_state(n, &mut substream(seed, 1 + start));
        let ray = fixed_point_iterate(&phi, cfg.tol, cfg.max_iter, Some(&init))?.phi_ray;
        worst = worst.max(hilbert_distance(&reference.phi_ray, &ray, cfg.rank_tol)?.as_f64());
    }
    Ok(CaseResult {
        index,
        seed,
        pass: worst <= RAY_TOL,
        residual: Some(worst),
        iterations: Some(reference.iterations),
        detail: None,
    })
}

fn convergence(index: usize, seed: u64, (n, m): (usize, usize), cfg: &SolverConfig) -> CaseOutcome {
    let rho = random_full_rank_state(n, m, seed)?;
    let report = fixed_point_iterate(&ChoiOperator::from_state(&rho), cfg.tol, cfg.max_iter, None)?;
    Ok(CaseResult {
        index,
        seed,
        pass: report.iterations < CONVERGENCE_CAP,
        residual: Some(report.final_step),
        iterations: Some(report.iterations),
        detail: None,
    })
}

fn lambda(index: usize, seed: u64, (n, m): (usize, usize), cfg: &SolverConfig) -> CaseOutcome {
    let rho = random_full_rank_state(n, m, seed)?;
    let report = fixed_point_iterate(&ChoiOperator::from_state(&rho), cfg.tol, cfg.max_iter, None)?;
    let deviation = (report.lambda - n as f64 / m as f64).abs();
    Ok(CaseResult {
        index,
        seed,
        pass: deviation <= LAMBDA_TOL,
        residual: Some(deviation),
        iterations: Some(report.iterations),
        detail: Some(format!("lambda = {}", report.lambda)),
    })
}

fn finite(d: ProjectiveDistance) -> Result<f64, qcopula::Error> {
    d.value().ok_or(qcopula::Error::InfiniteDistance)
}

/// Symmetry, triangle inequality, scale invariance, inversion isometry and
/// the infinite branch on `nm × nm` matrices.
fn metric_axioms(index: usize, seed: u64, (n, m): (usize, usize)) -> CaseOutcome {
    let d = n * m;
    let mut rng = substream(seed, 0);
    let a = ginibre_state(d, &mut rng);
    let b = ginibre_state(d, &mut rng);
    let x = ginibre_state(d, &mut rng);
    let t: f64 = rng.random_range(1e-3..1e3);
    let tol = 1e-10;

    let dab = finite(hilbert_distance(&a, &b, tol)?)?;
    let symmetry = (dab - finite(hilbert_distance(&b, &a, tol)?)?).abs();
    let triangle =
        (dab - finite(hilbert_distance(&a, &x, tol)?)? - finite(hilbert_distance(&x, &b, tol)?)?)
            .max(0.0);
    let scaled = &a * Complex64::new(t, 0.0);
    let scale = (finite(hilbert_distance(&scaled, &b, tol)?)? - dab).abs();
    let (ai, bi) = (inv_psd(&a, 1e-12)?, inv_psd(&b, 1e-12)?);
    let inversion = (finite(hilbert_distance(&ai, &bi, tol)?)? - dab).abs();
    let infinite = d == 1
        || hilbert_distance(&pure_state(d, &mut rng), &b, tol)? == ProjectiveDistance::Infinite;

    let pass =
        symmetry <= 1e-12 && triangle <= 1e-10 && scale <= 1e-12 && inversion <= 1e-10 && infinite;
    Ok(CaseResult {
        index,
        seed,
        pass,
        residual: Some(symmetry.max(triangle).max(scale).max(inversion)),
        iterations: None,
        detail: Some(format!(
            "symmetry {symmetry:.1e}, triangle {triangle:.1e}, scale {scale:.1e}, \
             inversion {inversion:.1e}, infinite branch {infinite}"
        )),
    })
}
