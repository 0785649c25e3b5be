//! Python bindings for `qcopula`.
//!
//! Matrices cross the boundary as nested lists (rows) of Python `complex`
//! (or `float` for real matrices).

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use qcopula::matcore::{CMatrix, RMatrix};
use qcopula::states::Separability;
use qcopula::Error;

type Rows = Vec<Vec<Complex64>>;
type Scaling = (Vec<f64>, Vec<f64>, Vec<Vec<f64>>);

create_exception!(qcopula_py, QcopulaError, PyException);
create_exception!(qcopula_py, NotConvergedError, QcopulaError);

fn to_py_err(err: Error) -> PyErr {
    match err {
        Error::NotConverged { .. } | Error::SinkhornNotConverged { .. } => {
            NotConvergedError::new_err(err.to_string())
        }
        Error::NonFinite
        | Error::NotSquare { .. }
        | Error::ShapeMismatch { .. }
        | Error::NotHermitian { .. }
        | Error::NotPsd { .. }
        | Error::InvalidTrace { .. }
        | Error::InvalidDimensions(_)
        | Error::InvalidArgument(_)
        | Error::ZeroMatrix
        | Error::RankDeficient { .. }
        | Error::NonPositiveEntry { .. }
        | Error::Parse(_) => PyValueError::new_err(err.to_string()),
        _ => QcopulaError::new_err(err.to_string()),
    }
}

fn rows_shape<T>(rows: &[Vec<T>]) -> PyResult<(usize, usize)> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 || rows.iter().any(|r| r.len() != cols) {
        return Err(PyValueError::new_err(
            "expected a non-empty rectangular list of rows",
        ));
    }
    Ok((rows.len(), cols))
}

fn cmatrix(rows: Vec<Vec<Complex64>>) -> PyResult<CMatrix> {
    let (r, c) = rows_shape(&rows)?;
    Ok(CMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

fn rmatrix(rows: Vec<Vec<f64>>) -> PyResult<RMatrix> {
    let (r, c) = rows_shape(&rows)?;
    Ok(RMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

fn crows(a: &CMatrix) -> Vec<Vec<Complex64>> {
    a.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn rrows(a: &RMatrix) -> Vec<Vec<f64>> {
    a.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn tag_name(tag: Separability) -> &'static str {
    match tag {
        Separability::Separable => "separable",
        Separability::Entangled => "entangled",
        Separability::Inconclusive => "inconclusive",
    }
}

/// Bipartite density matrix on `M_n ⊗ M_m`.
#[pyclass(
    name = "DensityMatrix",
    module = "qcopula_py",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
pub struct PyDensityMatrix {
    inner: qcopula::DensityMatrix,
}

#[pymethods]
impl PyDensityMatrix {
    #[new]
    fn new(matrix: Vec<Vec<Complex64>>, dims: (usize, usize)) -> PyResult<Self> {
        let inner =
            qcopula::DensityMatrix::new(cmatrix(matrix)?, dims.0, dims.1).map_err(to_py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = qcopula::io::parse_density_matrix(text).map_err(to_py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn maximally_mixed(n: usize, m: usize) -> Self {
        Self {
            inner: qcopula::DensityMatrix::maximally_mixed(n, m),
        }
    }

    /// Hilbert–Schmidt random full-rank state.
    #[staticmethod]
    fn random(n: usize, m: usize, seed: u64) -> PyResult<Self> {
        let inner = qcopula::random_full_rank_state(n, m, seed).map_err(to_py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (n, m, seed, terms=None))]
    fn random_separable(n: usize, m: usize, seed: u64, terms: Option<usize>) -> PyResult<Self> {
        let terms = terms.unwrap_or(2 * n * m);
        let inner = qcopula::random_separable_state(n, m, terms, seed).map_err(to_py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn dims(&self) -> (usize, usize) {
        self.inner.dims()
    }

    fn matrix(&self) -> Vec<Vec<Complex64>> {
        crows(self.inner.matrix())
    }

    fn eigenvalues(&self) -> Vec<f64> {
        self.inner.eigenvalues()
    }

    fn min_eigenvalue(&self) -> f64 {
        self.inner.min_eigenvalue()
    }

    /// Largest Frobenius deviation of the marginals from maximally mixed.
    fn marginal_residual(&self) -> f64 {
        self.inner.marginal_residual()
    }

    /// `(tag, min partial-transpose eigenvalue)`.
    fn ppt_verdict(&self) -> (&'static str, f64) {
        let v = qcopula::ppt_verdict(&self.inner);
        (tag_name(v.tag), v.min_pt_eigenvalue)
    }

    fn to_json(&self) -> String {
        qcopula::io::density_matrix_to_json(&self.inner)
    }

    fn __repr__(&self) -> String {
        let (n, m) = self.inner.dims();
        format!("DensityMatrix(dims=({n}, {m}))")
    }
}

#[pyclass(name = "SolverConfig", module = "qcopula_py", skip_from_py_object)]
#[derive(Clone)]
pub struct PySolverConfig {
    #[pyo3(get, set)]
    tol: f64,
    #[pyo3(get, set)]
    marginal_tol: f64,
    #[pyo3(get, set)]
    max_iter: usize,
    #[pyo3(get, set)]
    rank_tol: f64,
    #[pyo3(get, set)]
    regularize: bool,
    #[pyo3(get, set)]
    reg_eps: f64,
}

impl From<qcopula::SolverConfig> for PySolverConfig {
    fn from(c: qcopula::SolverConfig) -> Self {
        Self {
            tol: c.tol,
            marginal_tol: c.marginal_tol,
            max_iter: c.max_iter,
            rank_tol: c.rank_tol,
            regularize: c.regularize,
            reg_eps: c.reg_eps,
        }
    }
}

impl PySolverConfig {
    fn to_core(&self) -> qcopula::SolverConfig {
        qcopula::SolverConfig {
            tol: self.tol,
            marginal_tol: self.marginal_tol,
            max_iter: self.max_iter,
            rank_tol: self.rank_tol,
            regularize: self.regularize,
            reg_eps: self.reg_eps,
        }
    }
}

#[pymethods]
impl PySolverConfig {
    #[new]
    #[pyo3(signature = (**kwargs))]
    fn new(kwargs: Option<&Bound<'_, pyo3::types::PyDict>>) -> PyResult<Self> {
        let mut cfg = Self::from(qcopula::SolverConfig::default());
        if let Some(kwargs) = kwargs {
            let json = kwargs
                .py()
                .import("json")?
                .call_method1("dumps", (kwargs,))?
                .extract::<String>()?;
            let parsed: qcopula::SolverConfig = serde_json::from_str(&json)
                .map_err(|e| PyValueError::new_err(format!("invalid solver config: {e}")))?;
            cfg = parsed.into();
        }
        cfg.to_core().validate().map_err(to_py_err)?;
        Ok(cfg)
    }

    fn __repr__(&self) -> String {
        format!(
            "SolverConfig(tol={:e}, marginal_tol={:e}, max_iter={}, rank_tol={:e}, regularize={}, reg_eps={:e})",
            self.tol,
            self.marginal_tol,
            self.max_iter,
            self.rank_tol,
            if self.regularize { "True" } else { "False" },
            self.reg_eps
        )
    }
}

/// Output of [`copula_of`].
#[pyclass(name = "CopulaResult", module = "qcopula_py", frozen)]
pub struct PyCopulaResult {
    inner: qcopula::CopulaResult,
}

#[pymethods]
impl PyCopulaResult {
    #[getter]
    fn chi(&self) -> PyDensityMatrix {
        PyDensityMatrix {
            inner: self.inner.chi.clone(),
        }
    }

    #[getter]
    fn psi0(&self) -> Vec<Vec<Complex64>> {
        crows(&self.inner.scalers.psi0)
    }

    #[getter]
    fn psi1(&self) -> Vec<Vec<Complex64>> {
        crows(&self.inner.scalers.psi1)
    }

    #[getter]
    fn phi0(&self) -> Vec<Vec<Complex64>> {
        crows(&self.inner.scalers.phi0)
    }

    #[getter]
    fn phi1(&self) -> Vec<Vec<Complex64>> {
        crows(&self.inner.scalers.phi1)
    }

    /// Fixed ray of the iteration, trace one.
    #[getter]
    fn phi_ray(&self) -> Vec<Vec<Complex64>> {
        crows(&self.inner.report.phi_ray)
    }

    /// Eigenvalue of the fixed ray (`lambda` is a Python keyword).
    #[getter]
    fn lambda_(&self) -> f64 {
        self.inner.report.lambda
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.report.iterations
    }

    #[getter]
    fn steps(&self) -> Vec<f64> {
        self.inner.report.steps.clone()
    }

    #[getter]
    fn marginal_residual(&self) -> f64 {
        self.inner.marginal_residual
    }

    #[getter]
    fn regularized_with(&self) -> Option<f64> {
        self.inner.regularized_with
    }

    /// `(a, b)` with `chi ∝ (a*⊗b*) rho (a⊗b)`.
    fn connection_matrices(&self) -> PyResult<(Rows, Rows)> {
        let (a, b) = self.inner.connection_matrices().map_err(to_py_err)?;
        Ok((crows(&a), crows(&b)))
    }

    /// Local-unitary invariants of `chi` as a flat list.
    fn fingerprint(&self) -> PyResult<Vec<f64>> {
        let f = qcopula::copula_invariants(&self.inner.chi).map_err(to_py_err)?;
        Ok(f.to_vec())
    }
}

#[pyfunction]
#[pyo3(signature = (rho, config=None, factorization="square-root"))]
fn copula_of(
    py: Python<'_>,
    rho: &PyDensityMatrix,
    config: Option<&PySolverConfig>,
    factorization: &str,
) -> PyResult<PyCopulaResult> {
    let cfg = config.map_or_else(qcopula::SolverConfig::default, PySolverConfig::to_core);
    let factorization = match factorization {
        "square-root" => qcopula::Factorization::SquareRoot,
        "cholesky" => qcopula::Factorization::Cholesky,
        other => {
            return Err(PyValueError::new_err(format!(
                "factorization must be 'square-root' or 'cholesky', got '{other}'"
            )))
        }
    };
    let state = rho.inner.clone();
    let inner = py
        .detach(|| qcopula::copula_of_with(&state, &cfg, factorization))
        .map_err(to_py_err)?;
    Ok(PyCopulaResult { inner })
}

/// `‖(a*⊗b*) rho (a⊗b) / Tr − chi‖_F`.
#[pyfunction]
fn verify_connection(
    rho: &PyDensityMatrix,
    chi: &PyDensityMatrix,
    a: Vec<Vec<Complex64>>,
    b: Vec<Vec<Complex64>>,
) -> PyResult<f64> {
    qcopula::verify_connection(&rho.inner, &chi.inner, &cmatrix(a)?, &cmatrix(b)?)
        .map_err(to_py_err)
}

/// Hilbert projective distance; `inf` for mismatched supports.
#[pyfunction]
#[pyo3(signature = (a, b, rank_tol=1e-10))]
fn hilbert_distance(
    a: Vec<Vec<Complex64>>,
    b: Vec<Vec<Complex64>>,
    rank_tol: f64,
) -> PyResult<f64> {
    let d = qcopula::hilbert_distance(&cmatrix(a)?, &cmatrix(b)?, rank_tol).map_err(to_py_err)?;
    Ok(d.as_f64())
}

/// `(d1, d2, scaled)` with `diag(d1) a diag(d2)` doubly stochastic.
#[pyfunction]
#[pyo3(signature = (a, tol=1e-12, max_iter=10_000))]
fn sinkhorn_scale(a: Vec<Vec<f64>>, tol: f64, max_iter: usize) -> PyResult<Scaling> {
    let p = qcopula::sinkhorn_scale(&rmatrix(a)?, tol, max_iter).map_err(to_py_err)?;
    let scaled = rrows(&p.scaled);
    Ok((p.d1, p.d2, scaled))
}

#[pymodule]
fn qcopula_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDensityMatrix>()?;
    m.add_class::<PySolverConfig>()?;
    m.add_class::<PyCopulaResult>()?;
    m.add_function(wrap_pyfunction!(copula_of, m)?)?;
    m.add_function(wrap_pyfunction!(verify_connection, m)?)?;
    m.add_function(wrap_pyfunction!(hilbert_distance, m)?)?;
    m.add_function(wrap_pyfunction!(sinkhorn_scale, m)?)?;
    m.add("QcopulaError", m.py().get_type::<QcopulaError>())?;
    m.add("NotConvergedError", m.py().get_type::<NotConvergedError>())?;
    Ok(())
}
