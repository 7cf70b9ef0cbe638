//! Python bindings. Structured results come back as plain dicts, decoded
//! from the same JSON the command-line tool writes.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;
use symspace::campaign::{self, CampaignConfig, SubmersionConfig};
use symspace::error::SymError;
use symspace::nalgebra::DMatrix;
use symspace::product::{self, ProductSpace};
use symspace::sampling::FrameSearch;
use symspace::simons::{self, SubmanifoldGerm};
use symspace::submersion::{self, FibrationKind, FibrationModel};
use symspace::symmetric::{build_cpn_pair, build_hpn_pair, build_sphere_pair, SymmetricPair};
use symspace::triple::{self, CandidateSubspace};

fn err(e: SymError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let s = symspace::json::to_string(value).map_err(err)?;
    py.import("json")?.call_method1("loads", (s,))
}

fn columns(vectors: &[Vec<f64>]) -> PyResult<DMatrix<f64>> {
    let n = vectors.first().map_or(0, Vec::len);
    if n == 0 || vectors.iter().any(|v| v.len() != n) {
        return Err(PyValueError::new_err(
            "expected a non-empty list of equal-length vectors",
        ));
    }
    Ok(DMatrix::from_fn(n, vectors.len(), |i, j| vectors[j][i]))
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// A compact symmetric pair `(g, h)` with `g = h ⊕ m`.
#[pyclass(name = "SymmetricPair", module = "symspace_py", frozen)]
struct PyPair(SymmetricPair);

#[pymethods]
impl PyPair {
    /// `S^n = SO(n+1)/SO(n)`.
    #[staticmethod]
    fn sphere(n: usize) -> PyResult<Self> {
        build_sphere_pair(n).map(Self).map_err(err)
    }

    /// `CP^n = SU(n+1)/S(U(1)×U(n))`.
    #[staticmethod]
    fn cpn(n: usize) -> PyResult<Self> {
        build_cpn_pair(n).map(Self).map_err(err)
    }

    /// `HP^n = Sp(n+1)/Sp(1)×Sp(n)`.
    #[staticmethod]
    fn hpn(n: usize) -> PyResult<Self> {
        build_hpn_pair(n).map(Self).map_err(err)
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name().to_string()
    }

    #[getter]
    fn m_dim(&self) -> usize {
        self.0.m_dim()
    }

    #[getter]
    fn h_dim(&self) -> usize {
        self.0.h_dim()
    }

    fn ricci(&self) -> Vec<Vec<f64>> {
        rows(&self.0.ricci())
    }

    fn rho(&self) -> f64 {
        self.0.rho_min()
    }

    fn scalar_curvature(&self) -> f64 {
        self.0.scalar_curvature()
    }

    /// Sectional curvature of the plane spanned by two `m`-coordinate vectors.
    fn sectional_curvature(&self, x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
        let d = self.0.m_dim();
        if x.len() != d || y.len() != d {
            return Err(PyValueError::new_err(format!(
                "vectors must have {d} m-coordinates"
            )));
        }
        let x = self.0.from_m_coords(&x);
        let y = self.0.from_m_coords(&y);
        self.0.sectional_curvature(&x, &y).map_err(err)
    }

    #[pyo3(signature = (samples = 256, refine_steps = 200, seed = 0))]
    fn summary<'py>(
        &self,
        py: Python<'py>,
        samples: usize,
        refine_steps: usize,
        seed: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let s = self
            .0
            .summary(&FrameSearch::new(samples, refine_steps, seed))
            .map_err(err)?;
        to_py(py, &s)
    }

    fn __repr__(&self) -> String {
        format!(
            "SymmetricPair({}, dim m = {})",
            self.0.name(),
            self.0.m_dim()
        )
    }
}

/// Riemannian product of two symmetric spaces, the first one the sphere
/// (or other rank-one factor) carrying the submanifold.
#[pyclass(name = "ProductSpace", module = "symspace_py", frozen)]
struct PyProduct(ProductSpace);

#[pymethods]
impl PyProduct {
    #[new]
    #[pyo3(signature = (factor1, factor2, samples = 256, refine_steps = 200, seed = 0))]
    fn new(
        factor1: &PyPair,
        factor2: &PyPair,
        samples: usize,
        refine_steps: usize,
        seed: u64,
    ) -> PyResult<Self> {
        let search = FrameSearch::new(samples, refine_steps, seed);
        ProductSpace::new(factor1.0.clone(), factor2.0.clone(), &search)
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name().to_string()
    }

    #[getter]
    fn p(&self) -> usize {
        self.0.p()
    }

    #[getter]
    fn n_total(&self) -> usize {
        self.0.n_total()
    }

    fn constants<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, self.0.constants())
    }

    /// Random germ with `λ` drawn from `[0, lambda_max]`.
    #[pyo3(signature = (lambda_max, magnitude = 1.0, seed = 0))]
    fn random_germ(&self, lambda_max: f64, magnitude: f64, seed: u64) -> PyResult<PyGerm> {
        simons::random_germ(&self.0, lambda_max, magnitude, seed)
            .map(PyGerm)
            .map_err(err)
    }

    /// Random germ with `λ` exactly `lam`.
    #[pyo3(signature = (lam, magnitude = 1.0, seed = 0))]
    fn random_germ_at(&self, lam: f64, magnitude: f64, seed: u64) -> PyResult<PyGerm> {
        simons::random_germ_at(&self.0, lam, magnitude, seed)
            .map(PyGerm)
            .map_err(err)
    }

    /// Every Simons term by both routes, the bound and the margin.
    fn simons<'py>(&self, py: Python<'py>, germ: &PyGerm) -> PyResult<Bound<'py, PyAny>> {
        let b = simons::simons_total(&self.0, &germ.0).map_err(err)?;
        to_py(py, &b)
    }

    /// Residual of `[[t,t],t] ⊆ t` for the span of `m`-coordinate vectors.
    fn triple_residual(&self, vectors: Vec<Vec<f64>>) -> PyResult<f64> {
        let sub = CandidateSubspace::from_span(self.0.pair(), &columns(&vectors)?).map_err(err)?;
        Ok(triple::triple_residual(self.0.pair(), &sub))
    }

    fn triple_report<'py>(
        &self,
        py: Python<'py>,
        vectors: Vec<Vec<f64>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let sub = CandidateSubspace::from_span(self.0.pair(), &columns(&vectors)?).map_err(err)?;
        to_py(py, &triple::triple_report(&self.0, &sub).map_err(err)?)
    }

    fn __repr__(&self) -> String {
        format!(
            "ProductSpace({}, p = {}, N = {})",
            self.0.name(),
            self.0.p(),
            self.0.n_total()
        )
    }
}

/// Second-order data of a minimal submanifold at a point.
#[pyclass(name = "SubmanifoldGerm", module = "symspace_py", frozen)]
struct PyGerm(SubmanifoldGerm);

#[pymethods]
impl PyGerm {
    #[getter]
    fn p(&self) -> usize {
        self.0.p()
    }

    #[getter]
    fn codim(&self) -> usize {
        self.0.codim()
    }

    /// Frobenius norm of the second-factor part of the tangent frame.
    #[getter]
    fn lam(&self) -> f64 {
        self.0.lambda()
    }

    #[getter]
    fn a_norm_sq(&self) -> f64 {
        self.0.a_norm_sq()
    }

    fn tangent(&self) -> Vec<Vec<f64>> {
        rows(self.0.tangent())
    }

    fn normal(&self) -> Vec<Vec<f64>> {
        rows(self.0.normal())
    }

    fn scaled(&self, factor: f64) -> Self {
        Self(self.0.with_scaled_sff(factor))
    }
}

#[pyfunction]
fn constant_c(p: usize, n: usize, k1: f64, k2: f64) -> PyResult<f64> {
    product::constant_c(p, n, k1, k2).map_err(err)
}

#[pyfunction]
fn lambda_tg(rho: f64, p: usize, c: f64) -> PyResult<f64> {
    product::lambda_tg(rho, p, c).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (model, n, samples = 256, refine_steps = 200, seed = 0))]
fn submersion_summary<'py>(
    py: Python<'py>,
    model: &str,
    n: usize,
    samples: usize,
    refine_steps: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let kind = fibration(model)?;
    let m = FibrationModel::new(kind, n).map_err(err)?;
    let s =
        submersion::summarize(&m, &FrameSearch::new(samples, refine_steps, seed)).map_err(err)?;
    to_py(py, &s)
}

fn fibration(model: &str) -> PyResult<FibrationKind> {
    match model {
        "cpn" => Ok(FibrationKind::Cpn),
        "hpn" => Ok(FibrationKind::Hpn),
        other => Err(PyValueError::new_err(format!(
            "unknown model '{other}' (expected cpn or hpn)"
        ))),
    }
}

/// Runs a campaign from a JSON config and returns the report as a dict.
///
/// `command` is one of `constants`, `simons-verify`, `triple-check`, `all`;
/// `submersion` takes `{"model", "n", ...}` instead of a space config.
#[pyfunction]
fn run_campaign<'py>(
    py: Python<'py>,
    command: &str,
    config_json: &str,
) -> PyResult<Bound<'py, PyAny>> {
    if command == "submersion" {
        let cfg: SubmersionConfig =
            serde_json::from_str(config_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
        let r = py.detach(|| campaign::run_submersion(&cfg)).map_err(err)?;
        return to_py(py, &r);
    }
    let cfg = CampaignConfig::from_json(config_json).map_err(err)?;
    match command {
        "constants" => to_py(py, &campaign::run_constants(&cfg).map_err(err)?),
        "simons-verify" => to_py(py, &py.detach(|| campaign::run_simons(&cfg)).map_err(err)?),
        "triple-check" => to_py(
            py,
            &py.detach(|| campaign::run_triple_suite(&cfg))
                .map_err(err)?,
        ),
        "all" => to_py(py, &py.detach(|| campaign::run_all(&cfg)).map_err(err)?),
        other => Err(PyValueError::new_err(format!("unknown command '{other}'"))),
    }
}

#[pymodule]
fn symspace_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPair>()?;
    m.add_class::<PyProduct>()?;
    m.add_class::<PyGerm>()?;
    m.add_function(wrap_pyfunction!(constant_c, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_tg, m)?)?;
    m.add_function(wrap_pyfunction!(submersion_summary, m)?)?;
    m.add_function(wrap_pyfunction!(run_campaign, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
