//! Python module `pyprefopt`. Vectors are lists of floats; matrices are
//! lists of rows. Validation errors raise `ValueError`, numerical aborts
//! `ArithmeticError`, and I/O failures `OSError`.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use prefopt::bench::run_suite;
use prefopt::config::parse_config;
use prefopt::output::{build_summary, emit_outputs};
use prefopt::solvers::{IterateRecord, RunReport, SolverConfig, StepSchedule};
use prefopt::subproblem::{solve_pgd, MultiplierDomain, PgdOptions, SubproblemContext};
use prefopt::{cone, metrics, Error};
use pyo3::exceptions::{PyArithmeticError, PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    if e.is_numerical() {
        PyArithmeticError::new_err(e.to_string())
    } else if matches!(e, Error::Io { .. }) {
        PyOSError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn matrix(rows: &[Vec<f64>]) -> PyResult<DMatrix<f64>> {
    let n = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix rows must have equal length"));
    }
    Ok(DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]))
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn vector(v: Vec<f64>) -> DVector<f64> {
    DVector::from_vec(v)
}

fn domain(name: &str) -> PyResult<MultiplierDomain> {
    match name {
        "adaptive" => Ok(MultiplierDomain::Adaptive),
        "simplified" => Ok(MultiplierDomain::Simplified),
        other => Err(PyValueError::new_err(format!(
            "domain must be 'adaptive' or 'simplified', got {other:?}"
        ))),
    }
}

/// Vector objective with an analytic Jacobian.
#[pyclass(frozen, module = "pyprefopt")]
struct Problem {
    inner: prefopt::problem::Problem,
}

#[pymethods]
impl Problem {
    /// Two-well benchmark with `q` parameters and two objectives.
    #[staticmethod]
    fn synthetic_concave(q: usize) -> PyResult<Self> {
        Ok(Self {
            inner: prefopt::problem::Problem::synthetic_concave(q).map_err(to_py)?,
        })
    }

    /// `f_m(theta) = scale_m / 2 * |theta - center_m|^2`.
    #[staticmethod]
    fn quadratic(centers: Vec<Vec<f64>>, scales: Vec<f64>) -> PyResult<Self> {
        let centers = centers.into_iter().map(vector).collect();
        Ok(Self {
            inner: prefopt::problem::Problem::quadratic(centers, scales).map_err(to_py)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn num_objectives(&self) -> usize {
        self.inner.num_objectives()
    }

    fn value(&self, theta: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(self.inner.value(&vector(theta)).map_err(to_py)?.as_slice().to_vec())
    }

    /// `q x M` Jacobian as rows.
    fn jacobian(&self, theta: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
        Ok(rows(&self.inner.jacobian(&vector(theta)).map_err(to_py)?))
    }

    fn __repr__(&self) -> String {
        format!(
            "Problem(name={:?}, dim={}, num_objectives={})",
            self.inner.name(),
            self.inner.dim(),
            self.inner.num_objectives()
        )
    }
}

/// Ordering cone plus optional linear constraints on objective values.
#[pyclass(frozen, module = "pyprefopt")]
struct Preference {
    inner: prefopt::preference::Preference,
}

#[pymethods]
impl Preference {
    #[new]
    fn new(cone: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(Self {
            inner: prefopt::preference::Preference::new(matrix(&cone)?).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn pareto(m: usize) -> PyResult<Self> {
        Ok(Self {
            inner: prefopt::preference::Preference::pareto(m).map_err(to_py)?,
        })
    }

    /// Adds the equality constraints that keep objectives on the ray `ray`.
    fn with_ray(&self, ray: Vec<f64>) -> PyResult<Self> {
        let (b, off) = cone::ray_to_equality(&vector(ray)).map_err(to_py)?;
        self.with(|p| p.with_equalities(b, off))
    }

    fn with_equalities(&self, b: Vec<Vec<f64>>, offset: Vec<f64>) -> PyResult<Self> {
        let b = matrix(&b)?;
        self.with(|p| p.with_equalities(b, vector(offset)))
    }

    fn with_inequalities(&self, b: Vec<Vec<f64>>, offset: Vec<f64>) -> PyResult<Self> {
        let b = matrix(&b)?;
        self.with(|p| p.with_inequalities(b, vector(offset)))
    }

    fn with_weights(&self, c_g: f64, c_h: f64) -> PyResult<Self> {
        self.with(|p| p.with_weights(c_g, c_h))
    }

    #[getter]
    fn cone(&self) -> Vec<Vec<f64>> {
        rows(self.inner.cone())
    }

    #[getter]
    fn num_equalities(&self) -> usize {
        self.inner.num_equalities()
    }

    #[getter]
    fn num_inequalities(&self) -> usize {
        self.inner.num_inequalities()
    }

    /// Returns `(g, h)` at objective values `f`.
    fn constraints(&self, f: Vec<f64>) -> PyResult<(Vec<f64>, Vec<f64>)> {
        let (g, h) = self.inner.eval_constraints(&vector(f)).map_err(to_py)?;
        Ok((g.as_slice().to_vec(), h.as_slice().to_vec()))
    }
}

impl Preference {
    fn with(
        &self,
        f: impl FnOnce(prefopt::preference::Preference) -> prefopt::Result<prefopt::preference::Preference>,
    ) -> PyResult<Self> {
        Ok(Self {
            inner: f(self.inner.clone()).map_err(to_py)?,
        })
    }
}

#[pyclass(frozen, module = "pyprefopt")]
struct Solver {
    inner: SolverConfig,
}

#[pymethods]
impl Solver {
    /// Double-loop method (alpha 0.05, 100 iterations, adaptive domain).
    #[staticmethod]
    fn meta() -> Self {
        Self {
            inner: SolverConfig::meta(),
        }
    }

    #[staticmethod]
    fn single_loop() -> Self {
        Self {
            inner: SolverConfig::single_loop(),
        }
    }

    #[staticmethod]
    fn stochastic() -> Self {
        Self {
            inner: SolverConfig::stochastic(),
        }
    }

    #[staticmethod]
    fn linear_scalarization(weights: Vec<f64>) -> Self {
        Self {
            inner: SolverConfig::linear_scalarization(weights),
        }
    }

    fn with_alpha(&self, alpha: f64) -> Self {
        Self {
            inner: self.inner.clone().with_alpha(alpha),
        }
    }

    fn with_gamma(&self, gamma: f64) -> Self {
        Self {
            inner: self.inner.clone().with_gamma(gamma),
        }
    }

    fn with_iterations(&self, iterations: usize) -> Self {
        Self {
            inner: self.inner.clone().with_iterations(iterations),
        }
    }

    fn with_seed(&self, seed: u64) -> Self {
        Self {
            inner: self.inner.clone().with_seed(seed),
        }
    }

    fn with_domain(&self, name: &str) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.clone().with_domain(domain(name)?),
        })
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }

    /// Constant step size, or `None` for a budget-scaled schedule.
    #[getter]
    fn alpha(&self) -> Option<f64> {
        match self.inner.alpha {
            StepSchedule::Constant { value } => Some(value),
            _ => None,
        }
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("solver config serializes")
    }
}

#[pyclass(frozen, module = "pyprefopt")]
struct Report {
    inner: RunReport,
}

fn record_dict<'py>(py: Python<'py>, r: &IterateRecord) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("t", r.t)?;
    d.set_item("objectives", r.objectives.clone())?;
    d.set_item("norm_d", r.norm_d)?;
    d.set_item("g_plus_l1", r.g_plus_l1)?;
    d.set_item("h_l1", r.h_l1)?;
    d.set_item("kkt", r.kkt)?;
    Ok(d)
}

#[pymethods]
impl Report {
    #[getter]
    fn theta(&self) -> Vec<f64> {
        self.inner.theta_final.clone()
    }

    #[getter]
    fn objectives(&self) -> Vec<f64> {
        self.inner.objectives_final.clone()
    }

    #[getter]
    fn h_l1(&self) -> f64 {
        self.inner.h_l1
    }

    #[getter]
    fn g_plus_l1(&self) -> f64 {
        self.inner.g_plus_l1
    }

    #[getter]
    fn norm_d(&self) -> f64 {
        self.inner.norm_d
    }

    #[getter]
    fn kkt(&self) -> f64 {
        self.inner.kkt
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }

    #[getter]
    fn stopped_early(&self) -> bool {
        self.inner.stopped_early
    }

    /// Recorded iterates as dicts.
    fn trajectory<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.inner.trajectory.iter().map(|r| record_dict(py, r)).collect()
    }

    fn trajectory_csv(&self) -> String {
        prefopt::output::trajectory_csv(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "Report(iterations={}, h_l1={:e}, kkt={:e})",
            self.inner.iterations, self.inner.h_l1, self.inner.kkt
        )
    }
}

/// Runs `solver` from `theta0`. The GIL is released while it runs.
#[pyfunction]
fn run(py: Python<'_>, problem: &Problem, preference: &Preference, theta0: Vec<f64>, solver: &Solver) -> PyResult<Report> {
    let theta0 = vector(theta0);
    let report = py
        .detach(|| prefopt::solvers::run(&problem.inner, &preference.inner, &theta0, &solver.inner))
        .map_err(to_py)?;
    Ok(Report { inner: report })
}

/// Solves the direction subproblem for a `q x M` Jacobian (rows) and
/// objective values `f`. Returns a dict with `direction`, `psi`, `phi`,
/// `kkt`, `lambda_f`, `lambda_g`, `lambda_h` and `inner_iters`.
#[pyfunction]
#[pyo3(signature = (jacobian, f, preference, domain_name = "adaptive", step = 0.1, max_iters = 250, tol = 1e-5))]
#[allow(clippy::too_many_arguments)]
fn solve_subproblem<'py>(
    py: Python<'py>,
    jacobian: Vec<Vec<f64>>,
    f: Vec<f64>,
    preference: &Preference,
    domain_name: &str,
    step: f64,
    max_iters: usize,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let ctx = SubproblemContext::new(matrix(&jacobian)?, vector(f), &preference.inner, domain(domain_name)?)
        .map_err(to_py)?;
    let res = solve_pgd(&ctx, &ctx.initial_multipliers(), &PgdOptions { step, max_iters, tol }).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("direction", res.direction.as_slice().to_vec())?;
    d.set_item("psi", res.psi)?;
    d.set_item("phi", res.phi)?;
    d.set_item("kkt", res.kkt)?;
    d.set_item("lambda_f", res.multipliers.f.as_slice().to_vec())?;
    d.set_item("lambda_g", res.multipliers.g.as_slice().to_vec())?;
    d.set_item("lambda_h", res.multipliers.h.as_slice().to_vec())?;
    d.set_item("inner_iters", res.inner_iters)?;
    Ok(d)
}

/// Half-space matrix (rows) of the cone generated by `rays` (one ray per
/// entry).
#[pyfunction]
fn rays_to_halfspaces(rays: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
    let y = matrix(&rays)?.transpose();
    Ok(rows(&cone::rays_to_halfspaces(&y).map_err(to_py)?))
}

#[pyfunction]
fn dominates(a: Vec<Vec<f64>>, v: Vec<f64>, w: Vec<f64>) -> PyResult<bool> {
    cone::dominates(&matrix(&a)?, &vector(v), &vector(w)).map_err(to_py)
}

#[pyfunction]
fn contains(a: Vec<Vec<f64>>, y: Vec<f64>) -> PyResult<bool> {
    cone::contains(&matrix(&a)?, &vector(y)).map_err(to_py)
}

/// `(B_h, b_h)` keeping objectives on the ray through `v`.
#[pyfunction]
fn ray_to_equality(v: Vec<f64>) -> PyResult<(Vec<Vec<f64>>, Vec<f64>)> {
    let (b, off) = cone::ray_to_equality(&vector(v)).map_err(to_py)?;
    Ok((rows(&b), off.as_slice().to_vec()))
}

#[pyfunction]
fn hypervolume(points: Vec<Vec<f64>>, reference: Vec<f64>) -> PyResult<f64> {
    let pts: Vec<DVector<f64>> = points.into_iter().map(vector).collect();
    metrics::hypervolume(&pts, &vector(reference)).map_err(to_py)
}

#[pyfunction]
fn nondominated_filter(points: Vec<Vec<f64>>, a: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
    let pts: Vec<DVector<f64>> = points.into_iter().map(vector).collect();
    let kept = metrics::nondominated_filter(&pts, &matrix(&a)?).map_err(to_py)?;
    Ok(kept.into_iter().map(|p| p.as_slice().to_vec()).collect())
}

#[pyfunction]
fn pf_distance_synthetic(f: Vec<f64>) -> PyResult<f64> {
    metrics::pf_distance_synthetic(&vector(f)).map_err(to_py)
}

/// Runs a TOML experiment config and returns the summary as JSON. With
/// `out_dir`, trajectories and the summary are also written there.
#[pyfunction]
#[pyo3(signature = (text, out_dir = None, plot = false))]
fn run_config(py: Python<'_>, text: &str, out_dir: Option<&str>, plot: bool) -> PyResult<String> {
    let spec = parse_config(text).map_err(to_py)?;
    spec.validate().map_err(to_py)?;
    let suite = py
        .detach(|| {
            let problem = spec.build_problem()?;
            let prefs = spec.preferences()?;
            run_suite(&problem, &prefs, &spec.solver, &spec.suite_options())
        })
        .map_err(to_py)?;
    if let Some(dir) = out_dir {
        emit_outputs(Path::new(dir), &spec, &suite, plot).map_err(to_py)?;
    }
    Ok(build_summary(&spec, &suite).to_json())
}

#[pymodule]
fn pyprefopt(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Problem>()?;
    m.add_class::<Preference>()?;
    m.add_class::<Solver>()?;
    m.add_class::<Report>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(solve_subproblem, m)?)?;
    m.add_function(wrap_pyfunction!(rays_to_halfspaces, m)?)?;
    m.add_function(wrap_pyfunction!(dominates, m)?)?;
    m.add_function(wrap_pyfunction!(contains, m)?)?;
    m.add_function(wrap_pyfunction!(ray_to_equality, m)?)?;
    m.add_function(wrap_pyfunction!(hypervolume, m)?)?;
    m.add_function(wrap_pyfunction!(nondominated_filter, m)?)?;
    m.add_function(wrap_pyfunction!(pf_distance_synthetic, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}
