//! Python bindings. Exponents are passed as ints, strings such as `"3/2"`
//! and `"inf"`, or `float("inf")`; reports come back as plain dicts.

use herzlab::exponents::{self, UniquenessClass};
use herzlab::functions::{annular_decompose, Sampled, DEFAULT_WINDOW};
use herzlab::harness::{self, ConfigFile, ExperimentKind};
use herzlab::heat;
use herzlab::norms::{self, InterpolationCouple};
use herzlab::quadrature::QuadratureSpec;
use herzlab::solver::{self, PicardOptions};
use herzlab::{AnnularProfile, ExtRat, HerzIndex, ProblemParams, RadialFunction, Rational};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use std::sync::Arc;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn ext(obj: &Bound<'_, PyAny>) -> PyResult<ExtRat> {
    if let Ok(i) = obj.extract::<i64>() {
        return Ok(ExtRat::integer(i as i128));
    }
    if let Ok(s) = obj.extract::<String>() {
        return s.trim().parse().map_err(err);
    }
    match obj.extract::<f64>() {
        Ok(x) if x == f64::INFINITY => Ok(ExtRat::INFINITY),
        Ok(x) => Err(err(format!("{x}: pass non-integer exponents as strings like \"3/2\""))),
        Err(_) => Err(err("exponent must be an int, a string or inf")),
    }
}

fn rational(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    ext(obj)?.finite().ok_or_else(|| err("exponent must be finite"))
}

/// Radial function on `R^n`; combine with `+`, `-` and `scaled`.
#[pyclass(name = "RadialFunction", frozen, skip_from_py_object, module = "herzlab_py")]
#[derive(Clone)]
struct PyRadial(RadialFunction);

fn checked(f: RadialFunction) -> PyResult<PyRadial> {
    f.validate().map_err(err)?;
    Ok(PyRadial(f))
}

#[pymethods]
impl PyRadial {
    #[staticmethod]
    fn zero() -> Self {
        Self(RadialFunction::Zero)
    }

    #[staticmethod]
    #[pyo3(signature = (width, amplitude = 1.0))]
    fn gaussian(width: f64, amplitude: f64) -> PyResult<Self> {
        checked(RadialFunction::gaussian(width, amplitude))
    }

    #[staticmethod]
    fn ball(radius: f64) -> PyResult<Self> {
        checked(RadialFunction::BallIndicator(radius))
    }

    #[staticmethod]
    fn annulus(j: i32) -> Self {
        Self(RadialFunction::AnnulusIndicator(j))
    }

    #[staticmethod]
    fn smooth_ball(radius: f64, width: f64) -> PyResult<Self> {
        checked(RadialFunction::SmoothBall { radius, width })
    }

    #[staticmethod]
    fn smooth_annulus(width: f64) -> PyResult<Self> {
        checked(RadialFunction::smooth_annulus(width))
    }

    #[staticmethod]
    fn power_log(decay: f64, log_exp: f64) -> PyResult<Self> {
        checked(RadialFunction::power_log(decay, log_exp))
    }

    #[staticmethod]
    fn truncated_power(exponent: f64, radius: f64) -> PyResult<Self> {
        checked(RadialFunction::truncated_power(exponent, radius))
    }

    /// Log-log interpolation of samples on increasing positive radii.
    #[staticmethod]
    fn sampled(radii: Vec<f64>, values: Vec<f64>) -> PyResult<Self> {
        Ok(Self(RadialFunction::Sampled(Arc::new(Sampled::new(radii, values).map_err(err)?))))
    }

    fn __call__(&self, r: f64) -> PyResult<f64> {
        self.0.evaluate(r).map_err(err)
    }

    fn scaled(&self, factor: f64) -> Self {
        Self(self.0.clone().scaled(factor))
    }

    fn dilated(&self, lam: f64) -> Self {
        Self(self.0.clone().dilated(lam))
    }

    fn restricted(&self, j: i32) -> Self {
        Self(self.0.clone().restricted(j))
    }

    fn __add__(&self, other: &Self) -> Self {
        Self(self.0.plus(&other.0))
    }

    fn __sub__(&self, other: &Self) -> Self {
        Self(self.0.minus(&other.0))
    }

    fn __repr__(&self) -> String {
        match &self.0 {
            RadialFunction::Sampled(s) => format!("RadialFunction.Sampled({} points)", s.radii.len()),
            f => format!("RadialFunction.{f:?}"),
        }
    }
}

/// Hardy-Henon problem data `(n, alpha, gamma)` with a Herz index `(s, q, r)`.
#[pyclass(name = "Problem", frozen, module = "herzlab_py")]
struct PyProblem(ProblemParams);

#[pymethods]
impl PyProblem {
    #[new]
    fn new(
        n: u32,
        alpha: &Bound<'_, PyAny>,
        gamma: &Bound<'_, PyAny>,
        s: &Bound<'_, PyAny>,
        q: &Bound<'_, PyAny>,
        r: &Bound<'_, PyAny>,
    ) -> PyResult<Self> {
        let index = HerzIndex::new(rational(s)?, ext(q)?, ext(r)?).map_err(err)?;
        Ok(Self(ProblemParams::new(n, rational(alpha)?, rational(gamma)?, index).map_err(err)?))
    }

    /// `(q_c, Q_c)` as exact strings.
    fn critical_exponents(&self) -> PyResult<(String, String)> {
        let (a, b) = exponents::critical_exponents(&self.0).map_err(err)?;
        Ok((a.to_string(), b.to_string()))
    }

    fn classify<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &exponents::classify(&self.0).map_err(err)?)
    }

    fn sigma_delta(&self) -> PyResult<(String, String)> {
        let (s, d) = exponents::sigma_delta(&self.0).map_err(err)?;
        Ok((exponents::fmt_rational(&s), exponents::fmt_rational(&d)))
    }

    /// Hypothesis report for `"bounded"` or `"continuous"` uniqueness.
    fn uniqueness_hypotheses<'py>(&self, py: Python<'py>, class: &str) -> PyResult<Bound<'py, PyAny>> {
        let which = match class {
            "bounded" => UniquenessClass::Bounded,
            "continuous" => UniquenessClass::Continuous,
            other => return Err(err(format!("unknown class `{other}`"))),
        };
        to_py(py, &exponents::check_uniqueness_hypotheses(&self.0, which).map_err(err)?)
    }

    fn __repr__(&self) -> String {
        let p = &self.0;
        format!(
            "Problem(n={}, alpha={}, gamma={}, s={}, q={}, r={})",
            p.n,
            exponents::fmt_rational(&p.alpha),
            exponents::fmt_rational(&p.gamma),
            exponents::fmt_rational(&p.index.s),
            p.index.q,
            p.index.r
        )
    }
}

/// Herz quasi-norm of `f`, with `ball=True` for the ball form (`s < 0`).
#[pyfunction]
#[pyo3(signature = (f, n, s, q, r, window = DEFAULT_WINDOW, ball = false))]
#[allow(clippy::too_many_arguments)]
fn herz_norm<'py>(
    py: Python<'py>,
    f: &PyRadial,
    n: u32,
    s: &Bound<'py, PyAny>,
    q: &Bound<'py, PyAny>,
    r: &Bound<'py, PyAny>,
    window: (i32, i32),
    ball: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let s = exponents::ratio_to_f64(&rational(s)?);
    let (q, r) = (ext(q)?, ext(r)?);
    let v = py.detach(|| {
        let profile = annular_decompose(&f.0, q, n, window, &QuadratureSpec::default()).map_err(err)?;
        if ball { norms::herz_norm_ball(&profile, s, r) } else { norms::herz_norm(&profile, s, r) }.map_err(err)
    })?;
    to_py(py, &v)
}

/// Weighted Lorentz quasi-norm `‖|x|^{-weight_s} f‖_{L^{p,r}}`.
#[pyfunction]
#[pyo3(signature = (f, n, p, r, weight_s = 0.0))]
fn lorentz_norm<'py>(
    py: Python<'py>,
    f: &PyRadial,
    n: u32,
    p: &Bound<'py, PyAny>,
    r: &Bound<'py, PyAny>,
    weight_s: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let (p, r) = (ext(p)?, ext(r)?);
    let v = py.detach(|| norms::lorentz_norm(&f.0, weight_s, p, r, n, &QuadratureSpec::default()).map_err(err))?;
    to_py(py, &v)
}

/// `e^{tΔ}f` sampled on a log-radius grid.
#[pyfunction]
fn heat_apply(py: Python<'_>, f: &PyRadial, t: f64, n: u32) -> PyResult<PyRadial> {
    py.detach(|| heat::heat_apply(&f.0, t, n, &QuadratureSpec::default()).map(PyRadial).map_err(err))
}

#[allow(clippy::too_many_arguments)]
fn couple_and_profile(
    values: &[f64],
    j0: i32,
    n: u32,
    q: &Bound<'_, PyAny>,
    s0: &Bound<'_, PyAny>,
    s1: &Bound<'_, PyAny>,
    r0: &Bound<'_, PyAny>,
    r1: &Bound<'_, PyAny>,
) -> PyResult<(AnnularProfile, InterpolationCouple)> {
    let q = ext(q)?;
    let couple = InterpolationCouple::new(rational(s0)?, rational(s1)?, ext(r0)?, ext(r1)?, q).map_err(err)?;
    Ok((AnnularProfile::from_values(q, n, j0, values), couple))
}

/// `K(t, f)` for the Herz couple, where `values[i]` is `‖f χ_{A_{j0+i}}‖_q`.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn k_functional<'py>(
    py: Python<'py>,
    values: Vec<f64>,
    j0: i32,
    n: u32,
    q: &Bound<'py, PyAny>,
    s0: &Bound<'py, PyAny>,
    s1: &Bound<'py, PyAny>,
    r0: &Bound<'py, PyAny>,
    r1: &Bound<'py, PyAny>,
    t: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let (profile, couple) = couple_and_profile(&values, j0, n, q, s0, s1, r0, r1)?;
    to_py(py, &norms::k_functional(&profile, &couple, t))
}

/// Real-interpolation quasi-norm `(X0, X1)_{theta, r}` of an annular profile.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn interpolation_norm<'py>(
    py: Python<'py>,
    values: Vec<f64>,
    j0: i32,
    n: u32,
    q: &Bound<'py, PyAny>,
    s0: &Bound<'py, PyAny>,
    s1: &Bound<'py, PyAny>,
    r0: &Bound<'py, PyAny>,
    r1: &Bound<'py, PyAny>,
    theta: f64,
    r: &Bound<'py, PyAny>,
) -> PyResult<Bound<'py, PyAny>> {
    let (profile, couple) = couple_and_profile(&values, j0, n, q, s0, s1, r0, r1)?;
    to_py(py, &norms::interpolation_norm(&profile, &couple, theta, ext(r)?).map_err(err)?)
}

/// Picard iteration for the mild solution from `u0` on `(0, horizon]`.
#[pyfunction]
#[pyo3(signature = (problem, u0, horizon, tol = 1e-12, max_iter = 12, time_nodes = 16))]
fn picard_solve<'py>(
    py: Python<'py>,
    problem: &PyProblem,
    u0: &PyRadial,
    horizon: f64,
    tol: f64,
    max_iter: usize,
    time_nodes: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let opts = PicardOptions { time_nodes, ..PicardOptions::default() };
    let run = py.detach(|| {
        solver::picard_solve_with(&u0.0, &problem.0, horizon, &QuadratureSpec::default(), max_iter, tol, &opts)
            .map_err(err)
    })?;
    to_py(py, &run)
}

fn config_with(kind: Option<ExperimentKind>, text: &str, overrides: Option<&Bound<'_, PyDict>>) -> PyResult<ConfigFile> {
    let mut file: ConfigFile = text.parse().map_err(err)?;
    if let Some(d) = overrides {
        for (k, v) in d.iter() {
            let k: String = k.extract()?;
            let v = v.str()?.to_string();
            let key = match kind {
                Some(kind) if !k.contains('.') => format!("{kind}.{k}"),
                _ => k,
            };
            file.set(&key, &v);
        }
    }
    file.validate().map_err(err)?;
    Ok(file)
}

/// Runs one experiment with its defaults plus `overrides` (unscoped keys).
#[pyfunction]
#[pyo3(signature = (kind, overrides = None))]
fn run_experiment<'py>(
    py: Python<'py>,
    kind: &str,
    overrides: Option<&Bound<'py, PyDict>>,
) -> PyResult<Bound<'py, PyAny>> {
    let kind: ExperimentKind = kind.parse().map_err(err)?;
    let cfg = config_with(Some(kind), "", overrides)?.experiment(kind).map_err(err)?;
    let report = py.detach(|| harness::run(&cfg).map_err(err))?;
    to_py(py, &report)
}

/// Runs every experiment listed in a config text; returns the reports.
#[pyfunction]
#[pyo3(signature = (config = ""))]
fn run_suite<'py>(py: Python<'py>, config: &str) -> PyResult<Bound<'py, PyAny>> {
    let file = config_with(None, config, None)?;
    let reports = py.detach(|| harness::run_suite(&file).map_err(err))?;
    to_py(py, &reports)
}

#[pymodule]
fn herzlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRadial>()?;
    m.add_class::<PyProblem>()?;
    m.add_function(wrap_pyfunction!(herz_norm, m)?)?;
    m.add_function(wrap_pyfunction!(lorentz_norm, m)?)?;
    m.add_function(wrap_pyfunction!(heat_apply, m)?)?;
    m.add_function(wrap_pyfunction!(k_functional, m)?)?;
    m.add_function(wrap_pyfunction!(interpolation_norm, m)?)?;
    m.add_function(wrap_pyfunction!(picard_solve, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}
