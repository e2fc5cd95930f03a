//! Python bindings: problems, schedules, the stepwise optimizer, whole runs and
//! the theory metrics.

use adalr_core::experiment::{parse_problem, preset_catalog, resolve_preset};
use adalr_core::metrics::{self, RateQuantity};
use adalr_core::projection;
use adalr_core::{
    AlphaRule, BetaRule, DiagonalMatrix, Error, EstimatorKind, FeasibleSet, OptimizerState, ProblemSpec, RunOptions,
    ScheduleConfig, SeedState, TheoryConstants,
};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    if e.is_config_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn parse_estimator(name: &str) -> PyResult<EstimatorKind> {
    name.parse().map_err(to_py)
}

/// Sub-learning-rate schedule. `alpha` alone is constant; with `eta` it scales
/// `alpha / n**eta`. Give `beta` (constant) or `lam` (`lam**n`).
#[pyclass(name = "Schedule", module = "adalr", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySchedule {
    inner: ScheduleConfig,
}

#[pymethods]
impl PySchedule {
    #[new]
    #[pyo3(signature = (alpha=None, eta=None, beta=None, lam=None, gamma=0.0, delta=0.999, epsilon=1e-8))]
    fn new(
        alpha: Option<f64>,
        eta: Option<f64>,
        beta: Option<f64>,
        lam: Option<f64>,
        gamma: f64,
        delta: f64,
        epsilon: f64,
    ) -> PyResult<Self> {
        let alpha = match (alpha, eta) {
            (a, Some(eta)) => AlphaRule::InversePower {
                scale: a.unwrap_or(1.0),
                eta,
            },
            (Some(a), None) => AlphaRule::constant(a),
            (None, None) => return Err(PyValueError::new_err("give `alpha` and/or `eta`")),
        };
        let beta = match (beta, lam) {
            (Some(b), None) => BetaRule::constant(b),
            (None, Some(l)) => BetaRule::geometric(l),
            _ => return Err(PyValueError::new_err("give exactly one of `beta` and `lam`")),
        };
        ScheduleConfig::new(alpha, beta, gamma, delta, epsilon)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    fn alpha(&self, n: u64) -> f64 {
        self.inner.eval_alpha(n)
    }

    fn beta(&self, n: u64) -> f64 {
        self.inner.eval_beta(n)
    }

    /// `alpha_n (1 - beta_n) / (1 - gamma^(n+1))`.
    fn step_weight(&self, n: u64) -> f64 {
        self.inner.step_weight(n)
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.epsilon
    }

    #[getter]
    fn is_constant(&self) -> bool {
        self.inner.is_constant()
    }

    fn __repr__(&self) -> String {
        format!("Schedule({})", self.inner)
    }
}

/// A synthetic problem built from a spec string such as `quadratic:d=10,sigma=0.1`.
#[pyclass(name = "Problem", module = "adalr", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyProblem {
    inner: ProblemSpec,
}

#[pymethods]
impl PyProblem {
    #[new]
    #[pyo3(signature = (spec, ball=None, box_half=None))]
    fn new(spec: &str, ball: Option<f64>, box_half: Option<f64>) -> PyResult<Self> {
        let mut inner = parse_problem(spec).map_err(to_py)?;
        let d = inner.dimension();
        if let Some(r) = ball {
            let set = FeasibleSet::centered_ball(d, r).map_err(to_py)?;
            inner = inner.with_feasible_set(set, &format!("+ball={r}")).map_err(to_py)?;
        } else if let Some(h) = box_half {
            let set = FeasibleSet::symmetric_box(d, h).map_err(to_py)?;
            inner = inner.with_feasible_set(set, &format!("+box={h}")).map_err(to_py)?;
        }
        Ok(Self { inner })
    }

    #[getter]
    fn id(&self) -> &str {
        self.inner.id()
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    #[getter]
    fn gradient_bound(&self) -> f64 {
        self.inner.gradient_bound()
    }

    #[getter]
    fn diameter(&self) -> f64 {
        self.inner.feasible_set().diameter_constant()
    }

    #[getter]
    fn is_convex(&self) -> bool {
        self.inner.is_convex()
    }

    #[getter]
    fn is_online(&self) -> bool {
        self.inner.is_online()
    }

    /// `(x*, f*)` when the problem has a closed-form minimizer.
    #[getter]
    fn known_optimum(&self) -> Option<(Vec<f64>, f64)> {
        self.inner.known_optimum().map(|o| (o.x.to_vec(), o.value))
    }

    fn objective(&self, x: Vec<f64>) -> PyResult<f64> {
        self.check(&x)?;
        Ok(self.inner.objective(&x))
    }

    fn gradient(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        self.check(&x)?;
        Ok(self.inner.gradient(&x))
    }

    /// One oracle sample at step `step` from generator `(seed, stream)`.
    #[pyo3(signature = (x, step=0, seed=0, stream=0))]
    fn stochastic_gradient(&self, x: Vec<f64>, step: u64, seed: u64, stream: u64) -> PyResult<Vec<f64>> {
        self.check(&x)?;
        let mut rng = SeedState::with_stream(seed, stream).rng();
        Ok(self.inner.stochastic_gradient(&x, step, &mut rng))
    }

    /// `min_{y in X} <y - x, grad f(x)>`.
    fn stationarity_gap(&self, x: Vec<f64>) -> PyResult<f64> {
        self.check(&x)?;
        let g = self.inner.gradient(&x);
        metrics::stationarity_gap(&x, &g, self.inner.feasible_set()).map_err(to_py)
    }

    /// Weighted projection `P_{X,H}(y)` with `H = diag(h)` (identity if omitted).
    #[pyo3(signature = (y, h=None))]
    fn project(&self, y: Vec<f64>, h: Option<Vec<f64>>) -> PyResult<Vec<f64>> {
        let d = self.inner.dimension();
        let h = match h {
            Some(h) => DiagonalMatrix::new(h).map_err(to_py)?,
            None => DiagonalMatrix::identity(d),
        };
        projection::project(self.inner.feasible_set(), &h, &y)
            .map(|x| x.to_vec())
            .map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Problem('{}')", self.inner.id())
    }
}

impl PyProblem {
    fn check(&self, x: &[f64]) -> PyResult<()> {
        if x.len() != self.inner.dimension() {
            return Err(PyValueError::new_err(format!(
                "expected {} coordinates, got {}",
                self.inner.dimension(),
                x.len()
            )));
        }
        Ok(())
    }
}

/// Stepwise optimizer bound to one problem and schedule.
#[pyclass(name = "Optimizer", module = "adalr")]
struct PyOptimizer {
    state: OptimizerState,
    problem: ProblemSpec,
    schedule: ScheduleConfig,
}

#[pymethods]
impl PyOptimizer {
    #[new]
    #[pyo3(signature = (problem, schedule, estimator="amsgrad", x0=None, seed=0))]
    fn new(
        problem: &PyProblem,
        schedule: &PySchedule,
        estimator: &str,
        x0: Option<Vec<f64>>,
        seed: u64,
    ) -> PyResult<Self> {
        let kind = parse_estimator(estimator)?;
        let state = OptimizerState::init(&problem.inner, &schedule.inner, kind, x0.as_deref(), SeedState::new(seed))
            .map_err(to_py)?;
        Ok(Self {
            state,
            problem: problem.inner.clone(),
            schedule: schedule.inner,
        })
    }

    #[getter]
    fn x(&self) -> Vec<f64> {
        self.state.x().to_vec()
    }

    #[getter]
    fn n(&self) -> u64 {
        self.state.n()
    }

    #[getter]
    fn m(&self) -> Vec<f64> {
        self.state.first().m().to_vec()
    }

    #[getter]
    fn v_hat(&self) -> Vec<f64> {
        self.state.second().v_hat().to_vec()
    }

    /// Advances one step; returns the step's intermediate quantities.
    fn step<'py>(&mut self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let out = self.state.step(&self.problem, &self.schedule).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("x_next", out.x_next)?;
        d.set_item("direction", out.direction)?;
        d.set_item("effective_rates", out.effective_rates)?;
        d.set_item("gradient", out.gradient_used)?;
        d.set_item("m_hat", out.m_hat)?;
        d.set_item("h", out.h)?;
        Ok(d)
    }
}

/// Runs `steps` iterations and returns the recorded trajectory and theory report.
#[pyfunction]
#[pyo3(signature = (problem, schedule, estimator="amsgrad", steps=1000, seed=0, record_every=1, x0=None))]
fn run<'py>(
    py: Python<'py>,
    problem: &PyProblem,
    schedule: &PySchedule,
    estimator: &str,
    steps: u64,
    seed: u64,
    record_every: u64,
    x0: Option<Vec<f64>>,
) -> PyResult<Bound<'py, PyDict>> {
    let kind = parse_estimator(estimator)?;
    let options = RunOptions {
        n_steps: steps,
        seed: SeedState::new(seed),
        record_every,
        x0,
        record_wall_time: false,
    };
    let p = &problem.inner;
    let s = &schedule.inner;
    let record = py.detach(|| adalr_core::run(p, s, kind, &options)).map_err(to_py)?;
    let quantity = if record.f_star.is_some() && !problem.inner.is_online() {
        RateQuantity::AveragedSuboptimality
    } else {
        RateQuantity::AveragedGap
    };
    let report = metrics::BoundReport::from_run(&record, None, quantity).map_err(to_py)?;

    let d = PyDict::new(py);
    d.set_item("n", record.samples.iter().map(|s| s.n).collect::<Vec<_>>())?;
    d.set_item("f_x", record.samples.iter().map(|s| s.f_x).collect::<Vec<_>>())?;
    d.set_item("gap", record.samples.iter().map(|s| s.gap).collect::<Vec<_>>())?;
    d.set_item("avg_gap", record.samples.iter().map(|s| s.avg_gap).collect::<Vec<_>>())?;
    d.set_item("f_xtilde", record.samples.iter().map(|s| s.f_xtilde).collect::<Vec<_>>())?;
    d.set_item("min_eff_rate", record.samples.iter().map(|s| s.min_eff_rate()).collect::<Vec<_>>())?;
    d.set_item("max_eff_rate", record.samples.iter().map(|s| s.max_eff_rate()).collect::<Vec<_>>())?;
    d.set_item("regret", record.samples.iter().map(|s| s.regret).collect::<Vec<_>>())?;
    d.set_item("x_final", record.last().map(|s| s.x.clone()))?;
    d.set_item("x0", record.x0.clone())?;
    d.set_item("f_star", record.f_star)?;
    d.set_item("theorem1_bound", report.theorem1_rhs)?;
    d.set_item("theorem3_bound_final", report.theorem3_rhs.last().map(|p| p.1))?;
    d.set_item("fitted_exponent", report.fitted_rate_exponent)?;
    d.set_item("inv_sqrt_h_bound", report.constants.inv_sqrt_h_bound)?;
    d.set_item("elapsed_secs", record.elapsed_secs)?;
    Ok(d)
}

/// `(estimator, Schedule)` for a catalog preset such as `ADAM-C2`.
#[pyfunction(name = "resolve_preset")]
fn py_resolve_preset(name: &str) -> PyResult<(String, PySchedule)> {
    let p = resolve_preset(name).map_err(to_py)?;
    Ok((p.estimator.to_string(), PySchedule { inner: p.schedule }))
}

#[pyfunction]
fn list_presets() -> Vec<String> {
    preset_catalog().into_iter().map(|p| p.name).collect()
}

/// Limiting-gap lower bound for constant `alpha`, `beta`.
#[pyfunction]
#[pyo3(signature = (alpha, beta, gradient_bound, diameter, min_h, dim, gamma=0.0, m_init_norm=0.0))]
#[allow(clippy::too_many_arguments)]
fn theorem1_bound(
    alpha: f64,
    beta: f64,
    gradient_bound: f64,
    diameter: f64,
    min_h: f64,
    dim: usize,
    gamma: f64,
    m_init_norm: f64,
) -> PyResult<f64> {
    let c = TheoryConstants::new(gradient_bound, m_init_norm, diameter, min_h, beta, gamma, dim).map_err(to_py)?;
    metrics::theorem1_bound(&c, alpha, beta).map_err(to_py)
}

/// `(R(T), R(T)/T)` for incurred losses against a per-step optimum.
#[pyfunction]
fn regret(losses: Vec<f64>, optimal_value: f64) -> PyResult<(f64, f64)> {
    let r = metrics::regret(&losses, optimal_value).map_err(to_py)?;
    Ok((r.total, r.average))
}

#[pymodule]
fn adalr(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySchedule>()?;
    m.add_class::<PyProblem>()?;
    m.add_class::<PyOptimizer>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(py_resolve_preset, m)?)?;
    m.add_function(wrap_pyfunction!(list_presets, m)?)?;
    m.add_function(wrap_pyfunction!(theorem1_bound, m)?)?;
    m.add_function(wrap_pyfunction!(regret, m)?)?;
    Ok(())
}
