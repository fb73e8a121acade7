//! Python bindings for `belief-update`.
//!
//! Distributions and experiments are labelled; parameters are plain floats.
//! Every library error surfaces as `ValueError`.

use belief_update as bu;
use bu::{BeliefError, ObjectiveSpec, SolverConfig, SolverReport, StateSpace};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn py_err(e: BeliefError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Distribution", module = "belief_update", frozen)]
struct PyDistribution {
    inner: bu::Distribution,
}

#[pymethods]
impl PyDistribution {
    /// Inputs within 1e-9 of summing to one are renormalized.
    #[new]
    fn new(states: Vec<String>, mass: Vec<f64>) -> PyResult<Self> {
        let space = StateSpace::new(states).map_err(py_err)?;
        let (inner, _) = bu::Distribution::from_input(space, &mass, "mass").map_err(py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn uniform(states: Vec<String>) -> PyResult<Self> {
        let space = StateSpace::new(states).map_err(py_err)?;
        Ok(Self {
            inner: bu::Distribution::uniform(space),
        })
    }

    #[getter]
    fn states(&self) -> Vec<String> {
        self.inner.space().labels().to_vec()
    }

    #[getter]
    fn mass(&self) -> Vec<f64> {
        self.inner.mass().to_vec()
    }

    fn __getitem__(&self, state: &str) -> PyResult<f64> {
        let i = self
            .inner
            .space()
            .index_of(state)
            .ok_or_else(|| PyValueError::new_err(format!("unknown state `{state}`")))?;
        Ok(self.inner.get(i))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn total_variation(&self, other: &PyDistribution) -> PyResult<f64> {
        self.inner.total_variation(&other.inner).map_err(py_err)
    }

    fn sup_distance(&self, other: &PyDistribution) -> PyResult<f64> {
        self.inner.sup_distance(&other.inner).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        let body: Vec<String> = self
            .inner
            .space()
            .labels()
            .iter()
            .zip(self.inner.mass())
            .map(|(l, m)| format!("{l}: {m}"))
            .collect();
        format!("Distribution({{{}}})", body.join(", "))
    }
}

#[pyclass(name = "Experiment", module = "belief_update", frozen)]
struct PyExperiment {
    inner: bu::Experiment,
}

#[pymethods]
impl PyExperiment {
    /// `rows[i][j]` is the probability of signal `j` in state `i`.
    #[new]
    fn new(states: Vec<String>, signals: Vec<String>, rows: Vec<Vec<f64>>) -> PyResult<Self> {
        let space = StateSpace::new(states).map_err(py_err)?;
        let (inner, _) = bu::Experiment::from_input(space, signals, &rows).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn states(&self) -> Vec<String> {
        self.inner.space().labels().to_vec()
    }

    #[getter]
    fn signals(&self) -> Vec<String> {
        self.inner.signals().to_vec()
    }

    fn likelihood(&self, signal: &str) -> PyResult<Vec<f64>> {
        self.inner.likelihood(signal).map_err(py_err)
    }

    fn marginal(&self, prior: &PyDistribution) -> PyResult<Vec<f64>> {
        self.inner.marginal(&prior.inner).map_err(py_err)
    }
}

fn wrap(inner: bu::Distribution) -> PyDistribution {
    PyDistribution { inner }
}

fn exponents(alpha: f64, beta: f64) -> PyResult<bu::ExponentParams> {
    bu::ExponentParams::new(alpha, beta).map_err(py_err)
}

fn objective(
    prior: &PyDistribution,
    experiment: &PyExperiment,
    signal: &str,
    lam: f64,
    mu: f64,
) -> PyResult<ObjectiveSpec> {
    let prefs = bu::PreferenceParams::new(lam, mu).map_err(py_err)?;
    ObjectiveSpec::new(prior.inner.clone(), experiment.inner.clone(), signal, prefs).map_err(py_err)
}

fn config(mu: f64, tol: Option<f64>, max_iter: Option<usize>) -> PyResult<SolverConfig> {
    let base = SolverConfig::for_mu(mu);
    SolverConfig::new(
        base.step_size(),
        max_iter.unwrap_or(base.max_iterations()),
        tol.unwrap_or(base.convergence_tol()),
    )
    .map_err(py_err)
}

fn report_dict<'py>(py: Python<'py>, r: &SolverReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("iterations", r.iterations)?;
    d.set_item("final_objective", r.final_objective)?;
    d.set_item("converged", r.converged)?;
    d.set_item("gap_to_closed_form", r.sup_gap_to_closed_form)?;
    Ok(d)
}

#[pyfunction]
fn bayes_update(
    prior: &PyDistribution,
    experiment: &PyExperiment,
    signal: &str,
) -> PyResult<PyDistribution> {
    bu::bayes_update(&prior.inner, &experiment.inner, signal)
        .map(wrap)
        .map_err(py_err)
}

#[pyfunction]
fn exponential_update(
    prior: &PyDistribution,
    experiment: &PyExperiment,
    signal: &str,
    alpha: f64,
    beta: f64,
) -> PyResult<PyDistribution> {
    bu::exponential_update(
        &prior.inner,
        &experiment.inner,
        signal,
        exponents(alpha, beta)?,
    )
    .map(wrap)
    .map_err(py_err)
}

/// Returns `(posterior, report)`. For `mu >= 1` the posterior is the Dirac
/// on the lowest-index maximizer and `report["maximizers"]` lists them all.
#[pyfunction]
#[pyo3(signature = (prior, experiment, signal, lam, mu, tol=None, max_iter=None))]
#[allow(clippy::too_many_arguments)]
fn variational_update<'py>(
    py: Python<'py>,
    prior: &PyDistribution,
    experiment: &PyExperiment,
    signal: &str,
    lam: f64,
    mu: f64,
    tol: Option<f64>,
    max_iter: Option<usize>,
) -> PyResult<(PyDistribution, Bound<'py, PyDict>)> {
    let spec = objective(prior, experiment, signal, lam, mu)?;
    if mu < 1.0 {
        let cfg = config(mu, tol, max_iter)?;
        let (q, mut report) = bu::solve_convex(&spec, &cfg).map_err(py_err)?;
        let closed = bu::preferences_to_exponents(spec.prefs())
            .and_then(|e| bu::rules::exponential_update_row(spec.prior(), spec.likelihood(), e))
            .and_then(|c| q.sup_distance(&c))
            .map_err(py_err)?;
        report.sup_gap_to_closed_form = Some(closed);
        let d = report_dict(py, &report)?;
        Ok((wrap(q), d))
    } else {
        let sol = bu::solve_concave(&spec).map_err(py_err)?;
        let labels = prior.inner.space().labels();
        let d = PyDict::new(py);
        d.set_item("iterations", 0)?;
        d.set_item("final_objective", sol.objective_value)?;
        d.set_item("converged", true)?;
        let names: Vec<&str> = sol.maximizers.iter().map(|&i| labels[i].as_str()).collect();
        d.set_item("maximizers", names)?;
        Ok((wrap(sol.canonical), d))
    }
}

#[pyfunction]
fn objective_value(
    q: &PyDistribution,
    prior: &PyDistribution,
    experiment: &PyExperiment,
    signal: &str,
    lam: f64,
    mu: f64,
) -> PyResult<f64> {
    let spec = objective(prior, experiment, signal, lam, mu)?;
    bu::objective_value(&q.inner, &spec).map_err(py_err)
}

#[pyfunction]
fn entropy(q: &PyDistribution) -> f64 {
    bu::entropy(&q.inner)
}

#[pyfunction]
fn relative_entropy(q: &PyDistribution, p: &PyDistribution) -> PyResult<f64> {
    bu::relative_entropy(&q.inner, &p.inner).map_err(py_err)
}

/// `(alpha, beta) -> (lambda, mu)`.
#[pyfunction]
fn exponents_to_preferences(alpha: f64, beta: f64) -> PyResult<(f64, f64)> {
    let p = bu::exponents_to_preferences(exponents(alpha, beta)?);
    Ok((p.lambda(), p.mu()))
}

/// `(lambda, mu) -> (alpha, beta)`; fails for `mu >= 1`.
#[pyfunction]
fn preferences_to_exponents(lam: f64, mu: f64) -> PyResult<(f64, f64)> {
    let prefs = bu::PreferenceParams::new(lam, mu).map_err(py_err)?;
    let e = bu::preferences_to_exponents(prefs).map_err(py_err)?;
    Ok((e.alpha(), e.beta()))
}

#[pyfunction]
fn sequential_update(
    prior: &PyDistribution,
    experiment: &PyExperiment,
    signals: Vec<String>,
    alpha: f64,
    beta: f64,
) -> PyResult<PyDistribution> {
    let seq = bu::SignalSequence::new(experiment.inner.clone(), signals).map_err(py_err)?;
    bu::sequential_update(&prior.inner, &seq, exponents(alpha, beta)?)
        .map(wrap)
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (prior, experiment, signals, alpha, beta, max_permutations=720))]
fn order_dependence(
    prior: &PyDistribution,
    experiment: &PyExperiment,
    signals: Vec<String>,
    alpha: f64,
    beta: f64,
    max_permutations: usize,
) -> PyResult<f64> {
    let seq = bu::SignalSequence::new(experiment.inner.clone(), signals).map_err(py_err)?;
    bu::order_dependence(
        &prior.inner,
        &seq,
        exponents(alpha, beta)?,
        max_permutations,
    )
    .map_err(py_err)
}

type Observation = (Vec<f64>, Vec<f64>, Vec<f64>);

/// Each observation is `(prior, likelihood, posterior)` as float lists over
/// the same states.
#[pyfunction]
fn grether_fit<'py>(
    py: Python<'py>,
    observations: Vec<Observation>,
) -> PyResult<Bound<'py, PyDict>> {
    let n_states = observations.first().map_or(0, |o| o.0.len());
    let space = StateSpace::new((0..n_states).map(|i| format!("s{i}"))).map_err(py_err)?;
    let obs = observations
        .into_iter()
        .map(|(p, f, q)| {
            let (p, _) = bu::Distribution::from_input(space.clone(), &p, "prior")?;
            let (q, _) = bu::Distribution::from_input(space.clone(), &q, "posterior")?;
            bu::UpdateObservation::new(p, f, q)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(py_err)?;
    let fit = bu::grether_fit(&obs).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("alpha_hat", fit.alpha_hat)?;
    d.set_item("beta_hat", fit.beta_hat)?;
    d.set_item("residual_sum_squares", fit.residual_sum_squares)?;
    d.set_item("n_equations", fit.n_equations)?;
    d.set_item("implied_lambda", fit.implied_prefs.map(|p| p.lambda()))?;
    d.set_item("implied_mu", fit.implied_prefs.map(|p| p.mu()))?;
    Ok(d)
}

/// Returns a list of `(prior, likelihood, posterior)` float lists.
#[pyfunction]
#[pyo3(signature = (experiment, alpha, beta, n, seed, noise=0.0))]
fn simulate_dataset(
    experiment: &PyExperiment,
    alpha: f64,
    beta: f64,
    n: usize,
    seed: u64,
    noise: f64,
) -> PyResult<Vec<Observation>> {
    let space = experiment.inner.space().clone();
    let obs = bu::simulate_dataset(
        seed,
        &space,
        &experiment.inner,
        exponents(alpha, beta)?,
        n,
        noise,
    )
    .map_err(py_err)?;
    Ok(obs
        .into_iter()
        .map(|o| {
            (
                o.prior.mass().to_vec(),
                o.likelihood_row.clone(),
                o.posterior.mass().to_vec(),
            )
        })
        .collect())
}

#[pymodule]
#[pyo3(name = "belief_update")]
fn belief_update_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDistribution>()?;
    m.add_class::<PyExperiment>()?;
    m.add_function(wrap_pyfunction!(bayes_update, m)?)?;
    m.add_function(wrap_pyfunction!(exponential_update, m)?)?;
    m.add_function(wrap_pyfunction!(variational_update, m)?)?;
    m.add_function(wrap_pyfunction!(objective_value, m)?)?;
    m.add_function(wrap_pyfunction!(entropy, m)?)?;
    m.add_function(wrap_pyfunction!(relative_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(exponents_to_preferences, m)?)?;
    m.add_function(wrap_pyfunction!(preferences_to_exponents, m)?)?;
    m.add_function(wrap_pyfunction!(sequential_update, m)?)?;
    m.add_function(wrap_pyfunction!(order_dependence, m)?)?;
    m.add_function(wrap_pyfunction!(grether_fit, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_dataset, m)?)?;
    Ok(())
}
