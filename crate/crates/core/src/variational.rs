//! The variational objective
//!
//! ```text
//! F(q) = D(q‖p) − λ·Σ_s q(s) log f(x|s) + μ·H(q)
//! ```
//!
//! and two ways of minimizing it over the simplex: entropic mirror descent
//! when `μ < 1` (strictly convex), and vertex enumeration when `μ ≥ 1`
//! (concave, so a minimum sits at a vertex).
//!
//! The mirror-descent solver never consults the closed-form rules in
//! [`crate::rules`]; [`crosscheck`] compares the two routes.

use crate::error::{BeliefError, Result};
use crate::measures::{entropy, relative_entropy, softmax_log_weights};
use crate::params::{preferences_to_exponents, PreferenceParams};
use crate::rules::exponential_update_row;
use crate::space::{same_space, Distribution, Experiment};

/// Relative tolerance for declaring two vertex scores tied.
pub const TIE_REL_TOL: f64 = 1e-12;

/// A fully specified instance of the variational problem.
#[derive(Clone, Debug)]
pub struct ObjectiveSpec {
    prior: Distribution,
    experiment: Experiment,
    signal: String,
    prefs: PreferenceParams,
    likelihood: Vec<f64>,
}

impl ObjectiveSpec {
    pub fn new(
        prior: Distribution,
        experiment: Experiment,
        signal: impl Into<String>,
        prefs: PreferenceParams,
    ) -> Result<Self> {
        same_space(prior.space(), experiment.space())?;
        let signal = signal.into();
        let likelihood = experiment.likelihood(&signal)?;
        let spec = Self {
            prior,
            experiment,
            signal,
            prefs,
            likelihood,
        };
        if spec.feasible_states().is_empty() {
            return Err(BeliefError::Inconsistent(format!(
                "no state has positive prior and positive likelihood for signal `{}`",
                spec.signal
            )));
        }
        Ok(spec)
    }

    pub fn prior(&self) -> &Distribution {
        &self.prior
    }

    pub fn experiment(&self) -> &Experiment {
        &self.experiment
    }

    pub fn signal(&self) -> &str {
        &self.signal
    }

    pub fn prefs(&self) -> PreferenceParams {
        self.prefs
    }

    /// Same prior, experiment and signal with different preferences.
    pub fn with_prefs(&self, prefs: PreferenceParams) -> Self {
        Self {
            prefs,
            ..self.clone()
        }
    }

    /// `f(x|·)` for the realized signal.
    pub fn likelihood(&self) -> &[f64] {
        &self.likelihood
    }

    /// States with `p(s) > 0` and `f(x|s) > 0`; the objective is finite
    /// exactly on distributions supported here.
    pub fn feasible_states(&self) -> Vec<usize> {
        self.prior
            .mass()
            .iter()
            .zip(&self.likelihood)
            .enumerate()
            .filter(|(_, (&p, &f))| p > 0.0 && f > 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    /// `log p(s) + λ log f(x|s)` on feasible states.
    fn vertex_score(&self, s: usize) -> f64 {
        self.prior.get(s).ln() + self.prefs.lambda() * self.likelihood[s].ln()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    step_size: f64,
    max_iterations: usize,
    convergence_tol: f64,
}

impl SolverConfig {
    pub const DEFAULT_MAX_ITERATIONS: usize = 100_000;
    pub const DEFAULT_TOL: f64 = 1e-13;

    pub fn new(step_size: f64, max_iterations: usize, convergence_tol: f64) -> Result<Self> {
        if !(step_size.is_finite() && step_size > 0.0) {
            return Err(BeliefError::InvalidParameter {
                name: "step_size",
                value: step_size,
                reason: "must be finite and > 0",
            });
        }
        if max_iterations == 0 {
            return Err(BeliefError::InvalidParameter {
                name: "max_iterations",
                value: 0.0,
                reason: "must be > 0",
            });
        }
        if !(convergence_tol.is_finite() && convergence_tol > 0.0) {
            return Err(BeliefError::InvalidParameter {
                name: "convergence_tol",
                value: convergence_tol,
                reason: "must be finite and > 0",
            });
        }
        Ok(Self {
            step_size,
            max_iterations,
            convergence_tol,
        })
    }

    /// Defaults for entropy preference `mu`: step `0.5/max(1, |1−μ|)`,
    /// 100 000 iterations, tolerance `1e-13`.
    pub fn for_mu(mu: f64) -> Self {
        Self {
            step_size: 0.5 / (1.0 - mu).abs().max(1.0),
            max_iterations: Self::DEFAULT_MAX_ITERATIONS,
            convergence_tol: Self::DEFAULT_TOL,
        }
    }

    pub fn step_size(&self) -> f64 {
        self.step_size
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iterations
    }

    pub fn convergence_tol(&self) -> f64 {
        self.convergence_tol
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverReport {
    pub iterations: usize,
    pub final_objective: f64,
    pub converged: bool,
    pub sup_gap_to_closed_form: Option<f64>,
}

/// Minimizers in the concave regime.
#[derive(Clone, Debug, PartialEq)]
pub struct ConcaveSolution {
    /// All states maximizing `p(s)·f(x|s)^λ`, ascending.
    pub maximizers: Vec<usize>,
    /// Dirac on the lowest-index maximizer.
    pub canonical: Distribution,
    pub objective_value: f64,
}

/// Evaluates the objective at `q`. Returns `+inf` when `q` charges a state
/// outside the support of the prior or a state with zero likelihood.
pub fn objective_value(q: &Distribution, spec: &ObjectiveSpec) -> Result<f64> {
    same_space(q.space(), spec.prior.space())?;
    let divergence = relative_entropy(q, &spec.prior)?;
    if divergence.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let mut log_lik = 0.0;
    for (&qs, &fs) in q.mass().iter().zip(&spec.likelihood) {
        if qs > 0.0 {
            if fs == 0.0 {
                return Ok(f64::INFINITY);
            }
            log_lik += qs * fs.ln();
        }
    }
    let prefs = spec.prefs;
    Ok(divergence - prefs.lambda() * log_lik + prefs.mu() * entropy(q))
}

/// Entropic mirror descent on the feasible face of the simplex.
///
/// Each step is `q ← q · exp(−η ∇F(q))`, renormalized, with
/// `∂F/∂q(s) = (1−μ) log q(s) − log p(s) − λ log f(x|s) + (1−μ)`.
/// Iterating yields successive distributions; the starting point is uniform
/// on the feasible states.
#[derive(Clone, Debug)]
pub struct MirrorDescent<'a> {
    spec: &'a ObjectiveSpec,
    step: f64,
    feasible: Vec<usize>,
    // log p(s) + λ log f(x|s) on feasible states
    drift: Vec<f64>,
    log_q: Vec<f64>,
    q: Vec<f64>,
}

impl<'a> MirrorDescent<'a> {
    pub fn new(spec: &'a ObjectiveSpec, step: f64) -> Self {
        let feasible = spec.feasible_states();
        let drift = feasible.iter().map(|&s| spec.vertex_score(s)).collect();
        let k = feasible.len() as f64;
        Self {
            spec,
            step,
            log_q: vec![-k.ln(); feasible.len()],
            q: vec![1.0 / k; feasible.len()],
            feasible,
            drift,
        }
    }

    /// Current iterate as a distribution on the full state space.
    pub fn current(&self) -> Distribution {
        let mut mass = vec![0.0; self.spec.prior.len()];
        for (&s, &qs) in self.feasible.iter().zip(&self.q) {
            mass[s] = qs;
        }
        Distribution::from_normalized(self.spec.prior.space().clone(), mass)
    }

    /// Takes one step; returns the sup-norm change of the iterate.
    pub fn step(&mut self) -> f64 {
        let curvature = 1.0 - self.spec.prefs.mu();
        let proposal: Vec<f64> = self
            .log_q
            .iter()
            .zip(&self.drift)
            .map(|(&lq, &c)| {
                let grad = curvature * lq - c + curvature;
                lq - self.step * grad
            })
            .collect();
        let next = softmax_log_weights(&proposal).expect("feasible set is nonempty");
        let mut change = 0.0_f64;
        for ((lq, q), (&n, &prop)) in self
            .log_q
            .iter_mut()
            .zip(self.q.iter_mut())
            .zip(next.iter().zip(&proposal))
        {
            change = change.max((n - *q).abs());
            *q = n;
            *lq = prop;
        }
        // Keep log_q normalized: subtract log of the partition function.
        let max = self.log_q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_z = max
            + self
                .log_q
                .iter()
                .map(|&l| (l - max).exp())
                .sum::<f64>()
                .ln();
        for lq in &mut self.log_q {
            *lq -= log_z;
        }
        change
    }
}

impl Iterator for MirrorDescent<'_> {
    type Item = Distribution;

    fn next(&mut self) -> Option<Distribution> {
        self.step();
        Some(self.current())
    }
}

/// Minimizes the objective for `μ < 1` by mirror descent.
///
/// Non-convergence within the budget is not an error: the last iterate is
/// returned with `converged = false`.
pub fn solve_convex(
    spec: &ObjectiveSpec,
    config: &SolverConfig,
) -> Result<(Distribution, SolverReport)> {
    if !spec.prefs.is_convex() {
        return Err(BeliefError::DegenerateRegime(spec.prefs.mu()));
    }
    let mut descent = MirrorDescent::new(spec, config.step_size);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iterations {
        let change = descent.step();
        iterations += 1;
        if change < config.convergence_tol {
            converged = true;
            break;
        }
    }
    let q = descent.current();
    let final_objective = objective_value(&q, spec)?;
    Ok((
        q,
        SolverReport {
            iterations,
            final_objective,
            converged,
            sup_gap_to_closed_form: None,
        },
    ))
}

/// Minimizes the objective for `μ ≥ 1` by scoring every vertex of the
/// feasible face with `log p(s) + λ log f(x|s)`.
pub fn solve_concave(spec: &ObjectiveSpec) -> Result<ConcaveSolution> {
    if spec.prefs.is_convex() {
        return Err(BeliefError::InvalidParameter {
            name: "mu",
            value: spec.prefs.mu(),
            reason: "the vertex solver applies only when mu >= 1",
        });
    }
    let scored: Vec<(usize, f64)> = spec
        .feasible_states()
        .into_iter()
        .map(|s| (s, spec.vertex_score(s)))
        .collect();
    let best = scored
        .iter()
        .map(|&(_, v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    // relative shortfall of p·f^λ against the best score
    let maximizers: Vec<usize> = scored
        .iter()
        .filter(|&&(_, v)| -(v - best).exp_m1() <= TIE_REL_TOL)
        .map(|&(s, _)| s)
        .collect();
    let canonical = Distribution::dirac(spec.prior.space().clone(), maximizers[0])?;
    let objective_value = objective_value(&canonical, spec)?;
    Ok(ConcaveSolution {
        maximizers,
        canonical,
        objective_value,
    })
}

/// Solves the variational problem in whichever regime `μ` selects. The
/// boundary `μ = 1` is handled by the vertex solver.
pub fn variational_update(
    spec: &ObjectiveSpec,
    config: &SolverConfig,
) -> Result<(Distribution, SolverReport)> {
    if spec.prefs.is_convex() {
        solve_convex(spec, config)
    } else {
        let solution = solve_concave(spec)?;
        Ok((
            solution.canonical,
            SolverReport {
                iterations: 0,
                final_objective: solution.objective_value,
                converged: true,
                sup_gap_to_closed_form: None,
            },
        ))
    }
}

/// Runs the numerical solver and the closed-form exponential rule on the
/// same problem and records their sup-norm gap.
pub fn crosscheck(spec: &ObjectiveSpec, config: &SolverConfig) -> Result<SolverReport> {
    let (numeric, mut report) = solve_convex(spec, config)?;
    let exponents = preferences_to_exponents(spec.prefs)?;
    let closed = exponential_update_row(&spec.prior, &spec.likelihood, exponents)?;
    report.sup_gap_to_closed_form = Some(numeric.sup_distance(&closed)?);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::StateSpace;

    fn spec(prior: &[f64], lik: &[f64], lambda: f64, mu: f64) -> ObjectiveSpec {
        let labels: Vec<String> = (0..prior.len()).map(|i| format!("s{i}")).collect();
        let space = StateSpace::new(labels).unwrap();
        let p = Distribution::new(space.clone(), prior.to_vec()).unwrap();
        let rows = lik.iter().map(|&f| vec![f, 1.0 - f]).collect();
        let f = Experiment::new(space, ["x", "y"], rows).unwrap();
        ObjectiveSpec::new(p, f, "x", PreferenceParams::new(lambda, mu).unwrap()).unwrap()
    }

    fn standard(lambda: f64, mu: f64) -> ObjectiveSpec {
        spec(&[0.25, 0.75], &[0.8, 0.2], lambda, mu)
    }

    fn assert_close(q: &Distribution, expected: &[f64], tol: f64) {
        for (a, b) in q.mass().iter().zip(expected) {
            assert!((a - b).abs() <= tol, "{:?} vs {:?}", q.mass(), expected);
        }
    }

    #[test]
    fn objective_examples() {
        let s = spec(&[0.25, 0.75], &[0.3, 0.3], 1.0, 0.0);
        let v = objective_value(s.prior(), &s).unwrap();
        assert!((v + 0.3f64.ln()).abs() < 1e-15);

        let s = standard(1.0, 0.0);
        let bayes =
            Distribution::new(s.prior().space().clone(), vec![4.0 / 7.0, 3.0 / 7.0]).unwrap();
        assert!(objective_value(&bayes, &s).unwrap() < objective_value(s.prior(), &s).unwrap());

        let s = spec(&[0.5, 0.5], &[0.0, 0.5], 1.0, 0.0);
        let bad = Distribution::uniform(s.prior().space().clone());
        assert_eq!(objective_value(&bad, &s).unwrap(), f64::INFINITY);

        let s = spec(&[1.0, 0.0], &[0.5, 0.5], 1.0, 0.0);
        let bad = Distribution::uniform(s.prior().space().clone());
        assert_eq!(objective_value(&bad, &s).unwrap(), f64::INFINITY);
    }

    #[test]
    fn convex_examples() {
        let s = standard(1.0, 0.0);
        let (q, r) = solve_convex(&s, &SolverConfig::for_mu(0.0)).unwrap();
        assert!(r.converged);
        assert_close(&q, &[4.0 / 7.0, 3.0 / 7.0], 1e-8);

        let s = standard(2.0, 0.0);
        let (q, _) = solve_convex(&s, &SolverConfig::for_mu(0.0)).unwrap();
        assert_close(&q, &[16.0 / 19.0, 3.0 / 19.0], 1e-8);

        let s = standard(0.25, 0.5);
        let (q, _) = solve_convex(&s, &SolverConfig::for_mu(0.5)).unwrap();
        assert_close(&q, &[2.0 / 11.0, 9.0 / 11.0], 1e-7);
    }

    #[test]
    fn convex_rejects_concave_regime() {
        assert_eq!(
            solve_convex(&standard(1.0, 1.0), &SolverConfig::for_mu(1.0)).unwrap_err(),
            BeliefError::DegenerateRegime(1.0)
        );
    }

    #[test]
    fn exhausted_budget_reports_nonconvergence() {
        let s = standard(1.0, 0.0);
        let config = SolverConfig::new(0.5, 3, 1e-13).unwrap();
        let (q, r) = solve_convex(&s, &config).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 3);
        assert!((q.mass().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_states_stay_zero() {
        let s = spec(&[0.5, 0.0, 0.25, 0.25], &[0.5, 0.5, 0.0, 0.9], 1.5, -0.5);
        let (q, _) = solve_convex(&s, &SolverConfig::for_mu(-0.5)).unwrap();
        assert_eq!(q.get(1), 0.0);
        assert_eq!(q.get(2), 0.0);
        assert!(q.get(0) > 0.0 && q.get(3) > 0.0);
    }

    #[test]
    fn empty_feasible_set_is_rejected() {
        let space = StateSpace::new(["a", "b"]).unwrap();
        let p = Distribution::dirac(space.clone(), 0).unwrap();
        let f = Experiment::new(space, ["x", "y"], vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(
            ObjectiveSpec::new(p, f, "x", PreferenceParams::BAYES),
            Err(BeliefError::Inconsistent(_))
        ));
    }

    #[test]
    fn concave_examples() {
        let sol = solve_concave(&standard(1.0, 1.5)).unwrap();
        assert_eq!(sol.maximizers, vec![0]);
        assert_eq!(sol.canonical.mass(), &[1.0, 0.0]);
        assert!((sol.objective_value + 0.2f64.ln()).abs() < 1e-15);

        let sol = solve_concave(&spec(&[1.0 / 3.0; 3], &[0.4, 0.4, 0.4], 1.0, 2.0)).unwrap();
        assert_eq!(sol.maximizers, vec![0, 1, 2]);

        let sol = solve_concave(&spec(&[0.5, 0.5], &[0.6, 0.4], 2.0, 1.0)).unwrap();
        assert_eq!(sol.maximizers, vec![0]);

        assert!(solve_concave(&standard(1.0, 0.5)).is_err());
    }

    #[test]
    fn dispatch_examples() {
        let s = standard(1.0, 0.999);
        let (q, r) = variational_update(&s, &SolverConfig::for_mu(0.999)).unwrap();
        assert!(r.converged, "{r:?}");
        assert!(q.get(0) >= 0.99);

        let (q, _) = variational_update(&standard(1.0, 0.0), &SolverConfig::for_mu(0.0)).unwrap();
        assert_close(&q, &[4.0 / 7.0, 3.0 / 7.0], 1e-8);

        let (q, r) = variational_update(&standard(1.0, 1.0), &SolverConfig::for_mu(1.0)).unwrap();
        assert_eq!(q.mass(), &[1.0, 0.0]);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn crosscheck_examples() {
        let r = crosscheck(&standard(1.0, 0.0), &SolverConfig::for_mu(0.0)).unwrap();
        assert!(r.sup_gap_to_closed_form.unwrap() < 1e-8);

        let s = spec(&[1.0, 0.0, 0.0], &[0.3, 0.6, 0.9], 0.7, -1.0);
        let r = crosscheck(&s, &SolverConfig::for_mu(-1.0)).unwrap();
        assert_eq!(r.sup_gap_to_closed_form, Some(0.0));
    }

    #[test]
    fn descent_is_monotone() {
        for &(lambda, mu) in &[(1.0, 0.0), (0.3, -2.0), (3.0, 0.9), (1.0, 0.5)] {
            let s = spec(&[0.1, 0.2, 0.3, 0.4], &[0.9, 0.05, 0.5, 0.3], lambda, mu);
            let config = SolverConfig::for_mu(mu);
            let values: Vec<f64> = MirrorDescent::new(&s, config.step_size())
                .take(200)
                .map(|q| objective_value(&q, &s).unwrap())
                .collect();
            for w in values.windows(2) {
                assert!(w[1] <= w[0] + 1e-12, "{lambda} {mu}: {} > {}", w[1], w[0]);
            }
        }
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::new(0.0, 10, 1e-9).is_err());
        assert!(SolverConfig::new(0.1, 0, 1e-9).is_err());
        assert!(SolverConfig::new(0.1, 10, -1.0).is_err());
        assert_eq!(SolverConfig::for_mu(-2.0).step_size(), 0.5 / 3.0);
        assert_eq!(SolverConfig::for_mu(0.9).step_size(), 0.5);
    }
}
