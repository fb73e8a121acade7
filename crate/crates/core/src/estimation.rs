//! Recovering exponential-rule exponents from observed updates with an
//! intercept-free log-linear regression, and a seeded simulator that
//! produces such data.

use crate::error::{BeliefError, Result};
use crate::measures::softmax_log_weights;
use crate::params::{exponents_to_preferences, ExponentParams, PreferenceParams};
use crate::rng::SplitMix64;
use crate::rules::exponential_update_row;
use crate::space::{check_len, same_space, Distribution, Experiment, StateSpace};

/// Floor applied to simulated prior masses before renormalizing.
pub const PRIOR_FLOOR: f64 = 1e-6;

/// Relative threshold on the normal-equation determinant below which the
/// regressors are treated as collinear.
pub const COLLINEARITY_TOL: f64 = 1e-10;

/// One observed update: prior, likelihood of the realized signal, reported
/// posterior.
#[derive(Clone, Debug, PartialEq)]
pub struct UpdateObservation {
    pub prior: Distribution,
    pub likelihood_row: Vec<f64>,
    pub posterior: Distribution,
}

impl UpdateObservation {
    pub fn new(
        prior: Distribution,
        likelihood_row: Vec<f64>,
        posterior: Distribution,
    ) -> Result<Self> {
        same_space(prior.space(), posterior.space())?;
        check_len("likelihood row", prior.len(), likelihood_row.len())?;
        Ok(Self {
            prior,
            likelihood_row,
            posterior,
        })
    }

    pub fn space(&self) -> &StateSpace {
        self.prior.space()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub residual_sum_squares: f64,
    pub n_equations: usize,
    /// Present only when both estimates are positive.
    pub implied_prefs: Option<PreferenceParams>,
}

/// Stacked regression rows `(log q ratio, log p ratio, log f ratio)` against
/// state 0.
fn log_ratio_rows(index: usize, obs: &UpdateObservation) -> Result<Vec<(f64, f64, f64)>> {
    let columns: [(&str, &[f64]); 3] = [
        ("posterior", obs.posterior.mass()),
        ("prior", obs.prior.mass()),
        ("likelihood", &obs.likelihood_row),
    ];
    for (name, values) in columns {
        if let Some(s) = values.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(BeliefError::BadObservation {
                index,
                reason: format!(
                    "{name} at state {s} is {}, need a positive value",
                    values[s]
                ),
            });
        }
    }
    let (q, p, f) = (obs.posterior.mass(), obs.prior.mass(), &obs.likelihood_row);
    Ok((1..q.len())
        .map(|s| ((q[s] / q[0]).ln(), (p[s] / p[0]).ln(), (f[s] / f[0]).ln()))
        .collect())
}

/// Least squares without intercept of posterior log-ratios on prior and
/// likelihood log-ratios, all taken against state 0.
pub fn grether_fit(observations: &[UpdateObservation]) -> Result<FitResult> {
    let first = observations
        .first()
        .ok_or_else(|| BeliefError::Unidentified("no observations".to_string()))?;
    let mut rows = Vec::new();
    for (i, obs) in observations.iter().enumerate() {
        if obs.space() != first.space() {
            return Err(BeliefError::BadObservation {
                index: i,
                reason: "state space differs from observation 0".to_string(),
            });
        }
        rows.extend(log_ratio_rows(i, obs)?);
    }

    let (mut saa, mut sab, mut sbb, mut say, mut sby) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(y, a, b) in &rows {
        saa += a * a;
        sab += a * b;
        sbb += b * b;
        say += a * y;
        sby += b * y;
    }
    let det = saa * sbb - sab * sab;
    if !(saa > 0.0 && sbb > 0.0) || det <= COLLINEARITY_TOL * saa * sbb {
        return Err(BeliefError::Unidentified(format!(
            "normal equations are singular ({} equations, prior and likelihood log-ratios collinear)",
            rows.len()
        )));
    }
    let alpha_hat = (say * sbb - sby * sab) / det;
    let beta_hat = (saa * sby - sab * say) / det;
    let residual_sum_squares = rows
        .iter()
        .map(|&(y, a, b)| (y - alpha_hat * a - beta_hat * b).powi(2))
        .sum();
    let implied_prefs = ExponentParams::new(alpha_hat, beta_hat)
        .ok()
        .map(exponents_to_preferences);
    Ok(FitResult {
        alpha_hat,
        beta_hat,
        residual_sum_squares,
        n_equations: rows.len(),
        implied_prefs,
    })
}

/// Generates `n` observations from the exponential rule.
///
/// Priors are flat-Dirichlet draws (normalized standard exponentials),
/// floored at [`PRIOR_FLOOR`] and renormalized. Each signal is drawn from
/// its marginal under that prior. With `noise_scale > 0` the posterior
/// log-ratios against state 0 are perturbed by independent Gaussian noise.
/// Output depends only on the arguments.
pub fn simulate_dataset(
    seed: u64,
    space: &StateSpace,
    experiment: &Experiment,
    params: ExponentParams,
    n: usize,
    noise_scale: f64,
) -> Result<Vec<UpdateObservation>> {
    same_space(space, experiment.space())?;
    if n == 0 {
        return Err(BeliefError::InvalidParameter {
            name: "n",
            value: 0.0,
            reason: "must be >= 1",
        });
    }
    if !(noise_scale.is_finite() && noise_scale >= 0.0) {
        return Err(BeliefError::InvalidParameter {
            name: "noise_scale",
            value: noise_scale,
            reason: "must be finite and >= 0",
        });
    }
    let mut rng = SplitMix64::new(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let prior = sample_prior(&mut rng, space);
        let marginal = experiment.marginal(&prior)?;
        let signal = sample_index(&mut rng, &marginal);
        let likelihood_row = experiment.column(signal);
        let mut posterior = exponential_update_row(&prior, &likelihood_row, params)?;
        if noise_scale > 0.0 {
            posterior = perturb(&mut rng, &posterior, noise_scale);
        }
        out.push(UpdateObservation {
            prior,
            likelihood_row,
            posterior,
        });
    }
    Ok(out)
}

fn sample_prior(rng: &mut SplitMix64, space: &StateSpace) -> Distribution {
    let draws: Vec<f64> = (0..space.len()).map(|_| rng.next_exp()).collect();
    let total: f64 = draws.iter().sum();
    let floored: Vec<f64> = draws.iter().map(|d| (d / total).max(PRIOR_FLOOR)).collect();
    let total: f64 = floored.iter().sum();
    let mass = floored.iter().map(|d| d / total).collect();
    Distribution::from_normalized(space.clone(), mass)
}

/// Inverse-CDF draw; never returns an index of zero weight.
fn sample_index(rng: &mut SplitMix64, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let u = rng.next_open01() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last_positive = i;
            if u <= acc {
                return i;
            }
        }
    }
    last_positive
}

fn perturb(rng: &mut SplitMix64, q: &Distribution, scale: f64) -> Distribution {
    let log_q: Vec<f64> = q
        .mass()
        .iter()
        .enumerate()
        .map(|(s, &m)| {
            let l = m.ln();
            if s == 0 {
                l
            } else {
                l + scale * rng.next_normal()
            }
        })
        .collect();
    let mass = softmax_log_weights(&log_q).expect("posterior has positive mass");
    Distribution::from_normalized(q.space().clone(), mass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::bayes_update_row;

    fn space3() -> StateSpace {
        StateSpace::new(["a", "b", "c"]).unwrap()
    }

    fn experiment3() -> Experiment {
        Experiment::new(
            space3(),
            ["x", "y", "z"],
            vec![
                vec![0.7, 0.2, 0.1],
                vec![0.2, 0.5, 0.3],
                vec![0.1, 0.3, 0.6],
            ],
        )
        .unwrap()
    }

    #[test]
    fn noiseless_recovery() {
        let truth = ExponentParams::new(2.0, 0.5).unwrap();
        let data = simulate_dataset(11, &space3(), &experiment3(), truth, 20, 0.0).unwrap();
        let fit = grether_fit(&data).unwrap();
        assert!((fit.alpha_hat - 2.0).abs() < 1e-9);
        assert!((fit.beta_hat - 0.5).abs() < 1e-9);
        assert!(fit.residual_sum_squares < 1e-18);
        assert_eq!(fit.n_equations, 40);
        let prefs = fit.implied_prefs.unwrap();
        assert!((prefs.lambda() - 0.25).abs() < 1e-9);
        assert!((prefs.mu() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn bayes_data_gives_unit_exponents() {
        let data: Vec<UpdateObservation> =
            simulate_dataset(3, &space3(), &experiment3(), ExponentParams::BAYES, 10, 0.0)
                .unwrap()
                .into_iter()
                .map(|o| {
                    let q = bayes_update_row(&o.prior, &o.likelihood_row).unwrap();
                    UpdateObservation::new(o.prior, o.likelihood_row, q).unwrap()
                })
                .collect();
        let fit = grether_fit(&data).unwrap();
        assert!((fit.alpha_hat - 1.0).abs() < 1e-9);
        assert!((fit.beta_hat - 1.0).abs() < 1e-9);
    }

    #[test]
    fn single_two_state_observation_is_unidentified() {
        let s = StateSpace::new(["a", "b"]).unwrap();
        let p = Distribution::new(s.clone(), vec![0.3, 0.7]).unwrap();
        let row = vec![0.6, 0.2];
        let q = exponential_update_row(&p, &row, ExponentParams::new(1.5, 0.7).unwrap()).unwrap();
        let obs = UpdateObservation::new(p, row, q).unwrap();
        assert!(matches!(
            grether_fit(&[obs]),
            Err(BeliefError::Unidentified(_))
        ));
    }

    #[test]
    fn zero_entry_names_observation() {
        let s = StateSpace::new(["a", "b"]).unwrap();
        let p = Distribution::new(s.clone(), vec![0.3, 0.7]).unwrap();
        let good = UpdateObservation::new(p.clone(), vec![0.5, 0.5], p.clone()).unwrap();
        let bad =
            UpdateObservation::new(p, vec![0.5, 0.5], Distribution::dirac(s, 0).unwrap()).unwrap();
        let err = grether_fit(&[good, bad]).unwrap_err();
        assert!(matches!(err, BeliefError::BadObservation { index: 1, .. }));
        assert!(grether_fit(&[]).is_err());
    }

    #[test]
    fn simulation_is_deterministic() {
        let truth = ExponentParams::new(1.3, 0.8).unwrap();
        let a = simulate_dataset(99, &space3(), &experiment3(), truth, 50, 0.1).unwrap();
        let b = simulate_dataset(99, &space3(), &experiment3(), truth, 50, 0.1).unwrap();
        assert_eq!(a, b);
        let c = simulate_dataset(100, &space3(), &experiment3(), truth, 50, 0.1).unwrap();
        assert_ne!(a, c);
        for o in &a {
            assert!(o.prior.mass().iter().all(|&m| m >= PRIOR_FLOOR * 0.5));
        }
    }

    #[test]
    fn noisy_recovery_is_close() {
        let truth = ExponentParams::new(2.0, 0.5).unwrap();
        let data = simulate_dataset(5, &space3(), &experiment3(), truth, 500, 0.05).unwrap();
        let fit = grether_fit(&data).unwrap();
        assert!((fit.alpha_hat - 2.0).abs() < 0.1, "{fit:?}");
        assert!((fit.beta_hat - 0.5).abs() < 0.1, "{fit:?}");
        assert!(fit.residual_sum_squares > 0.0);
    }

    #[test]
    fn simulate_rejects_bad_arguments() {
        let t = ExponentParams::BAYES;
        assert!(simulate_dataset(1, &space3(), &experiment3(), t, 0, 0.0).is_err());
        assert!(simulate_dataset(1, &space3(), &experiment3(), t, 5, -1.0).is_err());
    }
}
