//! Closed-form updating rules.

use crate::error::{BeliefError, Result};
use crate::measures::softmax_log_weights;
use crate::params::ExponentParams;
use crate::space::{check_len, same_space, Distribution, Experiment, StateSpace};

/// Bayes rule: `q(s) = f(x|s) p(s) / Σ f(x|s') p(s')`.
pub fn bayes_update(p: &Distribution, f: &Experiment, x: &str) -> Result<Distribution> {
    same_space(p.space(), f.space())?;
    let row = f.likelihood(x)?;
    bayes_update_row(p, &row)
}

/// Bayes rule for an explicit likelihood column `f(x|·)`.
pub fn bayes_update_row(p: &Distribution, likelihood: &[f64]) -> Result<Distribution> {
    check_row(p, likelihood)?;
    let joint: Vec<f64> = p
        .mass()
        .iter()
        .zip(likelihood)
        .map(|(a, b)| a * b)
        .collect();
    let marginal: f64 = joint.iter().sum();
    if marginal > 0.0 && marginal.is_finite() {
        let mass = joint.into_iter().map(|j| j / marginal).collect();
        return Ok(Distribution::from_normalized(p.space().clone(), mass));
    }
    // The marginal may underflow even though some state is feasible.
    exponential_update_row(p, likelihood, ExponentParams::BAYES).map_err(|_| {
        BeliefError::Inconsistent(
            "signal has zero marginal probability under the prior".to_string(),
        )
    })
}

/// Exponential rule: `q(s) ∝ p(s)^alpha · f(x|s)^beta`, normalized in log
/// space. States where `p` or `f(x|·)` is zero get exactly zero.
pub fn exponential_update(
    p: &Distribution,
    f: &Experiment,
    x: &str,
    params: ExponentParams,
) -> Result<Distribution> {
    same_space(p.space(), f.space())?;
    let row = f.likelihood(x)?;
    exponential_update_row(p, &row, params)
}

/// Exponential rule for an explicit likelihood column `f(x|·)`.
pub fn exponential_update_row(
    p: &Distribution,
    likelihood: &[f64],
    params: ExponentParams,
) -> Result<Distribution> {
    check_row(p, likelihood)?;
    let (alpha, beta) = (params.alpha(), params.beta());
    let log_w: Vec<f64> = p
        .mass()
        .iter()
        .zip(likelihood)
        .map(|(&ps, &fs)| {
            if ps == 0.0 || fs == 0.0 {
                f64::NEG_INFINITY
            } else {
                alpha * ps.ln() + beta * fs.ln()
            }
        })
        .collect();
    let mass = softmax_log_weights(&log_w).ok_or_else(|| {
        BeliefError::Inconsistent("every state has zero weight under the signal".to_string())
    })?;
    Ok(Distribution::from_normalized(p.space().clone(), mass))
}

/// Gibbs distribution `q(s) ∝ exp(−g(s))`, the unique minimizer of
/// `E_q g − H(q)`. States with `g(s) = +inf` are excluded.
pub fn gibbs_from_potential(space: &StateSpace, g: &[f64]) -> Result<Distribution> {
    check_len("potential", space.len(), g.len())?;
    let mut log_w = Vec::with_capacity(g.len());
    for (i, &gs) in g.iter().enumerate() {
        if gs.is_nan() || gs == f64::NEG_INFINITY {
            return Err(BeliefError::Inconsistent(format!(
                "potential at state {i} is {gs}"
            )));
        }
        log_w.push(-gs);
    }
    let mass = softmax_log_weights(&log_w)
        .ok_or_else(|| BeliefError::Inconsistent("potential is +inf on every state".to_string()))?;
    Ok(Distribution::from_normalized(space.clone(), mass))
}

fn check_row(p: &Distribution, likelihood: &[f64]) -> Result<()> {
    check_len("likelihood column", p.len(), likelihood.len())?;
    if let Some(i) = likelihood.iter().position(|&f| !f.is_finite() || f < 0.0) {
        return Err(BeliefError::InvalidProbabilities {
            field: "likelihood column".to_string(),
            reason: format!("entry {i} is {}", likelihood[i]),
        });
    }
    Ok(())
}
