//! Parameters of the exponential updating rule and of the variational
//! objective, and the bijection between them.

use crate::error::{BeliefError, Result};

/// Exponents of the rule `q(s) ∝ p(s)^alpha · f(x|s)^beta`.
///
/// `alpha` weights the prior (below 1: conservatism, above 1: overinference);
/// `beta` weights the evidence (below 1: base-rate neglect, above 1:
/// confirmation bias).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentParams {
    alpha: f64,
    beta: f64,
}

impl ExponentParams {
    pub const BAYES: Self = Self {
        alpha: 1.0,
        beta: 1.0,
    };

    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        positive("beta", beta)?;
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Weights of the variational objective
/// `D(q‖p) − lambda·E_q[log f(x|·)] + mu·H(q)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PreferenceParams {
    lambda: f64,
    mu: f64,
}

impl PreferenceParams {
    pub const BAYES: Self = Self {
        lambda: 1.0,
        mu: 0.0,
    };

    pub fn new(lambda: f64, mu: f64) -> Result<Self> {
        positive("lambda", lambda)?;
        if !mu.is_finite() {
            return Err(BeliefError::InvalidParameter {
                name: "mu",
                value: mu,
                reason: "must be finite",
            });
        }
        Ok(Self { lambda, mu })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// True when the objective is strictly convex (`mu < 1`).
    pub fn is_convex(&self) -> bool {
        self.mu < 1.0
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(BeliefError::InvalidParameter {
            name,
            value,
            reason: "must be finite and > 0",
        })
    }
}

/// `lambda = beta/alpha`, `mu = 1 − 1/alpha`. The image always has `mu < 1`.
pub fn exponents_to_preferences(params: ExponentParams) -> PreferenceParams {
    PreferenceParams {
        lambda: params.beta / params.alpha,
        mu: 1.0 - 1.0 / params.alpha,
    }
}

/// `alpha = 1/(1 − mu)`, `beta = lambda/(1 − mu)`, defined for `mu < 1`.
pub fn preferences_to_exponents(params: PreferenceParams) -> Result<ExponentParams> {
    if !params.is_convex() {
        return Err(BeliefError::DegenerateRegime(params.mu));
    }
    let denom = 1.0 - params.mu;
    ExponentParams::new(1.0 / denom, params.lambda / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_examples() {
        let p = exponents_to_preferences(ExponentParams::BAYES);
        assert_eq!(p, PreferenceParams::BAYES);
        let p = exponents_to_preferences(ExponentParams::new(2.0, 0.5).unwrap());
        assert_eq!((p.lambda(), p.mu()), (0.25, 0.5));
        let p = exponents_to_preferences(ExponentParams::new(0.5, 1.0).unwrap());
        assert_eq!((p.lambda(), p.mu()), (2.0, -1.0));
    }

    #[test]
    fn inverse_examples() {
        let e = preferences_to_exponents(PreferenceParams::BAYES).unwrap();
        assert_eq!(e, ExponentParams::BAYES);
        let e = preferences_to_exponents(PreferenceParams::new(0.25, 0.5).unwrap()).unwrap();
        assert_eq!((e.alpha(), e.beta()), (2.0, 0.5));
        assert_eq!(
            preferences_to_exponents(PreferenceParams::new(1.0, 1.0).unwrap()),
            Err(BeliefError::DegenerateRegime(1.0))
        );
    }

    #[test]
    fn rejects_invalid() {
        assert!(ExponentParams::new(0.0, 1.0).is_err());
        assert!(ExponentParams::new(1.0, -1.0).is_err());
        assert!(ExponentParams::new(f64::NAN, 1.0).is_err());
        assert!(PreferenceParams::new(0.0, 0.0).is_err());
        assert!(PreferenceParams::new(1.0, f64::INFINITY).is_err());
        assert!(PreferenceParams::new(1.0, -5.0).is_ok());
    }
}
