//! Repeated updating on a stream of signals, and how much the final belief
//! depends on the order in which the signals arrive.

use itertools::Itertools;

use crate::error::{BeliefError, Result};
use crate::params::ExponentParams;
use crate::rng::SplitMix64;
use crate::rules::exponential_update_row;
use crate::space::{same_space, Distribution, Experiment};

/// Seed for the permutation sample drawn when enumeration is too large.
pub const PERMUTATION_SEED: u64 = 0x005E_ED0F_0DE5;

/// Signals realized in order from a single experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalSequence {
    experiment: Experiment,
    signals: Vec<String>,
    indices: Vec<usize>,
}

impl SignalSequence {
    pub fn new<I, S>(experiment: Experiment, signals: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let signals: Vec<String> = signals.into_iter().map(Into::into).collect();
        let indices = signals
            .iter()
            .map(|s| experiment.signal_index(s))
            .collect::<Result<_>>()?;
        Ok(Self {
            experiment,
            signals,
            indices,
        })
    }

    pub fn experiment(&self) -> &Experiment {
        &self.experiment
    }

    pub fn signals(&self) -> &[String] {
        &self.signals
    }

    pub fn len(&self) -> usize {
        self.signals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signals.is_empty()
    }
}

/// Left fold of the exponential rule over the sequence.
pub fn sequential_update(
    prior: &Distribution,
    seq: &SignalSequence,
    rule: ExponentParams,
) -> Result<Distribution> {
    same_space(prior.space(), seq.experiment.space())?;
    fold_indices(prior, &seq.experiment, &seq.indices, rule)
}

fn fold_indices(
    prior: &Distribution,
    experiment: &Experiment,
    order: &[usize],
    rule: ExponentParams,
) -> Result<Distribution> {
    order
        .iter()
        .enumerate()
        .try_fold(prior.clone(), |belief, (step, &j)| {
            exponential_update_row(&belief, &experiment.column(j), rule).map_err(|e| {
                BeliefError::Step {
                    step,
                    source: Box::new(e),
                }
            })
        })
}

/// Largest total-variation distance between the folded beliefs of any two
/// orderings of the sequence.
///
/// Every permutation is tried when there are at most `max_permutations` of
/// them; otherwise the identity plus a seeded sample of shuffles, for
/// `max_permutations` orderings in total. Sequences shorter than two
/// signals have no order to vary and yield 0.
pub fn order_dependence(
    prior: &Distribution,
    seq: &SignalSequence,
    rule: ExponentParams,
    max_permutations: usize,
) -> Result<f64> {
    same_space(prior.space(), seq.experiment.space())?;
    if max_permutations == 0 {
        return Err(BeliefError::InvalidParameter {
            name: "max_permutations",
            value: 0.0,
            reason: "must be >= 1",
        });
    }
    let n = seq.len();
    if n < 2 {
        return Ok(0.0);
    }

    let mut orders: Vec<Vec<usize>> = if factorial_at_most(n, max_permutations) {
        seq.indices.iter().copied().permutations(n).collect()
    } else {
        let mut rng = SplitMix64::new(PERMUTATION_SEED);
        let mut orders = vec![seq.indices.clone()];
        while orders.len() < max_permutations {
            let mut order = seq.indices.clone();
            for i in (1..n).rev() {
                order.swap(i, rng.next_below(i + 1));
            }
            orders.push(order);
        }
        orders
    };
    // Repeated signals make many orderings identical.
    orders.sort_unstable();
    orders.dedup();

    let outcomes = orders
        .iter()
        .map(|order| fold_indices(prior, &seq.experiment, order, rule))
        .collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0_f64;
    for (i, a) in outcomes.iter().enumerate() {
        for b in &outcomes[i + 1..] {
            worst = worst.max(a.total_variation(b)?);
        }
    }
    Ok(worst)
}

fn factorial_at_most(n: usize, limit: usize) -> bool {
    let mut acc: usize = 1;
    for k in 2..=n {
        match acc.checked_mul(k) {
            Some(v) if v <= limit => acc = v,
            _ => return false,
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::exponential_update;
    use crate::space::StateSpace;

    fn scenario() -> (Distribution, Experiment) {
        let s = StateSpace::new(["h", "t"]).unwrap();
        let p = Distribution::uniform(s.clone());
        let f = Experiment::new(s, ["x", "y"], vec![vec![0.8, 0.2], vec![0.2, 0.8]]).unwrap();
        (p, f)
    }

    /// Experiment whose `y` column is flat, so `f(y|·) = (0.5, 0.5)`.
    fn flat_y() -> (Distribution, Experiment) {
        let s = StateSpace::new(["h", "t"]).unwrap();
        let p = Distribution::uniform(s.clone());
        let f = Experiment::new(
            s,
            ["x", "y", "z"],
            vec![vec![0.8, 0.1, 0.1], vec![0.2, 0.1, 0.7]],
        )
        .unwrap();
        (p, f)
    }

    #[test]
    fn fold_examples() {
        let (p, f) = flat_y();
        let rule = ExponentParams::new(2.0, 1.0).unwrap();
        let xy = SignalSequence::new(f.clone(), ["x", "y"]).unwrap();
        let yx = SignalSequence::new(f.clone(), ["y", "x"]).unwrap();
        let a = sequential_update(&p, &xy, rule).unwrap();
        let b = sequential_update(&p, &yx, rule).unwrap();
        assert!((a.get(0) - 16.0 / 17.0).abs() < 1e-15);
        assert!((b.get(0) - 0.8).abs() < 1e-15);

        let empty = SignalSequence::new(f, Vec::<String>::new()).unwrap();
        assert_eq!(sequential_update(&p, &empty, rule).unwrap(), p);
    }

    #[test]
    fn single_signal_matches_one_update() {
        let (p, f) = scenario();
        let rule = ExponentParams::new(0.7, 1.9).unwrap();
        let seq = SignalSequence::new(f.clone(), ["y"]).unwrap();
        assert_eq!(
            sequential_update(&p, &seq, rule).unwrap(),
            exponential_update(&p, &f, "y", rule).unwrap()
        );
    }

    #[test]
    fn order_dependence_examples() {
        let (p, f) = flat_y();
        let seq = SignalSequence::new(f.clone(), ["x", "y"]).unwrap();
        let tv = order_dependence(&p, &seq, ExponentParams::new(2.0, 1.0).unwrap(), 100).unwrap();
        assert!((tv - (16.0 / 17.0 - 0.8)).abs() < 1e-12);

        let seq = SignalSequence::new(f.clone(), ["x", "z", "x", "y"]).unwrap();
        let tv = order_dependence(&p, &seq, ExponentParams::new(1.0, 3.0).unwrap(), 100).unwrap();
        assert!(tv <= 1e-12);

        let seq = SignalSequence::new(f, ["x", "x", "x"]).unwrap();
        let tv = order_dependence(&p, &seq, ExponentParams::new(3.0, 1.0).unwrap(), 100).unwrap();
        assert_eq!(tv, 0.0);
    }

    #[test]
    fn sampled_permutations_include_identity() {
        let (p, f) = scenario();
        let rule = ExponentParams::new(2.0, 1.0).unwrap();
        let seq = SignalSequence::new(f, ["x", "y", "y", "x", "y"]).unwrap();
        let full = order_dependence(&p, &seq, rule, 1000).unwrap();
        let sampled = order_dependence(&p, &seq, rule, 5).unwrap();
        assert!(sampled <= full + 1e-15);
        assert_eq!(sampled, order_dependence(&p, &seq, rule, 5).unwrap());
    }

    #[test]
    fn infeasible_step_is_named() {
        let s = StateSpace::new(["h", "t"]).unwrap();
        let p = Distribution::dirac(s.clone(), 0).unwrap();
        let f = Experiment::new(s, ["x", "y"], vec![vec![0.0, 1.0], vec![0.5, 0.5]]).unwrap();
        let seq = SignalSequence::new(f, ["y", "x"]).unwrap();
        let err = sequential_update(&p, &seq, ExponentParams::BAYES).unwrap_err();
        assert!(matches!(err, BeliefError::Step { step: 1, .. }));
    }

    #[test]
    fn unknown_signal_rejected() {
        let (_, f) = scenario();
        assert!(SignalSequence::new(f, ["x", "w"]).is_err());
    }
}
