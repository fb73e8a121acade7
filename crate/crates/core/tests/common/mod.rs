#![allow(dead_code)]

use belief_update::{Distribution, Experiment, StateSpace};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn space(n: usize) -> StateSpace {
    StateSpace::new((0..n).map(|i| format!("s{i}"))).unwrap()
}

/// Flat-Dirichlet draw, strictly positive.
pub fn simplex_point<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let draws: Vec<f64> = (0..n)
        .map(|_| -(1.0 - rng.random::<f64>()).ln() + 1e-9)
        .collect();
    let total: f64 = draws.iter().sum();
    let mut out: Vec<f64> = draws.iter().map(|d| d / total).collect();
    // push the rounding residue onto the largest entry
    let residue = 1.0 - out.iter().sum::<f64>();
    let (imax, _) = out.iter().enumerate().fold(
        (0, 0.0),
        |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
    );
    out[imax] += residue;
    out
}

pub fn distribution<R: Rng>(rng: &mut R, space: &StateSpace) -> Distribution {
    let (d, _) =
        Distribution::from_input(space.clone(), &simplex_point(rng, space.len()), "p").unwrap();
    d
}

/// Random prior and experiment with strictly positive entries.
pub struct Scenario {
    pub space: StateSpace,
    pub prior: Distribution,
    pub experiment: Experiment,
    pub signal: String,
}

pub fn scenario<R: Rng>(rng: &mut R, max_states: usize, max_signals: usize) -> Scenario {
    let n = rng.random_range(2..=max_states);
    let m = rng.random_range(2..=max_signals);
    let space = space(n);
    let prior = distribution(rng, &space);
    let rows = (0..n).map(|_| simplex_point(rng, m)).collect::<Vec<_>>();
    let signals: Vec<String> = (0..m).map(|j| format!("x{j}")).collect();
    let (experiment, _) = Experiment::from_input(space.clone(), signals.clone(), &rows).unwrap();
    let signal = signals[rng.random_range(0..m)].clone();
    Scenario {
        space,
        prior,
        experiment,
        signal,
    }
}

/// Normalizes `weights` by direct division; reference route for closed forms.
pub fn normalize(weights: &[f64]) -> Vec<f64> {
    let z: f64 = weights.iter().sum();
    weights.iter().map(|w| w / z).collect()
}

pub fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// `E_q g − H(q)` evaluated term by term.
pub fn free_energy(q: &[f64], g: &[f64]) -> f64 {
    q.iter()
        .zip(g)
        .filter(|(&qs, _)| qs > 0.0)
        .map(|(&qs, &gs)| qs * gs + qs * qs.ln())
        .sum()
}
