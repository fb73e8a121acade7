//! Finite state spaces, probability vectors over them, and likelihood tables.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{BeliefError, Result};

/// Tolerance on "sums to one" for vectors produced by this library.
pub const OUTPUT_SUM_TOL: f64 = 1e-12;

/// Tolerance on "sums to one" for hand-written input (renormalized afterwards).
pub const INPUT_SUM_TOL: f64 = 1e-9;

/// Ordered, labeled, finite set of states.
///
/// Cloning is cheap; clones share the label storage. Two spaces are equal
/// when their labels are equal in the same order.
#[derive(Clone)]
pub struct StateSpace {
    labels: Arc<[String]>,
}

impl StateSpace {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels = unique_labels(labels)?;
        if labels.is_empty() {
            return Err(BeliefError::EmptySpace);
        }
        Ok(Self {
            labels: labels.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

impl PartialEq for StateSpace {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.labels, &other.labels) || self.labels == other.labels
    }
}

impl Eq for StateSpace {}

impl fmt::Debug for StateSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("StateSpace").field(&self.labels).finish()
    }
}

fn unique_labels<I, S>(labels: I) -> Result<Vec<String>>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
    let mut seen = HashSet::with_capacity(labels.len());
    for label in &labels {
        if label.is_empty() || !seen.insert(label.as_str()) {
            return Err(BeliefError::BadLabel(label.clone()));
        }
    }
    Ok(labels)
}

/// Checks entries are finite and nonnegative and that they sum to one
/// within `tol`. Returns the sum.
fn check_simplex(field: &str, mass: &[f64], tol: f64) -> Result<f64> {
    for (i, &m) in mass.iter().enumerate() {
        if !m.is_finite() || m < 0.0 {
            return Err(BeliefError::InvalidProbabilities {
                field: field.to_string(),
                reason: format!("entry {i} is {m}"),
            });
        }
    }
    let sum: f64 = mass.iter().sum();
    if (sum - 1.0).abs() > tol {
        return Err(BeliefError::InvalidProbabilities {
            field: field.to_string(),
            reason: format!("entries sum to {sum}, not 1 (tolerance {tol:e})"),
        });
    }
    Ok(sum)
}

/// Divides by the sum; returns the renormalized vector and the largest
/// absolute change to any entry. Vectors already within
/// [`OUTPUT_SUM_TOL`] of unit sum are returned unchanged.
fn renormalize(mass: &[f64], sum: f64) -> (Vec<f64>, f64) {
    if (sum - 1.0).abs() <= OUTPUT_SUM_TOL {
        return (mass.to_vec(), 0.0);
    }
    let out: Vec<f64> = mass.iter().map(|m| m / sum).collect();
    let adjustment = mass
        .iter()
        .zip(&out)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    (out, adjustment)
}

/// A point of the probability simplex over a [`StateSpace`].
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    space: StateSpace,
    mass: Vec<f64>,
}

impl Distribution {
    /// Builds a distribution, requiring the entries to sum to one within
    /// [`OUTPUT_SUM_TOL`]. Entries are stored unchanged.
    pub fn new(space: StateSpace, mass: Vec<f64>) -> Result<Self> {
        check_len("distribution", space.len(), mass.len())?;
        check_simplex("distribution", &mass, OUTPUT_SUM_TOL)?;
        Ok(Self { space, mass })
    }

    /// Validates hand-written input at [`INPUT_SUM_TOL`] and renormalizes.
    /// Returns the distribution and the largest adjustment made.
    pub fn from_input(space: StateSpace, mass: &[f64], field: &str) -> Result<(Self, f64)> {
        check_len(field, space.len(), mass.len())?;
        let sum = check_simplex(field, mass, INPUT_SUM_TOL)?;
        let (mass, adjustment) = renormalize(mass, sum);
        Ok((Self { space, mass }, adjustment))
    }

    pub fn uniform(space: StateSpace) -> Self {
        let n = space.len();
        Self {
            space,
            mass: vec![1.0 / n as f64; n],
        }
    }

    pub fn dirac(space: StateSpace, index: usize) -> Result<Self> {
        if index >= space.len() {
            return Err(BeliefError::LengthMismatch {
                what: "dirac index".into(),
                expected: space.len(),
                got: index,
            });
        }
        let mut mass = vec![0.0; space.len()];
        mass[index] = 1.0;
        Ok(Self { space, mass })
    }

    /// Internal constructor for vectors already normalized by construction.
    pub(crate) fn from_normalized(space: StateSpace, mass: Vec<f64>) -> Self {
        debug_assert_eq!(space.len(), mass.len());
        debug_assert!((mass.iter().sum::<f64>() - 1.0).abs() <= OUTPUT_SUM_TOL);
        Self { space, mass }
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.mass[index]
    }

    pub fn into_mass(self) -> Vec<f64> {
        self.mass
    }

    /// Largest absolute entrywise difference.
    pub fn sup_distance(&self, other: &Distribution) -> Result<f64> {
        same_space(&self.space, &other.space)?;
        Ok(self
            .mass
            .iter()
            .zip(&other.mass)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Half the L1 distance.
    pub fn total_variation(&self, other: &Distribution) -> Result<f64> {
        same_space(&self.space, &other.space)?;
        Ok(0.5
            * self
                .mass
                .iter()
                .zip(&other.mass)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>())
    }
}

/// Indices of states with strictly positive mass. The comparison against
/// zero is exact.
pub fn support(p: &Distribution) -> Vec<usize> {
    p.mass
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > 0.0)
        .map(|(i, _)| i)
        .collect()
}

/// Likelihood table: one distribution over signals per state.
#[derive(Clone, Debug, PartialEq)]
pub struct Experiment {
    space: StateSpace,
    signals: Arc<[String]>,
    // rows[state][signal]
    rows: Vec<Vec<f64>>,
}

impl Experiment {
    /// Builds an experiment, requiring each row to sum to one within
    /// [`OUTPUT_SUM_TOL`].
    pub fn new<I, S>(space: StateSpace, signals: I, rows: Vec<Vec<f64>>) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let signals = unique_labels(signals)?;
        Self::check_shape(&space, &signals, &rows)?;
        for (s, row) in rows.iter().enumerate() {
            check_simplex(&row_field(&space, s), row, OUTPUT_SUM_TOL)?;
        }
        Ok(Self {
            space,
            signals: signals.into(),
            rows,
        })
    }

    /// Validates hand-written rows at [`INPUT_SUM_TOL`] and renormalizes
    /// each. Returns the experiment and the largest adjustment made.
    pub fn from_input<I, S>(space: StateSpace, signals: I, rows: &[Vec<f64>]) -> Result<(Self, f64)>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let signals = unique_labels(signals)?;
        Self::check_shape(&space, &signals, rows)?;
        let mut adjustment = 0.0_f64;
        let mut out = Vec::with_capacity(rows.len());
        for (s, row) in rows.iter().enumerate() {
            let sum = check_simplex(&row_field(&space, s), row, INPUT_SUM_TOL)?;
            let (row, adj) = renormalize(row, sum);
            adjustment = adjustment.max(adj);
            out.push(row);
        }
        Ok((
            Self {
                space,
                signals: signals.into(),
                rows: out,
            },
            adjustment,
        ))
    }

    fn check_shape(space: &StateSpace, signals: &[String], rows: &[Vec<f64>]) -> Result<()> {
        if signals.is_empty() {
            return Err(BeliefError::LengthMismatch {
                what: "signals".into(),
                expected: 1,
                got: 0,
            });
        }
        check_len("likelihood rows", space.len(), rows.len())?;
        for (s, row) in rows.iter().enumerate() {
            check_len(&row_field(space, s), signals.len(), row.len())?;
        }
        Ok(())
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn signals(&self) -> &[String] {
        &self.signals
    }

    pub fn signal_index(&self, signal: &str) -> Result<usize> {
        self.signals
            .iter()
            .position(|l| l == signal)
            .ok_or_else(|| BeliefError::UnknownLabel(signal.to_string()))
    }

    /// The row `f(·|state)` over signals.
    pub fn row(&self, state: usize) -> &[f64] {
        &self.rows[state]
    }

    /// The column `f(signal|·)` over states.
    pub fn likelihood(&self, signal: &str) -> Result<Vec<f64>> {
        let j = self.signal_index(signal)?;
        Ok(self.column(j))
    }

    pub fn column(&self, signal_index: usize) -> Vec<f64> {
        self.rows.iter().map(|row| row[signal_index]).collect()
    }

    /// Marginal probability of each signal under `prior`.
    pub fn marginal(&self, prior: &Distribution) -> Result<Vec<f64>> {
        same_space(&self.space, prior.space())?;
        let mut out = vec![0.0; self.signals.len()];
        for (row, &p) in self.rows.iter().zip(prior.mass()) {
            for (o, &f) in out.iter_mut().zip(row) {
                *o += p * f;
            }
        }
        Ok(out)
    }
}

fn row_field(space: &StateSpace, s: usize) -> String {
    format!("likelihood[{}]", space.labels()[s])
}

pub(crate) fn check_len(what: &str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(BeliefError::LengthMismatch {
            what: what.to_string(),
            expected,
            got,
        });
    }
    Ok(())
}

pub(crate) fn same_space(a: &StateSpace, b: &StateSpace) -> Result<()> {
    if a != b {
        return Err(BeliefError::SpaceMismatch);
    }
    Ok(())
}
