//! Belief updating on finite state spaces.
//!
//! Three families of rules share one data model ([`StateSpace`],
//! [`Distribution`], [`Experiment`]):
//!
//! * Bayes rule ([`bayes_update`]);
//! * the two-exponent rule `q ∝ p^α f^β` ([`exponential_update`]);
//! * the minimizer of `D(q‖p) − λ E_q[log f] + μ H(q)` over the simplex
//!   ([`variational_update`]), computed numerically so it can be checked
//!   against the closed forms ([`crosscheck`]).
//!
//! [`grether_fit`] estimates `(α, β)` from observed updates, and
//! [`order_dependence`] measures how sensitive a rule is to the order of
//! signals.

pub mod cli;
pub mod error;
pub mod estimation;
pub mod measures;
pub mod params;
pub mod rng;
pub mod rules;
pub mod sequence;
pub mod space;
pub mod variational;

pub use error::{BeliefError, Result};
pub use estimation::{grether_fit, simulate_dataset, FitResult, UpdateObservation};
pub use measures::{entropy, expectation, relative_entropy};
pub use params::{
    exponents_to_preferences, preferences_to_exponents, ExponentParams, PreferenceParams,
};
pub use rules::{bayes_update, exponential_update, gibbs_from_potential};
pub use sequence::{order_dependence, sequential_update, SignalSequence};
pub use space::{support, Distribution, Experiment, StateSpace};
pub use variational::{
    crosscheck, objective_value, solve_concave, solve_convex, variational_update, ConcaveSolution,
    ObjectiveSpec, SolverConfig, SolverReport,
};
