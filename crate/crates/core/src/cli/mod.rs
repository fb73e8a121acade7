//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 validation or domain error,
//! 3 solver did not converge. Data goes to the output stream, warnings and
//! errors to the error stream.

pub mod dataset;
pub mod format;
pub mod scenario;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::BeliefError;
use crate::estimation::{grether_fit, simulate_dataset};
use crate::measures::entropy;
use crate::params::{
    exponents_to_preferences, preferences_to_exponents, ExponentParams, PreferenceParams,
};
use crate::rules::{bayes_update, exponential_update};
use crate::sequence::{order_dependence, sequential_update, SignalSequence};
use crate::space::Distribution;
use crate::variational::{
    crosscheck, solve_concave, variational_update, ObjectiveSpec, SolverConfig,
};
use format::sig12;
pub use scenario::{parse_scenario, Rule, Scenario};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Domain(_) => EXIT_DOMAIN,
        }
    }
}

impl From<BeliefError> for CliError {
    fn from(e: BeliefError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

/// Bayesian, exponential and variational belief updating on finite state spaces.
#[derive(Debug, Parser)]
#[command(name = "belief-update", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the posterior under the scenario's rule.
    Update {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Minimize the variational objective numerically and compare with the closed form.
    Solve {
        #[arg(long)]
        scenario: PathBuf,
        /// Convergence tolerance (sup-norm change between iterates).
        #[arg(long)]
        tol: Option<f64>,
        /// Iteration budget.
        #[arg(long = "max-iter")]
        max_iter: Option<usize>,
    },
    /// Solve over a grid of (lambda, mu) preferences.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        /// Grid `a:b:n`: n evenly spaced values from a to b inclusive.
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        /// Grid `c:d:m`: m evenly spaced values from c to d inclusive.
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
    },
    /// Update on a sequence of signals and measure order dependence.
    Sequence {
        #[arg(long)]
        scenario: PathBuf,
        /// Comma-separated signal labels.
        #[arg(long)]
        signals: String,
        /// Maximum number of orderings to compare.
        #[arg(long, default_value_t = 720)]
        permutations: usize,
    },
    /// Fit the exponential rule to a dataset by log-linear least squares.
    Estimate {
        #[arg(long)]
        data: PathBuf,
    },
    /// Simulate a dataset from the exponential rule on the scenario's experiment.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Standard deviation of Gaussian noise on posterior log-ratios.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Parses `argv` (including the program name), runs the command, and
/// returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Update { scenario } => cmd_update(&load(&scenario, err)?, out, err),
        Command::Solve {
            scenario,
            tol,
            max_iter,
        } => cmd_solve(&load(&scenario, err)?, tol, max_iter, out),
        Command::Sweep {
            scenario,
            lambda,
            mu,
        } => cmd_sweep(&load(&scenario, err)?, &lambda, &mu, out, err),
        Command::Sequence {
            scenario,
            signals,
            permutations,
        } => cmd_sequence(&load(&scenario, err)?, &signals, permutations, out),
        Command::Estimate { data } => cmd_estimate(&data, out),
        Command::Simulate {
            scenario,
            alpha,
            beta,
            n,
            seed,
            noise,
            out: path,
        } => cmd_simulate(
            &load(&scenario, err)?,
            alpha,
            beta,
            n,
            seed,
            noise,
            &path,
            out,
        ),
    }
}

fn load(path: &std::path::Path, err: &mut dyn Write) -> Result<Scenario, CliError> {
    let scenario = parse_scenario(path)?;
    for w in &scenario.warnings {
        writeln!(err, "{w}")?;
    }
    Ok(scenario)
}

fn write_posterior(q: &Distribution, out: &mut dyn Write) -> Result<(), CliError> {
    writeln!(out, "state,probability")?;
    for (label, m) in q.space().labels().iter().zip(q.mass()) {
        writeln!(out, "{label},{}", sig12(*m))?;
    }
    Ok(())
}

/// Preferences equivalent to the scenario's rule.
fn scenario_prefs(s: &Scenario) -> PreferenceParams {
    match s.rule {
        Rule::Bayes => PreferenceParams::BAYES,
        Rule::Exponential(e) => exponents_to_preferences(e),
        Rule::Variational(p) => p,
    }
}

fn objective(s: &Scenario, prefs: PreferenceParams) -> Result<ObjectiveSpec, CliError> {
    Ok(ObjectiveSpec::new(
        s.prior.clone(),
        s.experiment.clone(),
        s.realized_signal.clone(),
        prefs,
    )?)
}

fn cmd_update(s: &Scenario, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let q = match s.rule {
        Rule::Bayes => bayes_update(&s.prior, &s.experiment, &s.realized_signal)?,
        Rule::Exponential(e) => exponential_update(&s.prior, &s.experiment, &s.realized_signal, e)?,
        Rule::Variational(p) => {
            let (q, report) = variational_update(&objective(s, p)?, &SolverConfig::for_mu(p.mu()))?;
            if !report.converged {
                writeln!(
                    err,
                    "warning: solver did not converge in {} iterations",
                    report.iterations
                )?;
            }
            q
        }
    };
    write_posterior(&q, out)?;
    Ok(EXIT_OK)
}

fn cmd_solve(
    s: &Scenario,
    tol: Option<f64>,
    max_iter: Option<usize>,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let prefs = scenario_prefs(s);
    let spec = objective(s, prefs)?;
    let defaults = SolverConfig::for_mu(prefs.mu());
    let config = SolverConfig::new(
        defaults.step_size(),
        max_iter.unwrap_or(defaults.max_iterations()),
        tol.unwrap_or(defaults.convergence_tol()),
    )?;
    let (q, report) = variational_update(&spec, &config)?;
    write_posterior(&q, out)?;
    writeln!(out)?;
    writeln!(out, "diagnostic,value")?;
    writeln!(out, "lambda,{}", sig12(prefs.lambda()))?;
    writeln!(out, "mu,{}", sig12(prefs.mu()))?;
    if prefs.is_convex() {
        let check = crosscheck(&spec, &config)?;
        writeln!(out, "regime,convex")?;
        writeln!(out, "iterations,{}", report.iterations)?;
        writeln!(out, "converged,{}", report.converged)?;
        writeln!(out, "final_objective,{}", sig12(report.final_objective))?;
        let gap = check.sup_gap_to_closed_form.unwrap_or(f64::NAN);
        writeln!(out, "gap_to_closed_form,{}", sig12(gap))?;
    } else {
        let solution = solve_concave(&spec)?;
        let labels: Vec<&str> = solution
            .maximizers
            .iter()
            .map(|&i| s.space.labels()[i].as_str())
            .collect();
        writeln!(out, "regime,concave")?;
        writeln!(out, "iterations,0")?;
        writeln!(out, "converged,true")?;
        writeln!(out, "final_objective,{}", sig12(solution.objective_value))?;
        writeln!(out, "maximizers,{}", labels.join(";"))?;
    }
    Ok(if report.converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}

/// Parses `a:b:n` into n evenly spaced points from a to b inclusive.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("invalid grid `{text}`, expected a:b:n"));
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(bad());
    };
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    let width = (b - a) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i == n - 1 { b } else { a + width * i as f64 })
        .collect())
}

fn cmd_sweep(
    s: &Scenario,
    lambda: &str,
    mu: &str,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let lambdas = parse_grid(lambda)?;
    let mus = parse_grid(mu)?;
    let base = objective(s, PreferenceParams::BAYES)?;
    let mut header = vec!["lambda".to_string(), "mu".into(), "regime".into()];
    header.extend(s.space.labels().iter().map(|l| format!("q_{l}")));
    header.push("entropy".into());
    writeln!(out, "{}", header.join(","))?;
    for &l in &lambdas {
        for &m in &mus {
            let prefs = PreferenceParams::new(l, m)?;
            let (q, report) =
                variational_update(&base.with_prefs(prefs), &SolverConfig::for_mu(m))?;
            if !report.converged {
                writeln!(
                    err,
                    "warning: lambda={} mu={} did not converge",
                    sig12(l),
                    sig12(m)
                )?;
            }
            let regime = if prefs.is_convex() {
                "convex"
            } else {
                "concave"
            };
            let mut row = vec![sig12(l), sig12(m), regime.to_string()];
            row.extend(q.mass().iter().map(|&v| sig12(v)));
            row.push(sig12(entropy(&q)));
            writeln!(out, "{}", row.join(","))?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_sequence(
    s: &Scenario,
    signals: &str,
    permutations: usize,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let rule = match s.rule {
        Rule::Bayes => ExponentParams::BAYES,
        Rule::Exponential(e) => e,
        Rule::Variational(p) => preferences_to_exponents(p)?,
    };
    let labels: Vec<&str> = signals
        .split(',')
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect();
    let seq = SignalSequence::new(s.experiment.clone(), labels)?;
    let q = sequential_update(&s.prior, &seq, rule)?;
    let tv = order_dependence(&s.prior, &seq, rule, permutations)?;
    write_posterior(&q, out)?;
    writeln!(out)?;
    writeln!(out, "order_dependence,{}", sig12(tv))?;
    Ok(EXIT_OK)
}

fn cmd_estimate(path: &std::path::Path, out: &mut dyn Write) -> Result<i32, CliError> {
    let file = File::open(path)
        .map_err(|e| CliError::Domain(format!("cannot read dataset {}: {e}", path.display())))?;
    let observations = dataset::read_dataset(file)?;
    let fit = grether_fit(&observations)?;
    writeln!(out, "statistic,value")?;
    writeln!(out, "alpha_hat,{}", sig12(fit.alpha_hat))?;
    writeln!(out, "beta_hat,{}", sig12(fit.beta_hat))?;
    writeln!(
        out,
        "residual_sum_squares,{}",
        sig12(fit.residual_sum_squares)
    )?;
    writeln!(out, "n_equations,{}", fit.n_equations)?;
    match fit.implied_prefs {
        Some(p) => {
            writeln!(out, "implied_lambda,{}", sig12(p.lambda()))?;
            writeln!(out, "implied_mu,{}", sig12(p.mu()))?;
        }
        None => {
            writeln!(out, "implied_lambda,NA")?;
            writeln!(out, "implied_mu,NA")?;
        }
    }
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    s: &Scenario,
    alpha: f64,
    beta: f64,
    n: usize,
    seed: u64,
    noise: f64,
    path: &std::path::Path,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let params = ExponentParams::new(alpha, beta)?;
    let data = simulate_dataset(seed, &s.space, &s.experiment, params, n, noise)?;
    let file = File::create(path)
        .map_err(|e| CliError::Domain(format!("cannot write {}: {e}", path.display())))?;
    let comment = format!("seed={seed} alpha={alpha:?} beta={beta:?} n={n} noise={noise:?}");
    dataset::write_dataset(BufWriter::new(file), &comment, &s.space, &data)?;
    writeln!(out, "wrote {n} observations to {}", path.display())?;
    Ok(EXIT_OK)
}
