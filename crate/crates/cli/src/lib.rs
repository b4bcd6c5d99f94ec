//! Experiment runner for the Euler-forward zeroing dynamics solvers.
//!
//! Library half of the `dznd` binary: single runs with CSV/SVG output,
//! parameter sweeps with an empirical order fit, and a self-check suite.

pub mod output;
pub mod sweep;
pub mod verify;

use std::fs;
use std::path::PathBuf;

use dznd_core::problem::{problem_by_name, random_initial_state, PROBLEM_NAMES};
use dznd_core::solver::{DEFAULT_DIVERGENCE_THRESHOLD, DEFAULT_DURATION, DEFAULT_SEED};
use dznd_core::{run, ComplexGain, Model, Problem, SolverConfig, Trajectory};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Solver(#[from] dznd_core::Error),
}

/// Parses `a`, `a+bi` or `a-bi`.
pub fn parse_gamma(text: &str) -> Result<ComplexGain, CliError> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || {
        CliError::Usage(format!(
            "cannot parse gain '{text}', expected a, a+bi or a-bi"
        ))
    };
    let (re, im) = match t.strip_suffix('i') {
        None => (t.parse::<f64>().map_err(|_| bad())?, 0.0),
        Some(body) => {
            // split at the last sign that is not a leading sign or an exponent sign
            let bytes = body.as_bytes();
            let pos = (1..bytes.len())
                .rev()
                .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
                .ok_or_else(bad)?;
            let re = body[..pos].parse::<f64>().map_err(|_| bad())?;
            let im_text = &body[pos..];
            let im = match im_text {
                "+" => 1.0,
                "-" => -1.0,
                _ => im_text.parse::<f64>().map_err(|_| bad())?,
            };
            (re, im)
        }
    };
    ComplexGain::new(re, im).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn lookup_problem(name: &str) -> Result<Problem, CliError> {
    problem_by_name(name).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown problem '{name}', expected one of {}",
            PROBLEM_NAMES.join(", ")
        ))
    })
}

pub fn parse_model(name: &str) -> Result<Model, CliError> {
    name.parse()
        .map_err(|e: dznd_core::Error| CliError::Usage(e.to_string()))
}

/// One fully specified run.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub problem: String,
    pub model: Model,
    pub gamma: ComplexGain,
    pub epsilon: f64,
    pub duration: f64,
    pub seed: u64,
    pub out: PathBuf,
    pub divergence_threshold: f64,
}

impl RunSpec {
    pub fn new(
        problem: &str,
        model: Model,
        gamma: ComplexGain,
        epsilon: f64,
        out: impl Into<PathBuf>,
    ) -> Self {
        Self {
            problem: problem.to_string(),
            model,
            gamma,
            epsilon,
            duration: DEFAULT_DURATION,
            seed: DEFAULT_SEED,
            out: out.into(),
            divergence_threshold: DEFAULT_DIVERGENCE_THRESHOLD,
        }
    }

    pub fn config(&self) -> SolverConfig {
        let mut cfg = SolverConfig::new(self.model, self.gamma, self.epsilon)
            .with_duration(self.duration)
            .with_seed(self.seed);
        cfg.divergence_threshold = self.divergence_threshold;
        cfg
    }

    /// Resolves the problem and validates the configuration.
    pub fn resolve(&self) -> Result<(Problem, SolverConfig), CliError> {
        let problem = lookup_problem(&self.problem)?;
        let cfg = self.config();
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok((problem, cfg))
    }
}

/// Start of the window used for tail statistics.
pub fn tail_start(duration: f64) -> f64 {
    duration / 2.0
}

/// Runs one experiment and writes `trajectory.csv`, `summary.txt` and
/// `residual.svg` into `spec.out`.
pub fn cmd_run(spec: &RunSpec) -> Result<Trajectory, CliError> {
    let (problem, cfg) = spec.resolve()?;
    let initial = random_initial_state(&problem, spec.seed);
    let trajectory = run(&problem, &cfg, &initial)?;

    fs::create_dir_all(&spec.out)?;
    fs::write(
        spec.out.join("trajectory.csv"),
        output::trajectory_csv(&trajectory)?,
    )?;
    fs::write(
        spec.out.join("summary.txt"),
        output::summary(spec, &cfg, &trajectory),
    )?;
    fs::write(
        spec.out.join("residual.svg"),
        output::residual_svg(
            &trajectory,
            spec.duration,
            &format!(
                "{} {} γ={} ε={}",
                spec.problem, spec.model, spec.gamma, spec.epsilon
            ),
        ),
    )?;
    Ok(trajectory)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_forms() {
        let g = parse_gamma("10").unwrap();
        assert_eq!((g.re, g.im), (10.0, 0.0));
        let g = parse_gamma("10+20i").unwrap();
        assert_eq!((g.re, g.im), (10.0, 20.0));
        let g = parse_gamma("10-20i").unwrap();
        assert_eq!((g.re, g.im), (10.0, -20.0));
        let g = parse_gamma(" 1e1 - 2e1i ").unwrap();
        assert_eq!((g.re, g.im), (10.0, -20.0));
        let g = parse_gamma("1e+1+2.5e-1i").unwrap();
        assert_eq!((g.re, g.im), (10.0, 0.25));
        let g = parse_gamma("3+i").unwrap();
        assert_eq!((g.re, g.im), (3.0, 1.0));
    }

    #[test]
    fn gamma_rejects_garbage_and_nonpositive_real_part() {
        for bad in ["", "abc", "10+20j", "20i", "-10", "0+1i", "10+xi"] {
            assert!(matches!(parse_gamma(bad), Err(CliError::Usage(_))), "{bad}");
        }
    }

    #[test]
    fn unresolvable_runs_are_usage_errors() {
        let g = parse_gamma("10").unwrap();
        let spec = RunSpec::new("example9", Model::Dznd1, g, 0.1, "x");
        assert!(matches!(spec.resolve(), Err(CliError::Usage(_))));
        let spec = RunSpec::new("example2", Model::Dznd1, g, 0.3, "x");
        assert!(matches!(spec.resolve(), Err(CliError::Usage(_))));
        assert!(matches!(parse_model("dznd7"), Err(CliError::Usage(_))));
    }
}
