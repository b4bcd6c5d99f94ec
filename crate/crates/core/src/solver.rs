//! Fixed-step Euler-forward integration of the two zeroing dynamics models.
//!
//! Complex-field model:
//! `x_{k+1} = x_k + ε W⁺(τ_k) b(τ_k)` with `(W, b)` from [`assemble_dznd1`].
//!
//! Real-field model:
//! `x_{k+1} = x_k + ε W⁺(τ_k) (ḃ − Ẇ x_k − γ (W x_k − b))` with the blocks from
//! [`assemble_dznd2`].

use std::fmt;
use std::str::FromStr;

use crate::assembly::{assemble_dznd1, assemble_dznd2, ComplexGain, StateVector};
use crate::error::{Error, Result};
use crate::linalg::{default_pinv_tolerance, pinv, RealMatrix, RealVector, SplitComplexMatrix};
use crate::problem::{InitialState, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Model {
    /// Error defined in the complex field.
    Dznd1,
    /// Error defined on the real embedding.
    Dznd2,
}

impl Model {
    pub const ALL: [Model; 2] = [Model::Dznd1, Model::Dznd2];

    pub fn name(&self) -> &'static str {
        match self {
            Model::Dznd1 => "dznd1-2i",
            Model::Dznd2 => "dznd2-2i",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dznd1-2i" | "dznd1" => Ok(Model::Dznd1),
            "dznd2-2i" | "dznd2" => Ok(Model::Dznd2),
            _ => Err(Error::InvalidConfig(vec![format!(
                "unknown model '{s}', expected dznd1-2i or dznd2-2i"
            )])),
        }
    }
}

pub const DEFAULT_DURATION: f64 = 10.0;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_DIVERGENCE_THRESHOLD: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub model: Model,
    pub gamma: ComplexGain,
    /// Step size in seconds, in `(0, 1)`.
    pub epsilon: f64,
    /// Simulated time in seconds; must be an integer multiple of `epsilon`.
    pub duration: f64,
    pub seed: u64,
    /// Relative singular-value cutoff for the pseudo-inverse. `None` uses
    /// [`default_pinv_tolerance`].
    pub pinv_tolerance: Option<f64>,
    /// Equation residual above which a run is declared diverged.
    pub divergence_threshold: f64,
}

impl SolverConfig {
    pub fn new(model: Model, gamma: ComplexGain, epsilon: f64) -> Self {
        Self {
            model,
            gamma,
            epsilon,
            duration: DEFAULT_DURATION,
            seed: DEFAULT_SEED,
            pinv_tolerance: None,
            divergence_threshold: DEFAULT_DIVERGENCE_THRESHOLD,
        }
    }

    pub fn with_duration(mut self, duration: f64) -> Self {
        self.duration = duration;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Checks every invariant and returns the step count `k = duration / ε`.
    pub fn validate(&self) -> Result<usize> {
        let mut problems = Vec::new();
        if let Err(Error::InvalidConfig(msgs)) = self.gamma.validate() {
            problems.extend(msgs);
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            problems.push(format!("epsilon must lie in (0, 1), got {}", self.epsilon));
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            problems.push(format!("duration must be positive, got {}", self.duration));
        }
        if self.model == Model::Dznd2 && !self.gamma.is_real() {
            problems.push(format!(
                "model {} requires a real gain, got {}",
                self.model, self.gamma
            ));
        }
        if let Some(tol) = self.pinv_tolerance {
            if !(tol >= 0.0 && tol.is_finite()) {
                problems.push(format!("pinv tolerance must be nonnegative, got {tol}"));
            }
        }
        if self.divergence_threshold.is_nan() || self.divergence_threshold <= 0.0 {
            problems.push(format!(
                "divergence threshold must be positive, got {}",
                self.divergence_threshold
            ));
        }
        let steps = self.duration / self.epsilon;
        let rounded = steps.round();
        if problems.is_empty() && (steps - rounded).abs() > 1e-9 * rounded.max(1.0) {
            problems.push(format!(
                "duration {} is not an integer multiple of epsilon {} ({} steps)",
                self.duration, self.epsilon, steps
            ));
        }
        if !problems.is_empty() {
            return Err(Error::InvalidConfig(problems));
        }
        Ok(rounded as usize)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub k: usize,
    pub tau: f64,
    pub state: StateVector,
    pub equation_residual: f64,
    /// `None` when the problem has no theoretical solution.
    pub solution_error: Option<f64>,
    pub finite: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Completed,
    Diverged { at_step: usize },
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Completed => f.write_str("COMPLETED"),
            Outcome::Diverged { at_step } => write!(f, "DIVERGED({at_step})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub m: usize,
    pub n: usize,
    pub steps: Vec<StepRecord>,
    pub outcome: Outcome,
}

impl Trajectory {
    pub fn last(&self) -> &StepRecord {
        self.steps
            .last()
            .expect("a trajectory always holds the initial record")
    }

    fn tail(&self, from_tau: f64) -> impl Iterator<Item = &StepRecord> {
        self.steps.iter().filter(move |r| r.tau >= from_tau - 1e-12)
    }

    /// Largest equation residual over records with `τ ≥ from_tau`. NaN wins.
    pub fn tail_max_equation_residual(&self, from_tau: f64) -> f64 {
        nan_max(self.tail(from_tau).map(|r| r.equation_residual))
    }

    /// Largest solution error over records with `τ ≥ from_tau`.
    pub fn tail_max_solution_error(&self, from_tau: f64) -> Option<f64> {
        let mut it = self.tail(from_tau).map(|r| r.solution_error).peekable();
        match it.peek() {
            Some(Some(_)) => Some(nan_max(it.map(|e| e.unwrap_or(f64::NAN)))),
            _ => None,
        }
    }

    pub fn state_matrix(&self, k: usize) -> Result<SplitComplexMatrix> {
        self.steps[k].state.to_matrix(self.m, self.n)
    }
}

fn nan_max(it: impl Iterator<Item = f64>) -> f64 {
    let mut out = f64::NEG_INFINITY;
    for v in it {
        if v.is_nan() {
            return f64::NAN;
        }
        out = out.max(v);
    }
    out
}

/// `|1 − εγ|`, the per-step contraction factor of the entrywise error recursion.
pub fn scalar_error_modulus(gamma: ComplexGain, epsilon: f64) -> f64 {
    (1.0 - epsilon * gamma.re).hypot(epsilon * gamma.im)
}

fn tolerance_for(w: &RealMatrix, pinv_tolerance: Option<f64>) -> f64 {
    pinv_tolerance.unwrap_or_else(|| default_pinv_tolerance(w.rows(), w.cols()))
}

fn advance(
    state: &StateVector,
    epsilon: f64,
    w_pinv: &RealMatrix,
    rhs: &RealVector,
) -> Result<StateVector> {
    Ok(StateVector(state.0.axpy(epsilon, &w_pinv.matvec(rhs)?)?))
}

fn dznd2_rhs(
    w: &RealMatrix,
    b: &RealVector,
    w_dot: &RealMatrix,
    b_dot: &RealVector,
    x: &StateVector,
    gamma: f64,
) -> Result<RealVector> {
    let err = w.matvec(&x.0)?.sub(b)?;
    b_dot.sub(&w_dot.matvec(&x.0)?)?.axpy(-gamma, &err)
}

/// One complex-field step from `τ_k`.
pub fn step_dznd1(
    problem: &Problem,
    state: &StateVector,
    gamma: ComplexGain,
    tau: f64,
    epsilon: f64,
    pinv_tolerance: Option<f64>,
) -> Result<StateVector> {
    let sys = assemble_dznd1(problem, state, gamma, tau)?;
    let w_pinv = pinv(&sys.w, tolerance_for(&sys.w, pinv_tolerance))?;
    advance(state, epsilon, &w_pinv, &sys.b)
}

/// One real-field step from `τ_k`. Only real gains are supported.
pub fn step_dznd2(
    problem: &Problem,
    state: &StateVector,
    gamma: ComplexGain,
    tau: f64,
    epsilon: f64,
    pinv_tolerance: Option<f64>,
) -> Result<StateVector> {
    if !gamma.is_real() {
        return Err(Error::Capability(format!(
            "{} accepts only real gains, got {gamma}",
            Model::Dznd2
        )));
    }
    let sys = assemble_dznd2(problem, tau)?;
    let w_pinv = pinv(&sys.w, tolerance_for(&sys.w, pinv_tolerance))?;
    let rhs = dznd2_rhs(
        &sys.w,
        &sys.b,
        sys.w_dot.as_ref().unwrap(),
        sys.b_dot.as_ref().unwrap(),
        state,
        gamma.re,
    )?;
    advance(state, epsilon, &w_pinv, &rhs)
}

fn record(problem: &Problem, k: usize, tau: f64, state: StateVector) -> Result<StepRecord> {
    let x = state.to_matrix(problem.m(), problem.n())?;
    let equation_residual = problem.equation_residual(&x, tau)?;
    let solution_error = if problem.has_solution() {
        Some(problem.solution_error(&x, tau)?)
    } else {
        None
    };
    let finite = state.is_finite()
        && equation_residual.is_finite()
        && solution_error.is_none_or(f64::is_finite);
    Ok(StepRecord {
        k,
        tau,
        state,
        equation_residual,
        solution_error,
        finite,
    })
}

/// Integrates `problem` from `initial` over `config.duration`.
///
/// Stops early with [`Outcome::Diverged`] once a record is non-finite or its
/// equation residual exceeds the divergence threshold.
pub fn run(problem: &Problem, config: &SolverConfig, initial: &InitialState) -> Result<Trajectory> {
    let steps = config.validate()?;
    let eps = config.epsilon;
    let mut state = StateVector::from_matrix(&initial.x0);
    if state.len() != 2 * problem.m() * problem.n() {
        return Err(Error::Shape {
            op: "run",
            left: initial.x0.shape(),
            right: (problem.m(), problem.n()),
        });
    }

    // W depends only on τ, so constant problems reuse one pseudo-inverse.
    let mut cached_pinv: Option<RealMatrix> = None;
    let mut records = Vec::with_capacity(steps + 1);
    let mut outcome = Outcome::Completed;

    for k in 0..=steps {
        let tau = k as f64 * eps;
        let rec = record(problem, k, tau, state.clone())?;
        let diverged = !rec.finite || rec.equation_residual > config.divergence_threshold;
        records.push(rec);
        if diverged {
            outcome = Outcome::Diverged { at_step: k };
            break;
        }
        if k == steps {
            break;
        }

        state = match config.model {
            Model::Dznd1 => {
                let sys = assemble_dznd1(problem, &state, config.gamma, tau)?;
                let w_pinv = pinv_for(problem, &sys.w, config.pinv_tolerance, &mut cached_pinv)?;
                advance(&state, eps, &w_pinv, &sys.b)?
            }
            Model::Dznd2 => {
                let sys = assemble_dznd2(problem, tau)?;
                let w_pinv = pinv_for(problem, &sys.w, config.pinv_tolerance, &mut cached_pinv)?;
                let rhs = dznd2_rhs(
                    &sys.w,
                    &sys.b,
                    sys.w_dot.as_ref().unwrap(),
                    sys.b_dot.as_ref().unwrap(),
                    &state,
                    config.gamma.re,
                )?;
                advance(&state, eps, &w_pinv, &rhs)?
            }
        };
    }

    Ok(Trajectory {
        m: problem.m(),
        n: problem.n(),
        steps: records,
        outcome,
    })
}

fn pinv_for(
    problem: &Problem,
    w: &RealMatrix,
    tol: Option<f64>,
    cache: &mut Option<RealMatrix>,
) -> Result<RealMatrix> {
    if problem.is_constant() {
        if let Some(p) = cache {
            return Ok(p.clone());
        }
    }
    let p = pinv(w, tolerance_for(w, tol))?;
    if problem.is_constant() {
        *cache = Some(p.clone());
    }
    Ok(p)
}
