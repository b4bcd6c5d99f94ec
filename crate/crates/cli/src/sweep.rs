//! Grid sweeps over (model, γ, ε) and the empirical order fit.

use std::fmt::Write;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use dznd_core::problem::random_initial_state;
use dznd_core::solver::{DEFAULT_DIVERGENCE_THRESHOLD, DEFAULT_DURATION, DEFAULT_SEED};
use dznd_core::{run, ComplexGain, Model, Outcome};
use rayon::prelude::*;

use crate::output::{num, tail_equation_residual};
use crate::{lookup_problem, tail_start, CliError, RunSpec};

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub problem: String,
    pub models: Vec<Model>,
    pub gammas: Vec<ComplexGain>,
    pub epsilons: Vec<f64>,
    pub duration: f64,
    pub seed: u64,
    pub out: PathBuf,
    pub divergence_threshold: f64,
}

impl SweepSpec {
    pub fn new(problem: &str, out: impl Into<PathBuf>) -> Self {
        Self {
            problem: problem.to_string(),
            models: Vec::new(),
            gammas: Vec::new(),
            epsilons: Vec::new(),
            duration: DEFAULT_DURATION,
            seed: DEFAULT_SEED,
            out: out.into(),
            divergence_threshold: DEFAULT_DIVERGENCE_THRESHOLD,
        }
    }

    fn points(&self) -> Vec<RunSpec> {
        let mut pts = Vec::new();
        for &model in &self.models {
            for &gamma in &self.gammas {
                for &epsilon in &self.epsilons {
                    let mut spec = RunSpec::new(&self.problem, model, gamma, epsilon, &self.out);
                    spec.duration = self.duration;
                    spec.seed = self.seed;
                    spec.divergence_threshold = self.divergence_threshold;
                    pts.push(spec);
                }
            }
        }
        pts
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowOutcome {
    Completed,
    Diverged { at_step: usize },
    Failed(String),
}

impl RowOutcome {
    pub fn label(&self) -> String {
        match self {
            RowOutcome::Completed => "COMPLETED".into(),
            RowOutcome::Diverged { at_step } => format!("DIVERGED({at_step})"),
            RowOutcome::Failed(_) => "FAILED".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub model: Model,
    pub gamma: ComplexGain,
    pub epsilon: f64,
    pub outcome: RowOutcome,
    pub tail_max_equation_residual: Option<f64>,
    pub tail_max_solution_error: Option<f64>,
    pub steps: Option<usize>,
    pub wall_time_seconds: f64,
}

/// Least-squares slope of `ln(tail residual)` against `ln ε` for one `(model, γ)` group.
#[derive(Debug, Clone)]
pub struct OrderFit {
    pub model: Model,
    pub gamma: ComplexGain,
    pub points: usize,
    pub equation_slope: Option<f64>,
    pub solution_slope: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub fits: Vec<OrderFit>,
}

impl SweepReport {
    pub fn fit(&self, model: Model, gamma: ComplexGain) -> Option<&OrderFit> {
        self.fits
            .iter()
            .find(|f| f.model == model && f.gamma == gamma)
    }
}

/// Ordinary least-squares slope of `y` on `x`. `None` for fewer than two
/// distinct abscissae or non-finite input.
pub fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

const MIN_FIT_POINTS: usize = 3;

fn run_point(spec: &RunSpec) -> SweepRow {
    let started = Instant::now();
    let mut row = SweepRow {
        model: spec.model,
        gamma: spec.gamma,
        epsilon: spec.epsilon,
        outcome: RowOutcome::Completed,
        tail_max_equation_residual: None,
        tail_max_solution_error: None,
        steps: None,
        wall_time_seconds: 0.0,
    };
    let result = spec.resolve().and_then(|(problem, cfg)| {
        let initial = random_initial_state(&problem, spec.seed);
        run(&problem, &cfg, &initial).map_err(CliError::from)
    });
    match result {
        Ok(traj) => {
            let from = tail_start(spec.duration);
            row.outcome = match traj.outcome {
                Outcome::Completed => RowOutcome::Completed,
                Outcome::Diverged { at_step } => RowOutcome::Diverged { at_step },
            };
            row.tail_max_equation_residual = tail_equation_residual(&traj, from);
            row.tail_max_solution_error = traj.tail_max_solution_error(from);
            row.steps = Some(traj.last().k);
        }
        Err(e) => row.outcome = RowOutcome::Failed(e.to_string()),
    }
    row.wall_time_seconds = started.elapsed().as_secs_f64();
    row
}

fn sort_key(r: &SweepRow) -> (usize, f64, f64, f64) {
    let model = Model::ALL
        .iter()
        .position(|m| *m == r.model)
        .unwrap_or(usize::MAX);
    (model, r.gamma.re, r.gamma.im, r.epsilon)
}

fn fit_groups(rows: &[SweepRow]) -> Vec<OrderFit> {
    let mut fits: Vec<OrderFit> = Vec::new();
    for r in rows {
        if fits
            .iter()
            .any(|f| f.model == r.model && f.gamma == r.gamma)
        {
            continue;
        }
        let mut eq = Vec::new();
        let mut sol = Vec::new();
        let mut seen: Vec<f64> = Vec::new();
        for g in rows.iter().filter(|g| {
            g.model == r.model && g.gamma == r.gamma && g.outcome == RowOutcome::Completed
        }) {
            if seen.contains(&g.epsilon) {
                continue;
            }
            seen.push(g.epsilon);
            if let Some(v) = g.tail_max_equation_residual {
                eq.push((g.epsilon.ln(), v.ln()));
            }
            if let Some(v) = g.tail_max_solution_error {
                sol.push((g.epsilon.ln(), v.ln()));
            }
        }
        let enough = seen.len() >= MIN_FIT_POINTS;
        fits.push(OrderFit {
            model: r.model,
            gamma: r.gamma,
            points: seen.len(),
            equation_slope: if enough {
                least_squares_slope(&eq)
            } else {
                None
            },
            solution_slope: if enough && sol.len() == seen.len() {
                least_squares_slope(&sol)
            } else {
                None
            },
        });
    }
    fits
}

/// Runs the grid in parallel. Single-run failures become rows.
pub fn sweep(spec: &SweepSpec) -> Result<SweepReport, CliError> {
    lookup_problem(&spec.problem)?;
    let points = spec.points();
    if points.is_empty() {
        return Err(CliError::Usage(
            "sweep needs at least one model, gamma and epsilon".into(),
        ));
    }
    let mut rows: Vec<SweepRow> = points.par_iter().map(run_point).collect();
    rows.sort_by(|a, b| {
        sort_key(a)
            .partial_cmp(&sort_key(b))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let fits = fit_groups(&rows);
    Ok(SweepReport { rows, fits })
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// `sweep.csv`. Wall time is left out so the file is reproducible.
pub fn sweep_csv(report: &SweepReport) -> csv::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "model",
        "gamma",
        "epsilon",
        "outcome",
        "tail_max_equation_residual",
        "tail_max_solution_error",
        "steps",
    ])?;
    for r in &report.rows {
        w.write_record([
            r.model.to_string(),
            r.gamma.to_string(),
            num(r.epsilon),
            r.outcome.label(),
            opt(r.tail_max_equation_residual),
            opt(r.tail_max_solution_error),
            r.steps.map(|k| k.to_string()).unwrap_or_default(),
        ])?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

fn slope_text(v: Option<f64>) -> String {
    v.map_or("-".into(), |s| format!("{s:.4}"))
}

pub fn order_report(spec: &SweepSpec, report: &SweepReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "problem: {}", spec.problem);
    let _ = writeln!(s, "duration: {}", spec.duration);
    let _ = writeln!(s, "seed: {}", spec.seed);
    let _ = writeln!(s, "tail window: tau >= {}", tail_start(spec.duration));
    let _ = writeln!(s, "slope: least squares of ln(tail max) on ln(epsilon), COMPLETED runs, >= {MIN_FIT_POINTS} step sizes");
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "{:<10} {:<10} {:>6} {:>14} {:>14}",
        "model", "gamma", "points", "slope_eq_res", "slope_sol_err"
    );
    for f in &report.fits {
        let _ = writeln!(
            s,
            "{:<10} {:<10} {:>6} {:>14} {:>14}",
            f.model.name(),
            f.gamma.to_string(),
            f.points,
            slope_text(f.equation_slope),
            slope_text(f.solution_slope)
        );
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "runs:");
    for r in &report.rows {
        let _ = write!(
            s,
            "  {} gamma={} epsilon={} {} tail_eq={} wall_time_seconds={:.3}",
            r.model,
            r.gamma,
            r.epsilon,
            r.outcome.label(),
            r.tail_max_equation_residual.map_or("-".into(), num),
            r.wall_time_seconds
        );
        if let RowOutcome::Failed(msg) = &r.outcome {
            let _ = write!(s, " error: {msg}");
        }
        s.push('\n');
    }
    s
}

/// Runs the sweep and writes `sweep.csv` and `order_report.txt`.
pub fn cmd_sweep(spec: &SweepSpec) -> Result<SweepReport, CliError> {
    let report = sweep(spec)?;
    fs::create_dir_all(&spec.out)?;
    fs::write(spec.out.join("sweep.csv"), sweep_csv(&report)?)?;
    fs::write(
        spec.out.join("order_report.txt"),
        order_report(spec, &report),
    )?;
    Ok(report)
}
