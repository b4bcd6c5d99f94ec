//! File formats for single runs.

use std::fmt::Write;

use dznd_core::{scalar_error_modulus, Outcome, SolverConfig, Trajectory};

use crate::{tail_start, RunSpec};

/// Shortest round-trip representation in scientific notation.
pub fn num(v: f64) -> String {
    format!("{v:e}")
}

fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Header of `trajectory.csv`. State columns follow the stacked state order:
/// real parts column by column, then imaginary parts column by column.
pub fn trajectory_header(m: usize, n: usize) -> Vec<String> {
    let mut cols: Vec<String> = ["step", "tau", "equation_residual", "solution_error"]
        .map(String::from)
        .to_vec();
    for part in ["re", "im"] {
        for t in 1..=n {
            for s in 1..=m {
                cols.push(format!("x_{part}_{s}_{t}"));
            }
        }
    }
    cols
}

pub fn trajectory_csv(traj: &Trajectory) -> csv::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(trajectory_header(traj.m, traj.n))?;
    for r in &traj.steps {
        let mut row = vec![
            r.k.to_string(),
            num(r.tau),
            num(r.equation_residual),
            opt_num(r.solution_error),
        ];
        row.extend(r.state.as_slice().iter().map(|v| num(*v)));
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

/// Tail maximum, `None` when the run stopped before the tail window.
pub fn tail_equation_residual(traj: &Trajectory, from: f64) -> Option<f64> {
    Some(traj.tail_max_equation_residual(from)).filter(|v| *v != f64::NEG_INFINITY)
}

pub fn summary(spec: &RunSpec, cfg: &SolverConfig, traj: &Trajectory) -> String {
    let last = traj.last();
    let k = cfg.validate().unwrap_or(traj.steps.len().saturating_sub(1));
    let modulus = scalar_error_modulus(spec.gamma, spec.epsilon);
    let predicted_divergence = modulus > 1.0;
    let observed_divergence = matches!(traj.outcome, Outcome::Diverged { .. });
    let from = tail_start(spec.duration);

    let mut s = String::new();
    let _ = writeln!(s, "problem: {}", spec.problem);
    let _ = writeln!(s, "model: {}", spec.model);
    let _ = writeln!(s, "gamma: {}", spec.gamma);
    let _ = writeln!(s, "epsilon: {}", spec.epsilon);
    let _ = writeln!(s, "duration: {}", spec.duration);
    let _ = writeln!(s, "k: {k}");
    let _ = writeln!(s, "seed: {}", spec.seed);
    let _ = writeln!(
        s,
        "divergence_threshold: {}",
        num(spec.divergence_threshold)
    );
    match traj.outcome {
        Outcome::Completed => {
            let _ = writeln!(s, "outcome: COMPLETED");
        }
        Outcome::Diverged { at_step } => {
            let _ = writeln!(
                s,
                "outcome: DIVERGED at step {at_step} (tau = {})",
                last.tau
            );
        }
    }
    let _ = writeln!(s, "final_step: {}", last.k);
    let _ = writeln!(
        s,
        "final_equation_residual: {}",
        num(last.equation_residual)
    );
    let _ = writeln!(
        s,
        "final_solution_error: {}",
        last.solution_error.map_or("n/a".into(), num)
    );
    let _ = writeln!(
        s,
        "tail_max_equation_residual (tau >= {from}): {}",
        tail_equation_residual(traj, from).map_or("n/a".into(), num)
    );
    let _ = writeln!(
        s,
        "tail_max_solution_error (tau >= {from}): {}",
        traj.tail_max_solution_error(from).map_or("n/a".into(), num)
    );
    let _ = writeln!(
        s,
        "predicted |1 - eps*gamma|: {modulus} ({})",
        if predicted_divergence {
            "predicts divergence"
        } else {
            "predicts convergence"
        }
    );
    let _ = writeln!(
        s,
        "observed: {} ({})",
        if observed_divergence {
            "diverged"
        } else {
            "converged"
        },
        if predicted_divergence == observed_divergence {
            "matches prediction"
        } else {
            "contradicts prediction"
        }
    );
    s
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 450.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const LOG_FLOOR: f64 = -16.0;
const MAX_POINTS: usize = 2000;

fn log_clamped(v: f64) -> Option<f64> {
    if v.is_nan() {
        None
    } else if v <= 0.0 {
        Some(LOG_FLOOR)
    } else {
        Some(v.log10().max(LOG_FLOOR))
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Standalone line chart of log10 residuals against τ.
pub fn residual_svg(traj: &Trajectory, duration: f64, title: &str) -> String {
    let stride = traj.steps.len().div_ceil(MAX_POINTS).max(1);
    let picked: Vec<_> = traj
        .steps
        .iter()
        .enumerate()
        .filter(|(i, _)| i % stride == 0 || *i + 1 == traj.steps.len())
        .map(|(_, r)| r)
        .collect();

    let eq: Vec<(f64, f64)> = picked
        .iter()
        .filter_map(|r| log_clamped(r.equation_residual).map(|y| (r.tau, y)))
        .collect();
    let sol: Vec<(f64, f64)> = picked
        .iter()
        .filter_map(|r| r.solution_error.and_then(log_clamped).map(|y| (r.tau, y)))
        .collect();

    let ys = eq.iter().chain(&sol).map(|p| p.1).filter(|y| y.is_finite());
    let (lo, hi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| {
        (a.min(y), b.max(y))
    });
    let (mut y0, mut y1) = if lo.is_finite() {
        (lo.floor(), hi.ceil())
    } else {
        (-1.0, 1.0)
    };
    if y1 <= y0 {
        y0 -= 1.0;
        y1 += 1.0;
    }
    let x1 = if duration > 0.0 { duration } else { 1.0 };
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |t: f64| LEFT + pw * (t / x1).clamp(0.0, 1.0);
    let py = |y: f64| TOP + ph * (1.0 - ((y.min(y1) - y0) / (y1 - y0)).clamp(0.0, 1.0));

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );

    let ystep = ((y1 - y0) / 8.0).ceil().max(1.0);
    let mut y = y0;
    while y <= y1 + 1e-9 {
        let yy = py(y);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{yy:.2}" x2="{:.2}" y2="{yy:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{y}</text>"##,
            LEFT + pw,
            LEFT - 6.0,
            yy + 4.0
        );
        y += ystep;
    }
    for i in 0..=5 {
        let t = x1 * f64::from(i) / 5.0;
        let xx = px(t);
        let _ = writeln!(
            s,
            r#"<text x="{xx:.2}" y="{:.2}" text-anchor="middle">{t}</text>"#,
            TOP + ph + 18.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">τ (s)</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">log10 residual</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );

    for (points, color, label, row) in [
        (&eq, "#c0392b", "‖X F − A X̄ − C‖_F", 0.0),
        (&sol, "#2471a3", "‖X − X*‖_F", 1.0),
    ] {
        if points.is_empty() {
            continue;
        }
        let path: Vec<String> = points
            .iter()
            .map(|&(t, y)| format!("{:.2},{:.2}", px(t), py(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            path.join(" ")
        );
        let ly = TOP + 16.0 + 16.0 * row;
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{ly}" x2="{:.2}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{}">{label}</text>"#,
            LEFT + pw - 170.0,
            LEFT + pw - 145.0,
            LEFT + pw - 140.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}
