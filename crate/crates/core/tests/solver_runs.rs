//! Whole-trajectory behavior of both discrete models on the built-in problems.

use dznd_core::problem::{example1, example2, random_initial_state, InitialState, Problem};
use dznd_core::{
    run, scalar_error_modulus, ComplexGain, Model, Outcome, SolverConfig, StateVector, Trajectory,
};

fn gain(re: f64, im: f64) -> ComplexGain {
    ComplexGain::new(re, im).unwrap()
}

fn solve(p: &Problem, model: Model, g: ComplexGain, eps: f64, seed: u64) -> Trajectory {
    let cfg = SolverConfig::new(model, g, eps).with_seed(seed);
    run(p, &cfg, &random_initial_state(p, seed)).unwrap()
}

#[test]
fn example1_converges_to_machine_precision() {
    let p = example1();
    let t = solve(&p, Model::Dznd1, gain(10.0, 0.0), 0.001, 42);
    assert_eq!(t.outcome, Outcome::Completed);
    assert_eq!(t.steps.len(), 10_001);
    assert!(t.last().equation_residual <= 1e-8);
}

#[test]
fn complex_gain_large_step_diverges() {
    let p = example2();
    let t = solve(&p, Model::Dznd1, gain(10.0, 20.0), 0.1, 42);
    match t.outcome {
        Outcome::Diverged { at_step } => assert!((at_step as f64) * 0.1 < 10.0),
        Outcome::Completed => panic!("expected divergence"),
    }
    assert!(!t.last().finite || t.last().equation_residual > 1e12);
}

#[test]
fn complex_gain_small_step_tracks_real_gain() {
    let p = example2();
    let real = solve(&p, Model::Dznd1, gain(10.0, 0.0), 0.001, 42);
    let cplx = solve(&p, Model::Dznd1, gain(10.0, 20.0), 0.001, 42);
    assert_eq!(cplx.outcome, Outcome::Completed);
    let ratio = cplx.tail_max_equation_residual(5.0) / real.tail_max_equation_residual(5.0);
    assert!((0.1..=10.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn fixed_point_is_constant_trajectory() {
    let p = example1();
    let star = p.solution(0.0).unwrap();
    let init = InitialState {
        x0: star.clone(),
        seed: 0,
    };
    let s0 = StateVector::from_matrix(&star);
    for model in Model::ALL {
        let cfg = SolverConfig::new(model, gain(10.0, 0.0), 0.1);
        let t = run(&p, &cfg, &init).unwrap();
        assert_eq!(t.steps.len(), 101);
        for r in &t.steps {
            let dev = r
                .state
                .0
                .sub(&s0.0)
                .unwrap()
                .0
                .iter()
                .fold(0.0_f64, |m, v| m.max(v.abs()));
            assert!(dev <= 1e-12, "{model}: step {} moved {dev}", r.k);
        }
    }
}

#[test]
fn divergence_matches_scalar_predictor() {
    for p in [example1(), example2()] {
        for g in [gain(10.0, 0.0), gain(10.0, 20.0), gain(10.0, -20.0)] {
            for eps in [0.1, 0.001] {
                let t = solve(&p, Model::Dznd1, g, eps, 42);
                let predicted = scalar_error_modulus(g, eps) > 1.0;
                let observed = matches!(t.outcome, Outcome::Diverged { .. });
                assert_eq!(observed, predicted, "{} γ={g} ε={eps}", p.label());
            }
        }
    }
}

#[test]
fn models_agree_on_tail_error() {
    let p = example2();
    for eps in [0.1, 0.001] {
        let a = solve(&p, Model::Dznd1, gain(10.0, 0.0), eps, 7);
        let b = solve(&p, Model::Dznd2, gain(10.0, 0.0), eps, 7);
        let ratio =
            a.tail_max_solution_error(5.0).unwrap() / b.tail_max_solution_error(5.0).unwrap();
        assert!((0.1..=10.0).contains(&ratio), "ε={eps}: ratio {ratio}");
    }
}

#[test]
fn runs_are_deterministic() {
    let p = example2();
    let a = solve(&p, Model::Dznd2, gain(10.0, 0.0), 0.01, 3);
    let b = solve(&p, Model::Dznd2, gain(10.0, 0.0), 0.01, 3);
    assert_eq!(a, b);
}

#[test]
fn small_solution_error_implies_small_equation_residual() {
    let p = example2();
    let t = solve(&p, Model::Dznd2, gain(10.0, 0.0), 0.001, 11);
    // ‖E‖ ≤ (‖F‖ + ‖A‖) ‖X − X*‖; both coefficient norms stay below 10 here.
    for r in t.steps.iter().filter(|r| r.tau >= 5.0) {
        let se = r.solution_error.unwrap();
        assert!(r.equation_residual <= 20.0 * se + 1e-12);
    }
}

/// Linearizing the update gives `e_{k+1} = (1 − εγ) e_k + O(ε²)`, so with γ
/// fixed the steady residual is `O(ε²)/(εγ) = O(ε)`, and with `εγ` fixed it
/// is `O(ε²)`. Both regimes are checked.
#[test]
fn steady_residual_order_depends_on_gain_scaling() {
    let p = example2();
    let tail = |g: f64, eps: f64| {
        solve(&p, Model::Dznd1, gain(g, 0.0), eps, 42).tail_max_equation_residual(5.0)
    };

    let fixed_gain = tail(10.0, 0.01) / tail(10.0, 0.001);
    assert!(
        (8.0..=12.0).contains(&fixed_gain),
        "fixed γ ratio {fixed_gain}"
    );

    let fixed_product = tail(10.0, 0.01) / tail(100.0, 0.001);
    assert!(
        (80.0..=120.0).contains(&fixed_product),
        "fixed εγ ratio {fixed_product}"
    );
}

#[test]
fn problem_without_solution_runs() {
    use std::sync::Arc;
    let base = example2();
    let b2 = base.clone();
    let p = Problem::with_finite_difference_derivatives(
        "fd",
        2,
        2,
        Arc::new(move |t| b2.coefficients(t).unwrap()),
        None,
    );
    let cfg = SolverConfig::new(Model::Dznd2, gain(10.0, 0.0), 0.01);
    let t = run(&p, &cfg, &random_initial_state(&p, 1)).unwrap();
    assert_eq!(t.outcome, Outcome::Completed);
    assert!(t.last().solution_error.is_none());
    assert!(t.tail_max_solution_error(5.0).is_none());
    assert!(t.last().equation_residual < 0.05);
}

/// Tail residual ratios between successive decades of ε, with γ fixed at 10.
#[test]
fn steady_residual_ratio_per_decade_is_quadratic() {
    let p = example2();
    let tail = |eps: f64| {
        solve(&p, Model::Dznd1, gain(10.0, 0.0), eps, 42).tail_max_equation_residual(5.0)
    };
    let (r1, r2, r3) = (tail(0.1), tail(0.01), tail(0.001));
    let coarse = r1 / r2;
    let fine = r2 / r3;
    assert!(
        (50.0..=200.0).contains(&coarse) && (50.0..=200.0).contains(&fine),
        "ratios {coarse:.3} and {fine:.3} outside [50, 200]"
    );
}

#[test]
fn finiteness_and_divergence_invariants() {
    for p in [example1(), example2()] {
        for g in [gain(10.0, 0.0), gain(10.0, 20.0)] {
            let cfg = SolverConfig::new(Model::Dznd1, g, 0.1).with_seed(5);
            let t = run(&p, &cfg, &random_initial_state(&p, 5)).unwrap();
            let first_bad = t.steps.iter().position(|r| !r.finite);
            if let Some(i) = first_bad {
                assert!(t.steps[i..].iter().all(|r| !r.finite));
            }
            if let Outcome::Diverged { at_step } = t.outcome {
                assert!(t
                    .steps
                    .iter()
                    .any(|r| !r.finite || r.equation_residual > cfg.divergence_threshold));
                assert_eq!(t.last().k, at_step);
            }
        }
    }
}
