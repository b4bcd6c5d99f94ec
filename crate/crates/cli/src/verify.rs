//! Self-check suite run by `dznd verify`.

use std::fmt::Write;

use dznd_core::linalg::vec_real;
use dznd_core::problem::central_difference;
use dznd_core::{
    complex_matmul, conjugate, default_pinv_tolerance, example1, example2, kron, pinv,
    scalar_error_modulus, vec, zero_stability_roots, CharacteristicPolynomial, ComplexGain,
    RealMatrix, SplitComplexMatrix,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const VERIFY_SEED: u64 = 20_240_601;

#[derive(Debug, Clone)]
pub struct GroupReport {
    pub name: &'static str,
    pub passed: bool,
    pub details: Vec<String>,
}

impl GroupReport {
    pub fn render(&self) -> String {
        let mut s = format!(
            "[{}] {}\n",
            if self.passed { "PASS" } else { "FAIL" },
            self.name
        );
        for d in &self.details {
            let _ = writeln!(s, "    {d}");
        }
        s
    }
}

fn random_real(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> RealMatrix {
    RealMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

fn random_complex(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> SplitComplexMatrix {
    let re = random_real(rng, rows, cols);
    let im = random_real(rng, rows, cols);
    SplitComplexMatrix::new(re, im).expect("matching shapes")
}

/// `vec(A X B) = (Bᵀ ⊗ A) vec(X)` on random complex triples and the real corollary.
pub fn kron_vec_group(trials: usize) -> GroupReport {
    let mut rng = ChaCha8Rng::seed_from_u64(VERIFY_SEED);
    let mut complex_dev = 0.0_f64;
    let mut real_dev = 0.0_f64;
    for _ in 0..trials {
        let (m, n, s, t) = (
            rng.random_range(1..=3),
            rng.random_range(1..=3),
            rng.random_range(1..=3),
            rng.random_range(1..=3),
        );
        let a = random_complex(&mut rng, m, n);
        let x = random_complex(&mut rng, n, s);
        let b = random_complex(&mut rng, s, t);
        let lhs = vec(&complex_matmul(&complex_matmul(&a, &x).unwrap(), &b).unwrap());
        let op = kron(&conjugate(&b.hermitian_transpose()), &a);
        let rhs = complex_matmul(&op, &vec(&x)).unwrap();
        complex_dev = complex_dev.max(lhs.max_abs_diff(&rhs).unwrap());

        let (a, x, b) = (a.re, x.re, b.re);
        let lhs = vec_real(&a.matmul(&x).unwrap().matmul(&b).unwrap());
        let rhs = b.transpose().kron(&a).matvec(&vec_real(&x)).unwrap();
        real_dev = real_dev.max(
            lhs.sub(&rhs)
                .unwrap()
                .0
                .iter()
                .fold(0.0, |m, v| m.max(v.abs())),
        );
    }
    GroupReport {
        name: "kron-vec identity",
        passed: complex_dev <= 1e-12 && real_dev <= 1e-12,
        details: vec![
            format!(
                "{trials} complex triples up to 3x3: max deviation {complex_dev:e} (limit 1e-12)"
            ),
            format!("{trials} real triples up to 3x3: max deviation {real_dev:e} (limit 1e-12)"),
        ],
    }
}

fn penrose_deviation(w: &RealMatrix, p: &RealMatrix) -> f64 {
    let wp = w.matmul(p).unwrap();
    let pw = p.matmul(w).unwrap();
    [
        wp.matmul(w).unwrap().max_abs_diff(w).unwrap(),
        pw.matmul(p).unwrap().max_abs_diff(p).unwrap(),
        wp.max_abs_diff(&wp.transpose()).unwrap(),
        pw.max_abs_diff(&pw.transpose()).unwrap(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

fn householder(rng: &mut ChaCha8Rng, n: usize) -> RealMatrix {
    let v: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
    let nn: f64 = v.iter().map(|x| x * x).sum();
    RealMatrix::from_fn(n, n, |i, j| {
        f64::from(u8::from(i == j)) - 2.0 * v[i] * v[j] / nn
    })
}

/// Random `rows × cols` matrix of exact rank `rank`.
pub fn rank_deficient_matrix(
    rng: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
    rank: usize,
) -> RealMatrix {
    let s: Vec<f64> = (0..rank).map(|_| rng.random_range(0.5..3.0)).collect();
    let d = RealMatrix::from_fn(
        rows,
        cols,
        |i, j| if i == j && i < rank { s[i] } else { 0.0 },
    );
    householder(rng, rows)
        .matmul(&d)
        .unwrap()
        .matmul(&householder(rng, cols))
        .unwrap()
}

/// Max Penrose deviation over random full-rank and rank-deficient matrices up to 12×12.
pub fn penrose_deviations(trials: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut full = 0.0_f64;
    let mut deficient = 0.0_f64;
    for _ in 0..trials {
        let (r, c) = (rng.random_range(1..=12), rng.random_range(1..=12));
        let w = RealMatrix::from_fn(r, c, |_, _| rng.random_range(-3.0..3.0));
        let p = pinv(&w, default_pinv_tolerance(r, c)).unwrap();
        full = full.max(penrose_deviation(&w, &p));

        let (r, c) = (rng.random_range(2..=12), rng.random_range(2..=12));
        let rank = rng.random_range(1..r.min(c));
        let w = rank_deficient_matrix(&mut rng, r, c, rank);
        let p = pinv(&w, default_pinv_tolerance(r, c)).unwrap();
        deficient = deficient.max(penrose_deviation(&w, &p));
    }
    (full, deficient)
}

pub fn penrose_group(trials: usize) -> GroupReport {
    let (full, deficient) = penrose_deviations(trials, VERIFY_SEED);
    GroupReport {
        name: "Penrose conditions",
        passed: full <= 1e-10 && deficient <= 1e-10,
        details: vec![
            format!("{trials} full-rank matrices up to 12x12: max deviation {full:e} (limit 1e-10)"),
            format!("{trials} rank-deficient matrices up to 12x12: max deviation {deficient:e} (limit 1e-10)"),
        ],
    }
}

/// Equation residual of the closed-form solutions at 101 uniform instants in [0, 10].
pub fn theoretical_residuals() -> Vec<(String, f64)> {
    [example1(), example2()]
        .iter()
        .map(|p| {
            let worst = (0..=100)
                .map(|i| {
                    let tau = f64::from(i) * 0.1;
                    p.equation_residual(&p.solution(tau).unwrap(), tau).unwrap()
                })
                .fold(0.0, f64::max);
            (p.label().to_string(), worst)
        })
        .collect()
}

pub fn theoretical_group() -> GroupReport {
    let res = theoretical_residuals();
    GroupReport {
        name: "theoretical-solution residuals",
        passed: res.iter().all(|(_, r)| *r <= 1e-10),
        details: res
            .iter()
            .map(|(name, r)| format!("{name}: max residual over 101 instants {r:e} (limit 1e-10)"))
            .collect(),
    }
}

/// Analytic coefficient derivatives against central differences.
pub fn derivative_group() -> GroupReport {
    let p = example2();
    let mut worst = 0.0_f64;
    for i in 0..=20 {
        let tau = f64::from(i) * 0.5;
        let analytic = p.derivatives(tau).unwrap();
        let fd = central_difference(&|t| p.coefficients(t).unwrap(), tau, 1e-5);
        for (a, b) in [
            (&analytic.f, &fd.f),
            (&analytic.a, &fd.a),
            (&analytic.c, &fd.c),
        ] {
            worst = worst.max(a.max_abs_diff(b).unwrap());
        }
    }
    GroupReport {
        name: "coefficient derivatives",
        passed: worst <= 1e-6,
        details: vec![format!(
            "{}: analytic vs central difference, max deviation {worst:e} (limit 1e-6)",
            p.label()
        )],
    }
}

fn roots_text(p: &CharacteristicPolynomial) -> String {
    let parts: Vec<String> = p
        .roots()
        .iter()
        .map(|z| format!("{:.6}{:+.6}i", z.re, z.im))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

pub fn stability_group() -> GroupReport {
    let euler = CharacteristicPolynomial::euler_forward();
    let roots = zero_stability_roots();
    let roots_ok =
        roots.len() == 1 && (roots[0].re - 1.0).abs() <= 1e-12 && roots[0].im.abs() <= 1e-12;
    let mut details = vec![format!(
        "Euler forward P(δ) = δ − 1: roots {{{}}}, 0-stable = {}",
        roots
            .iter()
            .map(|z| format!("{}", z.re))
            .collect::<Vec<_>>()
            .join(", "),
        euler.is_zero_stable()
    )];
    let cases = [
        (CharacteristicPolynomial(vec![1.0, -2.0, 1.0]), false),
        (CharacteristicPolynomial(vec![1.0, -0.5]), true),
        (CharacteristicPolynomial(vec![1.0, 0.0, -1.0]), true),
        (CharacteristicPolynomial(vec![1.0, -2.5, 1.0]), false),
    ];
    let mut ok = roots_ok && euler.is_zero_stable();
    for (p, expected) in &cases {
        let got = p.is_zero_stable();
        ok &= got == *expected;
        details.push(format!(
            "{:?}: roots {}, 0-stable = {got} (expected {expected})",
            p.0,
            roots_text(p)
        ));
    }
    GroupReport {
        name: "zero-stability",
        passed: ok,
        details,
    }
}

/// `|1 − εγ|` for the gains and step sizes of the complex-gain study.
pub fn modulus_table() -> Vec<(ComplexGain, f64, f64)> {
    let mut rows = Vec::new();
    for (re, im) in [(10.0, 0.0), (10.0, 20.0), (10.0, -20.0)] {
        let g = ComplexGain::new(re, im).unwrap();
        for eps in [0.1, 0.01, 0.001] {
            rows.push((g, eps, scalar_error_modulus(g, eps)));
        }
    }
    rows
}

pub fn modulus_group() -> GroupReport {
    let table = modulus_table();
    let mut details = vec![format!(
        "{:<8} {:>7} {:>10}  prediction",
        "gamma", "epsilon", "|1-eps*g|"
    )];
    for (g, eps, m) in &table {
        details.push(format!(
            "{:<8} {:>7} {:>10.6}  {}",
            g.to_string(),
            eps,
            m,
            if *m > 1.0 { "diverges" } else { "converges" }
        ));
    }
    let lookup = |im: f64, eps: f64| {
        table
            .iter()
            .find(|(g, e, _)| g.im == im && *e == eps)
            .map(|r| r.2)
            .unwrap()
    };
    let passed = (lookup(20.0, 0.1) - 2.0).abs() <= 1e-12
        && (lookup(-20.0, 0.1) - 2.0).abs() <= 1e-12
        && (lookup(20.0, 0.001) - 0.990202).abs() <= 1e-6
        && (lookup(0.0, 0.1) - 0.0).abs() <= 1e-12;
    GroupReport {
        name: "scalar error modulus",
        passed,
        details,
    }
}

pub fn all_groups() -> Vec<GroupReport> {
    vec![
        kron_vec_group(1000),
        penrose_group(200),
        theoretical_group(),
        derivative_group(),
        stability_group(),
        modulus_group(),
    ]
}
