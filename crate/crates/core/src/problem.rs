//! Time-variant Sylvester-conjugate problems `X F − A X̄ − C = 0`.

use std::fmt;
use std::sync::Arc;

use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{complex_matmul, conjugate, frobenius_norm, RealMatrix, SplitComplexMatrix};

/// Coefficients `(F, A, C)` or their time derivatives at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    /// n × n
    pub f: SplitComplexMatrix,
    /// m × m
    pub a: SplitComplexMatrix,
    /// m × n
    pub c: SplitComplexMatrix,
}

pub type CoefficientFn = Arc<dyn Fn(f64) -> Coefficients + Send + Sync>;
pub type SolutionFn = Arc<dyn Fn(f64) -> SplitComplexMatrix + Send + Sync>;

/// Half-width of the central difference used by [`Problem::with_finite_difference_derivatives`].
pub const FD_STEP: f64 = 1e-6;

/// A time-variant standard Sylvester-conjugate matrix equation.
///
/// Providers must be pure functions of `τ ≥ 0`.
#[derive(Clone)]
pub struct Problem {
    label: String,
    m: usize,
    n: usize,
    coefficients: CoefficientFn,
    derivatives: CoefficientFn,
    solution: Option<SolutionFn>,
    constant: bool,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("label", &self.label)
            .field("m", &self.m)
            .field("n", &self.n)
            .field("has_solution", &self.solution.is_some())
            .finish()
    }
}

impl Problem {
    pub fn new(
        label: impl Into<String>,
        m: usize,
        n: usize,
        coefficients: CoefficientFn,
        derivatives: CoefficientFn,
        solution: Option<SolutionFn>,
    ) -> Self {
        Self {
            label: label.into(),
            m,
            n,
            coefficients,
            derivatives,
            solution,
            constant: false,
        }
    }

    /// Builds a problem whose derivatives come from central differences of the
    /// coefficients. The difference error (about `FD_STEP²`) is folded into
    /// every step, so this limits the attainable residual floor.
    pub fn with_finite_difference_derivatives(
        label: impl Into<String>,
        m: usize,
        n: usize,
        coefficients: CoefficientFn,
        solution: Option<SolutionFn>,
    ) -> Self {
        let coeff = coefficients.clone();
        let derivatives: CoefficientFn =
            Arc::new(move |tau| central_difference(&*coeff, tau, FD_STEP));
        Self::new(label, m, n, coefficients, derivatives, solution)
    }

    /// Marks the coefficients as constant in time; solvers may then reuse
    /// assembled systems across steps.
    pub fn constant(mut self) -> Self {
        self.constant = true;
        self
    }

    pub fn is_constant(&self) -> bool {
        self.constant
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Rows of the unknown.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Columns of the unknown.
    pub fn n(&self) -> usize {
        self.n
    }

    /// `F`, `A`, `C` at `τ`, checked against the declared dimensions.
    pub fn coefficients(&self, tau: f64) -> Result<Coefficients> {
        let c = (self.coefficients)(tau);
        self.check_shapes(&c)?;
        Ok(c)
    }

    /// `Ḟ`, `Ȧ`, `Ċ` at `τ`.
    pub fn derivatives(&self, tau: f64) -> Result<Coefficients> {
        let d = (self.derivatives)(tau);
        self.check_shapes(&d)?;
        Ok(d)
    }

    pub fn has_solution(&self) -> bool {
        self.solution.is_some()
    }

    /// Theoretical solution `X*(τ)`, if known.
    pub fn solution(&self, tau: f64) -> Result<SplitComplexMatrix> {
        let sol = self.solution.as_ref().ok_or_else(|| {
            Error::Capability(format!(
                "problem '{}' has no theoretical solution",
                self.label
            ))
        })?;
        let x = sol(tau);
        self.check_unknown(&x, "solution")?;
        Ok(x)
    }

    fn check_shapes(&self, c: &Coefficients) -> Result<()> {
        let expect = [
            ("provider F", c.f.shape(), (self.n, self.n)),
            ("provider A", c.a.shape(), (self.m, self.m)),
            ("provider C", c.c.shape(), (self.m, self.n)),
        ];
        for (op, got, want) in expect {
            if got != want {
                return Err(Error::Shape {
                    op,
                    left: got,
                    right: want,
                });
            }
        }
        Ok(())
    }

    fn check_unknown(&self, x: &SplitComplexMatrix, op: &'static str) -> Result<()> {
        if x.shape() != (self.m, self.n) {
            return Err(Error::Shape {
                op,
                left: x.shape(),
                right: (self.m, self.n),
            });
        }
        Ok(())
    }

    /// `X F − A X̄ − C` at `τ`.
    pub fn equation_error(&self, x: &SplitComplexMatrix, tau: f64) -> Result<SplitComplexMatrix> {
        self.check_unknown(x, "equation_residual")?;
        let Coefficients { f, a, c } = self.coefficients(tau)?;
        complex_matmul(x, &f)?
            .sub(&complex_matmul(&a, &conjugate(x))?)?
            .sub(&c)
    }

    /// `‖X F − A X̄ − C‖_F` at `τ`.
    pub fn equation_residual(&self, x: &SplitComplexMatrix, tau: f64) -> Result<f64> {
        Ok(frobenius_norm(&self.equation_error(x, tau)?))
    }

    /// `‖X − X*(τ)‖_F`.
    pub fn solution_error(&self, x: &SplitComplexMatrix, tau: f64) -> Result<f64> {
        self.check_unknown(x, "solution_error")?;
        let star = self.solution(tau)?;
        Ok(frobenius_norm(&x.sub(&star)?))
    }
}

/// Central difference of every coefficient block.
pub fn central_difference(f: &dyn Fn(f64) -> Coefficients, tau: f64, h: f64) -> Coefficients {
    let plus = f(tau + h);
    let minus = f(tau - h);
    let diff = |p: &SplitComplexMatrix, q: &SplitComplexMatrix| p.sub(q).unwrap().scale(0.5 / h);
    Coefficients {
        f: diff(&plus.f, &minus.f),
        a: diff(&plus.a, &minus.a),
        c: diff(&plus.c, &minus.c),
    }
}

/// Initial value `X(τ₀)` and the seed that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialState {
    pub x0: SplitComplexMatrix,
    pub seed: u64,
}

/// Half-width of the interval initial entries are drawn from.
pub const INITIAL_RANGE: f64 = 5.0;

/// Draws every real and imaginary entry uniformly from `[−5, 5]`.
///
/// Real parts are drawn first in row-major order, then imaginary parts.
pub fn random_initial_state(problem: &Problem, seed: u64) -> InitialState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Uniform::new_inclusive(-INITIAL_RANGE, INITIAL_RANGE).expect("valid range");
    let (m, n) = (problem.m(), problem.n());
    let re = RealMatrix::from_fn(m, n, |_, _| dist.sample(&mut rng));
    let im = RealMatrix::from_fn(m, n, |_, _| dist.sample(&mut rng));
    InitialState {
        x0: SplitComplexMatrix { re, im },
        seed,
    }
}

fn split(re: RealMatrix, im: RealMatrix) -> SplitComplexMatrix {
    SplitComplexMatrix::new(re, im).expect("literal blocks share a shape")
}

/// Constant 3×2 problem with a rational closed-form solution.
pub fn example1() -> Problem {
    let coefficients = Coefficients {
        f: split(
            RealMatrix::from_rows(&[[0.0, 0.0], [1.0, -1.0]]),
            RealMatrix::from_rows(&[[2.0, 1.0], [0.0, 1.0]]),
        ),
        a: split(
            RealMatrix::from_rows(&[[1.0, -2.0, -1.0], [0.0, 0.0, 0.0], [0.0, -1.0, 1.0]]),
            RealMatrix::from_rows(&[[0.0, -1.0, 1.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]]),
        ),
        c: split(
            RealMatrix::from_rows(&[[-1.0, 1.0], [0.0, 0.0], [0.0, 1.0]]),
            RealMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [-1.0, -2.0]]),
        ),
    };
    let zeros = Coefficients {
        f: SplitComplexMatrix::zeros(2, 2),
        a: SplitComplexMatrix::zeros(3, 3),
        c: SplitComplexMatrix::zeros(3, 2),
    };
    let solution = split(
        RealMatrix::from_rows(&[
            [21.0 / 40.0, -9.0 / 8.0],
            [1.0 / 2.0, 3.0 / 4.0],
            [-6.0 / 5.0, -13.0 / 20.0],
        ]),
        RealMatrix::from_rows(&[
            [-33.0 / 40.0, 5.0 / 8.0],
            [1.0 / 4.0, -1.0 / 2.0],
            [21.0 / 20.0, 9.0 / 5.0],
        ]),
    );
    Problem::new(
        "example1",
        3,
        2,
        Arc::new(move |_| coefficients.clone()),
        Arc::new(move |_| zeros.clone()),
        Some(Arc::new(move |_| solution.clone())),
    )
    .constant()
}

fn example2_coefficients(t: f64) -> Coefficients {
    let (s, c) = t.sin_cos();
    let s2 = (2.0 * t).sin();
    Coefficients {
        f: split(
            RealMatrix::from_rows(&[[6.0 + s, c], [c, 4.0 + s]]),
            RealMatrix::from_rows(&[[c, s], [s, c]]),
        ),
        a: split(
            RealMatrix::from_rows(&[[c, s], [-s, c]]),
            RealMatrix::from_rows(&[[s, c], [c, -s]]),
        ),
        c: split(
            RealMatrix::from_rows(&[
                [
                    2.0 * c * c - 2.0 * c * s + 6.0 * s,
                    4.0 * c + 2.0 * c * s - 2.0 * c * c,
                ],
                [-2.0 * s2 - 6.0 * c + 2.0, 2.0 * s2 - 4.0 * s - 2.0],
            ]),
            RealMatrix::from_rows(&[
                [
                    2.0 * c * c + 2.0 * c * s + 6.0 * s,
                    4.0 * c + 2.0 * c * s + 2.0 * c * c,
                ],
                [-2.0 * s2 - 6.0 * c - 2.0, -2.0 * s2 - 4.0 * s - 2.0],
            ]),
        ),
    }
}

fn example2_derivatives(t: f64) -> Coefficients {
    let (s, c) = t.sin_cos();
    let (s2, c2) = (2.0 * t).sin_cos();
    // d/dτ c² = −sin 2τ, d/dτ cs = cos 2τ
    Coefficients {
        f: split(
            RealMatrix::from_rows(&[[c, -s], [-s, c]]),
            RealMatrix::from_rows(&[[-s, c], [c, -s]]),
        ),
        a: split(
            RealMatrix::from_rows(&[[-s, c], [-c, -s]]),
            RealMatrix::from_rows(&[[c, -s], [-s, -c]]),
        ),
        c: split(
            RealMatrix::from_rows(&[
                [
                    -2.0 * s2 - 2.0 * c2 + 6.0 * c,
                    -4.0 * s + 2.0 * c2 + 2.0 * s2,
                ],
                [-4.0 * c2 + 6.0 * s, 4.0 * c2 - 4.0 * c],
            ]),
            RealMatrix::from_rows(&[
                [
                    -2.0 * s2 + 2.0 * c2 + 6.0 * c,
                    -4.0 * s + 2.0 * c2 - 2.0 * s2,
                ],
                [-4.0 * c2 + 6.0 * s, -4.0 * c2 - 4.0 * c],
            ]),
        ),
    }
}

fn example2_solution(t: f64) -> SplitComplexMatrix {
    let (s, c) = t.sin_cos();
    let part = RealMatrix::from_rows(&[[s, c], [-c, -s]]);
    split(part.clone(), part)
}

/// Trigonometric 2×2 problem with solution `X*(τ) = (1 + i)[[sin τ, cos τ], [−cos τ, −sin τ]]`.
pub fn example2() -> Problem {
    Problem::new(
        "example2",
        2,
        2,
        Arc::new(example2_coefficients),
        Arc::new(example2_derivatives),
        Some(Arc::new(example2_solution)),
    )
}

/// Names accepted by [`problem_by_name`].
pub const PROBLEM_NAMES: &[&str] = &["example1", "example2"];

/// Registry lookup for the built-in problems.
pub fn problem_by_name(name: &str) -> Option<Problem> {
    match name {
        "example1" => Some(example1()),
        "example2" => Some(example2()),
        _ => None,
    }
}
