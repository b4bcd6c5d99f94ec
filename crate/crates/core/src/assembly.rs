//! Real `2mn × 2mn` systems that drive both discrete models.
//!
//! The state of either model is the stacked vector `[vec(X_re); vec(X_im)]`.
//! Since `vec(X)_re = vec(X_re)`, the complex-field layout `[Z_r; Z_i]` with
//! `Z = vec(X)` and the real-field layout coincide, so one [`StateVector`]
//! serves both models.
//!
//! Both assemblies recompute their Kronecker blocks on every call. For
//! problems flagged [`Problem::is_constant`] the solver reuses the
//! pseudo-inverse of `w` instead.

use crate::error::{Error, Result};
use crate::linalg::{
    complex_matmul, conjugate, kron, unvec_real, vec, vec_real, RealMatrix, RealVector,
    SplitComplexMatrix,
};
use crate::problem::{Coefficients, Problem};

/// Convergence gain `γ = re + i im`, in 1/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexGain {
    pub re: f64,
    pub im: f64,
}

impl ComplexGain {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        let g = Self { re, im };
        g.validate()?;
        Ok(g)
    }

    pub fn real(re: f64) -> Result<Self> {
        Self::new(re, 0.0)
    }

    pub fn is_real(&self) -> bool {
        self.im == 0.0
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.re.is_finite() && self.im.is_finite()) || self.re <= 0.0 {
            return Err(Error::InvalidConfig(vec![format!(
                "gain real part must be positive and finite, got {}",
                self
            )]));
        }
        Ok(())
    }
}

impl std::fmt::Display for ComplexGain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.im == 0.0 {
            write!(f, "{}", self.re)
        } else if self.im > 0.0 {
            write!(f, "{}+{}i", self.re, self.im)
        } else {
            write!(f, "{}-{}i", self.re, -self.im)
        }
    }
}

/// Stacked real state `[vec(X_re); vec(X_im)]` of length `2mn`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(pub RealVector);

impl StateVector {
    pub fn from_matrix(x: &SplitComplexMatrix) -> Self {
        Self(RealVector::stack(&vec_real(&x.re), &vec_real(&x.im)))
    }

    pub fn to_matrix(&self, m: usize, n: usize) -> Result<SplitComplexMatrix> {
        let mn = m * n;
        if self.len() != 2 * mn {
            return Err(Error::Shape {
                op: "StateVector::to_matrix",
                left: (self.len(), 1),
                right: (2 * mn, 1),
            });
        }
        let v = self.0.as_slice();
        Ok(SplitComplexMatrix {
            re: unvec_real(&v[..mn], m, n)?,
            im: unvec_real(&v[mn..], m, n)?,
        })
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }
}

/// Linear system at one sample time.
///
/// `w_dot` and `b_dot` are only populated by [`assemble_dznd2`].
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledSystem {
    pub w: RealMatrix,
    pub b: RealVector,
    pub w_dot: Option<RealMatrix>,
    pub b_dot: Option<RealVector>,
    pub tau: f64,
}

fn stack_complex_column(v: &SplitComplexMatrix) -> RealVector {
    RealVector::stack(
        &RealVector(v.re.as_slice().to_vec()),
        &RealVector(v.im.as_slice().to_vec()),
    )
}

/// Complex-field assembly: `w = [[U_r − V_r, −(U_i + V_i)], [U_i − V_i, U_r + V_r]]`
/// with `U = Fᵀ ⊗ I_m`, `V = I_n ⊗ A`, and `b = [G_r; G_i]` where
/// `G = vec(Ċ + Ȧ X̄ − X Ḟ) − γ vec(X F − A X̄ − C)`.
///
/// `γ` multiplies the complex error before the real/imaginary split.
pub fn assemble_dznd1(
    problem: &Problem,
    state: &StateVector,
    gamma: ComplexGain,
    tau: f64,
) -> Result<AssembledSystem> {
    let (m, n) = (problem.m(), problem.n());
    let x = state.to_matrix(m, n)?;
    let Coefficients { f, a, c } = problem.coefficients(tau)?;
    let d = problem.derivatives(tau)?;

    // conj(Fᴴ) = Fᵀ with entries left unconjugated
    let u = kron(&f.transpose(), &SplitComplexMatrix::identity(m));
    let v = kron(&SplitComplexMatrix::identity(n), &a);
    let w = RealMatrix::from_blocks(
        &u.re.sub(&v.re)?,
        &u.im.add(&v.im)?.scale(-1.0),
        &u.im.sub(&v.im)?,
        &u.re.add(&v.re)?,
    )?;

    let x_bar = conjugate(&x);
    let drift =
        d.c.add(&complex_matmul(&d.a, &x_bar)?)?
            .sub(&complex_matmul(&x, &d.f)?)?;
    let err = complex_matmul(&x, &f)?
        .sub(&complex_matmul(&a, &x_bar)?)?
        .sub(&c)?;
    let g = vec(&drift).sub(&vec(&err).scale_complex(gamma.re, gamma.im))?;

    Ok(AssembledSystem {
        w,
        b: stack_complex_column(&g),
        w_dot: None,
        b_dot: None,
        tau,
    })
}

/// `[[K11, K12], [K21, K22]]` built from `F`, `A` with real Kronecker products.
fn real_field_blocks(f: &SplitComplexMatrix, a: &SplitComplexMatrix) -> Result<RealMatrix> {
    let (n, m) = (f.rows(), a.rows());
    let i_m = RealMatrix::identity(m);
    let i_n = RealMatrix::identity(n);
    let fr_t = f.re.transpose().kron(&i_m);
    let fi_t = f.im.transpose().kron(&i_m);
    let ar = i_n.kron(&a.re);
    let ai = i_n.kron(&a.im);
    let k11 = fr_t.sub(&ar)?;
    let k12 = fi_t.add(&ai)?.scale(-1.0);
    let k21 = fi_t.sub(&ai)?;
    let k22 = fr_t.add(&ar)?;
    RealMatrix::from_blocks(&k11, &k12, &k21, &k22)
}

/// Real-field assembly: `w = W_R(τ)`, `b = [vec(C_r); vec(C_i)]`, and the same
/// construction on `(Ḟ, Ȧ, Ċ)` for `w_dot`, `b_dot`. Independent of the state.
pub fn assemble_dznd2(problem: &Problem, tau: f64) -> Result<AssembledSystem> {
    let c = problem.coefficients(tau)?;
    let d = problem.derivatives(tau)?;
    let stack_c = |m: &SplitComplexMatrix| RealVector::stack(&vec_real(&m.re), &vec_real(&m.im));
    Ok(AssembledSystem {
        w: real_field_blocks(&c.f, &c.a)?,
        b: stack_c(&c.c),
        w_dot: Some(real_field_blocks(&d.f, &d.a)?),
        b_dot: Some(stack_c(&d.c)),
        tau,
    })
}
