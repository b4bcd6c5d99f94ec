//! Euler-forward zeroing neural dynamics for time-variant standard
//! Sylvester-conjugate matrix equations `X(τ) F(τ) − A(τ) X̄(τ) − C(τ) = 0`.
//!
//! Two discrete models are provided. [`Model::Dznd1`] drives the complex
//! equation error to zero; [`Model::Dznd2`] drives the error of the real
//! `2mn`-dimensional embedding. Both advance the stacked state
//! `[vec(X_re); vec(X_im)]` with a pseudo-inverse of the same real matrix.

pub mod assembly;
pub mod error;
pub mod linalg;
pub mod problem;
pub mod solver;
pub mod stability;

pub use assembly::{assemble_dznd1, assemble_dznd2, AssembledSystem, ComplexGain, StateVector};
pub use error::{Error, Result};
pub use linalg::{
    complex_matmul, conjugate, default_pinv_tolerance, frobenius_norm, kron, pinv, unvec, vec,
    RealMatrix, RealVector, SplitComplexMatrix,
};
pub use problem::{
    example1, example2, problem_by_name, random_initial_state, Coefficients, InitialState, Problem,
};
pub use solver::{
    run, scalar_error_modulus, step_dznd1, step_dznd2, Model, Outcome, SolverConfig, StepRecord,
    Trajectory,
};
pub use stability::{zero_stability_roots, CharacteristicPolynomial};
