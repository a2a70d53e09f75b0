//! First-order augmented Lagrangian solver for composite norm minimization
//!
//! ```text
//! min  μ1‖σ(X)‖_α + μ2‖C(X) − d‖_β   s.t.  ‖A(X) − b‖_γ ≤ ρ
//! ```
//!
//! with α, β, γ ∈ {1, 2, ∞}.

pub mod error;
pub mod inner;
pub mod linalg;
pub mod outer;
pub mod problems;
pub mod prox;
pub mod rng;

pub use error::{FalcError, Result};
pub use linalg::{DenseMatrix, DenseVector, LinearMap, NormIndex};
pub use outer::{solve, solve_with_progress, Schedule, SolveReport, SolverParams, Termination};
pub use problems::{ConstraintBlock, ProblemSpec};
