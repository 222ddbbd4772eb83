//! Spectral Petrov-Galerkin solver for two-sided fractional
//! diffusion-advection-reaction boundary-value problems on (0, 1).
//!
//! Solutions are sought as `u = ω φ` with `φ` expanded in shifted Jacobi
//! polynomials, so the homogeneous boundary conditions hold by construction.
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix `f64`.

pub mod assembly;
pub mod error;
pub mod experiments;
pub mod expr;
pub mod fracparams;
pub mod jacobi;
pub mod linsolve;
pub mod scalar;
pub mod solver;
pub mod spaces;
pub mod specfun;

pub use error::{Error, Result};
pub use expr::{EvalError, Expr, ParseError, ParseErrorKind};
pub use fracparams::Variant;
pub use scalar::Real;
pub use spaces::NormInterval;

pub type FracParams = fracparams::FracParams<f64>;
pub type JacobiParams = jacobi::JacobiParams<f64>;
pub type QuadratureRule = jacobi::QuadratureRule<f64>;
pub type CoeffVec = spaces::CoeffVec<f64>;
pub type WeightSpec = spaces::WeightSpec<f64>;
pub type ProblemSpec = assembly::ProblemSpec<f64>;
pub type DiscreteSystem = assembly::DiscreteSystem<f64>;
pub type DenseMatrix = linsolve::DenseMatrix<f64>;
pub type Solution = solver::Solution<f64>;
pub type Diagnostics = solver::Diagnostics<f64>;
pub type ConvergenceReport = experiments::ConvergenceReport<f64>;
pub type ComparisonReport = experiments::ComparisonReport<f64>;
