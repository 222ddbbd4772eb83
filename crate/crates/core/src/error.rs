use thiserror::Error;

use crate::expr::{EvalError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error in {function}: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("Gauss-Jacobi root finder did not converge (n = {n}, a = {a}, b = {b}, root {index})")]
    QuadratureConvergence { n: usize, a: f64, b: f64, index: usize },
    #[error("quadrature rule rejected: {0}")]
    QuadratureRejected(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("diffusivity k must be positive: k({x}) = {value}")]
    NonPositiveDiffusivity { x: f64, value: f64 },
    #[error("matrix is singular to working precision at pivot {pivot}")]
    Singular { pivot: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("coefficient vectors live in different bases: ({0}, {1}) vs ({2}, {3})")]
    BasisMismatch(f64, f64, f64, f64),
    #[error("solve failed at N = {n}: {source}")]
    SolveAt {
        n: usize,
        #[source]
        source: Box<Error>,
    },
}

pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        function,
        detail: detail.into(),
    }
}
