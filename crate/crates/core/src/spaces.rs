//! Functions represented by coefficients in an orthonormal shifted-Jacobi
//! basis, weighted projection, and coefficient-decay Sobolev norms.

use crate::assembly::composite_rule;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::fracparams::FracParams;
use crate::jacobi::{deriv_g, eval_g_hat_all, gauss_jacobi, norm_g, JacobiParams, QuadratureRule};
use crate::scalar::Real;

/// `v(x) = Σ_j coeffs[j] · Ĝ_j^{(a,b)}(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffVec<T> {
    pub params: JacobiParams<T>,
    pub coeffs: Vec<T>,
}

impl<T: Real> CoeffVec<T> {
    pub fn new(params: JacobiParams<T>, coeffs: Vec<T>) -> Result<Self> {
        if let Some(j) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidParams(format!("coefficient {j} is not finite")));
        }
        Ok(Self { params, coeffs })
    }

    pub fn zeros(params: JacobiParams<T>, len: usize) -> Self {
        Self { params, coeffs: vec![T::zero(); len] }
    }

    /// The basis function `Ĝ_j` in a vector of length `len`.
    pub fn unit(params: JacobiParams<T>, len: usize, j: usize) -> Self {
        let mut v = Self::zeros(params, len.max(j + 1));
        v.coeffs[j] = T::one();
        v
    }

    /// Truncation degree `N` (length minus one).
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: T) -> T {
        if self.coeffs.is_empty() {
            return T::zero();
        }
        let basis = eval_g_hat_all(self.params, self.degree(), x);
        basis.iter().zip(&self.coeffs).map(|(&g, &c)| g * c).sum()
    }

    /// `v'(x)`.
    pub fn eval_derivative(&self, x: T) -> T {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, &c)| c * deriv_g(self.params, j, 1, x) / norm_g(self.params, j))
            .sum()
    }

    fn same_basis(&self, other: &Self) -> Result<()> {
        if self.params != other.params {
            let f = |v: T| v.to_f64().unwrap_or(f64::NAN);
            return Err(Error::BasisMismatch(
                f(self.params.a),
                f(self.params.b),
                f(other.params.a),
                f(other.params.b),
            ));
        }
        Ok(())
    }

    /// `self - other`, zero-padding the shorter vector.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.same_basis(other)?;
        let len = self.coeffs.len().max(other.coeffs.len());
        let at = |v: &Self, j: usize| v.coeffs.get(j).copied().unwrap_or(T::zero());
        let coeffs = (0..len).map(|j| at(self, j) - at(other, j)).collect();
        Ok(Self { params: self.params, coeffs })
    }
}

/// Trial weight `ω = ω^{(α-β,β)}` and test weight `ω* = ω^{(β,α-β)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSpec<T> {
    pub trial: JacobiParams<T>,
    pub test: JacobiParams<T>,
}

impl<T: Real> WeightSpec<T> {
    pub fn new(fp: &FracParams<T>) -> Self {
        let (a, b) = fp.trial_exponents();
        Self { trial: JacobiParams { a, b }, test: JacobiParams { a: b, b: a } }
    }

    pub fn omega(&self, x: T) -> T {
        self.trial.weight(x)
    }

    pub fn omega_star(&self, x: T) -> T {
        self.test.weight(x)
    }
}

/// Coefficients `(f, Ĝ_j)_{ω^{(a,b)}}`, `j = 0..=n`, with a given rule.
pub fn project_with_rule<T: Real>(
    f: impl Fn(T) -> Result<T>,
    rule: &QuadratureRule<T>,
    n: usize,
) -> Result<CoeffVec<T>> {
    let mut coeffs = vec![T::zero(); n + 1];
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let fx = f(x)?;
        for (c, g) in coeffs.iter_mut().zip(eval_g_hat_all(rule.params, n, x)) {
            *c += w * fx * g;
        }
    }
    CoeffVec::new(rule.params, coeffs)
}

/// Weighted L² projection onto degree `n` with a `quad_points` Gauss-Jacobi rule.
pub fn project<T: Real>(
    f: impl Fn(T) -> Result<T>,
    p: JacobiParams<T>,
    n: usize,
    quad_points: usize,
) -> Result<CoeffVec<T>> {
    if quad_points < n + 1 {
        return Err(Error::InvalidParams(format!(
            "projection to degree {n} needs at least {} quadrature points, got {quad_points}",
            n + 1
        )));
    }
    project_with_rule(f, &gauss_jacobi(p, quad_points)?, n)
}

/// Projection of an expression, splitting the rule at its breakpoints.
pub fn project_expr<T: Real>(
    e: &Expr,
    p: JacobiParams<T>,
    n: usize,
    quad_points: usize,
) -> Result<CoeffVec<T>> {
    if quad_points < n + 1 {
        return project(|x| Ok(e.eval(x)?), p, n, quad_points);
    }
    let rule = composite_rule(p, quad_points, &e.breakpoints())?;
    project_with_rule(|x| Ok(e.eval(x)?), &rule, n)
}

/// `sqrt(Σ_j (1+j²)^s v_j²)`.
pub fn sobolev_norm<T: Real>(v: &CoeffVec<T>, s: T) -> T {
    v.coeffs
        .iter()
        .enumerate()
        .map(|(j, &c)| {
            let jf = T::from_index(j);
            (T::one() + jf * jf).powf(s) * c * c
        })
        .sum::<T>()
        .sqrt()
}

/// `u(x) = ω(x) φ(x)`; exactly zero at both endpoints.
pub fn eval_solution<T: Real>(phi: &CoeffVec<T>, w: &WeightSpec<T>, x: T) -> T {
    if x <= T::zero() || x >= T::one() {
        return T::zero();
    }
    w.omega(x) * phi.eval(x)
}

/// Interval on which weighted error norms are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormInterval {
    /// `(0, 1)` with weight `(1-x)^a x^b`.
    #[default]
    Unit,
    /// `(-1, 1)` with weight `(1-t)^a (1+t)^b`, `t = 2x - 1`.
    Reference,
}

impl NormInterval {
    /// Factor taking an `(a, b)`-weighted norm on `(0, 1)` to this interval.
    pub fn scale<T: Real>(self, params: JacobiParams<T>) -> T {
        match self {
            NormInterval::Unit => T::one(),
            NormInterval::Reference => T::lit(2.0).powf((params.a + params.b + T::one()) / T::lit(2.0)),
        }
    }
}

impl std::str::FromStr for NormInterval {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(NormInterval::Unit),
            "reference" => Ok(NormInterval::Reference),
            other => Err(Error::InvalidParams(format!("unknown norm interval '{other}', expected unit or reference"))),
        }
    }
}

/// `sobolev_norm(phi_ref - phi_n, μ)` for each `μ` in `mus`.
pub fn error_norms<T: Real>(phi_ref: &CoeffVec<T>, phi_n: &CoeffVec<T>, mus: &[T]) -> Result<Vec<T>> {
    let diff = phi_ref.difference(phi_n)?;
    Ok(mus.iter().map(|&mu| sobolev_norm(&diff, mu)).collect())
}

/// `sqrt(‖v‖²_{ω^{(a,b)}} + ‖v'‖²_{ω^{(a+1,b+1)}})` by quadrature.
pub fn h1_integral_norm<T: Real>(v: &CoeffVec<T>, quad_points: usize) -> Result<T> {
    let p = v.params;
    let lifted = JacobiParams { a: p.a + T::one(), b: p.b + T::one() };
    let n = quad_points.max(v.coeffs.len() + 1);
    let value = gauss_jacobi(p, n)?.integrate(|x| {
        let y = v.eval(x);
        y * y
    });
    let slope = gauss_jacobi(lifted, n)?.integrate(|x| {
        let y = v.eval_derivative(x);
        y * y
    });
    Ok((value + slope).sqrt())
}
