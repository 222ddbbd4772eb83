//! The discrete Petrov-Galerkin system. Trial functions are `ω Ĝ_i^{(α-β,β)}`,
//! test functions `Ĝ_j^{(β,α-β)}`; rows are test indices `j`, columns trial
//! indices `i`.
//!
//! Every block is an integral against a Jacobi weight:
//!
//! | block        | weight exponents      | integrand                                   |
//! |--------------|-----------------------|---------------------------------------------|
//! | B0 (acute)   | `(α-β-1, β-1)`        | `k · (i+1) ν_i Ĝ_{i+1} · (-μ_j) ν_j Ĝ_{j+1}` |
//! | B0 (grave)   | `(β-1, α-β-1)`        | `k · (-μ_i) ν_i Ĝ_{i+1} · (j+1) ν_j Ĝ_{j+1}` |
//! | B1           | `(α-1, α-1)`          | `b · Ĝ_j^test · (-(i+1)) ν_i Ĝ_{i+1}^{(α-β-1,β-1)}` |
//! | B2           | `(α, α)`              | `c · Ĝ_i^trial · Ĝ_j^test`                   |
//! | F            | `(β, α-β)`            | `f · Ĝ_j^test`                               |
//!
//! with `ν_m = ‖G_{m+1}^{(α-β-1,β-1)}‖ / ‖G_m^{(α-β,β)}‖ = sqrt((m+α)/(m+1))`.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::fracparams::{FracParams, Variant};
use crate::jacobi::{eval_g_hat_all, gauss_jacobi, norm_ratio_sq, JacobiParams, QuadratureRule};
use crate::linsolve::DenseMatrix;
use crate::scalar::Real;

/// Default reference degree for convergence studies.
pub const DEFAULT_N_REF: usize = 40;
/// Quadrature points beyond the trial degree.
pub const QUAD_MARGIN: usize = 20;

/// A boundary-value problem together with its discretization parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec<T> {
    pub fp: FracParams<T>,
    pub variant: Variant,
    /// Diffusivity.
    pub k: Expr,
    /// Advection coefficient.
    pub b: Expr,
    /// Reaction coefficient.
    pub c: Expr,
    /// Source term.
    pub f: Expr,
    pub n: usize,
    pub quad_points: usize,
    pub n_ref: usize,
}

impl<T: Real> ProblemSpec<T> {
    /// Spec with `quad_points = n + 20` and `n_ref = 40`.
    pub fn new(fp: FracParams<T>, variant: Variant, k: Expr, b: Expr, c: Expr, f: Expr, n: usize) -> Self {
        Self { fp, variant, k, b, c, f, n, quad_points: n + QUAD_MARGIN, n_ref: DEFAULT_N_REF }
    }

    /// The same problem at degree `n`, keeping at least `n + 20` quadrature points.
    pub fn at_degree(&self, n: usize) -> Self {
        Self { n, quad_points: self.quad_points.max(n + QUAD_MARGIN), ..self.clone() }
    }

    pub fn with_variant(&self, variant: Variant) -> Self {
        Self { variant, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidParams("trial degree N must be at least 1".into()));
        }
        if self.quad_points < self.n + QUAD_MARGIN {
            return Err(Error::InvalidParams(format!(
                "quad_points must be at least N + {QUAD_MARGIN} = {}, got {}",
                self.n + QUAD_MARGIN,
                self.quad_points
            )));
        }
        Ok(())
    }

    /// Whether the advection coefficient is identically zero.
    pub fn advection_free(&self) -> bool {
        !self.b.depends_on_x() && self.b.eval(T::zero()).map(|v| v == T::zero()).unwrap_or(false)
    }
}

/// `(B0 + B1 + B2) φ = F`.
#[derive(Debug, Clone)]
pub struct DiscreteSystem<T> {
    pub matrix: DenseMatrix<T>,
    pub rhs: Vec<T>,
    /// Smallest sampled value of `k`.
    pub k_min: T,
}

/// Rule for `∫₀¹ ω^{(a,b)} g` with `n` points on each piece between `breaks`.
/// The end pieces use Gauss-Jacobi rules for the endpoint singularity and fold
/// the other weight factor into the weights; interior pieces use Gauss-Legendre
/// with the whole weight folded in.
pub fn composite_rule<T: Real>(p: JacobiParams<T>, n: usize, breaks: &[f64]) -> Result<QuadratureRule<T>> {
    let p = JacobiParams::new(p.a, p.b)?;
    if breaks.is_empty() {
        return gauss_jacobi(p, n);
    }
    if breaks.windows(2).any(|w| !(w[0] < w[1])) || breaks.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
        return Err(Error::InvalidParams(format!(
            "breakpoints must be sorted, distinct and inside (0, 1), got {breaks:?}"
        )));
    }
    let one = T::one();
    let cuts: Vec<T> = breaks.iter().map(|&x| T::lit(x)).collect();
    let mut nodes = Vec::with_capacity(n * (cuts.len() + 1));
    let mut weights = Vec::with_capacity(nodes.capacity());

    let first = cuts[0];
    let left = gauss_jacobi(JacobiParams { a: T::zero(), b: p.b }, n)?;
    let scale = first.powf(p.b + one);
    for (&s, &w) in left.nodes.iter().zip(&left.weights) {
        let x = first * s;
        nodes.push(x);
        weights.push(scale * w * (one - x).powf(p.a));
    }

    for pair in cuts.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let unit = gauss_jacobi(JacobiParams { a: T::zero(), b: T::zero() }, n)?;
        for (&s, &w) in unit.nodes.iter().zip(&unit.weights) {
            let x = lo + (hi - lo) * s;
            nodes.push(x);
            weights.push((hi - lo) * w * p.weight(x));
        }
    }

    let last = cuts[cuts.len() - 1];
    let right = gauss_jacobi(JacobiParams { a: p.a, b: T::zero() }, n)?;
    let scale = (one - last).powf(p.a + one);
    for (&s, &w) in right.nodes.iter().zip(&right.weights) {
        let x = last + (one - last) * s;
        nodes.push(x);
        weights.push(scale * w * x.powf(p.b));
    }
    Ok(QuadratureRule { params: p, nodes, weights })
}

/// `ν_m` for `m = 0..=n`.
fn norm_factors<T: Real>(fp: &FracParams<T>, n: usize) -> Vec<T> {
    (0..=n).map(|m| (T::one() / norm_ratio_sq(fp.alpha, fp.beta, m)).sqrt()).collect()
}

/// `Σ_q w_q coef(x_q) left_i(x_q) right_j(x_q)` into `(j, i)`.
fn accumulate<T: Real>(
    rule: &QuadratureRule<T>,
    n: usize,
    coef: &Expr,
    mut factors: impl FnMut(T) -> (Vec<T>, Vec<T>),
    mut inspect: impl FnMut(T, T) -> Result<()>,
) -> Result<DenseMatrix<T>> {
    let mut m = DenseMatrix::zeros(n + 1);
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let cx = coef.eval(x)?;
        inspect(x, cx)?;
        if cx == T::zero() {
            continue;
        }
        let (trial, test) = factors(x);
        for (j, &tj) in test.iter().enumerate() {
            let s = w * cx * tj;
            for (i, &ti) in trial.iter().enumerate() {
                m[(j, i)] += s * ti;
            }
        }
    }
    Ok(m)
}

fn lower_params<T: Real>(fp: &FracParams<T>) -> JacobiParams<T> {
    JacobiParams { a: fp.alpha - fp.beta - T::one(), b: fp.beta - T::one() }
}

fn trial_params<T: Real>(fp: &FracParams<T>) -> JacobiParams<T> {
    let (a, b) = fp.trial_exponents();
    JacobiParams { a, b }
}

fn test_params<T: Real>(fp: &FracParams<T>) -> JacobiParams<T> {
    let (a, b) = fp.test_exponents();
    JacobiParams { a, b }
}

/// Diffusion block and the smallest sampled diffusivity. Fails if `k ≤ 0` at
/// any quadrature node.
pub fn assemble_b0_checked<T: Real>(spec: &ProblemSpec<T>) -> Result<(DenseMatrix<T>, T)> {
    spec.validate()?;
    let fp = &spec.fp;
    let n = spec.n;
    let nu = norm_factors(fp, n);
    let mu: Vec<T> = (0..=n).map(|m| fp.mu(m)).collect();
    let lower = lower_params(fp);
    let p = match spec.variant {
        Variant::Acute => lower,
        Variant::Grave => lower.swapped(),
    };
    let rule = composite_rule(p, spec.quad_points, &spec.k.breakpoints())?;
    let mut k_min = T::infinity();
    let variant = spec.variant;
    let m = accumulate(
        &rule,
        n,
        &spec.k,
        |x| {
            let g = eval_g_hat_all(p, n + 1, x);
            let diff = |i: usize| T::from_index(i + 1) * nu[i] * g[i + 1];
            let frac = |i: usize| -mu[i] * nu[i] * g[i + 1];
            match variant {
                Variant::Acute => ((0..=n).map(diff).collect(), (0..=n).map(frac).collect()),
                Variant::Grave => ((0..=n).map(frac).collect(), (0..=n).map(diff).collect()),
            }
        },
        |x, kx| {
            k_min = k_min.min(kx);
            if kx <= T::zero() {
                return Err(Error::NonPositiveDiffusivity {
                    x: x.to_f64().unwrap_or(f64::NAN),
                    value: kx.to_f64().unwrap_or(f64::NAN),
                });
            }
            Ok(())
        },
    )?;
    Ok((m, k_min))
}

/// Diffusion block `B0`.
pub fn assemble_b0<T: Real>(spec: &ProblemSpec<T>) -> Result<DenseMatrix<T>> {
    Ok(assemble_b0_checked(spec)?.0)
}

/// Advection block `B1(φ, ψ) = ⟨b D(ωφ), ψ⟩_{ω*}`.
pub fn assemble_b1<T: Real>(spec: &ProblemSpec<T>) -> Result<DenseMatrix<T>> {
    spec.validate()?;
    let fp = &spec.fp;
    let n = spec.n;
    let nu = norm_factors(fp, n);
    let am1 = fp.alpha - T::one();
    let rule = composite_rule(JacobiParams { a: am1, b: am1 }, spec.quad_points, &spec.b.breakpoints())?;
    let (lower, test) = (lower_params(fp), test_params(fp));
    accumulate(
        &rule,
        n,
        &spec.b,
        |x| {
            let g = eval_g_hat_all(lower, n + 1, x);
            let trial = (0..=n).map(|i| -T::from_index(i + 1) * nu[i] * g[i + 1]).collect();
            (trial, eval_g_hat_all(test, n, x))
        },
        |_, _| Ok(()),
    )
}

/// Reaction block `B2(φ, ψ) = ⟨c ωφ, ψ⟩_{ω*}`.
pub fn assemble_b2<T: Real>(spec: &ProblemSpec<T>) -> Result<DenseMatrix<T>> {
    spec.validate()?;
    let fp = &spec.fp;
    let n = spec.n;
    let p = JacobiParams { a: fp.alpha, b: fp.alpha };
    let rule = composite_rule(p, spec.quad_points, &spec.c.breakpoints())?;
    let (trial, test) = (trial_params(fp), test_params(fp));
    accumulate(
        &rule,
        n,
        &spec.c,
        |x| (eval_g_hat_all(trial, n, x), eval_g_hat_all(test, n, x)),
        |_, _| Ok(()),
    )
}

/// Load vector `F_j = ⟨f, Ĝ_j^{(β,α-β)}⟩_{ω*}`.
pub fn assemble_rhs<T: Real>(spec: &ProblemSpec<T>) -> Result<Vec<T>> {
    spec.validate()?;
    let test = test_params(&spec.fp);
    let rule = composite_rule(test, spec.quad_points, &spec.f.breakpoints())?;
    let mut rhs = vec![T::zero(); spec.n + 1];
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let fx = spec.f.eval(x)?;
        for (r, g) in rhs.iter_mut().zip(eval_g_hat_all(test, spec.n, x)) {
            *r += w * fx * g;
        }
    }
    Ok(rhs)
}

/// The full system for `spec`.
pub fn assemble<T: Real>(spec: &ProblemSpec<T>) -> Result<DiscreteSystem<T>> {
    let (b0, k_min) = assemble_b0_checked(spec)?;
    let matrix = b0.add(&assemble_b1(spec)?)?.add(&assemble_b2(spec)?)?;
    let rhs = assemble_rhs(spec)?;
    Ok(DiscreteSystem { matrix, rhs, k_min })
}
