//! Shifted Jacobi polynomials on (0, 1).
//!
//! `G_n^{(a,b)}(x) = P_n^{(a,b)}(2x - 1)` are orthogonal with respect to the
//! weight `ω^{(a,b)}(x) = (1 - x)^a x^b`. Derivative identities are stated
//! directly in `x`: the factor `2^k` from the chain rule cancels the `2^{-k}`
//! of the classical identity in `t`, so
//! `d^k/dx^k G_n^{(a,b)} = Γ(n+k+a+b+1)/Γ(n+a+b+1) · G_{n-k}^{(a+k,b+k)}`.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::specfun::{beta, log_gamma};

/// Exponents of the Jacobi weight `(1 - x)^a x^b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiParams<T> {
    /// Exponent of `(1 - x)`.
    pub a: T,
    /// Exponent of `x`.
    pub b: T,
}

impl<T: Real> JacobiParams<T> {
    pub fn new(a: T, b: T) -> Result<Self> {
        if !(a > -T::one() && b > -T::one()) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParams(format!(
                "Jacobi exponents must exceed -1, got ({a}, {b})"
            )));
        }
        Ok(Self { a, b })
    }

    /// The pair with the exponents exchanged, `(b, a)`.
    pub fn swapped(self) -> Self {
        Self { a: self.b, b: self.a }
    }

    /// `ω^{(a,b)}(x)`.
    pub fn weight(&self, x: T) -> T {
        (T::one() - x).powf(self.a) * x.powf(self.b)
    }

    fn to_f64(self) -> (f64, f64) {
        (
            self.a.to_f64().unwrap_or(f64::NAN),
            self.b.to_f64().unwrap_or(f64::NAN),
        )
    }
}

/// Values `P_0 .. P_{n_max}` of the classical three-term recurrence at `t`.
fn recurrence_values<T: Real>(a: T, b: T, n_max: usize, t: T) -> Vec<T> {
    let one = T::one();
    let two = T::lit(2.0);
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(one);
    if n_max == 0 {
        return out;
    }
    out.push(((a + b + two) * t + a - b) / two);
    let ab = a + b;
    for n in 2..=n_max {
        let nf = T::from_index(n);
        let c = two * nf + ab;
        let denom = two * nf * (nf + ab) * (c - two);
        let lin = (c - one) * (c * (c - two) * t + a * a - b * b);
        let back = two * (nf + a - one) * (nf + b - one) * c;
        let next = (lin * out[n - 1] - back * out[n - 2]) / denom;
        out.push(next);
    }
    out
}

/// `G_n^{(a,b)}(x)`.
pub fn eval_g<T: Real>(p: JacobiParams<T>, n: usize, x: T) -> T {
    let t = T::lit(2.0) * x - T::one();
    recurrence_values(p.a, p.b, n, t)[n]
}

/// `G_0(x), …, G_{n_max}(x)` in one recurrence sweep.
pub fn eval_g_all<T: Real>(p: JacobiParams<T>, n_max: usize, x: T) -> Vec<T> {
    let t = T::lit(2.0) * x - T::one();
    recurrence_values(p.a, p.b, n_max, t)
}

/// Orthonormal values `Ĝ_0(x), …, Ĝ_{n_max}(x)`.
pub fn eval_g_hat_all<T: Real>(p: JacobiParams<T>, n_max: usize, x: T) -> Vec<T> {
    let mut vals = eval_g_all(p, n_max, x);
    for (j, v) in vals.iter_mut().enumerate() {
        *v /= norm_g(p, j);
    }
    vals
}

fn ln_norm_sq<T: Real>(p: JacobiParams<T>, j: usize) -> T {
    let (a, b) = (p.a, p.b);
    let one = T::one();
    if j == 0 {
        // (a + b + 1) Γ(a + b + 1) may be 0 · ∞ here; use the zeroth moment.
        return beta(a + one, b + one)
            .expect("weight exponents above -1")
            .ln();
    }
    let jf = T::from_index(j);
    let lg = |z: T| log_gamma(z).expect("positive Γ argument");
    lg(jf + a + one) + lg(jf + b + one)
        - lg(jf + one)
        - lg(jf + a + b + one)
        - (T::lit(2.0) * jf + a + b + one).ln()
}

/// `|‖G_j^{(a,b)}‖|`, the `L²_{ω^{(a,b)}}` norm, symmetric in `(a, b)`.
pub fn norm_g<T: Real>(p: JacobiParams<T>, j: usize) -> T {
    (ln_norm_sq(p, j) * T::lit(0.5)).exp()
}

/// `|‖G_j^{(α-β,β)}‖|² / |‖G_{j+1}^{(β-1,α-β-1)}‖|²`, which equals `(j+1)/(j+α)`.
pub fn norm_ratio_sq<T: Real>(alpha: T, beta: T, j: usize) -> T {
    let one = T::one();
    let num = JacobiParams { a: alpha - beta, b: beta };
    let den = JacobiParams { a: beta - one, b: alpha - beta - one };
    (ln_norm_sq(num, j) - ln_norm_sq(den, j + 1)).exp()
}

/// `d^k/dx^k G_n^{(a,b)}(x)`; zero when `k > n`.
pub fn deriv_g<T: Real>(p: JacobiParams<T>, n: usize, k: usize, x: T) -> T {
    if k > n {
        return T::zero();
    }
    if k == 0 {
        return eval_g(p, n, x);
    }
    let (nf, kf) = (T::from_index(n), T::from_index(k));
    let s = nf + p.a + p.b + T::one();
    let scale = (log_gamma(s + kf).expect("positive") - log_gamma(s).expect("positive")).exp();
    let shifted = JacobiParams { a: p.a + kf, b: p.b + kf };
    scale * eval_g(shifted, n - k, x)
}

fn binomial(k: usize, i: usize) -> f64 {
    (0..i).fold(1.0, |acc, m| acc * (k - m) as f64 / (m + 1) as f64)
}

fn raw_central_difference<T: Real>(f: &impl Fn(T) -> T, k: usize, x: T, h: T) -> T {
    let half_k = T::from_index(k) * T::lit(0.5);
    let mut acc = T::zero();
    for i in 0..=k {
        let c = T::lit(binomial(k, i));
        let sign = if i % 2 == 0 { T::one() } else { -T::one() };
        acc += sign * c * f(x + (half_k - T::from_index(i)) * h);
    }
    acc / h.powi(k as i32)
}

/// k-th central difference of `f` at `x`, Richardson-extrapolated once
/// (error `O(h⁴)`).
pub(crate) fn central_difference<T: Real>(f: impl Fn(T) -> T, k: usize, x: T, h: T) -> T {
    let coarse = raw_central_difference(&f, k, x, h);
    let fine = raw_central_difference(&f, k, x, h * T::lit(0.5));
    (T::lit(4.0) * fine - coarse) / T::lit(3.0)
}

/// Step for a k-th central difference: `ε^{1/(k+4)}`, shrunk to stay inside (0, 1).
pub(crate) fn difference_step<T: Real>(k: usize, x: T) -> T {
    let h = T::epsilon().powf(T::one() / T::from_index(k + 4));
    let room = x.min(T::one() - x) / T::from_index(k.max(1));
    h.min(room * T::lit(0.5))
}

/// Relative residual of
/// `d^k/dx^k [ω^{(a+k,b+k)} G_{n-k}^{(a+k,b+k)}] = (-1)^k n!/(n-k)! ω^{(a,b)} G_n^{(a,b)}`,
/// with the left side taken by central differences. The residual is scaled by
/// `max(1, |rhs|)`.
pub fn weighted_deriv_identity_check<T: Real>(
    p: JacobiParams<T>,
    n: usize,
    k: usize,
    x: T,
) -> T {
    assert!(k <= n, "derivative order must not exceed degree");
    let falling = (0..k).fold(T::one(), |acc, m| acc * T::from_index(n - m));
    let sign = if k.is_multiple_of(2) { T::one() } else { -T::one() };
    let rhs = sign * falling * p.weight(x) * eval_g(p, n, x);
    let kf = T::from_index(k);
    let lifted = JacobiParams { a: p.a + kf, b: p.b + kf };
    let inner = |y: T| lifted.weight(y) * eval_g(lifted, n - k, y);
    let lhs = if k == 0 {
        inner(x)
    } else {
        central_difference(inner, k, x, difference_step(k, x))
    };
    (lhs - rhs).abs() / rhs.abs().max(T::one())
}

/// Gauss-type rule on (0, 1): `∫₀¹ ω g ≈ Σ w_i g(x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<T> {
    pub params: JacobiParams<T>,
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> QuadratureRule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> T {
        self.weights.iter().copied().sum()
    }

    pub fn integrate(&self, f: impl Fn(T) -> T) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Like [`integrate`](Self::integrate) for fallible integrands.
    pub fn try_integrate<E>(&self, mut f: impl FnMut(T) -> Result<T, E>) -> Result<T, E> {
        let mut acc = T::zero();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(x)?;
        }
        Ok(acc)
    }
}

const NEWTON_MAX_ITER: usize = 100;

/// `(P_n(t), P_n'(t))` for the classical (unshifted) polynomial.
fn value_and_slope<T: Real>(a: T, b: T, n: usize, t: T) -> (T, T) {
    let value = recurrence_values(a, b, n, t)[n];
    let lifted = recurrence_values(a + T::one(), b + T::one(), n - 1, t)[n - 1];
    let slope = (T::from_index(n) + a + b + T::one()) * T::lit(0.5) * lifted;
    (value, slope)
}

/// `P_n^{(a,b)}(1-u) / P_n^{(a,b)}(1)` and its `u`-derivative from the
/// terminating hypergeometric series. Accurate in relative terms for
/// `n(n+a+b+1)u/2` up to about 15.
fn series_near_one<T: Real>(a: T, b: T, n: usize, u: T) -> (T, T) {
    let one = T::one();
    let nf = T::from_index(n);
    let z = u * T::lit(0.5);
    let (mut sum, mut dsum, mut term) = (T::zero(), T::zero(), one);
    for k in 0..=n {
        let kf = T::from_index(k);
        sum += term;
        dsum += term * kf / u;
        if k > 4 && term.abs() <= T::epsilon() * T::lit(1e-3) * sum.abs() {
            break;
        }
        term *= (kf - nf) * (nf + a + b + one + kf) / ((a + one + kf) * (kf + one)) * z;
    }
    (sum, dsum)
}

const SERIES_LIMIT: f64 = 15.0;

/// n-point Gauss-Jacobi rule for the weight `ω^{(a,b)}` on (0, 1).
///
/// Roots are found by Newton iteration on the recurrence with deflation of the
/// roots already located, starting from Chebyshev nodes.
pub fn gauss_jacobi<T: Real>(p: JacobiParams<T>, n: usize) -> Result<QuadratureRule<T>> {
    let p = JacobiParams::new(p.a, p.b)?;
    if n == 0 {
        return Err(Error::InvalidParams("quadrature needs at least one point".into()));
    }
    let (a, b) = (p.a, p.b);
    let one = T::one();
    let tol = T::tolerance(1e-14);
    let convergence_error = |index| {
        let (af, bf) = p.to_f64();
        Error::QuadratureConvergence { n, a: af, b: bf, index }
    };

    let mut roots: Vec<T> = Vec::with_capacity(n);
    for k in 0..n {
        // Asymptotic guess θ_k ≈ (k + a/2 + 3/4)π / (n + (a+b+1)/2), counted from t = 1.
        let half = T::lit(0.5);
        let theta = T::PI() * (T::from_index(k) + a * half + T::lit(0.75))
            / (T::from_index(n) + (a + b + one) * half);
        let mut t = theta.cos();
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITER {
            let (val, slope) = value_and_slope(a, b, n, t);
            let deflation: T = roots.iter().map(|&r| one / (t - r)).sum();
            let step = val / (slope - val * deflation);
            if !step.is_finite() {
                break;
            }
            let mut next = t - step;
            if next <= -one || next >= one {
                next = if next <= -one { (t - one) * T::lit(0.5) } else { (t + one) * T::lit(0.5) };
            }
            let moved = (next - t).abs();
            t = next;
            if moved <= tol * t.abs().max(one) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(convergence_error(k));
        }
        roots.push(t);
    }
    roots.sort_by(|x, y| x.partial_cmp(y).expect("finite roots"));

    // Roots close to an endpoint are refined in their distance `u` to it,
    // using P^{(a,b)}(-t) = (-1)^n P^{(b,a)}(t) for the left end.
    let nf = T::from_index(n);
    let lg = |z: T| log_gamma(z).expect("positive Γ argument");
    let ln_c = lg(nf + a + one) + lg(nf + b + one) - lg(nf + a + b + one) - lg(nf + one);
    let two = T::lit(2.0);
    let limit = T::lit(SERIES_LIMIT);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for &t in &roots {
        let right = t >= T::zero();
        let (ea, eb, mut u) = if right { (a, b, one - t) } else { (b, a, one + t) };
        let w = if nf * (nf + a + b + one) * u * T::lit(0.5) <= limit {
            for _ in 0..4 {
                let (val, slope) = series_near_one(ea, eb, n, u);
                let step = val / slope;
                if step.is_finite() && u - step > T::zero() {
                    u -= step;
                }
            }
            let (_, slope) = series_near_one(ea, eb, n, u);
            let ln_value_at_one = lg(nf + ea + one) - lg(ea + one) - lg(nf + one);
            (ln_c - two * ln_value_at_one).exp() / (u * (two - u) * slope * slope)
        } else {
            let (_, slope) = value_and_slope(a, b, n, t);
            ln_c.exp() / ((one - t) * (one + t) * slope * slope)
        };
        if !(w > T::zero()) || !w.is_finite() {
            return Err(Error::QuadratureRejected(format!(
                "non-positive weight {w} at node {t}"
            )));
        }
        nodes.push(if right { one - u / two } else { u / two });
        weights.push(w);
    }
    for (i, pair) in nodes.windows(2).enumerate() {
        if pair[1] <= pair[0] {
            return Err(convergence_error(i + 1));
        }
    }
    Ok(QuadratureRule { params: p, nodes, weights })
}

/// n-point Gauss-Legendre nodes and weights on `[lo, hi]`.
pub fn gauss_legendre_on<T: Real>(n: usize, lo: T, hi: T) -> Result<(Vec<T>, Vec<T>)> {
    let unit = gauss_jacobi(JacobiParams { a: T::zero(), b: T::zero() }, n)?;
    let len = hi - lo;
    let nodes = unit.nodes.iter().map(|&s| lo + len * s).collect();
    let weights = unit.weights.iter().map(|&w| w * len).collect();
    Ok((nodes, weights))
}
