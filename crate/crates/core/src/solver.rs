//! End-to-end solve: assemble, factor, and package the trial coefficients.

use crate::assembly::{assemble, ProblemSpec};
use crate::error::Result;
use crate::fracparams::FracParams;
use crate::linsolve::{condition_estimate, LuFactors};
use crate::scalar::Real;
use crate::spaces::{eval_solution, CoeffVec, WeightSpec};

/// Condition estimates above this set [`Diagnostics::near_singular`].
pub const NEAR_SINGULAR_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics<T> {
    /// Smallest diffusivity seen at the quadrature nodes.
    pub k_min: T,
    /// 1-norm condition estimate of the system matrix.
    pub cond_estimate: T,
    /// `‖Bφ - F‖∞ / (‖B‖∞ ‖φ‖∞ + ‖F‖∞)`.
    pub residual: T,
    pub reciprocal_pivot_growth: T,
    pub near_singular: bool,
    /// First entry of the load vector.
    pub rhs0: T,
}

#[derive(Debug, Clone)]
pub struct Solution<T> {
    pub spec: ProblemSpec<T>,
    pub fp: FracParams<T>,
    /// Coefficients in the trial basis `Ĝ^{(α-β,β)}`.
    pub phi: CoeffVec<T>,
    pub diagnostics: Diagnostics<T>,
}

impl<T: Real> Solution<T> {
    pub fn weights(&self) -> WeightSpec<T> {
        WeightSpec::new(&self.fp)
    }

    /// `u_N(x) = ω(x) φ_N(x)`.
    pub fn eval(&self, x: T) -> T {
        eval_solution(&self.phi, &self.weights(), x)
    }

    /// `u_N` on `points` uniformly spaced nodes including both endpoints.
    pub fn sample(&self, points: usize) -> (Vec<T>, Vec<T>) {
        let grid = uniform_grid(points);
        let values = grid.iter().map(|&x| self.eval(x)).collect();
        (grid, values)
    }
}

/// `points` uniformly spaced values on `[0, 1]`; exact endpoints.
pub fn uniform_grid<T: Real>(points: usize) -> Vec<T> {
    match points {
        0 => Vec::new(),
        1 => vec![T::zero()],
        _ => {
            let last = points - 1;
            (0..points)
                .map(|i| if i == last { T::one() } else { T::from_index(i) / T::from_index(last) })
                .collect()
        }
    }
}

fn inf_norm<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

pub fn solve<T: Real>(spec: &ProblemSpec<T>) -> Result<Solution<T>> {
    let system = assemble(spec)?;
    let lu = LuFactors::new(&system.matrix)?;
    let phi = lu.solve(&system.rhs)?;
    let cond = condition_estimate(&system.matrix, &lu)?;
    let applied = system.matrix.mul_vec(&phi)?;
    let misfit: Vec<T> = applied.iter().zip(&system.rhs).map(|(&a, &b)| a - b).collect();
    let denom = system.matrix.norm_inf() * inf_norm(&phi) + inf_norm(&system.rhs);
    let residual = if denom > T::zero() { inf_norm(&misfit) / denom } else { T::zero() };
    let w = WeightSpec::new(&spec.fp);
    Ok(Solution {
        spec: spec.clone(),
        fp: spec.fp,
        phi: CoeffVec::new(w.trial, phi)?,
        diagnostics: Diagnostics {
            k_min: system.k_min,
            cond_estimate: cond,
            residual,
            reciprocal_pivot_growth: lu.reciprocal_pivot_growth,
            near_singular: cond > T::lit(NEAR_SINGULAR_CONDITION),
            rhs0: system.rhs[0],
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::assemble;
    use crate::expr::Expr;
    use crate::fracparams::Variant;
    use crate::jacobi::eval_g_hat_all;
    use crate::specfun::gamma;
    use approx::assert_relative_eq;

    fn spec(alpha: f64, r: f64, variant: Variant, k: &str, b: &str, c: &str, f: &str, n: usize) -> ProblemSpec<f64> {
        let e = |s: &str| s.parse::<Expr>().unwrap();
        ProblemSpec::new(FracParams::solve(alpha, r).unwrap(), variant, e(k), e(b), e(c), e(f), n)
    }

    /// `Ĝ_m` of the test basis as an expression, by its explicit hypergeometric sum.
    fn test_mode(fp: &FracParams<f64>, m: usize) -> Expr {
        let (a, b) = fp.test_exponents();
        let w = WeightSpec::new(fp);
        let nrm = crate::jacobi::norm_g(w.test, m);
        // P_m^{(a,b)}(t) = Σ_s C(m+a, m-s) C(m+b, s) ((t-1)/2)^s ((t+1)/2)^{m-s}, with (t±1)/2 in x.
        let binom = |top: f64, k: usize| (0..k).fold(1.0, |acc, i| acc * (top - i as f64) / (i + 1) as f64);
        let terms: Vec<String> = (0..=m)
            .map(|s| {
                let coef = binom(m as f64 + a, m - s) * binom(m as f64 + b, s);
                format!("{coef:e}*(x-1)^{s}*x^{}", m - s)
            })
            .collect();
        format!("({})/{nrm:e}", terms.join("+")).parse().unwrap()
    }

    #[test]
    fn single_mode_is_recovered() {
        for &(alpha, r) in &[(1.5, 0.5), (1.3, 0.2), (1.8, 1.0)] {
            let fp = FracParams::solve(alpha, r).unwrap();
            for m in 0..4 {
                let f = test_mode(&fp, m);
                for n in [m.max(1), m + 3, 12] {
                    let mut s = spec(alpha, r, Variant::Acute, "1", "0", "0", "1", n);
                    s.f = f.clone();
                    let sol = solve(&s).unwrap();
                    let diag = fp.c_star_star.abs() * gamma(m as f64 + alpha + 1.0).unwrap() / gamma(m as f64 + 1.0).unwrap();
                    for (j, &v) in sol.phi.coeffs.iter().enumerate() {
                        let want = if j == m { 1.0 / diag } else { 0.0 };
                        assert!((v - want).abs() <= 1e-10, "alpha={alpha} m={m} n={n} j={j}: {v}");
                    }
                }
            }
        }
        let sol = solve(&spec(1.5, 0.5, Variant::Grave, "1", "0", "0", "1", 5)).unwrap();
        let fp = sol.fp;
        let g0 = crate::jacobi::norm_g(WeightSpec::new(&fp).test, 0);
        assert_relative_eq!(sol.phi.coeffs[0], g0 / (fp.c_star_star.abs() * gamma(2.5).unwrap()), max_relative = 1e-12);
    }

    #[test]
    fn boundary_values_and_residual() {
        let s = spec(1.3, 0.5, Variant::Acute, "1+2*x", "exp(x)", "5+sin(x)", "1", 16);
        let sol = solve(&s).unwrap();
        assert_eq!(sol.eval(0.0), 0.0);
        assert_eq!(sol.eval(1.0), 0.0);
        assert!(sol.diagnostics.residual <= 1e-12);
        assert!(!sol.diagnostics.near_singular);
        assert_relative_eq!(sol.diagnostics.k_min, 1.0, max_relative = 1e-2);
        let (grid, values) = sol.sample(11);
        assert_eq!(grid.len(), 11);
        assert_eq!(grid[10], 1.0);
        assert!(values[5] > 0.0);

        // Re-test φ against every test function.
        let system = assemble(&s).unwrap();
        let applied = system.matrix.mul_vec(&sol.phi.coeffs).unwrap();
        let scale = system.rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, f) in applied.iter().zip(&system.rhs) {
            assert!((a - f).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn variants_agree_for_constant_diffusivity() {
        let acute = solve(&spec(1.4, 0.4, Variant::Acute, "1", "exp(x)", "5+sin(x)", "1", 20)).unwrap();
        let grave = solve(&spec(1.4, 0.4, Variant::Grave, "1", "exp(x)", "5+sin(x)", "1", 20)).unwrap();
        for (a, g) in acute.phi.coeffs.iter().zip(&grave.phi.coeffs) {
            assert!((a - g).abs() <= 1e-9);
        }
    }

    #[test]
    fn projection_of_solution_onto_test_basis() {
        // u = ω φ with φ = Ĝ_0 solves the constant-coefficient problem with f = const.
        let s = spec(1.6, 0.4, Variant::Acute, "3", "0", "0", "2", 6);
        let sol = solve(&s).unwrap();
        let w = WeightSpec::new(&sol.fp);
        let x = 0.3;
        let g = eval_g_hat_all(w.trial, 0, x)[0];
        assert_relative_eq!(sol.eval(x), w.omega(x) * g * sol.phi.coeffs[0], max_relative = 1e-12);
        assert!(sol.phi.coeffs[1..].iter().all(|c| c.abs() < 1e-12));
    }

    #[test]
    fn grid() {
        assert_eq!(uniform_grid::<f64>(0), Vec::<f64>::new());
        assert_eq!(uniform_grid::<f64>(1), vec![0.0]);
        assert_eq!(uniform_grid::<f64>(5), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
