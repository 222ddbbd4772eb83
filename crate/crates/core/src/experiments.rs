//! Convergence studies against a high-degree reference solution, and the
//! side-by-side comparison of the two diffusion-operator variants.

use crate::assembly::ProblemSpec;
use crate::error::{domain, Error, Result};
use crate::expr::Expr;
use crate::fracparams::Variant;
use crate::scalar::Real;
use crate::solver::{solve, uniform_grid, Solution};
use crate::spaces::{error_norms, NormInterval, WeightSpec};

/// `ln(e1/e2) / ln(n2/n1)`.
pub fn observed_rate<T: Real>(e1: T, e2: T, n1: usize, n2: usize) -> Result<T> {
    if !(e1 > T::zero() && e2 > T::zero()) {
        return Err(domain("observed_rate", format!("errors must be positive, got {e1} and {e2}")));
    }
    if n1 == 0 || n2 == 0 || n1 == n2 {
        return Err(domain("observed_rate", format!("need distinct positive degrees, got {n1} and {n2}")));
    }
    Ok((e1 / e2).ln() / (T::from_index(n2) / T::from_index(n1)).ln())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow<T> {
    pub n: usize,
    pub err_l2: T,
    pub rate_l2: Option<T>,
    pub err_h1: T,
    pub rate_h1: Option<T>,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport<T> {
    pub rows: Vec<ConvergenceRow<T>>,
    /// Predicted `(L², H¹)` exponents.
    pub predicted: (T, T),
    pub n_ref: usize,
    pub spec: ProblemSpec<T>,
}

impl<T: Real> ConvergenceReport<T> {
    fn mean(values: impl Iterator<Item = T>) -> Option<T> {
        let v: Vec<T> = values.collect();
        (!v.is_empty()).then(|| v.iter().copied().sum::<T>() / T::from_index(v.len()))
    }

    pub fn mean_rate_l2(&self) -> Option<T> {
        Self::mean(self.rows.iter().filter_map(|r| r.rate_l2))
    }

    pub fn mean_rate_h1(&self) -> Option<T> {
        Self::mean(self.rows.iter().filter_map(|r| r.rate_h1))
    }

    /// The same report with errors measured on `interval`. Rates are unchanged.
    pub fn on_interval(&self, interval: NormInterval) -> Self {
        let factor = interval.scale(WeightSpec::new(&self.spec.fp).trial);
        let rows = self
            .rows
            .iter()
            .map(|r| ConvergenceRow { err_l2: r.err_l2 * factor, err_h1: r.err_h1 * factor, ..r.clone() })
            .collect();
        Self { rows, ..self.clone() }
    }
}

fn solve_at<T: Real>(spec: &ProblemSpec<T>) -> Result<Solution<T>> {
    solve(spec).map_err(|e| Error::SolveAt { n: spec.n, source: Box::new(e) })
}

/// Errors of the degree-`n` solutions against the degree-`n_ref` solution.
/// Each solve uses at least `n + 20` quadrature points.
pub fn run_convergence<T: Real>(base: &ProblemSpec<T>, ns: &[usize], n_ref: usize) -> Result<ConvergenceReport<T>> {
    if ns.is_empty() {
        return Err(Error::InvalidParams("need at least one degree".into()));
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParams(format!("degrees must be strictly increasing, got {ns:?}")));
    }
    if let Some(&max) = ns.last() {
        if max >= n_ref {
            return Err(Error::InvalidParams(format!(
                "reference degree {n_ref} must exceed every studied degree (max {max})"
            )));
        }
    }
    let reference = solve_at(&base.at_degree(n_ref))?;
    let mus = [T::zero(), T::one()];
    let mut rows: Vec<ConvergenceRow<T>> = Vec::with_capacity(ns.len());
    for &n in ns {
        let sol = solve_at(&base.at_degree(n))?;
        let errs = error_norms(&reference.phi, &sol.phi, &mus)?;
        let (rate_l2, rate_h1) = match rows.last() {
            Some(prev) => (
                observed_rate(prev.err_l2, errs[0], prev.n, n).ok(),
                observed_rate(prev.err_h1, errs[1], prev.n, n).ok(),
            ),
            None => (None, None),
        };
        rows.push(ConvergenceRow { n, err_l2: errs[0], rate_l2, err_h1: errs[1], rate_h1 });
    }
    let predicted = base.fp.predicted_rates(base.advection_free(), T::infinity(), base.variant);
    Ok(ConvergenceReport { rows, predicted, n_ref, spec: base.at_degree(n_ref) })
}

/// Solutions of both variants for one diffusivity, sampled on the grid.
#[derive(Debug, Clone)]
pub struct ComparisonRun<T> {
    pub name: String,
    pub k: Expr,
    pub u_acute: Vec<T>,
    pub u_grave: Vec<T>,
    pub acute: Solution<T>,
    pub grave: Solution<T>,
}

impl<T: Real> ComparisonRun<T> {
    /// `max_x |u_acute - u_grave|` over the grid.
    pub fn max_variant_gap(&self) -> T {
        self.u_acute
            .iter()
            .zip(&self.u_grave)
            .fold(T::zero(), |m, (&a, &g)| m.max((a - g).abs()))
    }
}

#[derive(Debug, Clone)]
pub struct ComparisonReport<T> {
    pub grid: Vec<T>,
    pub runs: Vec<ComparisonRun<T>>,
    pub spec: ProblemSpec<T>,
}

impl<T: Real> ComparisonReport<T> {
    pub fn run(&self, name: &str) -> Option<&ComparisonRun<T>> {
        self.runs.iter().find(|r| r.name == name)
    }
}

/// Solves `base` with each named diffusivity in both variants.
pub fn run_comparison<T: Real>(
    base: &ProblemSpec<T>,
    k_variants: &[(String, Expr)],
    grid_points: usize,
) -> Result<ComparisonReport<T>> {
    if grid_points < 2 {
        return Err(Error::InvalidParams(format!("grid needs at least 2 points, got {grid_points}")));
    }
    let grid: Vec<T> = uniform_grid(grid_points);
    let mut runs = Vec::with_capacity(k_variants.len());
    for (name, k) in k_variants {
        let spec = ProblemSpec { k: k.clone(), ..base.clone() };
        let acute = solve_at(&spec.with_variant(Variant::Acute))?;
        let grave = solve_at(&spec.with_variant(Variant::Grave))?;
        let u_acute = grid.iter().map(|&x| acute.eval(x)).collect();
        let u_grave = grid.iter().map(|&x| grave.eval(x)).collect();
        runs.push(ComparisonRun { name: name.clone(), k: k.clone(), u_acute, u_grave, acute, grave });
    }
    Ok(ComparisonReport { grid, runs, spec: base.clone() })
}

/// One-sided difference quotients `(u(x0) - u(x0-h))/h` and `(u(x0+h) - u(x0))/h`.
pub fn interface_slopes<T: Real>(sol: &Solution<T>, x0: T, h: T) -> (T, T) {
    let mid = sol.eval(x0);
    ((mid - sol.eval(x0 - h)) / h, (sol.eval(x0 + h) - mid) / h)
}
