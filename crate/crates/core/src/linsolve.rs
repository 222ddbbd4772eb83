//! Dense LU factorization with partial pivoting for the small square systems
//! produced by assembly.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Square matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from equally long rows.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension(format!(
                    "row {i} has length {}, expected {n}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks(self.n.max(1))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> T {
        self.rows()
            .map(|r| r.iter().map(|v| v.abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> T {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self[(i, j)].abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    pub fn mul_vec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.n {
            return Err(Error::Dimension(format!(
                "vector of length {} against matrix of order {}",
                x.len(),
                self.n
            )));
        }
        Ok(self
            .rows()
            .take(self.n)
            .map(|r| r.iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::Dimension(format!(
                "orders {} and {} differ",
                self.n, other.n
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect();
        Ok(Self { n: self.n, data })
    }

    pub fn scaled(&self, s: T) -> Self {
        Self { n: self.n, data: self.data.iter().map(|&v| v * s).collect() }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

/// `P A = L U`, with unit-diagonal `L` and `U` packed into one matrix.
#[derive(Debug, Clone)]
pub struct LuFactors<T> {
    lu: DenseMatrix<T>,
    /// Row `i` of `PA` is row `perm[i]` of `A`.
    perm: Vec<usize>,
    /// `max |A| / max |U|`; small values flag element growth.
    pub reciprocal_pivot_growth: T,
}

impl<T: Real> LuFactors<T> {
    /// Factors `a`. A pivot below `1e-14 · max |a_ij|` is reported as singular.
    pub fn new(a: &DenseMatrix<T>) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::Dimension("matrix has non-finite entries".into()));
        }
        let n = a.order();
        let scale = a.max_abs();
        let threshold = T::tolerance(1e-14) * scale;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pivot_abs) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pivot_abs > threshold) || scale == T::zero() {
                return Err(Error::Singular { pivot: k });
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor != T::zero() {
                    for j in k + 1..n {
                        let u = lu[(k, j)];
                        lu[(i, j)] -= factor * u;
                    }
                }
            }
        }
        let mut u_max = T::zero();
        for i in 0..n {
            for j in i..n {
                u_max = u_max.max(lu[(i, j)].abs());
            }
        }
        let reciprocal_pivot_growth = if u_max > T::zero() { scale / u_max } else { T::one() };
        Ok(Self { lu, perm, reciprocal_pivot_growth })
    }

    pub fn order(&self) -> usize {
        self.lu.order()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.order() {
            return Err(Error::Dimension(format!(
                "right-hand side of length {len} for a system of order {}",
                self.order()
            )));
        }
        Ok(())
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        self.check_len(b.len())?;
        let n = self.order();
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc / self.lu[(i, i)];
        }
        Ok(x)
    }

    /// Solves `Aᵀ x = b`.
    pub fn solve_transpose(&self, b: &[T]) -> Result<Vec<T>> {
        self.check_len(b.len())?;
        let n = self.order();
        // Aᵀ = Uᵀ Lᵀ P.
        let mut y = b.to_vec();
        for i in 0..n {
            let mut acc = y[i];
            for j in 0..i {
                acc -= self.lu[(j, i)] * y[j];
            }
            y[i] = acc / self.lu[(i, i)];
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in i + 1..n {
                acc -= self.lu[(j, i)] * y[j];
            }
            y[i] = acc;
        }
        let mut x = vec![T::zero(); n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        Ok(x)
    }

    /// Unit lower factor `L`.
    pub fn lower(&self) -> DenseMatrix<T> {
        let n = self.order();
        let mut l = DenseMatrix::identity(n);
        for i in 0..n {
            for j in 0..i {
                l[(i, j)] = self.lu[(i, j)];
            }
        }
        l
    }

    /// Upper factor `U`.
    pub fn upper(&self) -> DenseMatrix<T> {
        let n = self.order();
        let mut u = DenseMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                u[(i, j)] = self.lu[(i, j)];
            }
        }
        u
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Estimate of `‖A⁻¹‖₁` (Hager's method as refined by Higham).
    pub fn inverse_norm_one_estimate(&self) -> Result<T> {
        let n = self.order();
        if n == 0 {
            return Ok(T::zero());
        }
        let nf = T::from_index(n);
        let mut x = vec![T::one() / nf; n];
        let mut estimate = T::zero();
        for _ in 0..5 {
            let y = self.solve(&x)?;
            let norm: T = y.iter().map(|v| v.abs()).sum();
            let xi: Vec<T> = y.iter().map(|&v| if v >= T::zero() { T::one() } else { -T::one() }).collect();
            let z = self.solve_transpose(&xi)?;
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.abs()))
                .fold((0, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            let ztx: T = z.iter().zip(&x).map(|(&a, &b)| a * b).sum();
            if norm <= estimate || zmax <= ztx {
                estimate = estimate.max(norm);
                break;
            }
            estimate = norm;
            x = vec![T::zero(); n];
            x[j] = T::one();
        }
        // Alternating test vector guards against the known failure cases.
        let mut alt = vec![T::zero(); n];
        for (i, v) in alt.iter_mut().enumerate() {
            let sign = if i % 2 == 0 { T::one() } else { -T::one() };
            *v = sign * (T::one() + T::from_index(i) / T::from_index((n - 1).max(1)));
        }
        let y = self.solve(&alt)?;
        let alt_est = T::lit(2.0) * y.iter().map(|v| v.abs()).sum::<T>() / (T::lit(3.0) * nf);
        Ok(estimate.max(alt_est))
    }
}

/// Result of [`lu_solve`].
#[derive(Debug, Clone)]
pub struct LuSolution<T> {
    pub x: Vec<T>,
    pub reciprocal_pivot_growth: T,
}

/// Solves `A x = rhs` by LU with partial pivoting.
pub fn lu_solve<T: Real>(a: &DenseMatrix<T>, rhs: &[T]) -> Result<LuSolution<T>> {
    let lu = LuFactors::new(a)?;
    let x = lu.solve(rhs)?;
    Ok(LuSolution { x, reciprocal_pivot_growth: lu.reciprocal_pivot_growth })
}

/// 1-norm condition estimate `‖A‖₁ · est(‖A⁻¹‖₁)`.
pub fn condition_estimate<T: Real>(a: &DenseMatrix<T>, lu: &LuFactors<T>) -> Result<T> {
    Ok(a.norm_one() * lu.inverse_norm_one_estimate()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_matrix(rng: &mut StdRng, n: usize) -> DenseMatrix<f64> {
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        DenseMatrix::from_rows(&rows).unwrap()
    }

    fn inf_norm(v: &[f64]) -> f64 {
        v.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    #[test]
    fn small_cases() {
        let r = vec![1.0, -2.0, 3.5];
        assert_eq!(lu_solve(&DenseMatrix::identity(3), &r).unwrap().x, r);

        let d = [2.0, 4.0, 0.5];
        let x = lu_solve(&DenseMatrix::from_diagonal(&d), &r).unwrap().x;
        for i in 0..3 {
            assert_relative_eq!(x[i], r[i] / d[i], epsilon = 1e-15);
        }

        let swap = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(lu_solve(&swap, &[3.0, 7.0]).unwrap().x, vec![7.0, 3.0]);
    }

    #[test]
    fn singular_matrices_name_the_pivot() {
        let m = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert_eq!(LuFactors::new(&m).unwrap_err(), Error::Singular { pivot: 1 });
        assert_eq!(LuFactors::new(&DenseMatrix::<f64>::zeros(3)).unwrap_err(), Error::Singular { pivot: 0 });
        let bad = DenseMatrix::from_rows(&[vec![1.0]]).unwrap();
        assert!(lu_solve(&bad, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn manufactured_solutions() {
        let mut rng = StdRng::seed_from_u64(7);
        for &n in &[1usize, 2, 5, 17, 40, 64] {
            let a = random_matrix(&mut rng, n);
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let b = a.mul_vec(&x).unwrap();
            let got = lu_solve(&a, &b).unwrap().x;
            let diff: Vec<f64> = got.iter().zip(&x).map(|(g, e)| g - e).collect();
            assert!(inf_norm(&diff) <= 1e-9 * inf_norm(&x), "n={n}");
            let res: Vec<f64> = a.mul_vec(&got).unwrap().iter().zip(&b).map(|(p, q)| p - q).collect();
            assert!(inf_norm(&res) <= 1e-10 * a.norm_inf() * inf_norm(&got));
        }
    }

    #[test]
    fn permuted_reconstruction() {
        let mut rng = StdRng::seed_from_u64(11);
        for &n in &[3usize, 20, 65] {
            let a = random_matrix(&mut rng, n);
            let f = LuFactors::new(&a).unwrap();
            let (l, u) = (f.lower(), f.upper());
            for i in 0..n {
                for j in 0..n {
                    let lu: f64 = (0..n).map(|k| l[(i, k)] * u[(k, j)]).sum();
                    let pa = a[(f.permutation()[i], j)];
                    assert!((lu - pa).abs() <= 1e-12 * a.norm_inf());
                }
            }
            assert!(f.reciprocal_pivot_growth > 0.0);
        }
    }

    #[test]
    fn transpose_solve() {
        let mut rng = StdRng::seed_from_u64(3);
        let a = random_matrix(&mut rng, 9);
        let f = LuFactors::new(&a).unwrap();
        let x: Vec<f64> = (0..9).map(|i| i as f64 - 4.0).collect();
        let b = a.transpose().mul_vec(&x).unwrap();
        let got = f.solve_transpose(&b).unwrap();
        for (g, e) in got.iter().zip(&x) {
            assert_relative_eq!(g, e, epsilon = 1e-10);
        }
    }

    #[test]
    fn condition_estimates() {
        let d = DenseMatrix::from_diagonal(&[1.0, 1e-3, 10.0]);
        let f = LuFactors::new(&d).unwrap();
        assert_relative_eq!(condition_estimate(&d, &f).unwrap(), 1e4, max_relative = 1e-12);

        // Exact 1-norm condition of a random matrix by explicit inverse.
        let mut rng = StdRng::seed_from_u64(5);
        let a = random_matrix(&mut rng, 12);
        let f = LuFactors::new(&a).unwrap();
        let mut inv_norm: f64 = 0.0;
        for j in 0..12 {
            let mut e = vec![0.0; 12];
            e[j] = 1.0;
            inv_norm = inv_norm.max(f.solve(&e).unwrap().iter().map(|v| v.abs()).sum());
        }
        let exact = a.norm_one() * inv_norm;
        let est = condition_estimate(&a, &f).unwrap();
        assert!(est <= exact * (1.0 + 1e-12) && est >= exact / 10.0, "{est} vs {exact}");
    }
}
