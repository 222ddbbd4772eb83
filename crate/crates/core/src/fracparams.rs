//! Parameters tying the skewness `r` of the two-sided operator to the Jacobi
//! exponent `β`, and the eigen-coefficients of the fractional operators on
//! weighted Jacobi modes.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::specfun::gamma_ratio;

/// Which side of the fractional integral the diffusivity sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// `-D (r D^{-(2-α)} + (1-r) D^{-(2-α)*}) k D u`: `k` inside the fractional integral.
    Acute,
    /// `-D k (r D^{-(2-α)} + (1-r) D^{-(2-α)*}) D u`: `k` outside.
    Grave,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Acute => "acute",
            Variant::Grave => "grave",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "acute" => Ok(Variant::Acute),
            "grave" => Ok(Variant::Grave),
            other => Err(Error::InvalidParams(format!(
                "variant must be \"acute\" or \"grave\", got {other:?}"
            ))),
        }
    }
}

/// `(α, r, β, c**)` satisfying
/// `r = sin(πβ) / (sin(π(α-β)) + sin(πβ))` with `α-1 ≤ β ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracParams<T> {
    pub alpha: T,
    pub r: T,
    pub beta: T,
    /// `sin(πα) / (sin(π(α-β)) + sin(πβ))`, always negative.
    pub c_star_star: T,
}

/// `r` as a function of `β` for fixed `α`.
pub fn skewness_for_beta<T: Real>(alpha: T, beta: T) -> T {
    let pi = T::PI();
    let s_beta = (pi * beta).sin();
    s_beta / ((pi * (alpha - beta)).sin() + s_beta)
}

fn c_star_star<T: Real>(alpha: T, beta: T) -> T {
    let pi = T::PI();
    (pi * alpha).sin() / ((pi * (alpha - beta)).sin() + (pi * beta).sin())
}

impl<T: Real> FracParams<T> {
    /// Solves for `β ∈ [α-1, 1]` by bisection. `r(β)` decreases strictly from 1
    /// at `β = α-1` to 0 at `β = 1`.
    pub fn solve(alpha: T, r: T) -> Result<Self> {
        let one = T::one();
        if !(alpha > one && alpha < T::lit(2.0)) {
            return Err(Error::InvalidParams(format!("alpha must lie in (1, 2), got {alpha}")));
        }
        if !(r >= T::zero() && r <= one) {
            return Err(Error::InvalidParams(format!("r must lie in [0, 1], got {r}")));
        }
        let beta = if r == one {
            alpha - one
        } else if r == T::zero() {
            one
        } else {
            let (mut lo, mut hi) = (alpha - one, one);
            let tol = T::tolerance(1e-14);
            while hi - lo > tol {
                let mid = (lo + hi) * T::lit(0.5);
                if mid <= lo || mid >= hi {
                    break;
                }
                let pi = T::PI();
                let s_beta = (pi * mid).sin();
                let g = r * ((pi * (alpha - mid)).sin() + s_beta) - s_beta;
                // g < 0 means r(mid) > r, so the root lies to the right.
                if g < T::zero() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            (lo + hi) * T::lit(0.5)
        };
        Self::from_beta(alpha, beta, r)
    }

    fn from_beta(alpha: T, beta: T, r: T) -> Result<Self> {
        let css = c_star_star(alpha, beta);
        if !(css < T::zero()) {
            return Err(Error::InvalidParams(format!(
                "c** = {css} is not negative for alpha = {alpha}, beta = {beta}"
            )));
        }
        Ok(Self { alpha, r, beta, c_star_star: css })
    }

    /// Trial-side weight exponents `(α-β, β)`.
    pub fn trial_exponents(&self) -> (T, T) {
        (self.alpha - self.beta, self.beta)
    }

    /// Test-side weight exponents `(β, α-β)`.
    pub fn test_exponents(&self) -> (T, T) {
        (self.beta, self.alpha - self.beta)
    }

    /// `μ_k = c** Γ(k+α)/Γ(k+1)`.
    pub fn mu(&self, k: usize) -> T {
        let kf = T::from_index(k);
        self.c_star_star * gamma_ratio(kf + self.alpha, kf + T::one()).expect("positive arguments")
    }

    /// `σ_k = -c** Γ(k+α-1)/Γ(k+1)`.
    pub fn sigma(&self, k: usize) -> T {
        let kf = T::from_index(k);
        -self.c_star_star
            * gamma_ratio(kf + self.alpha - T::one(), kf + T::one()).expect("positive arguments")
    }

    /// Regularity index `s̃`; `s_f = ∞` for analytic data. The `ε` of the
    /// regularity theory is taken as zero, so these are the limiting values.
    pub fn regularity(&self, advection_free: bool, s_f: T) -> T {
        let one = T::one();
        let shift = if advection_free { one } else { -one };
        let left = self.alpha + (self.alpha - self.beta) + shift;
        let right = self.alpha + self.beta + shift;
        s_f.min(left).min(right)
    }

    /// Predicted `(L², energy)` convergence exponents.
    pub fn predicted_rates(&self, advection_free: bool, s_f: T, variant: Variant) -> (T, T) {
        let s = self.regularity(advection_free, s_f);
        let energy = match variant {
            Variant::Acute => s + self.alpha - T::one(),
            Variant::Grave => s + T::one(),
        };
        (s + self.alpha, energy)
    }
}
