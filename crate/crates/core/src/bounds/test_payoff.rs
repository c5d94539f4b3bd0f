use std::sync::Arc;

use crate::numerics::{std_normal_cdf, LogGrid};
use crate::uvm::Payoff;
use crate::{Real, Result};

/// Symmetric piecewise-quadratic payoff with `h(x) = 1 - h(1/x)`:
/// `0` on `(0, ½]`, `2(x-½)²` on `[½, 1]`, `1 - 2(1/x-½)²` on `[1, 2]`, `1` above.
///
/// Continuous and C¹, convex on `[0, 1]`, concave on `[1, ∞)`; `x0 = ½`, `b0 = 1`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TestPayoff;

impl TestPayoff {
    pub const X0: f64 = 0.5;
    pub const B0: f64 = 1.0;

    pub fn eval<T: Real>(x: T) -> T {
        let half = T::lit(0.5);
        let two = T::lit(2.0);
        if x <= half {
            T::zero()
        } else if x <= T::one() {
            two * (x - half) * (x - half)
        } else if x <= two {
            let y = x.recip() - half;
            T::one() - two * y * y
        } else {
            T::one()
        }
    }

    /// Sampled onto `grid` as a [`Payoff`].
    pub fn payoff<T: Real>(grid: Arc<LogGrid<T>>) -> Result<Payoff<T>> {
        Payoff::from_fn(Self::eval, T::lit(Self::X0), T::lit(Self::B0), grid)
    }

    /// `E[h(X_T)]` for driftless geometric Brownian motion from `x` at volatility `sigma`.
    pub fn lognormal_value<T: Real>(x: T, sigma: T, horizon: T) -> T {
        let (x, s, t) = (x.as_f64(), sigma.as_f64(), horizon.as_f64());
        let var = s * s * t;
        let sd = var.sqrt();
        // E[X^p 1{a < X < b}]
        let band = |p: f64, a: f64, b: f64| {
            let d = |k: f64| ((x / k).ln() + (p - 0.5) * var) / sd;
            let upper = if b.is_infinite() { 0.0 } else { std_normal_cdf(d(b)) };
            x.powf(p) * (0.5 * p * (p - 1.0) * var).exp() * (std_normal_cdf(d(a)) - upper)
        };
        let v = 2.0 * band(2.0, 0.5, 1.0) - 2.0 * band(1.0, 0.5, 1.0) + 0.5 * band(0.0, 0.5, 1.0)
            + 0.5 * band(0.0, 1.0, 2.0)
            + 2.0 * band(-1.0, 1.0, 2.0)
            - 2.0 * band(-2.0, 1.0, 2.0)
            + band(0.0, 2.0, f64::INFINITY);
        T::lit(v)
    }
}
