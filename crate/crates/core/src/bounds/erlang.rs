use rand::Rng;

use crate::numerics::{composite_gauss_legendre, integrate_adaptive};
use crate::{Error, Real, Result};

/// Gamma(n, λ) law of the sum of `n` exponential clocks with rate `λ = n / T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErlangHorizon<T> {
    pub stages: usize,
    pub lambda: T,
}

impl<T: Real> ErlangHorizon<T> {
    /// Horizon whose mean is `horizon`.
    pub fn new(stages: usize, horizon: T) -> Result<Self> {
        if stages == 0 {
            return Err(Error::Input("Erlang shape n must be at least 1".into()));
        }
        if !(horizon > T::zero() && horizon.is_finite()) {
            return Err(Error::Input(format!("horizon T must be positive, got {horizon}")));
        }
        Ok(Self {
            stages,
            lambda: T::count(stages) / horizon,
        })
    }

    pub fn mean(&self) -> T {
        T::count(self.stages) / self.lambda
    }

    pub fn variance(&self) -> T {
        self.mean() / self.lambda
    }

    pub fn pdf(&self, z: T) -> T {
        erlang_pdf(self, z)
    }

    /// `P(Z > z) = e^{-λz} Σ_{k<n} (λz)^k / k!`.
    pub fn survival(&self, z: T) -> T {
        if z <= T::zero() {
            return T::one();
        }
        let lz = (self.lambda * z).as_f64();
        let logs: Vec<f64> = (0..self.stages)
            .map(|k| -lz + k as f64 * lz.ln() - libm::lgamma(k as f64 + 1.0))
            .collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = logs.iter().map(|l| (l - top).exp()).sum();
        T::lit((top + sum.ln()).exp().min(1.0))
    }

    /// One draw as a sum of `n` inverse-CDF exponentials.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        let lambda = self.lambda.as_f64();
        let z: f64 = (0..self.stages)
            .map(|_| -(1.0 - rng.random::<f64>()).ln() / lambda)
            .sum();
        T::lit(z)
    }

    /// Integration breakpoints: one per standard deviation around the mean,
    /// out to `T + 12T/√n` or further while the upper tail still exceeds 1e-14.
    fn breakpoints(&self) -> Vec<T> {
        let (m, sd) = (self.mean(), self.variance().sqrt());
        let mut hi = m + T::lit(12.0) * sd;
        while self.survival(hi) > T::lit(1e-14) {
            hi += sd;
        }
        let mut pts = vec![T::zero()];
        let mut j = -12i32;
        loop {
            let p = m + T::lit(j as f64) * sd;
            if p >= hi {
                break;
            }
            if p > T::zero() {
                pts.push(p);
            }
            j += 1;
        }
        pts.push(hi);
        pts
    }
}

/// `λⁿ zⁿ⁻¹ e^{-λz} / (n-1)!`. With `a = n - 1` and `λz = a(1 + d)` the log is
/// `ln λ + (a ln a - a - ln a!) + a(ln(1+d) - d)`, which keeps the z-dependent
/// part free of cancellation for large `n`.
pub fn erlang_pdf<T: Real>(h: &ErlangHorizon<T>, z: T) -> T {
    if z < T::zero() {
        return T::zero();
    }
    let (l, z) = (h.lambda.as_f64(), z.as_f64());
    if h.stages == 1 {
        return T::lit(l * (-l * z).exp());
    }
    if z == 0.0 {
        return T::zero();
    }
    let a = (h.stages - 1) as f64;
    let d = l * z / a - 1.0;
    let c = a * a.ln() - a - libm::lgamma(a + 1.0);
    T::lit((l.ln() + c + a * (d.ln_1p() - d)).exp())
}

/// Default relative accuracy of [`erlang_mixture`].
pub const MIXTURE_REL_TOL: f64 = 1e-6;

/// `∫ value(z) · Erlang(dz)`, adaptively per standard-deviation panel.
pub fn erlang_mixture<T: Real>(value_of_horizon: impl Fn(T) -> T, h: &ErlangHorizon<T>) -> Result<T> {
    erlang_mixture_with(value_of_horizon, h, T::lit(MIXTURE_REL_TOL))
}

pub fn erlang_mixture_with<T: Real>(
    value_of_horizon: impl Fn(T) -> T,
    h: &ErlangHorizon<T>,
    rel_tol: T,
) -> Result<T> {
    let pts = h.breakpoints();
    let f = |z: T| value_of_horizon(z) * erlang_pdf(h, z);
    // a coarse pass sets the absolute floor for panels where the integrand vanishes
    let rough: T = pts
        .windows(2)
        .map(|w| crate::numerics::gauss_legendre8(f, w[0], w[1]).abs())
        .fold(T::zero(), |a, b| a + b);
    let floor = rel_tol * rough / T::count(pts.len());
    let mut total = T::zero();
    for w in pts.windows(2) {
        total += integrate_adaptive(f, w[0], w[1], rel_tol, floor)?;
    }
    Ok(total)
}

/// Fixed-rule variant for noisy horizon values (trees, Monte Carlo): eight-point
/// Gauss–Legendre on `panels_per_sd` equal panels per standard deviation,
/// with horizon values evaluated in parallel.
pub fn erlang_mixture_fixed<T: Real>(
    value_of_horizon: impl Fn(T) -> T + Sync,
    h: &ErlangHorizon<T>,
    panels_per_sd: usize,
) -> T {
    let pts = h.breakpoints();
    let f = |z: T| value_of_horizon(z) * erlang_pdf(h, z);
    pts.windows(2)
        .map(|w| composite_gauss_legendre(f, w[0], w[1], panels_per_sd))
        .fold(T::zero(), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exponential_case() {
        let h = ErlangHorizon::new(1, 2.0f64).unwrap();
        for z in [0.0, 0.3, 1.7] {
            assert!((h.pdf(z) - 0.5 * (-0.5 * z).exp()).abs() < 1e-15);
            assert!((h.survival(z) - (-0.5 * z).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn density_normalised_with_mean_t() {
        for n in [1usize, 2, 10, 200, 10_000] {
            let h = ErlangHorizon::new(n, 0.7f64).unwrap();
            let mass = erlang_mixture_with(|_| 1.0, &h, 1e-13).unwrap();
            let mean = erlang_mixture_with(|z| z, &h, 1e-13).unwrap();
            assert!((mass - 1.0).abs() < 1e-10, "n = {n}: mass {mass}");
            assert!((mean - 0.7).abs() < 1e-8, "n = {n}: mean {mean}");
            let fixed = erlang_mixture_fixed(|_| 1.0, &h, 4);
            assert!((fixed - 1.0).abs() < 1e-9, "n = {n}: fixed {fixed}");
        }
    }

    #[test]
    fn survival_matches_density() {
        let h = ErlangHorizon::new(7, 1.0f64).unwrap();
        let tail = integrate_adaptive(|z| h.pdf(z), 1.3, 30.0, 1e-13, 1e-16).unwrap();
        assert!((h.survival(1.3) - tail).abs() < 1e-12);
    }

    #[test]
    fn sample_variance_concentrates() {
        let h = ErlangHorizon::new(10, 1.0f64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let zs: Vec<f64> = (0..n).map(|_| h.sample(&mut rng)).collect();
        let mean = zs.iter().sum::<f64>() / n as f64;
        let var = zs.iter().map(|z| (z - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((var / h.variance() - 1.0).abs() < 0.05, "var {var}");
        assert!((h.variance() - 0.1).abs() < 1e-15);
    }
}
