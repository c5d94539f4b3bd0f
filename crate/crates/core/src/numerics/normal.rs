use crate::Real;

/// `Φ(x)` via the complementary error function, accurate to ~1e-16 absolute.
pub fn std_normal_cdf<T: Real>(x: T) -> T {
    T::lit(0.5 * libm::erfc(-x.as_f64() * std::f64::consts::FRAC_1_SQRT_2))
}

/// `φ(x) = e^{-x²/2} / √(2π)`.
pub fn std_normal_pdf<T: Real>(x: T) -> T {
    (-x * x * T::lit(0.5)).exp() / (T::TAU()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate_adaptive;

    #[test]
    fn symmetry() {
        assert_eq!(std_normal_cdf(0.0f64), 0.5);
        let x = 1.234f64;
        assert!((std_normal_cdf(-x) - (1.0 - std_normal_cdf(x))).abs() < 1e-15);
    }

    #[test]
    fn matches_density_quadrature() {
        for x in [-6.0f64, -1.5, 0.3, 1.96, 4.0] {
            let q = 0.5 + integrate_adaptive(std_normal_pdf::<f64>, 0.0, x, 1e-15, 1e-17).unwrap();
            assert!((std_normal_cdf(x) - q).abs() < 1e-12, "x = {x}");
        }
        assert!((std_normal_cdf(1.96f64) - 0.9750).abs() < 1e-4);
    }

    #[test]
    fn far_tails_keep_relative_accuracy() {
        let x = -30.0f64;
        let asym = std_normal_pdf(x) / -x * (1.0 - 1.0 / (x * x) + 3.0 / x.powi(4));
        assert!((std_normal_cdf(x) / asym - 1.0).abs() < 1e-5);
    }
}
