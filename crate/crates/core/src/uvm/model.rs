use crate::{Error, Real, Result};

/// Volatility band `σ₁ ≤ ν ≤ σ₂`, horizon `T` and stage count `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UvmModel<T> {
    pub sigma1: T,
    pub sigma2: T,
    pub horizon: T,
    pub stages: usize,
}

impl<T: Real> UvmModel<T> {
    /// `σ₁ = σ₂` is accepted: the band collapses to Black–Scholes at that volatility.
    pub fn new(sigma1: T, sigma2: T, horizon: T, stages: usize) -> Result<Self> {
        if !(sigma1 >= T::zero() && sigma1.is_finite()) {
            return Err(Error::Input(format!("sigma1 must be ≥ 0, got {sigma1}")));
        }
        if !(sigma2 > T::zero() && sigma2.is_finite() && sigma2 >= sigma1) {
            return Err(Error::Input(format!(
                "sigma2 must be positive and ≥ sigma1 = {sigma1}, got {sigma2}"
            )));
        }
        if !(horizon > T::zero() && horizon.is_finite()) {
            return Err(Error::Input(format!("horizon T must be positive, got {horizon}")));
        }
        if stages == 0 {
            return Err(Error::Input("stage count n must be at least 1".into()));
        }
        Ok(Self {
            sigma1,
            sigma2,
            horizon,
            stages,
        })
    }

    /// Rate `λ_n = n / T` of each exponential clock.
    pub fn lambda(&self) -> T {
        T::count(self.stages) / self.horizon
    }

    pub fn exponents(&self) -> Result<Exponents<T>> {
        exponents(self)
    }
}

/// Roots `γ₁ < 0` and `γ₂ > 1` of `(σ²/2)γ(γ-1) = λ_n` at the band ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponents<T> {
    pub gamma1: T,
    pub gamma2: T,
}

impl<T: Real> Exponents<T> {
    pub fn new(gamma1: T, gamma2: T) -> Result<Self> {
        if !(gamma1 < T::zero() && gamma2 > T::one() && gamma2.is_finite() && gamma1.is_finite()) {
            return Err(Error::Input(format!(
                "exponents need γ₁ < 0 < 1 < γ₂, got γ₁ = {gamma1}, γ₂ = {gamma2}"
            )));
        }
        Ok(Self { gamma1, gamma2 })
    }

    /// `γ₂(γ₂-1) / (γ₂-γ₁)`, the weight of the `r ≤ 1` branch of the mixing density.
    pub fn lower_weight(&self) -> T {
        self.gamma2 * (self.gamma2 - T::one()) / (self.gamma2 - self.gamma1)
    }

    /// `γ₁(γ₁-1) / (γ₂-γ₁)`.
    pub fn upper_weight(&self) -> T {
        self.gamma1 * (self.gamma1 - T::one()) / (self.gamma2 - self.gamma1)
    }
}

/// `γ₂ = (1 + √(1 + 8λ/σ²)) / 2`.
pub fn upper_exponent<T: Real>(sigma: T, lambda: T) -> T {
    (T::one() + (T::one() + T::lit(8.0) * lambda / (sigma * sigma)).sqrt()) * T::lit(0.5)
}

/// `γ₁ = (1 - √(1 + 8λ/σ²)) / 2`.
pub fn lower_exponent<T: Real>(sigma: T, lambda: T) -> T {
    (T::one() - (T::one() + T::lit(8.0) * lambda / (sigma * sigma)).sqrt()) * T::lit(0.5)
}

/// Stage exponents; `σ₁ = 0` has no bounded `x^{γ₁}` mode and is rejected.
pub fn exponents<T: Real>(model: &UvmModel<T>) -> Result<Exponents<T>> {
    if model.sigma1 <= T::zero() {
        return Err(Error::Input(
            "γ₁ needs sigma1 > 0; use the digital module for sigma1 = 0".into(),
        ));
    }
    let lambda = model.lambda();
    Exponents::new(
        lower_exponent(model.sigma1, lambda),
        upper_exponent(model.sigma2, lambda),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_value() {
        let m = UvmModel::new(0.1, 0.2, 0.5, 10).unwrap();
        let e = exponents(&m).unwrap();
        assert!((e.gamma2 - (1.0 + 4001f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!((e.gamma2 - 32.1268).abs() < 1e-4);
    }

    #[test]
    fn roots_solve_the_quadratic() {
        let m = UvmModel::new(0.3f64, 0.3, 1.0, 7).unwrap();
        let e = exponents(&m).unwrap();
        let lam = m.lambda();
        for g in [e.gamma1, e.gamma2] {
            assert!((0.045 * g * (g - 1.0) - lam).abs() < 1e-10 * lam);
        }
        assert!((e.gamma1 + e.gamma2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn only_the_ratio_matters() {
        let a = exponents(&UvmModel::new(0.1, 0.4, 0.5, 10).unwrap()).unwrap();
        let b = exponents(&UvmModel::new(0.1, 0.4, 1.0, 20).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sigma1_zero_has_no_lower_root() {
        let m = UvmModel::new(0.0, 0.4, 1.0, 10).unwrap();
        assert!(matches!(exponents(&m), Err(Error::Input(_))));
        assert!(UvmModel::new(0.5, 0.4, 1.0, 10).is_err());
        assert!(UvmModel::new(0.1, 0.4, -1.0, 10).is_err());
        assert!(UvmModel::new(0.1, 0.4, 1.0, 0).is_err());
    }
}
