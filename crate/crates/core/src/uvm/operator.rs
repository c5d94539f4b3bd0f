use std::sync::Arc;

use crate::numerics::{ExpSweep, GridFunction, TailFit};
use crate::{Real, Result};

use super::model::Exponents;

/// Density `f` on `(0, ∞)` whose `b`-rescaling defines `β`; discontinuous at 1.
pub fn mixing_density<T: Real>(exp: &Exponents<T>, r: T) -> T {
    if r <= T::one() {
        exp.lower_weight() * r.powf(exp.gamma2 - T::lit(2.0))
    } else {
        exp.upper_weight() * r.powf(exp.gamma1 - T::lit(2.0))
    }
}

/// Which of the two kernels `H_b^i`: `Above` is `i = 1` (`x > b`), `Below` is `i = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelSide {
    Above,
    Below,
}

/// The operator `T_b` prepared for one input `φ`.
///
/// In `u = ln x` every integral in `β`, `H_b^i` and `T_b` reduces to four
/// exponential sweeps of `φ`, tabulated once here; `β[φ](b)` and `T_b[φ]` at
/// any `b` are then `O(1)` and `O(nodes)` respectively.
#[derive(Debug, Clone)]
pub struct Operator<'a, T> {
    phi: &'a GridFunction<T>,
    exp: Exponents<T>,
    /// rates `γ₂-1`, `γ₂`, `-γ₁`, `1-γ₁`
    l2: ExpSweep<'a, T>,
    r2: ExpSweep<'a, T>,
    l1: ExpSweep<'a, T>,
    r1: ExpSweep<'a, T>,
    c1: T,
    c2: T,
}

impl<'a, T: Real> Operator<'a, T> {
    pub fn new(phi: &'a GridFunction<T>, exp: Exponents<T>) -> Result<Self> {
        let (g1, g2) = (exp.gamma1, exp.gamma2);
        let one = T::one();
        let ((l2, r2), (l1, r1)) = rayon::join(
            || rayon::join(|| ExpSweep::left(phi, g2 - one), || ExpSweep::right(phi, g2)),
            || rayon::join(|| ExpSweep::left(phi, -g1), || ExpSweep::right(phi, one - g1)),
        );
        let two = T::lit(2.0);
        Ok(Self {
            phi,
            exp,
            l2: l2?,
            r2: r2?,
            l1: l1?,
            r1: r1?,
            c1: g1 * (g1 - one) / (one - two * g1),
            c2: g2 * (g2 - one) / (two * g2 - one),
        })
    }

    pub fn exponents(&self) -> &Exponents<T> {
        &self.exp
    }

    pub fn input(&self) -> &GridFunction<T> {
        self.phi
    }

    /// `β[φ](b)`.
    pub fn beta(&self, b: T) -> Result<T> {
        let bu = b.ln();
        Ok(self.exp.lower_weight() * self.l2.at_log(bu)? + self.exp.upper_weight() * self.r1.at_log(bu)?)
    }

    /// `β[φ](b) - φ(b)`: positive below the boundary, negative above.
    pub fn boundary_residual(&self, b: T) -> Result<T> {
        Ok(self.beta(b)? - self.phi.eval(b))
    }

    /// `H_b^i[φ](y)` for the rescaled argument `y = x/b`.
    pub fn h_kernel(&self, b: T, side: KernelSide, y: T) -> Result<T> {
        let bu = b.ln();
        let u = bu + y.ln();
        Ok(match side {
            KernelSide::Below => {
                let at = self.l2.at_log(u)? + self.r2.at_log(u)?;
                let base = self.l2.at_log(bu)? + self.r2.at_log(bu)?;
                self.c2 * (at * (-self.exp.gamma2 * (u - bu)).exp() - base)
            }
            KernelSide::Above => {
                let at = self.l1.at_log(u)? + self.r1.at_log(u)?;
                let base = self.l1.at_log(bu)? + self.r1.at_log(bu)?;
                self.c1 * (at * (-self.exp.gamma1 * (u - bu)).exp() - base)
            }
        })
    }

    /// `T_b[φ](x)` at a single point.
    pub fn apply_at(&self, b: T, x: T) -> Result<T> {
        let (bu, u) = (b.ln(), x.ln());
        let beta = self.beta(b)?;
        if u <= bu {
            let a = beta - self.c2 * (self.l2.at_log(bu)? + self.r2.at_log(bu)?);
            Ok((self.exp.gamma2 * (u - bu)).exp() * a + self.c2 * (self.l2.at_log(u)? + self.r2.at_log(u)?))
        } else {
            let a = beta - self.c1 * (self.l1.at_log(bu)? + self.r1.at_log(bu)?);
            Ok((self.exp.gamma1 * (u - bu)).exp() * a + self.c1 * (self.l1.at_log(u)? + self.r1.at_log(u)?))
        }
    }

    /// `T_b[φ]` on the grid of `φ`, with refitted tails.
    pub fn apply(&self, b: T) -> Result<GridFunction<T>> {
        let bu = b.ln();
        let beta = self.beta(b)?;
        let a2 = beta - self.c2 * (self.l2.at_log(bu)? + self.r2.at_log(bu)?);
        let a1 = beta - self.c1 * (self.l1.at_log(bu)? + self.r1.at_log(bu)?);
        let g = self.phi.grid();
        let (g1, g2) = (self.exp.gamma1, self.exp.gamma2);
        let (l2, r2, l1, r1) = (self.l2.nodes(), self.r2.nodes(), self.l1.nodes(), self.r1.nodes());
        let values: Vec<T> = g
            .logs()
            .iter()
            .enumerate()
            .map(|(i, &u)| {
                if u <= bu {
                    (g2 * (u - bu)).exp() * a2 + self.c2 * (l2[i] + r2[i])
                } else {
                    (g1 * (u - bu)).exp() * a1 + self.c1 * (l1[i] + r1[i])
                }
            })
            .collect();
        let (lt, rt) = (self.phi.left_tail(), self.phi.right_tail());
        let left_exp = if lt.is_constant() { g2 } else { lt.exponent.min(g2) };
        let right_exp = if rt.is_constant() { g1 } else { rt.exponent.max(g1) };
        GridFunction::with_fitted_tails(
            Arc::clone(g),
            values,
            TailFit::with_log_power(lt.constant, left_exp),
            TailFit::with_log_power(rt.constant, right_exp),
        )
    }
}

/// `β[φ](b)`.
pub fn beta_functional<T: Real>(phi: &GridFunction<T>, b: T, exp: &Exponents<T>) -> Result<T> {
    Operator::new(phi, *exp)?.beta(b)
}

/// `H_b^i[φ](y)`.
pub fn h_kernel<T: Real>(
    phi: &GridFunction<T>,
    b: T,
    side: KernelSide,
    y: T,
    exp: &Exponents<T>,
) -> Result<T> {
    Operator::new(phi, *exp)?.h_kernel(b, side, y)
}

/// `T_b[φ]`.
pub fn apply_t<T: Real>(phi: &GridFunction<T>, b: T, exp: &Exponents<T>) -> Result<GridFunction<T>> {
    Operator::new(phi, *exp)?.apply(b)
}
