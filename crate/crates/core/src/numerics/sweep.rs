use crate::{Error, Real, Result};

use super::grid::GridFunction;
use super::quadrature::{gauss_legendre8, hermite_moments};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    /// `∫_{-∞}^U φ(e^s) e^{-k(U-s)} ds`
    Left,
    /// `∫_U^∞ φ(e^s) e^{-k(s-U)} ds`
    Right,
}

/// One-sided exponential-kernel transform of a grid function in `u = ln x`,
/// tabulated at the nodes by a stable first-order recursion.
///
/// Every integral operator in the crate is a linear combination of these:
/// `x^{-p} ∫_0^x φ(r) r^{p-1} dr` is `left(φ, p)` at `ln x`, and
/// `x^{p} ∫_x^∞ φ(r) r^{-p-1} dr` is `right(φ, p)`.
#[derive(Debug, Clone)]
pub struct ExpSweep<'a, T> {
    f: &'a GridFunction<T>,
    rate: T,
    side: Side,
    nodes: Vec<T>,
}

impl<'a, T: Real> ExpSweep<'a, T> {
    /// `L(U) = ∫_{-∞}^U φ(e^s) e^{-k(U-s)} ds`.
    pub fn left(f: &'a GridFunction<T>, k: T) -> Result<Self> {
        check_rate(k)?;
        let g = f.grid();
        let (v, d) = (f.values(), f.slopes());
        let mut nodes = Vec::with_capacity(g.len());
        let mut acc = f
            .left_tail()
            .weighted_integral(T::neg_infinity(), g.u_min(), k, g.u_min())?;
        nodes.push(acc);
        for i in 1..g.len() {
            let h = g.u(i) - g.u(i - 1);
            let m = hermite_moments(k * h);
            // cell in τ = (u_i - s)/h, so the node roles and slope signs flip
            let cell = h * (v[i] * m[0] - h * d[i] * m[1] + v[i - 1] * m[2] - h * d[i - 1] * m[3]);
            acc = (-k * h).exp() * acc + cell;
            nodes.push(acc);
        }
        Ok(Self {
            f,
            rate: k,
            side: Side::Left,
            nodes,
        })
    }

    /// `R(U) = ∫_U^∞ φ(e^s) e^{-k(s-U)} ds`.
    pub fn right(f: &'a GridFunction<T>, k: T) -> Result<Self> {
        check_rate(k)?;
        let g = f.grid();
        let n = g.len();
        let (v, d) = (f.values(), f.slopes());
        let mut nodes = vec![T::zero(); n];
        let mut acc = f
            .right_tail()
            .weighted_integral(g.u_max(), T::infinity(), -k, g.u_max())?;
        nodes[n - 1] = acc;
        for i in (0..n - 1).rev() {
            let h = g.u(i + 1) - g.u(i);
            let m = hermite_moments(k * h);
            let cell = h * (v[i] * m[0] + h * d[i] * m[1] + v[i + 1] * m[2] + h * d[i + 1] * m[3]);
            acc = (-k * h).exp() * acc + cell;
            nodes[i] = acc;
        }
        Ok(Self {
            f,
            rate: k,
            side: Side::Right,
            nodes,
        })
    }

    pub fn rate(&self) -> T {
        self.rate
    }

    /// Values at the grid nodes.
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    /// Value at an arbitrary `u = ln x`.
    pub fn at_log(&self, u: T) -> Result<T> {
        let g = self.f.grid();
        let k = self.rate;
        let phi = |s: T| self.f.eval_log(s);
        match self.side {
            Side::Left => {
                if u < g.u_min() {
                    return self
                        .f
                        .left_tail()
                        .weighted_integral(T::neg_infinity(), u, k, u);
                }
                if u > g.u_max() {
                    let n = g.len();
                    let tail = self.f.right_tail().weighted_integral(g.u_max(), u, k, u)?;
                    return Ok(self.nodes[n - 1] * (-k * (u - g.u_max())).exp() + tail);
                }
                let (i, t) = g.locate(u);
                if t == T::zero() {
                    return Ok(self.nodes[i]);
                }
                let part = gauss_legendre8(|s: T| phi(s) * (-k * (u - s)).exp(), g.u(i), u);
                Ok(self.nodes[i] * (-k * (u - g.u(i))).exp() + part)
            }
            Side::Right => {
                if u > g.u_max() {
                    return self
                        .f
                        .right_tail()
                        .weighted_integral(u, T::infinity(), -k, u);
                }
                if u < g.u_min() {
                    let tail = self.f.left_tail().weighted_integral(u, g.u_min(), -k, u)?;
                    return Ok(self.nodes[0] * (-k * (g.u_min() - u)).exp() + tail);
                }
                let (i, t) = g.locate(u);
                if t == T::one() {
                    return Ok(self.nodes[i + 1]);
                }
                let part = gauss_legendre8(|s: T| phi(s) * (-k * (s - u)).exp(), u, g.u(i + 1));
                Ok(self.nodes[i + 1] * (-k * (g.u(i + 1) - u)).exp() + part)
            }
        }
    }
}

fn check_rate<T: Real>(k: T) -> Result<()> {
    if k.is_finite() {
        Ok(())
    } else {
        Err(Error::Input(format!("sweep rate must be finite, got {k}")))
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::numerics::{integrate_adaptive, LogGrid, TailFit};

    fn smooth() -> GridFunction<f64> {
        // logistic in ln x: 0 at 0, 1 at ∞, power tails of order ±2
        let g = Arc::new(LogGrid::new(0.05, 20.0, 1201).unwrap());
        GridFunction::from_fn(
            g,
            |x: f64| x * x / (1.0 + x * x),
            TailFit::with_log_power(0.0, 2.0),
            TailFit::with_log_power(1.0, -2.0),
        )
        .unwrap()
    }

    fn oracle(f: &GridFunction<f64>, u: f64, k: f64, left: bool) -> f64 {
        let phi = |s: f64| f.eval_log(s);
        if left {
            integrate_adaptive(|s| phi(s) * (-k * (u - s)).exp(), u - 60.0 / k.min(1.0), u, 1e-12, 0.0).unwrap()
        } else {
            integrate_adaptive(|s| phi(s) * (-k * (s - u)).exp(), u, u + 60.0 / k.min(1.0), 1e-12, 0.0).unwrap()
        }
    }

    #[test]
    fn sweeps_match_direct_quadrature() {
        let f = smooth();
        for &k in &[0.5, 3.0, 40.0] {
            let l = ExpSweep::left(&f, k).unwrap();
            let r = ExpSweep::right(&f, k).unwrap();
            for &u in &[-4.0, -1.3, 0.0, 0.77, 2.5, 4.0] {
                let (a, b) = (l.at_log(u).unwrap(), oracle(&f, u, k, true));
                assert!((a - b).abs() < 1e-8, "left k={k} u={u}: {a} vs {b}");
                let (a, b) = (r.at_log(u).unwrap(), oracle(&f, u, k, false));
                assert!((a - b).abs() < 1e-8, "right k={k} u={u}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn node_and_offnode_evaluations_agree() {
        let f = smooth();
        let l = ExpSweep::left(&f, 2.0).unwrap();
        let g = f.grid();
        for i in [0, 17, 600, 1200] {
            assert!((l.at_log(g.u(i)).unwrap() - l.nodes()[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn divergent_tail_is_rejected() {
        let f = smooth();
        // constant 1 at +∞ against e^{+s}
        assert!(matches!(ExpSweep::right(&f, -1.0), Err(Error::Domain(_))));
    }
}
