use std::sync::Arc;

use crate::{Error, Real, Result};

use super::tail::{Tail, TailFit};

/// Strictly increasing log-uniform abscissae `x_i = exp(u_0 + i·h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogGrid<T> {
    us: Vec<T>,
    xs: Vec<T>,
    step: T,
}

/// Fewest nodes for which the fourth-order end slopes are defined.
pub const MIN_NODES: usize = 5;

/// Default node count for every grid in the crate.
pub const DEFAULT_NODES: usize = 4001;

impl<T: Real> LogGrid<T> {
    /// `n` nodes from `x_lo` to `x_hi` inclusive.
    pub fn new(x_lo: T, x_hi: T, n: usize) -> Result<Self> {
        if !(x_lo > T::zero() && x_hi > x_lo && x_hi.is_finite()) {
            return Err(Error::Input(format!(
                "grid needs 0 < x_lo < x_hi < ∞, got [{x_lo}, {x_hi}]"
            )));
        }
        if n < MIN_NODES {
            return Err(Error::Input(format!(
                "grid needs at least {MIN_NODES} nodes, got {n}"
            )));
        }
        let (u0, u1) = (x_lo.ln(), x_hi.ln());
        let step = (u1 - u0) / T::count(n - 1);
        let mut us: Vec<T> = (0..n).map(|i| u0 + T::count(i) * step).collect();
        us[n - 1] = u1;
        let mut xs: Vec<T> = us.iter().map(|u| u.exp()).collect();
        xs[0] = x_lo;
        xs[n - 1] = x_hi;
        Ok(Self { us, xs, step })
    }

    /// `n` nodes on `[x_ref·e^{-half_width}, x_ref·e^{half_width}]`; odd `n`
    /// puts `x_ref` on the middle node.
    pub fn centered(x_ref: T, half_width: T, n: usize) -> Result<Self> {
        if !(half_width > T::zero()) {
            return Err(Error::Input(format!(
                "grid half-width must be positive, got {half_width}"
            )));
        }
        let mut g = Self::new(x_ref * (-half_width).exp(), x_ref * half_width.exp(), n)?;
        if n % 2 == 1 {
            g.xs[n / 2] = x_ref;
            g.us[n / 2] = x_ref.ln();
        }
        Ok(g)
    }

    /// Validates externally supplied abscissae.
    pub fn from_abscissae(xs: Vec<T>) -> Result<Self> {
        if xs.len() < MIN_NODES {
            return Err(Error::Input(format!(
                "grid needs at least {MIN_NODES} nodes, got {}",
                xs.len()
            )));
        }
        if xs[0] <= T::zero() || xs.iter().any(|x| !x.is_finite()) {
            return Err(Error::Input("abscissae must be positive and finite".into()));
        }
        let us: Vec<T> = xs.iter().map(|x| x.ln()).collect();
        let n = us.len();
        let step = (us[n - 1] - us[0]) / T::count(n - 1);
        if !(step > T::zero()) {
            return Err(Error::Input("abscissae must be strictly increasing".into()));
        }
        let tol = T::lit(1e-12).max(T::lit(64.0) * T::epsilon());
        for w in us.windows(2) {
            let d = w[1] - w[0];
            if !(d > T::zero()) || ((d - step) / step).abs() > tol.max(T::lit(8.0) * T::epsilon() * w[1].abs() / step) {
                return Err(Error::Input(
                    "abscissae are not strictly increasing and log-uniform".into(),
                ));
            }
        }
        Ok(Self { us, xs, step })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn abscissae(&self) -> &[T] {
        &self.xs
    }

    pub fn logs(&self) -> &[T] {
        &self.us
    }

    pub fn x(&self, i: usize) -> T {
        self.xs[i]
    }

    pub fn u(&self, i: usize) -> T {
        self.us[i]
    }

    /// Spacing in `ln x`.
    pub fn step(&self) -> T {
        self.step
    }

    pub fn x_min(&self) -> T {
        self.xs[0]
    }

    pub fn x_max(&self) -> T {
        self.xs[self.len() - 1]
    }

    pub fn u_min(&self) -> T {
        self.us[0]
    }

    pub fn u_max(&self) -> T {
        self.us[self.len() - 1]
    }

    /// Cell index `i` with `u_i ≤ u ≤ u_{i+1}` and the local coordinate in `[0, 1]`.
    pub fn locate(&self, u: T) -> (usize, T) {
        let n = self.len();
        let t = (u - self.us[0]) / self.step;
        let i = t.floor().max(T::zero()).to_usize().unwrap_or(0).min(n - 2);
        // the last and middle nodes are pinned, so recompute from the cell ends
        let frac = ((u - self.us[i]) / (self.us[i + 1] - self.us[i]))
            .max(T::zero())
            .min(T::one());
        (i, frac)
    }

    /// Index of the node nearest to `x`.
    pub fn nearest(&self, x: T) -> usize {
        let (i, t) = self.locate(x.ln());
        if t > T::lit(0.5) {
            i + 1
        } else {
            i
        }
    }
}

/// Bounded function on `(0, ∞)`: node values on a [`LogGrid`], a monotone
/// cubic Hermite interpolant in `ln x` between nodes, and [`Tail`]s outside.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T> {
    grid: Arc<LogGrid<T>>,
    values: Vec<T>,
    /// `dφ/du` at the nodes, monotonicity-limited.
    slopes: Vec<T>,
    left: Tail<T>,
    right: Tail<T>,
}

/// Junction mismatch tolerated between a tail and its end node.
const JUNCTION_RTOL: f64 = 1e-6;

impl<T: Real> GridFunction<T> {
    pub fn new(grid: Arc<LogGrid<T>>, values: Vec<T>, left: Tail<T>, right: Tail<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Input(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "non-finite value {} at x = {}",
                values[i],
                grid.x(i)
            )));
        }
        let scale = values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let n = grid.len();
        for (end, tail, i) in [("left", &left, 0), ("right", &right, n - 1)] {
            let (v, t) = (values[i], tail.eval_log(grid.u(i)));
            let tol = T::lit(JUNCTION_RTOL) * v.abs().max(t.abs()) + T::lit(1e-12) * scale;
            if !((v - t).abs() <= tol) {
                return Err(Error::Input(format!(
                    "{end} tail gives {t} at the junction node, value there is {v}"
                )));
            }
        }
        let slopes = limited_slopes(&values, grid.step());
        Ok(Self {
            grid,
            values,
            slopes,
            left,
            right,
        })
    }

    /// Fits both tails to the outermost 5% of the nodes.
    pub fn with_fitted_tails(
        grid: Arc<LogGrid<T>>,
        values: Vec<T>,
        left: TailFit<T>,
        right: TailFit<T>,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Input(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        let lt = fit_left(&grid, &values, &left);
        let rt = fit_right(&grid, &values, &right);
        Self::new(grid, values, lt, rt)
    }

    pub fn from_fn(
        grid: Arc<LogGrid<T>>,
        f: impl Fn(T) -> T,
        left: TailFit<T>,
        right: TailFit<T>,
    ) -> Result<Self> {
        let values = grid.abscissae().iter().map(|&x| f(x)).collect();
        Self::with_fitted_tails(grid, values, left, right)
    }

    pub fn grid(&self) -> &Arc<LogGrid<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn slopes(&self) -> &[T] {
        &self.slopes
    }

    pub fn left_tail(&self) -> &Tail<T> {
        &self.left
    }

    pub fn right_tail(&self) -> &Tail<T> {
        &self.right
    }

    pub fn abscissae(&self) -> &[T] {
        self.grid.abscissae()
    }

    /// Value at `x > 0`.
    pub fn eval(&self, x: T) -> T {
        self.eval_log(x.ln())
    }

    /// Value at `u = ln x`.
    pub fn eval_log(&self, u: T) -> T {
        let g = &*self.grid;
        if u < g.u_min() {
            return self.left.eval_log(u);
        }
        if u > g.u_max() {
            return self.right.eval_log(u);
        }
        let (i, t) = g.locate(u);
        let h = g.u(i + 1) - g.u(i);
        let t2 = t * t;
        let t3 = t2 * t;
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let h00 = two * t3 - three * t2 + T::one();
        let h10 = t3 - two * t2 + t;
        let h01 = three * t2 - two * t3;
        let h11 = t3 - t2;
        self.values[i] * h00
            + h * self.slopes[i] * h10
            + self.values[i + 1] * h01
            + h * self.slopes[i + 1] * h11
    }

    /// `dφ/d(ln x)`.
    pub fn slope_log(&self, u: T) -> T {
        let g = &*self.grid;
        if u < g.u_min() {
            return self.left.slope_log(u);
        }
        if u > g.u_max() {
            return self.right.slope_log(u);
        }
        let (i, t) = g.locate(u);
        let h = g.u(i + 1) - g.u(i);
        let t2 = t * t;
        let six = T::lit(6.0);
        let d00 = six * t2 - six * t;
        let d10 = T::lit(3.0) * t2 - T::lit(4.0) * t + T::one();
        let d11 = T::lit(3.0) * t2 - T::lit(2.0) * t;
        (self.values[i] * d00 - self.values[i + 1] * d00) / h
            + self.slopes[i] * d10
            + self.slopes[i + 1] * d11
    }

    /// `dφ/dx`.
    pub fn derivative(&self, x: T) -> T {
        self.slope_log(x.ln()) / x
    }

    /// Sup norm over the nodes.
    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// True when every node and both tails hold the same constant.
    pub fn is_constant(&self) -> bool {
        let c = self.values[0];
        self.left.is_constant()
            && self.right.is_constant()
            && self.values.iter().all(|&v| v == c)
    }
}

/// Nodes used to fit a tail: the outermost 5%.
fn fit_width(n: usize) -> usize {
    (n / 20).max(MIN_NODES).min(n)
}

pub(crate) fn fit_left<T: Real>(grid: &LogGrid<T>, values: &[T], fit: &TailFit<T>) -> Tail<T> {
    let m = fit_width(grid.len());
    fit.fit(&grid.logs()[..m], &values[..m])
}

pub(crate) fn fit_right<T: Real>(grid: &LogGrid<T>, values: &[T], fit: &TailFit<T>) -> Tail<T> {
    let n = grid.len();
    let m = fit_width(n);
    let us: Vec<T> = grid.logs()[n - m..].iter().rev().copied().collect();
    let vs: Vec<T> = values[n - m..].iter().rev().copied().collect();
    fit.fit(&us, &vs)
}

/// Fourth-order finite-difference slopes in `u`, limited so that the cubic
/// Hermite interpolant is monotone on every cell where the data is.
fn limited_slopes<T: Real>(v: &[T], h: T) -> Vec<T> {
    let n = v.len();
    let c = |k: f64| T::lit(k);
    let twelve_h = c(12.0) * h;
    let mut d = vec![T::zero(); n];
    for i in 2..n - 2 {
        d[i] = (v[i - 2] - c(8.0) * v[i - 1] + c(8.0) * v[i + 1] - v[i + 2]) / twelve_h;
    }
    d[0] = (-c(25.0) * v[0] + c(48.0) * v[1] - c(36.0) * v[2] + c(16.0) * v[3] - c(3.0) * v[4]) / twelve_h;
    d[1] = (-c(3.0) * v[0] - c(10.0) * v[1] + c(18.0) * v[2] - c(6.0) * v[3] + v[4]) / twelve_h;
    let m = n - 1;
    d[m - 1] = (c(3.0) * v[m] + c(10.0) * v[m - 1] - c(18.0) * v[m - 2] + c(6.0) * v[m - 3] - v[m - 4]) / twelve_h;
    d[m] = (c(25.0) * v[m] - c(48.0) * v[m - 1] + c(36.0) * v[m - 2] - c(16.0) * v[m - 3] + c(3.0) * v[m - 4]) / twelve_h;

    let secant = |i: usize| (v[i + 1] - v[i]) / h;
    #[allow(clippy::needless_range_loop)]
    for i in 0..n {
        let sl = if i == 0 { secant(0) } else { secant(i - 1) };
        let sr = if i == m { secant(m - 1) } else { secant(i) };
        if sl * sr <= T::zero() || d[i] * sl < T::zero() {
            d[i] = T::zero();
            continue;
        }
        let cap = c(3.0) * sl.abs().min(sr.abs());
        if d[i].abs() > cap {
            d[i] = cap.copysign(sl);
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(lo: f64, hi: f64, n: usize) -> Arc<LogGrid<f64>> {
        Arc::new(LogGrid::new(lo, hi, n).unwrap())
    }

    #[test]
    fn grid_is_log_uniform() {
        let g = LogGrid::<f64>::centered(100.0, 4.0, 4001).unwrap();
        assert_eq!(g.x(2000), 100.0);
        let r0 = g.x(1) / g.x(0);
        for w in g.abscissae().windows(2) {
            assert!(((w[1] / w[0]) / r0 - 1.0).abs() < 1e-12);
        }
        assert!(LogGrid::from_abscissae(g.abscissae().to_vec()).is_ok());
        assert!(LogGrid::from_abscissae(vec![1.0, 2.0, 3.0, 4.0, 5.0]).is_err());
    }

    #[test]
    fn smooth_function_interpolates_to_fourth_order() {
        let g = grid(0.1, 10.0, 801);
        let f = |x: f64| x.atan() + x.ln();
        let gf = GridFunction::from_fn(g, f, TailFit::power(0.0, 1.0), TailFit::power(0.0, -1.0)).unwrap();
        let mut worst: f64 = 0.0;
        for k in 0..997 {
            let x = 0.11 * (1.0 + k as f64 * 0.0081f64).powi(3);
            if x < 9.9 {
                worst = worst.max((gf.eval(x) - f(x)).abs());
            }
        }
        assert!(worst < 1e-9, "{worst}");
    }

    #[test]
    fn monotone_data_gives_monotone_interpolant() {
        let g = grid(0.5, 2.0, 41);
        let gf = GridFunction::from_fn(
            g,
            |x: f64| if x < 1.0 { 0.0 } else { 1.0 },
            TailFit::power(0.0, 1.0),
            TailFit::power(1.0, -1.0),
        )
        .unwrap();
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=4000 {
            let v = gf.eval(0.5 * 4f64.powf(k as f64 / 4000.0));
            assert!(v >= prev - 1e-15 && (-1e-15..=1.0 + 1e-15).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn junction_mismatch_is_rejected() {
        let g = grid(1.0, 2.0, 11);
        let r = GridFunction::new(g, vec![1.0; 11], Tail::constant(0.0), Tail::constant(1.0));
        assert!(matches!(r, Err(Error::Input(_))));
    }

    #[test]
    fn tails_extend_the_function() {
        let g = grid(1.0, 2.0, 11);
        let gf = GridFunction::from_fn(
            g,
            |x: f64| x * x,
            TailFit::power(0.0, 2.0),
            TailFit::power(0.0, 2.0),
        )
        .unwrap();
        assert!((gf.eval(0.5) - 0.25).abs() < 1e-12);
        assert!((gf.eval(4.0) - 16.0).abs() < 1e-10);
    }
}
