use std::sync::Arc;

use crate::numerics::{default_half_width, GridFunction, LogGrid, TailFit};
use crate::{Real, Result};

/// Terminal payoff `h` of the super-replication problem.
///
/// Admissible payoffs vanish on `(0, x0]`, equal one on `[1/x0, ∞)`, and are
/// continuous, convex on `[0, b0]` and concave on `[b0, ∞)`; see
/// [`check_payoff_admissible`].
#[derive(Debug, Clone, PartialEq)]
pub struct Payoff<T> {
    pub h: GridFunction<T>,
    pub x0: T,
    pub b0: T,
}

impl<T: Real> Payoff<T> {
    pub fn new(h: GridFunction<T>, x0: T, b0: T) -> Self {
        Self { h, x0, b0 }
    }

    /// Samples `f` on `grid` with flat tails at 0 and 1.
    pub fn from_fn(f: impl Fn(T) -> T, x0: T, b0: T, grid: Arc<LogGrid<T>>) -> Result<Self> {
        let h = GridFunction::from_fn(
            grid,
            f,
            TailFit::power(T::zero(), T::one()),
            TailFit::power(T::one(), -T::one()),
        )?;
        Ok(Self::new(h, x0, b0))
    }

    /// Grid centred at 1 covering `[x0, 1/x0]` plus the diffusion reach of `σ₂` over `T`.
    pub fn default_grid(x0: T, sigma2: T, horizon: T, nodes: usize) -> Result<Arc<LogGrid<T>>> {
        let half = x0.recip().ln().abs() + default_half_width(sigma2, horizon);
        Ok(Arc::new(LogGrid::centered(T::one(), half, nodes)?))
    }
}

/// One failed admissibility condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Violation<T> {
    /// `x0 ∉ (0, 1)`.
    X0OutOfRange(T),
    /// `b0 ∉ (x0, 1/x0)`.
    B0OutOfRange(T),
    /// An isolated jump between the node at `x` and the next one.
    Discontinuous { x: T },
    OutOfRange { x: T, value: T },
    Decreasing { x: T },
    NonzeroBelowX0 { x: T },
    NotOneAboveInverseX0 { x: T },
    NotConvex { x: T },
    NotConcave { x: T },
}

/// Outcome of [`check_payoff_admissible`]; at most one violation per kind.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AdmissibilityReport<T> {
    pub violations: Vec<Violation<T>>,
}

impl<T: Real> AdmissibilityReport<T> {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, v: Violation<T>) {
        let kind = std::mem::discriminant(&v);
        if !self.violations.iter().any(|w| std::mem::discriminant(w) == kind) {
            self.violations.push(v);
        }
    }
}

impl<T: Real> std::fmt::Display for AdmissibilityReport<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.passed() {
            return write!(f, "admissible");
        }
        write!(f, "not admissible:")?;
        for v in &self.violations {
            match v {
                Violation::X0OutOfRange(x0) => write!(f, " x0 = {x0} outside (0, 1);")?,
                Violation::B0OutOfRange(b0) => write!(f, " b0 = {b0} outside (x0, 1/x0);")?,
                Violation::Discontinuous { x } => write!(f, " jump at x = {x};")?,
                Violation::OutOfRange { x, value } => write!(f, " h({x}) = {value} outside [0, 1];")?,
                Violation::Decreasing { x } => write!(f, " decreasing at x = {x};")?,
                Violation::NonzeroBelowX0 { x } => write!(f, " nonzero at x = {x} ≤ x0;")?,
                Violation::NotOneAboveInverseX0 { x } => write!(f, " not one at x = {x} ≥ 1/x0;")?,
                Violation::NotConvex { x } => write!(f, " not convex at x = {x} < b0;")?,
                Violation::NotConcave { x } => write!(f, " not concave at x = {x} > b0;")?,
            }
        }
        Ok(())
    }
}

/// Checks range, monotonicity and the convex/concave split about `b` on the
/// nodes of `u`, with slack `slack·‖u‖`.
pub(crate) fn shape_violations<T: Real>(
    u: &GridFunction<T>,
    b: T,
    slack: T,
    report: &mut AdmissibilityReport<T>,
) {
    let xs = u.abscissae();
    let v = u.values();
    let tol = slack * u.sup_norm().max(T::one());
    for (i, (&x, &y)) in xs.iter().zip(v).enumerate() {
        if y < -tol || y > T::one() + tol {
            report.push(Violation::OutOfRange { x, value: y });
        }
        if i > 0 && y < v[i - 1] - tol {
            report.push(Violation::Decreasing { x });
        }
    }
    for i in 1..xs.len() - 1 {
        let (dm, dp) = (xs[i] - xs[i - 1], xs[i + 1] - xs[i]);
        let s = ((v[i + 1] - v[i]) * dm - (v[i] - v[i - 1]) * dp) / (dm + dp);
        if xs[i + 1] <= b && s < -tol {
            report.push(Violation::NotConvex { x: xs[i] });
        }
        if xs[i - 1] >= b && s > tol {
            report.push(Violation::NotConcave { x: xs[i] });
        }
    }
}

/// Slack on second differences and flat regions, relative to `‖h‖`.
const SHAPE_SLACK: f64 = 1e-6;

/// Verifies the payoff conditions on the grid nodes and tails.
pub fn check_payoff_admissible<T: Real>(p: &Payoff<T>) -> AdmissibilityReport<T> {
    let mut report = AdmissibilityReport::default();
    let (x0, b0) = (p.x0, p.b0);
    if !(x0 > T::zero() && x0 < T::one()) {
        report.push(Violation::X0OutOfRange(x0));
    }
    if !(b0 > x0 && b0 < x0.recip()) {
        report.push(Violation::B0OutOfRange(b0));
    }
    let h = &p.h;
    let xs = h.abscissae();
    let v = h.values();
    let tol = T::lit(SHAPE_SLACK);

    let jumps: Vec<T> = v.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    for (i, &j) in jumps.iter().enumerate() {
        let before = if i > 0 { jumps[i - 1] } else { T::zero() };
        let after = jumps.get(i + 1).copied().unwrap_or(T::zero());
        if j > T::lit(10.0) * (before + after) + T::lit(1e-3) {
            report.push(Violation::Discontinuous { x: xs[i] });
        }
    }

    for (&x, &y) in xs.iter().zip(v) {
        if x <= x0 && y.abs() > tol {
            report.push(Violation::NonzeroBelowX0 { x });
        }
        if x >= x0.recip() && (y - T::one()).abs() > tol {
            report.push(Violation::NotOneAboveInverseX0 { x });
        }
    }
    let (lt, rt) = (h.left_tail(), h.right_tail());
    if !(lt.is_constant() && lt.constant.abs() <= tol) && xs[0] <= x0 {
        report.push(Violation::NonzeroBelowX0 { x: xs[0] });
    }
    if !(rt.is_constant() && (rt.constant - T::one()).abs() <= tol) {
        report.push(Violation::NotOneAboveInverseX0 { x: xs[xs.len() - 1] });
    }
    shape_violations(h, b0, tol, &mut report);
    report
}
