use crate::{Error, Real, Result};

/// Search interval `[lo, hi]` for a residual known to change sign on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> Bracket<T> {
    pub fn new(lo: T, hi: T) -> Result<Self> {
        if !(lo >= T::zero() && lo < hi && hi.is_finite()) {
            return Err(Error::Input(format!(
                "bracket needs 0 ≤ lo < hi < ∞, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }
}

/// Default relative root tolerance.
pub const ROOT_TOL: f64 = 1e-10;

const MAX_ITER: usize = 300;

/// Zero of `g` inside `bracket` to within `tol·|root|`.
///
/// Illinois-modified regula falsi; a bisection step is forced whenever two
/// consecutive steps fail to halve the bracket, so convergence is guaranteed
/// for continuous `g`.
pub fn find_root_bracketed<T: Real>(
    mut g: impl FnMut(T) -> T,
    bracket: Bracket<T>,
    tol: T,
) -> Result<T> {
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let (mut fa, mut fb) = (g(a), g(b));
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::Domain(format!(
            "residual undefined at the bracket ends [{a}, {b}]"
        )));
    }
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket {
            lo: a.as_f64(),
            hi: b.as_f64(),
        });
    }
    let floor = T::min_positive_value().sqrt();
    // which end was retained on the last step: -1 = a, +1 = b
    let mut kept = 0i8;
    let mut slow = 0u8;
    for _ in 0..MAX_ITER {
        let width = b - a;
        let mid = a + width * T::lit(0.5);
        if width <= tol * mid.abs().max(floor) + T::lit(4.0) * T::epsilon() * mid.abs() {
            return Ok(if fa.abs() < fb.abs() { a } else { b });
        }
        let mut x = if slow >= 2 {
            slow = 0;
            mid
        } else {
            (a * fb - b * fa) / (fb - fa)
        };
        if !(x > a && x < b) {
            x = mid;
        }
        let fx = g(x);
        if fx.is_nan() {
            return Err(Error::Domain(format!("residual undefined at {x}")));
        }
        if fx == T::zero() {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
            if kept == 1 {
                fb *= T::lit(0.5);
            }
            kept = 1;
        } else {
            b = x;
            fb = fx;
            if kept == -1 {
                fa *= T::lit(0.5);
            }
            kept = -1;
        }
        if b - a > width * T::lit(0.5) {
            slow += 1;
        } else {
            slow = 0;
        }
    }
    Ok(a + (b - a) * T::lit(0.5))
}
