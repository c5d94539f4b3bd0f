use crate::{Error, Real, Result};

/// Asymptote `c + a·x^p·|ln x|^δ` of a grid function beyond one end of its grid.
///
/// The power part is stored relative to an anchor abscissa `x_a` (normally the
/// junction node), i.e. `coef·(x/x_a)^p·(|ln x| / |ln x_a|)^δ`, so that steep
/// exponents never overflow the stored coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tail<T> {
    pub constant: T,
    pub coef: T,
    pub exponent: T,
    pub log_power: u32,
    /// `ln x_a`.
    pub anchor: T,
}

impl<T: Real> Tail<T> {
    pub fn new(constant: T, coef: T, exponent: T, log_power: u32, anchor: T) -> Self {
        Self {
            constant,
            coef,
            exponent,
            log_power,
            anchor,
        }
    }

    pub fn constant(c: T) -> Self {
        Self::new(c, T::zero(), T::zero(), 0, T::zero())
    }

    /// `coef·(x/x_anchor)^exponent`.
    pub fn power(coef: T, exponent: T, x_anchor: T) -> Self {
        Self::new(T::zero(), coef, exponent, 0, x_anchor.ln())
    }

    /// `c + a·x^p` with the coefficient given at `x = 1`.
    pub fn affine_power(c: T, a: T, exponent: T) -> Self {
        Self::new(c, a, exponent, 0, T::zero())
    }

    pub fn is_constant(&self) -> bool {
        self.coef == T::zero()
    }

    /// Value at `u = ln x`.
    pub fn eval_log(&self, u: T) -> T {
        if self.coef == T::zero() {
            return self.constant;
        }
        let mut p = self.coef * (self.exponent * (u - self.anchor)).exp();
        if self.log_power > 0 {
            p *= (u.abs() / self.anchor.abs()).powi(self.log_power as i32);
        }
        self.constant + p
    }

    pub fn eval(&self, x: T) -> T {
        self.eval_log(x.ln())
    }

    /// Derivative with respect to `u = ln x`.
    pub fn slope_log(&self, u: T) -> T {
        if self.coef == T::zero() {
            return T::zero();
        }
        let base = self.coef * (self.exponent * (u - self.anchor)).exp();
        if self.log_power == 0 {
            return base * self.exponent;
        }
        let d = self.log_power as i32;
        let la = self.anchor.abs();
        let r = u.abs() / la;
        let dr = u.signum() / la;
        base * (self.exponent * r.powi(d) + T::lit(d as f64) * r.powi(d - 1) * dr)
    }

    /// `∫_{s0}^{s1} tail(e^s)·e^{m (s - k)} ds` in closed form.
    ///
    /// `s0` may be `-∞` and `s1` may be `+∞`; a divergent improper integral is a
    /// domain error.
    pub fn weighted_integral(&self, s0: T, s1: T, m: T, k: T) -> Result<T> {
        if !(s0 <= s1) {
            return Err(Error::Input(format!(
                "tail integral bounds out of order: {s0} > {s1}"
            )));
        }
        if s0 == s1 {
            return Ok(T::zero());
        }
        Ok(self.constant_part(s0, s1, m, k)? + self.power_part(s0, s1, m, k)?)
    }

    fn constant_part(&self, s0: T, s1: T, m: T, k: T) -> Result<T> {
        let c = self.constant;
        if c == T::zero() {
            return Ok(T::zero());
        }
        let lo_inf = s0.is_infinite();
        let hi_inf = s1.is_infinite();
        if (lo_inf && m <= T::zero()) || (hi_inf && m >= T::zero()) {
            return Err(Error::Domain(format!(
                "constant tail {c} is not integrable against exp({m}·s)"
            )));
        }
        if m == T::zero() {
            return Ok(c * (s1 - s0));
        }
        let v = match (lo_inf, hi_inf) {
            (true, false) => (m * (s1 - k)).exp() / m,
            (false, true) => -(m * (s0 - k)).exp() / m,
            (false, false) => (m * (s0 - k)).exp() * (m * (s1 - s0)).exp_m1() / m,
            (true, true) => unreachable!("both ends infinite is rejected above"),
        };
        Ok(c * v)
    }

    fn power_part(&self, s0: T, s1: T, m: T, k: T) -> Result<T> {
        if self.coef == T::zero() {
            return Ok(T::zero());
        }
        let p = self.exponent;
        let q = p + m;
        if (s0.is_infinite() && q <= T::zero()) || (s1.is_infinite() && q >= T::zero()) {
            return Err(Error::Domain(format!(
                "power tail x^{p} is not integrable against exp({m}·s)"
            )));
        }
        // exponent of the integrand at s, without the |s|^δ factor
        let expo = |s: T| p * (s - self.anchor) + m * (s - k);
        if self.log_power == 0 {
            let v = if q == T::zero() {
                expo(s0).exp() * (s1 - s0)
            } else if s0.is_infinite() {
                expo(s1).exp() / q
            } else if s1.is_infinite() {
                -expo(s0).exp() / q
            } else {
                expo(s0).exp() * (q * (s1 - s0)).exp_m1() / q
            };
            return Ok(self.coef * v);
        }
        let d = self.log_power;
        let la = self.anchor.abs();
        if la == T::zero() {
            return Err(Error::Domain(
                "log-power tail anchored at x = 1".to_string(),
            ));
        }
        // split at s = 0 so that |s|^δ = σ^δ s^δ holds on each piece
        let pieces: [(T, T); 2] = if s0 < T::zero() && s1 > T::zero() {
            [(s0, T::zero()), (T::zero(), s1)]
        } else {
            [(s0, s1), (s1, s1)]
        };
        let mut total = T::zero();
        for (a, b) in pieces {
            if a == b {
                continue;
            }
            let sign = if b <= T::zero() && d % 2 == 1 {
                -T::one()
            } else {
                T::one()
            };
            let anti = |s: T| -> T {
                if s.is_infinite() {
                    return T::zero();
                }
                if q == T::zero() {
                    return expo(s).exp() * s.powi(d as i32 + 1) / T::lit(d as f64 + 1.0);
                }
                // ∫ s^δ e^{q s} ds = e^{q s} Σ_j (-1)^j δ!/(δ-j)! s^{δ-j} / q^{j+1}
                let mut sum = T::zero();
                let mut fall = T::one();
                let mut qpow = q;
                for j in 0..=d {
                    let term = fall * s.powi((d - j) as i32) / qpow;
                    sum += if j % 2 == 0 { term } else { -term };
                    fall *= T::lit((d - j) as f64);
                    qpow *= q;
                }
                expo(s).exp() * sum
            };
            total += sign * (anti(b) - anti(a));
        }
        Ok(self.coef * total / la.powi(d as i32))
    }
}

/// How to fit a tail to the nodes nearest one end of a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFit<T> {
    pub constant: T,
    pub exponent: T,
    /// Estimate an integer log-power from the outermost 5% of the nodes.
    pub fit_log_power: bool,
}

impl<T: Real> TailFit<T> {
    pub fn power(constant: T, exponent: T) -> Self {
        Self {
            constant,
            exponent,
            fit_log_power: false,
        }
    }

    pub fn with_log_power(constant: T, exponent: T) -> Self {
        Self {
            constant,
            exponent,
            fit_log_power: true,
        }
    }

    /// Builds the tail from `(u_i, v_i)` pairs; the first pair is the junction
    /// node, which the fitted tail reproduces exactly.
    pub(crate) fn fit(&self, us: &[T], vs: &[T]) -> Tail<T> {
        let (uj, vj) = (us[0], vs[0]);
        let rj = vj - self.constant;
        if rj == T::zero() {
            return Tail::constant(self.constant);
        }
        let mut delta = 0u32;
        if self.fit_log_power && uj != T::zero() {
            delta = estimate_log_power(us, vs, self.constant, self.exponent);
        }
        Tail::new(self.constant, rj, self.exponent, delta, uj)
    }
}

const MAX_LOG_POWER: u32 = 12;

fn estimate_log_power<T: Real>(us: &[T], vs: &[T], c: T, p: T) -> u32 {
    let (uj, rj) = (us[0], vs[0] - c);
    let mut ws = Vec::with_capacity(us.len());
    let mut zs = Vec::with_capacity(us.len());
    for (&u, &v) in us.iter().zip(vs) {
        let r = v - c;
        if r == T::zero() || r.signum() != rj.signum() || u.signum() != uj.signum() || u == T::zero() {
            return 0;
        }
        zs.push((r / rj).abs().ln() - p * (u - uj));
        ws.push((u / uj).abs().ln());
    }
    let n = T::count(ws.len());
    let wbar = ws.iter().copied().sum::<T>() / n;
    let zbar = zs.iter().copied().sum::<T>() / n;
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    for (&w, &z) in ws.iter().zip(&zs) {
        sxy += (w - wbar) * (z - zbar);
        sxx += (w - wbar) * (w - wbar);
    }
    if sxx <= T::epsilon() {
        return 0;
    }
    let slope = (sxy / sxx).round();
    if !slope.is_finite() || slope <= T::zero() {
        0
    } else {
        slope.as_f64().min(MAX_LOG_POWER as f64) as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(tail: &Tail<f64>, s0: f64, s1: f64, m: f64, k: f64) -> f64 {
        // composite Simpson on a finite window
        let n = 200_000;
        let h = (s1 - s0) / n as f64;
        let f = |s: f64| tail.eval_log(s) * (m * (s - k)).exp();
        let mut acc = f(s0) + f(s1);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(s0 + i as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn constant_tail_integrals() {
        let t = Tail::constant(2.0);
        let v = t.weighted_integral(f64::NEG_INFINITY, 0.5, 3.0, 0.5).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
        let v = t.weighted_integral(0.0, 1.0, 0.0, 0.0).unwrap();
        assert!((v - 2.0).abs() < 1e-15);
        assert!(t.weighted_integral(0.0, f64::INFINITY, 1.0, 0.0).is_err());
    }

    #[test]
    fn power_tail_matches_simpson() {
        let t = Tail::new(0.3, -0.7, 2.5, 0, -1.0);
        let exact = t.weighted_integral(-3.0, -1.0, 1.5, -1.0).unwrap();
        assert!((exact - brute(&t, -3.0, -1.0, 1.5, -1.0)).abs() < 1e-10);
    }

    #[test]
    fn log_power_tail_matches_simpson() {
        for d in 1..4 {
            let t = Tail::new(0.0, 1.3, 4.0, d, -2.0);
            let exact = t.weighted_integral(-6.0, -2.0, 0.5, -2.0).unwrap();
            assert!((exact - brute(&t, -6.0, -2.0, 0.5, -2.0)).abs() < 1e-9, "δ = {d}");
            // crossing zero
            let t = Tail::new(0.0, 1.3, -1.0, d, 2.0);
            let exact = t.weighted_integral(-1.0, 1.5, 0.2, 0.0).unwrap();
            assert!((exact - brute(&t, -1.0, 1.5, 0.2, 0.0)).abs() < 1e-9, "δ = {d}");
        }
    }

    #[test]
    fn improper_power_tail() {
        // ∫_{-∞}^0 e^{3s} ds = 1/3
        let t = Tail::affine_power(0.0, 1.0, 3.0);
        let v = t.weighted_integral(f64::NEG_INFINITY, 0.0, 0.0, 0.0).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
        assert!(t.weighted_integral(f64::NEG_INFINITY, 0.0, -3.0, 0.0).is_err());
    }

    #[test]
    fn log_power_fit_recovers_integer() {
        let us: Vec<f64> = (0..50).map(|i| -4.0 - 0.01 * i as f64).collect();
        let vs: Vec<f64> = us.iter().map(|&u| 0.2 * (3.0 * u).exp() * u.powi(2)).collect();
        let tail = TailFit::with_log_power(0.0, 3.0).fit(&us, &vs);
        assert_eq!(tail.log_power, 2);
        for (&u, &v) in us.iter().zip(&vs) {
            assert!((tail.eval_log(u) - v).abs() <= 1e-12 * v.abs());
        }
    }
}
