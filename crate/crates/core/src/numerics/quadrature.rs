use rayon::prelude::*;

use crate::{Error, Real, Result};

use super::grid::GridFunction;

/// Eight-point Gauss–Legendre rule on `[-1, 1]`: (node, weight), positive half.
const GL8: [(f64, f64); 4] = [
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
];

/// Kronrod 15-point nodes on `[-1, 1]` (positive half, centre last) and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss 7-point weights on the odd Kronrod nodes (index 1, 3, 5, centre).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Eight-point Gauss–Legendre estimate of `∫_a^b f`.
pub fn gauss_legendre8<T: Real>(f: impl Fn(T) -> T, a: T, b: T) -> T {
    let c = (a + b) * T::lit(0.5);
    let r = (b - a) * T::lit(0.5);
    let mut s = T::zero();
    for &(x, w) in &GL8 {
        let dx = r * T::lit(x);
        s += T::lit(w) * (f(c - dx) + f(c + dx));
    }
    s * r
}

/// Composite eight-point Gauss–Legendre over `panels` equal panels, evaluated
/// in parallel and summed in panel order.
pub fn composite_gauss_legendre<T: Real>(
    f: impl Fn(T) -> T + Sync,
    a: T,
    b: T,
    panels: usize,
) -> T {
    let panels = panels.max(1);
    let w = (b - a) / T::count(panels);
    let parts: Vec<T> = (0..panels)
        .into_par_iter()
        .map(|k| {
            let lo = a + T::count(k) * w;
            let hi = if k + 1 == panels { b } else { lo + w };
            gauss_legendre8(&f, lo, hi)
        })
        .collect();
    parts.into_iter().sum()
}

fn kronrod15<T: Real>(f: &impl Fn(T) -> T, a: T, b: T) -> (T, T) {
    let c = (a + b) * T::lit(0.5);
    let r = (b - a) * T::lit(0.5);
    let fc = f(c);
    let mut gauss = fc * T::lit(WG[3]);
    let mut kron = fc * T::lit(WGK[7]);
    for j in 0..7 {
        let dx = r * T::lit(XGK[j]);
        let pair = f(c - dx) + f(c + dx);
        kron += T::lit(WGK[j]) * pair;
        if j % 2 == 1 {
            gauss += T::lit(WG[j / 2]) * pair;
        }
    }
    (kron * r, ((kron - gauss) * r).abs())
}

/// Largest number of Gauss–Kronrod panels before giving up.
const MAX_PANELS: usize = 4000;

/// Adaptive Gauss–Kronrod 7-15 estimate of `∫_a^b f`, refining the panel with
/// the largest error estimate until `err ≤ max(abs_tol, rel_tol·|∫|)`.
pub fn integrate_adaptive<T: Real>(
    f: impl Fn(T) -> T,
    a: T,
    b: T,
    rel_tol: T,
    abs_tol: T,
) -> Result<T> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Input(format!("finite limits required, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(T::zero());
    }
    if a > b {
        return integrate_adaptive(f, b, a, rel_tol, abs_tol).map(|v| -v);
    }
    let (v, e) = kronrod15(&f, a, b);
    let mut panels = vec![(a, b, v, e)];
    loop {
        let total: T = panels.iter().map(|p| p.2).sum();
        let err: T = panels.iter().map(|p| p.3).sum();
        if !total.is_finite() {
            return Err(Error::Domain(format!("integrand not finite on [{a}, {b}]")));
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::Quadrature(format!(
                "∫ over [{a}, {b}]: error estimate {err} after {MAX_PANELS} panels"
            )));
        }
        let worst = (0..panels.len())
            .max_by(|&i, &j| panels[i].3.partial_cmp(&panels[j].3).unwrap_or(std::cmp::Ordering::Equal))
            .expect("nonempty");
        let (lo, hi, _, _) = panels.swap_remove(worst);
        let mid = (lo + hi) * T::lit(0.5);
        if !(lo < mid && mid < hi) {
            return Err(Error::Quadrature(format!(
                "panel [{lo}, {hi}] cannot be split further"
            )));
        }
        for (l, h) in [(lo, mid), (mid, hi)] {
            let (v, e) = kronrod15(&f, l, h);
            panels.push((l, h, v, e));
        }
    }
}

/// `N_j(α) = ∫_0^1 w^j e^{-α w} dw` for `j = 0..=3`.
pub(crate) fn exp_moments<T: Real>(alpha: T) -> [T; 4] {
    if alpha.abs() < T::one() {
        // Σ_m (-α)^m / (m! (j + m + 1))
        let mut out = [T::zero(); 4];
        let mut term = T::one();
        for m in 0..30 {
            for (j, o) in out.iter_mut().enumerate() {
                *o += term / T::count(j + m + 1);
            }
            term *= -alpha / T::count(m + 1);
            if term.abs() < T::epsilon() * T::lit(1e-3) {
                break;
            }
        }
        out
    } else {
        let e = (-alpha).exp();
        let n0 = -(-alpha).exp_m1() / alpha;
        let n1 = (n0 - e) / alpha;
        let n2 = (T::lit(2.0) * n1 - e) / alpha;
        let n3 = (T::lit(3.0) * n2 - e) / alpha;
        [n0, n1, n2, n3]
    }
}

/// `∫_0^1 h_ab(w) e^{-α w} dw` for the cubic Hermite basis, in the order
/// `[h00, h10, h01, h11]`.
pub(crate) fn hermite_moments<T: Real>(alpha: T) -> [T; 4] {
    let [n0, n1, n2, n3] = exp_moments(alpha);
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    [
        two * n3 - three * n2 + n0,
        n3 - two * n2 + n1,
        three * n2 - two * n3,
        n3 - n2,
    ]
}

/// Running integral `F(x) = ∫_{x_min}^x φ(s) ds` of a [`GridFunction`],
/// exact for the interpolant between nodes and for the tails outside.
#[derive(Debug, Clone)]
pub struct CumulativeIntegral<'a, T> {
    f: &'a GridFunction<T>,
    nodes: Vec<T>,
}

impl<'a, T: Real> CumulativeIntegral<'a, T> {
    pub fn new(f: &'a GridFunction<T>) -> Self {
        let g = f.grid();
        let (v, d) = (f.values(), f.slopes());
        let mut nodes = Vec::with_capacity(g.len());
        nodes.push(T::zero());
        let mut acc = T::zero();
        for i in 1..g.len() {
            let h = g.u(i) - g.u(i - 1);
            // ∫ φ e^s ds over the cell; s = u_{i-1} + h w so e^s = x_{i-1} e^{h w}
            let m = hermite_moments(-h);
            let cell = h * (v[i - 1] * m[0] + h * d[i - 1] * m[1] + v[i] * m[2] + h * d[i] * m[3]);
            acc += g.x(i - 1) * cell;
            nodes.push(acc);
        }
        Self { f, nodes }
    }

    /// `F` at the grid nodes.
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    /// `∫_{x_min}^x φ`, negative for `x < x_min`.
    pub fn at(&self, x: T) -> Result<T> {
        let g = self.f.grid();
        let u = x.ln();
        if u < g.u_min() {
            return Ok(-self.f.left_tail().weighted_integral(u, g.u_min(), T::one(), T::zero())?);
        }
        if u > g.u_max() {
            let last = self.nodes[g.len() - 1];
            return Ok(last + self.f.right_tail().weighted_integral(g.u_max(), u, T::one(), T::zero())?);
        }
        let (i, t) = g.locate(u);
        if t == T::zero() {
            return Ok(self.nodes[i]);
        }
        let part = gauss_legendre8(|s: T| self.f.eval_log(s) * s.exp(), g.u(i), u);
        Ok(self.nodes[i] + part)
    }

    /// `∫_0^x φ`, finite only when the left tail is integrable at zero.
    pub fn from_zero(&self, x: T) -> Result<T> {
        let g = self.f.grid();
        let head = self
            .f
            .left_tail()
            .weighted_integral(T::neg_infinity(), g.u_min(), T::one(), T::zero())?;
        Ok(head + self.at(x)?)
    }
}

/// `∫_lo^hi φ(x) dx` for a grid function, including tail segments.
pub fn cumulative_integral<T: Real>(f: &GridFunction<T>, lo: T, hi: T) -> Result<T> {
    if !(lo > T::zero() && lo <= hi) {
        return Err(Error::Input(format!(
            "integration limits must satisfy 0 < lo ≤ hi, got [{lo}, {hi}]"
        )));
    }
    if hi.is_infinite() {
        let g = f.grid();
        let c = CumulativeIntegral::new(f);
        let tail = f
            .right_tail()
            .weighted_integral(g.u_max(), T::infinity(), T::one(), T::zero())?;
        return Ok(c.nodes()[g.len() - 1] + tail - c.at(lo)?);
    }
    let c = CumulativeIntegral::new(f);
    Ok(c.at(hi)? - c.at(lo)?)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::numerics::{LogGrid, TailFit};

    fn on_grid(f: impl Fn(f64) -> f64, lp: f64, rp: f64) -> GridFunction<f64> {
        let g = Arc::new(LogGrid::new(0.5, 20.0, 2001).unwrap());
        GridFunction::from_fn(g, f, TailFit::power(0.0, lp), TailFit::power(0.0, rp)).unwrap()
    }

    #[test]
    fn gk15_integrates_smooth_functions() {
        let v = integrate_adaptive(|x: f64| x.exp(), 0.0, 1.0, 1e-13, 0.0).unwrap();
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-13);
        let v = integrate_adaptive(|x: f64| x.sqrt(), 0.0, 1.0, 1e-10, 0.0).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn composite_gl_is_exact_for_polynomials() {
        let v = composite_gauss_legendre(|x: f64| x.powi(15) - 3.0 * x, 0.0, 2.0, 3);
        assert!((v - (2f64.powi(16) / 16.0 - 6.0)).abs() < 1e-9);
    }

    #[test]
    fn moments_series_and_recursion_agree() {
        for a in [0.999_999, 1.000_001, -0.999_999, -1.000_001] {
            let m = exp_moments::<f64>(a);
            for (j, v) in m.iter().enumerate() {
                let q = integrate_adaptive(|w: f64| w.powi(j as i32) * (-a * w).exp(), 0.0, 1.0, 1e-14, 0.0).unwrap();
                assert!((v - q).abs() < 1e-13, "α = {a}, j = {j}");
            }
        }
    }

    #[test]
    fn power_integral_has_closed_form() {
        let g2 = 7.5f64;
        let f = on_grid(|x| x.powf(g2 - 2.0), g2 - 2.0, g2 - 2.0);
        let (a, b) = (0.8f64, 3.0f64);
        let exact = (b.powf(g2 - 1.0) - a.powf(g2 - 1.0)) / (g2 - 1.0);
        let v = cumulative_integral(&f, a, b).unwrap();
        assert!(((v - exact) / exact).abs() < 1e-8);
    }

    #[test]
    fn reciprocal_and_constant() {
        let f = on_grid(|x| 1.0 / x, -1.0, -1.0);
        let v = cumulative_integral(&f, 1.0, 1f64.exp().powi(2)).unwrap();
        assert!((v - 2.0).abs() < 1e-8);
        let c = on_grid(|_| 1.0, 0.0, 0.0);
        let v = cumulative_integral(&c, 1.0, 1f64.exp()).unwrap();
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-12);
        // beyond the grid on both sides
        let v = cumulative_integral(&c, 0.1, 40.0).unwrap();
        assert!((v - 39.9).abs() < 1e-10);
    }

    #[test]
    fn non_integrable_tail_is_a_domain_error() {
        let c = on_grid(|_| 1.0, 0.0, 0.0);
        assert!(matches!(
            cumulative_integral(&c, 1.0, f64::INFINITY),
            Err(Error::Domain(_))
        ));
        let f = on_grid(|x| x.powi(-3), -3.0, -3.0);
        let v = cumulative_integral(&f, 1.0, f64::INFINITY).unwrap();
        assert!((v - 0.5).abs() < 1e-8);
    }
}
