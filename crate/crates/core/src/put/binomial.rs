use crate::numerics::std_normal_cdf;
use crate::Real;

/// Cox–Ross–Rubinstein American put with `steps` time steps.
pub fn binomial_oracle<T: Real>(strike: T, rate: T, sigma: T, horizon: T, x: T, steps: usize) -> T {
    let (k, r, s, t, x) = (strike.as_f64(), rate.as_f64(), sigma.as_f64(), horizon.as_f64(), x.as_f64());
    if t <= 0.0 || steps == 0 {
        return T::lit((k - x).max(0.0));
    }
    let dt = t / steps as f64;
    let up = (s * dt.sqrt()).exp();
    let growth = (r * dt).exp();
    let p = (growth - 1.0 / up) / (up - 1.0 / up);
    let (pu, pd) = (p / growth, (1.0 - p) / growth);
    let ln_up = up.ln();
    let spot = |i: usize, j: usize| x * ((2.0 * j as f64 - i as f64) * ln_up).exp();
    let mut v: Vec<f64> = (0..=steps).map(|j| (k - spot(steps, j)).max(0.0)).collect();
    for i in (0..steps).rev() {
        for j in 0..=i {
            let cont = pu * v[j + 1] + pd * v[j];
            v[j] = cont.max(k - spot(i, j));
        }
    }
    T::lit(v[0])
}

/// Black–Scholes European put.
pub fn european_put<T: Real>(strike: T, rate: T, sigma: T, horizon: T, x: T) -> T {
    let (k, r, s, t, x) = (strike.as_f64(), rate.as_f64(), sigma.as_f64(), horizon.as_f64(), x.as_f64());
    if t <= 0.0 {
        return T::lit((k - x).max(0.0));
    }
    let sd = s * t.sqrt();
    let d1 = ((x / k).ln() + (r + 0.5 * s * s) * t) / sd;
    let d2 = d1 - sd;
    T::lit(k * (-r * t).exp() * std_normal_cdf(-d2) - x * std_normal_cdf(-d1))
}
