use crate::{Error, Real, Result};

/// Least-squares fit of `log|error| = c - order · log n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFit<T> {
    /// `None` when fewer than two nonzero errors remain.
    pub order: Option<T>,
    /// `(n, |error|)` pairs entering the fit.
    pub used: Vec<(usize, T)>,
    /// Stage counts whose error is exactly zero.
    pub excluded: Vec<usize>,
}

/// Empirical convergence order of `values` (stage count → value) towards `exact`.
/// Errors must not grow with `n`; exact hits are reported but left out of the fit.
pub fn convergence_diagnostic<T: Real>(values: &[(usize, T)], exact: T) -> Result<RateFit<T>> {
    if !exact.is_finite() {
        return Err(Error::Input(format!("exact value must be finite, got {exact}")));
    }
    let mut pts: Vec<(usize, T)> = values.iter().map(|&(n, v)| (n, (v - exact).abs())).collect();
    pts.sort_by_key(|p| p.0);
    if pts.len() < 3 {
        return Err(Error::Input(format!("need at least 3 stage counts, got {}", pts.len())));
    }
    for w in pts.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::Input(format!("duplicate stage count {}", w[0].0)));
        }
        if w[0].0 == 0 || !w[1].1.is_finite() {
            return Err(Error::Input("stage counts must be positive with finite values".into()));
        }
        if w[1].1 > w[0].1 {
            return Err(Error::Input(format!(
                "error grows from {} at n = {} to {} at n = {}",
                w[0].1, w[0].0, w[1].1, w[1].0
            )));
        }
    }
    let (used, zero): (Vec<_>, Vec<_>) = pts.into_iter().partition(|p| p.1 > T::zero());
    let excluded = zero.into_iter().map(|p| p.0).collect();
    if used.len() < 2 {
        return Ok(RateFit {
            order: None,
            used,
            excluded,
        });
    }
    let m = T::count(used.len());
    let xs: Vec<T> = used.iter().map(|p| T::count(p.0).ln()).collect();
    let ys: Vec<T> = used.iter().map(|p| p.1.ln()).collect();
    let xbar = xs.iter().fold(T::zero(), |a, &b| a + b) / m;
    let ybar = ys.iter().fold(T::zero(), |a, &b| a + b) / m;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(&ys) {
        sxy += (x - xbar) * (y - ybar);
        sxx += (x - xbar) * (x - xbar);
    }
    Ok(RateFit {
        order: Some(-sxy / sxx),
        used,
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_n_errors_have_order_one() {
        let v: Vec<(usize, f64)> = [10, 50, 200, 1000].iter().map(|&n| (n, 2.0 + 0.3 / n as f64)).collect();
        let fit = convergence_diagnostic(&v, 2.0).unwrap();
        assert!((fit.order.unwrap() - 1.0).abs() < 1e-10);
        assert!(fit.excluded.is_empty());
    }

    #[test]
    fn exact_hits_are_excluded() {
        let fit = convergence_diagnostic(&[(10, 1.0f64), (20, 1.0), (40, 1.0)], 1.0).unwrap();
        assert_eq!(fit.order, None);
        assert_eq!(fit.excluded, vec![10, 20, 40]);
    }

    #[test]
    fn rejects_growing_errors_and_short_input() {
        assert!(matches!(
            convergence_diagnostic(&[(10, 0.1f64), (20, 0.2), (40, 0.05)], 0.0),
            Err(Error::Input(_))
        ));
        assert!(matches!(convergence_diagnostic(&[(10, 0.1f64), (20, 0.2)], 0.0), Err(Error::Input(_))));
    }
}
