use crate::{Error, Real, Result};

/// Value at `1/n = 0` of the polynomial in `1/n` through the samples.
///
/// Neville's scheme; exact when the samples lie on a polynomial in `1/n` of
/// degree below the number of samples.
pub fn richardson_extrapolate<T: Real>(samples: &[(usize, T)]) -> Result<T> {
    if samples.len() < 2 {
        return Err(Error::Input(format!(
            "extrapolation needs at least two samples, got {}",
            samples.len()
        )));
    }
    if let Some((n, _)) = samples.iter().find(|(n, _)| *n == 0) {
        return Err(Error::Input(format!("sample index must be positive, got {n}")));
    }
    for (i, (n, _)) in samples.iter().enumerate() {
        if samples[..i].iter().any(|(m, _)| m == n) {
            return Err(Error::Input(format!("duplicate sample index n = {n}")));
        }
    }
    let t: Vec<T> = samples.iter().map(|(n, _)| T::count(*n).recip()).collect();
    let mut p: Vec<T> = samples.iter().map(|(_, v)| *v).collect();
    let m = p.len();
    for level in 1..m {
        for i in 0..m - level {
            let j = i + level;
            // extrapolate to t = 0
            p[i] = (t[i] * p[i + 1] - t[j] * p[i]) / (t[i] - t[j]);
        }
    }
    Ok(p[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_in_reciprocal() {
        let (a, b) = (1.5f64, -0.7);
        let v = richardson_extrapolate(&[(1, a + b), (2, a + b / 2.0)]).unwrap();
        assert!((v - a).abs() < 1e-15);
    }

    #[test]
    fn quadratic_with_three_points() {
        let f = |n: f64| 2.0 + 3.0 / n - 5.0 / (n * n);
        let v = richardson_extrapolate(&[(1, f(1.0)), (2, f(2.0)), (3, f(3.0))]).unwrap();
        assert!((v - 2.0).abs() < 1e-13);
        // the three-point weights are (1, -8, 9)/2
        let (p1, p2, p3) = (0.3f64, 0.7, 1.1);
        let v = richardson_extrapolate(&[(1, p1), (2, p2), (3, p3)]).unwrap();
        assert!((v - (p1 - 8.0 * p2 + 9.0 * p3) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_duplicates() {
        assert!(matches!(
            richardson_extrapolate(&[(2, 1.0f64), (2, 1.1)]),
            Err(Error::Input(_))
        ));
        assert!(richardson_extrapolate(&[(2, 1.0f64)]).is_err());
    }
}
