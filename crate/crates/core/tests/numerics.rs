use std::sync::Arc;

use proptest::prelude::*;
use randhorizon::numerics::{
    composite_gauss_legendre, find_root_bracketed, integrate_adaptive, richardson_extrapolate,
    std_normal_cdf, Bracket, ExpSweep, GridFunction, LogGrid, Tail, TailFit,
};
use randhorizon::Error;

#[test]
fn richardson_on_published_sequence_within_rounding() {
    // the inputs carry four decimals; the weights 1/6, -5/3, 5/2 amplify that rounding
    let est = richardson_extrapolate(&[(200, 0.6978), (500, 0.6981), (1000, 0.6982)]).unwrap();
    let amplified = (1.0 / 6.0 + 5.0 / 3.0 + 2.5) * 0.5e-4;
    assert!((est - 0.6982f64).abs() <= amplified, "{est}");
    assert!(matches!(richardson_extrapolate(&[(5, 1.0), (5, 2.0)]), Err(Error::Input(_))));
}

#[test]
fn float_instantiation_runs_end_to_end() {
    let g = Arc::new(LogGrid::<f32>::new(0.1, 10.0, 801).unwrap());
    let f = GridFunction::from_fn(g, |x| x.atan(), TailFit::power(0.0, 1.0), TailFit::power(1.5, -1.0)).unwrap();
    assert!((f.eval(1.0) - std::f32::consts::FRAC_PI_4).abs() < 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn richardson_exact_on_polynomials(c in prop::collection::vec(-5.0f64..5.0, 3)) {
        let p = |n: usize| { let t = 1.0 / n as f64; c[0] + c[1] * t + c[2] * t * t };
        let est = richardson_extrapolate(&[(1, p(1)), (2, p(2)), (3, p(3))]).unwrap();
        prop_assert!((est - c[0]).abs() < 1e-10);
    }

    #[test]
    fn root_of_shifted_cubic(r in 0.1f64..9.9) {
        let root = find_root_bracketed(|x: f64| (x - r).powi(3) + 0.1 * (x - r), Bracket::new(0.0, 10.0).unwrap(), 1e-12).unwrap();
        prop_assert!((root - r).abs() <= 1e-10 * r.max(1.0));
    }

    #[test]
    fn normal_cdf_is_symmetric(x in -8.0f64..8.0) {
        prop_assert!((std_normal_cdf(x) + std_normal_cdf(-x) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quadratures_agree_on_smooth_integrands(a in -2.0f64..2.0, w in 0.1f64..6.0) {
        let f = |x: f64| (a * x).exp() * (w * x).cos();
        let exact = {
            let g = |x: f64| (a * x).exp() * (a * (w * x).cos() + w * (w * x).sin()) / (a * a + w * w);
            g(1.0) - g(-1.0)
        };
        let ad = integrate_adaptive(f, -1.0, 1.0, 1e-12, 1e-14).unwrap();
        let gl = composite_gauss_legendre(f, -1.0, 1.0, 16);
        prop_assert!((ad - exact).abs() < 1e-11);
        prop_assert!((gl - exact).abs() < 1e-11);
    }

    #[test]
    fn tail_integral_matches_quadrature(p in -3.0f64..-0.5, m in 0.1f64..3.0, lp in 0u32..3) {
        // ∫ tail(e^s) e^{-m(s-k)} over a finite window above the anchor
        let t = Tail::new(0.3, 2.0, p, lp, 1.5);
        let closed = t.weighted_integral(1.5, 4.0, -m, 1.5).unwrap();
        let quad = integrate_adaptive(|s: f64| t.eval_log(s) * (-m * (s - 1.5)).exp(), 1.5, 4.0, 1e-13, 1e-15).unwrap();
        prop_assert!((closed - quad).abs() < 1e-10 * (1.0 + quad.abs()));
    }

    #[test]
    fn sweeps_of_exponentials_are_closed_form(k in 0.5f64..4.0, q in -0.4f64..0.4) {
        // f = e^{q u}: Left(U; k) = e^{qU}/(k + q), Right(U; k) = e^{qU}/(k - q)
        let g = Arc::new(LogGrid::centered(1.0, 5.0, 2001).unwrap());
        let f = GridFunction::from_fn(g, |x: f64| x.powf(q), TailFit::power(0.0, q), TailFit::power(0.0, q)).unwrap();
        let left = ExpSweep::left(&f, k).unwrap();
        let right = ExpSweep::right(&f, k).unwrap();
        for u in [-2.0f64, 0.0, 1.3] {
            prop_assert!((left.at_log(u).unwrap() - (q * u).exp() / (k + q)).abs() < 1e-8);
            prop_assert!((right.at_log(u).unwrap() - (q * u).exp() / (k - q)).abs() < 1e-8);
        }
    }
}
