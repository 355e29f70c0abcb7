//! Property checks for the integration and differentiation engine.

use extropy::quadrature::{differentiate, integrate, integrate_fn, Derivative, Integrand, QuadError};
use proptest::prelude::*;

fn smooth(k: f64) -> impl Fn(f64) -> f64 {
    move |x: f64| (-k * x).exp() * (1.0 + x * x).recip()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn linearity(a in -3.0f64..3.0, b in -3.0f64..3.0, k in 0.2f64..4.0) {
        let tol = 1e-10;
        let g1 = smooth(k);
        let g2 = |x: f64| x * (-x).exp();
        let i1 = integrate_fn(&g1, 0.0, f64::INFINITY, tol).unwrap();
        let i2 = integrate_fn(g2, 0.0, f64::INFINITY, tol).unwrap();
        let both = integrate_fn(|x| a * g1(x) + b * g2(x), 0.0, f64::INFINITY, tol).unwrap();
        let combined = a * i1.value + b * i2.value;
        let slack = a.abs() * i1.abs_error_estimate + b.abs() * i2.abs_error_estimate + both.abs_error_estimate;
        prop_assert!((both.value - combined).abs() <= slack + 1e-12, "{} vs {}", both.value, combined);
    }

    #[test]
    fn interval_additivity(split in 0.01f64..0.99, k in 0.2f64..4.0) {
        let tol = 1e-10;
        let (a, c) = (0.0, 3.0);
        let b = a + split * (c - a);
        let g = |x: f64| smooth(k)(x) * x.sqrt();
        let whole = integrate_fn(g, a, c, tol).unwrap();
        let left = integrate_fn(g, a, b, tol).unwrap();
        let right = integrate_fn(g, b, c, tol).unwrap();
        prop_assert!((whole.value - left.value - right.value).abs() <= 3.0 * tol * whole.value.abs().max(1.0));
    }

    #[test]
    fn polynomial_derivatives_are_exact(c in prop::array::uniform5(-2.0f64..2.0), t in -2.0f64..2.0) {
        let p = |x: f64| c[0] + x * (c[1] + x * (c[2] + x * (c[3] + x * c[4])));
        let dp = c[1] + t * (2.0 * c[2] + t * (3.0 * c[3] + t * 4.0 * c[4]));
        let d: Derivative = differentiate(|x| Ok::<_, QuadError>(p(x)), t, 0.5).unwrap();
        prop_assert!((d.value - dp).abs() <= 1e-9 * dp.abs().max(1.0), "{} vs {dp}", d.value);
    }
}

#[test]
fn engine_examples() {
    let r = integrate_fn(|x| (-2.0 * x).exp(), 0.0, f64::INFINITY, 1e-10).unwrap();
    assert!((r.value - 0.5).abs() < 1e-10);
    // alpha = 1, beta = 0.4: x (1-x)^(-1.2) is not integrable at 1
    let g = Integrand::new(|x: f64| x * (1.0 - x).powf(-1.2), 0.0, 1.0).singular(extropy::quadrature::Endpoints::BOTH);
    let r = integrate(&g, 1e-10).unwrap();
    assert!(r.diverged && r.value == f64::INFINITY);
    let d: Derivative = differentiate(|t| Ok::<_, QuadError>(-t / 4.0 - 0.125), 1.0, 0.5).unwrap();
    assert!((d.value + 0.25).abs() < 1e-12);
    let d: Derivative = differentiate(|_| Ok::<_, QuadError>(-0.5), 3.0, 0.5).unwrap();
    assert_eq!(d.value, 0.0);
}
