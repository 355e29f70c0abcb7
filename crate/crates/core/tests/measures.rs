//! Measure values against hand-derived oracles and the catalog closed forms.

use std::sync::Arc;

use extropy::distributions::*;
use extropy::measures::*;
use extropy::special;

fn exp(rate: f64) -> UnivariateDistribution {
    Arc::new(Exponential::new(rate).unwrap())
}

fn unif(a: f64, b: f64) -> UnivariateDistribution {
    Arc::new(Uniform::new(a, b).unwrap())
}

fn gamma(a: f64, b: f64) -> UnivariateDistribution {
    Arc::new(Gamma::new(a, b).unwrap())
}

fn beta(a: f64, b: f64) -> UnivariateDistribution {
    Arc::new(Beta::new(a, b).unwrap())
}

fn piecewise(c: &[f64]) -> UnivariateDistribution {
    Arc::new(PiecewiseConstant::new(c.to_vec()).unwrap())
}

fn pareto(k: f64, s: f64) -> UnivariateDistribution {
    Arc::new(Pareto::new(k, s).unwrap())
}

fn quad(d: &UnivariateDistribution, id: MeasureId, t: Option<f64>) -> MeasureValue {
    let v = measure(d, id, t, &MeasureOptions::quadrature()).unwrap();
    assert_eq!(v.method, Method::Quadrature);
    v
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

fn catalog() -> Vec<UnivariateDistribution> {
    vec![
        exp(1.0),
        exp(2.5),
        unif(0.0, 1.0),
        unif(1.0, 3.0),
        gamma(2.0, 1.0),
        gamma(3.0, 0.5),
        beta(2.0, 3.0),
        beta(1.5, 0.8),
        piecewise(&[0.3, 0.7]),
        piecewise(&[0.2, 0.5, 0.3]),
        pareto(2.0, 1.0),
        pareto(3.0, 0.5),
        Arc::new(Tabulated::new(&[[0.0, 0.0], [1.0, 2.0], [2.5, 1.0], [4.0, 0.0]]).unwrap()),
    ]
}

#[test]
fn extropy_examples() {
    assert!(close(quad(&unif(0.0, 4.0), MeasureId::Extropy, None).value, -0.125, 1e-8));
    assert!(close(quad(&piecewise(&[0.5, 0.5]), MeasureId::Extropy, None).value, -0.25, 1e-8));
    // -1/2 int e^{-2x} = -1/4
    assert!(close(quad(&exp(1.0), MeasureId::Extropy, None).value, -0.25, 1e-8));
}

#[test]
fn weighted_extropy_closed_forms_match_quadrature() {
    for rate in [0.5, 1.0, 5.0] {
        assert!(close(quad(&exp(rate), MeasureId::WeightedExtropy, None).value, -0.125, 1e-8));
    }
    for (a, b) in [(0.0, 1.0), (0.0, 7.0), (1.0, 3.0), (2.0, 2.5)] {
        let d = unif(a, b);
        let jw = -(a + b) / (4.0 * (b - a));
        let j = -1.0 / (2.0 * (b - a));
        assert!(close(quad(&d, MeasureId::WeightedExtropy, None).value, jw, 1e-8));
        assert!(close(quad(&d, MeasureId::Extropy, None).value, j, 1e-8));
    }
    for alpha in [1.0, 2.0, 3.0] {
        // -Gamma(2a) / (2^(2a+1) Gamma(a)^2)
        let exact = -special::gamma(2.0 * alpha) / (2f64.powf(2.0 * alpha + 1.0) * special::gamma(alpha).powi(2));
        for scale in [0.5, 1.0, 2.0] {
            let v = quad(&gamma(alpha, scale), MeasureId::WeightedExtropy, None).value;
            assert!(close(v, exact, 1e-8), "gamma({alpha},{scale}): {v} vs {exact}");
        }
    }
    assert!(close(-6.0 / 32.0, gamma(2.0, 3.0).closed_form(MeasureId::WeightedExtropy, None).unwrap(), 1e-15));
    for (a, b) in [(1.0, 0.75), (2.0, 3.0), (0.5, 1.5), (3.0, 0.6)] {
        let exact = -special::beta2(2.0 * a, 2.0 * b - 1.0) / (2.0 * special::beta2(a, b).powi(2));
        let v = quad(&beta(a, b), MeasureId::WeightedExtropy, None).value;
        assert!(close(v, exact, 1e-8), "beta({a},{b}): {v} vs {exact}");
    }
    for b in [0.3, 0.4, 0.5] {
        let v = quad(&beta(1.0, b), MeasureId::WeightedExtropy, None);
        assert!(v.diverged && v.value == f64::NEG_INFINITY, "beta(1,{b}): {v:?}");
        let c = weighted_extropy(&beta(1.0, b)).unwrap();
        assert!(c.diverged && c.value == f64::NEG_INFINITY);
    }
}

#[test]
fn piecewise_weights_order_matters_only_for_weighted() {
    let oracle = |c: &[f64]| {
        let j = -0.5 * c.iter().map(|x| x * x).sum::<f64>();
        let jw = -0.25
            * c.iter()
                .enumerate()
                .map(|(k, x)| x * x * (2 * k + 1) as f64)
                .sum::<f64>();
        (j, jw)
    };
    for c in [vec![1.0], vec![0.3, 0.7], vec![0.7, 0.3], vec![0.1, 0.2, 0.3, 0.4]] {
        let d = piecewise(&c);
        let (j, jw) = oracle(&c);
        assert!(close(quad(&d, MeasureId::Extropy, None).value, j, 1e-8));
        assert!(close(quad(&d, MeasureId::WeightedExtropy, None).value, jw, 1e-8));
    }
    let a = quad(&piecewise(&[0.3, 0.7]), MeasureId::WeightedExtropy, None).value;
    let b = quad(&piecewise(&[0.7, 0.3]), MeasureId::WeightedExtropy, None).value;
    assert!((a - b).abs() > 0.1);
    // c = (1) is U(0,1)
    assert!(close(quad(&piecewise(&[1.0]), MeasureId::WeightedExtropy, None).value, -0.25, 1e-8));
}

#[test]
fn residual_and_past_examples() {
    // memorylessness
    for t in [0.5, 1.0, 2.0, 5.0] {
        let v = quad(&exp(1.0), MeasureId::ResidualExtropy, Some(t)).value;
        assert!((v + 0.25).abs() < 1e-9, "t={t}: {v}");
    }
    let u = unif(0.0, 1.0);
    assert!(close(quad(&u, MeasureId::ResidualExtropy, Some(0.5)).value, -1.0, 1e-8));
    assert!(close(quad(&u, MeasureId::PastExtropy, Some(0.5)).value, -1.0, 1e-8));
    assert!(close(quad(&piecewise(&[0.5, 0.5]), MeasureId::PastExtropy, Some(1.0)).value, -0.5, 1e-8));

    for t in [0.1, 0.5, 1.0, 2.0, 3.0, 4.5] {
        let v = quad(&exp(1.0), MeasureId::WeightedResidualExtropy, Some(t)).value;
        assert!(close(v, -t / 4.0 - 0.125, 1e-8));
        let v = quad(&exp(2.0), MeasureId::WeightedResidualExtropy, Some(t)).value;
        assert!(close(v, -2.0 * t / 4.0 - 0.125, 1e-8));
    }
    for t in [1.5, 2.0, 4.0] {
        let v = quad(&pareto(2.0, 1.0), MeasureId::WeightedResidualExtropy, Some(t)).value;
        assert!(close(v, -0.5, 1e-8), "pareto t={t}: {v}");
    }
    for b in [1.0, 3.0] {
        for t in [0.2 * b, 0.5 * b, 0.9 * b] {
            let v = quad(&unif(0.0, b), MeasureId::WeightedPastExtropy, Some(t)).value;
            assert!(close(v, -0.25, 1e-8));
        }
    }
    // int_0^1 x e^{-2x} dx = (1 - 3e^{-2}) / 4
    let e = std::f64::consts::E;
    let oracle = -(1.0 - 3.0 / (e * e)) / (8.0 * (1.0 - 1.0 / e).powi(2));
    assert!(close(quad(&exp(1.0), MeasureId::WeightedPastExtropy, Some(1.0)).value, oracle, 1e-8));
}

#[test]
fn dynamic_survival_examples() {
    for rate in [0.5, 1.0, 3.0] {
        for t in [0.0, 0.3, 2.0] {
            let v = quad(&exp(rate), MeasureId::DynamicSurvivalExtropy, Some(t)).value;
            assert!(close(v, -1.0 / (4.0 * rate), 1e-8));
        }
    }
    for b in [1.0, 4.0] {
        for t in [0.0, 0.25 * b, 0.75 * b] {
            let v = quad(&unif(0.0, b), MeasureId::DynamicSurvivalExtropy, Some(t)).value;
            assert!(close(v, -(b - t) / 6.0, 1e-8));
        }
    }
    // int F̄^2 = int x^{-2k} diverges for k <= 1/2
    let v = quad(&pareto(0.4, 1.0), MeasureId::DynamicSurvivalExtropy, Some(2.0));
    assert!(v.diverged);
}

#[test]
fn limits_recover_weighted_extropy() {
    for d in catalog() {
        let whole = quad(&d, MeasureId::WeightedExtropy, None).value;
        let (lo, hi) = d.support();
        let near_start = quad(&d, MeasureId::WeightedResidualExtropy, Some(lo + 1e-6)).value;
        assert!((near_start - whole).abs() < 1e-5, "{}: {near_start} vs {whole}", d.name());
        // An unbounded density at the upper end converges like a power of
        // the distance, so approach it more closely.
        let gap = if d.singular_density().upper { 1e-11 } else { 1e-6 };
        let end = if hi.is_finite() { hi - gap } else { d.quantile(1.0 - 1e-13) };
        let near_end = quad(&d, MeasureId::WeightedPastExtropy, Some(end)).value;
        assert!((near_end - whole).abs() < 1e-5, "{}: {near_end} vs {whole}", d.name());
    }
}

#[test]
fn values_are_non_positive() {
    for d in catalog() {
        let grid = default_grid(d.as_ref());
        for id in MeasureId::ALL {
            let ts: Vec<Option<f64>> = if id.is_time_indexed() {
                grid.iter().step_by(4).map(|t| Some(*t)).collect()
            } else {
                vec![None]
            };
            for t in ts {
                let v = quad(&d, id, t);
                assert!(v.value <= 0.0, "{} {id} {t:?}: {v:?}", d.name());
            }
        }
    }
}

#[test]
fn decomposition_identity_on_grids() {
    for d in catalog() {
        let (lo, hi) = (d.quantile(0.02), d.quantile(0.98));
        for i in 0..10 {
            let t = lo + (hi - lo) * i as f64 / 9.0;
            let r = decomposition_check(&d, t, &MeasureOptions::default()).unwrap();
            assert_eq!(r.verdict, extropy::Verdict::Holds, "{} t={t}: {r:?}", d.name());
        }
    }
    // hand computation for U(0,1) at t = 0.5: -1/16 - 3/16
    let r = decomposition_check(&unif(0.0, 1.0), 0.5, &MeasureOptions::default()).unwrap();
    assert!(close(r.rhs, -0.25, 1e-9));
    assert!(close(r.detail("weighted_residual").unwrap(), -1.5 / 2.0, 1e-9));
}

#[test]
fn gamma_weighted_extropy_is_free_of_scale() {
    for alpha in [0.8, 2.0, 4.5] {
        let vals: Vec<f64> = [0.5, 1.0, 2.0]
            .iter()
            .map(|s| quad(&gamma(alpha, *s), MeasureId::WeightedExtropy, None).value)
            .collect();
        assert!((vals[0] - vals[1]).abs() < 1e-8 && (vals[1] - vals[2]).abs() < 1e-8, "{vals:?}");
    }
}

#[test]
fn derivative_identity_matches_finite_differences() {
    let opts = MeasureOptions::default();
    let c = weighted_residual_derivative(&exp(1.0), 1.0, &opts).unwrap();
    assert!((c.numeric + 0.25).abs() < 1e-6, "{c:?}");
    assert!((c.corrected_formula + 0.25).abs() < 1e-8);
    assert!((c.paper_formula - 0.3125).abs() < 1e-8);

    let c = weighted_past_derivative(&unif(0.0, 1.0), 0.5, &opts).unwrap();
    assert!(c.numeric.abs() < 1e-6, "{c:?}");
    assert!(c.corrected_formula.abs() < 1e-8);
    assert!((c.paper_formula + 0.75).abs() < 1e-8);

    // U(0,1): J^w(X_t) = -(1+t)/(4(1-t)), derivative -1/(2(1-t)^2)
    let c = weighted_residual_derivative(&unif(0.0, 1.0), 0.3, &opts).unwrap();
    assert!((c.numeric + 0.5 / 0.49).abs() < 1e-5, "{c:?}");

    let smooth = [exp(1.0), exp(0.5), gamma(2.0, 1.0), gamma(3.0, 2.0), unif(0.0, 2.0), beta(2.0, 3.0), pareto(2.0, 1.0)];
    for d in smooth {
        let (lo, hi) = (d.quantile(0.1), d.quantile(0.9));
        for i in 0..5 {
            let t = lo + (hi - lo) * i as f64 / 4.0;
            let c = weighted_residual_derivative(&d, t, &opts).unwrap();
            let v = VALIDATED_IDENTITY;
            assert!((c.numeric - c.formula(v)).abs() < 1e-5, "{} t={t}: {c:?}", d.name());
            let c = weighted_past_derivative(&d, t, &opts).unwrap();
            assert!((c.numeric - c.formula(v)).abs() < 1e-5, "{} past t={t}: {c:?}", d.name());
        }
    }
}

#[test]
fn printed_derivative_identity_fails_the_oracle() {
    assert_eq!(VALIDATED_IDENTITY, DerivativeIdentity::Corrected);
    let c = weighted_residual_derivative(&exp(1.0), 1.0, &MeasureOptions::default()).unwrap();
    let gap = c.paper_formula - c.numeric;
    assert!((gap - 0.5625).abs() < 1e-6, "{gap}");
}

#[test]
fn domain_errors_at_the_boundary() {
    assert!(matches!(
        weighted_past_extropy(&exp(1.0), 0.0),
        Err(extropy::Error::Domain(_))
    ));
    assert!(matches!(
        weighted_residual_extropy(&unif(0.0, 1.0), 1.0),
        Err(extropy::Error::Domain(_))
    ));
}
