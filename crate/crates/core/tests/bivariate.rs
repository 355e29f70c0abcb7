//! Bivariate measures against closed forms, 2D quadrature and factorization.

use std::sync::Arc;

use extropy::bivariate::*;
use extropy::distributions::*;
use extropy::measures::MeasureOptions;
use extropy::special;
use extropy::Verdict;

fn quad(bd: &dyn Bivariate, id: BivariateMeasure) -> f64 {
    let v = bivariate_measure(bd, id, &MeasureOptions::quadrature()).unwrap();
    assert!(!v.diverged);
    v.value
}

#[test]
fn uniform_triangle_values() {
    let b = BivariateBeta::new(1.0, 1.0, 1.0).unwrap();
    assert!((quad(&b, BivariateMeasure::Extropy) - 0.5).abs() < 1e-6);
    assert!((quad(&b, BivariateMeasure::WeightedExtropy) - 0.125).abs() < 1e-6);
    assert!((bivariate_extropy(&b).unwrap().value - 0.5).abs() < 1e-14);
    assert!((bivariate_weighted_extropy(&b).unwrap().value - 0.125).abs() < 1e-14);
}

#[test]
fn bivariate_beta_closed_forms_match_quadrature() {
    let grid = [0.75, 1.0, 2.0];
    for &a in &grid {
        for &b in &grid {
            for &c in &grid {
                let d = BivariateBeta::new(a, b, c).unwrap();
                assert!((total_mass(&d, 1e-10).unwrap() - 1.0).abs() < 1e-7, "mass ({a},{b},{c})");
                for id in BivariateMeasure::ALL {
                    let exact = d.closed_form(id).unwrap();
                    let v = quad(&d, id);
                    assert!((v - exact).abs() < 1e-6 * exact.max(1.0), "({a},{b},{c}) {id}: {v} vs {exact}");
                    assert!(v >= 0.0);
                }
            }
        }
    }
    // B(3,3,3) / (4 B(2,2,2)^2) from factorials: (2!)^3/8! * 120^2 / 4
    let d = BivariateBeta::new(2.0, 2.0, 2.0).unwrap();
    let oracle = 8.0 / 40320.0 * 120.0 * 120.0 / 4.0;
    assert!((d.closed_form(BivariateMeasure::Extropy).unwrap() - oracle).abs() < 1e-12);
    assert!((special::beta3(3.0, 3.0, 3.0) - 8.0 / 40320.0).abs() < 1e-15);
}

#[test]
fn product_examples() {
    let e1: UnivariateDistribution = Arc::new(Exponential::new(1.0).unwrap());
    let u1: UnivariateDistribution = Arc::new(Uniform::new(0.0, 1.0).unwrap());
    let p = Product::new(e1.clone(), e1.clone());
    assert!((quad(&p, BivariateMeasure::Extropy) - 0.0625).abs() < 1e-8);
    let p = Product::new(e1, u1.clone());
    assert!((quad(&p, BivariateMeasure::WeightedExtropy) - 0.03125).abs() < 1e-8);
    let p = Product::new(u1.clone(), u1);
    assert!((quad(&p, BivariateMeasure::WeightedExtropy) - 0.0625).abs() < 1e-8);
}

#[test]
fn factorization_across_catalog_pairs() {
    let members: Vec<UnivariateDistribution> = vec![
        Arc::new(Exponential::new(1.0).unwrap()),
        Arc::new(Exponential::new(2.0).unwrap()),
        Arc::new(Uniform::new(0.0, 1.0).unwrap()),
        Arc::new(Uniform::new(0.0, 2.0).unwrap()),
        Arc::new(Gamma::new(2.0, 1.0).unwrap()),
        Arc::new(Beta::new(2.0, 3.0).unwrap()),
        Arc::new(PiecewiseConstant::new(vec![0.3, 0.7]).unwrap()),
        Arc::new(Pareto::new(2.0, 1.0).unwrap()),
    ];
    for x in &members {
        for y in &members {
            let reports = independence_factorization_check(x, y, &MeasureOptions::default()).unwrap();
            for r in reports {
                assert_eq!(r.verdict, Verdict::Holds, "{} x {}: {r:?}", x.name(), y.name());
            }
        }
    }
    let u2: UnivariateDistribution = Arc::new(Uniform::new(0.0, 2.0).unwrap());
    let [j, jw] = independence_factorization_check(&u2, &u2, &MeasureOptions::default()).unwrap();
    assert!((j.lhs - 0.0625).abs() < 1e-8 && (jw.lhs - 0.0625).abs() < 1e-8);
}

#[test]
fn divergent_parameters() {
    let d = BivariateBeta::new(0.4, 1.0, 1.0).unwrap();
    let v = bivariate_measure(&d, BivariateMeasure::Extropy, &MeasureOptions::quadrature()).unwrap();
    assert!(v.diverged && v.value == f64::INFINITY, "{v:?}");
    let v = bivariate_extropy(&d).unwrap();
    assert!(v.diverged && v.value == f64::INFINITY);
}
