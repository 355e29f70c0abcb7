//! Pointwise invariants, normalization, hazard identity and sampler checks
//! for every catalog family.

use std::sync::Arc;

use extropy::distributions::*;
use extropy::quadrature::{integrate, Integrand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn catalog() -> Vec<UnivariateDistribution> {
    vec![
        Arc::new(Exponential::new(1.0).unwrap()),
        Arc::new(Exponential::new(3.0).unwrap()),
        Arc::new(Uniform::new(0.0, 1.0).unwrap()),
        Arc::new(Uniform::new(1.0, 3.0).unwrap()),
        Arc::new(Gamma::new(2.0, 1.0).unwrap()),
        Arc::new(Gamma::new(0.7, 2.0).unwrap()),
        Arc::new(Gamma::new(3.0, 0.5).unwrap()),
        Arc::new(Beta::new(2.0, 3.0).unwrap()),
        Arc::new(Beta::new(0.6, 0.8).unwrap()),
        Arc::new(Beta::new(1.0, 0.4).unwrap()),
        Arc::new(PiecewiseConstant::new(vec![0.3, 0.7]).unwrap()),
        Arc::new(PiecewiseConstant::new(vec![0.2, 0.5, 0.3]).unwrap()),
        Arc::new(Pareto::new(2.0, 1.0).unwrap()),
        Arc::new(Pareto::new(0.8, 2.0).unwrap()),
        Arc::new(Tabulated::new(&[[0.0, 0.0], [1.0, 2.0], [2.5, 1.0], [4.0, 0.0]]).unwrap()),
    ]
}

/// Interior probe points spread over the bulk of the distribution.
fn probes(d: &dyn Univariate) -> Vec<f64> {
    (1..20).map(|i| d.quantile(i as f64 / 20.0)).collect()
}

#[test]
fn cdf_and_survival_complement() {
    for d in catalog() {
        for x in probes(d.as_ref()) {
            let sum = d.cdf(x) + d.sf(x);
            assert!((sum - 1.0).abs() <= 1e-12, "{} at {x}: {sum}", d.name());
        }
    }
}

#[test]
fn hazards_are_density_ratios() {
    for d in catalog() {
        for x in probes(d.as_ref()) {
            let r = d.pdf(x) / d.sf(x);
            let q = d.pdf(x) / d.cdf(x);
            assert!((d.hazard(x) - r).abs() <= 1e-12 * r.max(1.0), "{} r at {x}", d.name());
            assert!((d.reversed_hazard(x) - q).abs() <= 1e-12 * q.max(1.0), "{} q at {x}", d.name());
        }
    }
}

#[test]
fn pareto_hazard_is_k_over_t() {
    let p = Pareto::new(2.5, 1.5).unwrap();
    for t in [1.5, 2.0, 7.0, 100.0] {
        let ratio = p.pdf(t) / p.sf(t);
        assert!((ratio - 2.5 / t).abs() < 1e-14);
        assert_eq!(p.hazard(t), 2.5 / t);
    }
}

#[test]
fn densities_have_unit_mass() {
    for d in catalog() {
        let (lo, hi) = d.support();
        let g = Integrand::new(|x: f64| d.pdf(x), lo, hi)
            .singular(d.singular_density())
            .breakpoints(d.breakpoints());
        let r = integrate(&g, 1e-10).unwrap();
        assert!((r.value - 1.0).abs() < 1e-8, "{}: {r:?}", d.name());
    }
}

#[test]
fn cdf_is_monotone_and_quantile_inverts_it() {
    for d in catalog() {
        let xs = probes(d.as_ref());
        for w in xs.windows(2) {
            assert!(d.cdf(w[0]) <= d.cdf(w[1]), "{}", d.name());
        }
        for x in xs {
            let back = d.quantile(d.cdf(x));
            assert!((back - x).abs() < 1e-8 * x.max(1.0), "{} at {x}: {back}", d.name());
        }
    }
}

#[test]
fn survival_from_cumulative_hazard() {
    // Members with support starting at 0 and continuous hazard.
    let members: Vec<UnivariateDistribution> = vec![
        Arc::new(Exponential::new(1.0).unwrap()),
        Arc::new(Exponential::new(0.5).unwrap()),
        Arc::new(Uniform::new(0.0, 2.0).unwrap()),
        Arc::new(Gamma::new(2.0, 1.0).unwrap()),
        Arc::new(Gamma::new(3.0, 2.0).unwrap()),
        Arc::new(Beta::new(2.0, 3.0).unwrap()),
    ];
    for d in members {
        let hi = d.quantile(0.99);
        for i in 1..=20 {
            let t = hi * i as f64 / 20.0;
            let h = integrate(&Integrand::new(|u: f64| d.hazard(u), 0.0, t), 1e-11).unwrap();
            let s = (-h.value).exp();
            assert!((s - d.sf(t)).abs() < 1e-7, "{} at {t}: {s} vs {}", d.name(), d.sf(t));
        }
    }
}

/// Kolmogorov-Smirnov distance between the empirical cdf of `samples` and F.
fn ks_distance(d: &dyn Univariate, mut samples: Vec<f64>) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = d.cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn samplers_match_their_cdf() {
    // Critical KS distance at significance 0.001 for n = 1e5 is about 0.0062.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for d in catalog() {
        let samples: Vec<f64> = (0..100_000).map(|_| d.sample(&mut rng)).collect();
        let ks = ks_distance(d.as_ref(), samples);
        assert!(ks <= 0.01, "{}: KS {ks}", d.name());
    }
}

#[test]
fn seeded_sampling_is_reproducible() {
    let d = Gamma::new(2.0, 1.0).unwrap();
    let draw = |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..5).map(|_| d.sample(&mut rng)).collect::<Vec<_>>()
    };
    assert_eq!(draw(11), draw(11));
    assert_ne!(draw(11), draw(12));
}
