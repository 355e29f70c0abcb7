//! Sample-mean estimators of the measures, for cross-checking quadrature.
//!
//! J = −½ E f(X) and J^w = −½ E[X f(X)]; the conditional versions sample the
//! conditional law. Bivariate measures use ¼ E f(X,Y) and ¼ E[XY f(X,Y)].

use std::sync::Arc;

use rand::RngCore;

use crate::bivariate::{Bivariate, BivariateMeasure, BIVARIATE_FACTOR};
use crate::distributions::UnivariateDistribution;
use crate::error::{Error, Result};
use crate::measures::{ConditionalLifetime, MeasureId};

/// Estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub standard_error: f64,
    pub samples: usize,
}

/// Running mean and variance.
#[derive(Debug, Default, Clone, Copy)]
struct Welford {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn finish(self, factor: f64) -> McEstimate {
        let var = if self.n > 1 { self.m2 / (self.n - 1) as f64 } else { f64::NAN };
        McEstimate {
            estimate: factor * self.mean,
            standard_error: factor.abs() * (var / self.n as f64).sqrt(),
            samples: self.n,
        }
    }
}

fn check_samples(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Spec(format!("need at least 2 samples (got {n})")));
    }
    Ok(())
}

/// Estimate a univariate measure from `n` draws. Dynamic survival extropy
/// is not an expectation of the density and is rejected.
pub fn estimate(
    dist: &UnivariateDistribution,
    id: MeasureId,
    t: Option<f64>,
    n: usize,
    rng: &mut dyn RngCore,
) -> Result<McEstimate> {
    check_samples(n)?;
    let need_t = || t.ok_or_else(|| Error::Spec(format!("measure '{id}' needs t")));
    let (target, weighted): (UnivariateDistribution, bool) = match id {
        MeasureId::Extropy => (dist.clone(), false),
        MeasureId::WeightedExtropy => (dist.clone(), true),
        MeasureId::ResidualExtropy => (Arc::new(ConditionalLifetime::residual(dist.clone(), need_t()?)?), false),
        MeasureId::WeightedResidualExtropy => (Arc::new(ConditionalLifetime::residual(dist.clone(), need_t()?)?), true),
        MeasureId::PastExtropy => (Arc::new(ConditionalLifetime::past(dist.clone(), need_t()?)?), false),
        MeasureId::WeightedPastExtropy => (Arc::new(ConditionalLifetime::past(dist.clone(), need_t()?)?), true),
        MeasureId::DynamicSurvivalExtropy => {
            return Err(Error::Spec(format!("no Monte-Carlo estimator for '{id}'")));
        }
    };
    let mut acc = Welford::default();
    for _ in 0..n {
        let x = target.sample(rng);
        let f = target.pdf(x);
        acc.push(if weighted { x * f } else { f });
    }
    Ok(acc.finish(-0.5))
}

/// Estimate a bivariate measure from `n` joint draws.
pub fn estimate_bivariate(
    bd: &dyn Bivariate,
    id: BivariateMeasure,
    n: usize,
    rng: &mut dyn RngCore,
) -> Result<McEstimate> {
    check_samples(n)?;
    let mut acc = Welford::default();
    for _ in 0..n {
        let (x, y) = bd
            .sample(rng)
            .ok_or_else(|| Error::Spec(format!("{} has no sampler", bd.name())))?;
        let f = bd.pdf(x, y);
        acc.push(match id {
            BivariateMeasure::Extropy => f,
            BivariateMeasure::WeightedExtropy => x * y * f,
        });
    }
    Ok(acc.finish(BIVARIATE_FACTOR))
}

/// (estimate − reference) / standard error. A zero standard error gives 0
/// when the estimate equals the reference to rounding and ±∞ otherwise.
pub fn standardized_discrepancy(est: &McEstimate, reference: f64) -> f64 {
    let diff = est.estimate - reference;
    if est.standard_error > 0.0 {
        diff / est.standard_error
    } else if diff.abs() <= 1e-12 * reference.abs().max(1.0) {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    }
}
