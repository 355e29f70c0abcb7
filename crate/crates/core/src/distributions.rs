//! Catalog of univariate lifetime distributions.
//!
//! Every family implements [`Univariate`]. Families whose measures have a
//! known analytic form expose it through [`Univariate::closed_form`].

use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};
use rand_distr::Distribution as _;
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::measures::MeasureId;
use crate::quadrature::Endpoints;
use crate::special;

/// Shared handle to any distribution in the catalog (or built on top of it).
pub type UnivariateDistribution = Arc<dyn Univariate>;

/// A continuous distribution on a subset of the non-negative half-line.
pub trait Univariate: Send + Sync + fmt::Debug {
    /// Short human-readable label including parameters.
    fn name(&self) -> String;

    /// `(lower, upper)`; `upper` may be `+inf`.
    fn support(&self) -> (f64, f64);

    fn pdf(&self, x: f64) -> f64;

    fn cdf(&self, x: f64) -> f64;

    /// Survival function. Implementations compute it directly rather than as
    /// `1 - cdf` so that upper tails keep their relative precision.
    fn sf(&self, x: f64) -> f64;

    fn hazard(&self, x: f64) -> f64 {
        let s = self.sf(x);
        if s > 0.0 {
            self.pdf(x) / s
        } else {
            f64::INFINITY
        }
    }

    fn reversed_hazard(&self, x: f64) -> f64 {
        let c = self.cdf(x);
        if c > 0.0 {
            self.pdf(x) / c
        } else {
            f64::INFINITY
        }
    }

    fn quantile(&self, p: f64) -> f64 {
        bisect_quantile(self, p)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        self.quantile(open_unit(rng))
    }

    /// Analytic value of a measure, if the family carries one. `t` is the
    /// time argument of the conditional measures.
    fn closed_form(&self, _id: MeasureId, _t: Option<f64>) -> Option<f64> {
        None
    }

    /// Support endpoints where the density may be unbounded.
    fn singular_density(&self) -> Endpoints {
        Endpoints::NONE
    }

    /// Interior points where the density is not smooth.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Uniform draw from the open interval (0, 1).
pub(crate) fn open_unit(rng: &mut dyn RngCore) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Inverts the cdf by bisection. Upper-half probabilities are located on
/// the survival function, which is better resolved there.
pub fn bisect_quantile<D: Univariate + ?Sized>(d: &D, p: f64) -> f64 {
    let (lo, hi) = d.support();
    if !(p > 0.0) {
        return lo;
    }
    if p >= 1.0 {
        return hi;
    }
    let below = |x: f64| {
        if p <= 0.5 {
            d.cdf(x) < p
        } else {
            d.sf(x) > 1.0 - p
        }
    };
    let mut a = lo;
    let mut b = hi;
    if !b.is_finite() {
        let mut width = lo.abs().max(1.0);
        b = lo + width;
        while below(b) && b.is_finite() {
            a = b;
            width *= 2.0;
            b = lo + width;
        }
    }
    for _ in 0..400 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b || (b - a) <= 1e-15 * b.abs() {
            break;
        }
        if below(m) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn positive(family: &'static str, name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(family, format!("{name} > 0 (got {value})")))
    }
}

/// Exponential with rate λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponential {
    rate: f64,
}

impl Exponential {
    pub fn new(rate: f64) -> Result<Self> {
        positive("exponential", "lambda", rate)?;
        Ok(Exponential { rate })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

impl Univariate for Exponential {
    fn name(&self) -> String {
        format!("exponential(lambda={})", self.rate)
    }

    fn support(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            self.rate * (-self.rate * x).exp()
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-self.rate * x).exp_m1()
        }
    }

    fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else {
            (-self.rate * x).exp()
        }
    }

    fn hazard(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            self.rate
        }
    }

    fn quantile(&self, p: f64) -> f64 {
        -(-p).ln_1p() / self.rate
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        rand_distr::Exp::new(self.rate).expect("validated rate").sample(rng)
    }

    fn closed_form(&self, id: MeasureId, t: Option<f64>) -> Option<f64> {
        match (id, t) {
            (MeasureId::WeightedExtropy, _) => Some(-0.125),
            (MeasureId::WeightedResidualExtropy, Some(t)) if t >= 0.0 => {
                Some(-self.rate * t / 4.0 - 0.125)
            }
            _ => None,
        }
    }
}

/// Uniform on (a, b).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uniform {
    a: f64,
    b: f64,
}

impl Uniform {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::invalid("uniform", format!("finite a, b (got a={a}, b={b})")));
        }
        if a < 0.0 {
            return Err(Error::invalid("uniform", format!("a >= 0 (got {a})")));
        }
        if b <= a {
            return Err(Error::invalid("uniform", format!("b > a (got a={a}, b={b})")));
        }
        Ok(Uniform { a, b })
    }
}

impl Univariate for Uniform {
    fn name(&self) -> String {
        format!("uniform(a={}, b={})", self.a, self.b)
    }

    fn support(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    fn pdf(&self, x: f64) -> f64 {
        if x < self.a || x > self.b {
            0.0
        } else {
            1.0 / (self.b - self.a)
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        ((x - self.a) / (self.b - self.a)).clamp(0.0, 1.0)
    }

    fn sf(&self, x: f64) -> f64 {
        ((self.b - x) / (self.b - self.a)).clamp(0.0, 1.0)
    }

    fn quantile(&self, p: f64) -> f64 {
        self.a + p * (self.b - self.a)
    }

    fn closed_form(&self, id: MeasureId, _t: Option<f64>) -> Option<f64> {
        let width = self.b - self.a;
        match id {
            MeasureId::Extropy => Some(-1.0 / (2.0 * width)),
            MeasureId::WeightedExtropy => Some(-(self.a + self.b) / (4.0 * width)),
            _ => None,
        }
    }
}

/// Gamma with shape α and scale β: density x^(α-1) e^(-x/β) / (β^α Γ(α)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gamma {
    shape: f64,
    scale: f64,
    log_norm: f64,
}

impl Gamma {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        positive("gamma", "alpha", shape)?;
        positive("gamma", "beta", scale)?;
        Ok(Gamma {
            shape,
            scale,
            log_norm: shape * scale.ln() + special::log_gamma(shape),
        })
    }
}

impl Univariate for Gamma {
    fn name(&self) -> String {
        format!("gamma(alpha={}, beta={})", self.shape, self.scale)
    }

    fn support(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x == 0.0 {
            return match self.shape.partial_cmp(&1.0) {
                Some(std::cmp::Ordering::Less) => f64::INFINITY,
                Some(std::cmp::Ordering::Equal) => 1.0 / self.scale,
                _ => 0.0,
            };
        }
        ((self.shape - 1.0) * x.ln() - x / self.scale - self.log_norm).exp()
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x.is_infinite() {
            1.0
        } else {
            special::gamma_lr(self.shape, x / self.scale)
        }
    }

    fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else if x.is_infinite() {
            0.0
        } else {
            special::gamma_ur(self.shape, x / self.scale)
        }
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        rand_distr::Gamma::new(self.shape, self.scale)
            .expect("validated parameters")
            .sample(rng)
    }

    fn closed_form(&self, id: MeasureId, _t: Option<f64>) -> Option<f64> {
        match id {
            MeasureId::WeightedExtropy => {
                let a = self.shape;
                let ln = special::log_gamma(2.0 * a)
                    - (2.0 * a + 1.0) * std::f64::consts::LN_2
                    - 2.0 * special::log_gamma(a);
                Some(-ln.exp())
            }
            _ => None,
        }
    }

    fn singular_density(&self) -> Endpoints {
        Endpoints {
            lower: self.shape < 1.0,
            upper: false,
        }
    }
}

/// Beta(α, β) on (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Beta {
    alpha: f64,
    beta: f64,
    log_norm: f64,
}

impl Beta {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        positive("beta", "alpha", alpha)?;
        positive("beta", "beta", beta)?;
        Ok(Beta {
            alpha,
            beta,
            log_norm: special::ln_beta2(alpha, beta),
        })
    }
}

fn endpoint_power(exponent: f64, norm: f64) -> f64 {
    if exponent < 0.0 {
        f64::INFINITY
    } else if exponent == 0.0 {
        norm
    } else {
        0.0
    }
}

impl Univariate for Beta {
    fn name(&self) -> String {
        format!("beta(alpha={}, beta={})", self.alpha, self.beta)
    }

    fn support(&self) -> (f64, f64) {
        (0.0, 1.0)
    }

    fn pdf(&self, x: f64) -> f64 {
        let norm = (-self.log_norm).exp();
        if !(0.0..=1.0).contains(&x) {
            0.0
        } else if x == 0.0 {
            endpoint_power(self.alpha - 1.0, norm)
        } else if x == 1.0 {
            endpoint_power(self.beta - 1.0, norm)
        } else {
            ((self.alpha - 1.0) * x.ln() + (self.beta - 1.0) * (-x).ln_1p() - self.log_norm).exp()
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x >= 1.0 {
            1.0
        } else {
            special::beta_reg(self.alpha, self.beta, x)
        }
    }

    fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else if x >= 1.0 {
            0.0
        } else {
            special::beta_reg(self.beta, self.alpha, 1.0 - x)
        }
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        rand_distr::Beta::new(self.alpha, self.beta)
            .expect("validated parameters")
            .sample(rng)
    }

    fn closed_form(&self, id: MeasureId, _t: Option<f64>) -> Option<f64> {
        match id {
            MeasureId::WeightedExtropy => {
                if self.beta > 0.5 {
                    let ln = special::ln_beta2(2.0 * self.alpha, 2.0 * self.beta - 1.0)
                        - 2.0 * self.log_norm;
                    Some(-0.5 * ln.exp())
                } else {
                    Some(f64::NEG_INFINITY)
                }
            }
            _ => None,
        }
    }

    fn singular_density(&self) -> Endpoints {
        Endpoints {
            lower: self.alpha < 1.0,
            upper: self.beta < 1.0,
        }
    }
}

/// Density equal to `c[k]` on `[k, k+1)`, k = 0..n-1.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstant {
    weights: Vec<f64>,
    /// `prefix[k]` = sum of weights before bin k; has n + 1 entries.
    prefix: Vec<f64>,
    /// `suffix[k]` = sum of weights from bin k on; has n + 1 entries.
    suffix: Vec<f64>,
}

/// Tolerance on the unit-sum constraint of piecewise weights.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

impl PiecewiseConstant {
    /// Weights within [`WEIGHT_SUM_TOL`] of unit sum are rescaled to sum to
    /// one exactly.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        const FAMILY: &str = "piecewise_constant";
        if weights.is_empty() {
            return Err(Error::invalid(FAMILY, "at least one weight"));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::invalid(FAMILY, format!("weights >= 0 (got {w})")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::invalid(
                FAMILY,
                format!("weights sum to 1 within {WEIGHT_SUM_TOL} (got {total})"),
            ));
        }
        let weights: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let n = weights.len();
        let mut prefix = vec![0.0; n + 1];
        let mut suffix = vec![0.0; n + 1];
        for k in 0..n {
            prefix[k + 1] = prefix[k] + weights[k];
            suffix[n - 1 - k] = suffix[n - k] + weights[n - 1 - k];
        }
        Ok(PiecewiseConstant {
            weights,
            prefix,
            suffix,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn bin(&self, x: f64) -> usize {
        (x.floor() as usize).min(self.weights.len() - 1)
    }
}

impl Univariate for PiecewiseConstant {
    fn name(&self) -> String {
        let list: Vec<String> = self.weights.iter().map(|w| w.to_string()).collect();
        format!("piecewise_constant(c=[{}])", list.join(", "))
    }

    fn support(&self) -> (f64, f64) {
        (0.0, self.weights.len() as f64)
    }

    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 || x >= self.weights.len() as f64 {
            0.0
        } else {
            self.weights[self.bin(x)]
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        let n = self.weights.len() as f64;
        if x <= 0.0 {
            0.0
        } else if x >= n {
            1.0
        } else {
            let k = self.bin(x);
            self.prefix[k] + self.weights[k] * (x - k as f64)
        }
    }

    fn sf(&self, x: f64) -> f64 {
        let n = self.weights.len() as f64;
        if x <= 0.0 {
            1.0
        } else if x >= n {
            0.0
        } else {
            let k = self.bin(x);
            self.suffix[k + 1] + self.weights[k] * ((k + 1) as f64 - x)
        }
    }

    fn quantile(&self, p: f64) -> f64 {
        let n = self.weights.len();
        if !(p > 0.0) {
            return 0.0;
        }
        for k in 0..n {
            let c = self.weights[k];
            if c > 0.0 && p <= self.prefix[k + 1] {
                return k as f64 + ((p - self.prefix[k]) / c).clamp(0.0, 1.0);
            }
        }
        n as f64
    }

    fn closed_form(&self, id: MeasureId, _t: Option<f64>) -> Option<f64> {
        let squares = self.weights.iter().map(|c| c * c);
        match id {
            MeasureId::Extropy => Some(-0.5 * squares.sum::<f64>()),
            MeasureId::WeightedExtropy => Some(
                -0.25
                    * squares
                        .enumerate()
                        .map(|(k, c2)| c2 * (2 * k + 1) as f64)
                        .sum::<f64>(),
            ),
            _ => None,
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        (1..self.weights.len()).map(|k| k as f64).collect()
    }
}

/// Pareto with shape k and scale σ: survival (σ/x)^k on (σ, ∞), hazard k/x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pareto {
    shape: f64,
    scale: f64,
}

impl Pareto {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        positive("pareto", "k", shape)?;
        positive("pareto", "sigma", scale)?;
        Ok(Pareto { shape, scale })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

impl Univariate for Pareto {
    fn name(&self) -> String {
        format!("pareto(k={}, sigma={})", self.shape, self.scale)
    }

    fn support(&self) -> (f64, f64) {
        (self.scale, f64::INFINITY)
    }

    fn pdf(&self, x: f64) -> f64 {
        if x < self.scale {
            0.0
        } else {
            self.shape / x * (self.scale / x).powf(self.shape)
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= self.scale {
            0.0
        } else {
            -(self.shape * (self.scale / x).ln()).exp_m1()
        }
    }

    fn sf(&self, x: f64) -> f64 {
        if x <= self.scale {
            1.0
        } else {
            (self.scale / x).powf(self.shape)
        }
    }

    fn hazard(&self, x: f64) -> f64 {
        if x < self.scale {
            0.0
        } else {
            self.shape / x
        }
    }

    fn quantile(&self, p: f64) -> f64 {
        self.scale * (-(-p).ln_1p() / self.shape).exp()
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        rand_distr::Pareto::new(self.scale, self.shape)
            .expect("validated parameters")
            .sample(rng)
    }
}

/// Density given on a grid, linearly interpolated and renormalized to unit
/// mass. Zero outside the grid span.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    xs: Vec<f64>,
    fs: Vec<f64>,
    /// Mass to the left of each node.
    below: Vec<f64>,
    /// Mass to the right of each node.
    above: Vec<f64>,
}

impl Tabulated {
    pub fn new(grid: &[[f64; 2]]) -> Result<Self> {
        const FAMILY: &str = "tabulated";
        if grid.len() < 2 {
            return Err(Error::invalid(FAMILY, "at least two grid points"));
        }
        if grid.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid(FAMILY, "finite grid entries"));
        }
        if grid[0][0] < 0.0 {
            return Err(Error::invalid(FAMILY, format!("x >= 0 (got {})", grid[0][0])));
        }
        if grid.windows(2).any(|w| w[1][0] <= w[0][0]) {
            return Err(Error::invalid(FAMILY, "strictly increasing x"));
        }
        if let Some(p) = grid.iter().find(|p| p[1] < 0.0) {
            return Err(Error::invalid(FAMILY, format!("f >= 0 (got {} at x = {})", p[1], p[0])));
        }
        let xs: Vec<f64> = grid.iter().map(|p| p[0]).collect();
        let raw: Vec<f64> = grid.iter().map(|p| p[1]).collect();
        let areas: Vec<f64> = (0..xs.len() - 1)
            .map(|i| 0.5 * (raw[i] + raw[i + 1]) * (xs[i + 1] - xs[i]))
            .collect();
        let total: f64 = areas.iter().sum();
        if !(total > 0.0) {
            return Err(Error::invalid(FAMILY, "positive total mass"));
        }
        let fs: Vec<f64> = raw.iter().map(|f| f / total).collect();
        let n = xs.len();
        let mut below = vec![0.0; n];
        let mut above = vec![0.0; n];
        for i in 1..n {
            below[i] = below[i - 1] + areas[i - 1] / total;
            above[n - 1 - i] = above[n - i] + areas[n - 1 - i] / total;
        }
        Ok(Tabulated { xs, fs, below, above })
    }

    /// Segment index containing `x` (which must lie within the grid span).
    fn segment(&self, x: f64) -> usize {
        let i = self.xs.partition_point(|&node| node <= x);
        i.saturating_sub(1).min(self.xs.len() - 2)
    }

    /// Mass between node `i` and `x` within segment `i`.
    fn partial(&self, i: usize, x: f64) -> f64 {
        let h = self.xs[i + 1] - self.xs[i];
        let d = x - self.xs[i];
        let slope = (self.fs[i + 1] - self.fs[i]) / h;
        self.fs[i] * d + 0.5 * slope * d * d
    }
}

impl Univariate for Tabulated {
    fn name(&self) -> String {
        format!("tabulated({} points)", self.xs.len())
    }

    fn support(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    fn pdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return 0.0;
        }
        let i = self.segment(x);
        let w = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        self.fs[i] + w * (self.fs[i + 1] - self.fs[i])
    }

    fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo {
            0.0
        } else if x >= hi {
            1.0
        } else {
            let i = self.segment(x);
            (self.below[i] + self.partial(i, x)).clamp(0.0, 1.0)
        }
    }

    fn sf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo {
            1.0
        } else if x >= hi {
            0.0
        } else {
            let i = self.segment(x);
            let segment = self.partial(i, self.xs[i + 1]);
            (self.above[i + 1] + segment - self.partial(i, x)).clamp(0.0, 1.0)
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.xs[1..self.xs.len() - 1].to_vec()
    }
}

/// Family names accepted by [`make_distribution`].
pub const FAMILIES: &[&str] = &[
    "exponential",
    "uniform",
    "gamma",
    "beta",
    "piecewise_constant",
    "pareto",
    "tabulated",
];

/// Structured distribution specification:
/// `{"family": "...", "params": {...}}` or
/// `{"family": "tabulated", "grid": [[x, f], ...]}`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistSpec {
    pub family: String,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default)]
    pub grid: Option<Vec<[f64; 2]>>,
}

impl DistSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Spec(format!("distribution spec: {e}")))
    }
}

/// Parse a JSON specification and build the distribution.
pub fn parse_distribution(text: &str) -> Result<UnivariateDistribution> {
    make_distribution(&DistSpec::from_json(text)?)
}

struct Params<'a> {
    family: &'static str,
    map: &'a Map<String, Value>,
}

impl Params<'_> {
    /// Reject keys that are not in `allowed` (each entry lists aliases).
    fn check(&self, allowed: &[&[&str]]) -> Result<()> {
        for key in self.map.keys() {
            if !allowed.iter().any(|names| names.contains(&key.as_str())) {
                let valid: Vec<&str> = allowed.iter().map(|names| names[0]).collect();
                return Err(Error::Spec(format!(
                    "unknown {} parameter '{key}'; expected {}",
                    self.family,
                    valid.join(", ")
                )));
            }
        }
        Ok(())
    }

    fn get(&self, names: &[&str]) -> Result<&Value> {
        names
            .iter()
            .find_map(|n| self.map.get(*n))
            .ok_or_else(|| Error::Spec(format!("{} requires parameter '{}'", self.family, names[0])))
    }

    fn number(&self, names: &[&str]) -> Result<f64> {
        self.get(names)?
            .as_f64()
            .ok_or_else(|| Error::Spec(format!("{} parameter '{}' must be a number", self.family, names[0])))
    }

    fn numbers(&self, names: &[&str]) -> Result<Vec<f64>> {
        let bad = || Error::Spec(format!("{} parameter '{}' must be an array of numbers", self.family, names[0]));
        self.get(names)?
            .as_array()
            .ok_or_else(bad)?
            .iter()
            .map(|v| v.as_f64().ok_or_else(bad))
            .collect()
    }
}

/// Build a catalog distribution from its specification, validating the
/// parameters.
pub fn make_distribution(spec: &DistSpec) -> Result<UnivariateDistribution> {
    let family = FAMILIES
        .iter()
        .copied()
        .find(|f| *f == spec.family || (spec.family == "piecewise" && *f == "piecewise_constant"))
        .ok_or_else(|| {
            Error::Spec(format!(
                "unknown family '{}'; valid families: {}",
                spec.family,
                FAMILIES.join(", ")
            ))
        })?;
    if family != "tabulated" && spec.grid.is_some() {
        return Err(Error::Spec(format!("'grid' is only valid for the tabulated family, not {family}")));
    }
    let p = Params {
        family,
        map: &spec.params,
    };
    const LAMBDA: &[&str] = &["lambda", "rate"];
    const ALPHA: &[&str] = &["alpha", "shape"];
    const BETA: &[&str] = &["beta", "scale"];
    Ok(match family {
        "exponential" => {
            p.check(&[LAMBDA])?;
            Arc::new(Exponential::new(p.number(LAMBDA)?)?)
        }
        "uniform" => {
            p.check(&[&["a"], &["b"]])?;
            Arc::new(Uniform::new(p.number(&["a"])?, p.number(&["b"])?)?)
        }
        "gamma" => {
            p.check(&[ALPHA, BETA])?;
            Arc::new(Gamma::new(p.number(ALPHA)?, p.number(BETA)?)?)
        }
        "beta" => {
            p.check(&[&["alpha"], &["beta"]])?;
            Arc::new(Beta::new(p.number(&["alpha"])?, p.number(&["beta"])?)?)
        }
        "piecewise_constant" => {
            p.check(&[&["c", "weights"]])?;
            Arc::new(PiecewiseConstant::new(p.numbers(&["c", "weights"])?)?)
        }
        "pareto" => {
            p.check(&[&["k", "shape"], &["sigma", "scale"]])?;
            Arc::new(Pareto::new(p.number(&["k", "shape"])?, p.number(&["sigma", "scale"])?)?)
        }
        _ => {
            if !spec.params.is_empty() {
                return Err(Error::Spec("tabulated takes 'grid', not 'params'".into()));
            }
            let grid = spec
                .grid
                .as_ref()
                .ok_or_else(|| Error::Spec("tabulated requires 'grid': [[x, f], ...]".into()))?;
            Arc::new(Tabulated::new(grid)?)
        }
    })
}

/// Closed-form value of a measure for `dist`, if the catalog carries one.
pub fn closed_form(dist: &dyn Univariate, id: MeasureId, t: Option<f64>) -> Option<f64> {
    dist.closed_form(id, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_parsing() {
        let d = parse_distribution(r#"{"family":"uniform","params":{"a":1,"b":3}}"#).unwrap();
        assert_eq!(d.support(), (1.0, 3.0));
        assert_eq!(d.pdf(2.0), 0.5);

        let d = parse_distribution(r#"{"family":"piecewise_constant","params":{"c":[0.3,0.7]}}"#).unwrap();
        assert_eq!(d.pdf(0.5), 0.3);
        assert_eq!(d.pdf(1.5), 0.7);
        assert_eq!(d.pdf(2.5), 0.0);

        let d = parse_distribution(r#"{"family":"exponential","params":{"lambda":1}}"#).unwrap();
        for t in [0.1, 1.0, 7.0] {
            assert!((d.hazard(t) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn validation_names_the_constraint() {
        let cases = [
            (r#"{"family":"uniform","params":{"a":3,"b":1}}"#, "b > a"),
            (r#"{"family":"exponential","params":{"lambda":0}}"#, "lambda > 0"),
            (r#"{"family":"gamma","params":{"alpha":-1,"beta":1}}"#, "alpha > 0"),
            (r#"{"family":"beta","params":{"alpha":1,"beta":0}}"#, "beta > 0"),
            (r#"{"family":"piecewise","params":{"c":[0.3,0.6]}}"#, "sum to 1"),
        ];
        for (text, needle) in cases {
            let err = parse_distribution(text).unwrap_err();
            assert!(err.is_validation(), "{err}");
            assert!(err.to_string().contains(needle), "{err} lacks {needle}");
        }
        let err = parse_distribution(r#"{"family":"weibull","params":{}}"#).unwrap_err();
        assert!(err.to_string().contains("exponential"), "{err}");
        let err = parse_distribution(r#"{"family":"exponential","params":{"mu":1}}"#).unwrap_err();
        assert!(err.to_string().contains("lambda"), "{err}");
    }

    #[test]
    fn closed_form_table() {
        let e = Exponential::new(5.0).unwrap();
        assert_eq!(closed_form(&e, MeasureId::WeightedExtropy, None), Some(-0.125));
        assert_eq!(closed_form(&e, MeasureId::Extropy, None), None);
        let g = Gamma::new(2.0, 3.0).unwrap();
        let v = closed_form(&g, MeasureId::WeightedExtropy, None).unwrap();
        assert!((v + 6.0 / 32.0).abs() < 1e-15);
        let b = Beta::new(1.0, 0.4).unwrap();
        assert_eq!(closed_form(&b, MeasureId::WeightedExtropy, None), Some(f64::NEG_INFINITY));
        let b = Beta::new(1.0, 0.5).unwrap();
        assert_eq!(closed_form(&b, MeasureId::WeightedExtropy, None), Some(f64::NEG_INFINITY));
    }

    #[test]
    fn tabulated_is_renormalized() {
        let t = Tabulated::new(&[[0.0, 2.0], [1.0, 2.0], [2.0, 0.0]]).unwrap();
        // raw mass 2 + 1 = 3
        assert!((t.pdf(0.5) - 2.0 / 3.0).abs() < 1e-15);
        assert!((t.cdf(1.0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((t.sf(1.5) - 0.25 / 3.0).abs() < 1e-15);
        assert!(Tabulated::new(&[[0.0, 1.0], [0.0, 1.0]]).is_err());
    }

    #[test]
    fn piecewise_quantile_skips_empty_bins() {
        let p = PiecewiseConstant::new(vec![0.5, 0.0, 0.5]).unwrap();
        assert_eq!(p.quantile(0.25), 0.5);
        assert_eq!(p.quantile(0.75), 2.5);
    }
}
