//! Bivariate extropy J(X,Y) = ¼∬f² and bivariate weighted extropy
//! J^w(X,Y) = ¼∬xy f².
//!
//! The k-dimensional versions carry the factor (−½)^k, which is +¼ for k = 2,
//! so both measures are non-negative.

use std::cell::RefCell;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::RngCore;
use rand_distr::Distribution as _;
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::distributions::{make_distribution, DistSpec, UnivariateDistribution};
use crate::error::{Error, Result};
use crate::measures::{measure, MeasureId, MeasureOptions, MeasureValue, MethodChoice};
use crate::quadrature::{self, Endpoints, Integrand};
use crate::report::ClaimReport;
use crate::special;

/// Factor multiplying ∬ in the bivariate measures.
pub const BIVARIATE_FACTOR: f64 = 0.25;

/// Tolerance of the factorization identities.
pub const FACTORIZATION_TOL: f64 = 1e-6;

/// Integration region of a joint density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Rectangle { x: (f64, f64), y: (f64, f64) },
    /// 0 < x < y < upper
    Triangle { upper: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BivariateMeasure {
    Extropy,
    WeightedExtropy,
}

impl BivariateMeasure {
    pub const ALL: [BivariateMeasure; 2] = [BivariateMeasure::Extropy, BivariateMeasure::WeightedExtropy];

    pub fn as_str(&self) -> &'static str {
        match self {
            BivariateMeasure::Extropy => "bivariate_extropy",
            BivariateMeasure::WeightedExtropy => "bivariate_weighted_extropy",
        }
    }
}

impl fmt::Display for BivariateMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BivariateMeasure {
    type Err = Error;

    /// Accepts the bivariate names and their univariate counterparts.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bivariate_extropy" | "extropy" => Ok(BivariateMeasure::Extropy),
            "bivariate_weighted_extropy" | "weighted_extropy" => Ok(BivariateMeasure::WeightedExtropy),
            _ => Err(Error::Spec(format!(
                "unknown bivariate measure '{s}'; valid measures: bivariate_extropy, bivariate_weighted_extropy"
            ))),
        }
    }
}

/// A joint density on a planar region in the non-negative quadrant.
pub trait Bivariate: Send + Sync + fmt::Debug {
    fn name(&self) -> String;

    fn region(&self) -> Region;

    fn pdf(&self, x: f64, y: f64) -> f64;

    /// Joint draw, if the distribution has a sampler.
    fn sample(&self, _rng: &mut dyn RngCore) -> Option<(f64, f64)> {
        None
    }

    fn closed_form(&self, _id: BivariateMeasure) -> Option<f64> {
        None
    }

    /// Endpoints of the inner (x) interval where the density may blow up.
    fn singular_x(&self) -> Endpoints {
        Endpoints::NONE
    }

    /// Endpoints of the outer (y) interval where the inner integral may blow
    /// up.
    fn singular_y(&self) -> Endpoints {
        Endpoints::NONE
    }

    fn breakpoints_x(&self) -> Vec<f64> {
        Vec::new()
    }

    fn breakpoints_y(&self) -> Vec<f64> {
        Vec::new()
    }
}

pub type BivariateDistribution = Arc<dyn Bivariate>;

/// Density x^(α−1) (y−x)^(β−1) (1−y)^(γ−1) / B(α,β,γ) on 0 < x < y < 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariateBeta {
    alpha: f64,
    beta: f64,
    gamma: f64,
    log_norm: f64,
}

impl BivariateBeta {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid("bivariate_beta", format!("{name} > 0 (got {v})")));
            }
        }
        Ok(BivariateBeta {
            alpha,
            beta,
            gamma,
            log_norm: special::ln_beta3(alpha, beta, gamma),
        })
    }
}

impl Bivariate for BivariateBeta {
    fn name(&self) -> String {
        format!("bivariate_beta(alpha={}, beta={}, gamma={})", self.alpha, self.beta, self.gamma)
    }

    fn region(&self) -> Region {
        Region::Triangle { upper: 1.0 }
    }

    fn pdf(&self, x: f64, y: f64) -> f64 {
        if !(0.0 < x && x < y && y < 1.0) {
            return 0.0;
        }
        ((self.alpha - 1.0) * x.ln() + (self.beta - 1.0) * (y - x).ln() + (self.gamma - 1.0) * (-y).ln_1p()
            - self.log_norm)
            .exp()
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Option<(f64, f64)> {
        let draw = |shape: f64, rng: &mut dyn RngCore| {
            rand_distr::Gamma::new(shape, 1.0)
                .expect("validated shape")
                .sample(rng)
        };
        let g1 = draw(self.alpha, rng);
        let g2 = draw(self.beta, rng);
        let g3 = draw(self.gamma, rng);
        let s = g1 + g2 + g3;
        Some((g1 / s, (g1 + g2) / s))
    }

    fn closed_form(&self, id: BivariateMeasure) -> Option<f64> {
        let (a, b, c) = (self.alpha, self.beta, self.gamma);
        let scale = |ln: f64| BIVARIATE_FACTOR * (ln - 2.0 * self.log_norm).exp();
        Some(match id {
            BivariateMeasure::Extropy => {
                if a > 0.5 && b > 0.5 && c > 0.5 {
                    scale(special::ln_beta3(2.0 * a - 1.0, 2.0 * b - 1.0, 2.0 * c - 1.0))
                } else {
                    f64::INFINITY
                }
            }
            BivariateMeasure::WeightedExtropy => {
                if b > 0.5 && c > 0.5 {
                    scale(special::ln_beta3(2.0 * a, 2.0 * b, 2.0 * c - 1.0))
                        + scale(special::ln_beta3(2.0 * a + 1.0, 2.0 * b - 1.0, 2.0 * c - 1.0))
                } else {
                    f64::INFINITY
                }
            }
        })
    }

    fn singular_x(&self) -> Endpoints {
        Endpoints {
            lower: self.alpha < 1.0,
            upper: self.beta < 1.0,
        }
    }

    fn singular_y(&self) -> Endpoints {
        Endpoints {
            lower: self.alpha + self.beta < 1.5,
            upper: self.gamma < 1.0,
        }
    }
}

/// Independent pair with joint density f_X(x) f_Y(y).
#[derive(Debug, Clone)]
pub struct Product {
    x: UnivariateDistribution,
    y: UnivariateDistribution,
}

impl Product {
    pub fn new(x: UnivariateDistribution, y: UnivariateDistribution) -> Self {
        Product { x, y }
    }

    pub fn marginals(&self) -> (&UnivariateDistribution, &UnivariateDistribution) {
        (&self.x, &self.y)
    }
}

impl Bivariate for Product {
    fn name(&self) -> String {
        format!("product({}, {})", self.x.name(), self.y.name())
    }

    fn region(&self) -> Region {
        Region::Rectangle {
            x: self.x.support(),
            y: self.y.support(),
        }
    }

    fn pdf(&self, x: f64, y: f64) -> f64 {
        self.x.pdf(x) * self.y.pdf(y)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Option<(f64, f64)> {
        let x = self.x.sample(rng);
        let y = self.y.sample(rng);
        Some((x, y))
    }

    fn singular_x(&self) -> Endpoints {
        self.x.singular_density()
    }

    fn singular_y(&self) -> Endpoints {
        self.y.singular_density()
    }

    fn breakpoints_x(&self) -> Vec<f64> {
        self.x.breakpoints()
    }

    fn breakpoints_y(&self) -> Vec<f64> {
        self.y.breakpoints()
    }
}

type JointPdf = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A user-supplied joint density on a rectangle or triangle.
#[derive(Clone)]
pub struct JointDensity {
    name: String,
    region: Region,
    pdf: JointPdf,
}

impl JointDensity {
    pub fn new(name: impl Into<String>, region: Region, pdf: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        JointDensity {
            name: name.into(),
            region,
            pdf: Arc::new(pdf),
        }
    }
}

impl fmt::Debug for JointDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JointDensity")
            .field("name", &self.name)
            .field("region", &self.region)
            .finish()
    }
}

impl Bivariate for JointDensity {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn region(&self) -> Region {
        self.region
    }

    fn pdf(&self, x: f64, y: f64) -> f64 {
        (self.pdf)(x, y)
    }
}

/// Iterated integral of `weight(x, y) · h(x, y)` over the region, inner
/// variable x. Returns the quadrature result of the outer integral.
fn iterated<W, H>(bd: &dyn Bivariate, weight: W, h: H, tol: f64) -> Result<quadrature::QuadratureResult>
where
    W: Fn(f64, f64) -> f64,
    H: Fn(f64, f64) -> f64,
{
    let (y_lo, y_hi) = match bd.region() {
        Region::Rectangle { y, .. } => y,
        Region::Triangle { upper } => (0.0, upper),
    };
    let inner_tol = tol / 10.0;
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let inner_diverged = RefCell::new(false);
    let inner = |y: f64| -> f64 {
        let (x_lo, x_hi) = match bd.region() {
            Region::Rectangle { x, .. } => x,
            Region::Triangle { .. } => (0.0, y),
        };
        if !(x_lo < x_hi) {
            return 0.0;
        }
        let g = Integrand::new(|x: f64| weight(x, y) * h(x, y), x_lo, x_hi)
            .singular(bd.singular_x())
            .breakpoints(bd.breakpoints_x());
        match quadrature::integrate(&g, inner_tol) {
            Ok(r) if r.diverged => {
                *inner_diverged.borrow_mut() = true;
                f64::INFINITY
            }
            Ok(r) => r.value,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e.into());
                f64::NAN
            }
        }
    };
    let outer = Integrand::new(inner, y_lo, y_hi)
        .singular(bd.singular_y())
        .breakpoints(bd.breakpoints_y());
    let result = quadrature::integrate(&outer, tol);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    if inner_diverged.into_inner() {
        return Ok(quadrature::QuadratureResult {
            value: f64::INFINITY,
            abs_error_estimate: f64::INFINITY,
            evaluations: 0,
            diverged: true,
        });
    }
    Ok(result?)
}

/// Evaluate a bivariate measure; closed form when available unless
/// `opts.method` requests quadrature.
pub fn bivariate_measure(bd: &dyn Bivariate, id: BivariateMeasure, opts: &MeasureOptions) -> Result<MeasureValue> {
    if opts.method != MethodChoice::Quadrature {
        if let Some(v) = bd.closed_form(id) {
            return Ok(MeasureValue::closed_form(v));
        }
        if opts.method == MethodChoice::ClosedForm {
            return Err(Error::Spec(format!("no closed form for '{id}' of {}", bd.name())));
        }
    }
    let squared = |x: f64, y: f64| bd.pdf(x, y).powi(2);
    let r = match id {
        BivariateMeasure::Extropy => iterated(bd, |_, _| 1.0, squared, opts.engine_tol())?,
        BivariateMeasure::WeightedExtropy => iterated(bd, |x, y| x * y, squared, opts.engine_tol())?,
    };
    Ok(MeasureValue::from_integral(r, BIVARIATE_FACTOR))
}

pub fn bivariate_extropy(bd: &dyn Bivariate) -> Result<MeasureValue> {
    bivariate_measure(bd, BivariateMeasure::Extropy, &MeasureOptions::default())
}

pub fn bivariate_weighted_extropy(bd: &dyn Bivariate) -> Result<MeasureValue> {
    bivariate_measure(bd, BivariateMeasure::WeightedExtropy, &MeasureOptions::default())
}

/// ∬ f over the region, by the same iterated quadrature.
pub fn total_mass(bd: &dyn Bivariate, tol: f64) -> Result<f64> {
    Ok(iterated(bd, |_, _| 1.0, |x, y| bd.pdf(x, y), tol)?.value)
}

/// J(X,Y) = J(X)J(Y) and J^w(X,Y) = J^w(X)J^w(Y) for independent X, Y, with
/// the joint side by 2D quadrature.
pub fn independence_factorization_check(
    x: &UnivariateDistribution,
    y: &UnivariateDistribution,
    opts: &MeasureOptions,
) -> Result<[ClaimReport; 2]> {
    const ID: &str = "independence_factorization";
    let product = Product::new(x.clone(), y.clone());
    let joint_opts = MeasureOptions {
        method: MethodChoice::Quadrature,
        ..*opts
    };
    let pairs = [
        (BivariateMeasure::Extropy, MeasureId::Extropy, "J(X,Y) = J(X) J(Y)"),
        (
            BivariateMeasure::WeightedExtropy,
            MeasureId::WeightedExtropy,
            "J^w(X,Y) = J^w(X) J^w(Y)",
        ),
    ];
    let mut reports = Vec::with_capacity(2);
    for (joint_id, marginal_id, note) in pairs {
        let joint = bivariate_measure(&product, joint_id, &joint_opts)?;
        let mx = measure(x, marginal_id, None, opts)?;
        let my = measure(y, marginal_id, None, opts)?;
        let rhs = mx.value * my.value;
        let mut report = ClaimReport::equality(ID, joint.value, rhs, FACTORIZATION_TOL)
            .with_note(note)
            .with_detail("marginal_x", mx.value)
            .with_detail("marginal_y", my.value);
        if joint.diverged || mx.diverged || my.diverged {
            report = report.make_indeterminate("a measure diverged");
        }
        reports.push(report);
    }
    let [a, b]: [ClaimReport; 2] = reports.try_into().expect("two reports");
    Ok([a, b])
}

/// Bivariate specification: `{"family": "bivariate_beta", "params":
/// {"alpha", "beta", "gamma"}}` or `{"family": "product", "x": <spec>, "y":
/// <spec>}`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BivariateSpec {
    pub family: String,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default)]
    pub x: Option<DistSpec>,
    #[serde(default)]
    pub y: Option<DistSpec>,
}

pub const BIVARIATE_FAMILIES: &[&str] = &["bivariate_beta", "product"];

impl BivariateSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Spec(format!("bivariate spec: {e}")))
    }
}

pub fn make_bivariate(spec: &BivariateSpec) -> Result<BivariateDistribution> {
    match spec.family.as_str() {
        "bivariate_beta" => {
            if spec.x.is_some() || spec.y.is_some() {
                return Err(Error::Spec("bivariate_beta takes 'params', not 'x'/'y'".into()));
            }
            let get = |name: &str| {
                spec.params
                    .get(name)
                    .and_then(Value::as_f64)
                    .ok_or_else(|| Error::Spec(format!("bivariate_beta requires numeric parameter '{name}'")))
            };
            if let Some(k) = spec.params.keys().find(|k| !["alpha", "beta", "gamma"].contains(&k.as_str())) {
                return Err(Error::Spec(format!(
                    "unknown bivariate_beta parameter '{k}'; expected alpha, beta, gamma"
                )));
            }
            Ok(Arc::new(BivariateBeta::new(get("alpha")?, get("beta")?, get("gamma")?)?))
        }
        "product" => {
            if !spec.params.is_empty() {
                return Err(Error::Spec("product takes 'x' and 'y', not 'params'".into()));
            }
            let (Some(x), Some(y)) = (&spec.x, &spec.y) else {
                return Err(Error::Spec("product requires marginal specs 'x' and 'y'".into()));
            };
            Ok(Arc::new(Product::new(make_distribution(x)?, make_distribution(y)?)))
        }
        other => Err(Error::Spec(format!(
            "unknown bivariate family '{other}'; valid families: {}",
            BIVARIATE_FAMILIES.join(", ")
        ))),
    }
}

pub fn parse_bivariate(text: &str) -> Result<BivariateDistribution> {
    make_bivariate(&BivariateSpec::from_json(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_triangle_closed_forms() {
        let b = BivariateBeta::new(1.0, 1.0, 1.0).unwrap();
        assert!((b.closed_form(BivariateMeasure::Extropy).unwrap() - 0.5).abs() < 1e-14);
        assert!((b.closed_form(BivariateMeasure::WeightedExtropy).unwrap() - 0.125).abs() < 1e-14);
        assert!((b.pdf(0.2, 0.5) - 2.0).abs() < 1e-13);
        assert_eq!(b.pdf(0.5, 0.2), 0.0);
    }

    #[test]
    fn proviso_gives_divergence() {
        let b = BivariateBeta::new(0.5, 1.0, 1.0).unwrap();
        assert_eq!(b.closed_form(BivariateMeasure::Extropy), Some(f64::INFINITY));
        assert!(b.closed_form(BivariateMeasure::WeightedExtropy).unwrap().is_finite());
        let b = BivariateBeta::new(1.0, 1.0, 0.5).unwrap();
        assert_eq!(b.closed_form(BivariateMeasure::WeightedExtropy), Some(f64::INFINITY));
    }

    #[test]
    fn spec_parsing() {
        let d = parse_bivariate(r#"{"family":"bivariate_beta","params":{"alpha":1,"beta":1,"gamma":1}}"#).unwrap();
        assert_eq!(d.region(), Region::Triangle { upper: 1.0 });
        let d = parse_bivariate(
            r#"{"family":"product","x":{"family":"exponential","params":{"lambda":1}},"y":{"family":"uniform","params":{"a":0,"b":1}}}"#,
        )
        .unwrap();
        assert!((d.pdf(0.0, 0.5) - 1.0).abs() < 1e-15);
        assert!(parse_bivariate(r#"{"family":"copula"}"#).is_err());
        assert!(parse_bivariate(r#"{"family":"bivariate_beta","params":{"alpha":1,"beta":-1,"gamma":1}}"#)
            .unwrap_err()
            .is_validation());
    }
}
