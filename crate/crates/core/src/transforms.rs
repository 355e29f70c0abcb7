//! Measures of Y = Φ(X) for strictly monotone Φ.
//!
//! Everything here integrates in the x-domain against f_X; [`Pushforward`]
//! provides the density of Y itself so the two routes can be compared.

use std::cell::Cell;
use std::fmt;
use std::sync::Arc;

use rand::RngCore;

use crate::distributions::{Univariate, UnivariateDistribution};
use crate::error::{Error, Result};
use crate::measures::{measure, MeasureId, MeasureOptions, MeasureValue, Method, BOUNDARY_MASS};
use crate::quadrature::{self, Endpoints, Integrand};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// Allowed relative error of Φ(Φ⁻¹(y)) = y at the validation probes.
pub const ROUND_TRIP_TOL: f64 = 1e-9;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Φ with its inverse and derivative, supplied as evaluators.
#[derive(Clone)]
pub struct MonotoneTransform {
    name: String,
    forward: RealFn,
    inverse: RealFn,
    derivative: RealFn,
    direction: Direction,
}

impl fmt::Debug for MonotoneTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonotoneTransform")
            .field("name", &self.name)
            .field("direction", &self.direction)
            .finish()
    }
}

impl MonotoneTransform {
    pub fn new(
        name: impl Into<String>,
        direction: Direction,
        forward: impl Fn(f64) -> f64 + Send + Sync + 'static,
        inverse: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        MonotoneTransform {
            name: name.into(),
            forward: Arc::new(forward),
            inverse: Arc::new(inverse),
            derivative: Arc::new(derivative),
            direction,
        }
    }

    pub fn identity() -> Self {
        Self::new("identity", Direction::Increasing, |x| x, |y| y, |_| 1.0)
    }

    /// Φ(x) = a x, a > 0.
    pub fn scale(a: f64) -> Result<Self> {
        Self::affine(a, 0.0).map(|t| t.renamed(format!("scale:{a}")))
    }

    /// Φ(x) = a x + b, a > 0, b >= 0.
    pub fn affine(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidTransform(format!("affine needs a > 0 (got {a})")));
        }
        if !(b >= 0.0 && b.is_finite()) {
            return Err(Error::InvalidTransform(format!("affine needs b >= 0 (got {b})")));
        }
        Ok(Self::new(
            format!("affine:{a},{b}"),
            Direction::Increasing,
            move |x| a * x + b,
            move |y| (y - b) / a,
            move |_| a,
        ))
    }

    /// Φ(x) = x², increasing on the non-negative half-line.
    pub fn square() -> Self {
        Self::new("square", Direction::Increasing, |x| x * x, f64::sqrt, |x| 2.0 * x)
    }

    /// Φ(x) = eˣ.
    pub fn exp() -> Self {
        Self::new("exp", Direction::Increasing, f64::exp, f64::ln, f64::exp)
    }

    /// Φ(x) = 1/x, decreasing on the positive half-line.
    pub fn reciprocal() -> Self {
        Self::new("reciprocal", Direction::Decreasing, |x| 1.0 / x, |y| 1.0 / y, |x| -1.0 / (x * x))
    }

    /// Probability integral transform Φ = F_X.
    pub fn pit(dist: &UnivariateDistribution) -> Self {
        let (f, q, d) = (dist.clone(), dist.clone(), dist.clone());
        Self::new(
            "pit",
            Direction::Increasing,
            move |x| f.cdf(x),
            move |y| q.quantile(y),
            move |x| d.pdf(x),
        )
    }

    /// Φ = F̄_X, the decreasing counterpart of [`MonotoneTransform::pit`].
    pub fn survival(dist: &UnivariateDistribution) -> Self {
        let (f, q, d) = (dist.clone(), dist.clone(), dist.clone());
        Self::new(
            "survival",
            Direction::Decreasing,
            move |x| f.sf(x),
            move |y| q.quantile(1.0 - y),
            move |x| -d.pdf(x),
        )
    }

    /// Parse the CLI vocabulary: `scale:a`, `affine:a,b`, `square`, `exp`,
    /// `pit`. The distribution is needed for `pit`.
    pub fn parse(text: &str, dist: &UnivariateDistribution) -> Result<Self> {
        let number = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidTransform(format!("'{s}' is not a number in transform '{text}'")))
        };
        let (head, args) = text.split_once(':').unwrap_or((text, ""));
        match (head, args) {
            ("scale", a) if !a.is_empty() => Self::scale(number(a)?),
            ("affine", ab) => {
                let (a, b) = ab
                    .split_once(',')
                    .ok_or_else(|| Error::InvalidTransform(format!("affine needs 'affine:a,b' (got '{text}')")))?;
                Self::affine(number(a)?, number(b)?)
            }
            ("square", "") => Ok(Self::square()),
            ("exp", "") => Ok(Self::exp()),
            ("pit", "") => Ok(Self::pit(dist)),
            ("identity", "") => Ok(Self::identity()),
            _ => Err(Error::InvalidTransform(format!(
                "unknown transform '{text}'; valid transforms: scale:a, affine:a,b, square, exp, pit"
            ))),
        }
    }

    fn renamed(mut self, name: String) -> Self {
        self.name = name;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn apply(&self, x: f64) -> f64 {
        (self.forward)(x)
    }

    pub fn invert(&self, y: f64) -> f64 {
        (self.inverse)(y)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        (self.derivative)(x)
    }

    /// Image of the support of `dist`, ordered.
    pub fn image(&self, dist: &dyn Univariate) -> (f64, f64) {
        let (lo, hi) = dist.support();
        let (a, b) = (self.apply(lo), self.apply(hi));
        match self.direction {
            Direction::Increasing => (a, b),
            Direction::Decreasing => (b, a),
        }
    }

    /// Check that Φ maps the support of `dist` into [0, ∞) and that Φ' has
    /// the declared sign at interior probe points.
    pub fn validate(&self, dist: &dyn Univariate) -> Result<()> {
        let (lo, hi) = self.image(dist);
        if !(lo >= 0.0) || hi.is_nan() {
            return Err(Error::InvalidTransform(format!(
                "{} maps the support onto ({lo}, {hi}), which is not inside [0, ∞)",
                self.name
            )));
        }
        for i in 1..20 {
            let x = dist.quantile(i as f64 / 20.0);
            let d = self.derivative(x);
            let ok = match self.direction {
                Direction::Increasing => d > 0.0,
                Direction::Decreasing => d < 0.0,
            };
            if d == 0.0 {
                return Err(Error::TransformDegenerate { x });
            }
            if !ok {
                return Err(Error::InvalidTransform(format!(
                    "{}: derivative {d} at x = {x} contradicts the declared direction",
                    self.name
                )));
            }
            let y = self.apply(x);
            let back = self.apply(self.invert(y));
            if !((back - y).abs() <= ROUND_TRIP_TOL * y.abs().max(1.0)) {
                return Err(Error::InvalidTransform(format!(
                    "{}: Φ(Φ⁻¹({y})) = {back}; the inverse is inconsistent",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

/// The distribution of Φ(X).
#[derive(Debug, Clone)]
pub struct Pushforward {
    base: UnivariateDistribution,
    transform: MonotoneTransform,
}

impl Pushforward {
    pub fn new(base: UnivariateDistribution, transform: MonotoneTransform) -> Result<Self> {
        transform.validate(base.as_ref())?;
        Ok(Pushforward { base, transform })
    }
}

impl Univariate for Pushforward {
    fn name(&self) -> String {
        format!("{}({})", self.transform.name, self.base.name())
    }

    fn support(&self) -> (f64, f64) {
        self.transform.image(self.base.as_ref())
    }

    fn pdf(&self, y: f64) -> f64 {
        let (lo, hi) = self.support();
        if y < lo || y > hi {
            return 0.0;
        }
        let x = self.transform.invert(y);
        let d = self.transform.derivative(x).abs();
        let f = self.base.pdf(x);
        if f == 0.0 {
            0.0
        } else {
            f / d
        }
    }

    fn cdf(&self, y: f64) -> f64 {
        let (lo, hi) = self.support();
        if y <= lo {
            return 0.0;
        }
        if y >= hi {
            return 1.0;
        }
        let x = self.transform.invert(y);
        match self.transform.direction {
            Direction::Increasing => self.base.cdf(x),
            Direction::Decreasing => self.base.sf(x),
        }
    }

    fn sf(&self, y: f64) -> f64 {
        let (lo, hi) = self.support();
        if y <= lo {
            return 1.0;
        }
        if y >= hi {
            return 0.0;
        }
        let x = self.transform.invert(y);
        match self.transform.direction {
            Direction::Increasing => self.base.sf(x),
            Direction::Decreasing => self.base.cdf(x),
        }
    }

    fn quantile(&self, p: f64) -> f64 {
        match self.transform.direction {
            Direction::Increasing => self.transform.apply(self.base.quantile(p)),
            Direction::Decreasing => self.transform.apply(self.base.quantile(1.0 - p)),
        }
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        self.transform.apply(self.base.sample(rng))
    }

    fn singular_density(&self) -> Endpoints {
        let s = self.base.singular_density();
        // The pushforward density also blows up where Φ' vanishes at an
        // endpoint; flag both ends conservatively.
        let (lo, hi) = self.base.support();
        let flat = |x: f64| x.is_finite() && self.transform.derivative(x) == 0.0;
        let (a, b) = (s.lower || flat(lo), s.upper || flat(hi));
        match self.transform.direction {
            Direction::Increasing => Endpoints { lower: a, upper: b },
            Direction::Decreasing => Endpoints { lower: b, upper: a },
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.base
            .breakpoints()
            .into_iter()
            .map(|x| self.transform.apply(x))
            .collect()
    }
}

/// −½ ∫_a^b Φ(x)/|Φ'(x)| f_X²(x) dx over a sub-interval of the support,
/// divided by `mass²`.
fn transformed_integral(
    dist: &UnivariateDistribution,
    phi: &MonotoneTransform,
    a: f64,
    b: f64,
    mass: f64,
    opts: &MeasureOptions,
) -> Result<MeasureValue> {
    let (lo, hi) = dist.support();
    let degenerate = Cell::new(None);
    let integrand = |x: f64| {
        let f = dist.pdf(x) / mass;
        let f2 = f * f;
        if f2 == 0.0 {
            return 0.0;
        }
        let d = phi.derivative(x).abs();
        if d == 0.0 {
            if x > lo && x < hi {
                degenerate.set(Some(x));
            }
            return 0.0;
        }
        phi.apply(x) / d * f2
    };
    let s = dist.singular_density();
    let g = Integrand::new(integrand, a, b)
        .singular(Endpoints {
            lower: s.lower && a == lo,
            upper: s.upper && b == hi,
        })
        .breakpoints(dist.breakpoints());
    let r = quadrature::integrate(&g, opts.engine_tol());
    if let Some(x) = degenerate.get() {
        return Err(Error::TransformDegenerate { x });
    }
    Ok(MeasureValue::from_integral(r?, -0.5))
}

/// J^w(Φ(X)) evaluated in the x-domain.
pub fn transformed_weighted_extropy(
    dist: &UnivariateDistribution,
    phi: &MonotoneTransform,
    opts: &MeasureOptions,
) -> Result<MeasureValue> {
    phi.validate(dist.as_ref())?;
    let (lo, hi) = dist.support();
    transformed_integral(dist, phi, lo, hi, 1.0, opts)
}

/// J(aX + b) = J(X)/a and J^w(aX + b) = J^w(X) + (b/a) J(X).
pub fn linear_transform_extropy(
    dist: &UnivariateDistribution,
    a: f64,
    b: f64,
    opts: &MeasureOptions,
) -> Result<(MeasureValue, MeasureValue)> {
    MonotoneTransform::affine(a, b)?;
    let j = measure(dist, MeasureId::Extropy, None, opts)?;
    let jw = measure(dist, MeasureId::WeightedExtropy, None, opts)?;
    let method = if j.method == Method::ClosedForm && jw.method == Method::ClosedForm {
        Method::ClosedForm
    } else {
        Method::Quadrature
    };
    let extropy = MeasureValue {
        value: j.value / a,
        method,
        abs_error: j.abs_error / a,
        diverged: j.diverged,
    };
    let weighted = MeasureValue {
        value: jw.value + b / a * j.value,
        method,
        abs_error: jw.abs_error + b / a * j.abs_error,
        diverged: jw.diverged || (b > 0.0 && j.diverged),
    };
    Ok((extropy, weighted))
}

/// J^w(Y_t) and J^w(_tY) for Y = Φ(X), integrating in the x-domain between
/// Φ⁻¹(t) and the matching edge of the support.
pub fn transformed_residual_past(
    dist: &UnivariateDistribution,
    phi: &MonotoneTransform,
    t: f64,
    opts: &MeasureOptions,
) -> Result<(Result<MeasureValue>, Result<MeasureValue>)> {
    phi.validate(dist.as_ref())?;
    let s = phi.invert(t);
    let (lo, hi) = dist.support();
    if !(s >= lo && s <= hi) {
        return Err(Error::Domain(format!(
            "Φ⁻¹({t}) = {s} lies outside the support ({lo}, {hi})"
        )));
    }
    let upper_part = || {
        let mass = dist.sf(s);
        if !(mass >= BOUNDARY_MASS) || !(s < hi) {
            return Err(Error::Domain(format!("F̄(Φ⁻¹(t)) = {mass:e} at t = {t}")));
        }
        transformed_integral(dist, phi, s, hi, mass, opts)
    };
    let lower_part = || {
        let mass = dist.cdf(s);
        if !(mass >= BOUNDARY_MASS) || !(lo < s) {
            return Err(Error::Domain(format!("F(Φ⁻¹(t)) = {mass:e} at t = {t}")));
        }
        transformed_integral(dist, phi, lo, s, mass, opts)
    };
    Ok(match phi.direction {
        Direction::Increasing => (upper_part(), lower_part()),
        Direction::Decreasing => (lower_part(), upper_part()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::Exponential;

    #[test]
    fn parse_vocabulary() {
        let d: UnivariateDistribution = Arc::new(Exponential::new(1.0).unwrap());
        assert_eq!(MonotoneTransform::parse("scale:2", &d).unwrap().apply(3.0), 6.0);
        assert_eq!(MonotoneTransform::parse("affine:2,3", &d).unwrap().apply(1.0), 5.0);
        assert_eq!(MonotoneTransform::parse("square", &d).unwrap().apply(3.0), 9.0);
        assert!((MonotoneTransform::parse("pit", &d).unwrap().apply(1.0) - (1.0 - (-1f64).exp())).abs() < 1e-15);
        assert!(MonotoneTransform::parse("log", &d).is_err());
        assert!(MonotoneTransform::parse("scale:-1", &d).is_err());
        assert!(MonotoneTransform::parse("affine:1", &d).is_err());
    }

    #[test]
    fn rejects_negative_images() {
        let d: UnivariateDistribution = Arc::new(Exponential::new(1.0).unwrap());
        let neg = MonotoneTransform::new("neg", Direction::Decreasing, |x| -x, |y| -y, |_| -1.0);
        assert!(matches!(
            transformed_weighted_extropy(&d, &neg, &MeasureOptions::default()),
            Err(Error::InvalidTransform(_))
        ));
    }

    #[test]
    fn flat_derivative_is_degenerate() {
        let d: UnivariateDistribution = Arc::new(Exponential::new(1.0).unwrap());
        // increasing, but with Φ'(1) = 0
        let cubic = MonotoneTransform::new(
            "cubic",
            Direction::Increasing,
            |x| (x - 1.0).powi(3) + 1.0,
            |y| (y - 1.0).cbrt() + 1.0,
            |x| 3.0 * (x - 1.0).powi(2),
        );
        let r = transformed_weighted_extropy(&d, &cubic, &MeasureOptions::default());
        assert!(matches!(r, Err(Error::TransformDegenerate { .. })), "{r:?}");
    }
}
