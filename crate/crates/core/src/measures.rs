//! Univariate extropy measures and their conditional (residual and past)
//! versions.
//!
//! Each conditional measure is the corresponding unconditional measure of a
//! [`ConditionalLifetime`], so residual and past variants share one
//! quadrature path with the plain ones.

use std::fmt;
use std::str::FromStr;

use crate::distributions::{Univariate, UnivariateDistribution};
use crate::error::{Error, Result};
use crate::quadrature::{self, Endpoints, Integrand, QuadratureResult};
use crate::report::{ClaimReport, Verdict};

/// Default tolerance exposed at measure level.
pub const MEASURE_TOL: f64 = 1e-8;

/// Ratio between the measure-level tolerance and the tolerance handed to the
/// quadrature engine.
pub const ENGINE_TOL_RATIO: f64 = 100.0;

/// Conditional measures refuse times where the conditioning mass is below
/// this.
pub const BOUNDARY_MASS: f64 = 1e-12;

/// Relative tolerance of the decomposition identity.
pub const DECOMPOSITION_TOL: f64 = 1e-7;

/// Number of points in the default curve grid.
pub const DEFAULT_GRID_POINTS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MeasureId {
    Extropy,
    WeightedExtropy,
    ResidualExtropy,
    PastExtropy,
    WeightedResidualExtropy,
    WeightedPastExtropy,
    DynamicSurvivalExtropy,
}

impl MeasureId {
    pub const ALL: [MeasureId; 7] = [
        MeasureId::Extropy,
        MeasureId::WeightedExtropy,
        MeasureId::ResidualExtropy,
        MeasureId::PastExtropy,
        MeasureId::WeightedResidualExtropy,
        MeasureId::WeightedPastExtropy,
        MeasureId::DynamicSurvivalExtropy,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            MeasureId::Extropy => "extropy",
            MeasureId::WeightedExtropy => "weighted_extropy",
            MeasureId::ResidualExtropy => "residual_extropy",
            MeasureId::PastExtropy => "past_extropy",
            MeasureId::WeightedResidualExtropy => "weighted_residual_extropy",
            MeasureId::WeightedPastExtropy => "weighted_past_extropy",
            MeasureId::DynamicSurvivalExtropy => "dynamic_survival_extropy",
        }
    }

    /// Whether the measure takes a time argument.
    pub fn is_time_indexed(&self) -> bool {
        !matches!(self, MeasureId::Extropy | MeasureId::WeightedExtropy)
    }

    fn conditioning(&self) -> Option<Mode> {
        match self {
            MeasureId::Extropy | MeasureId::WeightedExtropy => None,
            MeasureId::ResidualExtropy
            | MeasureId::WeightedResidualExtropy
            | MeasureId::DynamicSurvivalExtropy => Some(Mode::Residual),
            MeasureId::PastExtropy | MeasureId::WeightedPastExtropy => Some(Mode::Past),
        }
    }

    fn kernel(&self) -> Kernel {
        match self {
            MeasureId::Extropy | MeasureId::ResidualExtropy | MeasureId::PastExtropy => Kernel::Density,
            MeasureId::WeightedExtropy
            | MeasureId::WeightedResidualExtropy
            | MeasureId::WeightedPastExtropy => Kernel::WeightedDensity,
            MeasureId::DynamicSurvivalExtropy => Kernel::Survival,
        }
    }
}

impl fmt::Display for MeasureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MeasureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MeasureId::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| {
                let valid: Vec<&str> = MeasureId::ALL.iter().map(|m| m.as_str()).collect();
                Error::Spec(format!("unknown measure '{s}'; valid measures: {}", valid.join(", ")))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Quadrature,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
        }
    }
}

/// A measure value on the extended real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureValue {
    pub value: f64,
    pub method: Method,
    pub abs_error: f64,
    pub diverged: bool,
}

impl MeasureValue {
    pub fn closed_form(value: f64) -> Self {
        MeasureValue {
            value,
            method: Method::ClosedForm,
            abs_error: 0.0,
            diverged: value.is_infinite(),
        }
    }

    /// `scale * integral`, carrying over error and divergence.
    pub(crate) fn from_integral(r: QuadratureResult, scale: f64) -> Self {
        if r.diverged {
            MeasureValue {
                value: scale.signum() * r.value,
                method: Method::Quadrature,
                abs_error: f64::INFINITY,
                diverged: true,
            }
        } else {
            MeasureValue {
                value: scale * r.value,
                method: Method::Quadrature,
                abs_error: scale.abs() * r.abs_error_estimate,
                diverged: false,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MethodChoice {
    /// Closed form when the catalog has one, quadrature otherwise.
    #[default]
    Auto,
    Quadrature,
    ClosedForm,
}

impl FromStr for MethodChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(MethodChoice::Auto),
            "quadrature" => Ok(MethodChoice::Quadrature),
            "closed_form" => Ok(MethodChoice::ClosedForm),
            _ => Err(Error::Spec(format!(
                "unknown method '{s}'; valid methods: auto, quadrature, closed_form"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureOptions {
    pub tol: f64,
    pub method: MethodChoice,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        MeasureOptions {
            tol: MEASURE_TOL,
            method: MethodChoice::Auto,
        }
    }
}

impl MeasureOptions {
    pub fn quadrature() -> Self {
        MeasureOptions {
            method: MethodChoice::Quadrature,
            ..Default::default()
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn engine_tol(&self) -> f64 {
        self.tol / ENGINE_TOL_RATIO
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Residual,
    Past,
}

/// The lifetime conditioned on survival past `t` (residual) or on failure by
/// `t` (past): density `f / F̄(t)` on `(t, ∞)` or `f / F(t)` on `(0, t]`.
#[derive(Debug, Clone)]
pub struct ConditionalLifetime {
    base: UnivariateDistribution,
    mode: Mode,
    t: f64,
    lower: f64,
    upper: f64,
    mass: f64,
}

impl ConditionalLifetime {
    pub fn new(base: UnivariateDistribution, mode: Mode, t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::Domain(format!("time must be finite (got {t})")));
        }
        let (lo, hi) = base.support();
        if t < lo || t > hi {
            return Err(Error::Domain(format!("t = {t} lies outside the support [{lo}, {hi}]")));
        }
        let (lower, upper, mass) = match mode {
            Mode::Residual => (t.max(lo), hi, base.sf(t)),
            Mode::Past => (lo, t.min(hi), base.cdf(t)),
        };
        if !(mass >= BOUNDARY_MASS) || !(lower < upper) {
            let which = match mode {
                Mode::Residual => "survival F̄(t)",
                Mode::Past => "cdf F(t)",
            };
            return Err(Error::Domain(format!(
                "{which} = {mass:e} at t = {t} is below {BOUNDARY_MASS:e}; the conditional lifetime is undefined"
            )));
        }
        Ok(ConditionalLifetime {
            base,
            mode,
            t,
            lower,
            upper,
            mass,
        })
    }

    pub fn residual(base: UnivariateDistribution, t: f64) -> Result<Self> {
        Self::new(base, Mode::Residual, t)
    }

    pub fn past(base: UnivariateDistribution, t: f64) -> Result<Self> {
        Self::new(base, Mode::Past, t)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// F̄(t) in residual mode, F(t) in past mode.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn base(&self) -> &UnivariateDistribution {
        &self.base
    }
}

impl Univariate for ConditionalLifetime {
    fn name(&self) -> String {
        let mode = match self.mode {
            Mode::Residual => "residual",
            Mode::Past => "past",
        };
        format!("{mode}[{}, t={}]", self.base.name(), self.t)
    }

    fn support(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    fn pdf(&self, x: f64) -> f64 {
        if x < self.lower || x > self.upper {
            0.0
        } else {
            self.base.pdf(x) / self.mass
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= self.lower {
            0.0
        } else if x >= self.upper {
            1.0
        } else {
            match self.mode {
                Mode::Residual => 1.0 - self.base.sf(x) / self.mass,
                Mode::Past => self.base.cdf(x) / self.mass,
            }
        }
    }

    fn sf(&self, x: f64) -> f64 {
        if x <= self.lower {
            1.0
        } else if x >= self.upper {
            0.0
        } else {
            match self.mode {
                Mode::Residual => self.base.sf(x) / self.mass,
                Mode::Past => 1.0 - self.base.cdf(x) / self.mass,
            }
        }
    }

    fn singular_density(&self) -> Endpoints {
        let (lo, hi) = self.base.support();
        let s = self.base.singular_density();
        Endpoints {
            lower: s.lower && self.lower == lo,
            upper: s.upper && self.upper == hi,
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.base
            .breakpoints()
            .into_iter()
            .filter(|b| *b > self.lower && *b < self.upper)
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
enum Kernel {
    /// f²
    Density,
    /// x f²
    WeightedDensity,
    /// F̄²
    Survival,
}

/// Probabilities whose quantiles are handed to the integrator as split
/// points, so that wide intervals are sampled where the mass is.
const SCALE_HINTS: [f64; 13] = [
    1e-9,
    1e-6,
    1e-3,
    0.01,
    0.1,
    0.25,
    0.5,
    0.75,
    0.9,
    0.99,
    1.0 - 1e-3,
    1.0 - 1e-6,
    1.0 - 1e-9,
];

/// `∫ kernel` over the support of `d`; `scale` supplies quantiles of the
/// distribution `d` is derived from.
fn kernel_integral(d: &dyn Univariate, scale: &dyn Univariate, kernel: Kernel, tol: f64) -> Result<QuadratureResult> {
    let (lo, hi) = d.support();
    let singular = match kernel {
        Kernel::Survival => Endpoints::NONE,
        _ => d.singular_density(),
    };
    let mut breakpoints = d.breakpoints();
    breakpoints.extend(
        SCALE_HINTS
            .iter()
            .map(|p| scale.quantile(*p))
            .filter(|x| *x > lo && *x < hi),
    );
    breakpoints.sort_by(f64::total_cmp);
    breakpoints.dedup();
    let result = match kernel {
        Kernel::Density => {
            let g = Integrand::new(|x: f64| d.pdf(x).powi(2), lo, hi)
                .singular(singular)
                .breakpoints(breakpoints);
            quadrature::integrate(&g, tol)
        }
        Kernel::WeightedDensity => {
            let g = Integrand::new(|x: f64| x * d.pdf(x).powi(2), lo, hi)
                .singular(singular)
                .breakpoints(breakpoints);
            quadrature::integrate(&g, tol)
        }
        Kernel::Survival => {
            let g = Integrand::new(|x: f64| d.sf(x).powi(2), lo, hi).breakpoints(breakpoints);
            quadrature::integrate(&g, tol)
        }
    };
    Ok(result?)
}

/// −½ ∫ kernel over the support of `d`, by quadrature.
fn quadrature_measure(
    d: &dyn Univariate,
    scale: &dyn Univariate,
    kernel: Kernel,
    opts: &MeasureOptions,
) -> Result<MeasureValue> {
    let r = kernel_integral(d, scale, kernel, opts.engine_tol())?;
    Ok(MeasureValue::from_integral(r, -0.5))
}

/// Evaluate any measure. `t` is required for the time-indexed measures and
/// ignored otherwise.
pub fn measure(
    dist: &UnivariateDistribution,
    id: MeasureId,
    t: Option<f64>,
    opts: &MeasureOptions,
) -> Result<MeasureValue> {
    let conditioning = match id.conditioning() {
        None => None,
        Some(mode) => {
            let t = t.ok_or_else(|| Error::Spec(format!("measure '{id}' requires a time t")))?;
            Some(ConditionalLifetime::new(dist.clone(), mode, t)?)
        }
    };
    let t = if id.is_time_indexed() { t } else { None };

    if opts.method != MethodChoice::Quadrature {
        if let Some(v) = dist.closed_form(id, t) {
            return Ok(MeasureValue::closed_form(v));
        }
        if opts.method == MethodChoice::ClosedForm {
            return Err(Error::Spec(format!(
                "no closed form for '{id}' of {}",
                dist.name()
            )));
        }
    }
    match &conditioning {
        Some(c) => quadrature_measure(c, dist.as_ref(), id.kernel(), opts),
        None => quadrature_measure(dist.as_ref(), dist.as_ref(), id.kernel(), opts),
    }
}

/// J(X) = −½ ∫ f².
pub fn extropy(dist: &UnivariateDistribution) -> Result<MeasureValue> {
    measure(dist, MeasureId::Extropy, None, &MeasureOptions::default())
}

/// J^w(X) = −½ ∫ x f².
pub fn weighted_extropy(dist: &UnivariateDistribution) -> Result<MeasureValue> {
    measure(dist, MeasureId::WeightedExtropy, None, &MeasureOptions::default())
}

/// J(X_t) = −(1 / 2F̄²(t)) ∫_t^∞ f².
pub fn residual_extropy(dist: &UnivariateDistribution, t: f64) -> Result<MeasureValue> {
    measure(dist, MeasureId::ResidualExtropy, Some(t), &MeasureOptions::default())
}

/// J(_tX) = −(1 / 2F²(t)) ∫_0^t f².
pub fn past_extropy(dist: &UnivariateDistribution, t: f64) -> Result<MeasureValue> {
    measure(dist, MeasureId::PastExtropy, Some(t), &MeasureOptions::default())
}

/// J^w(X_t) = −(1 / 2F̄²(t)) ∫_t^∞ x f².
pub fn weighted_residual_extropy(dist: &UnivariateDistribution, t: f64) -> Result<MeasureValue> {
    measure(dist, MeasureId::WeightedResidualExtropy, Some(t), &MeasureOptions::default())
}

/// J^w(_tX) = −(1 / 2F²(t)) ∫_0^t x f².
pub fn weighted_past_extropy(dist: &UnivariateDistribution, t: f64) -> Result<MeasureValue> {
    measure(dist, MeasureId::WeightedPastExtropy, Some(t), &MeasureOptions::default())
}

/// J_s(X_t) = −(1 / 2F̄²(t)) ∫_t^∞ F̄².
pub fn dynamic_survival_extropy(dist: &UnivariateDistribution, t: f64) -> Result<MeasureValue> {
    measure(dist, MeasureId::DynamicSurvivalExtropy, Some(t), &MeasureOptions::default())
}

/// Evaluate a time-indexed measure on a grid; failures are kept per point.
pub fn curve(
    dist: &UnivariateDistribution,
    id: MeasureId,
    grid: &[f64],
    opts: &MeasureOptions,
) -> Vec<Result<MeasureValue>> {
    grid.iter().map(|&t| measure(dist, id, Some(t), opts)).collect()
}

/// Geometric grid between the 1% and 99% quantiles (linear when the lower
/// quantile is zero).
pub fn default_grid(dist: &dyn Univariate) -> Vec<f64> {
    let lo = dist.quantile(0.01);
    let hi = dist.quantile(0.99);
    let n = DEFAULT_GRID_POINTS;
    (0..n)
        .map(|i| {
            let s = i as f64 / (n - 1) as f64;
            if lo > 0.0 {
                lo * (hi / lo).powf(s)
            } else {
                lo + s * (hi - lo)
            }
        })
        .collect()
}

/// Which form of the derivative identity for the weighted residual and past
/// extropies to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeIdentity {
    /// dJ^w(X_t)/dt = (r/2)[J^w(X_t) + t r], dJ^w(_tX)/dt = −(q/2)[J^w(_tX) + t q].
    Printed,
    /// dJ^w(X_t)/dt = 2 r J^w(X_t) + t r²/2, dJ^w(_tX)/dt = −2 q J^w(_tX) − t q²/2.
    Corrected,
}

/// The identity that agrees with finite differences of the quadrature
/// measures; downstream inversion relies on it.
pub const VALIDATED_IDENTITY: DerivativeIdentity = DerivativeIdentity::Corrected;

impl DerivativeIdentity {
    /// Right-hand side for the residual derivative given r(t) and J^w(X_t).
    pub fn residual(&self, t: f64, r: f64, jw: f64) -> f64 {
        match self {
            DerivativeIdentity::Printed => 0.5 * r * (jw + t * r),
            DerivativeIdentity::Corrected => 2.0 * r * jw + 0.5 * t * r * r,
        }
    }

    /// Right-hand side for the past derivative given q(t) and J^w(_tX).
    pub fn past(&self, t: f64, q: f64, jw: f64) -> f64 {
        match self {
            DerivativeIdentity::Printed => -0.5 * q * (jw + t * q),
            DerivativeIdentity::Corrected => -2.0 * q * jw - 0.5 * t * q * q,
        }
    }
}

/// Finite-difference derivative of a weighted conditional extropy next to
/// both candidate closed expressions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeCheck {
    pub t: f64,
    /// J^w(X_t) or J^w(_tX) at t.
    pub value: f64,
    /// r(t) or q(t).
    pub rate: f64,
    pub numeric: f64,
    pub numeric_error: f64,
    pub paper_formula: f64,
    pub corrected_formula: f64,
}

impl DerivativeCheck {
    pub fn formula(&self, identity: DerivativeIdentity) -> f64 {
        match identity {
            DerivativeIdentity::Printed => self.paper_formula,
            DerivativeIdentity::Corrected => self.corrected_formula,
        }
    }
}

/// Largest half-width of a stencil around `t` that stays inside the support
/// and clear of density breakpoints.
fn stencil_scale(dist: &dyn Univariate, t: f64) -> Result<f64> {
    let (lo, hi) = dist.support();
    let mut room = (t - lo).min(hi - t);
    for b in dist.breakpoints() {
        room = room.min((t - b).abs());
    }
    if !(room > 0.0) {
        return Err(Error::Stencil {
            x: t,
            reason: "t must lie strictly inside the support and off density breakpoints".into(),
        });
    }
    Ok(0.5 * room.min(t.abs().max(0.1)))
}

fn derivative_check(dist: &UnivariateDistribution, t: f64, id: MeasureId, opts: &MeasureOptions) -> Result<DerivativeCheck> {
    let mut opts = *opts;
    if opts.method == MethodChoice::Auto {
        opts.method = MethodChoice::Quadrature;
    }
    let value = measure(dist, id, Some(t), &opts)?.value;
    let scale = stencil_scale(dist.as_ref(), t)?;
    let d = quadrature::differentiate(
        |s| -> Result<f64> {
            let v = measure(dist, id, Some(s), &opts)?;
            if v.diverged {
                Err(Error::Stencil {
                    x: s,
                    reason: "measure diverged inside the stencil".into(),
                })
            } else {
                Ok(v.value)
            }
        },
        t,
        scale,
    )
    .map_err(|e| match e {
        Error::Quadrature(quadrature::QuadError::Stencil { x }) => Error::Stencil {
            x,
            reason: "non-finite measure value inside the stencil".into(),
        },
        other => other,
    })?;
    let (rate, printed, corrected) = if id == MeasureId::WeightedResidualExtropy {
        let r = dist.hazard(t);
        (
            r,
            DerivativeIdentity::Printed.residual(t, r, value),
            DerivativeIdentity::Corrected.residual(t, r, value),
        )
    } else {
        let q = dist.reversed_hazard(t);
        (
            q,
            DerivativeIdentity::Printed.past(t, q, value),
            DerivativeIdentity::Corrected.past(t, q, value),
        )
    };
    Ok(DerivativeCheck {
        t,
        value,
        rate,
        numeric: d.value,
        numeric_error: d.error,
        paper_formula: printed,
        corrected_formula: corrected,
    })
}

/// d/dt J^w(X_t) by finite differences, with the printed and corrected
/// closed expressions. Quadrature is used unless `opts` asks for closed
/// forms explicitly.
pub fn weighted_residual_derivative(
    dist: &UnivariateDistribution,
    t: f64,
    opts: &MeasureOptions,
) -> Result<DerivativeCheck> {
    derivative_check(dist, t, MeasureId::WeightedResidualExtropy, opts)
}

/// d/dt J^w(_tX); see [`weighted_residual_derivative`].
pub fn weighted_past_derivative(
    dist: &UnivariateDistribution,
    t: f64,
    opts: &MeasureOptions,
) -> Result<DerivativeCheck> {
    derivative_check(dist, t, MeasureId::WeightedPastExtropy, opts)
}

/// J^w(X) against F²(t) J^w(_tX) + F̄²(t) J^w(X_t), all by quadrature.
pub fn decomposition_check(dist: &UnivariateDistribution, t: f64, opts: &MeasureOptions) -> Result<ClaimReport> {
    const ID: &str = "decomposition";
    let f = dist.cdf(t);
    let s = dist.sf(t);
    if !(f >= BOUNDARY_MASS && s >= BOUNDARY_MASS) {
        return Err(Error::Domain(format!(
            "decomposition needs 0 < F(t) < 1; F({t}) = {f:e}"
        )));
    }
    let opts = MeasureOptions {
        method: MethodChoice::Quadrature,
        ..*opts
    };
    let whole = measure(dist, MeasureId::WeightedExtropy, None, &opts)?;
    let past = measure(dist, MeasureId::WeightedPastExtropy, Some(t), &opts)?;
    let residual = measure(dist, MeasureId::WeightedResidualExtropy, Some(t), &opts)?;
    let rhs = f * f * past.value + s * s * residual.value;
    let report = ClaimReport::equality(ID, whole.value, rhs, DECOMPOSITION_TOL * whole.value.abs().max(1.0))
        .with_detail("t", t)
        .with_detail("weighted_past", past.value)
        .with_detail("weighted_residual", residual.value);
    if whole.diverged || past.diverged || residual.diverged {
        Ok(report.make_indeterminate("a piece diverged"))
    } else {
        debug_assert!(report.verdict != Verdict::Indeterminate);
        Ok(report)
    }
}
