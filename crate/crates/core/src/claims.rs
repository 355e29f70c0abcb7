//! Numerical checks of the bounds, characterizations and derivative
//! identities for the weighted residual and past extropies, plus hazard
//! inversion and reconstruction.
//!
//! Every check evaluates both sides by quadrature and reports a verdict;
//! nothing here assumes a claim is true.

use std::cell::RefCell;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::distributions::{Univariate, UnivariateDistribution};
use crate::error::{Error, Result};
use crate::measures::{
    self, measure, MeasureId, MeasureOptions, MethodChoice, BOUNDARY_MASS, VALIDATED_IDENTITY,
};
use crate::quadrature::{self, Endpoints, Integrand};
use crate::report::{ClaimReport, Verdict};

/// Grid size for the monotone-hazard preconditions.
pub const MONOTONE_GRID_POINTS: usize = 50;
/// Slack for lhs <= rhs in the residual and past bounds.
pub const BOUND_TOL: f64 = 1e-8;
/// Slack for the sum bound, matching the nested quadrature budget.
pub const SUM_BOUND_TOL: f64 = 1e-6;
pub const CONVOLUTION_INNER_TOL: f64 = 1e-9;
pub const CONVOLUTION_OUTER_TOL: f64 = 1e-7;
/// Agreement required between a finite-difference derivative and a closed
/// derivative expression.
pub const DERIVATIVE_TOL: f64 = 1e-5;
/// Allowed disagreement between supplied and recomputed curve derivatives
/// before a warning is attached.
pub const DERIVATIVE_CONSISTENCY_TOL: f64 = 1e-4;
/// Allowed spread of J^w(X_t) over a grid for it to count as constant.
pub const CONSTANCY_TOL: f64 = 1e-6;

/// Claim identifiers accepted by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClaimId {
    Decomposition,
    ResidualBound,
    PastBound,
    SumBound,
    IndependenceFactorization,
    Lemma1Residual,
    Lemma1Past,
    Constancy,
    Inversion,
}

impl ClaimId {
    pub const ALL: [ClaimId; 9] = [
        ClaimId::Decomposition,
        ClaimId::ResidualBound,
        ClaimId::PastBound,
        ClaimId::SumBound,
        ClaimId::IndependenceFactorization,
        ClaimId::Lemma1Residual,
        ClaimId::Lemma1Past,
        ClaimId::Constancy,
        ClaimId::Inversion,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ClaimId::Decomposition => "decomposition",
            ClaimId::ResidualBound => "residual_bound",
            ClaimId::PastBound => "past_bound",
            ClaimId::SumBound => "sum_bound",
            ClaimId::IndependenceFactorization => "independence_factorization",
            ClaimId::Lemma1Residual => "lemma1_residual",
            ClaimId::Lemma1Past => "lemma1_past",
            ClaimId::Constancy => "constancy",
            ClaimId::Inversion => "inversion",
        }
    }

    /// Claims about a pair of independent variables.
    pub fn needs_pair(&self) -> bool {
        matches!(self, ClaimId::SumBound | ClaimId::IndependenceFactorization)
    }
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClaimId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClaimId::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| {
                let valid: Vec<_> = ClaimId::ALL.iter().map(|c| c.as_str()).collect();
                Error::Spec(format!("unknown claim '{s}'; valid claims: {}", valid.join(", ")))
            })
    }
}

fn quadrature_opts(opts: &MeasureOptions) -> MeasureOptions {
    MeasureOptions {
        method: MethodChoice::Quadrature,
        ..*opts
    }
}

/// Whether `rate` is non-decreasing on `MONOTONE_GRID_POINTS` points of
/// [a, b] (or of the open interval when `open` is set).
fn non_decreasing_on(rate: impl Fn(f64) -> f64, a: f64, b: f64, open: bool) -> bool {
    let n = MONOTONE_GRID_POINTS;
    let points: Vec<f64> = if open {
        (1..=n).map(|i| a + (b - a) * i as f64 / (n + 1) as f64).collect()
    } else {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    };
    let values: Vec<f64> = points.iter().map(|&x| rate(x)).collect();
    values.iter().all(|v| v.is_finite())
        && values
            .windows(2)
            .all(|w| w[1] >= w[0] - 1e-12 * w[0].abs().max(1.0))
}

/// J^w(X_t) <= t r²(t) J_s(X_t) for a non-decreasing hazard r.
///
/// The gap is the slack `rhs - lhs`. When the hazard is not verified
/// non-decreasing on [t, F⁻¹(0.999)] both sides are still reported but the
/// verdict is indeterminate.
pub fn residual_bound_check(dist: &UnivariateDistribution, t: f64, opts: &MeasureOptions) -> Result<ClaimReport> {
    const ID: &str = "residual_bound";
    let opts = quadrature_opts(opts);
    let lhs = measure(dist, MeasureId::WeightedResidualExtropy, Some(t), &opts)?;
    let js = measure(dist, MeasureId::DynamicSurvivalExtropy, Some(t), &opts)?;
    let r = dist.hazard(t);
    let rhs = t * r * r * js.value;
    let mut report = ClaimReport::at_most(ID, lhs.value, rhs, BOUND_TOL)
        .with_detail("t", t)
        .with_detail("hazard", r)
        .with_detail("survival_extropy", js.value);
    if lhs.diverged || js.diverged {
        report = report.make_indeterminate("a side diverged");
    }
    let end = dist.quantile(0.999).max(t);
    if !non_decreasing_on(|x| dist.hazard(x), t, end, false) {
        report = report.make_indeterminate("precondition unverified: hazard not non-decreasing on [t, F⁻¹(0.999)]");
    }
    Ok(report)
}

/// The two candidate lower bounds for J^w(_tX): the printed −t q²/2 and the
/// value −t² q²/4 of the integral it is derived from.
pub fn past_bound_expressions(t: f64, q: f64) -> (f64, f64) {
    (-0.5 * t * q * q, -0.25 * t * t * q * q)
}

/// Outcome of [`past_bound_check`]: one report per candidate bound.
#[derive(Debug, Clone, PartialEq)]
pub struct PastBoundCheck {
    pub printed: ClaimReport,
    pub rederived: ClaimReport,
    /// Re-derived minus printed bound, t q²(2 − t)/4.
    pub expression_gap: f64,
}

impl PastBoundCheck {
    pub fn reports(&self) -> [&ClaimReport; 2] {
        [&self.printed, &self.rederived]
    }
}

/// J^w(_tX) >= bound for a non-decreasing reversed hazard q, against both
/// candidate bounds. `horizon` is the T of the precondition: q is checked
/// on 50 interior points of (lower support end, T).
pub fn past_bound_check(
    dist: &UnivariateDistribution,
    t: f64,
    horizon: f64,
    opts: &MeasureOptions,
) -> Result<PastBoundCheck> {
    const ID: &str = "past_bound";
    if !(horizon > t) {
        return Err(Error::Domain(format!("past bound needs T > t (got T = {horizon}, t = {t})")));
    }
    let opts = quadrature_opts(opts);
    let lhs = measure(dist, MeasureId::WeightedPastExtropy, Some(t), &opts)?;
    let q = dist.reversed_hazard(t);
    let (printed, rederived) = past_bound_expressions(t, q);
    let (lo, hi) = dist.support();
    let monotone = non_decreasing_on(|x| dist.reversed_hazard(x), lo.max(0.0), horizon.min(hi), true);
    let finish = |report: ClaimReport, note: &str| {
        let mut report = report
            .with_detail("t", t)
            .with_detail("reversed_hazard", q)
            .with_note(note);
        if lhs.diverged {
            report = report.make_indeterminate("J^w(_tX) diverged");
        }
        if !monotone {
            report = report.make_indeterminate("precondition unverified: reversed hazard not non-decreasing on (0, T)");
        }
        report
    };
    Ok(PastBoundCheck {
        printed: finish(ClaimReport::at_least(ID, lhs.value, printed, BOUND_TOL), "printed bound -t q^2/2"),
        rederived: finish(
            ClaimReport::at_least(ID, lhs.value, rederived, BOUND_TOL),
            "re-derived bound -t^2 q^2/4",
        ),
        expression_gap: rederived - printed,
    })
}

/// Density of X + Y for independent non-negative X, Y at z.
fn convolution_density(x: &dyn Univariate, y: &dyn Univariate, z: f64, tol: f64) -> Result<f64> {
    let (xl, xh) = x.support();
    let (yl, yh) = y.support();
    let a = xl.max(z - yh);
    let b = xh.min(z - yl);
    if !(a < b) {
        return Ok(0.0);
    }
    let (sx, sy) = (x.singular_density(), y.singular_density());
    let singular = Endpoints {
        lower: (a == xl && sx.lower) || (a == z - yh && sy.upper),
        upper: (b == xh && sx.upper) || (b == z - yl && sy.lower),
    };
    let breaks: Vec<f64> = x
        .breakpoints()
        .into_iter()
        .chain(y.breakpoints().into_iter().map(|p| z - p))
        .filter(|&p| p > a && p < b)
        .collect();
    let g = Integrand::new(|u: f64| x.pdf(u) * y.pdf(z - u), a, b)
        .singular(singular)
        .breakpoints(breaks);
    let r = quadrature::integrate(&g, tol)?;
    if r.diverged {
        return Ok(f64::INFINITY);
    }
    Ok(r.value)
}

/// J^w(X + Y) >= −2 (J(X) J^w(Y) + J^w(X) J(Y)) for independent X, Y.
///
/// The left side integrates z f_Z²(z) with f_Z itself obtained by an inner
/// convolution quadrature; the right side uses the one-dimensional measures.
pub fn sum_bound_check(
    x: &UnivariateDistribution,
    y: &UnivariateDistribution,
    opts: &MeasureOptions,
) -> Result<ClaimReport> {
    const ID: &str = "sum_bound";
    let jx = measure(x, MeasureId::Extropy, None, opts)?;
    let jwx = measure(x, MeasureId::WeightedExtropy, None, opts)?;
    let jy = measure(y, MeasureId::Extropy, None, opts)?;
    let jwy = measure(y, MeasureId::WeightedExtropy, None, opts)?;
    let rhs = -2.0 * (jx.value * jwy.value + jwx.value * jy.value);
    if [jx, jwx, jy, jwy].iter().any(|v| v.diverged) {
        return Ok(ClaimReport::new(ID, f64::NAN, rhs, f64::NAN, Verdict::Indeterminate)
            .with_note("a marginal measure diverged"));
    }

    let (xl, xh) = x.support();
    let (yl, yh) = y.support();
    let (zl, zh) = (xl + yl, xh + yh);
    let mut breaks = vec![xl + yh, xh + yl];
    for p in x.breakpoints() {
        breaks.extend([p + yl, p + yh]);
    }
    for p in y.breakpoints() {
        breaks.extend([p + xl, p + xh]);
    }
    breaks.retain(|p| p.is_finite() && *p > zl && *p < zh);

    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let integrand = |z: f64| {
        match convolution_density(x.as_ref(), y.as_ref(), z, CONVOLUTION_INNER_TOL) {
            Ok(f) => z * f * f,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let g = Integrand::new(integrand, zl, zh).breakpoints(breaks);
    let outer = quadrature::integrate(&g, CONVOLUTION_OUTER_TOL);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let outer = outer?;
    let lhs = -0.5 * outer.value;
    let report = ClaimReport::at_least(ID, lhs, rhs, SUM_BOUND_TOL)
        .with_detail("extropy_x", jx.value)
        .with_detail("weighted_extropy_x", jwx.value)
        .with_detail("extropy_y", jy.value)
        .with_detail("weighted_extropy_y", jwy.value);
    Ok(if outer.diverged {
        report.make_indeterminate("J^w(X + Y) diverged")
    } else {
        report
    })
}

fn lemma1(dist: &UnivariateDistribution, t: f64, opts: &MeasureOptions, past: bool) -> Result<ClaimReport> {
    let check = if past {
        measures::weighted_past_derivative(dist, t, opts)?
    } else {
        measures::weighted_residual_derivative(dist, t, opts)?
    };
    let id = if past { "lemma1_past" } else { "lemma1_residual" };
    // lhs is the printed closed expression, rhs the derivative it claims to equal.
    Ok(
        ClaimReport::equality(id, check.paper_formula, check.numeric, DERIVATIVE_TOL)
            .with_note("lhs: printed derivative formula; rhs: finite-difference derivative")
            .with_detail("t", t)
            .with_detail("rate", check.rate)
            .with_detail("value", check.value)
            .with_detail("numeric_error", check.numeric_error)
            .with_detail("corrected_formula", check.corrected_formula)
            .with_detail("corrected_gap", check.corrected_formula - check.numeric),
    )
}

/// The printed derivative formula for J^w(X_t) against finite differences.
pub fn lemma1_residual_check(dist: &UnivariateDistribution, t: f64, opts: &MeasureOptions) -> Result<ClaimReport> {
    lemma1(dist, t, opts, false)
}

/// The printed derivative formula for J^w(_tX) against finite differences.
pub fn lemma1_past_check(dist: &UnivariateDistribution, t: f64, opts: &MeasureOptions) -> Result<ClaimReport> {
    lemma1(dist, t, opts, true)
}

/// One entry of a J^w(X_t) curve; the derivative may be omitted and is then
/// recomputed from neighbouring values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub t: f64,
    pub value: f64,
    pub derivative: Option<f64>,
}

impl CurvePoint {
    pub fn new(t: f64, value: f64, derivative: Option<f64>) -> Self {
        CurvePoint { t, value, derivative }
    }
}

/// Which root of the inversion quadratic to report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RootChoice {
    /// The larger root at every t.
    Larger,
    /// Start from the root nearest `initial`, then follow the root nearest
    /// to the linear extrapolation of the previous two.
    Continuous { initial: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HazardPoint {
    pub t: f64,
    pub r: f64,
    /// The other root, when it is also non-negative.
    pub alternate_root: Option<f64>,
}

/// Hazard rate on an increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HazardCurve {
    points: Vec<HazardPoint>,
    pub warnings: Vec<String>,
}

impl HazardCurve {
    /// Build from (t, r) pairs; t strictly increasing, r finite and >= 0.
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        Self::from_points(
            points
                .iter()
                .map(|&(t, r)| HazardPoint {
                    t,
                    r,
                    alternate_root: None,
                })
                .collect(),
        )
    }

    fn from_points(points: Vec<HazardPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Spec("hazard curve needs at least one point".into()));
        }
        for p in &points {
            if !(p.r.is_finite() && p.r >= 0.0) || !p.t.is_finite() {
                return Err(Error::Spec(format!("hazard r({}) = {} must be finite and >= 0", p.t, p.r)));
            }
        }
        if points.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(Error::Spec("hazard grid must be strictly increasing in t".into()));
        }
        Ok(HazardCurve {
            points,
            warnings: Vec::new(),
        })
    }

    pub fn points(&self) -> &[HazardPoint] {
        &self.points
    }

    pub fn span(&self) -> (f64, f64) {
        (self.points[0].t, self.points[self.points.len() - 1].t)
    }

    /// Hazard at `t`, linear between grid points; `None` outside the span.
    pub fn rate(&self, t: f64) -> Option<f64> {
        let (a, b) = self.span();
        if !(t >= a && t <= b) {
            return None;
        }
        let i = self.points.partition_point(|p| p.t <= t);
        if i == self.points.len() {
            return Some(self.points[i - 1].r);
        }
        let (p, q) = (self.points[i - 1], self.points[i]);
        Some(p.r + (q.r - p.r) * (t - p.t) / (q.t - p.t))
    }
}

/// Three-point derivative at index `i` on a possibly non-uniform grid.
fn finite_difference(ts: &[f64], vs: &[f64], i: usize) -> Option<f64> {
    let n = ts.len();
    if n < 2 {
        return None;
    }
    if n == 2 {
        return Some((vs[1] - vs[0]) / (ts[1] - ts[0]));
    }
    // Differentiate the quadratic through three consecutive points at ts[i].
    let j = i.clamp(1, n - 2);
    let (x0, x1, x2) = (ts[j - 1], ts[j], ts[j + 1]);
    let (y0, y1, y2) = (vs[j - 1], vs[j], vs[j + 1]);
    let x = ts[i];
    let d0 = y0 * ((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2));
    let d1 = y1 * ((x - x0) + (x - x2)) / ((x1 - x0) * (x1 - x2));
    let d2 = y2 * ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1));
    Some(d0 + d1 + d2)
}

/// Roots of (t/2) x² + 2 J x − D = 0 in decreasing order.
fn inversion_roots(t: f64, jw: f64, d: f64) -> Result<(f64, f64)> {
    if !(t > 0.0) {
        return Err(Error::InversionInfeasible {
            t,
            reason: "t must be positive".into(),
        });
    }
    let mut disc = 4.0 * jw * jw + 2.0 * t * d;
    let scale = 4.0 * jw * jw + (2.0 * t * d).abs();
    if disc < 0.0 {
        if disc >= -1e-12 * scale {
            disc = 0.0;
        } else {
            return Err(Error::InversionInfeasible {
                t,
                reason: format!("negative discriminant {disc:e}"),
            });
        }
    }
    let s = disc.sqrt();
    Ok(((-2.0 * jw + s) / t, (-2.0 * jw - s) / t))
}

/// Recover r(t) from J^w(X_t) and its derivative through the validated
/// derivative identity dJ^w(X_t)/dt = 2 r J^w + t r²/2.
pub fn invert_weighted_residual(curve: &[CurvePoint], choice: RootChoice) -> Result<HazardCurve> {
    debug_assert_eq!(VALIDATED_IDENTITY, measures::DerivativeIdentity::Corrected);
    if curve.is_empty() {
        return Err(Error::Spec("empty curve".into()));
    }
    if curve.windows(2).any(|w| !(w[1].t > w[0].t)) {
        return Err(Error::Spec("curve must be strictly increasing in t".into()));
    }
    let ts: Vec<f64> = curve.iter().map(|p| p.t).collect();
    let vs: Vec<f64> = curve.iter().map(|p| p.value).collect();
    let mut warnings = Vec::new();
    let mut points: Vec<HazardPoint> = Vec::with_capacity(curve.len());
    for (i, p) in curve.iter().enumerate() {
        let fd = finite_difference(&ts, &vs, i);
        let d = match (p.derivative, fd) {
            (Some(d), Some(fd)) => {
                if (d - fd).abs() > DERIVATIVE_CONSISTENCY_TOL {
                    warnings.push(format!(
                        "t = {}: supplied derivative {d} differs from finite differences {fd}; using the supplied value",
                        p.t
                    ));
                }
                d
            }
            (Some(d), None) => d,
            (None, Some(fd)) => fd,
            (None, None) => {
                return Err(Error::InversionInfeasible {
                    t: p.t,
                    reason: "no derivative supplied and too few points for finite differences".into(),
                })
            }
        };
        let (big, small) = inversion_roots(p.t, p.value, d)?;
        if big < 0.0 {
            return Err(Error::InversionInfeasible {
                t: p.t,
                reason: format!("both roots negative ({big}, {small})"),
            });
        }
        let r = match choice {
            RootChoice::Larger => big,
            RootChoice::Continuous { initial } => {
                let target = match points.len() {
                    0 => initial,
                    1 => points[0].r,
                    n => {
                        let (a, b) = (points[n - 2], points[n - 1]);
                        b.r + (b.r - a.r) * (p.t - b.t) / (b.t - a.t)
                    }
                };
                if small >= 0.0 && (small - target).abs() < (big - target).abs() {
                    small
                } else {
                    big
                }
            }
        };
        let alternate = if small >= 0.0 && big != small {
            Some(if r == big { small } else { big })
        } else {
            None
        };
        if let Some(alt) = alternate {
            warnings.push(format!("t = {}: two non-negative roots {r} (chosen) and {alt}", p.t));
        }
        points.push(HazardPoint {
            t: p.t,
            r,
            alternate_root: alternate,
        });
    }
    let mut hc = HazardCurve::from_points(points)?;
    hc.warnings = warnings;
    Ok(hc)
}

/// Survival function rebuilt from a hazard curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructedSurvival {
    ts: Vec<f64>,
    cumulative: Vec<f64>,
    anchor: f64,
    anchor_sf: f64,
}

impl ReconstructedSurvival {
    fn cumulative_at(&self, t: f64) -> Option<f64> {
        let n = self.ts.len();
        if !(t >= self.ts[0] && t <= self.ts[n - 1]) {
            return None;
        }
        let i = self.ts.partition_point(|&s| s <= t);
        if i == n {
            return Some(self.cumulative[n - 1]);
        }
        let w = (t - self.ts[i - 1]) / (self.ts[i] - self.ts[i - 1]);
        Some(self.cumulative[i - 1] + w * (self.cumulative[i] - self.cumulative[i - 1]))
    }

    /// F̄(t); `None` outside the hazard grid.
    pub fn sf(&self, t: f64) -> Option<f64> {
        let h = self.cumulative_at(t)? - self.cumulative_at(self.anchor)?;
        Some(self.anchor_sf * (-h).exp())
    }

    pub fn span(&self) -> (f64, f64) {
        (self.ts[0], self.ts[self.ts.len() - 1])
    }
}

/// F̄(t) = F̄(t_start) exp(−∫_{t_start}^t r) with the trapezoid rule on the
/// hazard grid. Fails when two grid points are further apart than
/// `max_spacing`.
pub fn reconstruct_survival(
    hc: &HazardCurve,
    t_start: f64,
    sf_start: f64,
    max_spacing: f64,
) -> Result<ReconstructedSurvival> {
    let pts = hc.points();
    for w in pts.windows(2) {
        let gap = w[1].t - w[0].t;
        if gap > max_spacing * (1.0 + 1e-9) {
            return Err(Error::Resolution { gap, max: max_spacing });
        }
    }
    let (a, b) = hc.span();
    if !(t_start >= a && t_start <= b) {
        return Err(Error::Domain(format!("anchor {t_start} lies outside the hazard grid [{a}, {b}]")));
    }
    if !(sf_start > 0.0 && sf_start <= 1.0) {
        return Err(Error::Domain(format!("anchor survival {sf_start} must be in (0, 1]")));
    }
    let ts: Vec<f64> = pts.iter().map(|p| p.t).collect();
    let mut cumulative = vec![0.0; pts.len()];
    for i in 1..pts.len() {
        cumulative[i] = cumulative[i - 1] + 0.5 * (pts[i].r + pts[i - 1].r) * (pts[i].t - pts[i - 1].t);
    }
    Ok(ReconstructedSurvival {
        ts,
        cumulative,
        anchor: t_start,
        anchor_sf: sf_start,
    })
}

/// A hazard function given in closed form, with its cumulative integral.
pub trait HazardFamily: Send + Sync + fmt::Debug {
    fn name(&self) -> String;
    fn hazard(&self, t: f64) -> f64;
    /// ∫_a^b r(u) du.
    fn cumulative(&self, a: f64, b: f64) -> f64;
    /// Open interval on which r is positive and finite.
    fn window(&self) -> (f64, f64);
    /// Value J^w(X_t) should take if the family makes it constant.
    fn predicted_constant(&self) -> Option<f64> {
        None
    }
    fn quantile_in_window(&self, t_lo: f64, p: f64) -> Option<f64> {
        let _ = (t_lo, p);
        None
    }
    /// The window edge at which the induced density blows up, if any.
    fn singular_upper(&self) -> bool {
        false
    }
}

/// r(t) = 2 / (t (C − 3 ln t)) with C = 2/(t₀ r₀) + 3 ln t₀, positive for
/// t < e^{C/3}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstancyOdeFamily {
    pub t0: f64,
    pub r0: f64,
    pub c: f64,
}

impl ConstancyOdeFamily {
    pub fn new(t0: f64, r0: f64) -> Result<Self> {
        if !(t0 > 0.0 && t0.is_finite() && r0 > 0.0 && r0.is_finite()) {
            return Err(Error::invalid("constancy_ode", format!("need t0 > 0, r0 > 0 (got {t0}, {r0})")));
        }
        Ok(ConstancyOdeFamily {
            t0,
            r0,
            c: 2.0 / (t0 * r0) + 3.0 * t0.ln(),
        })
    }

    fn u(&self, t: f64) -> f64 {
        self.c - 3.0 * t.ln()
    }

    /// Whether r(t) > 0, i.e. C − 3 ln t > 0.
    pub fn contains(&self, t: f64) -> bool {
        t > 0.0 && self.u(t) > 0.0
    }

    pub fn upper(&self) -> f64 {
        (self.c / 3.0).exp()
    }
}

impl HazardFamily for ConstancyOdeFamily {
    fn name(&self) -> String {
        format!("constancy_ode(t0={}, r0={})", self.t0, self.r0)
    }

    fn hazard(&self, t: f64) -> f64 {
        2.0 / (t * self.u(t))
    }

    fn cumulative(&self, a: f64, b: f64) -> f64 {
        // d/dt ln(C − 3 ln t) = −3/(t u), so ∫ r = −(2/3) ln(u(b)/u(a)).
        -(2.0 / 3.0) * (self.u(b) / self.u(a)).ln()
    }

    fn window(&self) -> (f64, f64) {
        (0.0, self.upper())
    }

    fn quantile_in_window(&self, t_lo: f64, p: f64) -> Option<f64> {
        // F̄(t)/F̄(t_lo) = (u(t)/u(t_lo))^{2/3}
        let u = self.u(t_lo) * (1.0 - p).powf(1.5);
        Some(((self.c - u) / 3.0).exp())
    }

    fn singular_upper(&self) -> bool {
        true
    }
}

/// r(t) = k / t, the hazard of every Pareto law with shape k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParetoHazardFamily {
    pub k: f64,
}

impl ParetoHazardFamily {
    pub fn new(k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::invalid("pareto_hazard", format!("need k > 0 (got {k})")));
        }
        Ok(ParetoHazardFamily { k })
    }
}

impl HazardFamily for ParetoHazardFamily {
    fn name(&self) -> String {
        format!("pareto_hazard(k={})", self.k)
    }

    fn hazard(&self, t: f64) -> f64 {
        self.k / t
    }

    fn cumulative(&self, a: f64, b: f64) -> f64 {
        self.k * (b / a).ln()
    }

    fn window(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    fn predicted_constant(&self) -> Option<f64> {
        Some(-self.k / 4.0)
    }

    fn quantile_in_window(&self, t_lo: f64, p: f64) -> Option<f64> {
        Some(t_lo * (1.0 - p).powf(-1.0 / self.k))
    }
}

/// The lifetime law on [t_lo, window end) with F̄(t) = exp(−∫_{t_lo}^t r),
/// density r F̄.
#[derive(Debug, Clone)]
pub struct HazardInduced {
    family: Arc<dyn HazardFamily>,
    t_lo: f64,
}

impl HazardInduced {
    pub fn new(family: Arc<dyn HazardFamily>, t_lo: f64) -> Result<Self> {
        let (a, b) = family.window();
        if !(t_lo > a && t_lo < b) {
            return Err(Error::Domain(format!(
                "t = {t_lo} lies outside the window ({a}, {b}) of {}",
                family.name()
            )));
        }
        Ok(HazardInduced { family, t_lo })
    }
}

impl Univariate for HazardInduced {
    fn name(&self) -> String {
        format!("{} from {}", self.family.name(), self.t_lo)
    }

    fn support(&self) -> (f64, f64) {
        (self.t_lo, self.family.window().1)
    }

    fn pdf(&self, x: f64) -> f64 {
        let (a, b) = self.support();
        if !(x >= a && x < b) {
            return 0.0;
        }
        self.family.hazard(x) * self.sf(x)
    }

    fn cdf(&self, x: f64) -> f64 {
        1.0 - self.sf(x)
    }

    fn sf(&self, x: f64) -> f64 {
        let (a, b) = self.support();
        if x <= a {
            1.0
        } else if x >= b {
            0.0
        } else {
            (-self.family.cumulative(a, x)).exp()
        }
    }

    fn quantile(&self, p: f64) -> f64 {
        self.family
            .quantile_in_window(self.t_lo, p)
            .unwrap_or_else(|| crate::distributions::bisect_quantile(self, p))
    }

    fn singular_density(&self) -> Endpoints {
        Endpoints {
            lower: false,
            upper: self.family.singular_upper(),
        }
    }
}

/// J^w(X_t) across a grid for a hazard family.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstancyReport {
    pub family: String,
    pub values: Vec<(f64, f64)>,
    /// max − min of the values.
    pub spread: f64,
    pub predicted_constant: Option<f64>,
    /// Largest deviation from the predicted constant.
    pub max_deviation: Option<f64>,
    pub notes: Vec<String>,
}

impl ConstancyReport {
    /// Constancy as a claim: spread against zero.
    pub fn to_claim(&self) -> ClaimReport {
        let mut report = ClaimReport::equality("constancy", self.spread, 0.0, CONSTANCY_TOL);
        for note in &self.notes {
            report = report.with_note(note.clone());
        }
        if let (Some(c), Some(dev)) = (self.predicted_constant, self.max_deviation) {
            report = report.with_detail("predicted_constant", c).with_detail("max_deviation", dev);
        }
        report
    }
}

/// Build the law induced by `family` from the smallest grid point and
/// tabulate J^w(X_t) over the grid.
pub fn constancy_explorer(
    family: Arc<dyn HazardFamily>,
    grid: &[f64],
    opts: &MeasureOptions,
) -> Result<ConstancyReport> {
    if grid.is_empty() {
        return Err(Error::Spec("constancy grid is empty".into()));
    }
    let (a, b) = family.window();
    if let Some(t) = grid.iter().find(|&&t| !(t > a && t < b)) {
        return Err(Error::Domain(format!(
            "grid point {t} lies outside the positivity window ({a}, {b}) of {}",
            family.name()
        )));
    }
    let t_lo = grid.iter().copied().fold(f64::INFINITY, f64::min);
    let mut notes = Vec::new();
    if b.is_finite() {
        notes.push(format!(
            "hazard positive only for t < {b}; the induced law lives on [{t_lo}, {b}) and is proper there"
        ));
    }
    let dist: UnivariateDistribution = Arc::new(HazardInduced::new(family.clone(), t_lo)?);
    let opts = quadrature_opts(opts);
    let mut values = Vec::with_capacity(grid.len());
    for &t in grid {
        let v = measure(&dist, MeasureId::WeightedResidualExtropy, Some(t), &opts)?;
        values.push((t, v.value));
    }
    let max = values.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    let predicted = family.predicted_constant();
    let max_deviation = predicted.map(|c| values.iter().map(|v| (v.1 - c).abs()).fold(0.0, f64::max));
    Ok(ConstancyReport {
        family: family.name(),
        values,
        spread: max - min,
        predicted_constant: predicted,
        max_deviation,
        notes,
    })
}

/// Invert the quadrature curve of `dist` on `grid`, rebuild F̄ from the
/// first grid point and compare with the true survival function.
pub fn inversion_round_trip(
    dist: &UnivariateDistribution,
    grid: &[f64],
    choice: RootChoice,
    opts: &MeasureOptions,
) -> Result<ClaimReport> {
    let opts = quadrature_opts(opts);
    let mut curve = Vec::with_capacity(grid.len());
    for &t in grid {
        let v = measure(dist, MeasureId::WeightedResidualExtropy, Some(t), &opts)?;
        let d = measures::weighted_residual_derivative(dist, t, &opts)?;
        curve.push(CurvePoint::new(t, v.value, Some(d.numeric)));
    }
    let hc = invert_weighted_residual(&curve, choice)?;
    let max_spacing = grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let start = grid[0];
    if !(dist.sf(start) >= BOUNDARY_MASS) {
        return Err(Error::Domain(format!("F̄({start}) is zero")));
    }
    let rebuilt = reconstruct_survival(&hc, start, dist.sf(start), max_spacing)?;
    let mut hazard_error: f64 = 0.0;
    let mut sf_error: f64 = 0.0;
    for p in hc.points() {
        hazard_error = hazard_error.max((p.r - dist.hazard(p.t)).abs());
        if let Some(s) = rebuilt.sf(p.t) {
            sf_error = sf_error.max((s - dist.sf(p.t)).abs());
        }
    }
    let ambiguous = hc.points().iter().filter(|p| p.alternate_root.is_some()).count();
    let mut report = ClaimReport::equality("inversion", sf_error, 0.0, 1e-4)
        .with_note("lhs: sup-norm error of the rebuilt survival function")
        .with_detail("max_hazard_error", hazard_error)
        .with_detail("ambiguous_points", ambiguous as f64);
    if ambiguous > 0 {
        report = report.with_note(format!("{ambiguous} grid points had two non-negative roots"));
    }
    let mismatched = hc.warnings.iter().filter(|w| w.contains("supplied")).count();
    if mismatched > 0 {
        report = report.with_note(format!(
            "{mismatched} supplied derivatives disagree with finite differences"
        ));
    }
    Ok(report)
}
