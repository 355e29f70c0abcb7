//! Adaptive numerical integration and differentiation.
//!
//! [`integrate`] runs a globally adaptive 21-point Gauss–Kronrod scheme.
//! Semi-infinite ranges are folded onto a finite interval with the
//! substitution `x = a + u/(1-u)` (or its mirror for `(-inf, b)`), and the
//! panels adjacent to a declared singular endpoint are pre-split geometrically
//! before adaptive bisection starts. Declared singular and infinite endpoints
//! are first screened by [`detect_divergence`], which fits the local power
//! law of the integrand and reports infinite integrals without spending the
//! evaluation budget on them.
//!
//! [`differentiate`] is Ridders' extrapolated central difference.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

/// Engine tolerance used when a caller does not supply one.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Maximum number of integrand evaluations per call to [`integrate`].
pub const EVALUATION_BUDGET: usize = 1_000_000;
/// Half-width of the band around the critical exponent -1 inside which the
/// power-law fit is reported as inconclusive.
pub const EXPONENT_BAND: f64 = 0.05;

/// Number of geometric pre-split points placed toward a singular endpoint.
const GEOMETRIC_SPLITS: i32 = 20;
/// Sample count of the power-law fit (spread over three decades).
const FIT_SAMPLES: usize = 13;
const FIT_DECADES: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("invalid interval: lower bound {lower} must be strictly below upper bound {upper}")]
    InvalidInterval { lower: f64, upper: f64 },

    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),

    #[error(
        "evaluation budget exhausted after {evaluations} evaluations \
         (partial value {value}, error estimate {abs_error})"
    )]
    BudgetExhausted {
        value: f64,
        abs_error: f64,
        evaluations: usize,
    },

    #[error("integrand is not finite at interior point {x}")]
    NonFinite { x: f64 },

    #[error("function evaluation failed inside the difference stencil at {x}")]
    Stencil { x: f64 },
}

/// Which endpoints of an integrand may carry a singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Endpoints {
    pub lower: bool,
    pub upper: bool,
}

impl Endpoints {
    pub const NONE: Endpoints = Endpoints {
        lower: false,
        upper: false,
    };
    pub const BOTH: Endpoints = Endpoints {
        lower: true,
        upper: true,
    };
}

/// A real function on an open interval, possibly unbounded, together with
/// the endpoints that may be singular and any interior breakpoints where the
/// function is known to be non-smooth.
pub struct Integrand<F> {
    evaluator: F,
    lower: f64,
    upper: f64,
    singular: Endpoints,
    breakpoints: Vec<f64>,
}

impl<F: Fn(f64) -> f64> Integrand<F> {
    pub fn new(evaluator: F, lower: f64, upper: f64) -> Self {
        Integrand {
            evaluator,
            lower,
            upper,
            singular: Endpoints::NONE,
            breakpoints: Vec::new(),
        }
    }

    pub fn singular(mut self, endpoints: Endpoints) -> Self {
        self.singular = endpoints;
        self
    }

    /// Interior points where the integrand has kinks or jumps. Points outside
    /// the open interval are ignored.
    pub fn breakpoints(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints = points.into_iter().collect();
        self
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.evaluator)(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
    pub diverged: bool,
}

impl QuadratureResult {
    fn divergent(sign: f64, evaluations: usize) -> Self {
        QuadratureResult {
            value: if sign < 0.0 {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            },
            abs_error_estimate: f64::INFINITY,
            evaluations,
            diverged: true,
        }
    }
}

/// Local behaviour of an integrand at one endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EndpointBehavior {
    /// Finite endpoint not declared singular; not inspected.
    Regular,
    /// The local integral is finite. `exponent` is `None` when the integrand
    /// vanished identically on the probe mesh.
    Convergent { exponent: Option<f64> },
    Divergent { exponent: f64, sign: f64 },
    /// The fitted exponent sits within [`EXPONENT_BAND`] of -1.
    Inconclusive { exponent: f64, sign: f64 },
}

impl EndpointBehavior {
    pub fn is_divergent(&self) -> bool {
        matches!(self, EndpointBehavior::Divergent { .. })
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self, EndpointBehavior::Inconclusive { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceReport {
    pub lower: EndpointBehavior,
    pub upper: EndpointBehavior,
}

impl DivergenceReport {
    pub fn any_divergent(&self) -> bool {
        self.lower.is_divergent() || self.upper.is_divergent()
    }

    pub fn any_inconclusive(&self) -> bool {
        self.lower.is_inconclusive() || self.upper.is_inconclusive()
    }
}

/// Decide, per endpoint, whether the local integral is infinite.
///
/// The integrand is sampled on a geometric mesh spanning three decades of
/// approach to the endpoint and `log|g|` is regressed on `log(distance)`.
/// At a finite endpoint the integral diverges when the exponent is `<= -1`;
/// at an infinite endpoint when it is `>= -1`. Exponents within
/// [`EXPONENT_BAND`] of -1 are reported inconclusive.
pub fn detect_divergence<F: Fn(f64) -> f64>(g: &Integrand<F>) -> DivergenceReport {
    let (lo, hi) = (g.lower, g.upper);
    let lower = if lo == f64::NEG_INFINITY {
        probe_infinite(g, -1.0, hi)
    } else if g.singular.lower {
        probe_finite(g, lo, 1.0, hi - lo)
    } else {
        EndpointBehavior::Regular
    };
    let upper = if hi == f64::INFINITY {
        probe_infinite(g, 1.0, lo)
    } else if g.singular.upper {
        probe_finite(g, hi, -1.0, hi - lo)
    } else {
        EndpointBehavior::Regular
    };
    DivergenceReport { lower, upper }
}

fn probe_finite<F: Fn(f64) -> f64>(
    g: &Integrand<F>,
    endpoint: f64,
    direction: f64,
    length: f64,
) -> EndpointBehavior {
    let reach = if length.is_finite() {
        length.min(1.0)
    } else {
        1.0
    };
    let nearest = 1e-9 * reach;
    let points: Vec<(f64, f64)> = (0..FIT_SAMPLES)
        .map(|i| {
            let d = nearest * 10f64.powf(FIT_DECADES * i as f64 / (FIT_SAMPLES - 1) as f64);
            (d, g.eval(endpoint + direction * d))
        })
        .collect();
    classify(&points, false)
}

fn probe_infinite<F: Fn(f64) -> f64>(g: &Integrand<F>, direction: f64, other: f64) -> EndpointBehavior {
    let base = if other.is_finite() {
        other.abs().max(1.0) * 1e3
    } else {
        1e3
    };
    let points: Vec<(f64, f64)> = (0..FIT_SAMPLES)
        .map(|i| {
            let d = base * 10f64.powf(FIT_DECADES * i as f64 / (FIT_SAMPLES - 1) as f64);
            (d, g.eval(direction * d))
        })
        .collect();
    classify(&points, true)
}

/// `points` are (distance, value) pairs; `toward_infinity` flips the
/// convergence side of the critical exponent.
fn classify(points: &[(f64, f64)], toward_infinity: bool) -> EndpointBehavior {
    // Sign of the sample closest to the endpoint.
    let nearest = if toward_infinity {
        points.last()
    } else {
        points.first()
    };
    let sign = nearest.map(|p| p.1.signum()).unwrap_or(1.0);

    if points.iter().any(|p| p.1.is_nan()) {
        return EndpointBehavior::Inconclusive {
            exponent: f64::NAN,
            sign,
        };
    }
    if points.iter().any(|p| p.1.is_infinite()) {
        return EndpointBehavior::Divergent {
            exponent: f64::NEG_INFINITY,
            sign,
        };
    }
    let nonzero: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.1 != 0.0)
        .map(|p| (p.0.ln(), p.1.abs().ln()))
        .collect();
    if nonzero.len() < points.len() {
        // Zeros on the probe mesh: the integrand underflows toward the
        // endpoint, which only happens for decaying integrands.
        let decays = if toward_infinity {
            points.last().map(|p| p.1 == 0.0).unwrap_or(true)
        } else {
            points.first().map(|p| p.1 == 0.0).unwrap_or(true)
        };
        if decays || nonzero.len() < 3 {
            return EndpointBehavior::Convergent { exponent: None };
        }
    }
    let exponent = least_squares_slope(&nonzero);
    let critical = -1.0;
    let (diverges, converges) = if toward_infinity {
        (
            exponent > critical + EXPONENT_BAND,
            exponent < critical - EXPONENT_BAND,
        )
    } else {
        (
            exponent < critical - EXPONENT_BAND,
            exponent > critical + EXPONENT_BAND,
        )
    };
    if diverges {
        EndpointBehavior::Divergent { exponent, sign }
    } else if converges {
        EndpointBehavior::Convergent {
            exponent: Some(exponent),
        }
    } else {
        EndpointBehavior::Inconclusive { exponent, sign }
    }
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Integrate `g` to `|value - exact| <= max(tol, tol * |value|)`.
///
/// Returns a result with `diverged = true` (and an infinite value carrying
/// the integrand's sign) when an endpoint is found divergent, or when the
/// fit was inconclusive and the adaptive scheme then failed to converge.
/// Plain non-convergence is [`QuadError::BudgetExhausted`].
///
/// At a finite singular endpoint with an integrable power law, the sliver
/// closer than the probe resolution is integrated from the fitted local
/// power law instead of by bisection, since `x` itself cannot resolve the
/// distance to a non-zero endpoint below machine epsilon.
pub fn integrate<F: Fn(f64) -> f64>(g: &Integrand<F>, tol: f64) -> Result<QuadratureResult, QuadError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(QuadError::InvalidTolerance(tol));
    }
    if !(g.lower < g.upper) {
        return Err(QuadError::InvalidInterval {
            lower: g.lower,
            upper: g.upper,
        });
    }

    let report = detect_divergence(g);
    let mut evaluations = [report.lower, report.upper]
        .iter()
        .filter(|b| !matches!(b, EndpointBehavior::Regular))
        .count()
        * FIT_SAMPLES;
    for behavior in [report.lower, report.upper] {
        if let EndpointBehavior::Divergent { sign, .. } = behavior {
            return Ok(QuadratureResult::divergent(sign, evaluations));
        }
    }

    let mut lower = g.lower;
    let mut upper = g.upper;
    let mut sliver = (0.0, 0.0);
    if lower.is_finite() && g.singular.lower {
        if let Some(s) = power_law_sliver(g, lower, 1.0, upper - lower, &report.lower) {
            lower = s.cut;
            sliver.0 += s.value;
            sliver.1 += s.error;
            evaluations += 4;
        }
    }
    if upper.is_finite() && g.singular.upper {
        if let Some(s) = power_law_sliver(g, upper, -1.0, upper - lower, &report.upper) {
            upper = s.cut;
            sliver.0 += s.value;
            sliver.1 += s.error;
            evaluations += 4;
        }
    }

    let result = if lower == f64::NEG_INFINITY && upper == f64::INFINITY {
        let pivot = g
            .breakpoints
            .iter()
            .copied()
            .find(|p| p.is_finite())
            .unwrap_or(0.0);
        let left = adapt(g, Mapping::LowerInfinite { b: pivot }, Endpoints::NONE, tol / 2.0)?;
        let right = adapt(g, Mapping::UpperInfinite { a: pivot }, Endpoints::NONE, tol / 2.0)?;
        left.combine(right)
    } else if upper == f64::INFINITY {
        adapt(g, Mapping::UpperInfinite { a: lower }, g.singular, tol)?
    } else if lower == f64::NEG_INFINITY {
        adapt(g, Mapping::LowerInfinite { b: upper }, g.singular, tol)?
    } else {
        adapt(g, Mapping::Identity { a: lower, b: upper }, g.singular, tol)?
    };

    evaluations += result.evaluations;
    if result.converged {
        Ok(QuadratureResult {
            value: result.value + sliver.0,
            abs_error_estimate: result.error + sliver.1,
            evaluations,
            diverged: false,
        })
    } else if report.any_inconclusive() {
        let sign = match (report.lower, report.upper) {
            (EndpointBehavior::Inconclusive { sign, .. }, _) => sign,
            (_, EndpointBehavior::Inconclusive { sign, .. }) => sign,
            _ => result.value.signum(),
        };
        Ok(QuadratureResult::divergent(sign, evaluations))
    } else {
        Err(QuadError::BudgetExhausted {
            value: result.value + sliver.0,
            abs_error: result.error + sliver.1,
            evaluations,
        })
    }
}

/// Convenience wrapper: integrate a smooth function over a finite or
/// infinite interval with no declared singularities.
pub fn integrate_fn<F: Fn(f64) -> f64>(f: F, lower: f64, upper: f64, tol: f64) -> Result<QuadratureResult, QuadError> {
    integrate(&Integrand::new(f, lower, upper), tol)
}

struct Sliver {
    /// The adaptive part starts here; the sliver covers the rest.
    cut: f64,
    value: f64,
    error: f64,
}

/// Integral of `g` over the last `1e-8 * min(L, 1)` before a singular
/// endpoint, from the local model `g(d) = C d^p (1 + c d)` in the distance
/// `d` to the endpoint.
///
/// The model is fitted through three points whose distances are recomputed
/// from the rounded abscissae, so the fit sees exactly the distances at
/// which `g` was evaluated.
fn power_law_sliver<F: Fn(f64) -> f64>(
    g: &Integrand<F>,
    endpoint: f64,
    direction: f64,
    length: f64,
    behavior: &EndpointBehavior,
) -> Option<Sliver> {
    let EndpointBehavior::Convergent {
        exponent: Some(fitted),
    } = *behavior
    else {
        return None;
    };
    if fitted >= 0.0 {
        return None;
    }
    let width = 1e-8 * length.min(1.0);
    let mut xs = [0.0; 3];
    let mut rows = [[0.0; 4]; 3];
    for (i, scale) in [1.0, 2.0, 4.0].into_iter().enumerate() {
        let x = endpoint + direction * width * scale;
        let d = (x - endpoint).abs();
        let v = g.eval(x);
        if !(v.is_finite() && v != 0.0 && d > 0.0) {
            return None;
        }
        xs[i] = x;
        rows[i] = [1.0, d.ln(), d, v.abs().ln()];
    }
    let [log_c, p, c] = solve3(rows)?;
    if !(p > -1.0) {
        return None;
    }
    let sign = g.eval(xs[0]).signum();
    let w = (xs[0] - endpoint).abs();
    let scale = sign * log_c.exp();
    let leading = scale * w.powf(p + 1.0) / (p + 1.0);
    let correction = scale * c * w.powf(p + 2.0) / (p + 2.0);
    let value = leading + correction;
    // Next term of the expansion, plus rounding of the fitted exponent.
    let error = (correction * c * w).abs() + value.abs() * 1e-13 / (p + 1.0);
    Some(Sliver {
        cut: xs[0],
        value,
        error,
    })
}

/// Solve a 3x3 linear system given as augmented rows, by Gaussian
/// elimination with partial pivoting.
fn solve3(mut m: [[f64; 4]; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        m.swap(col, pivot);
        if m[col][col] == 0.0 {
            return None;
        }
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    let mut out = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| m[row][k] * out[k]).sum();
        out[row] = (m[row][3] - tail) / m[row][row];
    }
    out.iter().all(|v| v.is_finite()).then_some(out)
}

#[derive(Debug, Clone, Copy)]
enum Mapping {
    Identity { a: f64, b: f64 },
    /// x = a + (1 - v) / v for v in (0, 1]; `x = a + u/(1-u)` with v = 1 - u,
    /// oriented so that the infinite end sits at v = 0 where floating point
    /// resolution is finest.
    UpperInfinite { a: f64 },
    /// x = b - (1 - u) / u for u in (0, 1]
    LowerInfinite { b: f64 },
}

impl Mapping {
    fn range(self) -> (f64, f64) {
        match self {
            Mapping::Identity { a, b } => (a, b),
            _ => (0.0, 1.0),
        }
    }

    fn to_x(self, u: f64) -> (f64, f64) {
        match self {
            Mapping::Identity { .. } => (u, 1.0),
            Mapping::UpperInfinite { a } => (a + (1.0 - u) / u, 1.0 / (u * u)),
            Mapping::LowerInfinite { b } => (b - (1.0 - u) / u, 1.0 / (u * u)),
        }
    }

    fn to_u(self, x: f64) -> f64 {
        match self {
            Mapping::Identity { .. } => x,
            Mapping::UpperInfinite { a } => 1.0 / (1.0 + x - a),
            Mapping::LowerInfinite { b } => 1.0 / (1.0 + b - x),
        }
    }

    /// Singular flags in the working coordinate.
    fn singular(self, x_flags: Endpoints) -> Endpoints {
        match self {
            Mapping::Identity { .. } => x_flags,
            Mapping::UpperInfinite { .. } => Endpoints {
                lower: true,
                upper: x_flags.lower,
            },
            Mapping::LowerInfinite { .. } => Endpoints {
                lower: true,
                upper: x_flags.upper,
            },
        }
    }
}

struct Outcome {
    value: f64,
    error: f64,
    evaluations: usize,
    converged: bool,
}

impl Outcome {
    fn combine(self, other: Outcome) -> Outcome {
        Outcome {
            value: self.value + other.value,
            error: self.error + other.error,
            evaluations: self.evaluations + other.evaluations,
            converged: self.converged && other.converged,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn adapt<F: Fn(f64) -> f64>(
    g: &Integrand<F>,
    mapping: Mapping,
    x_singular: Endpoints,
    tol: f64,
) -> Result<Outcome, QuadError> {
    let (u_lo, u_hi) = mapping.range();
    let singular = mapping.singular(x_singular);
    let h = |u: f64| {
        let (x, jac) = mapping.to_x(u);
        // Rounding in tiny panels can land a node on an endpoint, where the
        // integrand need not be defined.
        if x <= g.lower || x >= g.upper {
            return 0.0;
        }
        let v = g.eval(x);
        if v == 0.0 {
            0.0
        } else {
            v * jac
        }
    };
    // Non-finite values are tolerated only in panels touching a singular end.
    let at_singular_edge = |a: f64, b: f64| (singular.lower && a == u_lo) || (singular.upper && b == u_hi);

    let mut cuts: Vec<f64> = vec![u_lo, u_hi];
    cuts.extend(
        g.breakpoints
            .iter()
            .map(|&p| mapping.to_u(p))
            .filter(|&u| u > u_lo && u < u_hi),
    );
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let first = cuts[1] - cuts[0];
    let last = cuts[cuts.len() - 1] - cuts[cuts.len() - 2];
    if singular.lower {
        cuts.extend((1..=GEOMETRIC_SPLITS).map(|k| u_lo + first * 0.5f64.powi(k)));
    }
    if singular.upper {
        cuts.extend((1..=GEOMETRIC_SPLITS).map(|k| u_hi - last * 0.5f64.powi(k)));
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Panel> = Vec::new();
    let mut evaluations = 0usize;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(a < b) {
            continue;
        }
        evaluations += 21;
        match gauss_kronrod_21(&h, a, b) {
            Some((value, error)) => heap.push(Panel { a, b, value, error }),
            None if at_singular_edge(a, b) => frozen.push(Panel {
                a,
                b,
                value: 0.0,
                error: f64::INFINITY,
            }),
            None => return Err(QuadError::NonFinite { x: first_bad(&h, &mapping, a, b) }),
        }
    }

    let totals = |heap: &BinaryHeap<Panel>, frozen: &[Panel]| {
        let mut value = 0.0;
        let mut error = 0.0;
        for p in heap.iter().chain(frozen.iter()) {
            value += p.value;
            error += p.error;
        }
        (value, error)
    };
    let target = |value: f64| tol.max(tol * value.abs());

    let (mut value, mut error) = totals(&heap, &frozen);
    let mut frozen_error: f64 = frozen.iter().map(|p| p.error).sum();
    let mut since_resum = 0usize;
    loop {
        if error <= target(value) {
            // Running sums drift; confirm with a fresh sum before stopping.
            (value, error) = totals(&heap, &frozen);
            if error <= target(value) {
                return Ok(Outcome {
                    value,
                    error,
                    evaluations,
                    converged: true,
                });
            }
        }
        if frozen_error > target(value) || evaluations + 42 > EVALUATION_BUDGET {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        let scale = worst.a.abs().max(worst.b.abs());
        if !(worst.a < mid && mid < worst.b) || worst.b - worst.a <= 64.0 * f64::EPSILON * scale {
            frozen_error += worst.error;
            frozen.push(worst);
            continue;
        }
        let left = gauss_kronrod_21(&h, worst.a, mid);
        let right = gauss_kronrod_21(&h, mid, worst.b);
        evaluations += 42;
        match (left, right) {
            (Some((lv, le)), Some((rv, re))) => {
                value += lv + rv - worst.value;
                error += le + re - worst.error;
                heap.push(Panel {
                    a: worst.a,
                    b: mid,
                    value: lv,
                    error: le,
                });
                heap.push(Panel {
                    a: mid,
                    b: worst.b,
                    value: rv,
                    error: re,
                });
            }
            _ if at_singular_edge(worst.a, worst.b) => {
                frozen_error += worst.error;
                frozen.push(worst);
            }
            _ => {
                return Err(QuadError::NonFinite {
                    x: first_bad(&h, &mapping, worst.a, worst.b),
                })
            }
        }
        since_resum += 1;
        if since_resum >= 256 {
            (value, error) = totals(&heap, &frozen);
            since_resum = 0;
        }
    }
    let (value, error) = totals(&heap, &frozen);
    Ok(Outcome {
        value,
        error,
        evaluations,
        converged: false,
    })
}

fn first_bad<H: Fn(f64) -> f64>(h: &H, mapping: &Mapping, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    XGK.iter()
        .flat_map(|&x| [c - half * x, c + half * x])
        .find(|&u| !h(u).is_finite())
        .map(|u| mapping.to_x(u).0)
        .unwrap_or_else(|| mapping.to_x(c).0)
}

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208067055260,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// One Gauss–Kronrod panel; `None` if the integrand was not finite at a node.
fn gauss_kronrod_21<H: Fn(f64) -> f64>(h: &H, a: f64, b: f64) -> Option<(f64, f64)> {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();

    let fc = h(centre);
    let mut res_gauss = 0.0;
    let mut res_kronrod = WGK[10] * fc;
    let mut res_abs = res_kronrod.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let abscissa = half * XGK[j];
        let f1 = h(centre - abscissa);
        let f2 = h(centre + abscissa);
        fv1[j] = f1;
        fv2[j] = f2;
        let sum = f1 + f2;
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * sum;
        }
        res_kronrod += WGK[j] * sum;
        res_abs += WGK[j] * (f1.abs() + f2.abs());
    }
    if !fc.is_finite() || fv1.iter().chain(fv2.iter()).any(|v| !v.is_finite()) {
        return None;
    }
    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = res_kronrod * half;
    res_abs *= abs_half;
    res_asc *= abs_half;
    let mut err = ((res_kronrod - res_gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Some((result, err))
}

/// A derivative estimate with the extrapolation residual as error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub value: f64,
    pub error: f64,
}

/// Ridders' method: central differences at geometrically shrinking steps,
/// starting from `scale`, combined by Richardson extrapolation.
///
/// The stencil never leaves `[t - scale, t + scale]`. A non-finite
/// evaluation inside it is reported as [`QuadError::Stencil`] via `E`.
pub fn differentiate<F, E>(mut h: F, t: f64, scale: f64) -> Result<Derivative, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<QuadError>,
{
    const SHRINK: f64 = 1.4;
    const SHRINK2: f64 = SHRINK * SHRINK;
    const TABLE: usize = 10;
    const SAFE: f64 = 2.0;

    if !(scale > 0.0 && scale.is_finite()) {
        return Err(QuadError::InvalidTolerance(scale).into());
    }
    let mut eval = |x: f64| -> Result<f64, E> {
        let v = h(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadError::Stencil { x }.into())
        }
    };

    let mut table = [[0.0f64; TABLE]; TABLE];
    let mut step = scale;
    table[0][0] = (eval(t + step)? - eval(t - step)?) / (2.0 * step);
    let mut best = Derivative {
        value: table[0][0],
        error: f64::INFINITY,
    };
    for i in 1..TABLE {
        step /= SHRINK;
        table[0][i] = (eval(t + step)? - eval(t - step)?) / (2.0 * step);
        let mut factor = SHRINK2;
        for j in 1..=i {
            table[j][i] = (table[j - 1][i] * factor - table[j - 1][i - 1]) / (factor - 1.0);
            factor *= SHRINK2;
            let residual = (table[j][i] - table[j - 1][i])
                .abs()
                .max((table[j][i] - table[j - 1][i - 1]).abs());
            if residual <= best.error {
                best = Derivative {
                    value: table[j][i],
                    error: residual,
                };
            }
        }
        if (table[i][i] - table[i - 1][i - 1]).abs() >= SAFE * best.error {
            break;
        }
    }
    Ok(best)
}
