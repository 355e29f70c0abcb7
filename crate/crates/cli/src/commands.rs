//! Subcommand implementations. Each returns a [`Table`].

use std::fs;
use std::sync::Arc;

use extropy::bivariate::{self, BivariateMeasure, BivariateSpec, BIVARIATE_FAMILIES};
use extropy::claims::{self, ClaimId, ConstancyOdeFamily, HazardFamily, ParetoHazardFamily, RootChoice};
use extropy::distributions::{make_distribution, DistSpec};
use extropy::measures::{self, measure, MeasureId, MeasureOptions, MeasureValue, MethodChoice};
use extropy::montecarlo;
use extropy::transforms::{self, MonotoneTransform, Pushforward};
use extropy::{ClaimReport, Error, UnivariateDistribution, Verdict};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::args::*;
use crate::output::{Cell, Table};

/// Smallest tolerance the CLI accepts.
pub const MIN_TOL: f64 = 1e-12;
/// Monte-Carlo agreement threshold in standard errors.
pub const MC_SIGMAS: f64 = 4.0;

/// Why a command failed; decides the exit status.
#[derive(Debug)]
pub enum Failure {
    /// Bad input: exit 2.
    Validation(String),
    /// Numerical failure where a value was required: exit 3.
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Failure::Validation(_) => "validation",
            Failure::Numerical(_) => "numerical",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Validation(msg.into())
}

pub fn options(common: &Common) -> Outcome<MeasureOptions> {
    let method: MethodChoice = common.method.parse()?;
    let mut opts = MeasureOptions {
        method,
        ..Default::default()
    };
    if let Some(tol) = common.tol {
        if !(tol >= MIN_TOL && tol.is_finite()) {
            return Err(invalid(format!("--tol must be at least {MIN_TOL:e} (got {tol:e})")));
        }
        opts.tol = tol;
    }
    Ok(opts)
}

/// Inline JSON when the argument starts with '{', a file path otherwise.
fn spec_text(arg: &str) -> Outcome<String> {
    if arg.trim_start().starts_with('{') {
        Ok(arg.to_string())
    } else {
        fs::read_to_string(arg).map_err(|e| invalid(format!("cannot read distribution file '{arg}': {e}")))
    }
}

struct Loaded {
    spec: DistSpec,
    dist: UnivariateDistribution,
    label: String,
}

fn load(arg: &str) -> Outcome<Loaded> {
    let spec = DistSpec::from_json(&spec_text(arg)?)?;
    let dist = make_distribution(&spec)?;
    let label = dist.name();
    Ok(Loaded { spec, dist, label })
}

fn load_all(args: &[String]) -> Outcome<Vec<Loaded>> {
    args.iter().map(|a| load(a)).collect()
}

fn parse_ids<T: std::str::FromStr<Err = Error>>(ids: &[String]) -> Outcome<Vec<T>> {
    ids.iter().map(|s| s.trim().parse::<T>().map_err(Failure::from)).collect()
}

/// Parse `lo:hi:n` or `geometric:lo:hi:n`.
pub fn parse_grid(text: &str) -> Outcome<Vec<f64>> {
    let (geometric, rest) = match text.strip_prefix("geometric:") {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let parts: Vec<&str> = rest.split(':').collect();
    let bad = || invalid(format!("grid '{text}' must be lo:hi:n or geometric:lo:hi:n"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) || n < 2 {
        return Err(invalid(format!("grid '{text}' needs finite lo < hi and n >= 2")));
    }
    if geometric && !(lo > 0.0) {
        return Err(invalid(format!("geometric grid '{text}' needs lo > 0")));
    }
    Ok((0..n)
        .map(|i| {
            let s = i as f64 / (n - 1) as f64;
            if i == n - 1 {
                hi
            } else if geometric {
                lo * (hi / lo).powf(s)
            } else {
                lo + s * (hi - lo)
            }
        })
        .collect())
}

/// Explicit times if given, else `None`.
fn explicit_times(times: &Times) -> Outcome<Option<Vec<f64>>> {
    match (&times.grid, times.t.is_empty()) {
        (Some(_), false) => Err(invalid("give either --t or --grid, not both")),
        (Some(g), true) => Ok(Some(parse_grid(g)?)),
        (None, false) => Ok(Some(times.t.clone())),
        (None, true) => Ok(None),
    }
}

fn value_cells(v: &MeasureValue) -> Vec<Cell> {
    vec![
        v.value.into(),
        v.abs_error.into(),
        v.method.as_str().into(),
        v.diverged.into(),
    ]
}

const MEASURE_COLUMNS: &[&str] = &["distribution", "measure", "t", "value", "error", "method", "diverged"];

pub fn measure_cmd(args: &MeasureArgs, opts: &MeasureOptions) -> Outcome<Table> {
    let dists = load_all(&args.dist)?;
    let ids: Vec<MeasureId> = if args.measure.is_empty() {
        vec![MeasureId::Extropy, MeasureId::WeightedExtropy]
    } else {
        parse_ids(&args.measure)?
    };
    let times = explicit_times(&args.times)?;
    let mut table = Table::new("measure", MEASURE_COLUMNS);
    for d in &dists {
        for &id in &ids {
            if id.is_time_indexed() {
                let ts = times
                    .as_ref()
                    .ok_or_else(|| invalid(format!("measure '{id}' needs --t or --grid")))?;
                for &t in ts {
                    let v = measure(&d.dist, id, Some(t), opts)?;
                    let mut row = vec![d.label.clone().into(), id.as_str().into(), t.into()];
                    row.extend(value_cells(&v));
                    table.push(row);
                }
            } else {
                let v = measure(&d.dist, id, None, opts)?;
                let mut row = vec![d.label.clone().into(), id.as_str().into(), Cell::Null];
                row.extend(value_cells(&v));
                table.push(row);
            }
        }
    }
    Ok(table)
}

pub fn curve_cmd(args: &CurveArgs, opts: &MeasureOptions) -> Outcome<Table> {
    let dists = load_all(&args.dist)?;
    let ids: Vec<MeasureId> = parse_ids(&args.measure)?;
    if let Some(id) = ids.iter().find(|id| !id.is_time_indexed()) {
        return Err(invalid(format!("curve needs a time-indexed measure; '{id}' is not")));
    }
    let times = explicit_times(&args.times)?;
    let mut columns = MEASURE_COLUMNS.to_vec();
    columns.push("message");
    let mut table = Table::new("curve", &columns);
    for d in &dists {
        let mut ts = times.clone().unwrap_or_else(|| measures::default_grid(d.dist.as_ref()));
        ts.sort_by(f64::total_cmp);
        for &id in &ids {
            for (&t, r) in ts.iter().zip(measures::curve(&d.dist, id, &ts, opts)) {
                let mut row = vec![d.label.clone().into(), id.as_str().into(), t.into()];
                match r {
                    Ok(v) => {
                        row.extend(value_cells(&v));
                        row.push(Cell::Null);
                    }
                    Err(e) => {
                        row.extend([Cell::Null, Cell::Null, Cell::Null, Cell::Null]);
                        row.push(e.to_string().into());
                    }
                }
                table.push(row);
            }
        }
    }
    Ok(table)
}

fn load_bivariate(arg: &str) -> Outcome<bivariate::BivariateDistribution> {
    let spec = BivariateSpec::from_json(&spec_text(arg)?)?;
    Ok(bivariate::make_bivariate(&spec)?)
}

pub fn bivariate_cmd(args: &BivariateArgs, opts: &MeasureOptions) -> Outcome<Table> {
    let ids: Vec<BivariateMeasure> = if args.measure.is_empty() {
        BivariateMeasure::ALL.to_vec()
    } else {
        parse_ids(&args.measure)?
    };
    let mut table = Table::new("bivariate", MEASURE_COLUMNS);
    for arg in &args.dist {
        let bd = load_bivariate(arg)?;
        for &id in &ids {
            let v = bivariate::bivariate_measure(bd.as_ref(), id, opts)?;
            let mut row = vec![bd.name().into(), id.as_str().into(), Cell::Null];
            row.extend(value_cells(&v));
            table.push(row);
        }
    }
    Ok(table)
}

pub fn transform_cmd(args: &TransformArgs, opts: &MeasureOptions) -> Outcome<Table> {
    let dists = load_all(&args.dist)?;
    let times = explicit_times(&args.times)?;
    let columns = [
        "distribution",
        "transform",
        "quantity",
        "t",
        "value",
        "error",
        "method",
        "diverged",
        "message",
    ];
    let mut table = Table::new("transform", &columns);
    for d in &dists {
        let phi = MonotoneTransform::parse(&args.transform, &d.dist)?;
        let mut emit = |quantity: &str, t: Option<f64>, r: extropy::Result<MeasureValue>| -> Outcome<()> {
            let mut row = vec![
                d.label.clone().into(),
                phi.name().into(),
                quantity.into(),
                t.into(),
            ];
            match r {
                Ok(v) => {
                    row.extend(value_cells(&v));
                    row.push(Cell::Null);
                }
                Err(e) if e.is_validation() && t.is_some() => {
                    row.extend([Cell::Null, Cell::Null, Cell::Null, Cell::Null]);
                    row.push(e.to_string().into());
                }
                Err(e) => return Err(e.into()),
            }
            table.push(row);
            Ok(())
        };
        let x_domain = transforms::transformed_weighted_extropy(&d.dist, &phi, opts);
        emit("weighted_extropy", None, x_domain)?;
        let y: UnivariateDistribution = Arc::new(Pushforward::new(d.dist.clone(), phi.clone())?);
        let quad = MeasureOptions {
            method: MethodChoice::Quadrature,
            ..*opts
        };
        emit(
            "weighted_extropy_pushforward",
            None,
            measure(&y, MeasureId::WeightedExtropy, None, &quad),
        )?;
        emit("extropy_pushforward", None, measure(&y, MeasureId::Extropy, None, &quad))?;
        if let Some((a, b)) = affine_parameters(&args.transform) {
            let (j, jw) = transforms::linear_transform_extropy(&d.dist, a, b, opts)?;
            emit("extropy_linear", None, Ok(j))?;
            emit("weighted_extropy_linear", None, Ok(jw))?;
        }
        for &t in times.iter().flatten() {
            match transforms::transformed_residual_past(&d.dist, &phi, t, opts) {
                Ok((res, past)) => {
                    emit("weighted_residual_extropy", Some(t), res)?;
                    emit("weighted_past_extropy", Some(t), past)?;
                }
                Err(e) if e.is_validation() => {
                    emit("weighted_residual_extropy", Some(t), Err(e.clone()))?;
                    emit("weighted_past_extropy", Some(t), Err(e))?;
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(table)
}

/// (a, b) for the linear members of the transform vocabulary.
fn affine_parameters(text: &str) -> Option<(f64, f64)> {
    if let Some(a) = text.strip_prefix("scale:") {
        return Some((a.trim().parse().ok()?, 0.0));
    }
    let (a, b) = text.strip_prefix("affine:")?.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

const CLAIM_COLUMNS: &[&str] = &[
    "claim_id",
    "distribution",
    "t",
    "lhs",
    "rhs",
    "gap",
    "verdict",
    "notes",
    "details",
];

#[derive(Default)]
struct Tally {
    holds: usize,
    violated: usize,
    indeterminate: usize,
    errors: usize,
}

struct ClaimTable {
    table: Table,
    tally: Tally,
}

impl ClaimTable {
    fn report(&mut self, label: &str, t: Option<f64>, r: &ClaimReport) {
        match r.verdict {
            Verdict::Holds => self.tally.holds += 1,
            Verdict::Violated => self.tally.violated += 1,
            Verdict::Indeterminate => self.tally.indeterminate += 1,
        }
        self.table.push(vec![
            r.claim_id.clone().into(),
            label.into(),
            t.into(),
            r.lhs.into(),
            r.rhs.into(),
            r.gap.into(),
            r.verdict.as_str().into(),
            r.notes.clone().into(),
            Cell::Details(r.details.clone()),
        ]);
    }

    fn error(&mut self, id: ClaimId, label: &str, t: Option<f64>, e: &Error) {
        self.tally.errors += 1;
        self.tally.indeterminate += 1;
        self.table.push(vec![
            id.as_str().into(),
            label.into(),
            t.into(),
            Cell::Null,
            Cell::Null,
            Cell::Null,
            Verdict::Indeterminate.as_str().into(),
            format!("error: {e}").into(),
            Cell::Details(Vec::new()),
        ]);
    }

    fn record(&mut self, id: ClaimId, label: &str, t: Option<f64>, r: extropy::Result<ClaimReport>) {
        match r {
            Ok(r) => self.report(label, t, &r),
            Err(e) => self.error(id, label, t, &e),
        }
    }
}

fn hazard_family(arg: Option<&str>, d: &Loaded) -> Outcome<Option<Arc<dyn HazardFamily>>> {
    let numbers = |s: &str| -> Outcome<Vec<f64>> {
        s.split(',')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|_| invalid(format!("'{x}' is not a number in --hazard-family")))
            })
            .collect()
    };
    match arg {
        Some(text) => {
            if let Some(k) = text.strip_prefix("pareto:") {
                let k = numbers(k)?;
                if k.len() != 1 {
                    return Err(invalid("--hazard-family pareto:k takes one number"));
                }
                Ok(Some(Arc::new(ParetoHazardFamily::new(k[0])?)))
            } else if let Some(rest) = text.strip_prefix("ode:") {
                let v = numbers(rest)?;
                if v.len() != 2 {
                    return Err(invalid("--hazard-family ode:t0,r0 takes two numbers"));
                }
                Ok(Some(Arc::new(ConstancyOdeFamily::new(v[0], v[1])?)))
            } else {
                Err(invalid(format!(
                    "unknown hazard family '{text}'; valid: pareto:k, ode:t0,r0"
                )))
            }
        }
        None if d.spec.family == "pareto" => {
            let k = ["k", "shape"]
                .iter()
                .find_map(|n| d.spec.params.get(*n))
                .and_then(Value::as_f64)
                .ok_or_else(|| invalid("pareto spec without numeric 'k'"))?;
            Ok(Some(Arc::new(ParetoHazardFamily::new(k)?)))
        }
        None => Ok(None),
    }
}

fn root_choice(text: &str) -> Outcome<RootChoice> {
    if text == "larger" {
        return Ok(RootChoice::Larger);
    }
    text.strip_prefix("continuous:")
        .and_then(|r| r.trim().parse::<f64>().ok())
        .map(|initial| RootChoice::Continuous { initial })
        .ok_or_else(|| invalid(format!("unknown root choice '{text}'; valid: larger, continuous:r0")))
}

/// Default T for the past-bound precondition window.
fn default_horizon(dist: &UnivariateDistribution, t: f64) -> f64 {
    let q = dist.quantile(0.999);
    if q > t {
        return q;
    }
    let hi = dist.support().1;
    if hi.is_finite() && hi > t {
        0.5 * (t + hi)
    } else {
        2.0 * t + 1.0
    }
}

/// Dense linear grid over the span of the default grid, for inversion.
fn inversion_grid(dist: &UnivariateDistribution) -> Vec<f64> {
    let g = measures::default_grid(dist.as_ref());
    let (a, b) = (g[0], g[g.len() - 1]);
    parse_grid(&format!("{a}:{b}:200")).unwrap_or(g)
}

pub fn claims_cmd(args: &ClaimsArgs, opts: &MeasureOptions) -> Outcome<Table> {
    let dists = load_all(&args.dist)?;
    let second = args.dist2.as_deref().map(load).transpose()?;
    let ids: Vec<ClaimId> = if args.claims.is_empty() {
        ClaimId::ALL.to_vec()
    } else {
        parse_ids(&args.claims)?
    };
    let times = explicit_times(&args.times)?;
    let choice = root_choice(&args.root)?;
    let mut out = ClaimTable {
        table: Table::new("claims", CLAIM_COLUMNS),
        tally: Tally::default(),
    };
    for d in &dists {
        let ts = times.clone().unwrap_or_else(|| measures::default_grid(d.dist.as_ref()));
        let family = hazard_family(args.hazard_family.as_deref(), d)?;
        for &id in &ids {
            let label = d.label.as_str();
            match id {
                ClaimId::Decomposition => {
                    for &t in &ts {
                        out.record(id, label, Some(t), measures::decomposition_check(&d.dist, t, opts));
                    }
                }
                ClaimId::ResidualBound => {
                    for &t in &ts {
                        out.record(id, label, Some(t), claims::residual_bound_check(&d.dist, t, opts));
                    }
                }
                ClaimId::PastBound => {
                    for &t in &ts {
                        let horizon = args.horizon.unwrap_or_else(|| default_horizon(&d.dist, t));
                        match claims::past_bound_check(&d.dist, t, horizon, opts) {
                            Ok(c) => {
                                for r in c.reports() {
                                    let r = r.clone().with_detail("expression_gap", c.expression_gap);
                                    out.report(label, Some(t), &r);
                                }
                            }
                            Err(e) => out.error(id, label, Some(t), &e),
                        }
                    }
                }
                ClaimId::Lemma1Residual => {
                    for &t in &ts {
                        out.record(id, label, Some(t), claims::lemma1_residual_check(&d.dist, t, opts));
                    }
                }
                ClaimId::Lemma1Past => {
                    for &t in &ts {
                        out.record(id, label, Some(t), claims::lemma1_past_check(&d.dist, t, opts));
                    }
                }
                ClaimId::SumBound | ClaimId::IndependenceFactorization => {
                    let y = second.as_ref().unwrap_or(d);
                    let pair = format!("{} & {}", d.label, y.label);
                    if id == ClaimId::SumBound {
                        out.record(id, &pair, None, claims::sum_bound_check(&d.dist, &y.dist, opts));
                    } else {
                        match bivariate::independence_factorization_check(&d.dist, &y.dist, opts) {
                            Ok(reports) => reports.iter().for_each(|r| out.report(&pair, None, r)),
                            Err(e) => out.error(id, &pair, None, &e),
                        }
                    }
                }
                ClaimId::Constancy => match &family {
                    Some(fam) => match claims::constancy_explorer(fam.clone(), &ts, opts) {
                        Ok(rep) => {
                            let mut r = rep.to_claim();
                            for (t, v) in &rep.values {
                                r = r.with_detail(format!("value@{t}"), *v);
                            }
                            out.report(&rep.family, None, &r);
                        }
                        Err(e) => out.error(id, &fam.name(), None, &e),
                    },
                    None => out.report(
                        label,
                        None,
                        &ClaimReport::indeterminate(
                            "constancy",
                            "no hazard family: pass --hazard-family or a pareto distribution",
                        ),
                    ),
                },
                ClaimId::Inversion => {
                    let grid = times.clone().unwrap_or_else(|| inversion_grid(&d.dist));
                    out.record(id, label, None, claims::inversion_round_trip(&d.dist, &grid, choice, opts));
                }
            }
        }
    }
    let t = &out.tally;
    let summary = json!({
        "holds": t.holds,
        "violated": t.violated,
        "indeterminate": t.indeterminate,
        "errors": t.errors,
    });
    out.table.summary.push(("summary", summary));
    Ok(out.table)
}

/// Number of violated claims in a claims table.
pub fn violations(table: &Table) -> usize {
    table
        .summary
        .iter()
        .find(|(k, _)| *k == "summary")
        .and_then(|(_, v)| v["violated"].as_u64())
        .unwrap_or(0) as usize
}

pub fn mc_cmd(args: &McArgs, opts: &MeasureOptions, seed: u64) -> Outcome<Table> {
    let columns = [
        "distribution",
        "measure",
        "t",
        "samples",
        "estimate",
        "standard_error",
        "reference",
        "discrepancy",
        "within_4se",
        "note",
    ];
    let mut table = Table::new("mc", &columns);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let quad = MeasureOptions {
        method: MethodChoice::Quadrature,
        ..*opts
    };
    let times = explicit_times(&args.times)?;
    for arg in &args.dist {
        let text = spec_text(arg)?;
        let family: Value = serde_json::from_str(&text).map_err(|e| invalid(format!("distribution spec: {e}")))?;
        let is_joint = family["family"]
            .as_str()
            .is_some_and(|f| BIVARIATE_FAMILIES.contains(&f));
        let mut emit = |label: &str, measure: &str, t: Option<f64>, reference: MeasureValue, est: Option<montecarlo::McEstimate>| {
            let mut row = vec![label.into(), measure.into(), t.into()];
            match est {
                Some(e) if !reference.diverged => {
                    let z = montecarlo::standardized_discrepancy(&e, reference.value);
                    row.extend([
                        e.samples.into(),
                        e.estimate.into(),
                        e.standard_error.into(),
                        reference.value.into(),
                        z.into(),
                        (z.abs() <= MC_SIGMAS).into(),
                        Cell::Null,
                    ]);
                }
                _ => row.extend([
                    Cell::Null,
                    Cell::Null,
                    Cell::Null,
                    reference.value.into(),
                    Cell::Null,
                    Cell::Null,
                    "reference diverged; Monte-Carlo skipped".into(),
                ]),
            }
            table.push(row);
        };
        if is_joint {
            let bd = load_bivariate(arg)?;
            let ids: Vec<BivariateMeasure> = if args.measure.is_empty() {
                BivariateMeasure::ALL.to_vec()
            } else {
                parse_ids(&args.measure)?
            };
            for id in ids {
                let reference = bivariate::bivariate_measure(bd.as_ref(), id, &quad)?;
                let est = if reference.diverged {
                    None
                } else {
                    Some(montecarlo::estimate_bivariate(bd.as_ref(), id, args.samples, &mut rng)?)
                };
                emit(&bd.name(), id.as_str(), None, reference, est);
            }
        } else {
            let d = load(arg)?;
            let ids: Vec<MeasureId> = if args.measure.is_empty() {
                vec![MeasureId::Extropy, MeasureId::WeightedExtropy]
            } else {
                parse_ids(&args.measure)?
            };
            for id in ids {
                let ts: Vec<Option<f64>> = if id.is_time_indexed() {
                    times
                        .as_ref()
                        .ok_or_else(|| invalid(format!("measure '{id}' needs --t or --grid")))?
                        .iter()
                        .map(|&t| Some(t))
                        .collect()
                } else {
                    vec![None]
                };
                for t in ts {
                    let reference = measure(&d.dist, id, t, &quad)?;
                    let est = if reference.diverged {
                        None
                    } else {
                        Some(montecarlo::estimate(&d.dist, id, t, args.samples, &mut rng)?)
                    };
                    emit(&d.label, id.as_str(), t, reference, est);
                }
            }
        }
    }
    Ok(table)
}
