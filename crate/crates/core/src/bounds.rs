//! Closed-form survival, hitting and threshold bounds, the lambda_2 curve
//! solver and reference exponent curves.
//!
//! Raw values are never clamped. A value is flagged vacuous when it carries
//! no information: an upper bound on a probability that is `>= 1`, a lower
//! bound on a probability that is `<= 0`, or a non-positive time.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::chain::int_floor;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    ProbabilityUpper,
    ProbabilityLower,
    Time,
    Value,
}

impl BoundKind {
    pub fn is_vacuous(self, raw: f64) -> bool {
        if !raw.is_finite() {
            return !matches!(self, BoundKind::Value);
        }
        match self {
            BoundKind::ProbabilityUpper => raw >= 1.0,
            BoundKind::ProbabilityLower => raw <= 0.0,
            BoundKind::Time => raw <= 0.0,
            BoundKind::Value => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub name: String,
    pub kind: BoundKind,
    pub value: f64,
    pub vacuous: bool,
}

impl BoundValue {
    pub fn new(name: &str, kind: BoundKind, value: f64) -> Self {
        Self { name: name.to_string(), kind, value, vacuous: kind.is_vacuous(value) }
    }

    /// Value for display: probabilities clamped to `[0, 1]`.
    pub fn reported(&self) -> f64 {
        match self.kind {
            BoundKind::ProbabilityUpper | BoundKind::ProbabilityLower => self.value.clamp(0.0, 1.0),
            _ => self.value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub inputs: BTreeMap<String, f64>,
    pub values: Vec<BoundValue>,
}

impl BoundReport {
    pub fn new(name: &str, inputs: &[(&str, f64)]) -> Self {
        Self {
            name: name.to_string(),
            inputs: inputs.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            values: Vec::new(),
        }
    }

    pub fn with(mut self, name: &str, kind: BoundKind, value: f64) -> Self {
        self.values.push(BoundValue::new(name, kind, value));
        self
    }

    pub fn value(&self, name: &str) -> Option<&BoundValue> {
        self.values.iter().find(|v| v.name == name)
    }

    pub fn any_vacuous(&self) -> bool {
        self.values.iter().any(|v| v.vacuous)
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be finite and > 0, got {x}")))
    }
}

fn in_open(name: &str, x: f64, lo: f64, hi: f64) -> Result<()> {
    if x > lo && x < hi {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must lie in ({lo}, {hi}), got {x}")))
    }
}

/// Star cap `L = lambda k / (1 + 2 lambda)`.
pub fn star_cap(k: f64, lambda: f64) -> f64 {
    lambda * k / (1.0 + 2.0 * lambda)
}

/// Upper bound `(1 + lambda/2)^(b - a)` on dropping to `b` before reaching the cap from `a`.
pub fn exit_bound(a: f64, b: f64, lambda: f64) -> Result<f64> {
    positive("lambda", lambda)?;
    if !(b < a) {
        return Err(Error::invalid(format!("exit bound needs b < a, got a={a}, b={b}")));
    }
    Ok((1.0 + lambda / 2.0).powf(b - a))
}

/// Upper bound `(2 + lambda)(1 + lambda/2)^(b - L)` on dipping to `b` before returning to `L`.
pub fn return_bound(b: f64, l: f64, lambda: f64) -> Result<f64> {
    positive("lambda", lambda)?;
    if !(b >= 0.0 && b < l) {
        return Err(Error::invalid(format!("return bound needs 0 <= b < L, got b={b}, L={l}")));
    }
    Ok((2.0 + lambda) * (1.0 + lambda / 2.0).powf(b - l))
}

pub fn return_report(k: usize, lambda: f64, b: f64) -> Result<BoundReport> {
    let l = star_cap(k as f64, lambda);
    Ok(BoundReport::new("return", &[("k", k as f64), ("lambda", lambda), ("b", b), ("L", l)]).with(
        "dip_before_return",
        BoundKind::ProbabilityUpper,
        return_bound(b, l, lambda)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LifeBound {
    /// Survival horizon `S`.
    pub horizon: f64,
    pub fail_prob: f64,
}

/// Starting from `L` infected leaves, the leaf count stays above `epsilon L`
/// up to time `S` except with probability at most `fail_prob`.
pub fn life_bound(k: usize, lambda: f64, epsilon: f64) -> Result<LifeBound> {
    positive("lambda", lambda)?;
    in_open("epsilon", epsilon, 0.0, 0.5)?;
    if k == 0 {
        return Err(Error::invalid("k must be >= 1"));
    }
    let l = star_cap(k as f64, lambda);
    let base = 1.0 + lambda / 2.0;
    Ok(LifeBound {
        horizon: base.powf(l * (1.0 - 2.0 * epsilon)) / ((2.0 + lambda) * 2.0 * k as f64),
        fail_prob: (3.0 + lambda) * base.powf(-l * epsilon),
    })
}

pub fn life_report(k: usize, lambda: f64, epsilon: f64) -> Result<BoundReport> {
    let lb = life_bound(k, lambda, epsilon)?;
    Ok(BoundReport::new("life", &[("k", k as f64), ("lambda", lambda), ("epsilon", epsilon)])
        .with("horizon", BoundKind::Time, lb.horizon)
        .with("fail_prob", BoundKind::ProbabilityUpper, lb.fail_prob))
}

/// Exponent of `k` in the ignition level `K = lambda k^e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IgniteLevel {
    /// `K = lambda k^(1/3)`, as in the lemma statement.
    #[default]
    OneThird,
    /// `K = lambda k^(2/3)`, the reading used in the later commentary.
    TwoThirds,
}

impl IgniteLevel {
    pub fn level(self, k: f64, lambda: f64) -> f64 {
        match self {
            IgniteLevel::OneThird => lambda * k.cbrt(),
            IgniteLevel::TwoThirds => lambda * k.cbrt().powi(2),
        }
    }
}

impl FromStr for IgniteLevel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1/3" | "one_third" => Ok(IgniteLevel::OneThird),
            "2/3" | "two_thirds" => Ok(IgniteLevel::TwoThirds),
            _ => Err(Error::Parse(format!("ignition level must be 1/3 or 2/3, got {s:?}"))),
        }
    }
}

/// Ignition bounds from `(0, 1)`:
/// - `fail_reach_k`: `P(T_K^+ > T_00) <= 2 lambda k^(-1/3)`,
/// - `fail_reach_l`: `P_{K,1}(T_00 < T_L^+) <= k^(-1/3)`, with the sharper
///   `(1 + lambda/2)^(-K)` it comes from reported alongside,
/// - `time_to_l`: `E(T_L^+ | T_L^+ < T_00) <= 2 / lambda`.
///
/// When `K >= floor(L)` the ignition stage is degenerate and every value is flagged vacuous.
pub fn ignite_bounds(k: usize, lambda: f64, level: IgniteLevel) -> Result<BoundReport> {
    positive("lambda", lambda)?;
    if k == 0 {
        return Err(Error::invalid("k must be >= 1"));
    }
    let kf = k as f64;
    let big_k = level.level(kf, lambda);
    let l = star_cap(kf, lambda);
    let mut rep = BoundReport::new("ignite", &[("k", kf), ("lambda", lambda), ("K", big_k), ("L", l)])
        .with("fail_reach_k", BoundKind::ProbabilityUpper, 2.0 * lambda / kf.cbrt())
        .with("fail_reach_l", BoundKind::ProbabilityUpper, 1.0 / kf.cbrt())
        .with("fail_reach_l_exact_form", BoundKind::ProbabilityUpper, (1.0 + lambda / 2.0).powf(-big_k))
        .with("time_to_l", BoundKind::Time, 2.0 / lambda);
    if int_floor(big_k) >= int_floor(l) {
        rep.values.iter_mut().for_each(|v| v.vacuous = true);
    }
    Ok(rep)
}

/// Lower bound `1 - (2 + 2 lambda) k^(-1/3)` on the star staying good from `(0, 1)`.
pub fn good_bound(k: usize, lambda: f64) -> Result<BoundReport> {
    positive("lambda", lambda)?;
    if k == 0 {
        return Err(Error::invalid("k must be >= 1"));
    }
    let kf = k as f64;
    Ok(BoundReport::new("good", &[("k", kf), ("lambda", lambda)]).with(
        "good_prob",
        BoundKind::ProbabilityLower,
        1.0 - (2.0 + 2.0 * lambda) / kf.cbrt(),
    ))
}

/// Upper bound `(log n) exp((1 + epsilon) lambda^2 n)` on the mean star extinction time from `(K, 1)`.
pub fn survival_ub(n: usize, lambda: f64, epsilon: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid(format!("n must be >= 2, got {n}")));
    }
    if !(lambda >= 0.0) || !(epsilon >= 0.0) {
        return Err(Error::invalid(format!("need lambda >= 0 and epsilon >= 0, got {lambda}, {epsilon}")));
    }
    let nf = n as f64;
    Ok(nf.ln() * ((1.0 + epsilon) * lambda * lambda * nf).exp())
}

/// Relay success rate per edge, `(1 - epsilon) lambda / (lambda + 1)`.
pub fn relay_rate(lambda: f64, epsilon: f64) -> Result<f64> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::invalid(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::invalid(format!("epsilon must lie in [0, 1), got {epsilon}")));
    }
    Ok((1.0 - epsilon) * lambda / (lambda + 1.0))
}

/// Lower bound on passing infection down a path of `r` edges.
pub fn transfer_bound(r: usize, lambda: f64, epsilon: f64) -> Result<f64> {
    if r == 0 {
        return Err(Error::invalid("path length r must be >= 1"));
    }
    Ok(relay_rate(lambda, epsilon)?.powi(r as i32))
}

/// Upper bound `(1 - rate^r)^m` on a chain end never being infected in `m` attempts.
pub fn infect_bound(r: usize, m: u64, lambda: f64, epsilon: f64) -> Result<f64> {
    let x = transfer_bound(r, lambda, epsilon)?;
    if m == 0 {
        return Ok(1.0);
    }
    Ok((m as f64 * (-x).ln_1p()).exp())
}

/// Growth factor `((1-eps) lambda/(lambda+1))^(r/k) (1 + lambda/2)^((1-2eps) lambda/(1+2lambda))`.
pub fn gamma_factor(lambda: f64, r_over_k: f64, epsilon: f64) -> Result<f64> {
    positive("lambda", lambda)?;
    positive("r/k", r_over_k)?;
    if !(0.0..0.5).contains(&epsilon) {
        return Err(Error::invalid(format!("epsilon must lie in [0, 1/2), got {epsilon}")));
    }
    let hat = (1.0 - epsilon) * lambda / (lambda + 1.0);
    Ok(hat.powf(r_over_k) * (1.0 + lambda / 2.0).powf((1.0 - 2.0 * epsilon) * lambda / (1.0 + 2.0 * lambda)))
}

/// Path-to-star length ratio `r/k = log(1-p) / log p` for geometric offspring.
pub fn path_ratio(p: f64) -> Result<f64> {
    in_open("p", p, 0.0, 1.0)?;
    Ok((1.0 - p).ln() / p.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuffCondition {
    pub value: f64,
    pub holds: bool,
}

/// The sufficient condition for local survival on the geometric(p) tree.
pub fn suff_condition(lambda: f64, p: f64, epsilon: f64) -> Result<SuffCondition> {
    let value = gamma_factor(lambda, path_ratio(p)?, epsilon)?;
    Ok(SuffCondition { value, holds: value > 1.0 })
}

/// Global upper bound on lambda_2 valid for every `p`.
pub const LAMBDA2_CAP: f64 = 2.0;
const LAMBDA2_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lambda2Upper {
    /// `min(LAMBDA2_CAP, uncapped)`.
    pub value: f64,
    /// Infimum of `lambda` at which the sufficient condition holds.
    pub uncapped: f64,
    pub capped: bool,
}

fn bisect_suff(p: f64, epsilon: f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if suff_condition(mid, p, epsilon)?.holds {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Upper bound on lambda_2 for geometric(p) offspring: the smallest `lambda`
/// meeting [`suff_condition`], found by bisection on `[1e-6, 2]`, capped at 2.
/// When the condition fails on the whole bracket the uncapped value is
/// located by doubling past 2. The condition is increasing in `lambda`.
pub fn lambda2_upper(p: f64, epsilon: f64, tol: f64) -> Result<Lambda2Upper> {
    in_open("p", p, 0.0, 1.0)?;
    positive("tol", tol)?;
    if suff_condition(LAMBDA2_FLOOR, p, epsilon)?.holds {
        return Err(Error::NonBracketing(format!("condition already holds at lambda = {LAMBDA2_FLOOR} for p = {p}")));
    }
    if suff_condition(LAMBDA2_CAP, p, epsilon)?.holds {
        let v = bisect_suff(p, epsilon, LAMBDA2_FLOOR, LAMBDA2_CAP, tol)?;
        return Ok(Lambda2Upper { value: v, uncapped: v, capped: false });
    }
    let mut lo = LAMBDA2_CAP;
    let mut hi = 2.0 * LAMBDA2_CAP;
    while !suff_condition(hi, p, epsilon)?.holds {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::NonBracketing(format!("condition fails for every lambda up to 1e12 at p = {p}")));
        }
    }
    let uncapped = bisect_suff(p, epsilon, lo, hi, tol)?;
    Ok(Lambda2Upper { value: LAMBDA2_CAP, uncapped, capped: true })
}

/// Upper bound `p / (1 - p)` on lambda_1 for geometric(p) offspring.
pub fn lambda1_upper(p: f64) -> Result<f64> {
    in_open("p", p, 0.0, 1.0)?;
    Ok(p / (1.0 - p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub p: f64,
    pub lambda2_upper: f64,
    pub lambda1_upper: f64,
    pub capped: bool,
}

/// Points `start, start + step, ...` up to `end` inclusive, computed by
/// index so that rounding does not drift.
pub fn grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    positive("step", step)?;
    if !(end >= start) {
        return Err(Error::invalid(format!("grid end {end} is below start {start}")));
    }
    let n = ((end - start) / step + 1e-9).floor() as usize;
    // Rounding to 12 decimals keeps points such as 0.5 or 3.0 exact.
    Ok((0..=n).map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12).collect())
}

pub fn lambda2_curve(ps: &[f64], epsilon: f64, tol: f64) -> Result<Vec<CurveRow>> {
    ps.iter()
        .map(|&p| {
            let l2 = lambda2_upper(p, epsilon, tol)?;
            Ok(CurveRow { p, lambda2_upper: l2.value, lambda1_upper: lambda1_upper(p)?, capped: l2.capped })
        })
        .collect()
}

pub fn curve_csv(rows: &[CurveRow]) -> String {
    let mut s = String::from("p,lambda2_upper,lambda1_upper,capped\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{}\n", r.p, r.lambda2_upper, r.lambda1_upper, r.capped));
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Life2Bound {
    pub horizon: f64,
    pub fail_prob: f64,
}

fn small_lambda_epsilon(lambda: f64, epsilon: f64, hi: f64) -> Result<()> {
    positive("lambda", lambda)?;
    let floor = lambda / (1.0 + 2.0 * lambda);
    if !(epsilon > floor) {
        return Err(Error::invalid(format!(
            "small-lambda bounds (super2) need lambda/(1+2 lambda) < epsilon; got {floor} >= {epsilon}"
        )));
    }
    if !(epsilon < hi) {
        return Err(Error::invalid(format!("epsilon must be below {hi}, got {epsilon}")));
    }
    Ok(())
}

/// Small-lambda survival: horizon `exp((1-4eps) lambda^2 k / 4)` and failure
/// probability `4 exp(-(1-3eps) lambda^2 k / 4)`.
pub fn life2_bound(k: usize, lambda: f64, epsilon: f64) -> Result<Life2Bound> {
    small_lambda_epsilon(lambda, epsilon, 0.25)?;
    let x = lambda * lambda * k as f64 / 4.0;
    Ok(Life2Bound { horizon: ((1.0 - 4.0 * epsilon) * x).exp(), fail_prob: 4.0 * (-(1.0 - 3.0 * epsilon) * x).exp() })
}

pub fn life2_report(k: usize, lambda: f64, epsilon: f64) -> Result<BoundReport> {
    let b = life2_bound(k, lambda, epsilon)?;
    Ok(BoundReport::new("life2", &[("k", k as f64), ("lambda", lambda), ("epsilon", epsilon)])
        .with("horizon", BoundKind::Time, b.horizon)
        .with("fail_prob", BoundKind::ProbabilityUpper, b.fail_prob))
}

/// Small-lambda ignition with `K = lambda k / sqrt(log k)`.
pub fn ignite2_bounds(k: usize, lambda: f64, epsilon: f64) -> Result<BoundReport> {
    small_lambda_epsilon(lambda, epsilon, 1.0)?;
    if k < 2 {
        return Err(Error::invalid("k must be >= 2"));
    }
    let kf = k as f64;
    let root_log = kf.ln().sqrt();
    let big_k = lambda * kf / root_log;
    Ok(BoundReport::new("ignite2", &[("k", kf), ("lambda", lambda), ("epsilon", epsilon), ("K", big_k)])
        .with("fail_reach_k", BoundKind::ProbabilityUpper, 5.0 / root_log)
        .with("fail_reach_l", BoundKind::ProbabilityUpper, (-lambda * lambda * kf / (2.0 * root_log)).exp())
        .with("time_to_exit", BoundKind::Time, 2.0 / epsilon))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PushBounds {
    /// Number of push attempts `kappa = n^(3 nu log(2/lambda))`.
    pub kappa: f64,
    pub ln_kappa: f64,
    /// Lower bound `1 - exp(-n^(nu log(2/lambda)))` on a successful push.
    pub xfer_prob: f64,
}

/// Natural logarithms throughout.
pub fn push_bounds(n: usize, nu: f64, lambda: f64) -> Result<PushBounds> {
    positive("nu", nu)?;
    positive("lambda", lambda)?;
    if !(lambda < 2.0) {
        return Err(Error::invalid(format!("push bounds need lambda < 2, got {lambda}")));
    }
    if n < 2 {
        return Err(Error::invalid(format!("n must be >= 2, got {n}")));
    }
    let ln_n = (n as f64).ln();
    let c = nu * (2.0 / lambda).ln();
    let ln_kappa = 3.0 * c * ln_n;
    Ok(PushBounds { kappa: ln_kappa.exp(), ln_kappa, xfer_prob: -(-(c * ln_n).exp()).exp_m1() })
}

/// Rate schedules for growing configuration-model graphs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ScheduleFamily {
    /// `lambda = n^(-(1 - 2 eta) / (2a))`, stars of degree `>= n^((1-eta)/a)`.
    PowerLaw { a: f64, eta: f64 },
    /// `lambda = (log n)^((1-eta)(1-b)/2)`, stars of degree `>= eta^b log^b n`.
    Stretched { b: f64, eta: f64 },
    /// `1 / Lambda` with `Lambda ~ n^(1/(2a))`.
    WangPowerLaw { a: f64 },
    /// `1 / Lambda` with `Lambda ~ log^(b/2) n`.
    WangStretched { b: f64 },
}

impl FromStr for ScheduleFamily {
    type Err = Error;
    /// `powerlaw:a=2.5,eta=0.2`, `stretched:b=2,eta=0.5`, `wang_powerlaw:a=2.5`, `wang_stretched:b=2`.
    fn from_str(s: &str) -> Result<Self> {
        let (tag, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut kv = BTreeMap::new();
        for part in rest.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value in {s:?}")))?;
            let v: f64 = v.trim().parse().map_err(|_| Error::Parse(format!("bad number {v:?} in {s:?}")))?;
            kv.insert(k.trim().to_string(), v);
        }
        let get = |k: &str| kv.get(k).copied().ok_or_else(|| Error::Parse(format!("missing {k} in {s:?}")));
        let (fam, keys): (ScheduleFamily, &[&str]) = match tag {
            "powerlaw" => (ScheduleFamily::PowerLaw { a: get("a")?, eta: get("eta")? }, &["a", "eta"]),
            "stretched" => (ScheduleFamily::Stretched { b: get("b")?, eta: get("eta")? }, &["b", "eta"]),
            "wang_powerlaw" => (ScheduleFamily::WangPowerLaw { a: get("a")? }, &["a"]),
            "wang_stretched" => (ScheduleFamily::WangStretched { b: get("b")? }, &["b"]),
            _ => return Err(Error::Parse(format!("unknown schedule family {tag:?}"))),
        };
        if let Some(extra) = kv.keys().find(|k| !keys.contains(&k.as_str())) {
            return Err(Error::Parse(format!("unknown key {extra:?} in {s:?}")));
        }
        Ok(fam)
    }
}

impl fmt::Display for ScheduleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleFamily::PowerLaw { a, eta } => write!(f, "powerlaw:a={a},eta={eta}"),
            ScheduleFamily::Stretched { b, eta } => write!(f, "stretched:b={b},eta={eta}"),
            ScheduleFamily::WangPowerLaw { a } => write!(f, "wang_powerlaw:a={a}"),
            ScheduleFamily::WangStretched { b } => write!(f, "wang_stretched:b={b}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub lambda: f64,
    /// Degree at which a vertex counts as a star, where the family defines one.
    pub star_threshold: Option<f64>,
}

pub fn schedule_lambda(n: usize, family: ScheduleFamily) -> Result<Schedule> {
    if n < 3 {
        return Err(Error::invalid(format!("n must be >= 3, got {n}")));
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    let tail_a = |a: f64| if a > 2.0 { Ok(()) } else { Err(Error::invalid(format!("power-law a must be > 2, got {a}"))) };
    let tail_b = |b: f64| if b > 1.0 { Ok(()) } else { Err(Error::invalid(format!("stretched b must be > 1, got {b}"))) };
    Ok(match family {
        ScheduleFamily::PowerLaw { a, eta } => {
            tail_a(a)?;
            in_open("eta", eta, 0.0, 0.5)?;
            Schedule {
                lambda: nf.powf(-(1.0 - 2.0 * eta) / (2.0 * a)),
                star_threshold: Some(nf.powf((1.0 - eta) / a)),
            }
        }
        ScheduleFamily::Stretched { b, eta } => {
            tail_b(b)?;
            in_open("eta", eta, 0.0, 1.0)?;
            Schedule {
                lambda: ln_n.powf((1.0 - eta) * (1.0 - b) / 2.0),
                star_threshold: Some(eta.powf(b) * ln_n.powf(b)),
            }
        }
        ScheduleFamily::WangPowerLaw { a } => {
            tail_a(a)?;
            Schedule { lambda: nf.powf(-1.0 / (2.0 * a)), star_threshold: None }
        }
        ScheduleFamily::WangStretched { b } => {
            tail_b(b)?;
            Schedule { lambda: ln_n.powf(-b / 2.0), star_threshold: None }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentRow {
    pub alpha: f64,
    /// Mean-field exponent; undefined at `alpha = 3`.
    pub beta_meanfield: Option<f64>,
    /// Power of `lambda` in the rigorous density asymptotics, log factors dropped.
    pub beta_rigorous: f64,
}

pub fn beta_meanfield(alpha: f64) -> Option<f64> {
    if alpha < 3.0 {
        Some(1.0 / (3.0 - alpha))
    } else if alpha == 3.0 {
        None
    } else if alpha <= 4.0 {
        Some(1.0 / (alpha - 3.0))
    } else {
        Some(1.0)
    }
}

pub fn beta_rigorous(alpha: f64) -> f64 {
    if alpha <= 2.5 {
        1.0 / (3.0 - alpha)
    } else {
        2.0 * alpha - 3.0
    }
}

pub fn critical_exponent_curves(alphas: &[f64]) -> Result<Vec<ExponentRow>> {
    alphas
        .iter()
        .map(|&alpha| {
            if !(alpha > 2.0 && alpha <= 4.5) {
                return Err(Error::invalid(format!("alpha must lie in (2, 4.5], got {alpha}")));
            }
            Ok(ExponentRow { alpha, beta_meanfield: beta_meanfield(alpha), beta_rigorous: beta_rigorous(alpha) })
        })
        .collect()
}

/// `alpha,beta_meanfield,beta_rigorous`; an undefined mean-field value is an empty cell.
pub fn exponents_csv(rows: &[ExponentRow]) -> String {
    let mut s = String::from("alpha,beta_meanfield,beta_rigorous\n");
    for r in rows {
        let mf = r.beta_meanfield.map(|b| b.to_string()).unwrap_or_default();
        s.push_str(&format!("{},{},{}\n", r.alpha, mf, r.beta_rigorous));
    }
    s
}
