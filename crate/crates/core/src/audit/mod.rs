//! Counterexample search for diversification, anti-diversification and
//! risk attitudes, with certificates that re-verify from their JSON alone.
//!
//! A `no_violation_within_budget` verdict is never a proof; it records that
//! the seeded generator family produced no violation.

mod generate;
mod matrix;

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::coupling::{convex_combine, JointDist, JointJson, Tag};
use crate::dist::{DiscreteDist, DistJson};
use crate::functionals::{
    compare_values, evaluate, evaluate_all, parse_preference, ComparisonResult, Preference,
};
use crate::orders::concave_order_geq;
use crate::scalar::{format_rational, parse_rational, rat, rational_approx, NumericMode, Rational, Scalar, Value, DEFAULT_EPS};

pub use generate::{generate_ordered_pairs, generate_pairs, random_dist, MarginalFamily};
pub use matrix::{implication_matrix, ConsistencyCheck, MatrixCell, MatrixReport, MatrixRow};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PairClass {
    All,
    Id,
    Comonotonic,
    Antimonotonic,
    AmAndId,
    Independent,
    InAndId,
    Exchangeable,
}

impl PairClass {
    pub const ALL: [PairClass; 8] = [
        PairClass::All,
        PairClass::Id,
        PairClass::Comonotonic,
        PairClass::Antimonotonic,
        PairClass::AmAndId,
        PairClass::Independent,
        PairClass::InAndId,
        PairClass::Exchangeable,
    ];

    pub fn short(self) -> &'static str {
        match self {
            PairClass::All => "All",
            PairClass::Id => "ID",
            PairClass::Comonotonic => "CM",
            PairClass::Antimonotonic => "AM",
            PairClass::AmAndId => "AM&ID",
            PairClass::Independent => "IN",
            PairClass::InAndId => "IN&ID",
            PairClass::Exchangeable => "EX",
        }
    }

    /// Pairs in the class have identically distributed components.
    pub fn is_id(self) -> bool {
        matches!(self, PairClass::Id | PairClass::AmAndId | PairClass::InAndId | PairClass::Exchangeable)
    }

    pub fn required_tags(self) -> &'static [Tag] {
        match self {
            PairClass::All => &[],
            PairClass::Id => &[Tag::IdMarginals],
            PairClass::Comonotonic => &[Tag::Comonotonic],
            PairClass::Antimonotonic => &[Tag::Antimonotonic],
            PairClass::AmAndId => &[Tag::Antimonotonic, Tag::IdMarginals],
            PairClass::Independent => &[Tag::Independent],
            PairClass::InAndId => &[Tag::Independent, Tag::IdMarginals],
            PairClass::Exchangeable => &[Tag::Exchangeable],
        }
    }

    pub fn contains<S: Scalar>(self, j: &JointDist<S>) -> bool {
        self.required_tags().iter().all(|t| j.has(*t))
    }
}

impl fmt::Display for PairClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

impl FromStr for PairClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let key = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        Ok(match key.as_str() {
            "all" => PairClass::All,
            "id" => PairClass::Id,
            "cm" | "comonotonic" => PairClass::Comonotonic,
            "am" | "antimonotonic" => PairClass::Antimonotonic,
            "am&id" | "am_and_id" | "am_id" => PairClass::AmAndId,
            "in" | "independent" => PairClass::Independent,
            "in&id" | "in_and_id" | "in_id" => PairClass::InAndId,
            "ex" | "exchangeable" => PairClass::Exchangeable,
            _ => return Err(format!("unknown pair class {s:?}")),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    WeakRiskAversion,
    WeakRiskSeeking,
    StrongRiskAversion,
    StrongRiskSeeking,
    Diversification(PairClass),
    AntiDiversification(PairClass),
}

impl Property {
    pub fn all() -> Vec<Property> {
        let mut v = vec![
            Property::WeakRiskAversion,
            Property::WeakRiskSeeking,
            Property::StrongRiskAversion,
            Property::StrongRiskSeeking,
        ];
        v.extend(PairClass::ALL.iter().map(|&c| Property::Diversification(c)));
        v.extend(PairClass::ALL.iter().map(|&c| Property::AntiDiversification(c)));
        v
    }

    pub fn name(&self) -> String {
        match self {
            Property::WeakRiskAversion => "weak_RA".into(),
            Property::WeakRiskSeeking => "weak_RS".into(),
            Property::StrongRiskAversion => "strong_RA".into(),
            Property::StrongRiskSeeking => "strong_RS".into(),
            Property::Diversification(c) => format!("div_{}", c.short()),
            Property::AntiDiversification(c) => format!("anti_{}", c.short()),
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Property {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let lower = s.trim().to_ascii_lowercase();
        Ok(match lower.as_str() {
            "weak_ra" => Property::WeakRiskAversion,
            "weak_rs" => Property::WeakRiskSeeking,
            "strong_ra" => Property::StrongRiskAversion,
            "strong_rs" => Property::StrongRiskSeeking,
            _ => {
                if let Some(c) = lower.strip_prefix("div_") {
                    Property::Diversification(c.parse()?)
                } else if let Some(c) = lower.strip_prefix("anti_") {
                    Property::AntiDiversification(c.parse()?)
                } else {
                    return Err(format!("unknown property {s:?}"));
                }
            }
        })
    }
}

impl Serialize for Property {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> Result<Ser::Ok, Ser::Error> {
        s.serialize_str(&self.name())
    }
}

impl<'de> Deserialize<'de> for Property {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditConfig {
    pub lambda_grid: Vec<Rational>,
    pub pair_budget: usize,
    pub seed: u64,
    pub family: MarginalFamily,
    pub mode: NumericMode,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            lambda_grid: (0..=16).map(|k| rat(k, 16)).collect(),
            pair_budget: 500,
            seed: 0,
            family: MarginalFamily::default(),
            mode: NumericMode::ExactRational,
        }
    }
}

impl AuditConfig {
    pub fn validate(&self) -> Result<(), String> {
        let (zero, half, one) = (Rational::zero(), rat(1, 2), Rational::one());
        if let Some(l) = self.lambda_grid.iter().find(|l| **l < zero || **l > one) {
            return Err(format!("lambda {} outside [0,1]", format_rational(l)));
        }
        for must in [&zero, &half, &one] {
            if !self.lambda_grid.contains(must) {
                return Err(format!("lambda grid must contain {}", format_rational(must)));
            }
        }
        if self.pair_budget == 0 {
            return Err("pair budget must be at least 1".into());
        }
        self.family.validate()?;
        self.mode.validate()
    }

    /// `1/2` first (where the classical counterexamples live), then the rest
    /// in increasing order.
    fn lambda_order(&self) -> Vec<Rational> {
        let half = rat(1, 2);
        let mut rest: Vec<Rational> = self.lambda_grid.iter().filter(|l| **l != half).cloned().collect();
        rest.sort();
        rest.dedup();
        std::iter::once(half).chain(rest).collect()
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            lambda_grid: self.lambda_grid.iter().map(format_rational).collect(),
            pair_budget: self.pair_budget,
            seed: self.seed,
            family: self.family.clone(),
            mode: self.mode,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub lambda_grid: Vec<String>,
    pub pair_budget: usize,
    pub seed: u64,
    pub family: MarginalFamily,
    pub mode: NumericMode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Violated,
    NoViolationWithinBudget,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Violated => "violated",
            Verdict::NoViolationWithinBudget => "no_violation_within_budget",
        })
    }
}

/// Evidence that `candidate` is not weakly preferred to `reference` although
/// the property requires it. `preference` is the one actually compared
/// (risk seeking and anti-diversification run on the reversed preference).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub preference: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub joint: Option<JointJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda: Option<String>,
    pub x: DistJson,
    pub y: DistJson,
    pub candidate: DistJson,
    pub reference: DistJson,
    pub candidate_values: Vec<Value>,
    pub reference_values: Vec<Value>,
    pub comparison: ComparisonResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub schema_version: u32,
    pub property: Property,
    pub preference: String,
    pub verdict: Verdict,
    pub certificate: Option<Certificate>,
    pub pairs_tested: usize,
    pub pairs_skipped: usize,
    pub seed: u64,
    pub config: ConfigEcho,
}

impl AuditReport {
    pub fn is_violated(&self) -> bool {
        self.verdict == Verdict::Violated
    }

    /// Everything except the labels: used to compare searches that must agree.
    pub fn outcome(&self) -> (Verdict, Option<&Certificate>, usize, usize) {
        (self.verdict, self.certificate.as_ref(), self.pairs_tested, self.pairs_skipped)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_table(&self) -> String {
        let mut rows: Vec<(String, String)> = vec![
            ("property".into(), self.property.name()),
            ("preference".into(), self.preference.clone()),
            ("verdict".into(), self.verdict.to_string()),
            ("pairs tested".into(), self.pairs_tested.to_string()),
            ("pairs skipped".into(), self.pairs_skipped.to_string()),
            ("seed".into(), self.seed.to_string()),
        ];
        if let Some(c) = &self.certificate {
            let fmt_vals = |v: &[Value]| v.iter().map(Value::to_string).collect::<Vec<_>>().join(", ");
            if let Some(l) = &c.lambda {
                rows.push(("lambda".into(), l.clone()));
            }
            rows.push(("X".into(), dist_json_inline(&c.x)));
            rows.push(("Y".into(), dist_json_inline(&c.y)));
            rows.push(("candidate".into(), dist_json_inline(&c.candidate)));
            rows.push(("reference".into(), dist_json_inline(&c.reference)));
            rows.push(("candidate values".into(), fmt_vals(&c.candidate_values)));
            rows.push(("reference values".into(), fmt_vals(&c.reference_values)));
            rows.push(("comparison".into(), c.comparison.to_string()));
        }
        let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
        rows.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
    }
}

fn dist_json_inline(d: &DistJson) -> String {
    serde_json::to_string(d).expect("dist serializes")
}

fn compare_eps<S: Scalar>(a: &DiscreteDist<S>, b: &DiscreteDist<S>) -> f64 {
    a.eps().max(b.eps()).max(DEFAULT_EPS)
}

struct Search {
    tested: usize,
    skipped: usize,
    certificate: Option<Certificate>,
}

impl Search {
    fn new() -> Self {
        Search { tested: 0, skipped: 0, certificate: None }
    }

    fn finish(self, property: Property, pref: &Preference, cfg: &AuditConfig) -> AuditReport {
        AuditReport {
            schema_version: SCHEMA_VERSION,
            property,
            preference: pref.to_string(),
            verdict: if self.certificate.is_some() { Verdict::Violated } else { Verdict::NoViolationWithinBudget },
            certificate: self.certificate,
            pairs_tested: self.tested,
            pairs_skipped: self.skipped,
            seed: cfg.seed,
            config: cfg.echo(),
        }
    }
}

/// Shifts the `x` coordinate of `j` so that both marginals are equally
/// preferred, if such a shift can be found.
fn equalize<S: Scalar>(pref: &Preference, j: &JointDist<S>) -> Option<JointDist<S>> {
    let x = j.x_marginal();
    let y = j.y_marginal();
    let eps = compare_eps(&x, &y);
    let vy = evaluate_all(pref, &y).ok()?;
    let equal_at = |c: &S| -> bool {
        let shifted = x.shift(c);
        evaluate_all(pref, &shifted)
            .map(|vx| compare_values(pref, &vx, &vy, eps) == ComparisonResult::Equivalent)
            .unwrap_or(false)
    };
    let zero = S::zero();
    if equal_at(&zero) {
        return Some(j.clone());
    }
    let first = &pref.criteria()[0].spec;
    let vx0 = evaluate(first, &x).ok()?;
    // translation-equivariant functionals are matched by the value gap
    if let (Value::Exact(a), Value::Exact(b)) = (&vy[0], &vx0) {
        let c = S::from_rational(&(a - b));
        if equal_at(&c) {
            return Some(j.shift(&c, &zero));
        }
    }
    let xf: DiscreteDist<f64> = x.convert();
    let yf: DiscreteDist<f64> = y.convert();
    let target = evaluate(first, &yf).ok()?.to_f64();
    let h = |c: f64| -> f64 {
        evaluate(first, &xf.shift(&c)).map(|v| v.to_f64() - target).unwrap_or(f64::NAN)
    };
    let span = xf.values().chain(yf.values()).fold(0.0f64, |m, v| m.max(v.abs()));
    let reach = 4.0 * (span + target.abs() + 1.0);
    let n = 96;
    let grid: Vec<f64> = (0..=n).map(|i| -reach + 2.0 * reach * i as f64 / n as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&c| h(c)).collect();
    let mut roots: Vec<f64> = Vec::new();
    for k in 0..n {
        let (mut lo, mut hi) = (grid[k], grid[k + 1]);
        let (flo, fhi) = (vals[k], vals[k + 1]);
        if !(flo.is_finite() && fhi.is_finite()) {
            continue;
        }
        if flo == 0.0 {
            roots.push(lo);
            continue;
        }
        if flo.signum() == fhi.signum() {
            continue;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            let fm = h(mid);
            if !fm.is_finite() {
                break;
            }
            if fm.signum() == flo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    roots.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    for r in roots.into_iter().take(4) {
        let mut candidates: Vec<Rational> = Vec::new();
        if let Some(q) = rational_approx(r, 10_000) {
            candidates.push(q);
        }
        if let Some(q) = Rational::from_float(r) {
            candidates.push(q);
        }
        for q in candidates {
            let c = S::from_rational(&q);
            if equal_at(&c) {
                return Some(j.shift(&c, &zero));
            }
        }
    }
    None
}

fn diversification_in<S: Scalar>(
    pref: &Preference,
    class: PairClass,
    cfg: &AuditConfig,
    property: Property,
    reported: &Preference,
) -> AuditReport {
    let lambdas: Vec<(Rational, S)> = cfg
        .lambda_order()
        .into_iter()
        .map(|l| {
            let s = S::from_rational(&l);
            (l, s)
        })
        .collect();
    let mut search = Search::new();
    'pairs: for j in generate_pairs::<S>(class, cfg) {
        let j = if class.is_id() {
            j
        } else {
            match equalize(pref, &j) {
                Some(j) => j,
                None => {
                    search.skipped += 1;
                    continue;
                }
            }
        };
        debug_assert!(class.contains(&j));
        let x = j.x_marginal();
        let y = j.y_marginal();
        let eps = compare_eps(&x, &y);
        let (vx, vy) = match (evaluate_all(pref, &x), evaluate_all(pref, &y)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => {
                search.skipped += 1;
                continue;
            }
        };
        if compare_values(pref, &vx, &vy, eps) != ComparisonResult::Equivalent {
            search.skipped += 1;
            continue;
        }
        search.tested += 1;
        for (label, lambda) in &lambdas {
            let mix = convex_combine(&j, lambda).expect("lambda in [0,1]");
            let Ok(vm) = evaluate_all(pref, &mix) else { continue };
            let cmp = compare_values(pref, &vm, &vy, eps);
            if !cmp.is_weakly_better() {
                search.certificate = Some(Certificate {
                    preference: pref.to_string(),
                    joint: Some(j.to_json()),
                    lambda: Some(format_rational(label)),
                    x: x.to_json(),
                    y: y.to_json(),
                    candidate: mix.to_json(),
                    reference: y.to_json(),
                    candidate_values: vm,
                    reference_values: vy,
                    comparison: cmp,
                });
                break 'pairs;
            }
        }
    }
    search.finish(property, reported, cfg)
}

fn weak_in<S: Scalar>(pref: &Preference, cfg: &AuditConfig, property: Property, reported: &Preference) -> AuditReport {
    let mut search = Search::new();
    for d in generate::generate_dists::<S>(cfg, property) {
        let m = DiscreteDist::point(d.mean());
        if let Some(c) = test_pair(pref, &m, &d, &mut search) {
            search.certificate = Some(c);
            break;
        }
    }
    search.finish(property, reported, cfg)
}

fn strong_in<S: Scalar>(pref: &Preference, cfg: &AuditConfig, property: Property, reported: &Preference) -> AuditReport {
    let mut search = Search::new();
    for (x, y) in generate_ordered_pairs::<S>(cfg) {
        if !concave_order_geq(&x, &y).is_geq() {
            search.skipped += 1;
            continue;
        }
        if let Some(c) = test_pair(pref, &x, &y, &mut search) {
            search.certificate = Some(c);
            break;
        }
    }
    search.finish(property, reported, cfg)
}

/// Tests that `candidate` is weakly preferred to `reference`.
fn test_pair<S: Scalar>(
    pref: &Preference,
    candidate: &DiscreteDist<S>,
    reference: &DiscreteDist<S>,
    search: &mut Search,
) -> Option<Certificate> {
    let (Ok(vc), Ok(vr)) = (evaluate_all(pref, candidate), evaluate_all(pref, reference)) else {
        search.skipped += 1;
        return None;
    };
    search.tested += 1;
    let cmp = compare_values(pref, &vc, &vr, compare_eps(candidate, reference));
    if cmp.is_weakly_better() {
        return None;
    }
    Some(Certificate {
        preference: pref.to_string(),
        joint: None,
        lambda: None,
        x: candidate.to_json(),
        y: reference.to_json(),
        candidate: candidate.to_json(),
        reference: reference.to_json(),
        candidate_values: vc,
        reference_values: vr,
        comparison: cmp,
    })
}

fn run_in<S: Scalar>(pref: &Preference, property: Property, cfg: &AuditConfig) -> AuditReport {
    let rev = pref.reversed();
    match property {
        Property::WeakRiskAversion => weak_in::<S>(pref, cfg, property, pref),
        Property::WeakRiskSeeking => weak_in::<S>(&rev, cfg, property, pref),
        Property::StrongRiskAversion => strong_in::<S>(pref, cfg, property, pref),
        Property::StrongRiskSeeking => strong_in::<S>(&rev, cfg, property, pref),
        Property::Diversification(c) => diversification_in::<S>(pref, c, cfg, property, pref),
        Property::AntiDiversification(c) => diversification_in::<S>(&rev, c, cfg, property, pref),
    }
}

/// Runs the search for `property` in the configured numeric mode.
pub fn check(pref: &Preference, property: Property, cfg: &AuditConfig) -> AuditReport {
    match cfg.mode {
        NumericMode::ExactRational => run_in::<Rational>(pref, property, cfg),
        NumericMode::Float { .. } => run_in::<f64>(pref, property, cfg),
    }
}

pub fn check_diversification(pref: &Preference, class: PairClass, cfg: &AuditConfig) -> AuditReport {
    check(pref, Property::Diversification(class), cfg)
}

pub fn check_anti_diversification(pref: &Preference, class: PairClass, cfg: &AuditConfig) -> AuditReport {
    check(pref, Property::AntiDiversification(class), cfg)
}

pub fn check_weak_risk_aversion(pref: &Preference, cfg: &AuditConfig) -> AuditReport {
    check(pref, Property::WeakRiskAversion, cfg)
}

pub fn check_weak_risk_seeking(pref: &Preference, cfg: &AuditConfig) -> AuditReport {
    check(pref, Property::WeakRiskSeeking, cfg)
}

pub fn check_strong_risk_aversion(pref: &Preference, cfg: &AuditConfig) -> AuditReport {
    check(pref, Property::StrongRiskAversion, cfg)
}

pub fn check_strong_risk_seeking(pref: &Preference, cfg: &AuditConfig) -> AuditReport {
    check(pref, Property::StrongRiskSeeking, cfg)
}

fn values_match(recorded: &[Value], fresh: &[Value], eps: f64) -> bool {
    recorded.len() == fresh.len()
        && recorded.iter().zip(fresh).all(|(a, b)| match (a, b) {
            (Value::Exact(p), Value::Exact(q)) => p == q,
            _ => a.cmp_eps(b, eps) == std::cmp::Ordering::Equal,
        })
}

fn verify_in<S: Scalar>(property: Property, cert: &Certificate) -> Result<(), String> {
    let pref = parse_preference(&cert.preference).map_err(|e| e.to_string())?;
    let load = |d: &DistJson, what: &str| {
        DiscreteDist::<S>::from_json(d).map_err(|e| format!("certificate {what}: {e}"))
    };
    let candidate = load(&cert.candidate, "candidate")?;
    let reference = load(&cert.reference, "reference")?;
    let x = load(&cert.x, "x")?;
    let y = load(&cert.y, "y")?;
    match property {
        Property::Diversification(class) | Property::AntiDiversification(class) => {
            let jj = cert.joint.as_ref().ok_or("certificate has no joint law")?;
            let j = JointDist::<S>::from_json(jj).map_err(|e| format!("certificate joint: {e}"))?;
            if !class.contains(&j) {
                return Err(format!("joint law is not in class {class}"));
            }
            if !j.x_marginal().same_law(&x) || !j.y_marginal().same_law(&y) {
                return Err("marginals do not match the joint law".into());
            }
            let eps = compare_eps(&x, &y);
            let vx = evaluate_all(&pref, &x).map_err(|e| e.to_string())?;
            let vy = evaluate_all(&pref, &y).map_err(|e| e.to_string())?;
            if compare_values(&pref, &vx, &vy, eps) != ComparisonResult::Equivalent {
                return Err("the two components are not equally preferred".into());
            }
            let lit = cert.lambda.as_ref().ok_or("certificate has no lambda")?;
            let lambda = parse_rational(lit).map_err(|e| e.to_string())?;
            let mix = convex_combine(&j, &S::from_rational(&lambda)).map_err(|e| e.to_string())?;
            if !mix.same_law(&candidate) || !y.same_law(&reference) {
                return Err("candidate is not the recorded mixture".into());
            }
        }
        Property::WeakRiskAversion | Property::WeakRiskSeeking => {
            if !candidate.same_law(&DiscreteDist::point(reference.mean())) {
                return Err("candidate is not the point mass at the mean".into());
            }
        }
        Property::StrongRiskAversion | Property::StrongRiskSeeking => {
            if !concave_order_geq(&candidate, &reference).is_geq() {
                return Err("candidate does not dominate the reference in the concave order".into());
            }
        }
    }
    let eps = compare_eps(&candidate, &reference);
    let vc = evaluate_all(&pref, &candidate).map_err(|e| e.to_string())?;
    let vr = evaluate_all(&pref, &reference).map_err(|e| e.to_string())?;
    if !values_match(&cert.candidate_values, &vc, eps) || !values_match(&cert.reference_values, &vr, eps) {
        return Err("recorded functional values do not reproduce".into());
    }
    let cmp = compare_values(&pref, &vc, &vr, eps);
    if cmp != cert.comparison {
        return Err(format!("comparison reproduces as {cmp}, recorded {}", cert.comparison));
    }
    if cmp.is_weakly_better() {
        return Err("candidate is weakly preferred; nothing is violated".into());
    }
    Ok(())
}

/// Re-checks a violation certificate from its serialized content alone.
pub fn verify_certificate(property: Property, cert: &Certificate, mode: NumericMode) -> Result<(), String> {
    match mode {
        NumericMode::ExactRational => verify_in::<Rational>(property, cert),
        NumericMode::Float { .. } => verify_in::<f64>(property, cert),
    }
}

impl AuditReport {
    /// `Ok` for clean verdicts; for violations, re-verifies the certificate.
    pub fn verify(&self) -> Result<(), String> {
        match (&self.verdict, &self.certificate) {
            (Verdict::NoViolationWithinBudget, None) => Ok(()),
            (Verdict::Violated, Some(c)) => verify_certificate(self.property, c, self.config.mode),
            _ => Err("certificate must be present exactly when the verdict is violated".into()),
        }
    }
}
