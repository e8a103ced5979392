//! Runs every property for every catalog preference and checks the verdicts
//! against the expected profiles and the cross-property implications.

use serde::{Deserialize, Serialize};

use super::{check, AuditConfig, AuditReport, PairClass, Property, Verdict};
use crate::functionals::{catalog, Expectation};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixCell {
    pub property: Property,
    pub expected: Expectation,
    pub verdict: Verdict,
    pub matches: bool,
    pub report: AuditReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixRow {
    pub name: String,
    pub preference: String,
    pub cells: Vec<MatrixCell>,
}

impl MatrixRow {
    pub fn cell(&self, p: Property) -> Option<&MatrixCell> {
        self.cells.iter().find(|c| c.property == p)
    }

    fn passes(&self, p: Property) -> Option<bool> {
        self.cell(p).map(|c| c.verdict == Verdict::NoViolationWithinBudget)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyCheck {
    pub name: String,
    /// `false` marks rows that are reported but never fail the matrix.
    pub enforced: bool,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixReport {
    pub schema_version: u32,
    pub seed: u64,
    pub pair_budget: usize,
    pub rows: Vec<MatrixRow>,
    pub consistency: Vec<ConsistencyCheck>,
    pub mismatches: Vec<String>,
    pub passed: bool,
}

fn matches(expected: Expectation, verdict: Verdict) -> bool {
    match expected {
        Expectation::Holds => verdict == Verdict::NoViolationWithinBudget,
        Expectation::Fails => verdict == Verdict::Violated,
        Expectation::Unspecified => true,
    }
}

fn consistency(rows: &[MatrixRow]) -> Vec<ConsistencyCheck> {
    let mut out = Vec::new();
    for row in rows {
        // diversification on AM&ID forces weak risk aversion
        let div_am_id = row.passes(Property::Diversification(PairClass::AmAndId));
        let weak_ra = row.passes(Property::WeakRiskAversion);
        let ok = !(div_am_id == Some(true) && weak_ra == Some(false));
        out.push(ConsistencyCheck {
            name: format!("{}: div_AM&ID => weak_RA", row.name),
            enforced: true,
            passed: ok,
            detail: format!("div_AM&ID passes: {div_am_id:?}, weak_RA passes: {weak_ra:?}"),
        });
        // strong risk aversion forces diversification on ID and EX
        let strong = row.passes(Property::StrongRiskAversion);
        let id = row.passes(Property::Diversification(PairClass::Id));
        let ex = row.passes(Property::Diversification(PairClass::Exchangeable));
        let ok = strong != Some(true) || (id == Some(true) && ex == Some(true));
        out.push(ConsistencyCheck {
            name: format!("{}: strong_RA => div_ID, div_EX", row.name),
            enforced: true,
            passed: ok,
            detail: format!("strong_RA passes: {strong:?}, div_ID passes: {id:?}, div_EX passes: {ex:?}"),
        });
        // needs a continuity assumption with no finite analogue: report only
        let in_id = row.passes(Property::Diversification(PairClass::InAndId));
        out.push(ConsistencyCheck {
            name: format!("{}: div_IN&ID => weak_RA", row.name),
            enforced: false,
            passed: !(in_id == Some(true) && weak_ra == Some(false)),
            detail: format!("consistency-checked only; div_IN&ID passes: {in_id:?}, weak_RA passes: {weak_ra:?}"),
        });
    }
    out
}

pub fn implication_matrix(cfg: &AuditConfig) -> MatrixReport {
    let mut rows = Vec::new();
    let mut mismatches = Vec::new();
    for entry in catalog() {
        let mut cells = Vec::new();
        for property in Property::all() {
            let report = check(&entry.preference, property, cfg);
            let expected = entry.profile.get(property);
            let ok = matches(expected, report.verdict);
            if !ok {
                let evidence = match &report.certificate {
                    Some(c) => serde_json::to_string(c).expect("certificate serializes"),
                    None => format!("no violation among {} tested pairs", report.pairs_tested),
                };
                mismatches.push(format!(
                    "{} {}: expected {:?}, got {} ({evidence})",
                    entry.name, property, expected, report.verdict
                ));
            }
            cells.push(MatrixCell { property, expected, verdict: report.verdict, matches: ok, report });
        }
        rows.push(MatrixRow { name: entry.name.to_string(), preference: entry.preference.to_string(), cells });
    }
    let consistency = consistency(&rows);
    for c in consistency.iter().filter(|c| c.enforced && !c.passed) {
        mismatches.push(format!("consistency {} failed: {}", c.name, c.detail));
    }
    MatrixReport {
        schema_version: super::SCHEMA_VERSION,
        seed: cfg.seed,
        pair_budget: cfg.pair_budget,
        passed: mismatches.is_empty(),
        rows,
        consistency,
        mismatches,
    }
}

impl MatrixReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("matrix serializes")
    }

    /// One line per preference; `+` no violation, `x` violated, `!` marks a
    /// cell that disagrees with its expectation.
    pub fn render_table(&self) -> String {
        let props = Property::all();
        let name_w = self.rows.iter().map(|r| r.name.len()).max().unwrap_or(4).max(10);
        let widths: Vec<usize> = props.iter().map(|p| p.name().len().max(2)).collect();
        let mut out = format!("{:<name_w$}", "preference");
        for (p, w) in props.iter().zip(&widths) {
            out.push_str(&format!(" {:>w$}", p.name()));
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!("{:<name_w$}", row.name));
            for (p, w) in props.iter().zip(&widths) {
                let mark = match row.cell(*p) {
                    Some(c) => {
                        let base = if c.verdict == Verdict::Violated { "x" } else { "+" };
                        if c.matches {
                            base.to_string()
                        } else {
                            format!("{base}!")
                        }
                    }
                    None => "?".into(),
                };
                out.push_str(&format!(" {mark:>w$}"));
            }
            out.push('\n');
        }
        for c in &self.consistency {
            let status = match (c.passed, c.enforced) {
                (true, _) => "ok",
                (false, true) => "FAILED",
                (false, false) => "note",
            };
            out.push_str(&format!("{status:<6} {} ({})\n", c.name, c.detail));
        }
        out.push_str(if self.passed { "matrix: pass\n" } else { "matrix: FAIL\n" });
        for m in &self.mismatches {
            out.push_str(&format!("  {m}\n"));
        }
        out
    }
}
