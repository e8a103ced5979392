//! Built-in preferences with the verdicts the audit is expected to reach.
//!
//! A profile only asserts what is both true and reachable by the seeded
//! search; everything else is `Unspecified` and reported without judgement.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{parse_preference, Functional, Preference};
use crate::audit::{PairClass, Property};
use crate::scalar::int;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Holds,
    Fails,
    Unspecified,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExpectedProfile {
    cells: BTreeMap<Property, Expectation>,
}

impl ExpectedProfile {
    pub fn get(&self, p: Property) -> Expectation {
        self.cells.get(&p).copied().unwrap_or(Expectation::Unspecified)
    }

    fn set(mut self, props: impl IntoIterator<Item = Property>, e: Expectation) -> Self {
        for p in props {
            self.cells.insert(p, e);
        }
        self
    }

    fn holds(self, props: impl IntoIterator<Item = Property>) -> Self {
        self.set(props, Expectation::Holds)
    }

    fn fails(self, props: impl IntoIterator<Item = Property>) -> Self {
        self.set(props, Expectation::Fails)
    }
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub preference: Preference,
    pub profile: ExpectedProfile,
}

use PairClass::*;
use Property::*;

fn div(classes: &[PairClass]) -> Vec<Property> {
    classes.iter().map(|&c| Diversification(c)).collect()
}

fn anti(classes: &[PairClass]) -> Vec<Property> {
    classes.iter().map(|&c| AntiDiversification(c)).collect()
}

fn entry(name: &'static str, pref: &str, profile: ExpectedProfile) -> CatalogEntry {
    let preference = parse_preference(pref).unwrap_or_else(|e| panic!("catalog entry {name}: {e}"));
    for c in preference.criteria() {
        check_dual_weights(name, &c.spec);
    }
    CatalogEntry { name, preference, profile }
}

/// Dual weights in the catalog must be increasing on `[0,1]`.
fn check_dual_weights(name: &str, f: &Functional) {
    use Functional::*;
    match f {
        Dual(g) => assert!(
            g.is_increasing_on(&int(0), &int(1), 64),
            "catalog entry {name}: dual weight {g} is not increasing on [0,1]"
        ),
        Neg(a) | Abs(a) | Pow(a, _) => check_dual_weights(name, a),
        Sum(a, b) | Product(a, b) | Quotient(a, b) => {
            check_dual_weights(name, a);
            check_dual_weights(name, b);
        }
        _ => {}
    }
}

const ALL_CLASSES: [PairClass; 8] = PairClass::ALL;
const ID_CLASSES: [PairClass; 4] = [AmAndId, InAndId, Id, Exchangeable];

pub fn catalog() -> Vec<CatalogEntry> {
    let risk_neutral = [WeakRiskAversion, WeakRiskSeeking, StrongRiskAversion, StrongRiskSeeking];
    vec![
        // Dual utility with increasing weight: affine on comonotonic pairs,
        // convex in general, strongly risk seeking.
        entry(
            "DualIncreasing",
            "total(dual(2*t), higher)",
            ExpectedProfile::default()
                .holds([WeakRiskSeeking, StrongRiskSeeking])
                .fails([WeakRiskAversion, StrongRiskAversion])
                .holds(div(&[Comonotonic]))
                .fails(div(&[All, Id, Antimonotonic, AmAndId, Independent, InAndId, Exchangeable]))
                .holds(anti(&ALL_CLASSES)),
        ),
        // max(λX+(1-λ)Y) = max X when X, Y are independent or comonotonic.
        entry(
            "EssSup",
            "total(esssup, higher)",
            ExpectedProfile::default()
                .holds([WeakRiskSeeking, StrongRiskSeeking])
                .fails([WeakRiskAversion, StrongRiskAversion])
                .holds(div(&[Independent, InAndId, Comonotonic]))
                .fails(div(&[All, Id, Antimonotonic, AmAndId, Exchangeable]))
                .holds(anti(&ALL_CLASSES)),
        ),
        // Equal mean and variance: the mix never has larger variance.
        entry(
            "MeanVariancePareto",
            "pareto([(mean, higher), (var, lower)])",
            ExpectedProfile::default()
                .holds([WeakRiskAversion, StrongRiskAversion])
                .fails([WeakRiskSeeking, StrongRiskSeeking])
                .holds(div(&ALL_CLASSES))
                .fails(anti(&[All, Id, Antimonotonic, AmAndId, Independent, InAndId, Exchangeable])),
        ),
        entry(
            "WeirdVar",
            "total(mean - var*abs(2 - var), higher)",
            ExpectedProfile::default()
                .holds([WeakRiskAversion])
                .fails([WeakRiskSeeking, StrongRiskAversion, StrongRiskSeeking])
                .fails(div(&ALL_CLASSES))
                .fails(anti(&[All, Id, Antimonotonic, AmAndId, Independent, InAndId, Exchangeable])),
        ),
        entry(
            "MeanVarQuarter",
            "total(mean - pow(var, 1/4), higher)",
            ExpectedProfile::default()
                .holds([WeakRiskAversion, StrongRiskAversion])
                .fails([WeakRiskSeeking, StrongRiskSeeking])
                .holds(div(&ID_CLASSES))
                .fails(div(&[All, Antimonotonic, Independent, Comonotonic]))
                .fails(anti(&[All, Id, Antimonotonic, AmAndId, Independent, InAndId, Exchangeable])),
        ),
        // Lower is better; log-convexity of the moment generating function
        // gives weak risk aversion and diversification on independent pairs.
        entry(
            "ExpRatio",
            "total(expmom(2) / expmom(1), lower)",
            ExpectedProfile::default()
                .holds([WeakRiskAversion])
                .fails([WeakRiskSeeking, StrongRiskAversion, StrongRiskSeeking])
                .holds(div(&[Independent, InAndId]))
                .fails(anti(&[All, Id, Antimonotonic, AmAndId, Independent, InAndId, Exchangeable])),
        ),
        entry(
            "MeanOnly",
            "total(mean, higher)",
            ExpectedProfile::default().holds(risk_neutral).holds(div(&ALL_CLASSES)).holds(anti(&ALL_CLASSES)),
        ),
        // Depends on the mean only through its square, so X and -X tie.
        entry(
            "MeanSquared",
            "total(pow(mean, 2), higher)",
            ExpectedProfile::default()
                .holds(risk_neutral)
                .holds(div(&ID_CLASSES))
                .fails(div(&[All, Antimonotonic, Independent, Comonotonic]))
                .holds(anti(&ALL_CLASSES)),
        ),
    ]
}

pub fn catalog_entry(name: &str) -> Option<CatalogEntry> {
    catalog().into_iter().find(|e| e.name.eq_ignore_ascii_case(name))
}
