use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{evaluate, EvalError, Functional};
use crate::dist::DiscreteDist;
use crate::scalar::{Scalar, Value, DEFAULT_EPS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Higher,
    Lower,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Higher => Direction::Lower,
            Direction::Lower => Direction::Higher,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Higher => "higher",
            Direction::Lower => "lower",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Criterion {
    pub spec: Functional,
    pub direction: Direction,
}

/// A transitive preference: one functional, or the Pareto order of several.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Preference {
    Total(Criterion),
    Pareto(Vec<Criterion>),
}

impl Preference {
    pub fn total(spec: Functional, direction: Direction) -> Self {
        Preference::Total(Criterion { spec, direction })
    }

    pub fn criteria(&self) -> &[Criterion] {
        match self {
            Preference::Total(c) => std::slice::from_ref(c),
            Preference::Pareto(cs) => cs,
        }
    }

    /// The opposite preference: `X >= Y` here iff `Y >= X` in `self`.
    pub fn reversed(&self) -> Self {
        let flip = |c: &Criterion| Criterion { spec: c.spec.clone(), direction: c.direction.flip() };
        match self {
            Preference::Total(c) => Preference::Total(flip(c)),
            Preference::Pareto(cs) => Preference::Pareto(cs.iter().map(flip).collect()),
        }
    }
}

impl fmt::Display for Preference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preference::Total(c) => write!(f, "total({}, {})", c.spec, c.direction),
            Preference::Pareto(cs) => {
                f.write_str("pareto([")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "({}, {})", c.spec, c.direction)?;
                }
                f.write_str("])")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonResult {
    StrictlyBetter,
    StrictlyWorse,
    Equivalent,
    Incomparable,
}

impl ComparisonResult {
    /// `X >= Y` holds.
    pub fn is_weakly_better(self) -> bool {
        matches!(self, ComparisonResult::StrictlyBetter | ComparisonResult::Equivalent)
    }

    pub fn swap(self) -> Self {
        match self {
            ComparisonResult::StrictlyBetter => ComparisonResult::StrictlyWorse,
            ComparisonResult::StrictlyWorse => ComparisonResult::StrictlyBetter,
            other => other,
        }
    }
}

impl fmt::Display for ComparisonResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComparisonResult::StrictlyBetter => "strictly_better",
            ComparisonResult::StrictlyWorse => "strictly_worse",
            ComparisonResult::Equivalent => "equivalent",
            ComparisonResult::Incomparable => "incomparable",
        })
    }
}

pub fn evaluate_all<S: Scalar>(pref: &Preference, d: &DiscreteDist<S>) -> Result<Vec<Value>, EvalError> {
    pref.criteria().iter().map(|c| evaluate(&c.spec, d)).collect()
}

/// Compares precomputed criterion values of `X` (`vx`) and `Y` (`vy`).
/// Inexact values closer than `eps` count as equal.
pub fn compare_values(pref: &Preference, vx: &[Value], vy: &[Value], eps: f64) -> ComparisonResult {
    let (mut better, mut worse) = (false, false);
    for ((c, a), b) in pref.criteria().iter().zip(vx).zip(vy) {
        let ord = match c.direction {
            Direction::Higher => a.cmp_eps(b, eps),
            Direction::Lower => b.cmp_eps(a, eps),
        };
        match ord {
            Ordering::Greater => better = true,
            Ordering::Less => worse = true,
            Ordering::Equal => {}
        }
    }
    match (better, worse) {
        (false, false) => ComparisonResult::Equivalent,
        (true, false) => ComparisonResult::StrictlyBetter,
        (false, true) => ComparisonResult::StrictlyWorse,
        (true, true) => ComparisonResult::Incomparable,
    }
}

pub fn compare<S: Scalar>(
    pref: &Preference,
    dx: &DiscreteDist<S>,
    dy: &DiscreteDist<S>,
) -> Result<ComparisonResult, EvalError> {
    let eps = dx.eps().max(dy.eps()).max(DEFAULT_EPS);
    Ok(compare_values(pref, &evaluate_all(pref, dx)?, &evaluate_all(pref, dy)?, eps))
}
