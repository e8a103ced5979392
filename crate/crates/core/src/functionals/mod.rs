//! Law-invariant functionals, their text syntax, and preferences built on them.
//!
//! Grammar of the functional language:
//!
//! ```text
//! expr   := term {("+" | "-") term}
//! term   := factor {("*" | "/") factor}
//! factor := number | "mean" | "var" | "esssup" | "essinf"
//!         | "quantile(" number ")" | "stoploss(" number ")" | "expmom(" number ")"
//!         | "eu(" pw ")" | "dual(" pw ")" | "abs(" expr ")" | "pow(" expr "," number ")"
//!         | "-" factor | "(" expr ")"
//! pw     := poly {"|" number "|" poly}
//! ```
//!
//! Numbers are written without inner spaces (`2/3`, `-1.5`, `4`), so `2/3`
//! is one literal while `2 / 3` is a quotient. Polynomials use the variable
//! `x` or `t`, e.g. `1/2*t^2 - t + 3`. In `pw`, the polynomial after a
//! breakpoint applies from that breakpoint on.
//!
//! Preferences: `total(<expr>, higher|lower)` or
//! `pareto([(<expr>, higher|lower), ...])`.

mod catalog;
mod eval;
mod parse;
mod piecewise;
mod preference;

use std::fmt;

use thiserror::Error;

use crate::scalar::Rational;

pub use catalog::{catalog, catalog_entry, CatalogEntry, Expectation, ExpectedProfile};
pub use eval::evaluate;
pub use parse::{parse_functional, parse_preference, ParseError};
pub use piecewise::{Piecewise, Poly};
pub use preference::{compare, compare_values, evaluate_all, ComparisonResult, Criterion, Direction, Preference};

/// Syntax tree of a law-invariant functional. Subtraction is `Sum(a, Neg(b))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Functional {
    Mean,
    Var,
    EssSup,
    EssInf,
    Quantile(Rational),
    StopLoss(Rational),
    ExpMoment(Rational),
    /// Expected utility `E[u(X)]`.
    Eu(Piecewise),
    /// Dual utility `∫ g(t) Q_X(t) dt` over `(0,1)`.
    Dual(Piecewise),
    Const(Rational),
    Neg(Box<Functional>),
    Abs(Box<Functional>),
    Pow(Box<Functional>, Rational),
    Sum(Box<Functional>, Box<Functional>),
    Product(Box<Functional>, Box<Functional>),
    Quotient(Box<Functional>, Box<Functional>),
}

impl Functional {
    pub fn sub(a: Functional, b: Functional) -> Functional {
        Functional::Sum(Box::new(a), Box::new(Functional::Neg(Box::new(b))))
    }

    pub fn add(a: Functional, b: Functional) -> Functional {
        Functional::Sum(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Functional, b: Functional) -> Functional {
        Functional::Product(Box::new(a), Box::new(b))
    }

    pub fn div(a: Functional, b: Functional) -> Functional {
        Functional::Quotient(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Functional, e: Rational) -> Functional {
        Functional::Pow(Box::new(a), e)
    }

    pub fn abs(a: Functional) -> Functional {
        Functional::Abs(Box::new(a))
    }

    /// Short node label used in error messages.
    pub fn label(&self) -> String {
        match self {
            Functional::Sum(..) => "sum".into(),
            Functional::Product(..) => "product".into(),
            Functional::Quotient(..) => "quotient".into(),
            Functional::Neg(_) => "negation".into(),
            other => other.to_string(),
        }
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&parse::render(self))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("cannot evaluate {node}: {reason}")]
pub struct EvalError {
    pub node: String,
    pub reason: String,
}
