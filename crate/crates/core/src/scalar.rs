//! Numeric backends.
//!
//! Every distribution is generic over a [`Scalar`]. Two backends exist:
//! [`Rational`] (arbitrary precision, exact comparisons) and `f64`
//! (comparisons and atom merging within a tolerance).
//!
//! Functional values are carried as [`Value`], which stays exact as long as
//! every operation feeding it is rational and falls back to `f64` otherwise
//! (irrational roots, exponentials).

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Rational = num_rational::BigRational;

/// Merge/compare tolerance used by the float backend unless overridden.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Tolerance on the total mass of a float distribution.
pub const FLOAT_MASS_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LiteralError {
    #[error("cannot parse number literal {0:?}")]
    Malformed(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("non-integer JSON number {0} in exact mode; write it as a \"p/q\" string")]
    InexactNumber(String),
    #[error("non-finite number {0}")]
    NonFinite(String),
}

/// Number as it appears in JSON files: either a bare JSON number or a string
/// literal such as `"2/3"`, `"-1.5"` or `"4"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumLiteral {
    Number(serde_json::Number),
    Text(String),
}

/// Parses `"p/q"`, integers and finite decimals into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, LiteralError> {
    let s = text.trim();
    let bad = || LiteralError::Malformed(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_decimal(num.trim()).ok_or_else(bad)?;
        let d = parse_decimal(den.trim()).ok_or_else(bad)?;
        if d.is_zero() {
            return Err(LiteralError::ZeroDenominator(text.to_string()));
        }
        return Ok(n / d);
    }
    parse_decimal(s).ok_or_else(bad)
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    if body.is_empty() {
        return None;
    }
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer = BigInt::parse_bytes(if digits.is_empty() { b"0" } else { digits.as_bytes() }, 10)?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let r = Rational::new(numer, denom);
    Some(if neg { -r } else { r })
}

/// Canonical text form of a rational: `"3"`, `"-2/3"`.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Closest rational with denominator at most `max_den` (continued fractions).
pub fn rational_approx(x: f64, max_den: u64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let neg = x < 0.0;
    let mut v = x.abs();
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let limit = BigInt::from(max_den);
    for _ in 0..64 {
        let a = v.floor();
        let ai = BigInt::from_f64(a)?;
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        if k2 > limit {
            break;
        }
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let frac = v - a;
        if frac < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    if k1.is_zero() {
        return None;
    }
    let r = Rational::new(h1, k1);
    Some(if neg { -r } else { r })
}

/// Arithmetic backend for distributions.
pub trait Scalar:
    Num + Signed + Clone + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// `true` for the rational backend.
    const EXACT: bool;

    /// Default tolerance for distributions built in this backend.
    fn default_eps() -> f64;
    fn from_rational(r: &Rational) -> Self;
    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn to_value(&self) -> Value;
    fn is_finite(&self) -> bool;

    /// Equality up to `eps` (exact equality for the rational backend).
    fn close(&self, other: &Self, eps: f64) -> bool;

    fn to_literal(&self) -> NumLiteral;
    fn from_literal(lit: &NumLiteral) -> Result<Self, LiteralError>;

    /// Three-way comparison treating `close` values as equal.
    fn cmp_eps(&self, other: &Self, eps: f64) -> Ordering {
        if self.close(other, eps) {
            Ordering::Equal
        } else if self < other {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }

    /// `self >= other` up to tolerance.
    fn ge_eps(&self, other: &Self, eps: f64) -> bool {
        self.cmp_eps(other, eps) != Ordering::Less
    }

    fn half() -> Self {
        Self::one() / (Self::one() + Self::one())
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn default_eps() -> f64 {
        0.0
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn to_value(&self) -> Value {
        Value::Exact(self.clone())
    }
    fn is_finite(&self) -> bool {
        true
    }
    fn close(&self, other: &Self, _eps: f64) -> bool {
        self == other
    }
    fn to_literal(&self) -> NumLiteral {
        NumLiteral::Text(format_rational(self))
    }
    fn from_literal(lit: &NumLiteral) -> Result<Self, LiteralError> {
        match lit {
            NumLiteral::Text(s) => parse_rational(s),
            NumLiteral::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Rational::from_integer(BigInt::from(i)))
                } else if let Some(u) = n.as_u64() {
                    Ok(Rational::from_integer(BigInt::from(u)))
                } else {
                    Err(LiteralError::InexactNumber(n.to_string()))
                }
            }
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn default_eps() -> f64 {
        DEFAULT_EPS
    }
    fn from_rational(r: &Rational) -> Self {
        Scalar::to_f64(r)
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_value(&self) -> Value {
        Value::Approx(*self)
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn close(&self, other: &Self, eps: f64) -> bool {
        (self - other).abs() <= eps
    }
    fn to_literal(&self) -> NumLiteral {
        match serde_json::Number::from_f64(*self) {
            Some(n) => NumLiteral::Number(n),
            None => NumLiteral::Text(self.to_string()),
        }
    }
    fn from_literal(lit: &NumLiteral) -> Result<Self, LiteralError> {
        let v = match lit {
            NumLiteral::Number(n) => n.as_f64().ok_or_else(|| LiteralError::Malformed(n.to_string()))?,
            NumLiteral::Text(s) => Scalar::to_f64(&parse_rational(s)?),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(LiteralError::NonFinite(v.to_string()))
        }
    }
}

/// Which backend a computation runs in.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum NumericMode {
    ExactRational,
    Float { eps: f64 },
}

impl Default for NumericMode {
    fn default() -> Self {
        NumericMode::ExactRational
    }
}

impl NumericMode {
    pub fn float() -> Self {
        NumericMode::Float { eps: DEFAULT_EPS }
    }

    /// Comparison tolerance; zero in exact mode.
    pub fn eps(&self) -> f64 {
        match self {
            NumericMode::ExactRational => 0.0,
            NumericMode::Float { eps } => *eps,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        match self {
            NumericMode::Float { eps } if !(*eps > 0.0 && eps.is_finite()) => {
                Err(format!("float tolerance must be positive, got {eps}"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ValueError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0}")]
    Domain(String),
}

/// Result of evaluating a functional: exact when every step was rational.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(Rational),
    Approx(f64),
}

impl Value {
    pub fn from_i64(v: i64) -> Self {
        Value::Exact(Rational::from_integer(BigInt::from(v)))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Approx(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => Scalar::to_f64(r),
            Value::Approx(x) => *x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Exact(r) => r.is_zero(),
            Value::Approx(x) => *x == 0.0,
        }
    }

    fn lift(
        &self,
        other: &Value,
        exact: impl Fn(&Rational, &Rational) -> Rational,
        approx: impl Fn(f64, f64) -> f64,
    ) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(exact(a, b)),
            _ => Value::Approx(approx(self.to_f64(), other.to_f64())),
        }
    }

    pub fn add(&self, other: &Value) -> Value {
        self.lift(other, |a, b| a + b, |a, b| a + b)
    }

    pub fn sub(&self, other: &Value) -> Value {
        self.lift(other, |a, b| a - b, |a, b| a - b)
    }

    pub fn mul(&self, other: &Value) -> Value {
        self.lift(other, |a, b| a * b, |a, b| a * b)
    }

    pub fn div(&self, other: &Value) -> Result<Value, ValueError> {
        if other.is_zero() {
            return Err(ValueError::DivisionByZero);
        }
        Ok(self.lift(other, |a, b| a / b, |a, b| a / b))
    }

    pub fn neg(&self) -> Value {
        match self {
            Value::Exact(r) => Value::Exact(-r),
            Value::Approx(x) => Value::Approx(-x),
        }
    }

    pub fn abs(&self) -> Value {
        match self {
            Value::Exact(r) => Value::Exact(r.abs()),
            Value::Approx(x) => Value::Approx(x.abs()),
        }
    }

    /// `self^exponent`, exact whenever the result is rational.
    pub fn pow(&self, exponent: &Rational) -> Result<Value, ValueError> {
        let num = exponent.numer();
        let den = exponent.denom();
        if self.is_zero() && exponent.is_negative() {
            return Err(ValueError::DivisionByZero);
        }
        if !den.is_one() && self.to_f64() < 0.0 {
            return Err(ValueError::Domain(format!(
                "fractional power {} of negative base {}",
                format_rational(exponent),
                self
            )));
        }
        if let Value::Exact(base) = self {
            if let (Some(p), Some(q)) = (num.to_i32(), den.to_u32()) {
                if let Some(root) = exact_root(base, q) {
                    let powered = if p >= 0 {
                        num_traits::pow(root, p as usize)
                    } else {
                        num_traits::pow(root.recip(), p.unsigned_abs() as usize)
                    };
                    return Ok(Value::Exact(powered));
                }
            }
        }
        let e = Scalar::to_f64(exponent);
        Ok(Value::Approx(self.to_f64().powf(e)))
    }

    /// Three-way comparison; values within `eps` are equal unless both are exact.
    pub fn cmp_eps(&self, other: &Value, eps: f64) -> Ordering {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => a.cmp(b),
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                if (a - b).abs() <= eps {
                    Ordering::Equal
                } else if a < b {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
        }
    }
}

/// Rational `q`-th root of a nonnegative rational when it exists.
fn exact_root(base: &Rational, q: u32) -> Option<Rational> {
    if q == 1 {
        return Some(base.clone());
    }
    if base.is_negative() {
        return None;
    }
    let n = base.numer().nth_root(q);
    let d = base.denom().nth_root(q);
    if num_traits::pow(n.clone(), q as usize) == *base.numer()
        && num_traits::pow(d.clone(), q as usize) == *base.denom()
    {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(r) => f.write_str(&format_rational(r)),
            Value::Approx(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Value {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> Result<Ser::Ok, Ser::Error> {
        match self {
            Value::Exact(r) => s.serialize_str(&format_rational(r)),
            Value::Approx(x) => s.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match NumLiteral::deserialize(d)? {
            NumLiteral::Text(s) => parse_rational(&s).map(Value::Exact).map_err(serde::de::Error::custom),
            NumLiteral::Number(n) => n
                .as_f64()
                .map(Value::Approx)
                .ok_or_else(|| serde::de::Error::custom("bad number")),
        }
    }
}

/// Shorthand for building rationals in code and tests: `rat(2, 3)`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}
