//! Finite-support distributions.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{LiteralError, NumLiteral, Scalar, FLOAT_MASS_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistError {
    #[error("distribution has no atoms with positive probability")]
    Empty,
    #[error("negative probability {prob} at value {value}")]
    NegativeProbability { value: String, prob: String },
    #[error("probabilities sum to {0}, expected 1")]
    BadTotal(String),
    #[error("non-finite atom value or probability")]
    NonFinite,
    #[error("quantile level {0} outside (0,1)")]
    QuantileDomain(String),
    #[error("exp moment overflows at atom {value} (a = {a})")]
    Overflow { value: String, a: f64 },
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Literal(#[from] LiteralError),
    #[error("malformed distribution JSON: {0}")]
    Json(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Atom<S> {
    pub value: S,
    pub prob: S,
}

/// Law of a bounded payoff with finitely many values.
///
/// Values are strictly increasing, probabilities strictly positive and sum
/// to one (exactly for [`crate::Rational`], within `1e-12` for `f64`).
/// In float mode values closer than `eps` are merged into their
/// probability-weighted mean.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteDist<S> {
    atoms: Vec<Atom<S>>,
    eps: f64,
}

impl<S: Scalar> DiscreteDist<S> {
    /// Validating constructor. Duplicate values are merged, zero-probability
    /// atoms dropped.
    pub fn new(pairs: impl IntoIterator<Item = (S, S)>) -> Result<Self, DistError> {
        Self::with_tolerance(pairs, S::default_eps())
    }

    pub fn with_tolerance(pairs: impl IntoIterator<Item = (S, S)>, eps: f64) -> Result<Self, DistError> {
        let pairs: Vec<(S, S)> = pairs.into_iter().collect();
        if pairs.is_empty() {
            return Err(DistError::Empty);
        }
        let mut total = S::zero();
        for (v, p) in &pairs {
            if !v.is_finite() || !p.is_finite() {
                return Err(DistError::NonFinite);
            }
            if p.is_negative() {
                return Err(DistError::NegativeProbability { value: v.to_string(), prob: p.to_string() });
            }
            total = total + p.clone();
        }
        let mass_ok = if S::EXACT {
            total == S::one()
        } else {
            (total.to_f64() - 1.0).abs() <= FLOAT_MASS_TOL
        };
        if !mass_ok {
            return Err(DistError::BadTotal(total.to_string()));
        }
        let d = Self::from_weights(pairs, eps);
        if d.atoms.is_empty() {
            return Err(DistError::Empty);
        }
        Ok(d)
    }

    /// Builds from nonnegative weights whose total is already one (up to
    /// rounding in float mode, where weights are renormalised).
    pub(crate) fn from_weights(pairs: impl IntoIterator<Item = (S, S)>, eps: f64) -> Self {
        let mut pairs: Vec<(S, S)> = pairs.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
        let mut atoms: Vec<Atom<S>> = Vec::with_capacity(pairs.len());
        // Anchor value of the current merge group in float mode.
        let mut anchor: Option<S> = None;
        for (v, p) in pairs {
            match atoms.last_mut() {
                Some(last) if anchor.as_ref().is_some_and(|a| a.close(&v, eps)) => {
                    if S::EXACT {
                        last.prob = last.prob.clone() + p;
                    } else {
                        let w = last.prob.clone() + p.clone();
                        last.value = (last.value.clone() * last.prob.clone() + v * p) / w.clone();
                        last.prob = w;
                    }
                }
                _ => {
                    anchor = Some(v.clone());
                    atoms.push(Atom { value: v, prob: p });
                }
            }
        }
        if !S::EXACT {
            let total = atoms.iter().fold(S::zero(), |acc, a| acc + a.prob.clone());
            if !total.is_zero() {
                for a in &mut atoms {
                    a.prob = a.prob.clone() / total.clone();
                }
            }
        }
        DiscreteDist { atoms, eps }
    }

    pub fn point(value: S) -> Self {
        DiscreteDist { atoms: vec![Atom { value, prob: S::one() }], eps: S::default_eps() }
    }

    /// Equal weights on the given values (repeats allowed).
    pub fn uniform(values: impl IntoIterator<Item = S>) -> Result<Self, DistError> {
        let values: Vec<S> = values.into_iter().collect();
        if values.is_empty() {
            return Err(DistError::Empty);
        }
        let w = S::one() / S::from_i64(values.len() as i64);
        Ok(Self::from_weights(values.into_iter().map(|v| (v, w.clone())), S::default_eps()))
    }

    pub fn atoms(&self) -> &[Atom<S>] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn values(&self) -> impl Iterator<Item = &S> {
        self.atoms.iter().map(|a| &a.value)
    }

    pub fn is_degenerate(&self) -> bool {
        self.atoms.len() == 1
    }

    /// Cumulative probabilities at each atom; the last entry is one.
    pub fn cumulative(&self) -> Vec<S> {
        let mut acc = S::zero();
        let mut out: Vec<S> = self
            .atoms
            .iter()
            .map(|a| {
                acc = acc.clone() + a.prob.clone();
                acc.clone()
            })
            .collect();
        if let Some(last) = out.last_mut() {
            *last = S::one();
        }
        out
    }

    /// `P(X <= x)`.
    pub fn cdf(&self, x: &S) -> S {
        self.atoms
            .iter()
            .take_while(|a| a.value <= *x)
            .fold(S::zero(), |acc, a| acc + a.prob.clone())
    }

    /// Left quantile `inf{x : P(X <= x) >= t}`.
    pub fn quantile(&self, t: &S) -> Result<S, DistError> {
        if *t <= S::zero() || *t >= S::one() {
            return Err(DistError::QuantileDomain(t.to_string()));
        }
        Ok(self.quantile_in(&self.cumulative(), t).clone())
    }

    /// Quantile lookup against a precomputed cumulative vector.
    pub(crate) fn quantile_in<'a>(&'a self, cumulative: &[S], t: &S) -> &'a S {
        let eps = self.eps;
        let idx = cumulative.partition_point(|c| !(c.ge_eps(t, eps)));
        &self.atoms[idx.min(self.atoms.len() - 1)].value
    }

    /// Steps of the quantile function: `(lower level, upper level, value)`.
    pub fn quantile_steps(&self) -> Vec<(S, S, S)> {
        let mut lo = S::zero();
        self.atoms
            .iter()
            .zip(self.cumulative())
            .map(|(a, hi)| {
                let step = (lo.clone(), hi.clone(), a.value.clone());
                lo = hi;
                step
            })
            .collect()
    }

    pub fn mean(&self) -> S {
        self.atoms.iter().fold(S::zero(), |acc, a| acc + a.value.clone() * a.prob.clone())
    }

    pub fn variance(&self) -> S {
        let m = self.mean();
        self.atoms.iter().fold(S::zero(), |acc, a| {
            let d = a.value.clone() - m.clone();
            acc + d.clone() * d * a.prob.clone()
        })
    }

    pub fn min(&self) -> &S {
        &self.atoms[0].value
    }

    pub fn max(&self) -> &S {
        &self.atoms[self.atoms.len() - 1].value
    }

    pub fn support_bounds(&self) -> (S, S) {
        (self.min().clone(), self.max().clone())
    }

    pub fn range_width(&self) -> S {
        self.max().clone() - self.min().clone()
    }

    /// `E[(X - k)+]`.
    pub fn stop_loss(&self, k: &S) -> S {
        self.atoms
            .iter()
            .filter(|a| a.value > *k)
            .fold(S::zero(), |acc, a| acc + (a.value.clone() - k.clone()) * a.prob.clone())
    }

    /// Stop-loss transform at every point of the increasing slice `ks`, in
    /// one sweep.
    pub fn stop_loss_sweep(&self, ks: &[S]) -> Vec<S> {
        let n = self.atoms.len();
        // suffix sums of p and p*v
        let mut tail_p = vec![S::zero(); n + 1];
        let mut tail_pv = vec![S::zero(); n + 1];
        for i in (0..n).rev() {
            let a = &self.atoms[i];
            tail_p[i] = tail_p[i + 1].clone() + a.prob.clone();
            tail_pv[i] = tail_pv[i + 1].clone() + a.prob.clone() * a.value.clone();
        }
        let mut idx = 0;
        ks.iter()
            .map(|k| {
                while idx < n && self.atoms[idx].value <= *k {
                    idx += 1;
                }
                tail_pv[idx].clone() - k.clone() * tail_p[idx].clone()
            })
            .collect()
    }

    /// `E[exp(a X)]`, computed in floating point.
    pub fn exp_moment(&self, a: f64) -> Result<f64, DistError> {
        let mut total = 0.0;
        for atom in &self.atoms {
            let e = (a * atom.value.to_f64()).exp();
            if !e.is_finite() {
                return Err(DistError::Overflow { value: atom.value.to_string(), a });
            }
            total += atom.prob.to_f64() * e;
        }
        if total.is_finite() {
            Ok(total)
        } else {
            Err(DistError::Overflow { value: self.max().to_string(), a })
        }
    }

    /// Largest deviation `|v - center|` over the support.
    pub fn sup_distance(&self, center: &S) -> S {
        let lo = (center.clone() - self.min().clone()).abs();
        let hi = (self.max().clone() - center.clone()).abs();
        if lo > hi {
            lo
        } else {
            hi
        }
    }

    /// `E|X - center|^p` for an integer exponent, exact in rational mode.
    pub fn abs_moment(&self, center: &S, p: u32) -> S {
        self.atoms.iter().fold(S::zero(), |acc, a| {
            let d = (a.value.clone() - center.clone()).abs();
            acc + num_traits::pow(d, p as usize) * a.prob.clone()
        })
    }

    /// `(E|X - center|^p)^(1/p)` for real `p >= 1`.
    pub fn lp_distance(&self, center: &S, p: f64) -> f64 {
        let c = center.to_f64();
        let m: f64 = self
            .atoms
            .iter()
            .map(|a| a.prob.to_f64() * (a.value.to_f64() - c).abs().powf(p))
            .sum();
        m.powf(1.0 / p)
    }

    /// Pushforward under `f`; atoms landing on the same value are merged.
    pub fn map_values(&self, f: impl Fn(&S) -> S) -> Self {
        Self::from_weights(self.atoms.iter().map(|a| (f(&a.value), a.prob.clone())), self.eps)
    }

    pub fn shift(&self, c: &S) -> Self {
        self.map_values(|v| v.clone() + c.clone())
    }

    pub fn negate(&self) -> Self {
        self.map_values(|v| -v.clone())
    }

    /// Mixture `sum w_i * law_i`; weights must sum to one.
    pub fn mixture(parts: &[(S, &DiscreteDist<S>)]) -> Self {
        let eps = parts.iter().map(|(_, d)| d.eps).fold(0.0, f64::max);
        Self::from_weights(
            parts
                .iter()
                .flat_map(|(w, d)| d.atoms.iter().map(move |a| (a.value.clone(), w.clone() * a.prob.clone()))),
            eps,
        )
    }

    /// Same law in another backend.
    pub fn convert<T: Scalar>(&self) -> DiscreteDist<T> {
        DiscreteDist::<T>::from_weights(
            self.atoms.iter().map(|a| (to_backend::<S, T>(&a.value), to_backend::<S, T>(&a.prob))),
            T::default_eps(),
        )
    }

    /// Equality of laws up to the tolerance of either operand.
    pub fn same_law(&self, other: &Self) -> bool {
        let eps = self.eps.max(other.eps);
        self.atoms.len() == other.atoms.len()
            && self
                .atoms
                .iter()
                .zip(&other.atoms)
                .all(|(a, b)| a.value.close(&b.value, eps) && a.prob.close(&b.prob, eps))
    }

    pub fn to_json(&self) -> DistJson {
        DistJson {
            atoms: self
                .atoms
                .iter()
                .map(|a| AtomJson { v: a.value.to_literal(), p: a.prob.to_literal() })
                .collect(),
        }
    }

    pub fn from_json(json: &DistJson) -> Result<Self, DistError> {
        let pairs = json
            .atoms
            .iter()
            .map(|a| Ok((S::from_literal(&a.v)?, S::from_literal(&a.p)?)))
            .collect::<Result<Vec<_>, LiteralError>>()?;
        Self::new(pairs)
    }

    pub fn from_json_str(text: &str) -> Result<Self, DistError> {
        let json: DistJson = serde_json::from_str(text).map_err(|e| DistError::Json(e.to_string()))?;
        Self::from_json(&json)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("distribution JSON is always serialisable")
    }
}

/// Converts a scalar between backends, exactly when the target is rational
/// and the source is a finite float.
pub(crate) fn to_backend<S: Scalar, T: Scalar>(x: &S) -> T {
    match x.to_value() {
        crate::scalar::Value::Exact(r) => T::from_rational(&r),
        crate::scalar::Value::Approx(f) => {
            let r = num_rational::BigRational::from_float(f).unwrap_or_default();
            T::from_rational(&r)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomJson {
    pub v: NumLiteral,
    pub p: NumLiteral,
}

/// Wire format: `{"atoms": [{"v": .., "p": ..}, ..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistJson {
    pub atoms: Vec<AtomJson>,
}
