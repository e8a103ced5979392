//! Concave and increasing-convex order tests, plus generators of ordered
//! pairs (mean-preserving spreads and conditional-expectation coarsenings).
//!
//! Stop-loss transforms of finite laws are piecewise linear with kinks only
//! at atoms, so comparing them on the union of both supports is exact.

use serde::{Deserialize, Serialize};

use crate::dist::{DiscreteDist, DistError};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Geq,
    LtOrIncomparable,
}

impl std::fmt::Display for Relation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Relation::Geq => "geq",
            Relation::LtOrIncomparable => "lt_or_incomparable",
        })
    }
}

/// Outcome of `X >=_cv Y`. `witness` is a kink where the stop-loss
/// dominance fails; it is only present when the means agree.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderVerdict<S> {
    pub relation: Relation,
    pub witness: Option<S>,
}

impl<S: Scalar> OrderVerdict<S> {
    pub fn is_geq(&self) -> bool {
        self.relation == Relation::Geq
    }
}

impl<S: Scalar> std::fmt::Display for OrderVerdict<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.witness {
            Some(k) => write!(f, "{} witness={}", self.relation, k),
            None => write!(f, "{}", self.relation),
        }
    }
}

fn union_support<S: Scalar>(dx: &DiscreteDist<S>, dy: &DiscreteDist<S>) -> Vec<S> {
    let mut ks: Vec<S> = dx.values().chain(dy.values()).cloned().collect();
    ks.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    ks.dedup();
    ks
}

/// `X >=_cv Y`: equal means and `E(Y-k)+ >= E(X-k)+` at every kink.
pub fn concave_order_geq<S: Scalar>(dx: &DiscreteDist<S>, dy: &DiscreteDist<S>) -> OrderVerdict<S> {
    let eps = dx.eps().max(dy.eps());
    if !dx.mean().close(&dy.mean(), eps) {
        return OrderVerdict { relation: Relation::LtOrIncomparable, witness: None };
    }
    let ks = union_support(dx, dy);
    let sx = dx.stop_loss_sweep(&ks);
    let sy = dy.stop_loss_sweep(&ks);
    for ((k, a), b) in ks.iter().zip(&sx).zip(&sy) {
        if !b.ge_eps(a, eps) {
            return OrderVerdict { relation: Relation::LtOrIncomparable, witness: Some(k.clone()) };
        }
    }
    OrderVerdict { relation: Relation::Geq, witness: None }
}

/// `X <=_icx Y`: `E(X-k)+ <= E(Y-k)+` at every kink (no mean condition).
pub fn increasing_convex_order_leq<S: Scalar>(dx: &DiscreteDist<S>, dy: &DiscreteDist<S>) -> bool {
    let eps = dx.eps().max(dy.eps());
    let ks = union_support(dx, dy);
    let sx = dx.stop_loss_sweep(&ks);
    let sy = dy.stop_loss_sweep(&ks);
    sx.iter().zip(&sy).all(|(a, b)| b.ge_eps(a, eps))
}

/// Splits atom `(v, p)` into `(v + a, split*p)` and `(v - b, (1-split)*p)`
/// with `a = 2δ(1-split)` and `b = 2δ*split`, so the atom's mean is kept.
/// For `split = 1/2` the atom moves `δ` to each side.
pub fn mean_preserving_spread<S: Scalar>(
    d: &DiscreteDist<S>,
    atom_index: usize,
    delta: &S,
    split: &S,
) -> Result<DiscreteDist<S>, DistError> {
    if atom_index >= d.len() {
        return Err(DistError::Domain(format!("atom index {atom_index} out of range (len {})", d.len())));
    }
    if !delta.is_positive() {
        return Err(DistError::Domain(format!("spread size must be positive, got {delta}")));
    }
    if !split.is_positive() || *split >= S::one() {
        return Err(DistError::Domain(format!("split must lie in (0,1), got {split}")));
    }
    let two = S::one() + S::one();
    let up = two.clone() * delta.clone() * (S::one() - split.clone());
    let down = two * delta.clone() * split.clone();
    let mut pairs: Vec<(S, S)> = Vec::with_capacity(d.len() + 1);
    for (i, a) in d.atoms().iter().enumerate() {
        if i == atom_index {
            pairs.push((a.value.clone() + up.clone(), split.clone() * a.prob.clone()));
            pairs.push((a.value.clone() - down.clone(), (S::one() - split.clone()) * a.prob.clone()));
        } else {
            pairs.push((a.value.clone(), a.prob.clone()));
        }
    }
    Ok(DiscreteDist::from_weights(pairs, d.eps()))
}

/// Conditional expectation on the bins `[e0,e1], (e1,e2], …, (e_{k-1},e_k]`.
pub fn coarsen<S: Scalar>(d: &DiscreteDist<S>, bin_edges: &[S]) -> Result<DiscreteDist<S>, DistError> {
    if bin_edges.len() < 2 {
        return Err(DistError::Domain("coarsening needs at least two bin edges".into()));
    }
    if bin_edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(DistError::Domain("bin edges must be strictly increasing".into()));
    }
    let (lo, hi) = (&bin_edges[0], &bin_edges[bin_edges.len() - 1]);
    if d.min() < lo || d.max() > hi {
        return Err(DistError::Domain(format!(
            "bins [{lo}, {hi}] do not cover the support [{}, {}]",
            d.min(),
            d.max()
        )));
    }
    let nbins = bin_edges.len() - 1;
    let mut mass = vec![S::zero(); nbins];
    let mut moment = vec![S::zero(); nbins];
    for a in d.atoms() {
        // first bin whose right edge is >= value
        let b = bin_edges[1..].partition_point(|e| *e < a.value).min(nbins - 1);
        mass[b] = mass[b].clone() + a.prob.clone();
        moment[b] = moment[b].clone() + a.prob.clone() * a.value.clone();
    }
    Ok(DiscreteDist::from_weights(
        mass.into_iter()
            .zip(moment)
            .filter(|(m, _)| !m.is_zero())
            .map(|(m, s)| (s / m.clone(), m)),
        d.eps(),
    ))
}
