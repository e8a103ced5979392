//! Joint laws of pairs and the dependence structures used by the audits.
//!
//! A [`JointDist`] carries the set of dependence properties it satisfies.
//! Tags are recomputed by the verifiers on every construction, so a tag is
//! always a certificate and never a declaration.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::{DiscreteDist, DistError};
use crate::scalar::{LiteralError, NumLiteral, Scalar};
use crate::simplex;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CouplingError {
    #[error("grid {0} values must be strictly increasing")]
    UnsortedGrid(&'static str),
    #[error("probability matrix is {rows}x{cols}, expected {want_rows}x{want_cols}")]
    Shape { rows: usize, cols: usize, want_rows: usize, want_cols: usize },
    #[error("negative cell probability {0}")]
    NegativeMass(String),
    #[error("cell probabilities sum to {0}, expected 1")]
    BadTotal(String),
    #[error("claimed tag {0:?} does not hold")]
    TagRejected(Tag),
    #[error("mixing weight {0} outside [0,1]")]
    WeightDomain(String),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Literal(#[from] LiteralError),
    #[error("malformed joint JSON: {0}")]
    Json(String),
}

/// Verified dependence property of a joint law.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tag {
    Comonotonic,
    Antimonotonic,
    Independent,
    Exchangeable,
    Nqd,
    Martingale,
    IdMarginals,
}

impl Tag {
    pub const ALL: [Tag; 7] = [
        Tag::Comonotonic,
        Tag::Antimonotonic,
        Tag::Independent,
        Tag::Exchangeable,
        Tag::Nqd,
        Tag::Martingale,
        Tag::IdMarginals,
    ];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingKind {
    Comonotonic,
    Antimonotonic,
    Independent,
    ExchangeableSymmetrized,
}

/// Finite joint law of `(X, Y)` on the grid `x_values × y_values`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDist<S> {
    x: Vec<S>,
    y: Vec<S>,
    probs: Vec<Vec<S>>,
    tags: BTreeSet<Tag>,
    eps: f64,
}

impl<S: Scalar> JointDist<S> {
    pub fn new(x: Vec<S>, y: Vec<S>, probs: Vec<Vec<S>>) -> Result<Self, CouplingError> {
        Self::with_tolerance(x, y, probs, S::default_eps())
    }

    pub fn with_tolerance(x: Vec<S>, y: Vec<S>, probs: Vec<Vec<S>>, eps: f64) -> Result<Self, CouplingError> {
        if x.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CouplingError::UnsortedGrid("x"));
        }
        if y.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CouplingError::UnsortedGrid("y"));
        }
        let cols = probs.first().map_or(0, Vec::len);
        if probs.len() != x.len() || probs.iter().any(|r| r.len() != y.len()) || x.is_empty() || y.is_empty() {
            return Err(CouplingError::Shape { rows: probs.len(), cols, want_rows: x.len(), want_cols: y.len() });
        }
        let mut total = S::zero();
        for p in probs.iter().flatten() {
            if p.is_negative() {
                return Err(CouplingError::NegativeMass(p.to_string()));
            }
            total = total + p.clone();
        }
        let ok = if S::EXACT { total == S::one() } else { (total.to_f64() - 1.0).abs() <= 1e-12 };
        if !ok {
            return Err(CouplingError::BadTotal(total.to_string()));
        }
        Ok(Self::assemble(x, y, probs, eps))
    }

    /// Like [`JointDist::new`] but fails unless every claimed tag verifies.
    pub fn with_claimed_tags(
        x: Vec<S>,
        y: Vec<S>,
        probs: Vec<Vec<S>>,
        claimed: &[Tag],
    ) -> Result<Self, CouplingError> {
        let j = Self::new(x, y, probs)?;
        for t in claimed {
            if !j.has(*t) {
                return Err(CouplingError::TagRejected(*t));
            }
        }
        Ok(j)
    }

    fn assemble(x: Vec<S>, y: Vec<S>, probs: Vec<Vec<S>>, eps: f64) -> Self {
        let mut j = JointDist { x, y, probs, tags: BTreeSet::new(), eps };
        j.tags = Tag::ALL.into_iter().filter(|t| j.verify(*t)).collect();
        j
    }

    /// Builds a joint from `(x, y, mass)` cells with total mass one.
    pub(crate) fn from_cells(cells: impl IntoIterator<Item = (S, S, S)>, eps: f64) -> Self {
        let cells: Vec<(S, S, S)> = cells.into_iter().filter(|c| !c.2.is_zero()).collect();
        let x = grid(cells.iter().map(|c| c.0.clone()), eps);
        let y = grid(cells.iter().map(|c| c.1.clone()), eps);
        let mut probs = vec![vec![S::zero(); y.len()]; x.len()];
        for (cx, cy, p) in cells {
            let i = find_index(&x, &cx, eps).expect("cell value on grid");
            let j = find_index(&y, &cy, eps).expect("cell value on grid");
            probs[i][j] = probs[i][j].clone() + p;
        }
        Self::assemble(x, y, probs, eps)
    }

    pub fn x_values(&self) -> &[S] {
        &self.x
    }

    pub fn y_values(&self) -> &[S] {
        &self.y
    }

    pub fn probs(&self) -> &[Vec<S>] {
        &self.probs
    }

    pub fn tags(&self) -> &BTreeSet<Tag> {
        &self.tags
    }

    pub fn has(&self, tag: Tag) -> bool {
        self.tags.contains(&tag)
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Positive-mass cells as `(i, j, mass)`.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, &S)> {
        self.probs
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().filter(|(_, p)| !p.is_zero()).map(move |(j, p)| (i, j, p)))
    }

    pub fn row_sums(&self) -> Vec<S> {
        self.probs.iter().map(|r| r.iter().fold(S::zero(), |a, p| a + p.clone())).collect()
    }

    pub fn col_sums(&self) -> Vec<S> {
        let mut out = vec![S::zero(); self.y.len()];
        for row in &self.probs {
            for (o, p) in out.iter_mut().zip(row) {
                *o = o.clone() + p.clone();
            }
        }
        out
    }

    pub fn x_marginal(&self) -> DiscreteDist<S> {
        DiscreteDist::from_weights(self.x.iter().cloned().zip(self.row_sums()), self.eps)
    }

    pub fn y_marginal(&self) -> DiscreteDist<S> {
        DiscreteDist::from_weights(self.y.iter().cloned().zip(self.col_sums()), self.eps)
    }

    pub fn transpose(&self) -> Self {
        let probs = (0..self.y.len()).map(|j| self.probs.iter().map(|r| r[j].clone()).collect()).collect();
        Self::assemble(self.y.clone(), self.x.clone(), probs, self.eps)
    }

    /// Joint law of `(X + cx, Y + cy)`; every tag except martingale and
    /// ID-marginals is invariant under this.
    pub fn shift(&self, cx: &S, cy: &S) -> Self {
        let x = self.x.iter().map(|v| v.clone() + cx.clone()).collect();
        let y = self.y.iter().map(|v| v.clone() + cy.clone()).collect();
        Self::assemble(x, y, self.probs.clone(), self.eps)
    }

    fn verify(&self, tag: Tag) -> bool {
        match tag {
            Tag::Comonotonic => monotone_support(self, false),
            Tag::Antimonotonic => monotone_support(self, true),
            Tag::Independent => is_independent(self),
            Tag::Exchangeable => is_exchangeable(self),
            Tag::Nqd => is_nqd(self),
            Tag::Martingale => is_martingale(self),
            Tag::IdMarginals => self.x_marginal().same_law(&self.y_marginal()),
        }
    }

    pub fn to_json(&self) -> JointJson {
        JointJson {
            x: self.x.iter().map(Scalar::to_literal).collect(),
            y: self.y.iter().map(Scalar::to_literal).collect(),
            p: self.probs.iter().map(|r| r.iter().map(Scalar::to_literal).collect()).collect(),
            tags: self.tags.iter().copied().collect(),
        }
    }

    /// Loads a joint and re-verifies every tag listed in the file.
    pub fn from_json(json: &JointJson) -> Result<Self, CouplingError> {
        let lits = |v: &[NumLiteral]| v.iter().map(S::from_literal).collect::<Result<Vec<S>, _>>();
        let x = lits(&json.x)?;
        let y = lits(&json.y)?;
        let p = json.p.iter().map(|r| lits(r)).collect::<Result<Vec<_>, _>>()?;
        Self::with_claimed_tags(x, y, p, &json.tags)
    }

    pub fn from_json_str(text: &str) -> Result<Self, CouplingError> {
        let json: JointJson = serde_json::from_str(text).map_err(|e| CouplingError::Json(e.to_string()))?;
        Self::from_json(&json)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("joint JSON is always serialisable")
    }
}

/// Wire format: `{"x": [..], "y": [..], "p": [[..]], "tags": [..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointJson {
    pub x: Vec<NumLiteral>,
    pub y: Vec<NumLiteral>,
    pub p: Vec<Vec<NumLiteral>>,
    #[serde(default)]
    pub tags: Vec<Tag>,
}

fn grid<S: Scalar>(values: impl Iterator<Item = S>, eps: f64) -> Vec<S> {
    let mut v: Vec<S> = values.collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let mut out: Vec<S> = Vec::with_capacity(v.len());
    for x in v {
        if !out.last().is_some_and(|l: &S| l.close(&x, eps)) {
            out.push(x);
        }
    }
    out
}

fn find_index<S: Scalar>(grid: &[S], v: &S, eps: f64) -> Option<usize> {
    let i = grid.partition_point(|g| g < v && !g.close(v, eps));
    (i < grid.len() && grid[i].close(v, eps)).then_some(i)
}

/// For support cells `(i, j)`, `(k, l)` with `i < k` we need `j <= l`
/// (comonotonic) or `j >= l` (antimonotonic). Comparing the column range of
/// each nonempty row with the previous one is enough.
fn monotone_support<S: Scalar>(j: &JointDist<S>, anti: bool) -> bool {
    let mut last: Option<usize> = None;
    for row in &j.probs {
        let cols: Vec<usize> = row.iter().enumerate().filter(|(_, p)| !p.is_zero()).map(|(c, _)| c).collect();
        if cols.is_empty() {
            continue;
        }
        let (first, lastc) = (cols[0], cols[cols.len() - 1]);
        if let Some(prev) = last {
            let ok = if anti { lastc <= prev } else { first >= prev };
            if !ok {
                return false;
            }
        }
        last = Some(if anti { first } else { lastc });
    }
    true
}

pub fn is_comonotonic<S: Scalar>(j: &JointDist<S>) -> bool {
    monotone_support(j, false)
}

pub fn is_antimonotonic<S: Scalar>(j: &JointDist<S>) -> bool {
    monotone_support(j, true)
}

pub fn is_independent<S: Scalar>(j: &JointDist<S>) -> bool {
    let (rows, cols) = (j.row_sums(), j.col_sums());
    j.probs
        .iter()
        .zip(&rows)
        .all(|(row, px)| row.iter().zip(&cols).all(|(p, py)| p.close(&(px.clone() * py.clone()), j.eps)))
}

/// `(X, Y)` and `(Y, X)` have the same law.
pub fn is_exchangeable<S: Scalar>(j: &JointDist<S>) -> bool {
    j.cells().all(|(i, k, p)| {
        match (find_index(&j.x, &j.y[k], j.eps), find_index(&j.y, &j.x[i], j.eps)) {
            (Some(mi), Some(mk)) => j.probs[mi][mk].close(p, j.eps),
            _ => false,
        }
    })
}

/// `P(X <= x, Y <= y) <= P(X <= x) P(Y <= y)` on the whole grid.
pub fn is_nqd<S: Scalar>(j: &JointDist<S>) -> bool {
    let (nx, ny) = (j.x.len(), j.y.len());
    let rows = j.row_sums();
    let cols = j.col_sums();
    let mut fx = S::zero();
    // running column-prefix sums of the joint cdf
    let mut joint_prefix = vec![S::zero(); ny];
    for i in 0..nx {
        fx = fx + rows[i].clone();
        let mut row_acc = S::zero();
        let mut fy = S::zero();
        for k in 0..ny {
            row_acc = row_acc + j.probs[i][k].clone();
            joint_prefix[k] = joint_prefix[k].clone() + row_acc.clone();
            fy = fy + cols[k].clone();
            let product = fx.clone() * fy.clone();
            if joint_prefix[k].cmp_eps(&product, j.eps).is_gt() {
                return false;
            }
        }
    }
    true
}

/// `E[Y | X = x_i] = x_i` on every row with positive mass.
pub fn is_martingale<S: Scalar>(j: &JointDist<S>) -> bool {
    j.probs.iter().zip(&j.x).all(|(row, xv)| {
        let mass = row.iter().fold(S::zero(), |a, p| a + p.clone());
        if mass.is_zero() {
            return true;
        }
        let first = row.iter().zip(&j.y).fold(S::zero(), |a, (p, yv)| a + p.clone() * yv.clone());
        let tol = if S::EXACT { 0.0 } else { j.eps * (1.0 + j.y.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max)) };
        first.close(&(xv.clone() * mass), tol)
    })
}

/// Cells `(Q_X(t), Q_Y(t or 1-t), mass)` over the common refinement of
/// cumulative-probability breakpoints.
fn quantile_pairing<S: Scalar>(dx: &DiscreteDist<S>, dy: &DiscreteDist<S>, reflect: bool) -> Vec<(S, S, S)> {
    let eps = dx.eps().max(dy.eps());
    let cx = dx.cumulative();
    let cy = dy.cumulative();
    let mut breaks: Vec<S> = vec![S::zero(), S::one()];
    breaks.extend(cx.iter().cloned());
    breaks.extend(cy.iter().map(|c| if reflect { S::one() - c.clone() } else { c.clone() }));
    let breaks = grid(breaks.into_iter(), eps);
    let half = S::half();
    breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let mid = (w[0].clone() + w[1].clone()) * half.clone();
            let ty = if reflect { S::one() - mid.clone() } else { mid.clone() };
            let xv = dx.quantile_in(&cx, &mid).clone();
            let yv = dy.quantile_in(&cy, &ty).clone();
            (xv, yv, w[1].clone() - w[0].clone())
        })
        .collect()
}

pub fn comonotonic_pair<S: Scalar>(dx: &DiscreteDist<S>, dy: &DiscreteDist<S>) -> JointDist<S> {
    JointDist::from_cells(quantile_pairing(dx, dy, false), dx.eps().max(dy.eps()))
}

pub fn antimonotonic_pair<S: Scalar>(dx: &DiscreteDist<S>, dy: &DiscreteDist<S>) -> JointDist<S> {
    JointDist::from_cells(quantile_pairing(dx, dy, true), dx.eps().max(dy.eps()))
}

pub fn independent_pair<S: Scalar>(dx: &DiscreteDist<S>, dy: &DiscreteDist<S>) -> JointDist<S> {
    let x: Vec<S> = dx.values().cloned().collect();
    let y: Vec<S> = dy.values().cloned().collect();
    let probs = dx
        .atoms()
        .iter()
        .map(|a| dy.atoms().iter().map(|b| a.prob.clone() * b.prob.clone()).collect())
        .collect();
    JointDist::assemble(x, y, probs, dx.eps().max(dy.eps()))
}

/// `(J + Jᵀ) / 2` on the union grid.
pub fn exchange_symmetrize<S: Scalar>(j: &JointDist<S>) -> JointDist<S> {
    let half = S::half();
    let cells = j.cells().flat_map(|(i, k, p)| {
        let w = p.clone() * half.clone();
        [(j.x[i].clone(), j.y[k].clone(), w.clone()), (j.y[k].clone(), j.x[i].clone(), w)]
    });
    let cells: Vec<_> = cells.collect();
    JointDist::from_cells(cells, j.eps)
}

pub fn couple<S: Scalar>(kind: CouplingKind, dx: &DiscreteDist<S>, dy: &DiscreteDist<S>) -> JointDist<S> {
    match kind {
        CouplingKind::Comonotonic => comonotonic_pair(dx, dy),
        CouplingKind::Antimonotonic => antimonotonic_pair(dx, dy),
        CouplingKind::Independent => independent_pair(dx, dy),
        CouplingKind::ExchangeableSymmetrized => exchange_symmetrize(&independent_pair(dx, dy)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InfeasibleReason {
    /// The two marginals have different means.
    MeanGap,
    /// Means agree but no martingale transport exists (the concave order fails).
    NotConcaveOrdered,
}

impl std::fmt::Display for InfeasibleReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            InfeasibleReason::MeanGap => "mean gap",
            InfeasibleReason::NotConcaveOrdered => "marginals are not ordered in the concave order",
        })
    }
}

/// Joint law with marginals `dx`, `dy` and `E[Y | X] = X`, found as a
/// feasible point of the transport polytope with conditional-mean rows.
pub fn martingale_coupling<S: Scalar>(
    dx: &DiscreteDist<S>,
    dy: &DiscreteDist<S>,
) -> Result<JointDist<S>, InfeasibleReason> {
    let eps = dx.eps().max(dy.eps());
    if !dx.mean().close(&dy.mean(), eps) {
        return Err(InfeasibleReason::MeanGap);
    }
    let (n, m) = (dx.len(), dy.len());
    let var = |i: usize, k: usize| i * m + k;
    let mut a: Vec<Vec<S>> = Vec::with_capacity(2 * n + m);
    let mut b: Vec<S> = Vec::with_capacity(2 * n + m);
    for (i, ax) in dx.atoms().iter().enumerate() {
        let mut row = vec![S::zero(); n * m];
        for k in 0..m {
            row[var(i, k)] = S::one();
        }
        a.push(row);
        b.push(ax.prob.clone());
    }
    for (k, ay) in dy.atoms().iter().enumerate() {
        let mut row = vec![S::zero(); n * m];
        for i in 0..n {
            row[var(i, k)] = S::one();
        }
        a.push(row);
        b.push(ay.prob.clone());
    }
    for (i, ax) in dx.atoms().iter().enumerate() {
        let mut row = vec![S::zero(); n * m];
        for (k, ay) in dy.atoms().iter().enumerate() {
            row[var(i, k)] = ay.value.clone() - ax.value.clone();
        }
        a.push(row);
        b.push(S::zero());
    }
    let sol = simplex::find_feasible(&a, &b, eps).ok_or(InfeasibleReason::NotConcaveOrdered)?;
    let probs = (0..n).map(|i| (0..m).map(|k| sol[var(i, k)].clone()).collect()).collect();
    let x = dx.values().cloned().collect();
    let y = dy.values().cloned().collect();
    let j = JointDist::assemble(x, y, probs, eps);
    debug_assert!(j.has(Tag::Martingale));
    Ok(j)
}

/// Law of `λX + (1-λ)Y` under the joint `j`.
pub fn convex_combine<S: Scalar>(j: &JointDist<S>, lambda: &S) -> Result<DiscreteDist<S>, CouplingError> {
    if lambda.is_negative() || *lambda > S::one() {
        return Err(CouplingError::WeightDomain(lambda.to_string()));
    }
    let mu = S::one() - lambda.clone();
    Ok(DiscreteDist::from_weights(
        j.cells()
            .map(|(i, k, p)| (lambda.clone() * j.x[i].clone() + mu.clone() * j.y[k].clone(), p.clone())),
        j.eps,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat, Rational};

    fn d(pairs: &[(Rational, Rational)]) -> DiscreteDist<Rational> {
        DiscreteDist::new(pairs.iter().cloned()).unwrap()
    }

    fn cell(j: &JointDist<Rational>, x: Rational, y: Rational) -> Rational {
        let i = j.x_values().iter().position(|v| *v == x);
        let k = j.y_values().iter().position(|v| *v == y);
        match (i, k) {
            (Some(i), Some(k)) => j.probs()[i][k].clone(),
            _ => int(0),
        }
    }

    fn coin() -> DiscreteDist<Rational> {
        d(&[(int(0), rat(1, 2)), (int(1), rat(1, 2))])
    }

    fn x03() -> DiscreteDist<Rational> {
        d(&[(int(0), rat(2, 3)), (int(3), rat(1, 3))])
    }

    #[test]
    fn comonotonic_examples() {
        let j = comonotonic_pair(&coin(), &coin());
        assert_eq!(cell(&j, int(0), int(0)), rat(1, 2));
        assert_eq!(cell(&j, int(1), int(1)), rat(1, 2));
        assert!(j.has(Tag::Comonotonic) && !j.has(Tag::Antimonotonic));

        let dx = d(&[(int(0), rat(1, 3)), (int(1), rat(2, 3))]);
        let dy = d(&[(int(0), rat(2, 3)), (int(1), rat(1, 3))]);
        let j = comonotonic_pair(&dx, &dy);
        assert_eq!(cell(&j, int(0), int(0)), rat(1, 3));
        assert_eq!(cell(&j, int(1), int(0)), rat(1, 3));
        assert_eq!(cell(&j, int(1), int(1)), rat(1, 3));
        assert_eq!(cell(&j, int(0), int(1)), int(0));

        let j = comonotonic_pair(&x03(), &DiscreteDist::point(int(4)));
        for t in [Tag::Comonotonic, Tag::Antimonotonic, Tag::Independent, Tag::Nqd] {
            assert!(j.has(t), "{t:?}");
        }
    }

    #[test]
    fn antimonotonic_examples() {
        let j = antimonotonic_pair(&x03(), &x03());
        assert_eq!(cell(&j, int(0), int(3)), rat(1, 3));
        assert_eq!(cell(&j, int(0), int(0)), rat(1, 3));
        assert_eq!(cell(&j, int(3), int(0)), rat(1, 3));
        assert!(j.has(Tag::Antimonotonic) && j.has(Tag::IdMarginals) && j.has(Tag::Exchangeable));

        let j = antimonotonic_pair(&coin(), &coin());
        assert_eq!(cell(&j, int(0), int(1)), rat(1, 2));
        assert_eq!(cell(&j, int(1), int(0)), rat(1, 2));

        let y = d(&[(int(1), rat(1, 2)), (int(3), rat(1, 2))]);
        let j = antimonotonic_pair(&DiscreteDist::point(int(1)), &y);
        assert!(j.has(Tag::Independent) && j.has(Tag::Antimonotonic));
    }

    #[test]
    fn independent_examples() {
        let j = independent_pair(&x03(), &x03());
        assert_eq!(cell(&j, int(3), int(3)), rat(1, 9));
        assert!(j.has(Tag::Independent) && j.has(Tag::Nqd));
        let sym = d(&[(int(-1), rat(1, 2)), (int(1), rat(1, 2))]);
        let j = independent_pair(&sym, &sym);
        assert!(j.cells().all(|(_, _, p)| *p == rat(1, 4)));
        let p = DiscreteDist::point(int(2));
        assert_eq!(independent_pair(&p, &x03()), comonotonic_pair(&p, &x03()));
        assert_eq!(independent_pair(&p, &x03()), antimonotonic_pair(&p, &x03()));
    }

    #[test]
    fn symmetrization_examples() {
        let j = comonotonic_pair(&x03(), &x03());
        assert_eq!(exchange_symmetrize(&j), j);
        let single = JointDist::new(vec![int(0)], vec![int(1)], vec![vec![int(1)]]).unwrap();
        let s = exchange_symmetrize(&single);
        assert_eq!(cell(&s, int(0), int(1)), rat(1, 2));
        assert_eq!(cell(&s, int(1), int(0)), rat(1, 2));
        assert!(s.has(Tag::Exchangeable));
        let a = antimonotonic_pair(&x03(), &x03());
        assert_eq!(exchange_symmetrize(&a), a);
    }

    #[test]
    fn nqd_examples() {
        assert!(is_nqd(&independent_pair(&x03(), &coin())));
        assert!(is_nqd(&antimonotonic_pair(&x03(), &coin())));
        assert!(!is_nqd(&comonotonic_pair(&x03(), &x03())));
    }

    #[test]
    fn martingale_examples() {
        let y = d(&[(int(1), rat(1, 2)), (int(3), rat(1, 2))]);
        let j = martingale_coupling(&DiscreteDist::point(int(2)), &y).unwrap();
        assert!(j.has(Tag::Martingale) && j.has(Tag::Independent));

        let x = d(&[(int(1), rat(1, 2)), (int(3), rat(1, 2))]);
        let y = d(&[(int(0), rat(1, 4)), (int(2), rat(1, 2)), (int(4), rat(1, 4))]);
        let j = martingale_coupling(&x, &y).unwrap();
        assert_eq!(j.x_marginal(), x);
        assert_eq!(j.y_marginal(), y);
        for (row, xv) in j.probs().iter().zip(j.x_values()) {
            let mass: Rational = row.iter().cloned().sum();
            let first: Rational = row.iter().zip(j.y_values()).map(|(p, v)| p * v).sum();
            assert_eq!(first, xv * mass);
        }

        let x = d(&[(int(0), rat(1, 2)), (int(2), rat(1, 2))]);
        assert_eq!(martingale_coupling(&x, &coin()), Err(InfeasibleReason::MeanGap));
        // spread the other way round is infeasible
        let y = d(&[(int(0), rat(1, 4)), (int(2), rat(1, 2)), (int(4), rat(1, 4))]);
        let x = d(&[(int(1), rat(1, 2)), (int(3), rat(1, 2))]);
        assert_eq!(martingale_coupling(&y, &x), Err(InfeasibleReason::NotConcaveOrdered));
    }

    #[test]
    fn convex_combine_examples() {
        let z = convex_combine(&antimonotonic_pair(&x03(), &x03()), &rat(1, 2)).unwrap();
        assert_eq!(z, d(&[(int(0), rat(1, 3)), (rat(3, 2), rat(2, 3))]));
        let z = convex_combine(&independent_pair(&x03(), &x03()), &rat(1, 2)).unwrap();
        assert_eq!(z, d(&[(int(0), rat(4, 9)), (rat(3, 2), rat(4, 9)), (int(3), rat(1, 9))]));
        assert_eq!(z.variance(), int(1));
        let j = independent_pair(&x03(), &coin());
        assert_eq!(convex_combine(&j, &int(1)).unwrap(), x03());
        assert_eq!(convex_combine(&j, &int(0)).unwrap(), coin());
        assert!(matches!(convex_combine(&j, &rat(3, 2)), Err(CouplingError::WeightDomain(_))));
    }

    #[test]
    fn tags_are_reverified_on_load() {
        let j = comonotonic_pair(&x03(), &x03());
        let back = JointDist::<Rational>::from_json_str(&j.to_json_string()).unwrap();
        assert_eq!(back, j);
        let lie = r#"{"x":["0","3"],"y":["0","3"],"p":[["2/3","0"],["0","1/3"]],"tags":["antimonotonic"]}"#;
        assert_eq!(
            JointDist::<Rational>::from_json_str(lie),
            Err(CouplingError::TagRejected(Tag::Antimonotonic))
        );
        let bad = r#"{"x":["0","3"],"y":["0"],"p":[["1/2"],["1/3"]]}"#;
        assert!(matches!(JointDist::<Rational>::from_json_str(bad), Err(CouplingError::BadTotal(_))));
    }
}
