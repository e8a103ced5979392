//! Symmetrization sequences: antimonotonic halving, conditional
//! symmetrization along a martingale coupling, and dyadic i.i.d. averages.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::coupling::{antimonotonic_pair, convex_combine, independent_pair, JointDist, Tag};
use crate::dist::DiscreteDist;
use crate::orders::coarsen;
use crate::scalar::Scalar;

/// Largest support kept in independent mode before coarsening.
pub const INDEPENDENT_SUPPORT_CAP: usize = 4096;

/// Lᵖ perturbation a coarsening aims to stay under.
pub const COARSENING_TARGET: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IterateError {
    #[error("exponent p must be a finite number >= 1, got {0}")]
    Exponent(f64),
    #[error("support of {atoms} atoms exceeds the cap of {cap}; coarsen the input or take fewer steps")]
    SupportCap { atoms: usize, cap: usize },
    #[error("joint law does not carry a verified martingale tag")]
    NotMartingale,
    #[error("mean drifted at step {0}")]
    MeanDrift(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingMode {
    Antimonotonic,
    Independent,
}

impl std::str::FromStr for CouplingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "antimonotonic" | "am" => Ok(CouplingMode::Antimonotonic),
            "independent" | "in" | "iid" => Ok(CouplingMode::Independent),
            _ => Err(format!("unknown coupling mode {s:?}")),
        }
    }
}

/// Law of `(X + X')/2` where `X'` is an antimonotonic or independent copy.
pub fn symmetrization_step<S: Scalar>(d: &DiscreteDist<S>, mode: CouplingMode) -> DiscreteDist<S> {
    let j = match mode {
        CouplingMode::Antimonotonic => antimonotonic_pair(d, d),
        CouplingMode::Independent => independent_pair(d, d),
    };
    convex_combine(&j, &S::half()).expect("1/2 is a valid weight")
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceStep<S> {
    pub n: usize,
    pub dist: DiscreteDist<S>,
    pub range_width: S,
    pub sup_distance: S,
    pub lp_distance: f64,
    /// `E|X_n - E X|^p`, exact, when `p` is an integer.
    pub abs_moment: Option<S>,
    pub coarsened: bool,
    /// Lᵖ size of the displacement introduced by coarsening at this step.
    pub perturbation: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationTrace<S> {
    pub steps: Vec<TraceStep<S>>,
    pub p: f64,
    pub mode: CouplingMode,
    pub mean: S,
}

fn integer_exponent(p: f64) -> Option<u32> {
    (p.fract() == 0.0 && p <= 64.0).then(|| p.to_u32()).flatten()
}

fn record<S: Scalar>(n: usize, dist: DiscreteDist<S>, mean: &S, p: f64) -> TraceStep<S> {
    TraceStep {
        n,
        range_width: dist.range_width(),
        sup_distance: dist.sup_distance(mean),
        lp_distance: dist.lp_distance(mean, p),
        abs_moment: integer_exponent(p).map(|k| dist.abs_moment(mean, k)),
        coarsened: false,
        perturbation: None,
        dist,
    }
}

/// Conditional expectation on `bins` equal-width bins, with the Lᵖ size of
/// the displacement `X - E[X | bin]`.
fn coarsen_equal_width<S: Scalar>(d: &DiscreteDist<S>, bins: usize, p: f64) -> (DiscreteDist<S>, f64) {
    let (lo, hi) = d.support_bounds();
    let width = (hi.clone() - lo.clone()) / S::from_i64(bins as i64);
    let mut edges: Vec<S> = (0..bins).map(|k| lo.clone() + width.clone() * S::from_i64(k as i64)).collect();
    edges.push(hi);
    let out = coarsen(d, &edges).expect("edges cover the support");
    let nb = edges.len() - 1;
    let mut mass = vec![0.0f64; nb];
    let mut moment = vec![0.0f64; nb];
    let bin_of = |v: &S| edges[1..].partition_point(|e| e < v).min(nb - 1);
    for a in d.atoms() {
        let b = bin_of(&a.value);
        mass[b] += a.prob.to_f64();
        moment[b] += a.prob.to_f64() * a.value.to_f64();
    }
    let disp: f64 = d
        .atoms()
        .iter()
        .map(|a| {
            let b = bin_of(&a.value);
            a.prob.to_f64() * (a.value.to_f64() - moment[b] / mass[b]).abs().powf(p)
        })
        .sum();
    (out, disp.powf(1.0 / p))
}

fn check_exponent(p: f64) -> Result<(), IterateError> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(IterateError::Exponent(p))
    }
}

fn run<S: Scalar>(
    d: &DiscreteDist<S>,
    mode: CouplingMode,
    n_steps: usize,
    p: f64,
    allow_coarsening: bool,
) -> Result<IterationTrace<S>, IterateError> {
    check_exponent(p)?;
    let mean = d.mean();
    let mut steps = vec![record(0, d.clone(), &mean, p)];
    let mut cur = d.clone();
    for n in 1..=n_steps {
        let mut next = symmetrization_step(&cur, mode);
        let mut coarsened = None;
        if mode == CouplingMode::Independent && next.len() > INDEPENDENT_SUPPORT_CAP {
            if !allow_coarsening {
                return Err(IterateError::SupportCap { atoms: next.len(), cap: INDEPENDENT_SUPPORT_CAP });
            }
            let (c, pert) = coarsen_equal_width(&next, INDEPENDENT_SUPPORT_CAP / 2, p);
            next = c;
            coarsened = Some(pert);
        }
        if !next.mean().close(&mean, d.eps().max(1e-9)) {
            return Err(IterateError::MeanDrift(n));
        }
        let mut step = record(n, next.clone(), &mean, p);
        step.coarsened = coarsened.is_some();
        step.perturbation = coarsened;
        steps.push(step);
        cur = next;
    }
    Ok(IterationTrace { steps, p, mode, mean })
}

/// `n_steps` symmetrizations starting from `d`. In independent mode,
/// supports above [`INDEPENDENT_SUPPORT_CAP`] are coarsened to equal-width
/// bins and the step is flagged with the perturbation it caused.
pub fn run_sequence<S: Scalar>(
    d: &DiscreteDist<S>,
    mode: CouplingMode,
    n_steps: usize,
    p: f64,
) -> Result<IterationTrace<S>, IterateError> {
    run(d, mode, n_steps, p, true)
}

/// Exact laws of the dyadic averages `2^-k (Y_1 + … + Y_{2^k})` of i.i.d.
/// copies of `d`, `k = 0..=n`.
pub fn dyadic_baseline<S: Scalar>(d: &DiscreteDist<S>, n: usize, p: f64) -> Result<IterationTrace<S>, IterateError> {
    run(d, CouplingMode::Independent, n, p, false)
}

impl<S: Scalar> IterationTrace<S> {
    pub fn range_widths(&self) -> Vec<S> {
        self.steps.iter().map(|s| s.range_width.clone()).collect()
    }

    /// One JSON object per step.
    pub fn to_json_lines(&self, with_dist: bool) -> String {
        let mut out = String::new();
        for s in &self.steps {
            let mut rec = json!({
                "n": s.n,
                "mode": self.mode,
                "atoms": s.dist.len(),
                "range_width": s.range_width.to_literal(),
                "sup_distance": s.sup_distance.to_literal(),
                "p": self.p,
                "lp_distance": s.lp_distance,
                "coarsened": s.coarsened,
            });
            if let Some(m) = &s.abs_moment {
                rec["abs_moment"] = json!(m.to_literal());
            }
            if let Some(e) = s.perturbation {
                rec["perturbation"] = json!(e);
                rec["within_target"] = json!(e <= COARSENING_TARGET);
            }
            if with_dist {
                rec["dist"] = serde_json::to_value(s.dist.to_json()).expect("dist serializes");
            }
            out.push_str(&rec.to_string());
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalStep<S> {
    pub n: usize,
    /// Unconditional law of `Y_n = X + Z_n`.
    pub y_law: DiscreteDist<S>,
    /// Largest range of the conditional laws of `Z_n` given `X`.
    pub max_conditional_range: S,
    /// `max |Y_n - X|` under the coupling.
    pub sup_distance: S,
}

/// Symmetrizes `Z = Y - X` antimonotonically within each row of a
/// martingale coupling, keeping `E[Z_n | X] = 0`.
pub fn conditional_symmetrization<S: Scalar>(
    j: &JointDist<S>,
    n_steps: usize,
) -> Result<Vec<ConditionalStep<S>>, IterateError> {
    if !j.has(Tag::Martingale) {
        return Err(IterateError::NotMartingale);
    }
    let rows = j.row_sums();
    let mut conds: Vec<(S, S, DiscreteDist<S>)> = Vec::new();
    for (i, (x, px)) in j.x_values().iter().zip(&rows).enumerate() {
        if px.is_zero() {
            continue;
        }
        let z = DiscreteDist::from_weights(
            j.probs()[i]
                .iter()
                .zip(j.y_values())
                .filter(|(p, _)| !p.is_zero())
                .map(|(p, y)| (y.clone() - x.clone(), p.clone() / px.clone())),
            j.eps(),
        );
        conds.push((x.clone(), px.clone(), z));
    }
    let snapshot = |n: usize, conds: &[(S, S, DiscreteDist<S>)]| {
        let shifted: Vec<(S, DiscreteDist<S>)> = conds.iter().map(|(x, p, z)| (p.clone(), z.shift(x))).collect();
        let parts: Vec<(S, &DiscreteDist<S>)> = shifted.iter().map(|(p, d)| (p.clone(), d)).collect();
        let zero = S::zero();
        let max_of = |f: &dyn Fn(&DiscreteDist<S>) -> S| {
            conds.iter().map(|(_, _, z)| f(z)).fold(S::zero(), |m, v| if v > m { v } else { m })
        };
        ConditionalStep {
            n,
            y_law: DiscreteDist::mixture(&parts),
            max_conditional_range: max_of(&|z| z.range_width()),
            sup_distance: max_of(&|z| z.sup_distance(&zero)),
        }
    };
    let mut out = vec![snapshot(0, &conds)];
    for n in 1..=n_steps {
        for c in conds.iter_mut() {
            c.2 = symmetrization_step(&c.2, CouplingMode::Antimonotonic);
        }
        out.push(snapshot(n, &conds));
    }
    Ok(out)
}
