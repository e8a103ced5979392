//! Seeded generators of joint laws per dependence class and of
//! concave-ordered pairs. Hand-picked pairs come first, then random ones.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AuditConfig, PairClass, Property};
use crate::coupling::{antimonotonic_pair, comonotonic_pair, convex_combine, exchange_symmetrize, independent_pair, JointDist};
use crate::dist::DiscreteDist;
use crate::orders::{coarsen, mean_preserving_spread};
use crate::scalar::{int, rat, Rational, Scalar};

/// Random marginals: `min_support..=max_support` atoms with values `k/den`
/// in `[-value_bound, value_bound]` and integer weights `1..=max_weight`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarginalFamily {
    pub min_support: usize,
    pub max_support: usize,
    pub value_bound: i64,
    pub denominators: Vec<i64>,
    pub max_weight: i64,
}

impl Default for MarginalFamily {
    fn default() -> Self {
        MarginalFamily { min_support: 1, max_support: 5, value_bound: 5, denominators: vec![1, 2, 4], max_weight: 6 }
    }
}

impl MarginalFamily {
    pub fn validate(&self) -> Result<(), String> {
        if self.min_support == 0 || self.min_support > self.max_support {
            return Err(format!("bad support range {}..={}", self.min_support, self.max_support));
        }
        if self.value_bound <= 0 || self.max_weight <= 0 {
            return Err("value bound and maximal weight must be positive".into());
        }
        if self.denominators.is_empty() || self.denominators.iter().any(|d| *d <= 0) {
            return Err("denominators must be a nonempty list of positive integers".into());
        }
        Ok(())
    }

    fn value(&self, rng: &mut ChaCha8Rng) -> Rational {
        let den = *self.denominators.choose(rng).expect("nonempty");
        let k = rng.gen_range(-self.value_bound * den..=self.value_bound * den);
        rat(k, den)
    }
}

pub fn random_dist(rng: &mut ChaCha8Rng, fam: &MarginalFamily) -> DiscreteDist<Rational> {
    let n = rng.gen_range(fam.min_support..=fam.max_support);
    let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=fam.max_weight)).collect();
    let total: i64 = weights.iter().sum();
    DiscreteDist::new(weights.into_iter().map(|w| (fam.value(rng), rat(w, total)))).expect("valid weights")
}

fn d(pairs: &[(Rational, Rational)]) -> DiscreteDist<Rational> {
    DiscreteDist::new(pairs.iter().cloned()).expect("valid canonical law")
}

/// Laws from the classical counterexamples, tried before anything random.
pub(crate) fn canonical_dists() -> Vec<DiscreteDist<Rational>> {
    vec![
        d(&[(int(1), rat(1, 2)), (int(3), rat(1, 2))]),
        d(&[(int(0), rat(2, 3)), (int(3), rat(1, 3))]),
        d(&[(int(-1), rat(1, 2)), (int(1), rat(1, 2))]),
        d(&[(rat(-3, 2), rat(1, 4)), (rat(-1, 2), rat(1, 4)), (int(1), rat(1, 2))]),
        d(&[(int(0), rat(1, 3)), (rat(3, 2), rat(2, 3))]),
    ]
}

fn rng_for(cfg: &AuditConfig, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ stream.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

fn class_stream(class: PairClass) -> u64 {
    PairClass::ALL.iter().position(|c| *c == class).expect("listed") as u64 + 1
}

fn property_stream(p: Property) -> u64 {
    100 + Property::all().iter().position(|q| *q == p).expect("listed") as u64
}

/// Equal-weight permutation coupling: both coordinates are the empirical
/// law of the same random sample.
fn permutation_joint<S: Scalar>(rng: &mut ChaCha8Rng, fam: &MarginalFamily) -> JointDist<S> {
    let m = rng.gen_range(2..=6usize);
    let vals: Vec<Rational> = (0..m).map(|_| fam.value(rng)).collect();
    let mut perm: Vec<usize> = (0..m).collect();
    perm.shuffle(rng);
    let w = S::from_rational(&rat(1, m as i64));
    JointDist::from_cells(
        (0..m).map(|i| (S::from_rational(&vals[i]), S::from_rational(&vals[perm[i]]), w.clone())),
        S::default_eps(),
    )
}

fn random_joint<S: Scalar>(rng: &mut ChaCha8Rng, fam: &MarginalFamily) -> JointDist<S> {
    let xs = random_dist(rng, fam);
    let ys = random_dist(rng, fam);
    let mut cells = Vec::new();
    let mut total = 0i64;
    for x in xs.values() {
        for y in ys.values() {
            let w = rng.gen_range(0..=3i64);
            total += w;
            cells.push((x.clone(), y.clone(), w));
        }
    }
    if total == 0 {
        cells[0].2 = 1;
        total = 1;
    }
    JointDist::from_cells(
        cells.into_iter().map(|(x, y, w)| (S::from_rational(&x), S::from_rational(&y), S::from_rational(&rat(w, total)))),
        S::default_eps(),
    )
}

fn point_at_mean<S: Scalar>(d: &DiscreteDist<S>) -> DiscreteDist<S> {
    DiscreteDist::point(d.mean())
}

/// `d` reflected to have mean `-mean(d)`.
fn mirrored<S: Scalar>(d: &DiscreteDist<S>) -> DiscreteDist<S> {
    let two_m = d.mean() * S::from_i64(2);
    d.map_values(|v| v.clone() - two_m.clone())
}

fn canonical_pairs<S: Scalar>(class: PairClass) -> Vec<JointDist<S>> {
    let mut out = Vec::new();
    for base in canonical_dists() {
        let d: DiscreteDist<S> = base.convert();
        let (m, neg, mir) = (point_at_mean(&d), d.negate(), mirrored(&d));
        match class {
            PairClass::AmAndId => out.push(antimonotonic_pair(&d, &d)),
            PairClass::InAndId => out.push(independent_pair(&d, &d)),
            PairClass::Id => {
                out.push(antimonotonic_pair(&d, &d));
                out.push(independent_pair(&d, &d));
            }
            PairClass::Exchangeable => {
                out.push(antimonotonic_pair(&d, &d));
                out.push(independent_pair(&d, &d));
                out.push(comonotonic_pair(&d, &d));
            }
            PairClass::Antimonotonic => {
                out.push(antimonotonic_pair(&m, &d));
                out.push(antimonotonic_pair(&neg, &d));
                out.push(antimonotonic_pair(&mir, &d));
                out.push(antimonotonic_pair(&d, &d));
            }
            PairClass::Independent => {
                out.push(independent_pair(&m, &d));
                out.push(independent_pair(&neg, &d));
                out.push(independent_pair(&mir, &d));
                out.push(independent_pair(&d, &d));
            }
            PairClass::Comonotonic => {
                out.push(comonotonic_pair(&m, &d));
                out.push(comonotonic_pair(&neg, &d));
                out.push(comonotonic_pair(&mir, &d));
            }
            PairClass::All => {
                out.push(antimonotonic_pair(&m, &d));
                out.push(antimonotonic_pair(&neg, &d));
                out.push(independent_pair(&mir, &d));
                out.push(comonotonic_pair(&neg, &d));
                out.push(antimonotonic_pair(&d, &d));
                out.push(independent_pair(&d, &d));
            }
        }
    }
    out
}

fn random_pair<S: Scalar>(class: PairClass, idx: usize, rng: &mut ChaCha8Rng, fam: &MarginalFamily) -> JointDist<S> {
    let dist = |rng: &mut ChaCha8Rng| -> DiscreteDist<S> { random_dist(rng, fam).convert() };
    match class {
        PairClass::AmAndId => {
            let a = dist(rng);
            antimonotonic_pair(&a, &a)
        }
        PairClass::InAndId => {
            let a = dist(rng);
            independent_pair(&a, &a)
        }
        PairClass::Id => match idx % 5 {
            0 => permutation_joint(rng, fam),
            1 => exchange_symmetrize(&permutation_joint::<S>(rng, fam)),
            k => {
                let a = dist(rng);
                [comonotonic_pair(&a, &a), antimonotonic_pair(&a, &a), independent_pair(&a, &a)][k - 2].clone()
            }
        },
        PairClass::Exchangeable => match idx % 4 {
            0 => exchange_symmetrize(&random_joint::<S>(rng, fam)),
            1 => exchange_symmetrize(&permutation_joint::<S>(rng, fam)),
            2 => {
                let a = dist(rng);
                antimonotonic_pair(&a, &a)
            }
            _ => {
                let a = dist(rng);
                independent_pair(&a, &a)
            }
        },
        PairClass::Antimonotonic | PairClass::Independent | PairClass::Comonotonic => {
            let a = dist(rng);
            let b = if idx % 3 == 2 { a.clone() } else { dist(rng) };
            match class {
                PairClass::Antimonotonic => antimonotonic_pair(&a, &b),
                PairClass::Independent => independent_pair(&a, &b),
                _ => comonotonic_pair(&a, &b),
            }
        }
        PairClass::All => match idx % 6 {
            0 | 1 => random_joint(rng, fam),
            2 => {
                let (a, b) = (dist(rng), dist(rng));
                comonotonic_pair(&a, &b)
            }
            3 => {
                let (a, b) = (dist(rng), dist(rng));
                antimonotonic_pair(&a, &b)
            }
            4 => {
                let (a, b) = (dist(rng), dist(rng));
                independent_pair(&a, &b)
            }
            _ => permutation_joint(rng, fam),
        },
    }
}

/// Up to `cfg.pair_budget` joint laws of the class, deterministic in the
/// seed. Every joint carries the tags of the class.
pub fn generate_pairs<S: Scalar>(class: PairClass, cfg: &AuditConfig) -> impl Iterator<Item = JointDist<S>> {
    let mut rng = rng_for(cfg, class_stream(class));
    let fam = cfg.family.clone();
    let mut idx = 0usize;
    canonical_pairs::<S>(class)
        .into_iter()
        .chain(std::iter::from_fn(move || {
            idx += 1;
            Some(random_pair::<S>(class, idx - 1, &mut rng, &fam))
        }))
        .take(cfg.pair_budget)
}

/// Single laws for the weak risk attitude checks.
pub(crate) fn generate_dists<S: Scalar>(cfg: &AuditConfig, property: Property) -> impl Iterator<Item = DiscreteDist<S>> {
    let mut rng = rng_for(cfg, property_stream(property));
    let fam = cfg.family.clone();
    canonical_dists()
        .into_iter()
        .map(|d| d.convert())
        .chain(std::iter::from_fn(move || Some(random_dist(&mut rng, &fam).convert())))
        .take(cfg.pair_budget)
}

fn half_mix<S: Scalar>(j: &JointDist<S>) -> DiscreteDist<S> {
    convex_combine(j, &S::half()).expect("1/2 is a valid weight")
}

fn random_spread<S: Scalar>(d: &DiscreteDist<S>, rng: &mut ChaCha8Rng) -> DiscreteDist<S> {
    let idx = rng.gen_range(0..d.len());
    let delta = S::from_rational(&rat(rng.gen_range(1..=8), 4));
    let split = S::from_rational(&rat(rng.gen_range(1..=3), 4));
    mean_preserving_spread(d, idx, &delta, &split).expect("valid spread parameters")
}

fn random_coarsening<S: Scalar>(d: &DiscreteDist<S>, rng: &mut ChaCha8Rng) -> DiscreteDist<S> {
    if d.is_degenerate() {
        return d.clone();
    }
    let vals: Vec<S> = d.values().cloned().collect();
    let mut edges = vec![vals[0].clone()];
    for w in vals.windows(2) {
        if rng.gen_bool(0.4) {
            edges.push((w[0].clone() + w[1].clone()) * S::half());
        }
    }
    edges.push(vals[vals.len() - 1].clone());
    coarsen(d, &edges).expect("edges cover the support")
}

/// Pairs `(X, Y)` with `X >=_cv Y`, from point masses, symmetrizations,
/// coarsenings and chains of mean-preserving spreads.
pub fn generate_ordered_pairs<S: Scalar>(
    cfg: &AuditConfig,
) -> impl Iterator<Item = (DiscreteDist<S>, DiscreteDist<S>)> {
    let mut canon: Vec<(DiscreteDist<S>, DiscreteDist<S>)> = Vec::new();
    let sym: DiscreteDist<S> = d(&[(int(-1), rat(1, 2)), (int(1), rat(1, 2))]).convert();
    let spread = mean_preserving_spread(&sym, 0, &S::half(), &S::half()).expect("valid spread");
    canon.push((sym, spread));
    for base in canonical_dists() {
        let x: DiscreteDist<S> = base.convert();
        canon.push((point_at_mean(&x), x.clone()));
        canon.push((half_mix(&antimonotonic_pair(&x, &x)), x.clone()));
        canon.push((half_mix(&independent_pair(&x, &x)), x));
    }
    let mut rng = rng_for(cfg, 7);
    let fam = cfg.family.clone();
    let mut idx = 0usize;
    canon
        .into_iter()
        .chain(std::iter::from_fn(move || {
            idx += 1;
            let x: DiscreteDist<S> = random_dist(&mut rng, &fam).convert();
            Some(match (idx - 1) % 5 {
                0 => {
                    let mut y = random_spread(&x, &mut rng);
                    for _ in 0..rng.gen_range(0..3) {
                        y = random_spread(&y, &mut rng);
                    }
                    (x, y)
                }
                1 => (point_at_mean(&x), x),
                2 => (random_coarsening(&x, &mut rng), x),
                3 => (half_mix(&antimonotonic_pair(&x, &x)), x),
                _ => (half_mix(&independent_pair(&x, &x)), x),
            })
        }))
        .take(cfg.pair_budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::{is_nqd, Tag};
    use crate::orders::concave_order_geq;

    fn cfg(budget: usize) -> AuditConfig {
        AuditConfig { pair_budget: budget, ..AuditConfig::default() }
    }

    #[test]
    fn every_joint_belongs_to_its_class() {
        for class in PairClass::ALL {
            let n = generate_pairs::<Rational>(class, &cfg(120))
                .inspect(|j| {
                    assert!(class.contains(j), "{class}: {:?}", j.tags());
                    if class.is_id() {
                        assert!(j.has(Tag::IdMarginals));
                    }
                    if class == PairClass::Exchangeable {
                        assert_eq!(j.to_json().p, j.transpose().to_json().p);
                    }
                })
                .count();
            assert_eq!(n, 120);
        }
    }

    #[test]
    fn comonotonic_id_joints_are_not_nqd() {
        let c = cfg(200);
        for j in generate_pairs::<Rational>(PairClass::Comonotonic, &c) {
            if j.has(Tag::IdMarginals) && !j.x_marginal().is_degenerate() {
                assert!(!is_nqd(&j));
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let c = cfg(50);
        let a: Vec<_> = generate_pairs::<Rational>(PairClass::All, &c).map(|j| j.to_json_string()).collect();
        let b: Vec<_> = generate_pairs::<Rational>(PairClass::All, &c).map(|j| j.to_json_string()).collect();
        assert_eq!(a, b);
        let other = AuditConfig { seed: 1, ..c };
        let z: Vec<_> = generate_pairs::<Rational>(PairClass::All, &other).map(|j| j.to_json_string()).collect();
        assert_ne!(a, z);
    }

    #[test]
    fn ordered_pairs_are_ordered() {
        for (x, y) in generate_ordered_pairs::<Rational>(&cfg(300)) {
            assert!(concave_order_geq(&x, &y).is_geq());
            assert_eq!(x.mean(), y.mean());
        }
    }
}
