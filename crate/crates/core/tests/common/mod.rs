#![allow(dead_code)]

use divrisk::audit::{random_dist, MarginalFamily};
use divrisk::functionals::{Functional, Piecewise, Poly};
use divrisk::orders::mean_preserving_spread;
use divrisk::scalar::{int, rat};
use divrisk::{DiscreteDist, Rational};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn d(pairs: &[(Rational, Rational)]) -> DiscreteDist<Rational> {
    DiscreteDist::new(pairs.iter().cloned()).unwrap()
}

pub fn point_at_mean(x: &DiscreteDist<Rational>) -> DiscreteDist<Rational> {
    DiscreteDist::point(x.mean())
}

/// Small rational laws: up to `max_atoms` atoms with values `k/den`, `|k| <= 12`.
pub fn arb_dist(max_atoms: usize) -> impl Strategy<Value = DiscreteDist<Rational>> {
    prop::collection::vec((-12i64..=12, prop::sample::select(vec![1i64, 2, 3, 4]), 1i64..=6), 1..=max_atoms).prop_map(
        |atoms| {
            let total: i64 = atoms.iter().map(|a| a.2).sum();
            DiscreteDist::new(atoms.into_iter().map(|(k, den, w)| (rat(k, den), rat(w, total)))).unwrap()
        },
    )
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` seeded laws from the audit's marginal family with a custom support cap.
pub fn seeded_dists(seed: u64, n: usize, max_support: usize) -> Vec<DiscreteDist<Rational>> {
    let fam = MarginalFamily { max_support, ..MarginalFamily::default() };
    let mut rng = seeded(seed);
    (0..n).map(|_| random_dist(&mut rng, &fam)).collect()
}

/// Pairs with matching means most of the time, so both verdicts occur.
pub fn arb_pair() -> impl Strategy<Value = (DiscreteDist<Rational>, DiscreteDist<Rational>)> {
    (arb_dist(5), arb_dist(5), 0u8..4, 1i64..=8, 1i64..=3).prop_map(|(x, y, how, delta, split)| match how {
        0 => (x, y),
        1 => {
            let shift = x.mean() - y.mean();
            (x, y.shift(&shift))
        }
        2 => {
            let spread = mean_preserving_spread(&x, 0, &rat(delta, 4), &rat(split, 4)).unwrap();
            (x, spread)
        }
        _ => {
            let spread = mean_preserving_spread(&y, y.len() - 1, &rat(delta, 4), &rat(split, 4)).unwrap();
            (spread, y)
        }
    })
}

/// Direct sum `E[min(X, k)]`: the single-kink concave utility.
pub fn kink_utility(x: &DiscreteDist<Rational>, k: &Rational) -> Rational {
    x.atoms().iter().map(|a| a.prob.clone() * a.value.clone().min(k.clone())).sum()
}

/// Direct sum `E[(X - k)+]`.
pub fn call_value(x: &DiscreteDist<Rational>, k: &Rational) -> Rational {
    x.atoms().iter().map(|a| a.prob.clone() * (a.value.clone() - k.clone()).max(int(0))).sum()
}

pub fn kinks(x: &DiscreteDist<Rational>, y: &DiscreteDist<Rational>) -> Vec<Rational> {
    let mut ks: Vec<Rational> = x.values().chain(y.values()).cloned().collect();
    ks.sort();
    ks.dedup();
    ks
}

/// Oracle for `X >=_cv Y`: equal means and every `min(., k)` utility favours `X`.
pub fn concave_oracle(x: &DiscreteDist<Rational>, y: &DiscreteDist<Rational>) -> bool {
    x.mean() == y.mean() && kinks(x, y).iter().all(|k| kink_utility(x, k) >= kink_utility(y, k))
}

pub fn arb_rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

pub fn arb_poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(arb_rational(), 1..=4).prop_map(Poly::new)
}

pub fn arb_piecewise() -> impl Strategy<Value = Piecewise> {
    prop::collection::btree_set(-8i64..=8, 0..=2).prop_flat_map(|cuts| {
        let breakpoints: Vec<Rational> = cuts.into_iter().map(|c| rat(c, 4)).collect();
        let n = breakpoints.len() + 1;
        prop::collection::vec(arb_poly(), n).prop_map(move |pieces| Piecewise::new(breakpoints.clone(), pieces).unwrap())
    })
}

pub fn arb_leaf() -> impl Strategy<Value = Functional> {
    prop_oneof![
        Just(Functional::Mean),
        Just(Functional::Var),
        Just(Functional::EssSup),
        Just(Functional::EssInf),
        (1i64..=7).prop_map(|k| Functional::Quantile(rat(k, 8))),
        arb_rational().prop_map(Functional::StopLoss),
        arb_rational().prop_map(Functional::ExpMoment),
        arb_rational().prop_map(Functional::Const),
        arb_piecewise().prop_map(Functional::Eu),
        arb_piecewise().prop_map(Functional::Dual),
    ]
}

pub fn arb_functional() -> impl Strategy<Value = Functional> {
    arb_leaf().prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Functional::Neg(Box::new(a))),
            inner.clone().prop_map(Functional::abs),
            (inner.clone(), arb_rational()).prop_map(|(a, e)| Functional::pow(a, e)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Functional::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Functional::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Functional::mul(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Functional::div(a, b)),
        ]
    })
}
