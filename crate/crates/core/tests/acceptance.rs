//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every criterion prints exactly one pass/fail line.

mod common;

use std::time::{Duration, Instant};

use common::{arb_dist, arb_functional, arb_pair, concave_oracle, seeded, seeded_dists};
use divrisk::audit::{
    check, generate_ordered_pairs, implication_matrix, AuditConfig, AuditReport, MarginalFamily, PairClass, Property,
    Verdict,
};
use divrisk::coupling::{
    antimonotonic_pair, comonotonic_pair, convex_combine, exchange_symmetrize, independent_pair, is_martingale, is_nqd,
    martingale_coupling,
};
use divrisk::dist::DistJson;
use divrisk::functionals::{catalog, catalog_entry, evaluate, parse_functional, parse_preference, Functional};
use divrisk::iterate::{dyadic_baseline, run_sequence, CouplingMode};
use divrisk::orders::coarsen;
use divrisk::scalar::{int, rat};
use divrisk::{concave_order_geq, DiscreteDist, JointDist, Rational, Value};
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::Rng;

type Outcome = Result<String, String>;

/// Violated reports from criteria 1–4 and 9, re-verified by criterion 10.
#[derive(Default)]
struct Ctx {
    violations: Vec<(String, AuditReport)>,
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn d(pairs: &[(Rational, Rational)]) -> DiscreteDist<Rational> {
    DiscreteDist::new(pairs.iter().cloned()).unwrap()
}

fn spec(name: &str) -> Functional {
    catalog_entry(name).unwrap().preference.criteria()[0].spec.clone()
}

fn exact(v: &Value) -> Option<&Rational> {
    v.as_exact()
}

fn dist_of(json: &DistJson) -> DiscreteDist<Rational> {
    DiscreteDist::from_json(json).unwrap()
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure!(t < limit, "took {t:?}, limit {limit:?}");
    Ok(())
}

fn violated(report: &AuditReport) -> Result<&divrisk::audit::Certificate, String> {
    ensure!(report.verdict == Verdict::Violated, "{} reported no violation", report.property);
    report.certificate.as_ref().ok_or_else(|| "violated verdict without certificate".to_string())
}

fn weird_strange(ctx: &mut Ctx) -> Outcome {
    let start = Instant::now();
    let f = spec("WeirdVar");
    let x = d(&[(int(0), rat(2, 3)), (int(3), rat(1, 3))]);
    let z = convex_combine(&antimonotonic_pair(&x, &x), &rat(1, 2)).unwrap();
    ensure!(z == d(&[(int(0), rat(1, 3)), (rat(3, 2), rat(2, 3))]), "unexpected half-mix {}", z.to_json_string());
    let (ux, uz) = (evaluate(&f, &x).unwrap(), evaluate(&f, &z).unwrap());
    ensure!(exact(&ux) == Some(&int(1)), "U(X) = {ux}");
    ensure!(exact(&uz) == Some(&rat(1, 4)), "U(Z) = {uz}");
    let pref = catalog_entry("WeirdVar").unwrap().preference;
    let report = check(&pref, Property::Diversification(PairClass::AmAndId), &AuditConfig::default());
    let cert = violated(&report)?;
    ensure!(dist_of(&cert.x) == x && dist_of(&cert.y) == x, "certificate marginals differ from X");
    ensure!(dist_of(&cert.candidate) == z, "certificate mix differs from Z");
    ensure!(cert.lambda.as_deref() == Some("1/2"), "lambda {:?}", cert.lambda);
    ensure!(cert.candidate_values == [Value::Exact(rat(1, 4))], "candidate values {:?}", cert.candidate_values);
    ensure!(cert.reference_values == [Value::Exact(int(1))], "reference values {:?}", cert.reference_values);
    ctx.violations.push(("WeirdVar div_AM&ID".into(), report));
    within(start, Duration::from_secs(1))?;
    Ok(format!("U(X) = 1, U(Z) = 1/4, certificate exact ({:?})", start.elapsed()))
}

fn mean_variance(ctx: &mut Ctx) -> Outcome {
    let pref = catalog_entry("MeanVarQuarter").unwrap().preference;
    let report = check(&pref, Property::Diversification(PairClass::Antimonotonic), &AuditConfig::default());
    let cert = violated(&report)?;
    ensure!(dist_of(&cert.x) == DiscreteDist::point(int(1)), "X = {:?}", cert.x);
    ensure!(dist_of(&cert.y) == d(&[(int(1), rat(1, 2)), (int(3), rat(1, 2))]), "Y = {:?}", cert.y);
    ensure!(cert.lambda.as_deref() == Some("1/2"), "lambda {:?}", cert.lambda);
    ensure!(cert.reference_values == [Value::Exact(int(1))], "reference values {:?}", cert.reference_values);
    let mixed = cert.candidate_values[0].to_f64();
    let oracle = 1.5 - 0.5f64.sqrt();
    ensure!((mixed - oracle).abs() <= 1e-12, "mix value {mixed} vs {oracle}");
    ensure!((mixed - 0.7928932188).abs() <= 1e-10, "mix value {mixed} vs 0.7928932188");
    ctx.violations.push(("MeanVarQuarter div_AM".into(), report));
    let strong = check(&pref, Property::StrongRiskAversion, &AuditConfig::default());
    ensure!(strong.verdict == Verdict::NoViolationWithinBudget, "strong_RA violated");
    ensure!(strong.pairs_tested == 500, "strong_RA tested {} pairs", strong.pairs_tested);
    Ok(format!("values 1 vs {mixed:.10}; strong_RA clean over {} pairs", strong.pairs_tested))
}

fn weird_strange_independent(ctx: &mut Ctx) -> Outcome {
    let pref = catalog_entry("WeirdVar").unwrap().preference;
    let report = check(&pref, Property::Diversification(PairClass::InAndId), &AuditConfig::default());
    let cert = violated(&report)?;
    ensure!(cert.reference_values == [Value::Exact(int(1))], "reference values {:?}", cert.reference_values);
    ensure!(cert.candidate_values == [Value::Exact(int(0))], "candidate values {:?}", cert.candidate_values);
    ctx.violations.push(("WeirdVar div_IN&ID".into(), report));
    Ok("certificate values (1, 0)".into())
}

fn not_strong(ctx: &mut Ctx) -> Outcome {
    let x = d(&[(int(-1), rat(1, 2)), (int(1), rat(1, 2))]);
    let y = d(&[(rat(-3, 2), rat(1, 4)), (rat(-1, 2), rat(1, 4)), (int(1), rat(1, 2))]);
    ensure!(concave_order_geq(&x, &y).is_geq(), "X >=_cv Y not confirmed");
    let f = spec("ExpRatio");
    let (vx, vy) = (evaluate(&f, &x).unwrap().to_f64(), evaluate(&f, &y).unwrap().to_f64());
    let brute = |pts: &[(f64, f64)]| {
        let m = |a: f64| pts.iter().map(|(v, p)| p * (a * v).exp()).sum::<f64>();
        m(2.0) / m(1.0)
    };
    let ox = brute(&[(-1.0, 0.5), (1.0, 0.5)]);
    let oy = brute(&[(-1.5, 0.25), (-0.5, 0.25), (1.0, 0.5)]);
    ensure!((vx - 2f64.cosh() / 1f64.cosh()).abs() <= 1e-12, "V(X) = {vx}");
    ensure!((vx - ox).abs() <= 1e-12 && (vy - oy).abs() <= 1e-12, "oracle mismatch {vx} {ox} {vy} {oy}");
    ensure!(vx > vy, "V(X) = {vx} <= V(Y) = {vy}");
    let pref = catalog_entry("ExpRatio").unwrap().preference;
    let report = check(&pref, Property::StrongRiskAversion, &AuditConfig::default());
    violated(&report)?;
    ctx.violations.push(("ExpRatio strong_RA".into(), report));

    let ds = seeded_dists(404, 400, 5);
    let mut worst = f64::INFINITY;
    for pair in ds.chunks(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let (va, vb) = (evaluate(&f, a).unwrap().to_f64(), evaluate(&f, b).unwrap().to_f64());
        let j = independent_pair(a, b);
        for k in 0..=16 {
            let l = k as f64 / 16.0;
            let mix = convex_combine(&j, &rat(k, 16)).unwrap();
            worst = worst.min(va.powf(l) * vb.powf(1.0 - l) - evaluate(&f, &mix).unwrap().to_f64());
        }
    }
    ensure!(worst >= -1e-12, "geometric mixing slack {worst}");
    Ok(format!("V(X) = {vx:.12} > V(Y) = {vy:.12}; strong_RA violated; worst mixing slack {worst:.3e}"))
}

fn range_halving(_: &mut Ctx) -> Outcome {
    let start = Instant::now();
    let fam = MarginalFamily { max_support: 12, ..MarginalFamily::default() };
    let mut rng = seeded(5);
    let mut steps = 0usize;
    for i in 0..1000 {
        let x = divrisk::audit::random_dist(&mut rng, &fam);
        let trace = run_sequence(&x, CouplingMode::Antimonotonic, 40, 2.0).map_err(|e| e.to_string())?;
        let widths = trace.range_widths();
        for (n, w) in widths.windows(2).enumerate() {
            ensure!(w[1].clone() * int(2) <= w[0], "dist {i}: R_{} = {} > R_{n}/2 = {}", n + 1, w[1], w[0]);
            steps += 1;
        }
        let bound = widths[0].clone() * rat(1, 1 << 40);
        let last = &trace.steps[40];
        ensure!(last.sup_distance <= bound, "dist {i}: sup distance {} > {}", last.sup_distance, bound);
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!("{steps} steps halve the range exactly ({:?})", start.elapsed()))
}

fn martingale_duality(_: &mut Ctx) -> Outcome {
    let cfg = AuditConfig { pair_budget: 100, seed: 6, ..AuditConfig::default() };
    let mut pairs: Vec<(DiscreteDist<Rational>, DiscreteDist<Rational>)> = generate_ordered_pairs(&cfg).collect();
    let ds = seeded_dists(66, 200, 5);
    for (k, pair) in ds.chunks(2).enumerate() {
        let (a, b) = (&pair[0], &pair[1]);
        let b = b.shift(&(a.mean() - b.mean()));
        pairs.push(if k % 2 == 0 { (a.clone(), b) } else { (b, a.clone()) });
    }
    // reversing half of the ordered pairs mixes in infeasible cases
    for (x, y) in pairs.iter_mut().skip(50).take(50) {
        std::mem::swap(x, y);
    }
    let (mut feasible, mut disagreements) = (0, 0);
    for (x, y) in &pairs {
        ensure!(x.mean() == y.mean(), "unmatched means");
        let ordered = concave_order_geq(x, y).is_geq();
        match martingale_coupling(x, y) {
            Ok(j) => {
                feasible += 1;
                if !ordered {
                    disagreements += 1;
                }
                ensure!(is_martingale(&j), "coupling is not a martingale");
                for (i, row) in j.probs().iter().enumerate() {
                    let mass: Rational = row.iter().sum();
                    if mass != int(0) {
                        let first: Rational = row.iter().zip(j.y_values()).map(|(p, v)| p * v).sum();
                        ensure!(first / mass == j.x_values()[i], "row {i} conditional mean is off");
                    }
                }
            }
            Err(_) if ordered => disagreements += 1,
            Err(_) => {}
        }
    }
    ensure!(disagreements == 0, "{disagreements} disagreements");
    Ok(format!("{} pairs, {feasible} feasible, 0 disagreements", pairs.len()))
}

fn lln(_: &mut Ctx) -> Outcome {
    let coin = d(&[(int(0), rat(1, 2)), (int(1), rat(1, 2))]);
    let trace = run_sequence(&coin, CouplingMode::Independent, 6, 2.0).map_err(|e| e.to_string())?;
    for s in &trace.steps {
        let want = rat(1, 4 << s.n);
        ensure!(s.abs_moment.as_ref() == Some(&want), "step {}: {:?} != {want}", s.n, s.abs_moment);
    }
    let fam = MarginalFamily { max_support: 4, value_bound: 3, denominators: vec![1, 2], ..MarginalFamily::default() };
    let mut rng = seeded(7);
    for i in 0..100 {
        let x = divrisk::audit::random_dist(&mut rng, &fam);
        let base = dyadic_baseline(&x, 6, 2.0).map_err(|e| e.to_string())?;
        let anti = run_sequence(&x, CouplingMode::Antimonotonic, 6, 2.0).map_err(|e| e.to_string())?;
        for (a, b) in anti.steps.iter().zip(&base.steps) {
            ensure!(concave_order_geq(&a.dist, &b.dist).is_geq(), "dist {i} step {}: iterate not >=_cv baseline", a.n);
        }
    }
    Ok("L2 distance^2 = 2^-n/4 for n <= 6; antimonotonic iterate dominates on 100 laws".into())
}

/// Laws that dominate `y` in the concave order.
fn dominating(y: &DiscreteDist<Rational>, rng: &mut impl Rng) -> DiscreteDist<Rational> {
    match rng.gen_range(0..4) {
        0 => DiscreteDist::point(y.mean()),
        1 => convex_combine(&antimonotonic_pair(y, y), &rat(1, 2)).unwrap(),
        2 if y.len() > 2 => {
            let vals: Vec<Rational> = y.values().cloned().collect();
            coarsen(y, &[vals[0].clone(), vals[vals.len() / 2].clone(), vals[vals.len() - 1].clone()]).unwrap()
        }
        _ => y.clone(),
    }
}

fn nqd_sums(_: &mut Ctx) -> Outcome {
    let ys = seeded_dists(8, 400, 4);
    let mut rng = seeded(88);
    let mut failures = 0;
    for pair in ys.chunks(2) {
        let (y1, y2) = (&pair[0], &pair[1]);
        let (x1, x2) = (dominating(y1, &mut rng), dominating(y2, &mut rng));
        ensure!(concave_oracle(&x1, y1) && concave_oracle(&x2, y2), "marginals not ordered");
        let jx = if rng.gen_bool(0.5) { antimonotonic_pair(&x1, &x2) } else { independent_pair(&x1, &x2) };
        ensure!(is_nqd(&jx), "X coupling is not NQD");
        // λ = 1/2 scales both sums by the same factor
        let sx = convex_combine(&jx, &rat(1, 2)).unwrap();
        let sy = convex_combine(&independent_pair(y1, y2), &rat(1, 2)).unwrap();
        if !concave_order_geq(&sx, &sy).is_geq() {
            failures += 1;
        }
    }
    ensure!(failures == 0, "{failures} failures");
    Ok("200 quadruples, 0 failures".into())
}

fn matrix(ctx: &mut Ctx) -> Outcome {
    let start = Instant::now();
    let cfg = AuditConfig::default();
    let m = implication_matrix(&cfg);
    let elapsed = start.elapsed();
    ensure!(m.passed, "mismatches: {:?}", m.mismatches);
    ensure!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
    let again = implication_matrix(&cfg);
    ensure!(again.to_json_string() == m.to_json_string(), "second run differs");
    let mut n = 0;
    for row in &m.rows {
        for cell in &row.cells {
            if cell.verdict == Verdict::Violated {
                ctx.violations.push((format!("{} {}", row.name, cell.property), cell.report.clone()));
                n += 1;
            }
        }
    }
    Ok(format!("8 x 20 cells match, {n} violations, deterministic ({elapsed:?})"))
}

fn run_cases<T: std::fmt::Debug>(
    cases: u32,
    strategy: impl proptest::strategy::Strategy<Value = T>,
    test: impl Fn(T) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn property_suites(ctx: &mut Ctx) -> Outcome {
    run_cases(500, arb_pair(), |(x, y)| {
        proptest::prop_assert_eq!(concave_order_geq(&x, &y).is_geq(), concave_oracle(&x, &y));
        Ok(())
    })
    .map_err(|e| format!("order oracle: {e}"))?;

    for entry in catalog() {
        let back = parse_preference(&entry.preference.to_string()).map_err(|e| e.to_string())?;
        ensure!(back == entry.preference, "catalog {} does not round-trip", entry.name);
    }
    run_cases(200, arb_functional(), |f| {
        let back = parse_functional(&f.to_string()).map_err(|e| TestCaseError::fail(e.to_string()))?;
        proptest::prop_assert_eq!(back, f);
        Ok(())
    })
    .map_err(|e| format!("DSL round trip: {e}"))?;

    run_cases(500, (arb_dist(5), arb_dist(5)), |(x, y)| {
        let joints: Vec<JointDist<Rational>> =
            vec![comonotonic_pair(&x, &y), antimonotonic_pair(&x, &y), independent_pair(&x, &y)];
        for j in &joints {
            proptest::prop_assert!(j.x_marginal() == x && j.y_marginal() == y);
        }
        let half = DiscreteDist::mixture(&[(rat(1, 2), &x), (rat(1, 2), &y)]);
        let sym = exchange_symmetrize(&joints[2]);
        proptest::prop_assert!(sym.x_marginal() == half && sym.y_marginal() == half);
        let shifted = y.shift(&(x.mean() - y.mean()));
        if let Ok(j) = martingale_coupling(&x, &shifted) {
            proptest::prop_assert!(j.x_marginal() == x && j.y_marginal() == shifted);
        }
        Ok(())
    })
    .map_err(|e| format!("marginal exactness: {e}"))?;

    for (name, report) in &ctx.violations {
        report.verify().map_err(|e| format!("certificate {name}: {e}"))?;
        let text = report.to_json_string();
        let back: AuditReport = serde_json::from_str(&text).map_err(|e| format!("{name}: {e}"))?;
        back.verify().map_err(|e| format!("reloaded certificate {name}: {e}"))?;
    }
    Ok(format!("order 500, DSL 8 + 200, marginals 500, {} certificates re-verified", ctx.violations.len()))
}

fn main() {
    let criteria: [(&str, fn(&mut Ctx) -> Outcome); 10] = [
        ("weak-strange counterexample", weird_strange),
        ("mean-variance counterexample", mean_variance),
        ("weak-strange independent counterexample", weird_strange_independent),
        ("not-strong counterexample", not_strong),
        ("range halving", range_halving),
        ("martingale/order duality", martingale_duality),
        ("law of large numbers", lln),
        ("NQD sum domination", nqd_sums),
        ("implication matrix", matrix),
        ("property suites", property_suites),
    ];
    let mut ctx = Ctx::default();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(&mut ctx)))
            .unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
