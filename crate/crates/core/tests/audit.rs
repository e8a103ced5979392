use divrisk::audit::{
    check, check_anti_diversification, check_diversification, generate_pairs, verify_certificate, AuditConfig,
    PairClass, Property,
};
use divrisk::functionals::{catalog, parse_preference};
use divrisk::{NumericMode, Rational};

fn small(seed: u64) -> AuditConfig {
    AuditConfig { pair_budget: 40, seed, ..AuditConfig::default() }
}

#[test]
fn anti_diversification_is_diversification_of_the_reversed_preference() {
    let cfg = small(3);
    for entry in catalog() {
        let rev = entry.preference.reversed();
        for class in PairClass::ALL {
            let anti = check_anti_diversification(&entry.preference, class, &cfg);
            let div = check_diversification(&rev, class, &cfg);
            assert_eq!(anti.outcome(), div.outcome(), "{} {class}", entry.name);
        }
    }
}

#[test]
fn every_violation_carries_a_checkable_certificate() {
    let cfg = small(5);
    for entry in catalog() {
        for property in Property::all() {
            let report = check(&entry.preference, property, &cfg);
            report.verify().unwrap_or_else(|e| panic!("{} {property}: {e}", entry.name));
            if let Some(cert) = &report.certificate {
                assert!(verify_certificate(property, cert, NumericMode::ExactRational).is_ok());
            }
        }
    }
}

#[test]
fn tampered_certificates_are_rejected() {
    let pref = parse_preference("total(mean - var*abs(2 - var), higher)").unwrap();
    let report = check(&pref, Property::Diversification(PairClass::AmAndId), &AuditConfig::default());
    let mut cert = report.certificate.clone().unwrap();
    cert.candidate_values = vec![divrisk::Value::from_i64(2)];
    assert!(verify_certificate(report.property, &cert, NumericMode::ExactRational).is_err());
    let mut cert = report.certificate.unwrap();
    cert.lambda = Some("1/3".into());
    assert!(verify_certificate(report.property, &cert, NumericMode::ExactRational).is_err());
}

#[test]
fn searches_are_deterministic_in_the_seed() {
    let pref = parse_preference("total(mean - var, higher)").unwrap();
    for property in [Property::WeakRiskSeeking, Property::AntiDiversification(PairClass::Independent)] {
        let a = check(&pref, property, &small(9));
        let b = check(&pref, property, &small(9));
        assert_eq!(a.to_json_string(), b.to_json_string());
    }
    for class in PairClass::ALL {
        let a: Vec<_> = generate_pairs::<Rational>(class, &small(1)).map(|j| j.to_json_string()).collect();
        let b: Vec<_> = generate_pairs::<Rational>(class, &small(1)).map(|j| j.to_json_string()).collect();
        assert_eq!(a, b);
        assert_eq!(a.len(), 40);
    }
}

#[test]
fn float_mode_finds_the_same_golden_violations() {
    let cfg = AuditConfig { mode: NumericMode::float(), ..small(0) };
    let pref = parse_preference("total(mean - var*abs(2 - var), higher)").unwrap();
    let report = check(&pref, Property::Diversification(PairClass::AmAndId), &cfg);
    assert!(report.is_violated());
    report.verify().unwrap();
    let quarter = parse_preference("total(mean - pow(var, 1/4), higher)").unwrap();
    assert!(check(&quarter, Property::Diversification(PairClass::Antimonotonic), &cfg).is_violated());
}
