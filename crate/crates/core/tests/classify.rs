mod common;

use std::time::Instant;

use common::*;
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;
use tamegroup::cayley::enumerate_ball;
use tamegroup::classify::certificate::Certificate;
use tamegroup::classify::DefinesZReason;
use tamegroup::spectral::is_diagonalizable;
use tamegroup::{classify, verify, AnyGroup, ClassifyConfig, ExactGroup, ExactMatrix, Matrix, Scalar, Verdict};

fn exact_run(spec: &ExactGroup, config: &ClassifyConfig) -> tamegroup::Classification {
    let c = classify(spec, config).unwrap();
    let report = verify(&AnyGroup::Exact(spec.clone()), &c.verdict, &c.certificate, config);
    assert!(report.passed, "{:?}", report.failures);
    c
}

fn float_run(spec: &ExactGroup, config: &ClassifyConfig) -> tamegroup::Classification {
    let f = AnyGroup::Exact(spec.clone()).to_float().unwrap();
    let c = classify(&f, config).unwrap();
    let report = verify(&AnyGroup::Float(f), &c.verdict, &c.certificate, config);
    assert!(report.passed, "{:?}", report.failures);
    c
}

fn reason(v: &Verdict) -> Option<DefinesZReason> {
    match v {
        Verdict::DefinesZ { reason, .. } => Some(*reason),
        _ => None,
    }
}

fn summary(v: &Verdict) -> String {
    match v {
        Verdict::DefinesZ { reason, outside_hypothesis } => format!("DefinesZ {reason:?} {outside_hypothesis}"),
        Verdict::Tame { lambda, unit_order, index, .. } => format!("Tame {lambda} {unit_order} {index}"),
        Verdict::FiniteGroup { order } => format!("Finite {order}"),
        Verdict::Inconclusive { diagnostics } => format!("Inconclusive {}", diagnostics[0]),
    }
}

#[test]
fn corpus_verdicts_in_both_modes() {
    let config = ClassifyConfig::default();
    let expected = [
        ("unipotent", "DefinesZ NonDiagonalizableElement false", "DefinesZ NonDiagonalizableElement false"),
        ("sanov", "DefinesZ NonDiagonalizableElement false", "DefinesZ NonDiagonalizableElement false"),
        ("heisenberg", "DefinesZ NonDiagonalizableElement false", "DefinesZ NonDiagonalizableElement false"),
        ("schottky", "DefinesZ ExponentialGrowthAssouad false", "DefinesZ ExponentialGrowthAssouad false"),
        ("dihedral", "Tame 2 1 2", "Tame 2 1 2"),
        ("diag28", "Tame 2 1 1", "Tame 2 1 1"),
        ("two_three", "DefinesZ IndependentModuli true", "Inconclusive stage: not_discrete"),
        ("diag23", "DefinesZ IndependentModuli false", "Inconclusive stage: degenerate_lambda"),
        ("two_i", "Tame 2 4 1", "Tame 2 4 1"),
        ("not_discrete", "DefinesZ NotDiscreteEvidence false", "DefinesZ NotDiscreteEvidence false"),
        ("hyperbolic", "Tame 2.6180339887 1 1", "Tame 2.6180339887 1 1"),
        ("rotation", "Finite 4", "Finite 4"),
    ];
    for ((name, spec), (ename, exact, float)) in corpus().into_iter().zip(expected) {
        assert_eq!(name, ename);
        let e = exact_run(&spec, &config);
        assert!(summary(&e.verdict).starts_with(exact), "{name}: {}", summary(&e.verdict));
        let f = float_run(&spec, &config);
        assert!(summary(&f.verdict).starts_with(float), "{name} float: {}", summary(&f.verdict));
    }
}

#[test]
fn heisenberg_witness_is_a_generator() {
    let c = exact_run(&heisenberg(), &ClassifyConfig::default());
    assert_eq!(reason(&c.verdict), Some(DefinesZReason::NonDiagonalizableElement));
    match c.certificate {
        Certificate::NonDiagonalizable(cert) => {
            assert_eq!(cert.word.len(), 1);
            assert_eq!(cert.repeated_factor.as_deref(), Some(&["-1".to_string(), "1".to_string()][..]));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn dihedral_is_tame_with_index_two() {
    let start = Instant::now();
    let c = exact_run(&dihedral(), &ClassifyConfig::default());
    assert!(start.elapsed().as_secs_f64() < 5.0);
    match &c.verdict {
        Verdict::Tame { lambda, lambda_approx, unit_order, index, coset_reps, numeric_confidence } => {
            assert_eq!(lambda, "2");
            assert_eq!(*lambda_approx, 2.0);
            assert_eq!((*unit_order, *index), (1, 2));
            let reps: Vec<ExactMatrix> = coset_reps.iter().map(|r| Matrix::from_text(r).unwrap()).collect();
            assert_eq!(reps, vec![ExactMatrix::identity(2), mat(&[&["0", "1"], &["1", "0"]])]);
            assert!(!numeric_confidence);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn lambda_examples() {
    let config = ClassifyConfig::default();
    match exact_run(&diag28(), &config).certificate {
        Certificate::Tame(t) => {
            assert_eq!(t.lambda.lambda, "2");
            assert_eq!(t.lambda.lambda_squared.as_deref(), Some("4"));
            assert_eq!(t.lambda.alphas, vec!["2", "8"]);
            assert_eq!(t.lambda.alpha_exponents, vec![1, 3]);
        }
        other => panic!("{other:?}"),
    }
    match exact_run(&two_three(), &config).certificate {
        Certificate::ModuliIndependence(m) => {
            assert_eq!(m.lattice.rank, 2);
            assert!(m.outside_hypothesis);
            assert!(m.approach.is_some());
        }
        other => panic!("{other:?}"),
    }
    match exact_run(&diag23(), &config).certificate {
        Certificate::ModuliIndependence(m) => {
            assert_eq!(m.lattice.rank, 2);
            assert!(!m.outside_hypothesis);
        }
        other => panic!("{other:?}"),
    }
    match exact_run(&group(vec![mat(&[&["4", "0"], &["0", "1/2"]])]), &config).verdict {
        Verdict::Tame { lambda, .. } => assert_eq!(lambda, "2"),
        other => panic!("{other:?}"),
    }
    match exact_run(&group(vec![mat(&[&["1+i"]])]), &config).verdict {
        Verdict::Tame { lambda, unit_order, .. } => assert_eq!((lambda.as_str(), unit_order), ("sqrt(2)", 8)),
        other => panic!("{other:?}"),
    }
}

/// `|z|^2 = lambda^(2k)` for some integer `k`, by repeated multiplication.
fn is_power(modulus_sq: &BigRational, lambda_sq: &BigRational) -> bool {
    let (mut up, mut down) = (BigRational::one(), BigRational::one());
    for _ in 0..200 {
        if &up == modulus_sq || &down == modulus_sq {
            return true;
        }
        up *= lambda_sq.clone();
        down /= lambda_sq.clone();
    }
    false
}

fn tame_invariant_holds(spec: &ExactGroup, config: &ClassifyConfig, cert: &tamegroup::classify::certificate::TameCertificate) {
    if cert.witness_mode == tamegroup::Mode::Float {
        return tame_invariant_holds_numerically(spec, config, cert);
    }
    let basis: ExactMatrix = Matrix::from_text(&cert.basis).unwrap();
    let inverse = basis.inverse(0.0).unwrap();
    let lambda_sq: BigRational = tamegroup::scalar::parse_rational(cert.lambda.lambda_squared.as_ref().unwrap()).unwrap();
    let m = cert.lambda.unit_order;
    let ball = enumerate_ball(spec, config.depth, config.cap);
    for e in &ball.elements {
        let d = basis.mul(&e.matrix).mul(&inverse);
        if !d.is_diagonal(0.0) {
            continue;
        }
        for z in d.diagonal() {
            assert!(is_power(&z.norm_sq(), &lambda_sq), "{} not a power of lambda", z.to_text());
            let w = z.powi(m);
            assert!(w.im().is_zero_ref() && w.re() > &BigRational::from_integer(0.into()), "unit order of {}", z.to_text());
        }
    }
}

fn tame_invariant_holds_numerically(spec: &ExactGroup, config: &ClassifyConfig, cert: &tamegroup::classify::certificate::TameCertificate) {
    let basis: tamegroup::FloatMatrix = Matrix::from_text(&cert.basis).unwrap();
    let inverse = basis.inverse(1e-12).unwrap();
    let lambda = cert.lambda.lambda_approx;
    let ball = enumerate_ball(spec, config.depth, config.cap);
    for e in &ball.elements {
        let d = basis.mul(&e.matrix.to_c64()).mul(&inverse);
        if !d.is_diagonal(1e-7 * d.max_abs().max(1.0)) {
            continue;
        }
        for z in d.diagonal() {
            let k = z.norm().ln() / lambda.ln();
            assert!((k - k.round()).abs() < 1e-6, "{z} not a power of {lambda}");
            let w = (z / z.norm()).powu(cert.lambda.unit_order as u32);
            assert!((w - tamegroup::Complex64::new(1.0, 0.0)).norm() < 1e-6);
        }
    }
}

trait ZeroRef {
    fn is_zero_ref(&self) -> bool;
}

impl ZeroRef for BigRational {
    fn is_zero_ref(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
}

#[test]
fn tame_invariant_on_corpus() {
    let config = ClassifyConfig::default();
    for spec in [dihedral(), diag28(), two_i()] {
        match exact_run(&spec, &config).certificate {
            Certificate::Tame(t) => tame_invariant_holds(&spec, &config, &t),
            other => panic!("{other:?}"),
        }
    }
}

#[test]
fn refinement_keeps_witnesses() {
    for (name, spec) in corpus() {
        let mut previous: Option<Verdict> = None;
        for depth in [4, 6, 8] {
            let config = ClassifyConfig { depth, ..ClassifyConfig::default() };
            let v = exact_run(&spec, &config).verdict;
            if let Some(p) = &previous {
                if reason(p) == Some(DefinesZReason::NonDiagonalizableElement) {
                    assert_eq!(reason(&v), reason(p), "{name} at depth {depth}");
                }
                if p.tag() != "Inconclusive" {
                    assert_eq!(p.tag(), v.tag(), "{name} at depth {depth}");
                }
            }
            previous = Some(v);
        }
    }
}

#[test]
fn witness_survives_accumulation_at_identity() {
    let spec = group(vec![mat(&[&["-1", "-1"], &["0", "-1"]]), mat(&[&["-1", "0"], &["0", "2*i"]])]);
    let shallow = exact_run(&spec, &ClassifyConfig { depth: 5, ..ClassifyConfig::default() });
    assert_eq!(summary(&shallow.verdict), "DefinesZ NonDiagonalizableElement false");
    let deep = exact_run(&spec, &ClassifyConfig { depth: 6, ..ClassifyConfig::default() });
    assert_eq!(summary(&deep.verdict), "DefinesZ NonDiagonalizableElement true");
    match &deep.certificate {
        Certificate::NonDiagonalizable(c) => {
            let a = c.approach.as_ref().unwrap();
            assert!(a.value < 1.0);
        }
        other => panic!("unexpected certificate {}", other.kind()),
    }
}

fn entry() -> impl Strategy<Value = &'static str> {
    prop_oneof![Just("1"), Just("-1"), Just("2"), Just("1/2"), Just("-2"), Just("4"), Just("i"), Just("2*i"), Just("3")]
}

/// Diagonal, monomial and small unimodular generators.
fn random_group() -> impl Strategy<Value = ExactGroup> {
    let diagonal = (entry(), entry()).prop_map(|(a, b)| mat(&[&[a, "0"], &["0", b]]));
    let swap = (entry(), entry()).prop_map(|(a, b)| mat(&[&["0", a], &[b, "0"]]));
    let unimodular = proptest::collection::vec(-2i64..=2, 4).prop_filter_map("unimodular", |v| {
        (v[0] * v[3] - v[1] * v[2] == 1).then(|| ExactMatrix::from_i64(&[&[v[0], v[1]], &[v[2], v[3]]]))
    });
    let gen = prop_oneof![3 => diagonal, 2 => swap, 1 => unimodular];
    proptest::collection::vec(gen, 1..=2).prop_map(group)
}

fn small_config() -> ClassifyConfig {
    ClassifyConfig { depth: 5, cap: 20_000, window: 4, ..ClassifyConfig::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn random_groups_are_sound_and_exclusive(spec in random_group()) {
        let config = small_config();
        let c = classify(&spec, &config).unwrap();
        let report = verify(&AnyGroup::Exact(spec.clone()), &c.verdict, &c.certificate, &config);
        prop_assert!(report.passed, "{:?}", report.failures);
        if let Verdict::Tame { lambda_approx, .. } = &c.verdict {
            prop_assert!(*lambda_approx > 1.0);
            let ball = enumerate_ball(&spec, config.depth, config.cap);
            for e in &ball.elements {
                prop_assert!(is_diagonalizable(&e.matrix, 0.0, 1e8).diagonalizable);
            }
            match &c.certificate {
                Certificate::Tame(t) => tame_invariant_holds(&spec, &config, t),
                other => prop_assert!(false, "{other:?}"),
            }
        }
        if reason(&c.verdict) == Some(DefinesZReason::NonDiagonalizableElement) {
            prop_assert!(!matches!(c.certificate, Certificate::Tame(_)));
            let deeper = classify(&spec, &ClassifyConfig { depth: 6, ..config }).unwrap();
            prop_assert_eq!(reason(&deeper.verdict), Some(DefinesZReason::NonDiagonalizableElement));
        }
    }

    #[test]
    fn float_lambda_exceeds_one(spec in random_group()) {
        let config = small_config();
        let f = AnyGroup::Exact(spec).to_float().unwrap();
        let c = classify(&f, &config).unwrap();
        let report = verify(&AnyGroup::Float(f), &c.verdict, &c.certificate, &config);
        prop_assert!(report.passed, "{:?}", report.failures);
        if let Verdict::Tame { lambda_approx, .. } = c.verdict {
            prop_assert!(lambda_approx > 1.0);
        }
    }
}
