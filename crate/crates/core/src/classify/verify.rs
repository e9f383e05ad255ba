//! Replays a certificate against the original group without repeating any
//! search. Every stored field is either recomputed from the stored words or
//! checked against the configuration.

use std::collections::HashMap;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cayley::{assouad_lower_bound, discreteness_from_ball, enumerate_ball, DiscretenessVerdict, growth_profile, separation_stats, GrowthTag, Word};
use crate::group::{AnyGroup, GroupSpec};
use crate::intlattice::{multiplicative_rank_exact, multiplicative_rank_numeric, Confidence, ExponentLattice};
use crate::matrix::{eval_poly, Matrix};
use crate::numeric;
use crate::poly::Polynomial;
use crate::scalar::{parse_rational, Complex64, Mode, Scalar};
use crate::spectral::{self, scaled_tol};

use super::certificate::*;
use super::probe::{
    coset_words, diagonal_schreier, exponent_of, family_commutes, float_label, monomial_permutation, power_family,
    rational_pow, rational_text, sqrt_text, LambdaResult, MAX_INDEX,
};
use super::{assouad_depths, float_spec, identity_floor, ClassifyConfig, DefinesZReason, Verdict};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub failures: Vec<String>,
}

type Check = std::result::Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// Checks `certificate` (and its agreement with `verdict`) against `group`.
pub fn verify(group: &AnyGroup, verdict: &Verdict, certificate: &Certificate, config: &ClassifyConfig) -> VerifyReport {
    let mut failures = Vec::new();
    if let Err(e) = verdict_matches(verdict, certificate) {
        failures.push(format!("verdict: {e}"));
    }
    let res = match group {
        AnyGroup::Exact(g) => check_certificate(g, certificate, config),
        AnyGroup::Float(g) => check_certificate(g, certificate, config),
    };
    if let Err(e) = res {
        failures.push(format!("{}: {e}", certificate.kind()));
    }
    VerifyReport { passed: failures.is_empty(), failures }
}

fn verdict_matches(verdict: &Verdict, cert: &Certificate) -> Check {
    match (verdict, cert) {
        (Verdict::DefinesZ { reason, outside_hypothesis }, c) => {
            let expected = match c {
                Certificate::NonDiagonalizable(_) => DefinesZReason::NonDiagonalizableElement,
                Certificate::GrowthAssouad(_) => DefinesZReason::ExponentialGrowthAssouad,
                Certificate::ModuliIndependence(_) => DefinesZReason::IndependentModuli,
                Certificate::UnitPartInfinite(_) => DefinesZReason::NotDiscreteEvidence,
                other => return Err(format!("DefinesZ verdict with {} certificate", other.kind())),
            };
            let outside = c.outside().is_some_and(|o| o.0);
            ensure!(*reason == expected, "reason {reason:?} does not match certificate");
            ensure!(*outside_hypothesis == outside, "outside_hypothesis flag does not match certificate");
            Ok(())
        }
        (Verdict::Tame { lambda, lambda_approx, unit_order, index, coset_reps, numeric_confidence }, Certificate::Tame(t)) => {
            ensure!(*lambda == t.lambda.lambda, "lambda differs from certificate");
            ensure!(lambda_approx.to_bits() == t.lambda.lambda_approx.to_bits(), "lambda_approx differs from certificate");
            ensure!(*unit_order == t.lambda.unit_order, "unit_order differs from certificate");
            ensure!(*index == t.coset_words.len(), "index differs from certificate");
            ensure!(*coset_reps == t.coset_reps, "coset representatives differ from certificate");
            ensure!(*numeric_confidence == (t.witness_mode == Mode::Float), "numeric_confidence flag is wrong");
            Ok(())
        }
        (Verdict::FiniteGroup { order }, Certificate::Finite(f)) => {
            ensure!(*order == f.order, "order differs from certificate");
            Ok(())
        }
        (Verdict::Inconclusive { .. }, Certificate::Inconclusive(_)) => Ok(()),
        (v, c) => Err(format!("{} verdict with {} certificate", v.tag(), c.kind())),
    }
}

fn check_certificate<T: Scalar>(spec: &GroupSpec<T>, cert: &Certificate, config: &ClassifyConfig) -> Check {
    ensure!(cert.mode() == T::MODE, "certificate mode {:?} does not match input mode {:?}", cert.mode(), T::MODE);
    if let Some(outside) = cert.outside() {
        check_approach(spec, outside, config)?;
    }
    match cert {
        Certificate::NonDiagonalizable(c) => check_non_diagonalizable(spec, c, config),
        Certificate::GrowthAssouad(c) => check_growth(spec, c, config),
        Certificate::ModuliIndependence(c) => check_moduli(spec, c, config),
        Certificate::UnitPartInfinite(c) => match witness_spec(spec, c.witness_mode)? {
            Witness::Same => check_unit_part(spec, c, config),
            Witness::Float(f) => check_unit_part(&f, c, config),
        },
        Certificate::Tame(c) => match witness_spec(spec, c.witness_mode)? {
            Witness::Same => check_tame(spec, c, config),
            Witness::Float(f) => check_tame(&f, c, config),
        },
        Certificate::Finite(c) => check_finite(spec, c),
        Certificate::Inconclusive(c) => check_inconclusive(spec, c, config),
    }
}

enum Witness {
    Same,
    Float(GroupSpec<Complex64>),
}

fn witness_spec<T: Scalar>(spec: &GroupSpec<T>, witness_mode: Mode) -> std::result::Result<Witness, String> {
    match (T::MODE, witness_mode) {
        (a, b) if a == b => Ok(Witness::Same),
        (Mode::Exact, Mode::Float) => float_spec(spec).map(Witness::Float).map_err(|e| e.to_string()),
        _ => Err("exact witness for a floating-point input".into()),
    }
}

fn parse_scalar<T: Scalar>(s: &str) -> std::result::Result<T, String> {
    let v = T::parse_text(s).map_err(|e| e.to_string())?;
    ensure!(v.to_text() == s, "`{s}` is not in canonical form");
    Ok(v)
}

fn parse_matrix<T: Scalar>(m: &MatrixText, n: usize) -> std::result::Result<Matrix<T>, String> {
    ensure!(m.len() == n && m.iter().all(|r| r.len() == n), "matrix is not {n} x {n}");
    let rows = m.iter().map(|r| r.iter().map(|s| parse_scalar::<T>(s)).collect()).collect::<std::result::Result<Vec<Vec<T>>, _>>()?;
    Matrix::from_rows(rows).map_err(|e| e.to_string())
}

fn eval<T: Scalar>(spec: &GroupSpec<T>, w: &[usize]) -> std::result::Result<Matrix<T>, String> {
    spec.eval_word(w).map_err(|e| e.to_string())
}

fn close(a: f64, b: f64) -> bool {
    a.to_bits() == b.to_bits() || (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// The discreteness probe on the configured ball must report exactly the
/// stored witness, or nothing when the flag is clear.
fn check_approach<T: Scalar>(spec: &GroupSpec<T>, (flag, witness): (bool, Option<&ApproachWitness>), config: &ClassifyConfig) -> Check {
    ensure!(flag == witness.is_some(), "outside_hypothesis flag does not match the approach witness");
    let ball = enumerate_ball(spec, config.depth, config.cap);
    let fresh = match discreteness_from_ball(spec, &ball).verdict {
        DiscretenessVerdict::ApproachingIdentity { word, value } => Some(ApproachWitness { word, value }),
        _ => None,
    };
    ensure!(fresh.as_ref() == witness, "approach witness does not replay");
    Ok(())
}

fn check_non_diagonalizable<T: Scalar>(spec: &GroupSpec<T>, c: &NonDiagonalizableCertificate, config: &ClassifyConfig) -> Check {
    let tol = spec.tolerance();
    let cap = config.condition_cap;
    ensure!(c.numeric_only == (T::MODE == Mode::Float), "numeric_only flag does not match the mode");
    let m: Matrix<T> = parse_matrix(&c.matrix, spec.n())?;
    ensure!(eval(spec, &c.word)?.to_text() == m.to_text(), "word does not evaluate to the stored matrix");
    match T::MODE {
        Mode::Exact => {
            ensure!(c.numeric.is_none(), "exact certificate carries numeric data");
            let mp_text = c.minimal_polynomial.as_ref().ok_or("minimal polynomial missing")?;
            let rf_text = c.repeated_factor.as_ref().ok_or("repeated factor missing")?;
            let mp: Polynomial<T> = Polynomial::from_coeff_strings(mp_text).map_err(|e| e.to_string())?;
            ensure!(mp.to_coeff_strings() == *mp_text, "minimal polynomial is not in canonical form");
            ensure!(mp.is_monic() && mp.degree() >= 1, "minimal polynomial is not monic");
            ensure!(eval_poly(&mp, &m).is_zero_within(0.0), "stored polynomial does not annihilate the matrix");
            let fresh = spectral::minimal_polynomial(&m).map_err(|e| e.to_string())?;
            ensure!(fresh == mp, "stored polynomial is not the minimal polynomial");
            let g = mp.gcd(&mp.derivative()).map_err(|e| e.to_string())?;
            ensure!(g.degree() >= 1, "minimal polynomial is squarefree");
            ensure!(g.to_coeff_strings() == *rf_text, "repeated factor is not gcd(p, p')");
        }
        Mode::Float => {
            ensure!(c.minimal_polynomial.is_none() && c.repeated_factor.is_none(), "float certificate carries exact data");
            let nd = c.numeric.as_ref().ok_or("numeric data missing")?;
            let fresh = numeric::numeric_diagonalization(&m, tol, cap).map_err(|e| e.to_string())?;
            ensure!(!fresh.diagonalizable && fresh.margin_clear, "matrix is not clearly non-diagonalizable");
            ensure!(*nd == fresh, "numeric data does not replay");
        }
    }
    let fresh = ratio_evidence(&m, tol, cap, config.ratio_samples).ok();
    ensure!(c.ratio == fresh, "ratio evidence does not replay");
    if let Some(r) = &c.ratio {
        ensure!(r.samples <= r.grid * r.grid, "sample count exceeds the grid");
    }
    Ok(())
}

/// Evaluates the words, checking they are distinct and sorted by length.
fn distinct_elements<T: Scalar>(spec: &GroupSpec<T>, words: &[Word]) -> std::result::Result<(Vec<Matrix<T>>, HashMap<Vec<T::Key>, usize>), String> {
    ensure!(words.first().is_some_and(|w| w.is_empty()), "first word is not the identity");
    ensure!(words.windows(2).all(|w| w[0].len() <= w[1].len()), "words are not sorted by length");
    let mut position: HashMap<&[usize], usize> = HashMap::with_capacity(words.len());
    let mut mats: Vec<Matrix<T>> = Vec::with_capacity(words.len());
    for (k, w) in words.iter().enumerate() {
        let m = match w.split_last().and_then(|(l, prefix)| position.get(prefix).map(|&p| (p, *l))) {
            Some((p, l)) => mats[p].mul(spec.symmetric().get(l).ok_or(format!("letter {l} out of range"))?),
            None => eval(spec, w)?,
        };
        position.insert(w, k);
        mats.push(m);
    }
    let pitch = spec.tolerance();
    let mut index = HashMap::with_capacity(mats.len());
    for (k, m) in mats.iter().enumerate() {
        if index.insert(m.key(pitch), k).is_some() {
            return Err(format!("word {k} repeats an earlier element"));
        }
    }
    Ok((mats, index))
}

fn lookup<T: Scalar>(index: &HashMap<Vec<T::Key>, usize>, m: &Matrix<T>, pitch: f64) -> bool {
    if index.contains_key(&m.key(pitch)) {
        return true;
    }
    if T::MODE == Mode::Exact {
        return false;
    }
    let variants: Vec<Vec<T::Key>> = m.data().iter().map(|x| x.key_variants(pitch)).collect();
    let mut keys: Vec<Vec<T::Key>> = vec![Vec::new()];
    for v in variants {
        keys = keys.into_iter().flat_map(|k| v.iter().map(move |x| [k.clone(), vec![x.clone()]].concat())).collect();
        if keys.len() > 256 {
            return false;
        }
    }
    keys.iter().any(|k| index.contains_key(k))
}

/// Every product of a word shorter than `depth` with a letter is stored.
fn closed_under_letters<T: Scalar>(spec: &GroupSpec<T>, words: &[Word], mats: &[Matrix<T>], index: &HashMap<Vec<T::Key>, usize>, depth: usize) -> Check {
    let pitch = spec.tolerance();
    let missing = (0..words.len()).into_par_iter().find_any(|&k| {
        words[k].len() < depth && spec.symmetric().iter().any(|s| !lookup(index, &mats[k].mul(s), pitch))
    });
    ensure!(missing.is_none(), "products of word {} leave the stored set", missing.unwrap_or(0));
    Ok(())
}

fn check_growth<T: Scalar>(spec: &GroupSpec<T>, c: &GrowthCertificate, config: &ClassifyConfig) -> Check {
    ensure!(c.window == config.window, "window differs from configuration");
    ensure!(c.depth <= config.depth, "depth exceeds configuration");
    ensure!(c.sizes.len() == c.depth + 1, "sizes do not cover depths 0..={}", c.depth);
    ensure!(c.sizes.last() == Some(&c.words.len()), "size table does not match the word count");
    ensure!(c.words.iter().all(|w| w.len() <= c.depth), "word longer than the depth");
    for m in 0..=c.depth {
        let count = c.words.iter().filter(|w| w.len() <= m).count();
        ensure!(count == c.sizes[m], "size at depth {m} does not match the words");
    }
    let (mats, index) = distinct_elements(spec, &c.words)?;
    closed_under_letters(spec, &c.words, &mats, &index, c.depth)?;
    let growth = growth_profile(&c.sizes, c.window).map_err(|e| e.to_string())?;
    ensure!(growth == c.growth, "growth fit does not replay");
    ensure!(matches!(growth.tag, GrowthTag::Exponential { .. }), "growth is not exponential");
    ensure!(c.assouad_depths == assouad_depths(c.depth), "Assouad depths are not the standard range");
    let floor = identity_floor(spec, &mats).ok_or("no non-identity element")?;
    ensure!(close(floor, c.separation_floor), "separation floor does not replay");
    let norm_bound = spec.symmetric().iter().map(numeric::operator_norm).fold(0.0, f64::max);
    ensure!(close(norm_bound, c.norm_bound), "norm bound does not replay");
    ensure!(c.separation.len() == c.assouad_depths.len(), "one separation entry per Assouad depth expected");
    ensure!(c.ratio_bounds.len() == c.assouad_depths.len(), "one ratio bound per Assouad depth expected");
    for (k, &m) in c.assouad_depths.iter().enumerate() {
        let stats = separation_stats(&mats[..c.sizes[m]], spec).map_err(|e| e.to_string())?;
        ensure!(stats == c.separation[k], "separation statistics at depth {m} do not replay");
        if T::MODE == Mode::Float {
            ensure!(stats.separation > 10.0 * spec.tolerance(), "elements at depth {m} are not separated beyond tolerance");
        }
        let bound = 2.0 / floor * norm_bound.powi(2 * m as i32);
        ensure!(close(bound, c.ratio_bounds[k]), "ratio bound at depth {m} does not replay");
        ensure!(stats.ratio() <= bound + 1e-6, "diameter/separation ratio at depth {m} exceeds its bound");
    }
    let assouad = assouad_lower_bound(&c.separation);
    ensure!(assouad == c.assouad, "Assouad estimate does not replay");
    ensure!(!assouad.degenerate, "Assouad estimate is degenerate");
    Ok(())
}

fn diagonal_entries<T: Scalar>(basis: &Matrix<T>, inverse: &Matrix<T>, g: &Matrix<T>, tol: f64) -> std::result::Result<Vec<T>, String> {
    let d = basis.mul(g).mul(inverse);
    ensure!(d.is_diagonal(scaled_tol(&d, tol) * 100.0), "element is not diagonal in the stored basis");
    Ok(d.diagonal())
}

/// Parses the stored basis and requires it to be the canonical simultaneous
/// diagonalization of the family.
fn canonical_basis<T: Scalar>(
    spec: &GroupSpec<T>,
    exponent: usize,
    family_words: &[Word],
    stored: &MatrixText,
    config: &ClassifyConfig,
) -> std::result::Result<(Matrix<T>, Matrix<T>), String> {
    ensure!((1..=config.exponent_max).contains(&exponent), "exponent outside 1..={}", config.exponent_max);
    let powers = power_family(spec, exponent).map_err(|e| e.to_string())?;
    ensure!(
        powers.iter().map(|f| &f.0).eq(family_words.iter()),
        "family words are not the powers of order {exponent}"
    );
    ensure!(!family_words.is_empty(), "empty diagonalizing family");
    let family: Vec<Matrix<T>> = powers.into_iter().map(|f| f.1).collect();
    let fresh = spectral::simultaneous_diagonalize(&family, spec.tolerance(), config.condition_cap).map_err(|e| e.to_string())?;
    let p: Matrix<T> = parse_matrix(stored, spec.n())?;
    ensure!(p.to_text() == fresh.basis.to_text(), "basis is not the canonical diagonalization of the family");
    Ok((p, fresh.eigenvectors))
}

fn check_moduli<T: Scalar>(spec: &GroupSpec<T>, c: &ModuliCertificate, config: &ClassifyConfig) -> Check {
    ensure!(T::MODE == Mode::Exact, "moduli independence is only certified exactly");
    let (p, pinv) = canonical_basis(spec, c.exponent, &c.family_words, &c.basis, config)?;
    ensure!(!c.words.is_empty() && c.words.len() == c.diagonals.len(), "one diagonal per word expected");
    let mut sq = Vec::new();
    for (w, stored) in c.words.iter().zip(&c.diagonals) {
        let entries = diagonal_entries(&p, &pinv, &eval(spec, w)?, 0.0)?;
        let text: Vec<String> = entries.iter().map(Scalar::to_text).collect();
        ensure!(text == *stored, "diagonal of word {w:?} does not replay");
        for z in &entries {
            sq.push(z.abs_sq().to_rational().ok_or("modulus is not rational")?);
        }
    }
    let text: Vec<String> = sq.iter().map(rational_text).collect();
    ensure!(text == c.moduli_squared, "squared moduli do not replay");
    let lattice = multiplicative_rank_exact(&sq).map_err(|e| e.to_string())?;
    ensure!(lattice == c.lattice, "exponent lattice does not replay");
    ensure!(lattice.rank >= 2, "moduli have rank {}", lattice.rank);
    Ok(())
}

fn check_unit_part<T: Scalar>(spec: &GroupSpec<T>, c: &UnitPartCertificate, config: &ClassifyConfig) -> Check {
    ensure!(c.max_order == config.max_order, "max_order differs from configuration");
    ensure!(c.rigorous == (T::MODE == Mode::Exact), "rigorous flag does not match the witness mode");
    let tol = spec.tolerance();
    let (p, pinv) = canonical_basis(spec, c.exponent, &c.family_words, &c.basis, config)?;
    let entries = diagonal_entries(&p, &pinv, &eval(spec, &c.word)?, tol)?;
    let z = entries.get(c.coordinate).ok_or("coordinate out of range")?;
    let stored: T = parse_scalar(&c.value)?;
    ensure!(z.approx_eq(&stored, scaled_tol(&Matrix::diag(std::slice::from_ref(z)), tol)), "coordinate value does not replay");
    ensure!(spectral::unit_part_order(z, c.max_order, tol).is_none(), "unit part has finite order");
    Ok(())
}

fn check_tame<T: Scalar>(spec: &GroupSpec<T>, c: &TameCertificate, config: &ClassifyConfig) -> Check {
    let tol = spec.tolerance();
    let n = spec.n();
    ensure!(c.witness_mode == T::MODE, "witness mode mismatch");
    let (p, pinv) = canonical_basis(spec, c.exponent, &c.family_words, &c.basis, config)?;
    let family = power_family(spec, c.exponent).map_err(|e| e.to_string())?;
    ensure!(family_commutes(&family, tol), "family does not commute");
    for (w, h) in &family {
        diagonal_entries(&p, &pinv, h, tol).map_err(|e| format!("family member {w:?}: {e}"))?;
    }
    ensure!(c.permutations.len() == spec.symmetric().len(), "one permutation per letter expected");
    for (s, (g, stored)) in spec.symmetric().iter().zip(&c.permutations).enumerate() {
        let perm = monomial_permutation(&p.mul(g).mul(&pinv), tol).ok_or(format!("letter {s} is not monomial"))?;
        ensure!(perm == *stored, "permutation of letter {s} does not replay");
    }
    let reps = coset_words(&c.permutations, n, MAX_INDEX).ok_or("permutation image too large")?;
    let rep_words: Vec<Word> = reps.iter().map(|r| r.0.clone()).collect();
    ensure!(rep_words == c.coset_words, "coset words do not replay");
    ensure!(c.coset_reps.len() == c.coset_words.len(), "one representative per coset word expected");
    for (w, r) in c.coset_words.iter().zip(&c.coset_reps) {
        let stored: Matrix<T> = parse_matrix(r, n)?;
        ensure!(eval(spec, w)?.to_text() == stored.to_text(), "coset representative {w:?} does not replay");
    }
    let gens = diagonal_schreier(spec, &c.permutations, &c.coset_words, &p, &pinv).map_err(|e| e.to_string())?;
    check_lambda(&gens, &c.lambda, config, tol)
}

fn check_lambda<T: Scalar>(gens: &[(Word, Vec<T>)], l: &LambdaResult, config: &ClassifyConfig, tol: f64) -> Check {
    let words: Vec<Word> = gens.iter().map(|g| g.0.clone()).collect();
    ensure!(words == l.schreier_words, "Schreier words do not replay");
    ensure!(l.schreier_diagonals.len() == gens.len(), "one diagonal per Schreier word expected");
    for ((w, diag), stored) in gens.iter().zip(&l.schreier_diagonals) {
        ensure!(stored.len() == diag.len(), "diagonal length mismatch for {w:?}");
        for (z, s) in diag.iter().zip(stored) {
            parse_scalar::<T>(s)?;
            ensure!(z.to_text() == *s, "diagonal entry of {w:?} does not replay");
        }
    }
    ensure!(l.unit_orders.len() == gens.len(), "one unit-order row per Schreier word expected");
    for ((w, diag), orders) in gens.iter().zip(&l.unit_orders) {
        let fresh: Option<Vec<u64>> = diag.iter().map(|z| spectral::unit_part_order(z, config.max_order, tol)).collect();
        ensure!(fresh.as_ref() == Some(orders), "unit orders of {w:?} do not replay");
    }
    let lcm = l.unit_orders.iter().flatten().fold(1u64, |a, &k| a.lcm(&k));
    ensure!(lcm == l.unit_order, "unit_order is not the lcm of the unit orders");
    let n = gens.first().map_or(0, |g| g.1.len());
    ensure!(l.exponents.len() == gens.len() && l.exponents.iter().all(|r| r.len() == n), "exponent table has the wrong shape");
    let alpha: Vec<i64> = (0..n).map(|i| l.exponents.iter().fold(0i64, |a, r| a.gcd(&r[i]))).collect();
    ensure!(alpha == l.alpha_exponents, "alpha exponents are not the per-coordinate gcds");
    let all = l.exponents.iter().flatten().fold(0i64, |a, &k| a.gcd(&k));
    ensure!(all == 1, "exponents share the factor {all}, so lambda is not primitive");
    ensure!(l.alphas.len() == n, "one alpha per coordinate expected");
    let flat: Vec<&T> = gens.iter().flat_map(|g| g.1.iter()).collect();
    match T::MODE {
        Mode::Exact => {
            ensure!(l.confidence == Confidence::Exact, "exact witness must have exact confidence");
            let gamma_text = l.lambda_squared.as_ref().ok_or("lambda_squared missing")?;
            let gamma = parse_rational(gamma_text).map_err(|e| e.to_string())?;
            ensure!(rational_text(&gamma) == *gamma_text, "lambda_squared is not canonical");
            ensure!(gamma > BigRational::one(), "lambda is not above 1");
            ensure!(sqrt_text(&gamma) == l.lambda, "lambda is not the square root of lambda_squared");
            ensure!(close(gamma.to_f64().unwrap_or(f64::NAN).sqrt(), l.lambda_approx), "lambda_approx does not replay");
            let sq: Vec<BigRational> =
                flat.iter().map(|z| z.abs_sq().to_rational().ok_or("modulus is not rational")).collect::<std::result::Result<_, _>>()?;
            for (k, (m, e)) in sq.iter().zip(l.exponents.iter().flatten()).enumerate() {
                ensure!(*m == rational_pow(&gamma, *e), "modulus {k} is not lambda^{e}");
                ensure!(exponent_of(m, &gamma) == Some(*e), "modulus {k} exponent does not replay");
            }
            let lattice = multiplicative_rank_exact(&sq).map_err(|e| e.to_string())?;
            ensure!(lattice == l.lattice, "exponent lattice does not replay");
            ensure!(lattice.rank == 1, "moduli have rank {}", lattice.rank);
            for (i, (&e, a)) in l.alpha_exponents.iter().zip(&l.alphas).enumerate() {
                let expected = if e % 2 == 0 { rational_text(&rational_pow(&gamma, e / 2)) } else { sqrt_text(&rational_pow(&gamma, e)) };
                ensure!(*a == expected, "alpha {i} is not lambda^{e}");
            }
        }
        Mode::Float => {
            ensure!(l.lambda_squared.is_none(), "float witness carries an exact lambda_squared");
            ensure!(l.confidence == Confidence::High, "numeric relation is not of high confidence");
            ensure!(l.lambda_approx > 1.0, "lambda is not above 1");
            ensure!(l.lambda == float_label(l.lambda_approx), "lambda label does not match lambda_approx");
            let moduli: Vec<f64> = flat.iter().map(|z| z.to_c64().norm()).collect();
            let ln = l.lambda_approx.ln();
            for (k, (m, e)) in moduli.iter().zip(l.exponents.iter().flatten()).enumerate() {
                let err = (m.ln() - *e as f64 * ln).abs();
                ensure!(err <= config.precision.sqrt() * (1.0 + (*e as f64).abs()), "modulus {k} is not lambda^{e}");
            }
            let lattice = multiplicative_rank_numeric(&moduli, config.precision, config.max_denominator).map_err(|e| e.to_string())?;
            numeric_lattice_matches(&lattice, &l.lattice, config.precision)?;
            ensure!(lattice.rank == 1, "moduli have rank {}", lattice.rank);
            for (i, (&e, a)) in l.alpha_exponents.iter().zip(&l.alphas).enumerate() {
                ensure!(*a == float_label(l.lambda_approx.powi(e as i32)), "alpha {i} is not lambda^{e}");
            }
        }
    }
    Ok(())
}

/// Numeric lattices agree in every integer field; the generator agrees to
/// within the precision and is stored in canonical form.
fn numeric_lattice_matches(fresh: &ExponentLattice, stored: &ExponentLattice, precision: f64) -> Check {
    ensure!(fresh.mode == stored.mode && fresh.base == stored.base, "exponent lattice base does not replay");
    ensure!(fresh.exponent_vectors == stored.exponent_vectors && fresh.hnf == stored.hnf, "exponent vectors do not replay");
    ensure!(fresh.rank == stored.rank && fresh.confidence == stored.confidence, "exponent lattice rank does not replay");
    match (&fresh.primitive, &stored.primitive) {
        (None, None) => Ok(()),
        (Some(a), Some(b)) => {
            ensure!(a.powers == b.powers, "generator powers do not replay");
            ensure!(b.value == format!("{:?}", b.approx), "generator text does not match its value");
            let tol = precision.sqrt() * a.approx.abs().max(1.0);
            ensure!((a.approx - b.approx).abs() <= tol, "generator does not replay");
            Ok(())
        }
        _ => Err("exponent lattice generator does not replay".into()),
    }
}

fn check_finite<T: Scalar>(spec: &GroupSpec<T>, c: &FiniteCertificate) -> Check {
    ensure!(c.order == c.words.len(), "order does not match the number of words");
    let (mats, index) = distinct_elements(spec, &c.words)?;
    closed_under_letters(spec, &c.words, &mats, &index, usize::MAX)?;
    Ok(())
}

fn check_inconclusive<T: Scalar>(spec: &GroupSpec<T>, c: &InconclusiveCertificate, config: &ClassifyConfig) -> Check {
    ensure!(c.depth == config.depth && c.cap == config.cap, "depth or cap differs from configuration");
    let ball = enumerate_ball(spec, c.depth, c.cap);
    ensure!(ball.sizes == c.sizes, "ball sizes do not replay");
    ensure!(ball.truncated == c.truncated, "truncation flag does not replay");
    Ok(())
}
