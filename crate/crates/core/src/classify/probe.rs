//! Virtual-abelianness probe and extraction of the base `lambda`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cayley::Word;
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::intlattice::{multiplicative_rank_exact, multiplicative_rank_numeric, Confidence, ExponentLattice};
use crate::matrix::Matrix;
use crate::scalar::{Mode, Scalar};
use crate::spectral::{self, scaled_tol, DiagonalizationWitness};

/// Largest permutation image explored when collecting coset representatives.
pub const MAX_INDEX: usize = 5040;

/// A finite-index abelian subgroup made diagonal by a common basis.
#[derive(Clone, Debug, PartialEq)]
pub struct VAWitness<T: Scalar> {
    /// `N` such that every family member is an `N`-th power.
    pub exponent: usize,
    pub family_words: Vec<Word>,
    pub family: Vec<Matrix<T>>,
    pub diagonalization: DiagonalizationWitness<T>,
    /// For each symmetric letter `s`, `permutations[s][j]` is the row of the
    /// nonzero entry in column `j` of `P s P^{-1}`.
    pub permutations: Vec<Vec<usize>>,
    pub coset_words: Vec<Word>,
    pub coset_reps: Vec<Matrix<T>>,
}

impl<T: Scalar> VAWitness<T> {
    pub fn index(&self) -> usize {
        self.coset_words.len()
    }

    pub fn basis(&self) -> &Matrix<T> {
        &self.diagonalization.basis
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProbeOutcome<T: Scalar> {
    Witness(VAWitness<T>),
    /// A family member turned out not to be diagonalizable.
    NotDiagonalizable { word: Word, matrix: Matrix<T> },
    /// No exponent up to the limit produced a verified witness.
    Absent { tried: usize },
}

/// Words of `g^N` for each generator and `(a b)^N` for each pair of
/// symmetric letters with `a b` not freely trivial, skipping identities and
/// repeats.
pub fn power_family<T: Scalar>(spec: &GroupSpec<T>, exponent: usize) -> Result<Vec<(Word, Matrix<T>)>> {
    let mut bases: Vec<Word> = (0..spec.generators().len()).map(|i| vec![spec.letter_of_generator(i)]).collect();
    let k = spec.symmetric().len();
    for a in 0..k {
        for b in 0..k {
            if spec.inverse_of_letter(a) != b {
                bases.push(vec![a, b]);
            }
        }
    }
    let id = spec.identity();
    let mut out: Vec<(Word, Matrix<T>)> = Vec::new();
    for w in bases {
        let word: Word = w.iter().cycle().take(w.len() * exponent).cloned().collect();
        let m = spec.eval_word(&word)?;
        if m.approx_eq(&id, spec.tol_for(&m)) {
            continue;
        }
        if out.iter().any(|(_, x)| x.approx_eq(&m, spec.tol_for(&m))) {
            continue;
        }
        out.push((word, m));
    }
    Ok(out)
}

pub fn family_commutes<T: Scalar>(family: &[(Word, Matrix<T>)], tol: f64) -> bool {
    family.iter().enumerate().all(|(i, (_, x))| {
        family[i + 1..].iter().all(|(_, y)| x.commutes_with(y, scaled_tol(x, tol).max(scaled_tol(y, tol))))
    })
}

/// Column permutation of a monomial matrix, or `None` if some column or row
/// does not have exactly one entry above the tolerance.
pub fn monomial_permutation<T: Scalar>(m: &Matrix<T>, tol: f64) -> Option<Vec<usize>> {
    let n = m.n();
    let t = scaled_tol(m, tol);
    let mut perm = Vec::with_capacity(n);
    for j in 0..n {
        let rows: Vec<usize> = (0..n).filter(|&i| !m.get(i, j).is_negligible(t)).collect();
        if rows.len() != 1 {
            return None;
        }
        perm.push(rows[0]);
    }
    let mut seen = vec![false; n];
    for &r in &perm {
        if std::mem::replace(&mut seen[r], true) {
            return None;
        }
    }
    Some(perm)
}

/// `(a o b)[j] = a[b[j]]`, the permutation of the product `A B`.
pub fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&j| a[j]).collect()
}

/// Breadth-first closure of the permutation image, returning one shortest
/// word per permutation, starting with the empty word.
pub fn coset_words(permutations: &[Vec<usize>], n: usize, limit: usize) -> Option<Vec<(Word, Vec<usize>)>> {
    let id: Vec<usize> = (0..n).collect();
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::from([(id.clone(), 0)]);
    let mut reps: Vec<(Word, Vec<usize>)> = vec![(Vec::new(), id)];
    let mut i = 0;
    while i < reps.len() {
        for (s, sigma) in permutations.iter().enumerate() {
            let p = compose(&reps[i].1, sigma);
            if seen.contains_key(&p) {
                continue;
            }
            if reps.len() >= limit {
                return None;
            }
            let mut w = reps[i].0.clone();
            w.push(s);
            seen.insert(p.clone(), reps.len());
            reps.push((w, p));
        }
        i += 1;
    }
    Some(reps)
}

/// Schreier words `r_i s r_j^{-1}` for the kernel of the permutation action,
/// omitting those that coincide with a representative's own word.
pub fn schreier_words<T: Scalar>(spec: &GroupSpec<T>, reps: &[(Word, Vec<usize>)], permutations: &[Vec<usize>]) -> Vec<Word> {
    let index: HashMap<&Vec<usize>, usize> = reps.iter().enumerate().map(|(k, r)| (&r.1, k)).collect();
    let mut out = Vec::new();
    for (w, p) in reps {
        for (s, sigma) in permutations.iter().enumerate() {
            let j = index[&compose(p, sigma)];
            let mut word = w.clone();
            word.push(s);
            if word == reps[j].0 {
                continue;
            }
            word.extend(spec.inverse_word(&reps[j].0));
            out.push(word);
        }
    }
    out
}

/// Searches for a finite-index diagonalizable abelian subgroup, trying
/// exponents `1..=exponent_max`.
pub fn virtually_abelian_probe<T: Scalar>(spec: &GroupSpec<T>, exponent_max: usize, condition_cap: f64) -> Result<ProbeOutcome<T>> {
    let tol = spec.tolerance();
    let n = spec.n();
    for exponent in 1..=exponent_max {
        let family = power_family(spec, exponent)?;
        if family.is_empty() || !family_commutes(&family, tol) {
            continue;
        }
        for (word, m) in &family {
            let report = spectral::is_diagonalizable(m, tol, condition_cap);
            if !report.diagonalizable {
                return Ok(ProbeOutcome::NotDiagonalizable { word: word.clone(), matrix: m.clone() });
            }
        }
        let mats: Vec<Matrix<T>> = family.iter().map(|f| f.1.clone()).collect();
        let diagonalization = spectral::simultaneous_diagonalize(&mats, tol, condition_cap)?;
        let p = &diagonalization.basis;
        let pinv = &diagonalization.eigenvectors;
        let perms: Option<Vec<Vec<usize>>> =
            spec.symmetric().iter().map(|s| monomial_permutation(&p.mul(s).mul(pinv), tol)).collect();
        let Some(permutations) = perms else {
            continue;
        };
        let Some(reps) = coset_words(&permutations, n, MAX_INDEX) else {
            continue;
        };
        let coset_reps = reps.iter().map(|r| spec.eval_word(&r.0)).collect::<Result<Vec<_>>>()?;
        return Ok(ProbeOutcome::Witness(VAWitness {
            exponent,
            family_words: family.iter().map(|f| f.0.clone()).collect(),
            family: mats,
            diagonalization,
            permutations,
            coset_words: reps.into_iter().map(|r| r.0).collect(),
            coset_reps,
        }));
    }
    Ok(ProbeOutcome::Absent { tried: exponent_max })
}

/// Data showing that every coordinate modulus of the diagonal subgroup is an
/// integer power of `lambda`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaResult {
    /// Exact rational, `sqrt(q)` for an irrational square root, or a decimal.
    pub lambda: String,
    pub lambda_approx: f64,
    /// Exact `lambda^2` (exact mode only).
    pub lambda_squared: Option<String>,
    /// Least common multiple of the unit-part orders.
    pub unit_order: u64,
    /// Generator `alpha_i` of the moduli of coordinate `i`.
    pub alphas: Vec<String>,
    /// `alpha_i = lambda^alpha_exponents[i]`.
    pub alpha_exponents: Vec<i64>,
    pub schreier_words: Vec<Word>,
    pub schreier_diagonals: Vec<Vec<String>>,
    /// `|z| = lambda^exponents[g][i]` for coordinate `i` of Schreier generator `g`.
    pub exponents: Vec<Vec<i64>>,
    pub unit_orders: Vec<Vec<u64>>,
    pub lattice: ExponentLattice,
    pub confidence: Confidence,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LambdaOutcome {
    Tame(LambdaResult),
    /// Moduli of rank at least 2.
    IndependentModuli {
        schreier_words: Vec<Word>,
        schreier_diagonals: Vec<Vec<String>>,
        moduli: Vec<String>,
        lattice: ExponentLattice,
    },
    /// A unit part with no order up to the limit.
    UnitPartInfinite { word: Word, coordinate: usize, value: String },
    /// All moduli trivial, or a numeric relation of low confidence.
    Degenerate { reason: String },
}

/// Diagonal Schreier generators of the kernel of the permutation action, in
/// the basis `basis` (with inverse `inverse`), with identities removed.
pub fn diagonal_schreier<T: Scalar>(
    spec: &GroupSpec<T>,
    permutations: &[Vec<usize>],
    coset_words: &[Word],
    basis: &Matrix<T>,
    inverse: &Matrix<T>,
) -> Result<Vec<(Word, Vec<T>)>> {
    let reps: Vec<(Word, Vec<usize>)> = coset_words
        .iter()
        .map(|w| {
            let p = w.iter().try_fold((0..spec.n()).collect::<Vec<_>>(), |acc, &s| {
                permutations.get(s).map(|sigma| compose(&acc, sigma))
            });
            p.map(|p| (w.clone(), p)).ok_or_else(|| Error::Domain("letter out of range".into()))
        })
        .collect::<Result<_>>()?;
    let known: std::collections::HashSet<&Vec<usize>> = reps.iter().map(|r| &r.1).collect();
    for r in &reps {
        for sigma in permutations {
            if !known.contains(&compose(&r.1, sigma)) {
                return Err(Error::Precondition("coset representatives are not closed under the generators".into()));
            }
        }
    }
    let id = spec.identity();
    let mut out = Vec::new();
    for word in schreier_words(spec, &reps, permutations) {
        let g = spec.eval_word(&word)?;
        if g.approx_eq(&id, spec.tol_for(&g)) {
            continue;
        }
        let d = basis.mul(&g).mul(inverse);
        if !d.is_diagonal(scaled_tol(&d, spec.tolerance()) * 100.0) {
            return Err(Error::Numerical("Schreier generator is not diagonal in the witness basis".into()));
        }
        out.push((word, d.diagonal()));
    }
    Ok(out)
}

pub fn is_perfect_square(n: &BigInt) -> bool {
    !n.is_negative() && {
        let r = n.sqrt();
        &(&r * &r) == n
    }
}

/// Square root of a positive rational as text: exact when it is a square,
/// otherwise `sqrt(q)`.
pub fn sqrt_text(q: &BigRational) -> String {
    if is_perfect_square(q.numer()) && is_perfect_square(q.denom()) {
        rational_text(&BigRational::new(q.numer().sqrt(), q.denom().sqrt()))
    } else {
        format!("sqrt({})", rational_text(q))
    }
}

pub fn rational_text(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Decimal rendering with at most 10 fractional digits.
pub fn float_label(x: f64) -> String {
    let s = format!("{x:.10}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

pub fn rational_pow(q: &BigRational, e: i64) -> BigRational {
    let p = num_traits::pow(q.clone(), e.unsigned_abs() as usize);
    if e >= 0 {
        p
    } else {
        p.recip()
    }
}

/// Text of `lambda^e` given the exact square `gamma = lambda^2`.
fn exact_power_text(gamma: &BigRational, e: i64) -> String {
    if e % 2 == 0 {
        rational_text(&rational_pow(gamma, e / 2))
    } else {
        sqrt_text(&rational_pow(gamma, e))
    }
}

fn lcm_all(orders: impl Iterator<Item = u64>) -> u64 {
    orders.fold(1u64, |acc, k| acc.lcm(&k))
}

/// Splits the diagonal subgroup into unit parts and moduli and finds a
/// common base `lambda > 1` for the moduli.
pub fn extract_lambda<T: Scalar>(
    spec: &GroupSpec<T>,
    witness: &VAWitness<T>,
    max_order: u64,
    precision: f64,
    max_den: u64,
) -> Result<LambdaOutcome> {
    let tol = spec.tolerance();
    let gens = diagonal_schreier(
        spec,
        &witness.permutations,
        &witness.coset_words,
        witness.basis(),
        &witness.diagonalization.eigenvectors,
    )?;
    let n = spec.n();
    let mut unit_orders = Vec::with_capacity(gens.len());
    for (word, diag) in &gens {
        let mut row = Vec::with_capacity(n);
        for (i, z) in diag.iter().enumerate() {
            match spectral::unit_part_order(z, max_order, tol) {
                Some(k) => row.push(k),
                None => {
                    return Ok(LambdaOutcome::UnitPartInfinite { word: word.clone(), coordinate: i, value: z.to_text() })
                }
            }
        }
        unit_orders.push(row);
    }
    let unit_order = lcm_all(unit_orders.iter().flatten().cloned());
    let schreier_words: Vec<Word> = gens.iter().map(|g| g.0.clone()).collect();
    let schreier_diagonals: Vec<Vec<String>> = gens.iter().map(|g| g.1.iter().map(Scalar::to_text).collect()).collect();
    let flat: Vec<&T> = gens.iter().flat_map(|g| g.1.iter()).collect();
    let (lattice, moduli_text) = match T::MODE {
        Mode::Exact => {
            let sq: Vec<BigRational> = flat
                .iter()
                .map(|z| z.abs_sq().to_rational().ok_or_else(|| Error::Domain("modulus is not rational".into())))
                .collect::<Result<_>>()?;
            let text = sq.iter().map(rational_text).collect();
            (multiplicative_rank_exact(&sq)?, text)
        }
        Mode::Float => {
            let m: Vec<f64> = flat.iter().map(|z| z.to_c64().norm()).collect();
            let text = m.iter().map(|x| format!("{x:?}")).collect();
            (multiplicative_rank_numeric(&m, precision, max_den)?, text)
        }
    };
    if lattice.rank == 0 {
        return Ok(LambdaOutcome::Degenerate { reason: "every modulus is 1; the group may be finite".into() });
    }
    if lattice.confidence == Confidence::Low {
        return Ok(LambdaOutcome::Degenerate {
            reason: "numeric relation among moduli has a large denominator: the moduli may be independent, or the precision is insufficient".into(),
        });
    }
    if lattice.rank >= 2 {
        return Ok(LambdaOutcome::IndependentModuli { schreier_words, schreier_diagonals, moduli: moduli_text, lattice });
    }
    let prim = lattice.primitive.clone().expect("rank one lattice has a generator");
    let flip = prim.approx < 1.0;
    let powers: Vec<i64> = prim.powers.iter().map(|&k| if flip { -k } else { k }).collect();
    let exponents: Vec<Vec<i64>> = powers.chunks(n).map(<[i64]>::to_vec).collect();
    let alpha_exponents: Vec<i64> =
        (0..n).map(|i| exponents.iter().fold(0i64, |acc, row| acc.gcd(&row[i]))).collect();
    let (lambda, lambda_approx, lambda_squared, alphas) = match T::MODE {
        Mode::Exact => {
            let g = crate::scalar::parse_rational(&prim.value)?;
            let gamma = if flip { g.recip() } else { g };
            let approx = gamma.to_f64().unwrap_or(f64::NAN).sqrt();
            let alphas = alpha_exponents.iter().map(|&e| exact_power_text(&gamma, e)).collect();
            (sqrt_text(&gamma), approx, Some(rational_text(&gamma)), alphas)
        }
        Mode::Float => {
            let lam = if flip { 1.0 / prim.approx } else { prim.approx };
            let alphas = alpha_exponents.iter().map(|&e| float_label(lam.powi(e as i32))).collect();
            (float_label(lam), lam, None, alphas)
        }
    };
    let confidence = lattice.confidence;
    Ok(LambdaOutcome::Tame(LambdaResult {
        lambda,
        lambda_approx,
        lambda_squared,
        unit_order,
        alphas,
        alpha_exponents,
        schreier_words,
        schreier_diagonals,
        exponents,
        unit_orders,
        lattice,
        confidence,
    }))
}

/// Checks that the moduli of every diagonal element in `elements` are integer
/// powers of `lambda` (given exactly through `lambda^2`) and that the unit
/// parts have order dividing `m`. Returns the number of diagonal elements.
pub fn check_exact_tame_elements<T: Scalar>(
    elements: &[Matrix<T>],
    basis: &Matrix<T>,
    inverse: &Matrix<T>,
    lambda_squared: &BigRational,
    unit_order: u64,
) -> Result<usize> {
    let mut count = 0;
    for g in elements {
        let d = basis.mul(g).mul(inverse);
        if !d.is_diagonal(0.0) {
            continue;
        }
        count += 1;
        for z in d.diagonal() {
            if !z.powi(unit_order).is_positive_real(0.0) {
                return Err(Error::Precondition(format!("unit part of {} has order not dividing {unit_order}", z.to_text())));
            }
            let m = z.abs_sq().to_rational().ok_or_else(|| Error::Domain("modulus is not rational".into()))?;
            if exponent_of(&m, lambda_squared).is_none() {
                return Err(Error::Precondition(format!("modulus^2 {} is not a power of lambda^2", rational_text(&m))));
            }
        }
    }
    Ok(count)
}

/// `k` with `m = gamma^k`, for `gamma > 1`.
pub fn exponent_of(m: &BigRational, gamma: &BigRational) -> Option<i64> {
    if m.is_one() {
        return Some(0);
    }
    if m.is_zero() || gamma <= &BigRational::one() {
        return None;
    }
    let (mut x, sign) = if m > &BigRational::one() { (m.clone(), 1) } else { (m.recip(), -1) };
    let mut k = 0i64;
    while x > BigRational::one() {
        x = &x / gamma;
        k += 1;
        if x.is_one() {
            return Some(sign * k);
        }
    }
    None
}
