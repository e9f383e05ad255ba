//! Minimal polynomials, diagonalizability, Jordan structure, simultaneous
//! diagonalization and root-of-unity detection.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::One;

use crate::contfrac;
use crate::error::{Error, Result};
use crate::matrix::{eval_poly, Matrix};
use crate::numeric::{self, NumericDiagonalization};
use crate::poly::Polynomial;
use crate::scalar::{Complex64, Mode, Scalar};
use crate::structure::commutator;

/// Largest denominator tried when rationalizing numeric eigenvalues.
pub const DEFAULT_MAX_DENOMINATOR: u64 = 1_000_000;

/// Default cap on the eigenvector condition number in float mode.
pub const DEFAULT_CONDITION_CAP: f64 = 1e8;

/// Orders above this cannot occur for unit parts of elements of Q(i)
/// scaled by a real square root: such roots of unity have degree at most 4
/// over Q, so their order k satisfies phi(k) <= 4.
const MAX_EXACT_UNIT_ORDER: u64 = 12;

/// Relative tolerance scaled by the size of the entries (float mode only).
pub fn scaled_tol<T: Scalar>(m: &Matrix<T>, tol: f64) -> f64 {
    match T::MODE {
        Mode::Exact => 0.0,
        Mode::Float => tol * m.max_abs().max(1.0),
    }
}

pub(crate) fn kernel<T: Scalar>(m: &Matrix<T>, tol: f64) -> Vec<Vec<T>> {
    m.nullspace(scaled_tol(m, tol))
}

/// Monic polynomial of least degree annihilating `m`: the first linear
/// dependency among the vectorized powers `I, M, M^2, ...`.
pub fn minimal_polynomial<T: Scalar>(m: &Matrix<T>) -> Result<Polynomial<T>> {
    if T::MODE != Mode::Exact {
        return Err(Error::ModeMismatch("minimal_polynomial"));
    }
    if !m.is_square() {
        return Err(Error::Dimension("minimal polynomial of a non-square matrix".into()));
    }
    let n = m.n();
    let mut powers = vec![Matrix::identity(n).vectorize()];
    let mut current = Matrix::identity(n);
    for k in 1..=n {
        current = current.mul(m);
        powers.push(current.vectorize());
        let stacked = Matrix::from_cols(&powers)?;
        if let Some(rel) = stacked.nullspace(0.0).into_iter().next() {
            let lead = rel[k].clone();
            return Ok(Polynomial::new(rel.into_iter().map(|c| c / lead.clone()).collect()).monic());
        }
    }
    Err(Error::Numerical("no dependency among the first n+1 powers".into()))
}

#[derive(Clone, Debug, PartialEq)]
pub enum DiagonalizabilityReason<T: Scalar> {
    SquarefreeMinimalPolynomial { minimal_polynomial: Polynomial<T> },
    RepeatedFactor { minimal_polynomial: Polynomial<T>, repeated_factor: Polynomial<T> },
    Numeric(NumericDiagonalization),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalizabilityReport<T: Scalar> {
    pub diagonalizable: bool,
    pub reason: DiagonalizabilityReason<T>,
}

/// Exact mode: squarefree minimal polynomial. Float mode: numeric
/// eigendecomposition within `tol` and condition number below `cap`.
pub fn is_diagonalizable<T: Scalar>(m: &Matrix<T>, tol: f64, cap: f64) -> DiagonalizabilityReport<T> {
    match T::MODE {
        Mode::Exact => {
            let mp = minimal_polynomial(m).expect("exact square matrix");
            let g = mp.gcd(&mp.derivative()).expect("exact gcd");
            if g.degree() == 0 {
                DiagonalizabilityReport {
                    diagonalizable: true,
                    reason: DiagonalizabilityReason::SquarefreeMinimalPolynomial { minimal_polynomial: mp },
                }
            } else {
                DiagonalizabilityReport {
                    diagonalizable: false,
                    reason: DiagonalizabilityReason::RepeatedFactor { minimal_polynomial: mp, repeated_factor: g },
                }
            }
        }
        Mode::Float => {
            let nd = numeric::numeric_diagonalization(m, tol, cap).unwrap_or_else(|_| NumericDiagonalization {
                diagonalizable: false,
                condition: f64::INFINITY,
                residual: f64::INFINITY,
                condition_cap: cap,
                tolerance: tol,
                margin_clear: false,
                eigenvalues: Vec::new(),
            });
            DiagonalizabilityReport { diagonalizable: nd.diagonalizable, reason: DiagonalizabilityReason::Numeric(nd) }
        }
    }
}

/// Descending canonical order: larger real part first, then larger imaginary part.
pub fn canonical_desc<T: Scalar>(a: &T, b: &T) -> Ordering {
    b.lex_cmp(a)
}

/// `m x m` Jordan block with eigenvalue `lambda` raised to the `k`-th power:
/// entry `(i, i+j)` is `binom(k, j) * lambda^(k-j)`.
pub fn jordan_block_power<T: Scalar>(lambda: &T, m: usize, k: u64) -> Result<Matrix<T>> {
    if lambda.is_zero() {
        return Err(Error::Domain("Jordan block with eigenvalue 0 is not invertible".into()));
    }
    let mut out = Matrix::zeros(m, m);
    let mut binom = BigInt::one();
    for j in 0..m {
        if j as u64 > k {
            break;
        }
        if j > 0 {
            binom = binom * BigInt::from(k - j as u64 + 1) / BigInt::from(j as u64);
        }
        let entry = T::from_bigint(&binom) * lambda.powi(k - j as u64);
        for i in 0..m - j {
            out.set(i, i + j, entry.clone());
        }
    }
    Ok(out)
}

/// The `m x m` Jordan block itself.
pub fn jordan_block<T: Scalar>(lambda: &T, m: usize) -> Matrix<T> {
    let mut out = Matrix::diag(&vec![lambda.clone(); m]);
    for i in 0..m.saturating_sub(1) {
        out.set(i, i + 1, T::one());
    }
    out
}

/// Distinct eigenvalues in descending canonical order.
///
/// Exact mode looks for roots of the squarefree part of the minimal
/// polynomial among Gaussian rationals near the numeric roots, and fails with
/// [`Error::SpectrumNotRepresentable`] when some root is not found there.
/// Float mode clusters Schur eigenvalues.
pub fn distinct_eigenvalues<T: Scalar>(m: &Matrix<T>, tol: f64, max_den: u64) -> Result<Vec<T>> {
    let mut out: Vec<T> = match T::MODE {
        Mode::Exact => {
            let sf = minimal_polynomial(m)?.squarefree_part()?;
            let mut roots: Vec<T> = Vec::new();
            for z in numeric::polynomial_roots(&sf)? {
                let hit = T::candidates_near(z, max_den)
                    .into_iter()
                    .find(|c| sf.eval(c).is_zero());
                if let Some(r) = hit {
                    if !roots.contains(&r) {
                        roots.push(r);
                    }
                }
            }
            if roots.len() < sf.degree() {
                return Err(Error::SpectrumNotRepresentable);
            }
            roots
        }
        Mode::Float => {
            let scale = numeric::operator_norm(m).max(1.0);
            let eig = numeric::eigenvalues(m)?;
            numeric::cluster_eigenvalues(&eig, cluster_radius(tol) * scale)
                .into_iter()
                .map(|(c, _)| T::candidates_near(c, max_den).remove(0))
                .collect()
        }
    };
    out.sort_by(canonical_desc);
    Ok(out)
}

fn cluster_radius(tol: f64) -> f64 {
    tol.sqrt().max(1e-6).min(1e-3)
}

/// Jordan decomposition `b * a * b^{-1} = J`.
#[derive(Clone, Debug, PartialEq)]
pub struct JordanStructure<T: Scalar> {
    /// `(eigenvalue, size)`, eigenvalues descending, sizes descending.
    pub blocks: Vec<(T, usize)>,
    /// The change of basis `b`.
    pub basis: Matrix<T>,
    /// `b^{-1}`, whose columns are the Jordan chains.
    pub chains: Matrix<T>,
}

impl<T: Scalar> JordanStructure<T> {
    pub fn jordan_form(&self) -> Matrix<T> {
        let n: usize = self.blocks.iter().map(|b| b.1).sum();
        let mut j = Matrix::zeros(n, n);
        let mut off = 0;
        for (lambda, size) in &self.blocks {
            for i in 0..*size {
                j.set(off + i, off + i, lambda.clone());
                if i + 1 < *size {
                    j.set(off + i, off + i + 1, T::one());
                }
            }
            off += size;
        }
        j
    }

    /// Offset of the first block of size at least 2.
    pub fn first_nontrivial_block(&self) -> Option<(usize, usize)> {
        let mut off = 0;
        for (_, size) in &self.blocks {
            if *size >= 2 {
                return Some((off, *size));
            }
            off += size;
        }
        None
    }
}

fn independent_extension<T: Scalar>(base: &[Vec<T>], candidates: &[Vec<T>], tol: f64) -> Vec<Vec<T>> {
    let mut span: Vec<Vec<T>> = base.to_vec();
    let mut rank = if span.is_empty() { 0 } else { Matrix::from_cols(&span).unwrap().rank(tol) };
    let mut added = Vec::new();
    for v in candidates {
        span.push(v.clone());
        let r = Matrix::from_cols(&span).unwrap().rank(tol);
        if r > rank {
            rank = r;
            added.push(v.clone());
        } else {
            span.pop();
        }
    }
    added
}

/// Jordan basis by Jordan chains built top-down from the kernels of powers of
/// `a - mu I`.
pub fn jordan_basis<T: Scalar>(a: &Matrix<T>, tol: f64) -> Result<JordanStructure<T>> {
    if !a.is_square() {
        return Err(Error::Dimension("Jordan basis of a non-square matrix".into()));
    }
    let n = a.n();
    let rank_tol = scaled_tol(a, tol.sqrt().min(1e-6));
    let mut blocks: Vec<(T, usize, Vec<Vec<T>>)> = Vec::new();
    for mu in distinct_eigenvalues(a, tol, DEFAULT_MAX_DENOMINATOR)? {
        let nmat = a.shift(&mu);
        let mut kernels: Vec<Vec<Vec<T>>> = vec![Vec::new()];
        let mut power = Matrix::identity(n);
        loop {
            power = power.mul(&nmat);
            let ker = power.nullspace(rank_tol);
            if ker.len() == kernels.last().unwrap().len() || kernels.len() > n {
                break;
            }
            kernels.push(ker);
        }
        let top = kernels.len() - 1;
        if top == 0 {
            return Err(Error::Numerical("eigenvalue with trivial eigenspace".into()));
        }
        let mut carried: Vec<Vec<T>> = Vec::new();
        let mut chains: Vec<(usize, Vec<T>)> = Vec::new();
        for level in (1..=top).rev() {
            let mut base = kernels[level - 1].clone();
            base.extend(carried.iter().cloned());
            let heads = independent_extension(&base, &kernels[level], rank_tol);
            for h in heads {
                chains.push((level, h));
            }
            carried = chains
                .iter()
                .map(|(size, head)| {
                    let mut v = head.clone();
                    for _ in 0..(size + 1 - level) {
                        v = nmat.mul_vec(&v);
                    }
                    v
                })
                .filter(|_| level > 1)
                .collect();
        }
        for (size, head) in chains {
            let mut cols = vec![head];
            for _ in 1..size {
                let next = nmat.mul_vec(cols.last().unwrap());
                cols.push(next);
            }
            cols.reverse();
            blocks.push((mu.clone(), size, cols));
        }
    }
    blocks.sort_by(|x, y| canonical_desc(&x.0, &y.0).then(y.1.cmp(&x.1)));
    let cols: Vec<Vec<T>> = blocks.iter().flat_map(|b| b.2.iter().cloned()).collect();
    if cols.len() != n {
        return Err(Error::Numerical(format!("found {} chain vectors for dimension {n}", cols.len())));
    }
    let chains = Matrix::from_cols(&cols)?;
    let basis = chains.inverse(scaled_tol(&chains, tol))?;
    let js = JordanStructure { blocks: blocks.into_iter().map(|b| (b.0, b.1)).collect(), basis, chains };
    let rebuilt = js.chains.mul(&js.jordan_form()).mul(&js.basis);
    if !rebuilt.approx_eq(a, scaled_tol(a, tol.max(1e-9)) * 100.0) {
        return Err(Error::Numerical("Jordan reconstruction check failed".into()));
    }
    Ok(js)
}

/// A basis `P` with `P M_j P^{-1}` diagonal for every input.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalizationWitness<T: Scalar> {
    pub basis: Matrix<T>,
    /// `P^{-1}`, whose columns are common eigenvectors.
    pub eigenvectors: Matrix<T>,
    pub diagonals: Vec<Matrix<T>>,
    /// `(start, dimension)` of each common eigenspace in the new basis.
    pub blocks: Vec<(usize, usize)>,
}

/// Recursive common-eigenspace splitting of a commuting diagonalizable family.
pub fn simultaneous_diagonalize<T: Scalar>(ms: &[Matrix<T>], tol: f64, cap: f64) -> Result<DiagonalizationWitness<T>> {
    let Some(first) = ms.first() else {
        return Err(Error::Precondition("empty family".into()));
    };
    let n = first.n();
    for i in 0..ms.len() {
        for j in i + 1..ms.len() {
            if !ms[i].commutes_with(&ms[j], scaled_tol(&ms[i], tol).max(scaled_tol(&ms[j], tol))) {
                return Err(Error::Precondition(format!("matrices {i} and {j} do not commute")));
            }
        }
    }
    for (i, m) in ms.iter().enumerate() {
        if !is_diagonalizable(m, tol, cap).diagonalizable {
            return Err(Error::Precondition(format!("matrix {i} is not diagonalizable")));
        }
    }
    let identity_cols: Vec<Vec<T>> = (0..n).map(|j| Matrix::<T>::identity(n).col(j)).collect();
    let mut spaces: Vec<(Vec<Vec<T>>, Vec<T>)> = vec![(identity_cols, Vec::new())];
    for m in ms {
        let mut next = Vec::new();
        let eig = distinct_eigenvalues(m, tol, DEFAULT_MAX_DENOMINATOR)?;
        for (basis, tag) in spaces {
            let b = Matrix::from_cols(&basis)?;
            let mut covered = 0;
            for mu in &eig {
                let restricted = m.shift(mu).mul(&b);
                let coeffs = restricted.nullspace(scaled_tol(&restricted, tol.sqrt().min(1e-6)));
                if coeffs.is_empty() {
                    continue;
                }
                covered += coeffs.len();
                let sub: Vec<Vec<T>> = coeffs.iter().map(|x| b.mul_vec(x)).collect();
                let mut t = tag.clone();
                t.push(mu.clone());
                next.push((sub, t));
            }
            if covered != basis.len() {
                return Err(Error::Numerical("common eigenspaces do not span".into()));
            }
        }
        spaces = next;
    }
    let lead = |v: &[Vec<T>]| v[0].iter().position(|x| !x.is_negligible(0.0)).unwrap_or(usize::MAX);
    spaces.sort_by(|x, y| {
        lead(&x.0).cmp(&lead(&y.0)).then_with(|| {
            x.1.iter().zip(&y.1).map(|(a, b)| canonical_desc(a, b)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
        })
    });
    let mut blocks = Vec::new();
    let mut cols = Vec::new();
    for (basis, _) in &spaces {
        blocks.push((cols.len(), basis.len()));
        cols.extend(basis.iter().cloned());
    }
    let eigenvectors = Matrix::from_cols(&cols)?;
    let basis = eigenvectors.inverse(scaled_tol(&eigenvectors, tol))?;
    let diagonals: Vec<Matrix<T>> = ms.iter().map(|m| basis.mul(m).mul(&eigenvectors)).collect();
    for d in &diagonals {
        if !d.is_diagonal(scaled_tol(d, tol) * 100.0) {
            return Err(Error::Numerical("conjugated matrix is not diagonal".into()));
        }
    }
    let diagonals = diagonals.into_iter().map(|d| Matrix::diag(&d.diagonal())).collect();
    Ok(DiagonalizationWitness { basis, eigenvectors, diagonals, blocks })
}

/// Smallest `k <= max_order` with `z^k = 1`.
///
/// Exact mode: only orders 1, 2 and 4 exist in Q(i). Float mode: the order
/// must be the denominator of a continued-fraction convergent of
/// `arg(z) / 2 pi`, and is accepted only if `|z^q - 1| < tol`.
pub fn root_of_unity_order<T: Scalar>(z: &T, max_order: u64, tol: f64) -> Result<Option<u64>> {
    match T::MODE {
        Mode::Exact => {
            if z.abs_sq() != T::one() {
                return Err(Error::Domain("root of unity test needs |z| = 1".into()));
            }
            Ok((1..=max_order.min(MAX_EXACT_UNIT_ORDER)).find(|&k| z.powi(k) == T::one()))
        }
        Mode::Float => {
            let c = z.to_c64();
            if (c.norm() - 1.0).abs() > tol.max(1e-12) {
                return Err(Error::Domain("root of unity test needs |z| = 1".into()));
            }
            Ok(float_root_order(c, max_order, tol))
        }
    }
}

fn float_root_order(c: Complex64, max_order: u64, tol: f64) -> Option<u64> {
    let one = Complex64::new(1.0, 0.0);
    if (c - one).norm() < tol {
        return Some(1);
    }
    let theta = c.im.atan2(c.re) / std::f64::consts::TAU;
    contfrac::convergents(theta, max_order)
        .into_iter()
        .map(|(_, q)| q as u64)
        .filter(|&q| q >= 1)
        .find(|&q| (c.powu(q as u32) - one).norm() < tol)
}

/// Order of the unit part `z / |z|`, or `None` if none up to `max_order`.
///
/// Exact mode decides rigorously: `z/|z|` has order `k` iff `z^k` is real and
/// positive, and only `k <= 12` can occur.
pub fn unit_part_order<T: Scalar>(z: &T, max_order: u64, tol: f64) -> Option<u64> {
    match T::MODE {
        Mode::Exact => (1..=max_order.min(MAX_EXACT_UNIT_ORDER)).find(|&k| z.powi(k).is_positive_real(0.0)),
        Mode::Float => {
            let c = z.to_c64();
            float_root_order(c / c.norm(), max_order, tol)
        }
    }
}

/// Outcome of replaying `a (b^k v) = lambda_a lambda_c^k (b^k v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenChainReplay {
    /// Largest `k` up to which the identity held for all `1..=k`.
    pub holds_through: usize,
    /// First `k` at which it failed, if any within the bound.
    pub first_failure: Option<usize>,
    pub checked: usize,
}

/// Replays the eigenvector chain identity for `k = 1..=max_k`.
pub fn eigen_chain_replay<T: Scalar>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    v: &[T],
    lambda_a: &T,
    lambda_c: &T,
    max_k: usize,
    tol: f64,
) -> EigenChainReplay {
    let mut w = v.to_vec();
    let mut factor = lambda_a.clone();
    let mut holds_through = 0;
    for k in 1..=max_k {
        w = b.mul_vec(&w);
        factor = factor * lambda_c.clone();
        let lhs = a.mul_vec(&w);
        let scale = lhs.iter().chain(&w).map(|x| x.to_c64().norm()).fold(1.0, f64::max);
        let ok = lhs
            .iter()
            .zip(&w)
            .all(|(l, x)| l.approx_eq(&(factor.clone() * x.clone()), tol * scale));
        if !ok {
            return EigenChainReplay { holds_through, first_failure: Some(k), checked: k };
        }
        holds_through = k;
    }
    EigenChainReplay { holds_through, first_failure: None, checked: max_k }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenChainReport<T: Scalar> {
    pub lambda_a: T,
    pub lambda_c: T,
    pub eigenvector: Vec<T>,
    pub replay: EigenChainReplay,
}

/// Checks the hypotheses `[a,b] = c`, `ac = ca`, `bc = cb`, diagonalizable
/// `a` and `c`, and a non-torsion eigenvalue of `c`, then replays the chain
/// identity on a shared eigenvector. `max_k` defaults to `n + 1`.
pub fn eigen_chain_verify<T: Scalar>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    c: &Matrix<T>,
    max_k: Option<usize>,
    max_order: u64,
    tol: f64,
) -> Result<EigenChainReport<T>> {
    let n = a.n();
    let t = scaled_tol(a, tol).max(scaled_tol(b, tol)).max(scaled_tol(c, tol));
    if !commutator(a, b, tol)?.approx_eq(c, t) {
        return Err(Error::Precondition("relation [a,b] = c fails".into()));
    }
    if !a.commutes_with(c, t) {
        return Err(Error::Precondition("relation ac = ca fails".into()));
    }
    if !b.commutes_with(c, t) {
        return Err(Error::Precondition("relation bc = cb fails".into()));
    }
    if !is_diagonalizable(a, tol, DEFAULT_CONDITION_CAP).diagonalizable {
        return Err(Error::Precondition("a is not diagonalizable".into()));
    }
    if !is_diagonalizable(c, tol, DEFAULT_CONDITION_CAP).diagonalizable {
        return Err(Error::Precondition("c is not diagonalizable".into()));
    }
    let c_eig = distinct_eigenvalues(c, tol, DEFAULT_MAX_DENOMINATOR)?;
    let non_torsion: Vec<T> = c_eig
        .into_iter()
        .filter(|l| {
            let modulus_one = l.abs_sq().approx_eq(&T::one(), tol);
            !modulus_one || root_of_unity_order(l, max_order, tol).ok().flatten().is_none()
        })
        .collect();
    if non_torsion.is_empty() {
        return Err(Error::Precondition("c is torsion: every eigenvalue is a root of unity".into()));
    }
    let a_eig = distinct_eigenvalues(a, tol, DEFAULT_MAX_DENOMINATOR)?;
    for lc in &non_torsion {
        for la in &a_eig {
            let stacked = stack(&a.shift(la), &c.shift(lc));
            if let Some(v) = kernel(&stacked, tol.sqrt().min(1e-6)).into_iter().next() {
                let replay = eigen_chain_replay(a, b, &v, la, lc, max_k.unwrap_or(n + 1), tol);
                return Ok(EigenChainReport { lambda_a: la.clone(), lambda_c: lc.clone(), eigenvector: v, replay });
            }
        }
    }
    Err(Error::Precondition("a and c share no eigenvector with a non-torsion c-eigenvalue".into()))
}

fn stack<T: Scalar>(top: &Matrix<T>, bottom: &Matrix<T>) -> Matrix<T> {
    let mut rows: Vec<Vec<T>> = (0..top.rows()).map(|i| top.row(i)).collect();
    rows.extend((0..bottom.rows()).map(|i| bottom.row(i)));
    Matrix::from_rows(rows).expect("equal widths")
}

/// `M` evaluated in its own minimal polynomial; zero by definition.
pub fn minimal_polynomial_residual<T: Scalar>(m: &Matrix<T>) -> Result<Matrix<T>> {
    Ok(eval_poly(&minimal_polynomial(m)?, m))
}

/// Sum over eigenvalues of the geometric multiplicity; equals `n` iff `m` is
/// diagonalizable.
pub fn geometric_multiplicity_sum<T: Scalar>(m: &Matrix<T>, tol: f64) -> Result<usize> {
    Ok(distinct_eigenvalues(m, tol, DEFAULT_MAX_DENOMINATOR)?
        .iter()
        .map(|mu| kernel(&m.shift(mu), tol).len())
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussianRational;
    use num_traits::Zero;

    type Q = GaussianRational;
    type C = Complex64;

    fn q(s: &str) -> Q {
        s.parse().unwrap()
    }

    fn qm(rows: &[&[i64]]) -> Matrix<Q> {
        Matrix::from_i64(rows)
    }

    #[test]
    fn minimal_polynomial_examples() {
        assert_eq!(minimal_polynomial(&Matrix::<Q>::identity(2)).unwrap(), Polynomial::linear(Q::one()));
        let u = minimal_polynomial(&qm(&[&[1, 1], &[0, 1]])).unwrap();
        assert_eq!(u, Polynomial::linear(Q::one()).mul(&Polynomial::linear(Q::one())));
        let d = minimal_polynomial(&qm(&[&[2, 0], &[0, 3]])).unwrap();
        assert_eq!(d, Polynomial::linear(Q::from_i64(2)).mul(&Polynomial::linear(Q::from_i64(3))));
        assert_eq!(
            minimal_polynomial(&Matrix::<C>::identity(2)),
            Err(Error::ModeMismatch("minimal_polynomial"))
        );
    }

    #[test]
    fn diagonalizability_examples() {
        assert!(!is_diagonalizable(&qm(&[&[1, 1], &[0, 1]]), 1e-9, 1e8).diagonalizable);
        assert!(is_diagonalizable(&qm(&[&[5, 0], &[0, 5]]), 1e-9, 1e8).diagonalizable);
        assert!(is_diagonalizable(&qm(&[&[0, -1], &[1, 0]]), 1e-9, 1e8).diagonalizable);
        let rot: Matrix<C> = Matrix::from_i64(&[&[0, -1], &[1, 0]]);
        assert!(is_diagonalizable(&rot, 1e-9, 1e8).diagonalizable);
    }

    #[test]
    fn block_power_examples() {
        assert_eq!(jordan_block_power(&Q::one(), 2, 3).unwrap(), qm(&[&[1, 3], &[0, 1]]));
        assert_eq!(jordan_block_power(&Q::from_i64(2), 3, 2).unwrap(), qm(&[&[4, 4, 1], &[0, 4, 4], &[0, 0, 4]]));
        let l = q("3/2+i");
        assert_eq!(jordan_block_power(&l, 1, 5).unwrap(), Matrix::diag(&[l.powi(5)]));
        assert!(jordan_block_power(&Q::zero(), 2, 1).is_err());
    }

    #[test]
    fn jordan_basis_examples() {
        let js = jordan_basis(&qm(&[&[3, 0], &[0, 3]]), 1e-9).unwrap();
        assert_eq!(js.blocks, vec![(Q::from_i64(3), 1), (Q::from_i64(3), 1)]);
        assert_eq!(js.basis, Matrix::identity(2));
        let js = jordan_basis(&qm(&[&[1, 1], &[0, 1]]), 1e-9).unwrap();
        assert_eq!(js.blocks, vec![(Q::one(), 2)]);
        assert_eq!(js.basis, Matrix::identity(2));
        let js = jordan_basis(&qm(&[&[5, 1, 0], &[0, 5, 0], &[0, 0, 2]]), 1e-9).unwrap();
        assert_eq!(js.blocks, vec![(Q::from_i64(5), 2), (Q::from_i64(2), 1)]);
    }

    #[test]
    fn jordan_basis_mixed_block_sizes() {
        // blocks of size 3 and 1 for eigenvalue 2, conjugated
        let j = Matrix::<Q>::from_i64(&[&[2, 1, 0, 0], &[0, 2, 1, 0], &[0, 0, 2, 0], &[0, 0, 0, 2]]);
        let u = qm(&[&[1, 2, 0, 1], &[0, 1, 3, 0], &[1, 0, 1, 0], &[0, 0, 1, 1]]);
        let a = u.mul(&j).mul(&u.inverse(0.0).unwrap());
        let js = jordan_basis(&a, 1e-9).unwrap();
        assert_eq!(js.blocks, vec![(Q::from_i64(2), 3), (Q::from_i64(2), 1)]);
        assert_eq!(js.basis.mul(&a).mul(&js.chains), js.jordan_form());
    }

    #[test]
    fn irrational_spectrum_is_refused() {
        let a = qm(&[&[2, 1], &[1, 1]]);
        assert_eq!(jordan_basis(&a, 1e-9), Err(Error::SpectrumNotRepresentable));
        let f: Matrix<C> = Matrix::from_i64(&[&[2, 1], &[1, 1]]);
        assert_eq!(jordan_basis(&f, 1e-9).unwrap().blocks.len(), 2);
    }

    #[test]
    fn gaussian_spectrum() {
        let r = qm(&[&[0, -1], &[1, 0]]);
        let ev = distinct_eigenvalues(&r, 1e-9, 1000).unwrap();
        assert_eq!(ev, vec![Q::i(), -Q::i()]);
    }

    #[test]
    fn simultaneous_examples() {
        let w = simultaneous_diagonalize(&[qm(&[&[2, 0], &[0, 3]]), qm(&[&[5, 0], &[0, 7]])], 1e-9, 1e8).unwrap();
        assert_eq!(w.basis, Matrix::identity(2));
        let swap = qm(&[&[0, 1], &[1, 0]]);
        let w = simultaneous_diagonalize(std::slice::from_ref(&swap), 1e-9, 1e8).unwrap();
        assert_eq!(w.diagonals[0], Matrix::diag(&[Q::one(), -Q::one()]));
        let r0 = w.basis.row(0);
        let r1 = w.basis.row(1);
        assert_eq!(r0[0], r0[1]);
        assert_eq!(r1[0], -r1[1].clone());
        let err = simultaneous_diagonalize(&[swap, qm(&[&[1, 1], &[0, 1]])], 1e-9, 1e8).unwrap_err();
        assert_eq!(err, Error::Precondition("matrices 0 and 1 do not commute".into()));
    }

    #[test]
    fn root_of_unity_examples() {
        assert_eq!(root_of_unity_order(&Q::i(), 360, 1e-9).unwrap(), Some(4));
        assert_eq!(root_of_unity_order(&Q::one(), 360, 1e-9).unwrap(), Some(1));
        let z = C::new(1f64.cos(), 1f64.sin());
        assert_eq!(root_of_unity_order(&z, 360, 1e-9).unwrap(), None);
        let w = C::new((std::f64::consts::TAU / 7.0).cos(), (std::f64::consts::TAU / 7.0).sin());
        assert_eq!(root_of_unity_order(&w, 360, 1e-9).unwrap(), Some(7));
        assert!(root_of_unity_order(&Q::from_i64(2), 360, 1e-9).is_err());
    }

    #[test]
    fn unit_parts() {
        assert_eq!(unit_part_order(&q("2*i"), 360, 1e-9), Some(4));
        assert_eq!(unit_part_order(&q("-3"), 360, 1e-9), Some(2));
        assert_eq!(unit_part_order(&q("1+i"), 360, 1e-9), Some(8));
        assert_eq!(unit_part_order(&q("3+4*i"), 360, 1e-9), None);
    }

    #[test]
    fn eigen_chain_preconditions() {
        let e12 = qm(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]);
        let e23 = qm(&[&[1, 0, 0], &[0, 1, 1], &[0, 0, 1]]);
        let c = commutator(&e12, &e23, 0.0).unwrap();
        let err = eigen_chain_verify(&e12, &e23, &c, None, 360, 1e-9).unwrap_err();
        assert_eq!(err, Error::Precondition("a is not diagonalizable".into()));
        let id = Matrix::<Q>::identity(2);
        let err = eigen_chain_verify(&qm(&[&[2, 0], &[0, 3]]), &id, &id, None, 360, 1e-9).unwrap_err();
        assert!(matches!(err, Error::Precondition(ref s) if s.contains("torsion")));
    }

    #[test]
    fn eigen_chain_replay_fails_within_bound() {
        let a: Matrix<C> = Matrix::from_i64(&[&[1, 0], &[0, 2]]);
        let b: Matrix<C> = Matrix::from_i64(&[&[0, 1], &[1, 0]]);
        let e1 = vec![C::new(1.0, 0.0), C::new(0.0, 0.0)];
        let r = eigen_chain_replay(&a, &b, &e1, &C::new(1.0, 0.0), &C::new(2.0, 0.0), 3, 1e-9);
        assert_eq!(r.holds_through, 1);
        assert_eq!(r.first_failure, Some(2));
    }
}
