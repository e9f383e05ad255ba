//! Commutators, Heisenberg triples and the Jordan-block ratio function.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cayley::{enumerate_ball, Word};
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::matrix::Matrix;
use crate::scalar::{Mode, Scalar};
use crate::spectral::{self, jordan_basis, scaled_tol, JordanStructure};

/// `x y x^{-1} y^{-1}`.
pub fn commutator<T: Scalar>(x: &Matrix<T>, y: &Matrix<T>, tol: f64) -> Result<Matrix<T>> {
    let xi = x.inverse(scaled_tol(x, tol) * 1e-3)?;
    let yi = y.inverse(scaled_tol(y, tol) * 1e-3)?;
    Ok(x.mul(y).mul(&xi).mul(&yi))
}

/// Why `c^k != I` for every `k != 0`, or how far that was checked.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TorsionEvidence {
    /// `(c - I)^n = 0` with `c != I`.
    Unipotent,
    /// `|det c| != 1`, so some eigenvalue has modulus other than 1.
    DeterminantModulus { det_abs_sq: f64 },
    /// `c^k != I` for `1 <= k <= max_order` only.
    NoSmallOrder { max_order: u64 },
}

impl TorsionEvidence {
    pub fn is_rigorous(&self) -> bool {
        !matches!(self, TorsionEvidence::NoSmallOrder { .. })
    }
}

/// Evidence that `c` has infinite order, or `None` if `c^k = I` for some
/// `k <= max_order`.
pub fn non_torsion_evidence<T: Scalar>(c: &Matrix<T>, max_order: u64, tol: f64) -> Option<TorsionEvidence> {
    let n = c.n();
    let id = Matrix::identity(n);
    if c.approx_eq(&id, scaled_tol(c, tol)) {
        return None;
    }
    let diff = c.sub(&id);
    if diff.pow_u(n as u64).is_zero_within(scaled_tol(&diff, tol)) {
        return Some(TorsionEvidence::Unipotent);
    }
    let det = c.determinant().ok()?;
    let dsq = det.abs_sq();
    if !dsq.approx_eq(&T::one(), tol) {
        return Some(TorsionEvidence::DeterminantModulus { det_abs_sq: dsq.to_c64().re });
    }
    let mut p = c.clone();
    for _ in 1..=max_order {
        if p.approx_eq(&id, scaled_tol(&p, tol)) {
            return None;
        }
        p = p.mul(c);
    }
    Some(TorsionEvidence::NoSmallOrder { max_order })
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeisenbergTriple<T: Scalar> {
    pub a: Matrix<T>,
    pub b: Matrix<T>,
    pub c: Matrix<T>,
    pub a_word: Word,
    pub b_word: Word,
    /// `c` commutes with every symmetric generator, hence with every ball
    /// element up to this depth.
    pub central_depth: usize,
    pub torsion: TorsionEvidence,
}

impl<T: Scalar> HeisenbergTriple<T> {
    /// Re-checks the defining relations and the torsion evidence from the
    /// stored matrices alone.
    pub fn replay(&self, max_order: u64, tol: f64) -> bool {
        let t = scaled_tol(&self.a, tol).max(scaled_tol(&self.b, tol)).max(scaled_tol(&self.c, tol));
        let Ok(comm) = commutator(&self.a, &self.b, tol) else {
            return false;
        };
        comm.approx_eq(&self.c, t)
            && self.a.commutes_with(&self.c, t)
            && self.b.commutes_with(&self.c, t)
            && non_torsion_evidence(&self.c, max_order, tol).as_ref() == Some(&self.torsion)
    }
}

#[derive(Clone, Debug)]
pub struct HeisenbergSearch<T: Scalar> {
    pub triple: Option<HeisenbergTriple<T>>,
    pub pairs_examined: usize,
    pub truncated: bool,
}

/// Scans pairs `(a, b)` of ball elements, in ball order, for a commutator `c`
/// that is non-trivial, central (commutes with all generators) and of
/// infinite order.
pub fn find_heisenberg_triple<T: Scalar>(
    spec: &GroupSpec<T>,
    depth: usize,
    cap: usize,
    max_order: u64,
) -> Result<HeisenbergSearch<T>> {
    if depth < 2 {
        return Err(Error::Precondition("Heisenberg search needs depth >= 2".into()));
    }
    let tol = spec.tolerance();
    let ball = enumerate_ball(spec, depth, cap);
    if ball.truncated {
        return Ok(HeisenbergSearch { triple: None, pairs_examined: 0, truncated: true });
    }
    let els = &ball.elements[1..];
    let pairs: Vec<(usize, usize)> = (0..els.len()).flat_map(|i| (i + 1..els.len()).map(move |j| (i, j))).collect();
    let hit = pairs.par_iter().enumerate().find_map_first(|(k, &(i, j))| {
        let (a, b) = (&els[i].matrix, &els[j].matrix);
        let c = commutator(a, b, tol).ok()?;
        let t = spec.tol_for(&c);
        if c.is_identity(t) || !c.commutes_with(a, t) || !c.commutes_with(b, t) {
            return None;
        }
        if !spec.symmetric().iter().all(|g| c.commutes_with(g, t.max(spec.tol_for(g)))) {
            return None;
        }
        let torsion = non_torsion_evidence(&c, max_order, tol)?;
        Some((
            k,
            HeisenbergTriple {
                a: a.clone(),
                b: b.clone(),
                c,
                a_word: els[i].word.clone(),
                b_word: els[j].word.clone(),
                central_depth: depth,
                torsion,
            },
        ))
    });
    Ok(match hit {
        Some((k, triple)) => HeisenbergSearch { triple: Some(triple), pairs_examined: k + 1, truncated: false },
        None => HeisenbergSearch { triple: None, pairs_examined: pairs.len(), truncated: false },
    })
}

/// `h(g, g') = (bgb^-1)_{s,s+1} (bg'b^-1)_{s+1,s+1} / ((bg'b^-1)_{s,s+1} (bgb^-1)_{s+1,s+1})`
/// where `b` is a Jordan basis of the witness and `s` the offset of its
/// first block of size at least 2.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioFunction<T: Scalar> {
    pub witness: Matrix<T>,
    pub jordan: JordanStructure<T>,
    pub block_start: usize,
}

impl<T: Scalar> RatioFunction<T> {
    pub fn basis(&self) -> &Matrix<T> {
        &self.jordan.basis
    }

    /// Entry positions `(s, s+1)` and `(s+1, s+1)`.
    pub fn entries(&self) -> ((usize, usize), (usize, usize)) {
        let s = self.block_start;
        ((s, s + 1), (s + 1, s + 1))
    }

    pub fn to_local(&self, g: &Matrix<T>) -> Matrix<T> {
        self.jordan.basis.mul(g).mul(&self.jordan.chains)
    }

    /// `h` on matrices already in local coordinates; `None` on a zero
    /// denominator.
    pub fn eval_local(&self, g: &Matrix<T>, gp: &Matrix<T>, tol: f64) -> Option<T> {
        let ((r0, c0), (r1, c1)) = self.entries();
        let den = gp.get(r0, c0).clone() * g.get(r1, c1).clone();
        if den.is_negligible(tol) {
            return None;
        }
        Some(g.get(r0, c0).clone() * gp.get(r1, c1).clone() / den)
    }

    pub fn eval(&self, g: &Matrix<T>, gp: &Matrix<T>, tol: f64) -> Option<T> {
        self.eval_local(&self.to_local(g), &self.to_local(gp), tol)
    }
}

pub fn build_ratio_function<T: Scalar>(a: &Matrix<T>, tol: f64, cap: f64) -> Result<RatioFunction<T>> {
    if spectral::is_diagonalizable(a, tol, cap).diagonalizable {
        return Err(Error::Precondition("witness is diagonalizable".into()));
    }
    let jordan = jordan_basis(a, tol)?;
    let (block_start, _) = jordan
        .first_nontrivial_block()
        .ok_or_else(|| Error::Numerical("no Jordan block of size >= 2 found".into()))?;
    Ok(RatioFunction { witness: a.clone(), jordan, block_start })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioSamples<T: Scalar> {
    /// `(i, j, h(a^i, a^j))`.
    pub samples: Vec<(usize, usize, T)>,
    pub skipped: usize,
    /// Samples whose imaginary part exceeded the tolerance.
    pub non_real: usize,
}

impl<T: Scalar> RatioSamples<T> {
    pub fn real_values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.2.to_c64().re).collect()
    }
}

/// Evaluates `h(a^i, a^j)` for `1 <= i <= ni`, `1 <= j <= nj`.
pub fn sample_ratio_image<T: Scalar>(rf: &RatioFunction<T>, ni: usize, nj: usize, tol: f64) -> Result<RatioSamples<T>> {
    if ni == 0 || nj == 0 {
        return Err(Error::Precondition("sample bounds must be at least 1".into()));
    }
    let j = rf.jordan.jordan_form();
    let top = ni.max(nj);
    let mut powers = Vec::with_capacity(top);
    let mut p = j.clone();
    for _ in 0..top {
        powers.push(p.clone());
        p = p.mul(&j);
    }
    let mut samples = Vec::with_capacity(ni * nj);
    let mut skipped = 0;
    let mut non_real = 0;
    for i in 1..=ni {
        for jj in 1..=nj {
            let (g, gp) = (&powers[i - 1], &powers[jj - 1]);
            let t = match T::MODE {
                Mode::Exact => 0.0,
                Mode::Float => tol * g.max_abs().max(gp.max_abs()).max(1.0),
            };
            match rf.eval_local(g, gp, t) {
                Some(v) => {
                    if !v.imag().is_negligible(tol.max(1e-12)) {
                        non_real += 1;
                    }
                    samples.push((i, jj, v));
                }
                None => skipped += 1,
            }
        }
    }
    Ok(RatioSamples { samples, skipped, non_real })
}

/// Fraction of the `cells` equal-width cells of `[lo, hi]` that contain at
/// least one value. A value equal to `hi` falls in the last cell.
pub fn density_statistic(values: &[f64], lo: f64, hi: f64, cells: usize) -> f64 {
    if cells == 0 || !(lo < hi) {
        return 0.0;
    }
    let mut hit = vec![false; cells];
    for &v in values {
        if !(v >= lo && v <= hi) {
            continue;
        }
        let k = (((v - lo) / (hi - lo)) * cells as f64).floor() as usize;
        hit[k.min(cells - 1)] = true;
    }
    hit.iter().filter(|&&h| h).count() as f64 / cells as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussianRational;

    type Q = GaussianRational;

    fn qm(rows: &[&[i64]]) -> Matrix<Q> {
        Matrix::from_i64(rows)
    }

    #[test]
    fn commutator_examples() {
        let d1 = Matrix::diag(&[Q::from_i64(2), Q::from_i64(3)]);
        let d2 = Matrix::diag(&[Q::from_i64(5), Q::from_i64(7)]);
        assert!(commutator(&d1, &d2, 0.0).unwrap().is_identity(0.0));
        let x = qm(&[&[1, 1], &[0, 1]]);
        let y = qm(&[&[1, 0], &[1, 1]]);
        // hand multiplication: xy = [[2,1],[1,1]], x^-1 y^-1 = [[2,-1],[-1,1]]
        assert_eq!(commutator(&x, &y, 0.0).unwrap(), qm(&[&[3, -1], &[1, 0]]));
        assert!(commutator(&x, &x, 0.0).unwrap().is_identity(0.0));
    }

    #[test]
    fn heisenberg_found_and_replayed() {
        let e12 = qm(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]);
        let e23 = qm(&[&[1, 0, 0], &[0, 1, 1], &[0, 0, 1]]);
        let g = GroupSpec::new(vec![e12, e23], 1e-9).unwrap();
        let s = find_heisenberg_triple(&g, 2, 200_000, 360).unwrap();
        let t = s.triple.expect("triple");
        assert_eq!(t.torsion, TorsionEvidence::Unipotent);
        assert!(t.replay(360, 1e-9));
    }

    #[test]
    fn abelian_has_no_triple() {
        let g = GroupSpec::new(vec![Matrix::diag(&[Q::from_i64(2), Q::from_i64(3)])], 1e-9).unwrap();
        assert!(find_heisenberg_triple(&g, 3, 200_000, 360).unwrap().triple.is_none());
    }

    #[test]
    fn ratio_function_examples() {
        let a = qm(&[&[1, 1], &[0, 1]]);
        let rf = build_ratio_function(&a, 1e-9, 1e8).unwrap();
        assert_eq!(rf.basis(), &Matrix::identity(2));
        assert_eq!(rf.entries(), ((0, 1), (1, 1)));
        let d = Matrix::diag(&[Q::from_i64(2), Q::from_i64(3)]);
        assert!(build_ratio_function(&d, 1e-9, 1e8).is_err());
    }

    #[test]
    fn ratio_samples_are_i_over_j() {
        let a = qm(&[&[1, 1], &[0, 1]]);
        let rf = build_ratio_function(&a, 1e-9, 1e8).unwrap();
        let s = sample_ratio_image(&rf, 5, 5, 1e-9).unwrap();
        assert_eq!(s.skipped, 0);
        for (i, j, v) in s.samples {
            assert_eq!(v, Q::from_ratio(i as i64, j as i64));
        }
    }

    #[test]
    fn density_examples() {
        let tenths: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
        assert!((density_statistic(&tenths, 0.0, 1.0, 10) - 0.9).abs() < 1e-12);
        let mids: Vec<f64> = (0..10).map(|k| 0.05 + k as f64 / 10.0).collect();
        assert_eq!(density_statistic(&mids, 0.0, 1.0, 10), 1.0);
        assert_eq!(density_statistic(&[], 0.0, 1.0, 10), 0.0);
        assert_eq!(density_statistic(&[1.0], 0.0, 1.0, 4), 0.25);
    }
}
