//! Floating-point kernels backed by nalgebra: operator norms, eigenvalues,
//! singular vectors and the numeric diagonalizability test.

use nalgebra::{DMatrix, Schur, SVD};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::poly::Polynomial;
use crate::scalar::{Complex64, Scalar};

pub fn to_dmatrix<T: Scalar>(m: &Matrix<T>) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j).to_c64())
}

pub fn from_dmatrix(d: &DMatrix<Complex64>) -> Matrix<Complex64> {
    let data = (0..d.nrows()).flat_map(|i| (0..d.ncols()).map(move |j| d[(i, j)])).collect();
    Matrix::new(d.nrows(), d.ncols(), data).expect("shape from nalgebra")
}

/// Largest singular value, computed in double precision for every mode.
pub fn operator_norm<T: Scalar>(m: &Matrix<T>) -> f64 {
    let c = m.to_c64();
    if c.rows() == c.cols() {
        return operator_norm_flat(c.rows(), c.data());
    }
    SVD::new(to_dmatrix(&c), false, false).singular_values.iter().cloned().fold(0.0, f64::max)
}

/// Operator norm of an `n x n` matrix given row-major in `data`.
pub fn operator_norm_flat(n: usize, data: &[Complex64]) -> f64 {
    match n {
        0 => 0.0,
        1 => data[0].norm(),
        2 => {
            let (a, b, c, d) = (data[0], data[1], data[2], data[3]);
            let f = a.norm_sqr() + b.norm_sqr() + c.norm_sqr() + d.norm_sqr();
            let det = (a * d - b * c).norm();
            let disc = (f * f - 4.0 * det * det).max(0.0);
            ((f + disc.sqrt()) / 2.0).sqrt()
        }
        _ => {
            let m = DMatrix::from_row_slice(n, n, data);
            SVD::new(m, false, false).singular_values.iter().cloned().fold(0.0, f64::max)
        }
    }
}

pub fn singular_values<T: Scalar>(m: &Matrix<T>) -> Vec<f64> {
    SVD::new(to_dmatrix(m), false, false).singular_values.iter().cloned().collect()
}

/// Ratio of extreme singular values; infinite for singular input.
pub fn condition_number<T: Scalar>(m: &Matrix<T>) -> f64 {
    let s = singular_values(m);
    let max = s.iter().cloned().fold(0.0, f64::max);
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Eigenvalues from the diagonal of a complex Schur form.
pub fn eigenvalues<T: Scalar>(m: &Matrix<T>) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(Error::Dimension("eigenvalues of a non-square matrix".into()));
    }
    let n = m.n();
    if n == 0 {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(to_dmatrix(m), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// Right singular vectors belonging to the `k` smallest singular values of `m`.
pub fn smallest_right_singular_vectors(m: &DMatrix<Complex64>, k: usize) -> (Vec<Vec<Complex64>>, Vec<f64>) {
    let svd = SVD::new(m.clone(), false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let take = &order[..k.min(order.len())];
    let vecs = take
        .iter()
        .map(|&r| (0..v_t.ncols()).map(|c| v_t[(r, c)].conj()).collect())
        .collect();
    let vals = take.iter().map(|&r| svd.singular_values[r]).collect();
    (vecs, vals)
}

/// Groups nearby eigenvalues. Each cluster is returned as (centre, size).
pub fn cluster_eigenvalues(vals: &[Complex64], radius: f64) -> Vec<(Complex64, usize)> {
    let mut clusters: Vec<(Vec<Complex64>, Complex64)> = Vec::new();
    for &v in vals {
        match clusters.iter_mut().find(|(_, c)| (*c - v).norm() <= radius) {
            Some((members, centre)) => {
                members.push(v);
                *centre = members.iter().sum::<Complex64>() / members.len() as f64;
            }
            None => clusters.push((vec![v], v)),
        }
    }
    clusters.into_iter().map(|(m, c)| (c, m.len())).collect()
}

/// Outcome of the numeric diagonalizability test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericDiagonalization {
    pub diagonalizable: bool,
    pub condition: f64,
    pub residual: f64,
    pub condition_cap: f64,
    pub tolerance: f64,
    /// True when both quantities sit at least a factor 10 away from the
    /// thresholds that decided the answer.
    pub margin_clear: bool,
    pub eigenvalues: Vec<(f64, f64)>,
}

/// Builds an eigenvector matrix from clustered Schur eigenvalues and accepts
/// it when it reconstructs `m` (relative residual below `tol`) with condition
/// number below `cap`.
pub fn numeric_diagonalization<T: Scalar>(m: &Matrix<T>, tol: f64, cap: f64) -> Result<NumericDiagonalization> {
    let n = m.n();
    let c = m.to_c64();
    let scale = operator_norm(&c).max(1.0);
    let eig = eigenvalues(&c)?;
    let clusters = cluster_eigenvalues(&eig, 1e-6 * scale);
    let dm = to_dmatrix(&c);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut diag: Vec<Complex64> = Vec::with_capacity(n);
    for &(mu, k) in &clusters {
        let shifted = &dm - DMatrix::<Complex64>::identity(n, n) * mu;
        let (vecs, _) = smallest_right_singular_vectors(&shifted, k);
        for v in vecs {
            cols.push(v);
            diag.push(mu);
        }
    }
    let v = DMatrix::from_fn(n, n, |i, j| cols[j][i]);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
    let residual = (&dm * &v - &v * &d).norm() / scale;
    let svd = SVD::new(v, false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let diagonalizable = condition < cap && residual <= tol;
    let margin_clear = if diagonalizable {
        condition <= cap / 10.0 && residual <= tol / 10.0
    } else {
        condition >= cap * 10.0 || residual >= tol * 10.0
    };
    Ok(NumericDiagonalization {
        diagonalizable,
        condition,
        residual,
        condition_cap: cap,
        tolerance: tol,
        margin_clear,
        eigenvalues: eig.iter().map(|z| (z.re, z.im)).collect(),
    })
}

/// Roots of a polynomial as companion-matrix eigenvalues, each refined by a
/// few Newton steps.
pub fn polynomial_roots<T: Scalar>(p: &Polynomial<T>) -> Result<Vec<Complex64>> {
    let coeffs: Vec<Complex64> = p.coeffs().iter().map(Scalar::to_c64).collect();
    let d = coeffs.len().saturating_sub(1);
    if d == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[d];
    let mut comp = Matrix::<Complex64>::zeros(d, d);
    for i in 1..d {
        comp.set(i, i - 1, Complex64::new(1.0, 0.0));
    }
    for i in 0..d {
        comp.set(i, d - 1, -coeffs[i] / lead);
    }
    let deriv: Vec<Complex64> = (1..=d).map(|k| coeffs[k] * k as f64).collect();
    let horner = |c: &[Complex64], z: Complex64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a);
    let mut roots = eigenvalues(&comp)?;
    for r in roots.iter_mut() {
        for _ in 0..8 {
            let dp = horner(&deriv, *r);
            if dp.norm() < 1e-300 {
                break;
            }
            let step = horner(&coeffs, *r) / dp;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            *r -= step;
            if step.norm() < 1e-15 * r.norm().max(1.0) {
                break;
            }
        }
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussianRational;

    type Q = GaussianRational;

    #[test]
    fn operator_norm_examples() {
        assert!((operator_norm(&Matrix::<Q>::identity(2)) - 1.0).abs() < 1e-12);
        let d = Matrix::<Q>::diag(&[Q::from_i64(2), Q::from_i64(3)]);
        assert!((operator_norm(&d) - 3.0).abs() < 1e-12);
        let shift = Matrix::<Q>::from_i64(&[&[0, 1], &[0, 0]]);
        assert!((operator_norm(&shift) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn operator_norm_three_by_three_matches_svd_of_diagonal() {
        let d = Matrix::<Q>::diag(&[Q::from_i64(-7), Q::from_i64(2), Q::from_ratio(1, 2)]);
        assert!((operator_norm(&d) - 7.0).abs() < 1e-9);
    }

    #[test]
    fn rotation_is_numerically_diagonalizable() {
        let r = Matrix::<Q>::from_i64(&[&[0, -1], &[1, 0]]);
        let nd = numeric_diagonalization(&r, 1e-9, 1e8).unwrap();
        assert!(nd.diagonalizable && nd.margin_clear);
        let mut ev = nd.eigenvalues.clone();
        ev.sort_by(|a, b| a.1.total_cmp(&b.1));
        assert!((ev[0].1 + 1.0).abs() < 1e-12 && (ev[1].1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jordan_block_is_not_numerically_diagonalizable() {
        let j = Matrix::<Q>::from_i64(&[&[1, 1], &[0, 1]]);
        let nd = numeric_diagonalization(&j, 1e-9, 1e8).unwrap();
        assert!(!nd.diagonalizable && nd.margin_clear);
    }

    #[test]
    fn repeated_diagonalizable_eigenvalue() {
        let d = Matrix::<Q>::diag(&[Q::from_i64(5), Q::from_i64(5), Q::from_i64(2)]);
        assert!(numeric_diagonalization(&d, 1e-9, 1e8).unwrap().diagonalizable);
    }

    #[test]
    fn roots_of_quadratic() {
        let p = Polynomial::new(vec![Q::from_i64(6), Q::from_i64(-5), Q::from_i64(1)]);
        let mut r: Vec<f64> = polynomial_roots(&p).unwrap().iter().map(|z| z.re).collect();
        r.sort_by(f64::total_cmp);
        assert!((r[0] - 2.0).abs() < 1e-12 && (r[1] - 3.0).abs() < 1e-12);
    }
}
