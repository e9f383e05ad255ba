mod common;

use common::*;
use num_traits::{One, Zero};
use proptest::prelude::*;
use tamegroup::numeric::operator_norm;
use tamegroup::{Complex64, ExactMatrix, ExactPolynomial, GaussianRational, Matrix, Scalar};

/// Largest singular value by power iteration on `M* M`.
fn power_iteration_norm(m: &ExactMatrix) -> f64 {
    let c = m.to_c64();
    let g = c.conj_transpose().mul(&c);
    let n = m.n();
    let mut v: Vec<Complex64> = (0..n).map(|k| Complex64::new(1.0 + k as f64 * 0.37, 0.11 * k as f64)).collect();
    let mut lambda = 0.0;
    for _ in 0..2000 {
        let w = g.mul_vec(&v);
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        lambda = norm / v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v = w.into_iter().map(|z| z / norm).collect();
    }
    lambda.sqrt()
}

fn adjugate_inverse(m: &ExactMatrix) -> ExactMatrix {
    let (a, b, c, d) = (m.get(0, 0).clone(), m.get(0, 1).clone(), m.get(1, 0).clone(), m.get(1, 1).clone());
    let det = a.clone() * d.clone() - b.clone() * c.clone();
    Matrix::from_rows(vec![vec![d / det.clone(), -b / det.clone()], vec![-c / det.clone(), a / det]]).unwrap()
}

fn leibniz_det3(m: &ExactMatrix) -> GaussianRational {
    let e = |i, j| m.get(i, j).clone();
    e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
        + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
}

#[test]
fn documented_inverse_and_norm_values() {
    let a = mat(&[&["2", "1"], &["1", "1"]]);
    assert_eq!(a.inverse(0.0).unwrap(), mat(&[&["1", "-1"], &["-1", "2"]]));
    let golden_sq = (3.0 + 5f64.sqrt()) / 2.0;
    assert!((operator_norm(&a) - golden_sq).abs() < 1e-12);
    assert_eq!(operator_norm(&ExactMatrix::identity(3)), 1.0);
    let i = GaussianRational::i();
    assert_eq!(i.clone() * i, -GaussianRational::one());
}

#[test]
fn parse_rejects_malformed_scalars() {
    for bad in ["", "1/0", "i*", "1+", "abc", "2//3"] {
        assert!(bad.parse::<GaussianRational>().is_err(), "{bad:?} parsed");
    }
}

proptest! {
    #[test]
    fn operator_norm_is_submultiplicative(a in square_matrix(3, small_gaussian()), b in square_matrix(3, small_gaussian())) {
        let lhs = operator_norm(&a.mul(&b));
        prop_assert!(lhs <= operator_norm(&a) * operator_norm(&b) + 1e-9);
    }

    #[test]
    fn operator_norm_matches_power_iteration(a in square_matrix(3, small_rational())) {
        let oracle = power_iteration_norm(&a);
        prop_assert!((operator_norm(&a) - oracle).abs() <= 1e-6 * oracle.max(1.0));
    }

    #[test]
    fn inverse_is_an_involution(a in invertible(3)) {
        let inv = a.inverse(0.0).unwrap();
        prop_assert_eq!(inv.inverse(0.0).unwrap(), a.clone());
        prop_assert!(a.mul(&inv).is_identity(0.0));
    }

    #[test]
    fn two_by_two_inverse_matches_adjugate(a in invertible(2)) {
        prop_assert_eq!(a.inverse(0.0).unwrap(), adjugate_inverse(&a));
    }

    #[test]
    fn determinant_matches_leibniz(a in square_matrix(3, small_gaussian())) {
        prop_assert_eq!(a.determinant().unwrap(), leibniz_det3(&a));
    }

    #[test]
    fn gcd_divides_both(p in proptest::collection::vec(small_gaussian(), 1..6),
                        r in proptest::collection::vec(small_gaussian(), 1..6),
                        common in proptest::collection::vec(small_gaussian(), 1..4)) {
        let c = ExactPolynomial::new(common);
        let a = ExactPolynomial::new(p).mul(&c);
        let b = ExactPolynomial::new(r).mul(&c);
        prop_assume!(!a.is_zero() || !b.is_zero());
        let g = a.gcd(&b).unwrap();
        prop_assert!(!g.is_zero());
        prop_assert!(a.div_rem(&g).unwrap().1.is_zero());
        prop_assert!(b.div_rem(&g).unwrap().1.is_zero());
        if !c.is_zero() && !a.is_zero() && !b.is_zero() {
            prop_assert!(g.degree() >= c.degree());
        }
    }

    #[test]
    fn normalizing_twice_equals_once(a in -40i64..40, b in 1i64..30, c in -40i64..40, d in 1i64..30) {
        let z = GaussianRational::new(
            num_rational::BigRational::new(a.into(), b.into()),
            num_rational::BigRational::new(c.into(), d.into()),
        );
        prop_assert_eq!(z.normalized().normalized(), z.normalized());
    }

    #[test]
    fn exact_text_round_trips(z in small_gaussian()) {
        prop_assert_eq!(GaussianRational::parse_text(&z.to_text()).unwrap(), z.clone());
        prop_assert!(z.is_zero() || (z.clone() * z.inv().unwrap()).is_one());
    }
}
