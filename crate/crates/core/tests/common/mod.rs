#![allow(dead_code)]

use num_rational::BigRational;
use proptest::prelude::*;
use tamegroup::{ExactGroup, ExactMatrix, GaussianRational, Matrix};

pub fn q(s: &str) -> GaussianRational {
    s.parse().unwrap()
}

pub fn mat(rows: &[&[&str]]) -> ExactMatrix {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|s| q(s)).collect()).collect()).unwrap()
}

pub fn group(gens: Vec<ExactMatrix>) -> ExactGroup {
    ExactGroup::new(gens, 1e-9).unwrap()
}

pub fn rat(n: i64, d: i64) -> GaussianRational {
    GaussianRational::from_real(BigRational::new(n.into(), d.into()))
}

pub fn unipotent() -> ExactGroup {
    group(vec![mat(&[&["1", "1"], &["0", "1"]])])
}

pub fn sanov() -> ExactGroup {
    group(vec![mat(&[&["1", "2"], &["0", "1"]]), mat(&[&["1", "0"], &["2", "1"]])])
}

pub fn heisenberg() -> ExactGroup {
    group(vec![
        mat(&[&["1", "1", "0"], &["0", "1", "0"], &["0", "0", "1"]]),
        mat(&[&["1", "0", "0"], &["0", "1", "1"], &["0", "0", "1"]]),
    ])
}

pub fn schottky() -> ExactGroup {
    group(vec![mat(&[&["2", "1"], &["1", "1"]]), mat(&[&["1", "2"], &["2", "5"]])])
}

pub fn dihedral() -> ExactGroup {
    group(vec![mat(&[&["0", "1"], &["1", "0"]]), mat(&[&["2", "0"], &["0", "1/2"]])])
}

pub fn diag28() -> ExactGroup {
    group(vec![mat(&[&["2", "0"], &["0", "8"]])])
}

pub fn two_three() -> ExactGroup {
    group(vec![mat(&[&["2"]]), mat(&[&["3"]])])
}

pub fn diag23() -> ExactGroup {
    group(vec![mat(&[&["2", "0"], &["0", "3"]])])
}

pub fn two_i() -> ExactGroup {
    group(vec![mat(&[&["2*i"]])])
}

pub fn not_discrete() -> ExactGroup {
    group(vec![mat(&[&["6/5+8/5*i"]])])
}

pub fn hyperbolic() -> ExactGroup {
    group(vec![mat(&[&["2", "1"], &["1", "1"]])])
}

pub fn rotation() -> ExactGroup {
    group(vec![mat(&[&["0", "-1"], &["1", "0"]])])
}

/// Every named exact corpus group.
pub fn corpus() -> Vec<(&'static str, ExactGroup)> {
    vec![
        ("unipotent", unipotent()),
        ("sanov", sanov()),
        ("heisenberg", heisenberg()),
        ("schottky", schottky()),
        ("dihedral", dihedral()),
        ("diag28", diag28()),
        ("two_three", two_three()),
        ("diag23", diag23()),
        ("two_i", two_i()),
        ("not_discrete", not_discrete()),
        ("hyperbolic", hyperbolic()),
        ("rotation", rotation()),
    ]
}

/// Entries `a/b` with `a` in `-5..=5` and `b` in `1..=5`.
pub fn small_rational() -> impl Strategy<Value = GaussianRational> + Clone {
    (-5i64..=5, 1i64..=5).prop_map(|(a, b)| rat(a, b))
}

pub fn small_gaussian() -> impl Strategy<Value = GaussianRational> + Clone {
    (-5i64..=5, 1i64..=5, -3i64..=3, 1i64..=3)
        .prop_map(|(a, b, c, d)| GaussianRational::new(BigRational::new(a.into(), b.into()), BigRational::new(c.into(), d.into())))
}

pub fn square_matrix(n: usize, entry: impl Strategy<Value = GaussianRational> + Clone) -> impl Strategy<Value = ExactMatrix> {
    proptest::collection::vec(entry, n * n).prop_map(move |d| Matrix::new(n, n, d).unwrap())
}

pub fn invertible(n: usize) -> impl Strategy<Value = ExactMatrix> {
    square_matrix(n, small_rational()).prop_filter("invertible", |m| m.inverse(0.0).is_ok())
}
