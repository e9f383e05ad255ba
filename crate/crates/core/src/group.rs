//! Finitely generated matrix groups given by generators.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Complex64, GaussianRational, Mode, Scalar};

/// Default float tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Generators together with the symmetric generating set used for words.
///
/// The symmetric set lists each generator followed by its inverse; entries
/// equal to an earlier one (involutions, repeated generators) are dropped, so
/// word letters index a duplicate-free list.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupSpec<T: Scalar> {
    generators: Vec<Matrix<T>>,
    symmetric: Vec<Matrix<T>>,
    inverse_index: Vec<usize>,
    tolerance: f64,
}

impl<T: Scalar> GroupSpec<T> {
    pub fn new(generators: Vec<Matrix<T>>, tolerance: f64) -> Result<Self> {
        let Some(first) = generators.first() else {
            return Err(Error::InvalidGroup("no generators".into()));
        };
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(Error::InvalidGroup("tolerance must be positive".into()));
        }
        let n = first.rows();
        if n == 0 {
            return Err(Error::InvalidGroup("matrices must be at least 1x1".into()));
        }
        let mut inverses = Vec::with_capacity(generators.len());
        for (i, g) in generators.iter().enumerate() {
            if g.rows() != n || g.cols() != n {
                return Err(Error::InvalidGroup(format!("generator {i} is not {n}x{n}")));
            }
            let det = g.determinant()?;
            let singular = match T::MODE {
                Mode::Exact => det.is_zero(),
                Mode::Float => det.to_c64().norm() <= tolerance,
            };
            if singular {
                return Err(Error::InvalidGroup(format!("generator {i} not invertible")));
            }
            let inv = g
                .inverse(tolerance * g.max_abs().max(1.0) * 1e-3)
                .map_err(|_| Error::InvalidGroup(format!("generator {i} not invertible")))?;
            inverses.push(inv);
        }
        let mut symmetric: Vec<Matrix<T>> = Vec::new();
        let eq = |a: &Matrix<T>, b: &Matrix<T>| a.approx_eq(b, tolerance);
        for (g, inv) in generators.iter().zip(&inverses) {
            for m in [g, inv] {
                if !symmetric.iter().any(|s| eq(s, m)) {
                    symmetric.push(m.clone());
                }
            }
        }
        let mut inverse_index = Vec::with_capacity(symmetric.len());
        for s in &symmetric {
            let inv = s.inverse(tolerance * s.max_abs().max(1.0) * 1e-3)?;
            let idx = symmetric
                .iter()
                .position(|t| eq(t, &inv))
                .ok_or_else(|| Error::Numerical("inverse of a symmetric generator not found".into()))?;
            inverse_index.push(idx);
        }
        Ok(GroupSpec { generators, symmetric, inverse_index, tolerance })
    }

    pub fn n(&self) -> usize {
        self.generators[0].rows()
    }

    pub fn mode(&self) -> Mode {
        T::MODE
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn generators(&self) -> &[Matrix<T>] {
        &self.generators
    }

    pub fn symmetric(&self) -> &[Matrix<T>] {
        &self.symmetric
    }

    pub fn inverse_of_letter(&self, letter: usize) -> usize {
        self.inverse_index[letter]
    }

    /// Letter index of generator `i` in the symmetric set.
    pub fn letter_of_generator(&self, i: usize) -> usize {
        let g = &self.generators[i];
        self.symmetric
            .iter()
            .position(|s| s.approx_eq(g, self.tolerance))
            .expect("every generator is in the symmetric set")
    }

    pub fn identity(&self) -> Matrix<T> {
        Matrix::identity(self.n())
    }

    /// Product of the letters of `word`, left to right.
    pub fn eval_word(&self, word: &[usize]) -> Result<Matrix<T>> {
        let mut acc = self.identity();
        for &l in word {
            let s = self
                .symmetric
                .get(l)
                .ok_or_else(|| Error::Domain(format!("letter {l} out of range")))?;
            acc = acc.mul(s);
        }
        Ok(acc)
    }

    pub fn inverse_word(&self, word: &[usize]) -> Vec<usize> {
        word.iter().rev().map(|&l| self.inverse_index[l]).collect()
    }

    /// Absolute tolerance for comparing `m` with other elements, scaled by
    /// the size of its entries. Zero in exact mode.
    pub fn tol_for(&self, m: &Matrix<T>) -> f64 {
        match T::MODE {
            Mode::Exact => 0.0,
            Mode::Float => self.tolerance * m.max_abs().max(1.0),
        }
    }
}

/// A group in either arithmetic mode.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyGroup {
    Exact(GroupSpec<GaussianRational>),
    Float(GroupSpec<Complex64>),
}

impl AnyGroup {
    pub fn mode(&self) -> Mode {
        match self {
            AnyGroup::Exact(_) => Mode::Exact,
            AnyGroup::Float(_) => Mode::Float,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            AnyGroup::Exact(g) => g.n(),
            AnyGroup::Float(g) => g.n(),
        }
    }

    pub fn tolerance(&self) -> f64 {
        match self {
            AnyGroup::Exact(g) => g.tolerance(),
            AnyGroup::Float(g) => g.tolerance(),
        }
    }

    /// Lossy conversion of the generators to floating point.
    pub fn to_float(&self) -> Result<GroupSpec<Complex64>> {
        match self {
            AnyGroup::Exact(g) => GroupSpec::new(g.generators().iter().map(Matrix::to_c64).collect(), g.tolerance()),
            AnyGroup::Float(g) => Ok(g.clone()),
        }
    }
}

impl From<GroupSpec<GaussianRational>> for AnyGroup {
    fn from(g: GroupSpec<GaussianRational>) -> Self {
        AnyGroup::Exact(g)
    }
}

impl From<GroupSpec<Complex64>> for AnyGroup {
    fn from(g: GroupSpec<Complex64>) -> Self {
        AnyGroup::Float(g)
    }
}
