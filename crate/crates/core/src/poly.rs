//! Univariate polynomials over a [`Scalar`] field.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{Mode, Scalar};

/// Coefficients are stored lowest degree first with no trailing zeros, so the
/// zero polynomial has an empty coefficient vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<T: Scalar> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Polynomial { coeffs: vec![T::one()] }
    }

    /// The monic linear polynomial `x - root`.
    pub fn linear(root: T) -> Self {
        Polynomial::new(vec![-root, T::one()])
    }

    pub fn monomial(coeff: T, degree: usize) -> Self {
        let mut c = vec![T::zero(); degree + 1];
        c[degree] = coeff;
        Polynomial::new(c)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| *c == T::one())
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Polynomial::zero(),
            Some(lc) => {
                let lc = lc.clone();
                Polynomial::new(self.coeffs.iter().map(|c| c.clone() / lc.clone()).collect())
            }
        }
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * T::from_i64(k as i64))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Self, k: usize| p.coeffs.get(k).cloned().unwrap_or_else(T::zero);
        Polynomial::new((0..len).map(|k| get(self, k) + get(other, k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Self, k: usize| p.coeffs.get(k).cloned().unwrap_or_else(T::zero);
        Polynomial::new((0..len).map(|k| get(self, k) - get(other, k)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Polynomial::new(out)
    }

    pub fn scale(&self, s: &T) -> Self {
        Polynomial::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    /// Euclidean division: `self = q * divisor + r` with `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let Some(lead) = divisor.leading().cloned() else {
            return Err(Error::Domain("polynomial division by zero".into()));
        };
        let dd = divisor.degree();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Polynomial::zero(), self.clone()));
        }
        let mut quot = vec![T::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone() / lead.clone();
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = rem[k + j].clone() - c.clone() * d.clone();
            }
            rem[k + dd] = T::zero();
            quot[k] = c;
        }
        rem.truncate(dd);
        Ok((Polynomial::new(quot), Polynomial::new(rem)))
    }

    /// Monic greatest common divisor. Exact mode only.
    pub fn gcd(&self, other: &Self) -> Result<Self> {
        if T::MODE != Mode::Exact {
            return Err(Error::ModeMismatch("poly_gcd"));
        }
        if self.is_zero() && other.is_zero() {
            return Err(Error::Domain("gcd of two zero polynomials".into()));
        }
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b)?;
            a = b;
            b = r;
        }
        Ok(a.monic())
    }

    /// Squarefree iff coprime to the derivative. Exact mode only.
    pub fn is_squarefree(&self) -> Result<bool> {
        if self.degree() == 0 {
            return Ok(true);
        }
        Ok(self.gcd(&self.derivative())?.degree() == 0)
    }

    /// `p / gcd(p, p')`, monic: same roots, each with multiplicity one.
    pub fn squarefree_part(&self) -> Result<Self> {
        if self.degree() == 0 {
            return Ok(self.monic());
        }
        let g = self.gcd(&self.derivative())?;
        Ok(self.div_rem(&g)?.0.monic())
    }

    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut terms = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let coeff = c.to_text();
            let coeff = if coeff.contains(['+', '*']) || coeff[1..].contains('-') {
                format!("({coeff})")
            } else {
                coeff
            };
            let term = match k {
                0 => coeff,
                _ => {
                    let var = if k == 1 { "x".to_string() } else { format!("x^{k}") };
                    match coeff.as_str() {
                        "1" => var,
                        "-1" => format!("-{var}"),
                        _ => format!("{coeff}*{var}"),
                    }
                }
            };
            terms.push(term);
        }
        let mut out = terms[0].clone();
        for t in &terms[1..] {
            match t.strip_prefix('-') {
                Some(rest) => out.push_str(&format!(" - {rest}")),
                None => out.push_str(&format!(" + {t}")),
            }
        }
        out
    }

    /// Inverse of [`Polynomial::to_coeff_strings`].
    pub fn from_coeff_strings(parts: &[String]) -> Result<Self> {
        parts.iter().map(|s| T::parse_text(s)).collect::<Result<Vec<_>>>().map(Polynomial::new)
    }

    pub fn to_coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(Scalar::to_text).collect()
    }
}

impl<T: Scalar> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Complex64, GaussianRational};

    type Q = GaussianRational;

    fn p(c: &[i64]) -> Polynomial<Q> {
        Polynomial::new(c.iter().map(|&v| Q::from_i64(v)).collect())
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(p(&[-1, 0, 1]).gcd(&p(&[1, 1])).unwrap(), p(&[1, 1]));
        assert_eq!(p(&[1, 0, 1]).gcd(&p(&[-1, 1])).unwrap(), p(&[1]));
        let a = p(&[-1, 1]).mul(&p(&[-1, 1]));
        let b = p(&[-1, 1]).mul(&p(&[-2, 1]));
        assert_eq!(a.gcd(&b).unwrap(), p(&[-1, 1]));
    }

    #[test]
    fn gcd_refuses_float() {
        let a: Polynomial<Complex64> = Polynomial::new(vec![Complex64::new(1.0, 0.0)]);
        assert_eq!(a.gcd(&a), Err(Error::ModeMismatch("poly_gcd")));
    }

    #[test]
    fn gcd_over_gaussian_integers() {
        // x^2 + 1 = (x - i)(x + i)
        let f = p(&[1, 0, 1]);
        let g = Polynomial::linear(Q::i()).mul(&p(&[3, 1]));
        assert_eq!(f.gcd(&g).unwrap(), Polynomial::linear(Q::i()));
    }

    #[test]
    fn squarefree() {
        assert!(!p(&[1, -2, 1]).is_squarefree().unwrap());
        assert!(p(&[6, -5, 1]).is_squarefree().unwrap());
        assert_eq!(p(&[1, -2, 1]).squarefree_part().unwrap(), p(&[-1, 1]));
    }

    #[test]
    fn text_rendering() {
        assert_eq!(p(&[1, -2, 1]).to_text(), "x^2 - 2*x + 1");
        assert_eq!(p(&[0, 1]).to_text(), "x");
        assert_eq!(Polynomial::<Q>::zero().to_text(), "0");
    }

    #[test]
    fn div_rem_reconstructs() {
        let a = p(&[5, 0, 3, 2]);
        let b = p(&[1, 2]);
        let (q, r) = a.div_rem(&b).unwrap();
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree() < b.degree() || r.is_zero());
    }
}
