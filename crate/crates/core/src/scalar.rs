//! Scalars: exact Gaussian rationals (elements of Q(i)) and floating complex
//! numbers, unified behind the [`Scalar`] trait so that the linear algebra and
//! group machinery is written once for both arithmetic modes.

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::contfrac;
use crate::error::{Error, Result};

pub type Complex64 = Complex<f64>;
pub type Complex32 = Complex<f32>;

/// Arithmetic mode of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Float => f.write_str("float"),
        }
    }
}

/// Field operations plus the handful of mode-aware hooks (zero tests, hashing
/// keys, pivot choice) that let one algorithm serve exact and float inputs.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const MODE: Mode;

    /// Deduplication key. Exact scalars hash structurally; floats are
    /// rounded onto a grid.
    type Key: Clone + Eq + Hash + Ord + fmt::Debug + Send + Sync;

    fn from_i64(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_bigint(v: &BigInt) -> Self;

    /// Candidate scalars close to `z`. Exact mode proposes Gaussian rationals
    /// whose parts are continued-fraction convergents with denominator at most
    /// `max_den`; float mode returns `z` itself.
    fn candidates_near(z: Complex64, max_den: u64) -> Vec<Self>;

    fn to_c64(&self) -> Complex64;
    fn conj(&self) -> Self;
    fn real(&self) -> Self;
    fn imag(&self) -> Self;

    /// Zero test: structural in exact mode, `|z| <= tol` in float mode.
    fn is_negligible(&self, tol: f64) -> bool;

    /// Weight used for pivot selection. Exact mode only distinguishes zero
    /// from nonzero (first nonzero wins); float mode uses the modulus.
    fn pivot_weight(&self) -> f64;

    fn key(&self, pitch: f64) -> Self::Key;

    /// Keys of every grid cell `self` could fall into under rounding noise.
    /// Exact scalars have exactly one key.
    fn key_variants(&self, pitch: f64) -> Vec<Self::Key> {
        vec![self.key(pitch)]
    }

    /// Lexicographic order on (real part, imaginary part).
    fn lex_cmp(&self, other: &Self) -> Ordering;

    /// Real and strictly positive (within `tol` in float mode).
    fn is_positive_real(&self, tol: f64) -> bool;

    fn parse_text(s: &str) -> Result<Self>;
    fn to_text(&self) -> String;

    /// The value as an exact rational, when it is one.
    fn to_rational(&self) -> Option<BigRational>;

    /// Product without consuming the operands.
    fn mul_ref(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }

    fn abs_sq(&self) -> Self {
        let re = self.real();
        let im = self.imag();
        re.clone() * re + im.clone() * im
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self.clone() - other.clone()).is_negligible(tol)
    }

    fn powi(&self, k: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

/// An element of Q(i), stored as two normalized big rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussianRational {
    re: BigRational,
    im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_real(re: BigRational) -> Self {
        GaussianRational { re, im: BigRational::zero() }
    }

    pub fn i() -> Self {
        GaussianRational { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// `re^2 + im^2` as an exact rational.
    pub fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Re-normalizes both parts. Values produced by this type are always
    /// normalized already, so this is the identity on them.
    pub fn normalized(&self) -> Self {
        GaussianRational {
            re: BigRational::new(self.re.numer().clone(), self.re.denom().clone()),
            im: BigRational::new(self.im.numer().clone(), self.im.denom().clone()),
        }
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm_sq();
        if n.is_zero() {
            return None;
        }
        Some(GaussianRational { re: &self.re / &n, im: -(&self.im / &n) })
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for GaussianRational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        <Self as Scalar>::parse_text(s)
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        GaussianRational { re: BigRational::zero(), im: BigRational::zero() }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        GaussianRational { re: BigRational::one(), im: BigRational::zero() }
    }
}

impl Add for GaussianRational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        GaussianRational { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl Sub for GaussianRational {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        GaussianRational { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl Mul for GaussianRational {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.im.is_zero() && rhs.im.is_zero() {
            return GaussianRational { re: self.re * rhs.re, im: BigRational::zero() };
        }
        let re = &self.re * &rhs.re - &self.im * &rhs.im;
        let im = &self.re * &rhs.im + &self.im * &rhs.re;
        GaussianRational { re, im }
    }
}

impl Div for GaussianRational {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        if self.im.is_zero() && rhs.im.is_zero() {
            return GaussianRational { re: self.re / rhs.re, im: BigRational::zero() };
        }
        self * rhs.inv().expect("division by zero Gaussian rational")
    }
}

impl Neg for GaussianRational {
    type Output = Self;
    fn neg(self) -> Self {
        GaussianRational { re: -self.re, im: -self.im }
    }
}

fn rational_to_text(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `a`, `a/b` or a terminating decimal such as `-1.25` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational `{s}`"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        let int_digits = if int_digits.is_empty() { "0" } else { int_digits };
        let whole = BigInt::from_str(&format!("{int_digits}{frac_part}")).map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), frac_part.len());
        let r = BigRational::new(whole, den);
        return Ok(if negative { -r } else { r });
    }
    BigInt::from_str(s).map(BigRational::from_integer).map_err(|_| bad())
}

/// Splits scalar text into real and imaginary components. The imaginary
/// component is recognised by a trailing `i` (optionally `*i`).
fn split_complex(s: &str) -> Result<(Option<String>, Option<String>)> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty scalar".into()));
    }
    if !s.ends_with('i') {
        return Ok((Some(s), None));
    }
    let body = &s[..s.len() - 1];
    let body = body.strip_suffix('*').unwrap_or(body);
    // Split at the last sign that is not leading and not part of an exponent.
    let bytes = body.as_bytes();
    let mut split = None;
    for idx in (1..bytes.len()).rev() {
        let c = bytes[idx];
        if (c == b'+' || c == b'-') && !matches!(bytes[idx - 1], b'e' | b'E' | b'*' | b'/') {
            split = Some(idx);
            break;
        }
    }
    let (re, im) = match split {
        Some(idx) => (Some(body[..idx].to_string()), body[idx..].to_string()),
        None => (None, body.to_string()),
    };
    let im = match im.as_str() {
        "" | "+" => "1".to_string(),
        "-" => "-1".to_string(),
        other => other.trim_start_matches('+').to_string(),
    };
    Ok((re, Some(im)))
}

impl Scalar for GaussianRational {
    const MODE: Mode = Mode::Exact;
    type Key = GaussianRational;

    fn from_i64(v: i64) -> Self {
        GaussianRational::from_real(BigRational::from_integer(BigInt::from(v)))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        GaussianRational::from_real(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    fn from_bigint(v: &BigInt) -> Self {
        GaussianRational::from_real(BigRational::from_integer(v.clone()))
    }

    fn candidates_near(z: Complex64, max_den: u64) -> Vec<Self> {
        let parts = |x: f64| -> Vec<BigRational> {
            let mut v: Vec<BigRational> = contfrac::convergents(x, max_den)
                .into_iter()
                .map(|(p, q)| BigRational::new(BigInt::from(p), BigInt::from(q)))
                .collect();
            v.reverse();
            if x.abs() < 1e-9 {
                v.insert(0, BigRational::zero());
            }
            v.dedup();
            v
        };
        let res = parts(z.re);
        let ims = parts(z.im);
        let mut out = Vec::with_capacity(res.len() * ims.len());
        for re in &res {
            for im in &ims {
                out.push(GaussianRational::new(re.clone(), im.clone()));
            }
        }
        out
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }

    fn conj(&self) -> Self {
        GaussianRational { re: self.re.clone(), im: -self.im.clone() }
    }

    fn real(&self) -> Self {
        GaussianRational::from_real(self.re.clone())
    }

    fn imag(&self) -> Self {
        GaussianRational::from_real(self.im.clone())
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn pivot_weight(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            1.0
        }
    }

    fn key(&self, _pitch: f64) -> Self::Key {
        self.clone()
    }

    fn mul_ref(&self, other: &Self) -> Self {
        if self.im.is_zero() && other.im.is_zero() {
            return GaussianRational { re: &self.re * &other.re, im: BigRational::zero() };
        }
        GaussianRational {
            re: &self.re * &other.re - &self.im * &other.im,
            im: &self.re * &other.im + &self.im * &other.re,
        }
    }

    fn lex_cmp(&self, other: &Self) -> Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }

    fn is_positive_real(&self, _tol: f64) -> bool {
        self.im.is_zero() && self.re.is_positive()
    }

    fn parse_text(s: &str) -> Result<Self> {
        let (re, im) = split_complex(s)?;
        let re = match re {
            Some(r) => parse_rational(&r)?,
            None => BigRational::zero(),
        };
        let im = match im {
            Some(i) => parse_rational(&i)?,
            None => BigRational::zero(),
        };
        Ok(GaussianRational { re, im })
    }

    fn to_rational(&self) -> Option<BigRational> {
        self.im.is_zero().then(|| self.re.clone())
    }

    fn to_text(&self) -> String {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => rational_to_text(&self.re),
            (true, false) => format!("{}*i", rational_to_text(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { "-" } else { "+" };
                format!("{}{}{}*i", rational_to_text(&self.re), sign, rational_to_text(&self.im.abs()))
            }
        }
    }
}

fn float_text<F: Float + fmt::Debug>(x: F) -> String {
    let v = x.to_f64().unwrap_or(f64::NAN);
    format!("{v:?}")
}

fn parse_float_component(s: &str) -> Result<f64> {
    if let Ok(v) = f64::from_str(s.trim()) {
        return Ok(v);
    }
    parse_rational(s)?
        .to_f64()
        .ok_or_else(|| Error::Parse(format!("value `{s}` out of floating range")))
}

impl<F> Scalar for Complex<F>
where
    F: Float + fmt::Debug + Send + Sync + 'static,
{
    const MODE: Mode = Mode::Float;
    type Key = (i128, i128);

    fn from_i64(v: i64) -> Self {
        Complex::new(F::from(v).unwrap(), F::zero())
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(F::from(num).unwrap() / F::from(den).unwrap(), F::zero())
    }

    fn from_bigint(v: &BigInt) -> Self {
        Complex::new(F::from(v.to_f64().unwrap_or(f64::NAN)).unwrap(), F::zero())
    }

    fn candidates_near(z: Complex64, _max_den: u64) -> Vec<Self> {
        vec![Complex::new(F::from(z.re).unwrap(), F::from(z.im).unwrap())]
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64().unwrap(), self.im.to_f64().unwrap())
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn real(&self) -> Self {
        Complex::new(self.re, F::zero())
    }

    fn imag(&self) -> Self {
        Complex::new(self.im, F::zero())
    }

    fn is_negligible(&self, tol: f64) -> bool {
        self.to_c64().norm() <= tol
    }

    fn pivot_weight(&self) -> f64 {
        self.to_c64().norm()
    }

    fn key(&self, pitch: f64) -> Self::Key {
        let z = self.to_c64();
        ((z.re / pitch).round() as i128, (z.im / pitch).round() as i128)
    }

    fn key_variants(&self, pitch: f64) -> Vec<Self::Key> {
        let z = self.to_c64();
        let near = |x: f64| -> Vec<i128> {
            let r = x / pitch;
            let base = r.round();
            let frac = r - base;
            if frac.abs() > 0.45 {
                vec![base as i128, (base + frac.signum()) as i128]
            } else {
                vec![base as i128]
            }
        };
        let res = near(z.re);
        let ims = near(z.im);
        res.iter().flat_map(|&a| ims.iter().map(move |&b| (a, b))).collect()
    }

    fn lex_cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (self.to_c64(), other.to_c64());
        a.re.total_cmp(&b.re).then_with(|| a.im.total_cmp(&b.im))
    }

    fn is_positive_real(&self, tol: f64) -> bool {
        let z = self.to_c64();
        z.im.abs() <= tol && z.re > tol
    }

    fn parse_text(s: &str) -> Result<Self> {
        let (re, im) = split_complex(s)?;
        let re = match re {
            Some(r) => parse_float_component(&r)?,
            None => 0.0,
        };
        let im = match im {
            Some(i) => parse_float_component(&i)?,
            None => 0.0,
        };
        Ok(Complex::new(F::from(re).unwrap(), F::from(im).unwrap()))
    }

    fn to_rational(&self) -> Option<BigRational> {
        None
    }

    fn to_text(&self) -> String {
        if self.im == F::zero() {
            float_text(self.re)
        } else if self.re == F::zero() {
            format!("{}*i", float_text(self.im))
        } else {
            let sign = if self.im < F::zero() { "-" } else { "+" };
            format!("{}{}{}*i", float_text(self.re), sign, float_text(self.im.abs()))
        }
    }
}
