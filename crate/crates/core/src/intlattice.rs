//! Integer lattices in Hermite normal form, lifts of subgroups of
//! `(Z/mZ)^l x Z^n`, and exponent lattices of multiplicative groups.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::contfrac;
use crate::error::{Error, Result};
use crate::scalar::{Mode, Scalar};

/// Row basis in Hermite normal form: upper echelon, positive pivots, and
/// entries above each pivot reduced into `[0, pivot)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntLattice {
    pub dim: usize,
    pub basis: Vec<Vec<BigInt>>,
}

impl IntLattice {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis.iter().map(|r| r.iter().position(|x| !x.is_zero()).expect("nonzero row")).collect()
    }

    pub fn contains(&self, v: &[BigInt]) -> Result<bool> {
        lattice_member(self, v)
    }

    pub fn basis_i64(&self) -> Vec<Vec<i64>> {
        self.basis.iter().map(|r| r.iter().map(|x| x.to_i64().unwrap_or(i64::MAX)).collect()).collect()
    }
}

pub fn to_big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Canonical HNF row basis of the lattice spanned by `vectors`.
pub fn hnf(vectors: &[Vec<BigInt>]) -> Result<IntLattice> {
    let dim = vectors.first().map_or(0, Vec::len);
    if vectors.iter().any(|v| v.len() != dim) {
        return Err(Error::Dimension("vectors of unequal length".into()));
    }
    let mut rows: Vec<Vec<BigInt>> = vectors.iter().filter(|v| v.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut r = 0;
    for c in 0..dim {
        if r == rows.len() {
            break;
        }
        loop {
            let best = (r..rows.len())
                .filter(|&i| !rows[i][c].is_zero())
                .min_by(|&a, &b| rows[a][c].abs().cmp(&rows[b][c].abs()).then(a.cmp(&b)));
            let Some(p) = best else { break };
            rows.swap(r, p);
            let mut done = true;
            for i in r + 1..rows.len() {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[r][c]);
                let (head, tail) = rows.split_at_mut(i);
                for (x, y) in tail[0].iter_mut().zip(&head[r]) {
                    *x -= &q * y;
                }
                if !rows[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < rows.len() && !rows[r][c].is_zero() {
            if rows[r][c].is_negative() {
                for x in rows[r].iter_mut() {
                    *x = -x.clone();
                }
            }
            for i in 0..r {
                let q = rows[i][c].div_floor(&rows[r][c]);
                if q.is_zero() {
                    continue;
                }
                let (head, tail) = rows.split_at_mut(r);
                for (x, y) in head[i].iter_mut().zip(&tail[0]) {
                    *x -= &q * y;
                }
            }
            r += 1;
        }
    }
    rows.truncate(r);
    rows.retain(|v| v.iter().any(|x| !x.is_zero()));
    Ok(IntLattice { dim, basis: rows })
}

pub fn hnf_i64(vectors: &[Vec<i64>]) -> Result<IntLattice> {
    hnf(&vectors.iter().map(|v| to_big(v)).collect::<Vec<_>>())
}

/// Membership by back-substitution through the echelon rows.
pub fn lattice_member(l: &IntLattice, v: &[BigInt]) -> Result<bool> {
    if v.len() != l.dim {
        return Err(Error::Domain(format!("vector of length {} in a lattice of dimension {}", v.len(), l.dim)));
    }
    let mut rest = v.to_vec();
    for (row, p) in l.basis.iter().zip(l.pivots()) {
        if rest[..p].iter().any(|x| !x.is_zero()) {
            return Ok(false);
        }
        let (q, rem) = rest[p].div_rem(&row[p]);
        if !rem.is_zero() {
            return Ok(false);
        }
        for (x, y) in rest.iter_mut().zip(row) {
            *x -= &q * y;
        }
    }
    Ok(rest.iter().all(Zero::is_zero))
}

/// Preimage in `Z^(l+n)` of a subgroup of `(Z/mZ)^l x Z^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedSubgroup {
    pub m: u64,
    pub l: usize,
    pub n: usize,
    pub lattice: IntLattice,
}

impl MixedSubgroup {
    pub fn contains(&self, v: &[BigInt]) -> Result<bool> {
        lattice_member(&self.lattice, v)
    }
}

pub fn mixed_subgroup_lift(gens: &[Vec<BigInt>], m: u64, l: usize, n: usize) -> Result<MixedSubgroup> {
    if m == 0 && l > 0 {
        return Err(Error::Domain("modulus must be positive".into()));
    }
    let dim = l + n;
    let modulus = BigInt::from(m);
    let mut vectors = Vec::with_capacity(gens.len() + l);
    for (k, g) in gens.iter().enumerate() {
        if g.len() != dim {
            return Err(Error::Domain(format!("generator {k} has length {}, expected {dim}", g.len())));
        }
        if let Some(i) = (0..l).find(|&i| g[i].is_negative() || g[i] >= modulus) {
            return Err(Error::Domain(format!("generator {k} coordinate {i} outside [0, {m})")));
        }
        vectors.push(g.clone());
    }
    for i in 0..l {
        let mut e = vec![BigInt::zero(); dim];
        e[i] = modulus.clone();
        vectors.push(e);
    }
    let lattice = if vectors.is_empty() { IntLattice { dim, basis: Vec::new() } } else { hnf(&vectors)? };
    Ok(MixedSubgroup { m, l, n, lattice })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Confidence {
    Exact,
    High,
    Low,
}

/// A generator `gamma` of a rank-1 exponent lattice, with each input equal to
/// `gamma^power`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveGenerator {
    /// Exact rational text in exact mode, decimal otherwise.
    pub value: String,
    pub approx: f64,
    pub powers: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentLattice {
    pub mode: Mode,
    /// Pairwise coprime integers every input factors over (exact mode).
    pub base: Vec<String>,
    /// One exponent vector per input over `base` (exact mode).
    pub exponent_vectors: Vec<Vec<i64>>,
    pub hnf: Vec<Vec<i64>>,
    pub rank: usize,
    pub primitive: Option<PrimitiveGenerator>,
    pub confidence: Confidence,
}

/// Refines `values` into pairwise coprime factors greater than 1 so that each
/// input is a product of powers of them.
pub fn coprime_base(values: &[BigInt]) -> Vec<BigInt> {
    let mut base: Vec<BigInt> = values.iter().filter(|v| **v > BigInt::one()).cloned().collect();
    base.sort();
    base.dedup();
    'outer: loop {
        for i in 0..base.len() {
            for j in i + 1..base.len() {
                let g = base[i].gcd(&base[j]);
                if g > BigInt::one() {
                    let a = &base[i] / &g;
                    let b = &base[j] / &g;
                    base.remove(j);
                    base.remove(i);
                    base.extend([a, b, g].into_iter().filter(|x| *x > BigInt::one()));
                    base.sort();
                    base.dedup();
                    continue 'outer;
                }
            }
        }
        break;
    }
    base
}

fn exponent_over(mut x: BigInt, base: &[BigInt]) -> Option<Vec<i64>> {
    let mut out = vec![0i64; base.len()];
    for (k, q) in base.iter().enumerate() {
        while (&x % q).is_zero() {
            x /= q;
            out[k] += 1;
        }
    }
    x.is_one().then_some(out)
}

fn rational_text(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact exponent lattice of positive rationals.
pub fn multiplicative_rank_exact(moduli: &[BigRational]) -> Result<ExponentLattice> {
    if let Some(k) = moduli.iter().position(|m| !m.is_positive()) {
        return Err(Error::Domain(format!("modulus {k} is not positive")));
    }
    let mut parts = Vec::new();
    for m in moduli {
        parts.push(m.numer().clone());
        parts.push(m.denom().clone());
    }
    let base = coprime_base(&parts);
    let mut vectors = Vec::with_capacity(moduli.len());
    for m in moduli {
        let num = exponent_over(m.numer().clone(), &base).expect("coprime base covers numerators");
        let den = exponent_over(m.denom().clone(), &base).expect("coprime base covers denominators");
        vectors.push(num.iter().zip(&den).map(|(a, b)| a - b).collect::<Vec<i64>>());
    }
    let lattice = if base.is_empty() { IntLattice { dim: 0, basis: Vec::new() } } else { hnf_i64(&vectors)? };
    let rank = lattice.rank();
    let primitive = (rank == 1).then(|| {
        let row = &lattice.basis_i64()[0];
        let mut gamma = BigRational::one();
        for (q, &e) in base.iter().zip(row) {
            let f = num_traits::pow(BigRational::from_integer(q.clone()), e.unsigned_abs() as usize);
            gamma = if e >= 0 { gamma * f } else { gamma / f };
        }
        let p = lattice.pivots()[0];
        let powers = vectors.iter().map(|v| v[p] / row[p]).collect();
        PrimitiveGenerator { value: rational_text(&gamma), approx: gamma.to_f64().unwrap_or(f64::NAN), powers }
    });
    Ok(ExponentLattice {
        mode: Mode::Exact,
        base: base.iter().map(ToString::to_string).collect(),
        exponent_vectors: vectors,
        hnf: lattice.basis_i64(),
        rank,
        primitive,
        confidence: Confidence::Exact,
    })
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    a.gcd(&b)
}

/// Numeric exponent lattice from logarithms. All log-ratios against the first
/// nontrivial modulus must be rationals with denominator at most `max_den`,
/// matched to `precision`; otherwise the rank is reported as 2, meaning at
/// least 2. A relation whose denominator exceeds `precision^(-1/3)` is
/// reported with [`Confidence::Low`], since ratios that are not rational at all
/// are matched that closely by their continued-fraction convergents.
pub fn multiplicative_rank_numeric(moduli: &[f64], precision: f64, max_den: u64) -> Result<ExponentLattice> {
    if let Some(k) = moduli.iter().position(|m| !(*m > 0.0) || !m.is_finite()) {
        return Err(Error::Domain(format!("modulus {k} is not positive")));
    }
    let logs: Vec<f64> = moduli.iter().map(|m| m.ln()).collect();
    let trivial = |l: f64| l.abs() <= precision;
    let Some(r) = logs.iter().position(|&l| !trivial(l)) else {
        return Ok(ExponentLattice {
            mode: Mode::Float,
            base: Vec::new(),
            exponent_vectors: Vec::new(),
            hnf: Vec::new(),
            rank: 0,
            primitive: None,
            confidence: Confidence::High,
        });
    };
    let reference = logs[r];
    let mut fracs = Vec::with_capacity(logs.len());
    let mut high = true;
    let confident_den = precision.powf(-1.0 / 3.0).floor().max(1.0) as i128;
    for &l in &logs {
        if trivial(l) {
            fracs.push((0i128, 1i128));
            continue;
        }
        let ratio = l / reference;
        let accept = precision * (1.0 + ratio.abs());
        let hit = contfrac::convergents(ratio, max_den)
            .into_iter()
            .find(|&(p, q)| (ratio - p as f64 / q as f64).abs() <= accept);
        match hit {
            Some((p, q)) => {
                high &= q <= confident_den;
                fracs.push((p, q));
            }
            None => {
                return Ok(ExponentLattice {
                    mode: Mode::Float,
                    base: Vec::new(),
                    exponent_vectors: Vec::new(),
                    hnf: Vec::new(),
                    rank: 2,
                    primitive: None,
                    confidence: if high { Confidence::High } else { Confidence::Low },
                })
            }
        }
    }
    // gamma = exp(reference * g / d) with g = gcd of numerators, d = lcm of denominators.
    let g = fracs.iter().fold(0i128, |acc, &(p, _)| gcd_i128(acc, p)).abs().max(1);
    let d = fracs.iter().fold(1i128, |acc, &(_, q)| acc.lcm(&q));
    let unit = reference * g as f64 / d as f64;
    let powers: Vec<i64> = fracs.iter().map(|&(p, q)| (p * (d / q) / g) as i64).collect();
    let gamma = unit.exp();
    Ok(ExponentLattice {
        mode: Mode::Float,
        base: vec!["ln".into()],
        exponent_vectors: powers.iter().map(|&k| vec![k]).collect(),
        hnf: vec![vec![1]],
        rank: 1,
        primitive: Some(PrimitiveGenerator { value: format!("{gamma:?}"), approx: gamma, powers }),
        confidence: if high { Confidence::High } else { Confidence::Low },
    })
}

/// Dispatches on the scalar mode. Exact inputs must be positive rationals.
pub fn multiplicative_rank<T: Scalar>(moduli: &[T], precision: f64, max_den: u64) -> Result<ExponentLattice> {
    match T::MODE {
        Mode::Exact => {
            let rats = moduli
                .iter()
                .enumerate()
                .map(|(k, m)| m.to_rational().ok_or_else(|| Error::Domain(format!("modulus {k} is not rational"))))
                .collect::<Result<Vec<_>>>()?;
            multiplicative_rank_exact(&rats)
        }
        Mode::Float => {
            let vals: Vec<f64> = moduli
                .iter()
                .enumerate()
                .map(|(k, m)| {
                    let z = m.to_c64();
                    if z.im.abs() > precision {
                        Err(Error::Domain(format!("modulus {k} is not real")))
                    } else {
                        Ok(z.re)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            multiplicative_rank_numeric(&vals, precision, max_den)
        }
    }
}
