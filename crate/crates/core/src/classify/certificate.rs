//! Serializable evidence behind each verdict. Scalars and matrices are
//! stored as text so exact values survive a JSON round trip.

use serde::{Deserialize, Serialize};

use crate::cayley::{AssouadEstimate, GrowthClass, SeparationStats, Word};
use crate::error::{Error, Result};
use crate::intlattice::ExponentLattice;
use crate::matrix::Matrix;
use crate::numeric::NumericDiagonalization;
use crate::scalar::{Mode, Scalar};
use crate::structure::{build_ratio_function, density_statistic, sample_ratio_image};

use super::probe::LambdaResult;

pub type MatrixText = Vec<Vec<String>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    NonDiagonalizable(NonDiagonalizableCertificate),
    GrowthAssouad(GrowthCertificate),
    ModuliIndependence(ModuliCertificate),
    UnitPartInfinite(UnitPartCertificate),
    Tame(TameCertificate),
    Finite(FiniteCertificate),
    Inconclusive(InconclusiveCertificate),
}

impl Certificate {
    pub fn mode(&self) -> Mode {
        match self {
            Certificate::NonDiagonalizable(c) => c.mode,
            Certificate::GrowthAssouad(c) => c.mode,
            Certificate::ModuliIndependence(c) => c.mode,
            Certificate::UnitPartInfinite(c) => c.mode,
            Certificate::Tame(c) => c.mode,
            Certificate::Finite(c) => c.mode,
            Certificate::Inconclusive(c) => c.mode,
        }
    }

    /// Flag and witness for a group whose ball accumulates at the identity.
    /// `None` for certificates that carry no such field.
    pub fn outside(&self) -> Option<(bool, Option<&ApproachWitness>)> {
        match self {
            Certificate::NonDiagonalizable(c) => Some((c.outside_hypothesis, c.approach.as_ref())),
            Certificate::GrowthAssouad(c) => Some((c.outside_hypothesis, c.approach.as_ref())),
            Certificate::ModuliIndependence(c) => Some((c.outside_hypothesis, c.approach.as_ref())),
            Certificate::UnitPartInfinite(c) => Some((c.outside_hypothesis, c.approach.as_ref())),
            _ => None,
        }
    }

    pub(crate) fn set_outside(&mut self, witness: ApproachWitness) {
        let fields = match self {
            Certificate::NonDiagonalizable(c) => (&mut c.outside_hypothesis, &mut c.approach),
            Certificate::GrowthAssouad(c) => (&mut c.outside_hypothesis, &mut c.approach),
            Certificate::ModuliIndependence(c) => (&mut c.outside_hypothesis, &mut c.approach),
            Certificate::UnitPartInfinite(c) => (&mut c.outside_hypothesis, &mut c.approach),
            _ => return,
        };
        *fields.0 = true;
        *fields.1 = Some(witness);
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::NonDiagonalizable(_) => "non_diagonalizable",
            Certificate::GrowthAssouad(_) => "growth_assouad",
            Certificate::ModuliIndependence(_) => "moduli_independence",
            Certificate::UnitPartInfinite(_) => "unit_part_infinite",
            Certificate::Tame(_) => "tame",
            Certificate::Finite(_) => "finite",
            Certificate::Inconclusive(_) => "inconclusive",
        }
    }
}

/// Density evidence from the ratio function of a non-diagonalizable element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioEvidence {
    pub block_start: usize,
    pub block_size: usize,
    pub eigenvalue: String,
    /// Samples are `h(a^i, a^j)` for `1 <= i, j <= grid`.
    pub grid: usize,
    pub samples: usize,
    pub matches_i_over_j: bool,
    /// Fraction of `10 * grid` cells of `[0, 1]` hit by the samples.
    pub density: f64,
}

/// A word whose matrix has a repeated factor in its minimal polynomial
/// (exact), or fails the numeric eigendecomposition with a clear margin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonDiagonalizableCertificate {
    pub mode: Mode,
    pub outside_hypothesis: bool,
    pub approach: Option<ApproachWitness>,
    pub word: Word,
    pub matrix: MatrixText,
    pub minimal_polynomial: Option<Vec<String>>,
    pub repeated_factor: Option<Vec<String>>,
    pub numeric: Option<NumericDiagonalization>,
    /// Set for float mode, where only numeric evidence exists.
    pub numeric_only: bool,
    pub ratio: Option<RatioEvidence>,
}

/// The full ball as words, with growth and separation statistics derived
/// from it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthCertificate {
    pub mode: Mode,
    pub outside_hypothesis: bool,
    pub approach: Option<ApproachWitness>,
    pub depth: usize,
    pub window: usize,
    pub words: Vec<Word>,
    pub sizes: Vec<usize>,
    pub growth: GrowthClass,
    /// Smallest `||g - I||` over the non-identity words.
    pub separation_floor: f64,
    pub norm_bound: f64,
    pub assouad_depths: Vec<usize>,
    pub separation: Vec<SeparationStats>,
    /// `(2 / D) * B^(2m)` for each Assouad depth `m`.
    pub ratio_bounds: Vec<f64>,
    pub assouad: AssouadEstimate,
}

/// A non-identity ball element close to the identity, as reported by the
/// discreteness probe.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproachWitness {
    pub word: Word,
    pub value: f64,
}

/// Simultaneously diagonal elements whose squared coordinate moduli have
/// multiplicative rank at least 2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuliCertificate {
    pub mode: Mode,
    pub outside_hypothesis: bool,
    pub approach: Option<ApproachWitness>,
    /// Power family of this exponent; its canonical simultaneous
    /// diagonalization is `basis`.
    pub exponent: usize,
    pub family_words: Vec<Word>,
    pub basis: MatrixText,
    pub words: Vec<Word>,
    pub diagonals: Vec<Vec<String>>,
    pub moduli_squared: Vec<String>,
    pub lattice: ExponentLattice,
}

/// A diagonal element with a coordinate whose unit part has infinite order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitPartCertificate {
    pub mode: Mode,
    /// Arithmetic used for the witness; float when exact eigenvalues were
    /// not representable.
    pub witness_mode: Mode,
    pub outside_hypothesis: bool,
    pub approach: Option<ApproachWitness>,
    pub exponent: usize,
    pub family_words: Vec<Word>,
    pub basis: MatrixText,
    pub word: Word,
    pub coordinate: usize,
    pub value: String,
    pub max_order: u64,
    /// Exact arithmetic rules out every possible finite order.
    pub rigorous: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TameCertificate {
    pub mode: Mode,
    pub witness_mode: Mode,
    pub exponent: usize,
    pub family_words: Vec<Word>,
    pub basis: MatrixText,
    pub permutations: Vec<Vec<usize>>,
    pub coset_words: Vec<Word>,
    pub coset_reps: Vec<MatrixText>,
    pub lambda: LambdaResult,
}

/// Words of every group element, closed under multiplication by generators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteCertificate {
    pub mode: Mode,
    pub order: usize,
    pub words: Vec<Word>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InconclusiveStage {
    NotDiscrete,
    Truncated,
    NumericAmbiguity,
    GrowthRefused,
    ProbeAbsent,
    DegenerateLambda,
    NumericModuli,
}

/// What was explored before giving up; replayable as a ball enumeration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InconclusiveCertificate {
    pub mode: Mode,
    pub stage: InconclusiveStage,
    pub depth: usize,
    pub cap: usize,
    pub sizes: Vec<usize>,
    pub truncated: bool,
}

/// Builds the ratio-function evidence for a non-diagonalizable matrix.
pub fn ratio_evidence<T: Scalar>(a: &Matrix<T>, tol: f64, cap: f64, grid: usize) -> Result<RatioEvidence> {
    let rf = build_ratio_function(a, tol, cap)?;
    let (start, size) = rf
        .jordan
        .first_nontrivial_block()
        .ok_or_else(|| Error::Numerical("no Jordan block of size >= 2".into()))?;
    let eigenvalue = rf.jordan.jordan_form().get(start, start).to_text();
    let samples = sample_ratio_image(&rf, grid, grid, tol)?;
    let matches = samples.skipped == 0
        && samples.samples.iter().all(|(i, j, v)| {
            let expected = T::from_ratio(*i as i64, *j as i64);
            v.approx_eq(&expected, match T::MODE {
                Mode::Exact => 0.0,
                Mode::Float => tol.sqrt(),
            })
        });
    let density = density_statistic(&samples.real_values(), 0.0, 1.0, 10 * grid);
    Ok(RatioEvidence {
        block_start: start,
        block_size: size,
        eigenvalue,
        grid,
        samples: samples.samples.len(),
        matches_i_over_j: matches,
        density,
    })
}
