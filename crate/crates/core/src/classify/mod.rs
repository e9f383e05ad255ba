//! The classification pipeline: discreteness, finiteness, non-diagonalizable
//! elements, growth, virtual abelianness and the base `lambda`.

pub mod certificate;
pub mod probe;
pub mod verify;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cayley::{
    self, assouad_lower_bound, discreteness_from_ball, enumerate_ball, growth_profile, separation_stats, Ball,
    DiscretenessReport, DiscretenessVerdict, GrowthClass, GrowthTag, Word,
};
use crate::error::{Error, Result};
use crate::group::{AnyGroup, GroupSpec};
use crate::intlattice::multiplicative_rank_exact;
use crate::matrix::Matrix;
use crate::numeric;
use crate::scalar::{Complex64, Mode, Scalar};
use crate::spectral::{self, DiagonalizabilityReason, DEFAULT_CONDITION_CAP, DEFAULT_MAX_DENOMINATOR};
use crate::structure::{find_heisenberg_triple, TorsionEvidence};

pub use certificate::*;
pub use probe::{extract_lambda, virtually_abelian_probe, LambdaOutcome, LambdaResult, ProbeOutcome, VAWitness};
pub use verify::{verify, VerifyReport};

/// First and last ball radius used for the Assouad regression.
pub const ASSOUAD_FIRST: usize = 3;
pub const ASSOUAD_LAST: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyConfig {
    pub depth: usize,
    pub cap: usize,
    pub max_order: u64,
    pub exponent_max: usize,
    pub window: usize,
    pub precision: f64,
    pub condition_cap: f64,
    pub ratio_samples: usize,
    pub heisenberg_depth: usize,
    pub max_denominator: u64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            depth: cayley::DEFAULT_DEPTH,
            cap: cayley::DEFAULT_CAP,
            max_order: 360,
            exponent_max: 12,
            window: cayley::DEFAULT_WINDOW,
            precision: 1e-9,
            condition_cap: DEFAULT_CONDITION_CAP,
            ratio_samples: 10,
            heisenberg_depth: 2,
            max_denominator: DEFAULT_MAX_DENOMINATOR,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DefinesZReason {
    NonDiagonalizableElement,
    ExponentialGrowthAssouad,
    IndependentModuli,
    NotDiscreteEvidence,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum Verdict {
    DefinesZ {
        reason: DefinesZReason,
        outside_hypothesis: bool,
    },
    Tame {
        lambda: String,
        lambda_approx: f64,
        unit_order: u64,
        index: usize,
        coset_reps: Vec<MatrixText>,
        numeric_confidence: bool,
    },
    FiniteGroup {
        order: usize,
    },
    Inconclusive {
        diagnostics: Vec<String>,
    },
}

impl Verdict {
    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::DefinesZ { .. } => "DefinesZ",
            Verdict::Tame { .. } => "Tame",
            Verdict::FiniteGroup { .. } => "FiniteGroup",
            Verdict::Inconclusive { .. } => "Inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallSummary {
    pub depth: usize,
    pub completed_depth: usize,
    pub sizes: Vec<usize>,
    pub truncated: bool,
    pub closed: bool,
    pub max_merged_distance: f64,
}

impl BallSummary {
    fn of<T: Scalar>(ball: &Ball<T>) -> Self {
        BallSummary {
            depth: ball.depth,
            completed_depth: ball.completed_depth(),
            sizes: ball.sizes.clone(),
            truncated: ball.truncated,
            closed: ball.closed,
            max_merged_distance: ball.max_merged_distance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub scanned: usize,
    pub witness_word: Option<Word>,
    pub witness_depth: Option<usize>,
    pub numeric_ambiguous: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeSummary {
    pub float_fallback: bool,
    pub exponent: Option<usize>,
    pub family_size: Option<usize>,
    pub index: Option<usize>,
    pub outcome: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergSummary {
    pub depth: usize,
    pub found: bool,
    pub a_word: Option<Word>,
    pub b_word: Option<Word>,
    /// The triple is central only within the ball of this radius.
    pub central_depth: Option<usize>,
    pub torsion: Option<TorsionEvidence>,
    pub pairs_examined: usize,
    pub truncated: bool,
}

/// Per-stage observations, in pipeline order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub ball: Option<BallSummary>,
    pub discreteness: Option<DiscretenessReport>,
    pub scan: Option<ScanSummary>,
    pub growth: Option<GrowthClass>,
    pub probe: Option<ProbeSummary>,
    pub heisenberg: Option<HeisenbergSummary>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub certificate: Certificate,
    pub diagnostics: Diagnostics,
}

/// Runs the pipeline on a group in either mode.
pub fn classify_any(group: &AnyGroup, config: &ClassifyConfig) -> Result<Classification> {
    match group {
        AnyGroup::Exact(g) => classify(g, config),
        AnyGroup::Float(g) => classify(g, config),
    }
}

fn validate(config: &ClassifyConfig) -> Result<()> {
    if config.depth == 0 {
        return Err(Error::Precondition("depth must be at least 1".into()));
    }
    if config.cap < 2 {
        return Err(Error::Precondition("cap must be at least 2".into()));
    }
    if config.window < 4 {
        return Err(Error::Precondition("window must be at least 4".into()));
    }
    if config.exponent_max == 0 || config.max_order == 0 || config.ratio_samples == 0 {
        return Err(Error::Precondition("exponent_max, max_order and ratio_samples must be positive".into()));
    }
    if !(config.precision > 0.0) || !(config.condition_cap > 1.0) {
        return Err(Error::Precondition("precision must be positive and condition_cap above 1".into()));
    }
    Ok(())
}

struct Run<'a, T: Scalar> {
    spec: &'a GroupSpec<T>,
    config: &'a ClassifyConfig,
    diagnostics: Diagnostics,
}

/// Classifies `spec`. Stages run in a fixed order and the first decisive one
/// produces the verdict and its certificate. When the ball accumulates at the
/// identity, every `DefinesZ` verdict is flagged as outside the discrete
/// setting and an undecided run reports the accumulation.
pub fn classify<T: Scalar>(spec: &GroupSpec<T>, config: &ClassifyConfig) -> Result<Classification> {
    validate(config)?;
    let mut run = Run { spec, config, diagnostics: Diagnostics::default() };
    let ball = enumerate_ball(spec, config.depth, config.cap);
    run.diagnostics.ball = Some(BallSummary::of(&ball));

    let disc = discreteness_from_ball(spec, &ball);
    run.diagnostics.discreteness = Some(disc.clone());
    let approach = approach_witness(&disc.verdict);
    if let Some(a) = &approach {
        run.diagnostics.notes.push(format!(
            "ball elements approach the identity (||g - I|| = {:e}); the group is outside the discrete setting",
            a.value
        ));
        if let Some(found) = run.rank_rule(a)? {
            return Ok(found);
        }
    }
    let result = run.stages(&ball)?;
    Ok(match approach {
        Some(a) => outside_discrete(result, a),
        None => result,
    })
}

fn approach_witness(verdict: &DiscretenessVerdict) -> Option<ApproachWitness> {
    match verdict {
        DiscretenessVerdict::ApproachingIdentity { word, value } => {
            Some(ApproachWitness { word: word.clone(), value: *value })
        }
        _ => None,
    }
}

fn outside_discrete(mut c: Classification, witness: ApproachWitness) -> Classification {
    match &mut c.verdict {
        Verdict::DefinesZ { outside_hypothesis, .. } => {
            *outside_hypothesis = true;
            c.certificate.set_outside(witness);
        }
        Verdict::Inconclusive { diagnostics } => {
            if let Certificate::Inconclusive(cert) = &mut c.certificate {
                let stage = std::mem::replace(&mut cert.stage, InconclusiveStage::NotDiscrete);
                if stage != InconclusiveStage::NotDiscrete {
                    let note = format!("pipeline stopped at stage {}", stage_name(stage));
                    c.diagnostics.notes.push(note.clone());
                    diagnostics.push(note);
                }
            }
            if let Some(first) = diagnostics.first_mut() {
                *first = format!("stage: {}", stage_name(InconclusiveStage::NotDiscrete));
            }
        }
        _ => c.diagnostics.notes.push("the verdict implies discreteness; the accumulation is spurious".into()),
    }
    c
}

impl<T: Scalar> Run<'_, T> {
    fn stages(mut self, ball: &Ball<T>) -> Result<Classification> {
        if ball.closed {
            return Ok(self.finite(ball));
        }

        if let Some(found) = self.scan_non_diagonalizable(ball)? {
            return Ok(found);
        }
        if ball.truncated {
            self.diagnostics.notes.push(format!(
                "ball truncated at {} elements after depth {}",
                ball.elements.len(),
                ball.completed_depth()
            ));
            return Ok(self.inconclusive(InconclusiveStage::Truncated, ball));
        }

        if let Some(found) = self.growth(ball)? {
            return Ok(found);
        }

        match self.probe(ball)? {
            Some(found) => Ok(found),
            None => {
                self.heisenberg();
                Ok(self.inconclusive(InconclusiveStage::ProbeAbsent, ball))
            }
        }
    }
}

impl<T: Scalar> Run<'_, T> {
    fn tol(&self) -> f64 {
        self.spec.tolerance()
    }

    fn done(self, verdict: Verdict, certificate: Certificate) -> Classification {
        Classification { verdict, certificate, diagnostics: self.diagnostics }
    }

    fn inconclusive_with(mut self, stage: InconclusiveStage, ball: &Ball<T>, note: Option<String>) -> Classification {
        if let Some(n) = note {
            self.diagnostics.notes.push(n);
        }
        let mut lines = vec![format!("stage: {}", stage_name(stage))];
        lines.extend(self.diagnostics.notes.iter().cloned());
        let cert = Certificate::Inconclusive(InconclusiveCertificate {
            mode: T::MODE,
            stage,
            depth: self.config.depth,
            cap: self.config.cap,
            sizes: ball.sizes.clone(),
            truncated: ball.truncated,
        });
        self.done(Verdict::Inconclusive { diagnostics: lines }, cert)
    }

    fn inconclusive(self, stage: InconclusiveStage, ball: &Ball<T>) -> Classification {
        self.inconclusive_with(stage, ball, None)
    }

    /// For exact 1 x 1 input, squared moduli of multiplicative rank at least
    /// 2 decide the verdict without discreteness.
    fn rank_rule(&mut self, approach: &ApproachWitness) -> Result<Option<Classification>> {
        if T::MODE != Mode::Exact || self.spec.n() != 1 {
            return Ok(None);
        }
        let words: Vec<Word> =
            (0..self.spec.generators().len()).map(|i| vec![self.spec.letter_of_generator(i)]).collect();
        let diagonals: Vec<Vec<String>> =
            self.spec.generators().iter().map(|g| vec![g.get(0, 0).to_text()]).collect();
        let sq = self
            .spec
            .generators()
            .iter()
            .map(|g| g.get(0, 0).abs_sq().to_rational().ok_or_else(|| Error::Domain("modulus is not rational".into())))
            .collect::<Result<Vec<_>>>()?;
        let lattice = multiplicative_rank_exact(&sq)?;
        if lattice.rank < 2 {
            self.diagnostics.notes.push(format!("moduli have multiplicative rank {}", lattice.rank));
            return Ok(None);
        }
        let cert = Certificate::ModuliIndependence(ModuliCertificate {
            mode: Mode::Exact,
            outside_hypothesis: true,
            approach: Some(approach.clone()),
            exponent: 1,
            family_words: probe::power_family(self.spec, 1)?.into_iter().map(|f| f.0).collect(),
            basis: Matrix::<T>::identity(1).to_text(),
            words,
            diagonals,
            moduli_squared: sq.iter().map(probe::rational_text).collect(),
            lattice,
        });
        let run = Run { spec: self.spec, config: self.config, diagnostics: std::mem::take(&mut self.diagnostics) };
        Ok(Some(run.done(Verdict::DefinesZ { reason: DefinesZReason::IndependentModuli, outside_hypothesis: true }, cert)))
    }

    fn finite(self, ball: &Ball<T>) -> Classification {
        let order = ball.elements.len();
        let cert = Certificate::Finite(FiniteCertificate {
            mode: T::MODE,
            order,
            words: ball.elements.iter().map(|e| e.word.clone()).collect(),
        });
        self.done(Verdict::FiniteGroup { order }, cert)
    }

    fn non_diagonalizable(self, word: &Word, m: &Matrix<T>) -> Result<Classification> {
        let tol = self.tol();
        let cap = self.config.condition_cap;
        let report = spectral::is_diagonalizable(m, tol, cap);
        let (minimal_polynomial, repeated_factor, numeric) = match report.reason {
            DiagonalizabilityReason::RepeatedFactor { minimal_polynomial, repeated_factor } => {
                (Some(minimal_polynomial.to_coeff_strings()), Some(repeated_factor.to_coeff_strings()), None)
            }
            DiagonalizabilityReason::Numeric(nd) => (None, None, Some(nd)),
            DiagonalizabilityReason::SquarefreeMinimalPolynomial { .. } => {
                return Err(Error::Precondition("witness is diagonalizable".into()))
            }
        };
        let ratio = ratio_evidence(m, tol, cap, self.config.ratio_samples).ok();
        let cert = Certificate::NonDiagonalizable(NonDiagonalizableCertificate {
            mode: T::MODE,
            outside_hypothesis: false,
            approach: None,
            word: word.clone(),
            matrix: m.to_text(),
            minimal_polynomial,
            repeated_factor,
            numeric,
            numeric_only: T::MODE == Mode::Float,
            ratio,
        });
        Ok(self.done(
            Verdict::DefinesZ { reason: DefinesZReason::NonDiagonalizableElement, outside_hypothesis: false },
            cert,
        ))
    }

    /// First ball element (in breadth-first order) that is not
    /// diagonalizable. In float mode an answer without a clear margin stops
    /// the scan as ambiguous.
    fn scan_non_diagonalizable(&mut self, ball: &Ball<T>) -> Result<Option<Classification>> {
        let tol = self.tol();
        let cap = self.config.condition_cap;
        let limit = ball.sizes[ball.completed_depth()];
        let hit = ball.elements[..limit].par_iter().position_first(|e| {
            let r = spectral::is_diagonalizable(&e.matrix, tol, cap);
            let clear = match &r.reason {
                DiagonalizabilityReason::Numeric(nd) => nd.margin_clear,
                _ => true,
            };
            !r.diagonalizable || !clear
        });
        let Some(idx) = hit else {
            self.diagnostics.scan =
                Some(ScanSummary { scanned: limit, witness_word: None, witness_depth: None, numeric_ambiguous: false });
            return Ok(None);
        };
        let e = &ball.elements[idx];
        let r = spectral::is_diagonalizable(&e.matrix, tol, cap);
        let ambiguous = r.diagonalizable || matches!(&r.reason, DiagonalizabilityReason::Numeric(nd) if !nd.margin_clear);
        self.diagnostics.scan = Some(ScanSummary {
            scanned: idx + 1,
            witness_word: Some(e.word.clone()),
            witness_depth: Some(e.word.len()),
            numeric_ambiguous: ambiguous,
        });
        let run = Run { spec: self.spec, config: self.config, diagnostics: std::mem::take(&mut self.diagnostics) };
        if ambiguous {
            let note = format!("numeric diagonalizability of word {:?} is within a factor 10 of the thresholds", e.word);
            return Ok(Some(run.inconclusive_with(InconclusiveStage::NumericAmbiguity, ball, Some(note))));
        }
        run.non_diagonalizable(&e.word, &e.matrix).map(Some)
    }

    fn growth(&mut self, ball: &Ball<T>) -> Result<Option<Classification>> {
        let growth = match growth_profile(&ball.sizes, self.config.window) {
            Ok(g) => g,
            Err(e) => {
                self.diagnostics.notes.push(format!("growth not classified: {e}"));
                return Ok(None);
            }
        };
        self.diagnostics.growth = Some(growth.clone());
        if !matches!(growth.tag, GrowthTag::Exponential { .. }) {
            return Ok(None);
        }
        let tol = self.tol();
        if T::MODE == Mode::Float && ball.max_merged_distance >= tol / 10.0 {
            self.diagnostics.notes.push(format!(
                "exponential growth not certified: merged products differ by up to {:e}",
                ball.max_merged_distance
            ));
            let run = Run { spec: self.spec, config: self.config, diagnostics: std::mem::take(&mut self.diagnostics) };
            return Ok(Some(run.inconclusive(InconclusiveStage::GrowthRefused, ball)));
        }
        let cert = growth_certificate(self.spec, ball, growth, self.config.window)?;
        let run = Run { spec: self.spec, config: self.config, diagnostics: std::mem::take(&mut self.diagnostics) };
        Ok(Some(run.done(
            Verdict::DefinesZ { reason: DefinesZReason::ExponentialGrowthAssouad, outside_hypothesis: false },
            Certificate::GrowthAssouad(cert),
        )))
    }

    fn probe(&mut self, ball: &Ball<T>) -> Result<Option<Classification>> {
        match virtually_abelian_probe(self.spec, self.config.exponent_max, self.config.condition_cap) {
            Ok(outcome) => self.after_probe(ball, outcome, false),
            Err(Error::SpectrumNotRepresentable) if T::MODE == Mode::Exact => {
                self.diagnostics.notes.push("exact eigenvalues not in Q(i); probing in floating point".into());
                let float = float_spec(self.spec)?;
                let outcome = virtually_abelian_probe(&float, self.config.exponent_max, self.config.condition_cap)?;
                self.after_probe_float(ball, &float, outcome)
            }
            Err(e) => Err(e),
        }
    }

    fn after_probe_float(
        &mut self,
        ball: &Ball<T>,
        float: &GroupSpec<Complex64>,
        outcome: ProbeOutcome<Complex64>,
    ) -> Result<Option<Classification>> {
        let mut sub = Run { spec: float, config: self.config, diagnostics: std::mem::take(&mut self.diagnostics) };
        let result = sub.witness_step(outcome, true)?;
        self.diagnostics = sub.diagnostics;
        Ok(self.finish_step(ball, result))
    }

    fn after_probe(&mut self, ball: &Ball<T>, outcome: ProbeOutcome<T>, fallback: bool) -> Result<Option<Classification>> {
        let result = self.witness_step(outcome, fallback)?;
        Ok(self.finish_step(ball, result))
    }

    fn finish_step(&mut self, ball: &Ball<T>, result: StepResult) -> Option<Classification> {
        let run = Run { spec: self.spec, config: self.config, diagnostics: std::mem::take(&mut self.diagnostics) };
        match result {
            StepResult::Decided(verdict, mut cert) => {
                set_mode(&mut cert, T::MODE);
                Some(run.done(verdict, cert))
            }
            StepResult::Stuck(stage, note) => Some(run.inconclusive_with(stage, ball, Some(note))),
            StepResult::Absent => {
                self.diagnostics = run.diagnostics;
                None
            }
        }
    }

    /// Turns a probe outcome into a verdict. Certificates carry `T::MODE` as
    /// their witness mode; the caller stamps the mode of the input.
    fn witness_step(&mut self, outcome: ProbeOutcome<T>, fallback: bool) -> Result<StepResult> {
        let witness = match outcome {
            ProbeOutcome::Absent { tried } => {
                self.diagnostics.probe = Some(ProbeSummary {
                    float_fallback: fallback,
                    exponent: None,
                    family_size: None,
                    index: None,
                    outcome: format!("no verified witness for exponents 1..={tried}"),
                });
                return Ok(StepResult::Absent);
            }
            ProbeOutcome::NotDiagonalizable { word, matrix } => {
                self.diagnostics.probe = Some(ProbeSummary {
                    float_fallback: fallback,
                    exponent: None,
                    family_size: None,
                    index: None,
                    outcome: format!("non-diagonalizable power {word:?}"),
                });
                let run = Run { spec: self.spec, config: self.config, diagnostics: Diagnostics::default() };
                if fallback {
                    return Ok(StepResult::Stuck(
                        InconclusiveStage::NumericAmbiguity,
                        "non-diagonalizable power found only in floating point".into(),
                    ));
                }
                let c = run.non_diagonalizable(&word, &matrix)?;
                return Ok(StepResult::Decided(c.verdict, c.certificate));
            }
            ProbeOutcome::Witness(w) => w,
        };
        self.diagnostics.probe = Some(ProbeSummary {
            float_fallback: fallback,
            exponent: Some(witness.exponent),
            family_size: Some(witness.family.len()),
            index: Some(witness.index()),
            outcome: "witness".into(),
        });
        let c = self.config;
        let outcome = extract_lambda(self.spec, &witness, c.max_order, c.precision, c.max_denominator)?;
        let basis = witness.basis().to_text();
        Ok(match outcome {
            LambdaOutcome::Tame(l) => {
                let verdict = Verdict::Tame {
                    lambda: l.lambda.clone(),
                    lambda_approx: l.lambda_approx,
                    unit_order: l.unit_order,
                    index: witness.index(),
                    coset_reps: witness.coset_reps.iter().map(Matrix::to_text).collect(),
                    numeric_confidence: T::MODE == Mode::Float,
                };
                let cert = Certificate::Tame(TameCertificate {
                    mode: T::MODE,
                    witness_mode: T::MODE,
                    exponent: witness.exponent,
                    family_words: witness.family_words.clone(),
                    basis,
                    permutations: witness.permutations.clone(),
                    coset_words: witness.coset_words.clone(),
                    coset_reps: witness.coset_reps.iter().map(Matrix::to_text).collect(),
                    lambda: l,
                });
                StepResult::Decided(verdict, cert)
            }
            LambdaOutcome::IndependentModuli { schreier_words, schreier_diagonals, moduli, lattice } => {
                if T::MODE == Mode::Float {
                    StepResult::Stuck(
                        InconclusiveStage::NumericModuli,
                        format!("numeric moduli appear independent (rank {}); not certified", lattice.rank),
                    )
                } else {
                    let cert = Certificate::ModuliIndependence(ModuliCertificate {
                        mode: T::MODE,
                        outside_hypothesis: false,
                        approach: None,
                        exponent: witness.exponent,
                        family_words: witness.family_words.clone(),
                        basis,
                        words: schreier_words,
                        diagonals: schreier_diagonals,
                        moduli_squared: moduli,
                        lattice,
                    });
                    StepResult::Decided(
                        Verdict::DefinesZ { reason: DefinesZReason::IndependentModuli, outside_hypothesis: false },
                        cert,
                    )
                }
            }
            LambdaOutcome::UnitPartInfinite { word, coordinate, value } => {
                let cert = Certificate::UnitPartInfinite(UnitPartCertificate {
                    mode: T::MODE,
                    witness_mode: T::MODE,
                    outside_hypothesis: false,
                    approach: None,
                    exponent: witness.exponent,
                    family_words: witness.family_words.clone(),
                    basis,
                    word,
                    coordinate,
                    value,
                    max_order: c.max_order,
                    rigorous: T::MODE == Mode::Exact,
                });
                StepResult::Decided(
                    Verdict::DefinesZ { reason: DefinesZReason::NotDiscreteEvidence, outside_hypothesis: false },
                    cert,
                )
            }
            LambdaOutcome::Degenerate { reason } => StepResult::Stuck(InconclusiveStage::DegenerateLambda, reason),
        })
    }

    fn heisenberg(&mut self) {
        let c = self.config;
        let depth = c.heisenberg_depth.max(2);
        let summary = match find_heisenberg_triple(self.spec, depth, c.cap, c.max_order) {
            Ok(s) => HeisenbergSummary {
                depth,
                found: s.triple.is_some(),
                a_word: s.triple.as_ref().map(|t| t.a_word.clone()),
                b_word: s.triple.as_ref().map(|t| t.b_word.clone()),
                central_depth: s.triple.as_ref().map(|t| t.central_depth),
                torsion: s.triple.as_ref().map(|t| t.torsion.clone()),
                pairs_examined: s.pairs_examined,
                truncated: s.truncated,
            },
            Err(e) => {
                self.diagnostics.notes.push(format!("heisenberg search failed: {e}"));
                return;
            }
        };
        self.diagnostics.heisenberg = Some(summary);
    }
}

enum StepResult {
    Decided(Verdict, Certificate),
    Stuck(InconclusiveStage, String),
    Absent,
}

fn set_mode(cert: &mut Certificate, mode: Mode) {
    match cert {
        Certificate::NonDiagonalizable(c) => c.mode = mode,
        Certificate::GrowthAssouad(c) => c.mode = mode,
        Certificate::ModuliIndependence(c) => c.mode = mode,
        Certificate::UnitPartInfinite(c) => c.mode = mode,
        Certificate::Tame(c) => c.mode = mode,
        Certificate::Finite(c) => c.mode = mode,
        Certificate::Inconclusive(c) => c.mode = mode,
    }
}

pub(crate) fn stage_name(stage: InconclusiveStage) -> &'static str {
    match stage {
        InconclusiveStage::NotDiscrete => "not_discrete",
        InconclusiveStage::Truncated => "truncated",
        InconclusiveStage::NumericAmbiguity => "numeric_ambiguity",
        InconclusiveStage::GrowthRefused => "growth_refused",
        InconclusiveStage::ProbeAbsent => "probe_absent",
        InconclusiveStage::DegenerateLambda => "degenerate_lambda",
        InconclusiveStage::NumericModuli => "numeric_moduli",
    }
}

/// Floating-point copy of `spec`.
pub fn float_spec<T: Scalar>(spec: &GroupSpec<T>) -> Result<GroupSpec<Complex64>> {
    GroupSpec::new(spec.generators().iter().map(Matrix::to_c64).collect(), spec.tolerance())
}

/// Assouad depths available in a ball completed to `depth`.
pub fn assouad_depths(depth: usize) -> Vec<usize> {
    (ASSOUAD_FIRST..=ASSOUAD_LAST.min(depth)).collect()
}

/// Smallest `||g - I||` over the non-identity matrices.
pub fn identity_floor<T: Scalar>(spec: &GroupSpec<T>, mats: &[Matrix<T>]) -> Option<f64> {
    let id = spec.identity();
    mats.iter()
        .filter(|m| !m.approx_eq(&id, spec.tol_for(m)))
        .map(|m| numeric::operator_norm(&m.sub(&id)))
        .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.min(d))))
}

pub fn growth_certificate<T: Scalar>(
    spec: &GroupSpec<T>,
    ball: &Ball<T>,
    growth: GrowthClass,
    window: usize,
) -> Result<GrowthCertificate> {
    let depth = ball.completed_depth();
    let mats: Vec<Matrix<T>> = ball.elements.iter().map(|e| e.matrix.clone()).collect();
    let floor = identity_floor(spec, &mats).ok_or_else(|| Error::Precondition("trivial group".into()))?;
    let depths = assouad_depths(depth);
    let separation =
        depths.iter().map(|&m| separation_stats(&ball.matrices_up_to(m), spec)).collect::<Result<Vec<_>>>()?;
    let norm_bound = spec.symmetric().iter().map(numeric::operator_norm).fold(0.0, f64::max);
    let ratio_bounds = depths.iter().map(|&m| 2.0 / floor * norm_bound.powi(2 * m as i32)).collect();
    let assouad = assouad_lower_bound(&separation);
    Ok(GrowthCertificate {
        outside_hypothesis: false,
        approach: None,
        mode: T::MODE,
        depth,
        window,
        words: ball.elements.iter().map(|e| e.word.clone()).collect(),
        sizes: ball.sizes.clone(),
        growth,
        separation_floor: floor,
        norm_bound,
        assouad_depths: depths,
        separation,
        ratio_bounds,
        assouad,
    })
}
