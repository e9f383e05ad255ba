//! Command-line surface of the classifier: JSON input, one subcommand per
//! library operation, JSON reports and CSV tables.

pub mod input;
pub mod report;

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use tamegroup::cayley::{ball_growth, ball_table, discreteness_probe, enumerate_ball, GrowthClass};
use tamegroup::classify::{extract_lambda, virtually_abelian_probe, LambdaOutcome, LambdaResult, ProbeOutcome};
use tamegroup::intlattice::ExponentLattice;
use tamegroup::spectral::{jordan_basis, jordan_block, jordan_block_power, scaled_tol};
use tamegroup::{classify, verify, AnyGroup, Classification, Error, GroupSpec, Matrix, Mode, Scalar};

use input::{parse_input, InputDocument, Overrides, Settings};
use report::{sha256_hex, Deterministic, Report, Timing};

/// Largest power compared against repeated products by `jordan`.
pub const JORDAN_POWER_CHECK: u64 = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// The certificate did not replay, or the report could not be read.
    VerifyFailed(Vec<String>),
    Invalid(String),
    Exhausted(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::VerifyFailed(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Exhausted(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::VerifyFailed(reasons) => {
                write!(f, "certificate replay failed")?;
                for r in reasons {
                    write!(f, "\n  {r}")?;
                }
                Ok(())
            }
            CliError::Invalid(m) => write!(f, "invalid input: {m}"),
            CliError::Exhausted(m) => write!(f, "resource limit reached: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Truncated(m) => CliError::Exhausted(m),
            Error::InvalidGroup(m) => CliError::Invalid(m),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "tamegroup", version, about = "Classify finitely generated matrix groups as wild or tame")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full classification and print a report with a certificate.
    Classify(Common),
    /// Enumerate the word ball and its per-depth separation statistics.
    Ball {
        #[command(flatten)]
        common: Common,
        /// Print the per-depth table as CSV instead of a JSON report.
        #[arg(long)]
        csv: bool,
    },
    /// Fit polynomial and exponential growth to the ball sizes.
    Growth(Common),
    /// Track how close ball elements come to the identity.
    Discreteness(Common),
    /// Extract the base lambda from diagonal generators.
    Lambda(Common),
    /// Jordan decomposition of each generator, with a block power check.
    Jordan(Common),
    /// Replay the certificate of a classify report against its input.
    Verify {
        input: PathBuf,
        report: PathBuf,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Input document (JSON).
    pub input: PathBuf,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Float,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub cap: Option<usize>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub max_order: Option<u64>,
    #[arg(long)]
    pub exponent_max: Option<usize>,
    #[arg(long)]
    pub precision: Option<f64>,
}

impl Flags {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            depth: self.depth,
            cap: self.cap,
            mode: self.mode.map(|m| match m {
                ModeArg::Exact => Mode::Exact,
                ModeArg::Float => Mode::Float,
            }),
            tolerance: self.tolerance,
            max_order: self.max_order,
            exponent_max: self.exponent_max,
            precision: self.precision,
        }
    }
}

macro_rules! with_group {
    ($group:expr, |$g:ident| $body:expr) => {
        match $group {
            AnyGroup::Exact($g) => $body,
            AnyGroup::Float($g) => $body,
        }
    };
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", path.display())))
}

struct Loaded {
    bytes: Vec<u8>,
    settings: Settings,
    group: AnyGroup,
}

fn load(common: &Common) -> Result<Loaded, CliError> {
    let bytes = read(&common.input)?;
    let doc: InputDocument = parse_input(&bytes)?;
    let settings = doc.settings(&common.flags.overrides());
    let group = doc.group(settings.mode, settings.tolerance)?;
    Ok(Loaded { bytes, settings, group })
}

fn emit<R: Serialize>(command: &str, loaded: &Loaded, start: Instant, result: R) -> Result<String, CliError> {
    let report = Report {
        deterministic: Deterministic::new(command, &loaded.bytes, &loaded.settings, result),
        timing: Timing { elapsed_ms: start.elapsed().as_secs_f64() * 1e3 },
    };
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Invalid(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Runs one command and returns what it prints on success.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let start = Instant::now();
    match &cli.command {
        Command::Classify(common) => {
            let loaded = load(common)?;
            let config = &loaded.settings.config;
            let result: Classification = with_group!(&loaded.group, |g| classify(g, config))?;
            emit("classify", &loaded, start, result)
        }
        Command::Ball { common, csv } => {
            let loaded = load(common)?;
            let result = with_group!(&loaded.group, |g| ball_report(g, &loaded.settings));
            if *csv {
                Ok(ball_csv(&result))
            } else {
                emit("ball", &loaded, start, result)
            }
        }
        Command::Growth(common) => {
            let loaded = load(common)?;
            let result = with_group!(&loaded.group, |g| growth_report(g, &loaded.settings))?;
            emit("growth", &loaded, start, result)
        }
        Command::Discreteness(common) => {
            let loaded = load(common)?;
            let c = &loaded.settings.config;
            let result = with_group!(&loaded.group, |g| discreteness_probe(g, c.depth, c.cap))?;
            emit("discreteness", &loaded, start, result)
        }
        Command::Lambda(common) => {
            let loaded = load(common)?;
            let result = with_group!(&loaded.group, |g| lambda_report(g, &loaded.settings))?;
            emit("lambda", &loaded, start, result)
        }
        Command::Jordan(common) => {
            let loaded = load(common)?;
            let result = with_group!(&loaded.group, |g| jordan_report(g))?;
            emit("jordan", &loaded, start, result)
        }
        Command::Verify { input, report } => verify_report(&read(input)?, &read(report)?),
    }
}

/// One row of the ball table. Statistics are absent below two elements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallRow {
    pub m: usize,
    pub size: usize,
    pub diameter: Option<f64>,
    pub separation: Option<f64>,
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallReport {
    pub completed_depth: usize,
    pub truncated: bool,
    pub closed: bool,
    pub rows: Vec<BallRow>,
}

fn ball_report<T: Scalar>(spec: &GroupSpec<T>, settings: &Settings) -> BallReport {
    let ball = enumerate_ball(spec, settings.config.depth, settings.config.cap);
    let rows = ball_table(&ball, spec)
        .into_iter()
        .map(|(m, size, stats)| BallRow {
            m,
            size,
            diameter: stats.as_ref().map(|s| s.diameter),
            separation: stats.as_ref().map(|s| s.separation),
            ratio: stats.as_ref().map(|s| s.ratio()),
        })
        .collect();
    BallReport { completed_depth: ball.completed_depth(), truncated: ball.truncated, closed: ball.closed, rows }
}

pub fn ball_csv(report: &BallReport) -> String {
    let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut out = String::from("m,size,diameter,separation,ratio\n");
    for r in &report.rows {
        out.push_str(&format!("{},{},{},{},{}\n", r.m, r.size, cell(r.diameter), cell(r.separation), cell(r.ratio)));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub sizes: Vec<usize>,
    pub growth: GrowthClass,
}

fn growth_report<T: Scalar>(spec: &GroupSpec<T>, settings: &Settings) -> Result<GrowthReport, CliError> {
    let ball = enumerate_ball(spec, settings.config.depth, settings.config.cap);
    let growth = ball_growth(&ball, settings.config.window)?;
    Ok(GrowthReport { sizes: ball.sizes, growth })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum LambdaReport {
    Tame(LambdaResult),
    IndependentModuli { moduli: Vec<String>, lattice: ExponentLattice },
    UnitPartInfinite { word: Vec<usize>, coordinate: usize, value: String },
    Degenerate { reason: String },
}

fn lambda_report<T: Scalar>(spec: &GroupSpec<T>, settings: &Settings) -> Result<LambdaReport, CliError> {
    let tol = spec.tolerance();
    if let Some(i) = spec.generators().iter().position(|g| !g.is_diagonal(scaled_tol(g, tol))) {
        return Err(CliError::Invalid(format!("lambda needs diagonal generators; generator {i} is not diagonal")));
    }
    let c = &settings.config;
    let witness = match virtually_abelian_probe(spec, c.exponent_max, c.condition_cap)? {
        ProbeOutcome::Witness(w) => w,
        _ => return Err(CliError::Invalid("no diagonal witness for the generators".into())),
    };
    Ok(match extract_lambda(spec, &witness, c.max_order, c.precision, c.max_denominator)? {
        LambdaOutcome::Tame(r) => LambdaReport::Tame(r),
        LambdaOutcome::IndependentModuli { moduli, lattice, .. } => LambdaReport::IndependentModuli { moduli, lattice },
        LambdaOutcome::UnitPartInfinite { word, coordinate, value } => {
            LambdaReport::UnitPartInfinite { word, coordinate, value }
        }
        LambdaOutcome::Degenerate { reason } => LambdaReport::Degenerate { reason },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JordanBlockReport {
    pub eigenvalue: String,
    pub size: usize,
    /// `J^k` from the closed form equals the repeated product for
    /// `k = 1..=JORDAN_POWER_CHECK`.
    pub power_check: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JordanReport {
    pub generator: usize,
    pub blocks: Vec<JordanBlockReport>,
    pub jordan_form: Vec<Vec<String>>,
    pub basis: Vec<Vec<String>>,
    /// `basis * g * basis^-1` equals the Jordan form.
    pub conjugation_check: bool,
}

fn power_check<T: Scalar>(lambda: &T, size: usize, tol: f64) -> Result<bool, CliError> {
    let block = jordan_block(lambda, size);
    let mut product = Matrix::identity(size);
    for k in 1..=JORDAN_POWER_CHECK {
        product = product.mul(&block);
        let closed = jordan_block_power(lambda, size, k)?;
        if !closed.approx_eq(&product, scaled_tol(&product, tol)) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn jordan_report<T: Scalar>(spec: &GroupSpec<T>) -> Result<Vec<JordanReport>, CliError> {
    let tol = spec.tolerance();
    spec.generators()
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let js = jordan_basis(g, tol).map_err(|e| match e {
                Error::SpectrumNotRepresentable => {
                    CliError::Invalid(format!("generator {i}: {e}; rerun with --mode float"))
                }
                other => CliError::from(other),
            })?;
            let j = js.jordan_form();
            let conj = js.basis.mul(g).mul(&js.chains);
            let t = scaled_tol(g, tol.sqrt());
            let blocks = js
                .blocks
                .iter()
                .map(|(lambda, size)| {
                    Ok(JordanBlockReport { eigenvalue: lambda.to_text(), size: *size, power_check: power_check(lambda, *size, tol)? })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(JordanReport {
                generator: i,
                blocks,
                jordan_form: j.to_text(),
                basis: js.basis.to_text(),
                conjugation_check: conj.approx_eq(&j, t),
            })
        })
        .collect()
}

/// Replays a classify report against the input bytes it names. A report
/// that does not parse is a failed replay.
pub fn verify_report(input: &[u8], report: &[u8]) -> Result<String, CliError> {
    let fail = |m: String| CliError::VerifyFailed(vec![m]);
    let de = &mut serde_json::Deserializer::from_slice(report);
    let parsed: Report<Classification> =
        serde_path_to_error::deserialize(de).map_err(|e| fail(format!("report field `{}`: {}", e.path(), e.inner())))?;
    let d = parsed.deterministic;
    if d.command != "classify" {
        return Err(fail(format!("report comes from `{}`, not `classify`", d.command)));
    }
    if d.input_sha256 != sha256_hex(input) {
        return Err(fail("input file differs from the classified input".into()));
    }
    let doc = parse_input(input)?;
    let group = doc.group(d.mode, d.tolerance)?;
    let outcome = verify(&group, &d.result.verdict, &d.result.certificate, &d.config);
    if outcome.passed {
        Ok("certificate replay passed\n".into())
    } else {
        Err(CliError::VerifyFailed(outcome.failures))
    }
}
