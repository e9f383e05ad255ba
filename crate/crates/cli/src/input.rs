//! The JSON input document and its conversion into a group.

use serde::Deserialize;
use serde_json::Value;
use tamegroup::group::DEFAULT_TOLERANCE;
use tamegroup::{AnyGroup, ClassifyConfig, Complex64, GaussianRational, GroupSpec, Matrix, Mode, Scalar};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub version: u32,
    pub group: GroupInput,
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub config: Option<ClassifyConfig>,
}

/// Generators as row-major nested arrays. Entries are scalar strings such
/// as `"1/2-3*i"` or plain JSON numbers.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupInput {
    pub n: usize,
    pub generators: Vec<Vec<Vec<Value>>>,
}

/// Parses and schema-checks an input document. Errors name the offending
/// field and position.
pub fn parse_input(bytes: &[u8]) -> Result<InputDocument, CliError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let doc: InputDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            CliError::Invalid(format!("malformed input: {}", e.inner()))
        } else {
            CliError::Invalid(format!("field `{path}`: {}", e.inner()))
        }
    })?;
    if doc.version != SCHEMA_VERSION {
        return Err(CliError::Invalid(format!(
            "field `version`: unsupported schema version {} (expected {SCHEMA_VERSION})",
            doc.version
        )));
    }
    Ok(doc)
}

/// Mode, tolerance and configuration after applying command-line overrides.
#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub mode: Mode,
    pub tolerance: f64,
    pub config: ClassifyConfig,
}

fn entry_text(v: &Value, g: usize, i: usize, j: usize) -> Result<String, CliError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => Err(CliError::Invalid(format!(
            "field `group.generators[{g}][{i}][{j}]`: expected a scalar string or number"
        ))),
    }
}

fn matrices<T: Scalar>(group: &GroupInput) -> Result<Vec<Matrix<T>>, CliError> {
    let n = group.n;
    if n == 0 {
        return Err(CliError::Invalid("field `group.n`: must be at least 1".into()));
    }
    if group.generators.is_empty() {
        return Err(CliError::Invalid("field `group.generators`: at least one generator is required".into()));
    }
    let mut out = Vec::with_capacity(group.generators.len());
    for (g, rows) in group.generators.iter().enumerate() {
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(CliError::Invalid(format!("generator {g} is not {n}x{n}")));
        }
        let mut parsed = Vec::with_capacity(n);
        for (i, row) in rows.iter().enumerate() {
            let mut r = Vec::with_capacity(n);
            for (j, v) in row.iter().enumerate() {
                let text = entry_text(v, g, i, j)?;
                let z = T::parse_text(&text)
                    .map_err(|e| CliError::Invalid(format!("field `group.generators[{g}][{i}][{j}]`: {e}")))?;
                r.push(z);
            }
            parsed.push(r);
        }
        out.push(Matrix::from_rows(parsed).map_err(CliError::from)?);
    }
    Ok(out)
}

fn spec<T: Scalar>(group: &GroupInput, tolerance: f64) -> Result<GroupSpec<T>, CliError> {
    GroupSpec::new(matrices(group)?, tolerance).map_err(CliError::from)
}

impl InputDocument {
    /// Document values overridden by any flags that are set.
    pub fn settings(&self, flags: &Overrides) -> Settings {
        let mut config = self.config.clone().unwrap_or_default();
        if let Some(d) = flags.depth {
            config.depth = d;
        }
        if let Some(c) = flags.cap {
            config.cap = c;
        }
        if let Some(m) = flags.max_order {
            config.max_order = m;
        }
        if let Some(e) = flags.exponent_max {
            config.exponent_max = e;
        }
        if let Some(p) = flags.precision {
            config.precision = p;
        }
        Settings {
            mode: flags.mode.or(self.mode).unwrap_or(Mode::Exact),
            tolerance: flags.tolerance.or(self.tolerance).unwrap_or(DEFAULT_TOLERANCE),
            config,
        }
    }

    pub fn group(&self, mode: Mode, tolerance: f64) -> Result<AnyGroup, CliError> {
        Ok(match mode {
            Mode::Exact => AnyGroup::Exact(spec::<GaussianRational>(&self.group, tolerance)?),
            Mode::Float => AnyGroup::Float(spec::<Complex64>(&self.group, tolerance)?),
        })
    }
}

/// Values given on the command line; unset ones leave the document alone.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub depth: Option<usize>,
    pub cap: Option<usize>,
    pub mode: Option<Mode>,
    pub tolerance: Option<f64>,
    pub max_order: Option<u64>,
    pub exponent_max: Option<usize>,
    pub precision: Option<f64>,
}
