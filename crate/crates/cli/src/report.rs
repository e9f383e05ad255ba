//! Report documents. Everything except `timing` is a pure function of the
//! input bytes, the effective settings and the tool version.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tamegroup::{ClassifyConfig, Mode};

use crate::input::Settings;

pub const TOOL: &str = "tamegroup";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report<R> {
    pub deterministic: Deterministic<R>,
    pub timing: Timing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Deterministic<R> {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub input_sha256: String,
    pub mode: Mode,
    pub tolerance: f64,
    pub config: ClassifyConfig,
    pub result: R,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl<R> Deterministic<R> {
    pub fn new(command: &str, input: &[u8], settings: &Settings, result: R) -> Self {
        Deterministic {
            tool: TOOL.into(),
            version: VERSION.into(),
            command: command.into(),
            input_sha256: sha256_hex(input),
            mode: settings.mode,
            tolerance: settings.tolerance,
            config: settings.config.clone(),
            result,
        }
    }
}
