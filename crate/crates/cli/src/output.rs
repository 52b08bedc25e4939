use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;

use crate::failure::{Classify, CmdResult, Failure};

pub const OUTPUT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

impl Format {
    /// Rejects CSV for commands that only emit reports.
    pub fn report_only(self) -> Result<Self, Failure> {
        if self == Format::Csv {
            return Err(Failure::usage("csv output is only available for `curvature`"));
        }
        Ok(self)
    }
}

/// Formats a number exactly as the JSON writer does, so text and JSON
/// reports agree digit for digit.
pub fn num(x: f64) -> String {
    serde_json::to_string(&x).unwrap_or_else(|_| "null".to_owned())
}

pub fn nums(xs: &[f64]) -> String {
    xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(" ")
}

pub fn emit_json<T: Serialize>(value: &T) -> CmdResult {
    let text = serde_json::to_string_pretty(value).runtime()?;
    emit_text(&(text + "\n"))
}

pub fn emit_text(text: &str) -> CmdResult {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes()).runtime()?;
    out.flush().runtime()
}
