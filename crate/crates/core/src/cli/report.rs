use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// Output encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub pass: bool,
    pub failures: usize,
    #[serde(flatten)]
    pub details: Map<String, Value>,
}

/// A command's full output. Every field is a pure function of the command
/// line, so rerunning the recorded invocation reproduces it byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report<R> {
    pub command: String,
    pub params: Map<String, Value>,
    pub seed: u64,
    pub rows: Vec<R>,
    pub summary: Summary,
}

impl<R: Serialize> Report<R> {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map(|mut s| {
                s.push('\n');
                s
            })
            .map_err(|e| Error::InvalidArgument(format!("json encoding failed: {e}")))
    }

    /// Rows only, with a header line.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row)
                .map_err(|e| Error::InvalidArgument(format!("csv encoding failed: {e}")))?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::InvalidArgument(format!("csv encoding failed: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::InvalidArgument(e.to_string()))
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }

    pub fn write_to(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        let text = self
            .render(format)
            .map_err(|e| std::io::Error::other(e.to_string()))?;
        out.write_all(text.as_bytes())
    }
}
