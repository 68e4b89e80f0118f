//! Corpus records and their JSONL encoding.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::callsign::IcaoCallsign;
use crate::error::{CruError, Result};
use crate::matcher::SurveillanceSnapshot;
use crate::spoken::{SpokenForm, VariantKind};

/// One labeled transmission.
///
/// `span` locates the target in the transcript; it is `None` when noise
/// removed every call-sign token. `variant` records how the call-sign was
/// rendered, when known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptSample {
    pub transcript: SpokenForm,
    pub target: IcaoCallsign,
    pub span: Option<[usize; 2]>,
    pub surveillance: SurveillanceSnapshot,
    pub timestamp: Option<i64>,
    pub lat: Option<f64>,
    pub lon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<VariantKind>,
}

impl TranscriptSample {
    pub fn new(transcript: SpokenForm, target: IcaoCallsign, span: Option<[usize; 2]>) -> Self {
        TranscriptSample {
            transcript,
            target,
            span,
            surveillance: SurveillanceSnapshot::default(),
            timestamp: None,
            lat: None,
            lon: None,
            variant: None,
        }
    }

    pub fn span_tokens(&self) -> Option<&[String]> {
        self.span.map(|[s, e]| &self.transcript.tokens()[s..e])
    }

    /// Checks the structural invariants that JSON decoding cannot express.
    pub fn validate(&self) -> std::result::Result<(), String> {
        if let Some([s, e]) = self.span {
            if s >= e || e > self.transcript.len() {
                return Err(format!(
                    "span [{s}, {e}] out of range for {} tokens",
                    self.transcript.len()
                ));
            }
        }
        for tok in self.transcript.tokens() {
            if tok.is_empty() || tok.chars().any(|c| c.is_whitespace() || c.is_uppercase()) {
                return Err(format!("token {tok:?} is not a lowercase word"));
            }
        }
        Ok(())
    }
}

pub fn to_jsonl(samples: &[TranscriptSample]) -> String {
    let mut out = String::new();
    for s in samples {
        out.push_str(&serde_json::to_string(s).expect("samples serialize"));
        out.push('\n');
    }
    out
}

pub fn parse_jsonl(text: &str, origin: &str) -> Result<Vec<TranscriptSample>> {
    read_lines(text.as_bytes(), origin)
}

fn read_lines(reader: impl BufRead, origin: &str) -> Result<Vec<TranscriptSample>> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| CruError::io(origin, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let schema = |reason: String| CruError::Schema {
            path: origin.to_string(),
            line: idx + 1,
            reason,
        };
        let sample: TranscriptSample = serde_json::from_str(&line).map_err(|e| schema(e.to_string()))?;
        sample.validate().map_err(schema)?;
        out.push(sample);
    }
    Ok(out)
}

pub fn read_corpus(path: impl AsRef<Path>) -> Result<Vec<TranscriptSample>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| CruError::io(path, e))?;
    read_lines(BufReader::new(file), &path.display().to_string())
}

pub fn write_corpus(path: impl AsRef<Path>, samples: &[TranscriptSample]) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| CruError::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(to_jsonl(samples).as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| CruError::io(path, e))
}
