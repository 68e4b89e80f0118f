//! Corpus-level recognition in either recognizer mode.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::callsign::IcaoCallsign;
use crate::corpus::TranscriptSample;
use crate::error::{CruError, Result};
use crate::extractor::vanilla_recognize;
use crate::matcher::{recognize_with_context, MatchConfig};
use crate::registry::AirlineRegistry;

/// `Van` decodes the transcript alone; `Sur` matches it against the
/// sample's surveillance list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Van,
    Sur,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Van => "van",
            Mode::Sur => "sur",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = CruError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "van" => Ok(Mode::Van),
            "sur" => Ok(Mode::Sur),
            _ => Err(CruError::InvalidConfig(format!(
                "unknown mode {s:?} (expected van or sur)"
            ))),
        }
    }
}

/// One line of a predictions file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub target: IcaoCallsign,
    pub prediction: Option<IcaoCallsign>,
    pub score: Option<f64>,
    pub decision: String,
}

impl Prediction {
    pub fn is_correct(&self) -> bool {
        self.prediction.as_ref() == Some(&self.target)
    }
}

pub fn predict(sample: &TranscriptSample, mode: Mode, reg: &AirlineRegistry, cfg: &MatchConfig) -> Prediction {
    match mode {
        Mode::Van => Prediction {
            target: sample.target.clone(),
            prediction: vanilla_recognize(&sample.transcript, reg),
            score: None,
            decision: "vanilla".into(),
        },
        Mode::Sur => {
            let (prediction, trace) = recognize_with_context(&sample.transcript, &sample.surveillance, reg, cfg);
            Prediction {
                target: sample.target.clone(),
                prediction,
                score: trace.best_score(),
                decision: trace.decision.name().into(),
            }
        }
    }
}

/// Runs [`predict`] over the corpus in parallel; output order follows input.
pub fn predict_corpus(
    samples: &[TranscriptSample],
    mode: Mode,
    reg: &AirlineRegistry,
    cfg: &MatchConfig,
) -> Vec<Prediction> {
    samples.par_iter().map(|s| predict(s, mode, reg, cfg)).collect()
}

pub fn predictions_csa(predictions: &[Prediction]) -> Result<f64> {
    if predictions.is_empty() {
        return Err(CruError::EmptyReference);
    }
    let hits = predictions.iter().filter(|p| p.is_correct()).count();
    Ok(100.0 * hits as f64 / predictions.len() as f64)
}

pub fn predictions_to_jsonl(predictions: &[Prediction]) -> String {
    let mut out = String::new();
    for p in predictions {
        out.push_str(&serde_json::to_string(p).expect("prediction serializes"));
        out.push('\n');
    }
    out
}

pub fn parse_predictions(text: &str, origin: &str) -> Result<Vec<Prediction>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let p = serde_json::from_str(line).map_err(|e| CruError::Schema {
            path: origin.to_string(),
            line: i + 1,
            reason: e.to_string(),
        })?;
        out.push(p);
    }
    Ok(out)
}
