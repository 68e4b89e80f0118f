//! Token-level ASR noise channel and its calibration to a target WER.

use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng;

use crate::error::{CruError, Result};
use crate::eval::metrics::wer;
use crate::rng::{rng_for, Stream};
use crate::spoken::SpokenForm;

const BUILTIN_CONFUSIONS: &str = include_str!("../../data/confusions.tsv");

const BUILTIN_INSERTIONS: [(&str, f64); 12] = [
    ("uh", 3.0),
    ("the", 3.0),
    ("and", 2.0),
    ("a", 2.0),
    ("er", 2.0),
    ("to", 2.0),
    ("on", 1.0),
    ("is", 1.0),
    ("for", 1.0),
    ("one", 1.0),
    ("two", 1.0),
    ("five", 0.5),
];

/// Weighted replacement lists, normalized per source token.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfusionTable {
    entries: BTreeMap<String, Vec<(String, f64)>>,
}

impl ConfusionTable {
    pub fn builtin() -> Self {
        Self::from_tsv(BUILTIN_CONFUSIONS).expect("built-in confusion table is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| CruError::io(path, e))?;
        Self::from_tsv(&text)
    }

    /// Parses `source<TAB>replacement<TAB>weight` rows; `#` lines are comments.
    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut raw: BTreeMap<String, Vec<(String, f64)>> = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason: &str| CruError::InvalidConfig(format!("confusion table line {}: {reason}", idx + 1));
            let cols: Vec<&str> = line.split('\t').collect();
            let [src, dst, weight] = cols[..] else {
                return Err(bad("expected three tab-separated columns"));
            };
            let weight: f64 = weight.trim().parse().map_err(|_| bad("weight is not a number"))?;
            if !(weight.is_finite() && weight > 0.0) {
                return Err(bad("weight must be positive"));
            }
            let (src, dst) = (src.trim().to_lowercase(), dst.trim().to_lowercase());
            if src.is_empty() || dst.is_empty() || src == dst || dst.contains(char::is_whitespace) {
                return Err(bad("replacement must be a single token different from the source"));
            }
            raw.entry(src).or_default().push((dst, weight));
        }
        let entries = raw.into_iter().map(|(k, v)| (k, normalize(v))).collect();
        Ok(ConfusionTable { entries })
    }

    pub fn get(&self, token: &str) -> Option<&[(String, f64)]> {
        self.entries.get(token).map(Vec::as_slice)
    }

    /// True if either token is listed as a replacement of the other.
    pub fn confusable(&self, a: &str, b: &str) -> bool {
        let listed = |src: &str, dst: &str| self.get(src).is_some_and(|l| l.iter().any(|(t, _)| t == dst));
        listed(a, b) || listed(b, a)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn normalize(list: Vec<(String, f64)>) -> Vec<(String, f64)> {
    let total: f64 = list.iter().map(|(_, w)| w).sum();
    list.into_iter().map(|(t, w)| (t, w / total)).collect()
}

/// Picks from a normalized weighted list using a uniform draw `u`.
fn pick(list: &[(String, f64)], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, (_, w)) in list.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    list.len() - 1
}

/// Independent per-token substitution/deletion channel with insertions at
/// every gap.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    pub p_sub: f64,
    pub p_del: f64,
    pub p_ins: f64,
    pub confusions: ConfusionTable,
    pub insert_vocab: Vec<(String, f64)>,
    /// WER (percent) the probabilities were calibrated to, if any.
    pub target_wer: Option<f64>,
}

impl NoiseModel {
    pub fn new(p_sub: f64, p_del: f64, p_ins: f64) -> Self {
        NoiseModel {
            p_sub,
            p_del,
            p_ins,
            confusions: ConfusionTable::builtin(),
            insert_vocab: normalize(BUILTIN_INSERTIONS.iter().map(|(t, w)| (t.to_string(), *w)).collect()),
            target_wer: None,
        }
    }

    pub fn silent() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    pub fn with_insert_vocab(mut self, vocab: Vec<(String, f64)>) -> Self {
        self.insert_vocab = normalize(vocab);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let probs = [self.p_sub, self.p_del, self.p_ins, self.p_sub + self.p_del];
        if probs.iter().any(|p| !(0.0..1.0).contains(p)) {
            return Err(CruError::InvalidConfig(
                "noise probabilities (and p_sub + p_del) must be in [0, 1)".into(),
            ));
        }
        if self.p_ins > 0.0 && self.insert_vocab.is_empty() {
            return Err(CruError::InvalidConfig("insertions need a non-empty vocabulary".into()));
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        NoiseModel {
            p_sub: self.p_sub * factor,
            p_del: self.p_del * factor,
            p_ins: self.p_ins * factor,
            ..self.clone()
        }
    }

    pub fn is_silent(&self) -> bool {
        self.p_sub == 0.0 && self.p_del == 0.0 && self.p_ins == 0.0
    }

    fn substitute(&self, token: &str, u: f64) -> Option<String> {
        if let Some(list) = self.confusions.get(token) {
            return Some(list[pick(list, u)].0.clone());
        }
        let vocab = &self.insert_vocab;
        if vocab.is_empty() {
            return None;
        }
        let i = pick(vocab, u);
        // Never substitute a token with itself: step to the next entry.
        (0..vocab.len())
            .map(|k| &vocab[(i + k) % vocab.len()].0)
            .find(|t| *t != token)
            .cloned()
    }
}

/// Output of the channel together with the provenance of each token.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyTokens {
    pub tokens: SpokenForm,
    /// Input index each output token came from; `None` for insertions.
    pub origin: Vec<Option<usize>>,
}

impl NoisyTokens {
    /// Output range covering what survived of input tokens `start..end`.
    pub fn map_span(&self, start: usize, end: usize) -> Option<[usize; 2]> {
        let inside = |o: &Option<usize>| o.is_some_and(|i| (start..end).contains(&i));
        let first = self.origin.iter().position(inside)?;
        let last = self.origin.iter().rposition(inside)?;
        Some([first, last + 1])
    }
}

/// Runs the channel. The number of uniform draws depends only on the input
/// length, so scaled models see the same random numbers.
pub fn apply_noise_tracked<R: Rng + ?Sized>(rng: &mut R, tokens: &SpokenForm, nm: &NoiseModel) -> NoisyTokens {
    let mut out = Vec::with_capacity(tokens.len() + 2);
    let mut origin = Vec::with_capacity(tokens.len() + 2);
    let gap = |rng: &mut R, out: &mut Vec<String>, origin: &mut Vec<Option<usize>>| {
        let (g, h): (f64, f64) = (rng.random(), rng.random());
        if g < nm.p_ins && !nm.insert_vocab.is_empty() {
            out.push(nm.insert_vocab[pick(&nm.insert_vocab, h)].0.clone());
            origin.push(None);
        }
    };
    for (i, tok) in tokens.tokens().iter().enumerate() {
        gap(rng, &mut out, &mut origin);
        let (u, r): (f64, f64) = (rng.random(), rng.random());
        if u < nm.p_del {
            continue;
        }
        let replaced = if u < nm.p_del + nm.p_sub {
            nm.substitute(tok, r)
        } else {
            None
        };
        out.push(replaced.unwrap_or_else(|| tok.clone()));
        origin.push(Some(i));
    }
    gap(rng, &mut out, &mut origin);
    NoisyTokens {
        tokens: SpokenForm::from_vec_unchecked(out),
        origin,
    }
}

pub fn apply_noise<R: Rng + ?Sized>(rng: &mut R, tokens: &SpokenForm, nm: &NoiseModel) -> SpokenForm {
    apply_noise_tracked(rng, tokens, nm).tokens
}

/// Applies `nm` to every reference with the per-sample generators used by
/// corpus augmentation and returns the corpus WER.
pub fn measure_wer(nm: &NoiseModel, reference: &[SpokenForm], seed: u64) -> Result<f64> {
    let noisy: Vec<SpokenForm> = reference
        .iter()
        .enumerate()
        .map(|(i, r)| apply_noise(&mut rng_for(seed, Stream::Noise, i as u64), r, nm))
        .collect();
    wer(&noisy, reference)
}

/// Absolute tolerance (WER points) calibration must reach.
pub const CALIBRATION_TOLERANCE: f64 = 1.0;

/// Scales all channel probabilities by a common factor so that the measured
/// corpus WER lands on `target_wer`.
pub fn calibrate_noise(nm: &NoiseModel, target_wer: f64, reference: &[SpokenForm], seed: u64) -> Result<NoiseModel> {
    if !(0.0..60.0).contains(&target_wer) {
        return Err(CruError::InvalidConfig(format!(
            "target WER {target_wer} outside [0, 60)"
        )));
    }
    nm.validate()?;
    if target_wer == 0.0 {
        let mut out = nm.scaled(0.0);
        out.target_wer = Some(0.0);
        return Ok(out);
    }
    if nm.is_silent() {
        return Err(CruError::CalibrationFailed("all channel probabilities are zero".into()));
    }
    let hi_limit = 0.999 / (nm.p_sub + nm.p_del).max(nm.p_ins);
    let (mut lo, mut hi) = (0.0, hi_limit);
    let top = measure_wer(&nm.scaled(hi), reference, seed)?;
    if top < target_wer {
        return Err(CruError::CalibrationFailed(format!(
            "cannot exceed {top:.2}% WER, target {target_wer}%"
        )));
    }
    let mut best = (hi, top);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let got = measure_wer(&nm.scaled(mid), reference, seed)?;
        if (got - target_wer).abs() < (best.1 - target_wer).abs() {
            best = (mid, got);
        }
        if (got - target_wer).abs() < 0.02 {
            break;
        }
        if got < target_wer {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (best.1 - target_wer).abs() > CALIBRATION_TOLERANCE {
        return Err(CruError::CalibrationFailed(format!(
            "closest WER {:.2}% for target {target_wer}%",
            best.1
        )));
    }
    let mut out = nm.scaled(best.0);
    out.target_wer = Some(target_wer);
    Ok(out)
}
