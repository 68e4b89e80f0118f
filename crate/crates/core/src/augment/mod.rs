//! Corpus augmentation: swap the call-sign of each donor transcript for a
//! synthetic one, attach simulated surveillance, and optionally pass the
//! transcript through a calibrated ASR noise channel.

mod donors;
mod noise;
mod surveillance;
mod synth;

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use donors::synthetic_donors;
pub use noise::{
    apply_noise, apply_noise_tracked, calibrate_noise, measure_wer, ConfusionTable, NoiseModel, NoisyTokens,
    CALIBRATION_TOLERANCE,
};
pub(crate) use surveillance::distractor;
pub use surveillance::{generate_surveillance, SurveillanceParams};
pub use synth::{synthesize_callsign, synthesize_with_number, AirspaceProfile, NumberStyle};

use crate::callsign::IcaoCallsign;
use crate::corpus::TranscriptSample;
use crate::error::{CruError, Result};
use crate::eval::metrics::wer;
use crate::registry::AirlineRegistry;
use crate::rng::{rng_for, Stream};
use crate::spoken::{expand_to_spoken, SpokenForm, VariantKind};

/// Noise channel settings as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSettings {
    /// Calibrate the probabilities to this corpus WER (percent). When unset
    /// the probabilities are used as given.
    pub target_wer: Option<f64>,
    pub p_sub: f64,
    pub p_del: f64,
    pub p_ins: f64,
    /// Confusion TSV replacing the built-in table.
    pub confusion_table: Option<PathBuf>,
    /// Insertion vocabulary replacing the built-in one.
    pub insert_vocab: Option<BTreeMap<String, f64>>,
}

impl Default for NoiseSettings {
    fn default() -> Self {
        NoiseSettings {
            target_wer: None,
            p_sub: 0.06,
            p_del: 0.025,
            p_ins: 0.015,
            confusion_table: None,
            insert_vocab: None,
        }
    }
}

impl NoiseSettings {
    pub fn model(&self) -> Result<NoiseModel> {
        let mut nm = NoiseModel::new(self.p_sub, self.p_del, self.p_ins);
        if let Some(path) = &self.confusion_table {
            nm.confusions = ConfusionTable::load(path)?;
        }
        if let Some(vocab) = &self.insert_vocab {
            nm = nm.with_insert_vocab(vocab.iter().map(|(k, v)| (k.clone(), *v)).collect());
        }
        nm.target_wer = self.target_wer;
        nm.validate()?;
        Ok(nm)
    }
}

pub fn default_variant_distribution() -> BTreeMap<VariantKind, f64> {
    BTreeMap::from([
        (VariantKind::Full, 0.55),
        (VariantKind::NoIdentifier, 0.15),
        (VariantKind::GroupedNumber, 0.10),
        (VariantKind::SpelledDesignator, 0.10),
        (VariantKind::IdentifierOnly, 0.05),
        (VariantKind::ShortenedNumber, 0.05),
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentConfig {
    pub seed: u64,
    /// Output corpus size; defaults to the number of donors.
    pub size: Option<usize>,
    pub variant_distribution: BTreeMap<VariantKind, f64>,
    /// Designator weights of the airspace; empty means every registry
    /// airline with equal weight.
    pub airspace_profile: BTreeMap<String, f64>,
    pub number_style: NumberStyle,
    pub surveillance: SurveillanceParams,
    /// `None` produces a clean (WER 0) corpus.
    pub noise: Option<NoiseSettings>,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig {
            seed: 0,
            size: None,
            variant_distribution: default_variant_distribution(),
            airspace_profile: BTreeMap::new(),
            number_style: NumberStyle::default(),
            surveillance: SurveillanceParams::default(),
            noise: None,
        }
    }
}

impl AugmentConfig {
    pub fn validate(&self) -> Result<()> {
        let total: f64 = self.variant_distribution.values().sum();
        if self
            .variant_distribution
            .values()
            .any(|p| !(p.is_finite() && *p >= 0.0))
            || (total - 1.0).abs() > 1e-6
        {
            return Err(CruError::InvalidConfig(format!(
                "variant_distribution must be non-negative and sum to 1 (got {total})"
            )));
        }
        self.number_style.validate()?;
        self.surveillance.validate()?;
        if let Some(noise) = &self.noise {
            noise.model()?;
        }
        Ok(())
    }

    pub fn profile(&self, reg: &AirlineRegistry) -> Result<AirspaceProfile> {
        AirspaceProfile::from_weights(&self.airspace_profile, reg)
    }

    /// Sets the target WER, creating default noise settings if needed.
    /// A target of 0 disables noise.
    pub fn set_target_wer(&mut self, target: f64) {
        if target == 0.0 {
            self.noise = None;
        } else {
            self.noise.get_or_insert_with(NoiseSettings::default).target_wer = Some(target);
        }
    }
}

/// Cuts the donor's call-sign out and splices in a rendering of `cs`.
pub fn replace_callsign<R: Rng + ?Sized>(
    rng: &mut R,
    donor: &TranscriptSample,
    cs: &IcaoCallsign,
    kind: VariantKind,
    reg: &AirlineRegistry,
) -> Result<TranscriptSample> {
    let [start, end] = donor
        .span
        .ok_or_else(|| CruError::InvalidConfig("donor sample has no call-sign span".into()))?;
    let variants = expand_to_spoken(cs, reg, &[kind])?;
    if variants.is_empty() {
        return Err(CruError::NoVariant(cs.canonical(), kind));
    }
    let chosen = variants[rng.random_range(0..variants.len())].tokens.tokens();
    let old = donor.transcript.tokens();
    let mut tokens = Vec::with_capacity(old.len() - (end - start) + chosen.len());
    tokens.extend_from_slice(&old[..start]);
    tokens.extend_from_slice(chosen);
    tokens.extend_from_slice(&old[end..]);
    Ok(TranscriptSample {
        transcript: SpokenForm::from_vec_unchecked(tokens),
        target: cs.clone(),
        span: Some([start, start + chosen.len()]),
        variant: Some(kind),
        ..donor.clone()
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedCorpus {
    pub samples: Vec<TranscriptSample>,
    /// Transcripts before noise, index-aligned with `samples`.
    pub clean: Vec<SpokenForm>,
    /// Noise model actually applied (after calibration).
    pub noise: Option<NoiseModel>,
    /// WER of the noisy transcripts against the clean ones.
    pub realized_wer: Option<f64>,
}

fn augment_one(
    index: usize,
    donor: &TranscriptSample,
    cfg: &AugmentConfig,
    reg: &AirlineRegistry,
    profile: &AirspaceProfile,
    kinds: &(Vec<VariantKind>, WeightedIndex<f64>),
) -> Result<TranscriptSample> {
    let mut rng = rng_for(cfg.seed, Stream::Sample, index as u64);
    let cs = synthesize_callsign(&mut rng, profile, &cfg.number_style);
    let kind = kinds.0[kinds.1.sample(&mut rng)];
    let mut sample = match replace_callsign(&mut rng, donor, &cs, kind, reg) {
        Err(CruError::NoVariant(..)) => replace_callsign(&mut rng, donor, &cs, VariantKind::Full, reg)?,
        other => other?,
    };
    let mut srng = rng_for(cfg.seed, Stream::Surveillance, index as u64);
    sample.surveillance = generate_surveillance(&mut srng, &cs, &cfg.surveillance, profile, &cfg.number_style);
    Ok(sample)
}

/// Runs the whole pipeline. Sample `i` uses donor `i % base.len()` and
/// draws only from generators keyed by `(cfg.seed, i)`, so the output does
/// not depend on how work is split across threads.
pub fn augment_corpus(
    base: &[TranscriptSample],
    cfg: &AugmentConfig,
    reg: &AirlineRegistry,
) -> Result<AugmentedCorpus> {
    if base.is_empty() {
        return Err(CruError::InvalidConfig("donor corpus is empty".into()));
    }
    cfg.validate()?;
    let profile = cfg.profile(reg)?;
    let (kinds, weights): (Vec<VariantKind>, Vec<f64>) = cfg.variant_distribution.iter().map(|(k, w)| (*k, *w)).unzip();
    let kind_index =
        WeightedIndex::new(&weights).map_err(|e| CruError::InvalidConfig(format!("variant_distribution: {e}")))?;
    let kinds = (kinds, kind_index);
    let size = cfg.size.unwrap_or(base.len());

    let mut samples: Vec<TranscriptSample> = (0..size)
        .into_par_iter()
        .map(|i| augment_one(i, &base[i % base.len()], cfg, reg, &profile, &kinds))
        .collect::<Result<_>>()?;
    let clean: Vec<SpokenForm> = samples.iter().map(|s| s.transcript.clone()).collect();

    let Some(settings) = &cfg.noise else {
        return Ok(AugmentedCorpus {
            samples,
            clean,
            noise: None,
            realized_wer: None,
        });
    };
    let mut nm = settings.model()?;
    if let Some(target) = settings.target_wer {
        nm = calibrate_noise(&nm, target, &clean, cfg.seed)?;
    }
    samples.par_iter_mut().enumerate().for_each(|(i, s)| {
        let mut rng = rng_for(cfg.seed, Stream::Noise, i as u64);
        let noisy = apply_noise_tracked(&mut rng, &s.transcript, &nm);
        s.span = s.span.and_then(|[a, b]| noisy.map_span(a, b));
        s.transcript = noisy.tokens;
    });
    let noisy: Vec<SpokenForm> = samples.iter().map(|s| s.transcript.clone()).collect();
    let realized = wer(&noisy, &clean)?;
    Ok(AugmentedCorpus {
        samples,
        clean,
        noise: Some(nm),
        realized_wer: Some(realized),
    })
}
