//! Robustness sweeps: rewrite every sample's surveillance list for each
//! parameter value and record the resulting call-sign accuracy.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::predict::{predict, Mode};
use crate::augment::{distractor, AirspaceProfile, NumberStyle};
use crate::callsign::{Designator, IcaoCallsign};
use crate::corpus::TranscriptSample;
use crate::error::{CruError, Result};
use crate::matcher::{MatchConfig, SurveillanceSnapshot};
use crate::registry::AirlineRegistry;
use crate::rng::{rng_for, CruRng, Stream};

/// Allowed rise between consecutive points before a series stops counting
/// as non-increasing.
pub const TREND_TOLERANCE: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// Number of call-signs in the list, target included.
    SurveillanceSize,
    /// Fraction of distractors that share the target's designator.
    IdentifierDupFraction,
    /// Number of distractors carrying the target's number under other
    /// designators.
    NumberDuplicates,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::SurveillanceSize => "surveillance_size",
            SweepParameter::IdentifierDupFraction => "identifier_dup_fraction",
            SweepParameter::NumberDuplicates => "number_duplicates",
        }
    }

    pub fn default_values(self) -> Vec<f64> {
        match self {
            SweepParameter::SurveillanceSize => (1..=19).map(f64::from).collect(),
            SweepParameter::IdentifierDupFraction => (0..=8).map(|i| f64::from(i) / 10.0).collect(),
            SweepParameter::NumberDuplicates => vec![0.0, 1.0, 2.0],
        }
    }

    fn check(self, v: f64) -> Result<()> {
        let ok = match self {
            SweepParameter::SurveillanceSize => v >= 1.0 && v.fract() == 0.0,
            SweepParameter::IdentifierDupFraction => (0.0..=1.0).contains(&v),
            SweepParameter::NumberDuplicates => v >= 0.0 && v.fract() == 0.0,
        };
        if ok && v.is_finite() {
            Ok(())
        } else {
            Err(CruError::InvalidConfig(format!("invalid {} value {v}", self.name())))
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParameter {
    type Err = CruError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "surveillance_size" => Ok(SweepParameter::SurveillanceSize),
            "identifier_dup_fraction" => Ok(SweepParameter::IdentifierDupFraction),
            "number_duplicates" => Ok(SweepParameter::NumberDuplicates),
            _ => Err(CruError::InvalidConfig(format!("unknown sweep parameter {s:?}"))),
        }
    }
}

/// Describes the corpus a sweep ran on.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusDescriptor {
    pub target_wer: Option<f64>,
    pub seed: Option<u64>,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub matcher: MatchConfig,
    pub number_style: NumberStyle,
    /// Designator weights for fresh distractors; empty means uniform over
    /// the registry.
    pub airspace_profile: BTreeMap<String, f64>,
    pub target_wer: Option<f64>,
    pub corpus_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub csa: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendCheck {
    pub tolerance: f64,
    /// No step rises by more than `tolerance`.
    pub non_increasing: bool,
    pub max_rise: f64,
    /// CSA at the last value minus CSA at the first.
    pub delta: f64,
}

impl TrendCheck {
    pub fn of(points: &[SweepPoint], tolerance: f64) -> Self {
        let max_rise = points.windows(2).map(|w| w[1].csa - w[0].csa).fold(0.0_f64, f64::max);
        let delta = match (points.first(), points.last()) {
            (Some(a), Some(b)) => b.csa - a.csa,
            _ => 0.0,
        };
        TrendCheck {
            tolerance,
            non_increasing: max_rise <= tolerance,
            max_rise,
            delta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub parameter: SweepParameter,
    pub mode: Mode,
    pub points: Vec<SweepPoint>,
    pub corpus: CorpusDescriptor,
    pub trend: TrendCheck,
}

impl SweepReport {
    pub fn csa_at(&self, value: f64) -> Option<f64> {
        self.points.iter().find(|p| p.value == value).map(|p| p.csa)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# {} mode={}\nvalue,csa,n\n", self.parameter, self.mode);
        for p in &self.points {
            out.push_str(&format!("{},{},{}\n", p.value, p.csa, p.n));
        }
        out
    }
}

/// Per-sample material shared by every parameter value, so the lists at
/// neighbouring values differ only in the slots the parameter controls.
struct Pools {
    target: IcaoCallsign,
    /// Size of the sample's own list, target included.
    size: usize,
    primary: Vec<IcaoCallsign>,
    secondary: Vec<IcaoCallsign>,
}

impl Pools {
    fn snapshot(&self, parameter: SweepParameter, value: f64) -> SurveillanceSnapshot {
        let mut list = vec![self.target.clone()];
        let slots = self.size - 1;
        match parameter {
            SweepParameter::SurveillanceSize => {
                list.extend_from_slice(&self.primary[..value as usize - 1]);
            }
            SweepParameter::IdentifierDupFraction => {
                let k = (value * slots as f64).round() as usize;
                list.extend_from_slice(&self.primary[..k]);
                list.extend_from_slice(&self.secondary[..slots - k]);
            }
            SweepParameter::NumberDuplicates => {
                let k = value as usize;
                list.extend_from_slice(&self.primary[..k]);
                list.extend_from_slice(&self.secondary[..slots.saturating_sub(k)]);
            }
        }
        SurveillanceSnapshot::new(list)
    }
}

fn fresh<F: FnMut(&mut CruRng) -> Designator>(
    rng: &mut CruRng,
    mut designator: F,
    target: &IcaoCallsign,
    style: &NumberStyle,
    used: &mut BTreeSet<IcaoCallsign>,
) -> IcaoCallsign {
    let d = designator(rng);
    let cs = distractor(rng, d, target, style, used);
    used.insert(cs.clone());
    cs
}

fn other_designator(rng: &mut CruRng, profile: &AirspaceProfile, target: Designator) -> Designator {
    let mut d = profile.sample(rng);
    for _ in 0..256 {
        if d != target {
            break;
        }
        d = profile.sample(rng);
    }
    d
}

fn build_pools(
    sample: &TranscriptSample,
    index: usize,
    parameter: SweepParameter,
    max_value: f64,
    profile: &AirspaceProfile,
    style: &NumberStyle,
    seed: u64,
) -> Result<Pools> {
    let mut rng = rng_for(seed, Stream::Sweep, index as u64);
    let target = sample.target.clone();
    let td = target.designator();
    let existing: Vec<IcaoCallsign> = sample
        .surveillance
        .unique()
        .into_iter()
        .filter(|c| *c != target)
        .collect();
    let size = existing.len() + 1;
    let mut used: BTreeSet<IcaoCallsign> = existing.iter().cloned().collect();
    used.insert(target.clone());

    let (primary, secondary) = match parameter {
        SweepParameter::SurveillanceSize => {
            let need = (max_value as usize).saturating_sub(1);
            let mut pool = existing;
            while pool.len() < need {
                pool.push(fresh(&mut rng, |r| profile.sample(r), &target, style, &mut used));
            }
            (pool, Vec::new())
        }
        SweepParameter::IdentifierDupFraction => {
            let mut other: Vec<IcaoCallsign> = existing.into_iter().filter(|c| c.designator() != td).collect();
            while other.len() < size - 1 {
                other.push(fresh(
                    &mut rng,
                    |r| other_designator(r, profile, td),
                    &target,
                    style,
                    &mut used,
                ));
            }
            let same = (0..size - 1)
                .map(|_| fresh(&mut rng, |_| td, &target, style, &mut used))
                .collect();
            (same, other)
        }
        SweepParameter::NumberDuplicates => {
            let mut other: Vec<IcaoCallsign> = existing.into_iter().filter(|c| c.number() != target.number()).collect();
            while other.len() < size - 1 {
                other.push(fresh(&mut rng, |r| profile.sample(r), &target, style, &mut used));
            }
            let k = max_value as usize;
            let mut designators: Vec<Designator> = profile.designators().iter().copied().filter(|d| *d != td).collect();
            designators.sort();
            designators.dedup();
            if designators.len() < k {
                return Err(CruError::InvalidConfig(format!(
                    "{k} number duplicates need {k} designators besides {td}, the airspace has {}",
                    designators.len()
                )));
            }
            rand::seq::SliceRandom::shuffle(designators.as_mut_slice(), &mut rng);
            let dups = designators[..k]
                .iter()
                .map(|d| IcaoCallsign::new(*d, target.number().clone()))
                .collect();
            (dups, other)
        }
    };
    Ok(Pools {
        target,
        size,
        primary,
        secondary,
    })
}

/// Rewrites each sample's surveillance for every value in `values` and
/// records CSA. The target always stays in the list and the sample count
/// never changes. All rewrites of sample `i` draw from one generator keyed
/// by `(seed, i)`.
pub fn sweep(
    corpus: &[TranscriptSample],
    mode: Mode,
    parameter: SweepParameter,
    values: &[f64],
    reg: &AirlineRegistry,
    cfg: &SweepConfig,
    seed: u64,
) -> Result<SweepReport> {
    if corpus.is_empty() {
        return Err(CruError::EmptyReference);
    }
    if values.is_empty() {
        return Err(CruError::InvalidConfig("sweep needs at least one value".into()));
    }
    for v in values {
        parameter.check(*v)?;
    }
    cfg.matcher.validate()?;
    cfg.number_style.validate()?;
    let profile = AirspaceProfile::from_weights(&cfg.airspace_profile, reg)?;
    let max_value = values.iter().copied().fold(0.0, f64::max);

    let pools: Vec<Pools> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, s)| build_pools(s, i, parameter, max_value, &profile, &cfg.number_style, seed))
        .collect::<Result<_>>()?;

    let points = values
        .iter()
        .map(|&value| {
            let hits: usize = corpus
                .par_iter()
                .zip(&pools)
                .map(|(s, pool)| {
                    let rewritten = TranscriptSample {
                        surveillance: pool.snapshot(parameter, value),
                        ..s.clone()
                    };
                    usize::from(predict(&rewritten, mode, reg, &cfg.matcher).is_correct())
                })
                .sum();
            SweepPoint {
                value,
                csa: 100.0 * hits as f64 / corpus.len() as f64,
                n: corpus.len(),
            }
        })
        .collect::<Vec<_>>();

    Ok(SweepReport {
        parameter,
        mode,
        trend: TrendCheck::of(&points, TREND_TOLERANCE),
        points,
        corpus: CorpusDescriptor {
            target_wer: cfg.target_wer,
            seed: cfg.corpus_seed,
            size: corpus.len(),
        },
    })
}

/// Surveillance list that [`sweep`] evaluates sample `index` on at `value`.
pub fn rewrite_surveillance(
    sample: &TranscriptSample,
    index: usize,
    parameter: SweepParameter,
    value: f64,
    reg: &AirlineRegistry,
    cfg: &SweepConfig,
    seed: u64,
) -> Result<SurveillanceSnapshot> {
    parameter.check(value)?;
    let profile = AirspaceProfile::from_weights(&cfg.airspace_profile, reg)?;
    Ok(build_pools(sample, index, parameter, value, &profile, &cfg.number_style, seed)?.snapshot(parameter, value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augment::{augment_corpus, synthetic_donors, AugmentConfig};
    use crate::spoken::VariantKind;
    use proptest::prelude::*;

    fn corpus(n: usize, seed: u64, wer: f64) -> Vec<TranscriptSample> {
        let reg = AirlineRegistry::builtin();
        let profile = AirspaceProfile::uniform(&reg).unwrap();
        let donors = synthetic_donors(n, seed, &reg, &profile).unwrap();
        let mut cfg = AugmentConfig {
            seed,
            ..AugmentConfig::default()
        };
        cfg.variant_distribution = BTreeMap::from([(VariantKind::Full, 1.0)]);
        cfg.set_target_wer(wer);
        augment_corpus(&donors, &cfg, &reg).unwrap().samples
    }

    #[test]
    fn clean_full_corpus_is_perfect_at_every_size() {
        let reg = AirlineRegistry::builtin();
        let c = corpus(60, 2, 0.0);
        let report = sweep(
            &c,
            Mode::Sur,
            SweepParameter::SurveillanceSize,
            &[1.0, 5.0, 10.0, 19.0, 40.0],
            &reg,
            &SweepConfig::default(),
            9,
        )
        .unwrap();
        assert!(report.points.iter().all(|p| p.csa == 100.0 && p.n == 60), "{report:?}");
        assert!(report.trend.non_increasing);
    }

    #[test]
    fn rewrites_have_the_requested_shape() {
        let reg = AirlineRegistry::builtin();
        let cfg = SweepConfig::default();
        for (i, s) in corpus(30, 4, 0.0).iter().enumerate() {
            let n = s.surveillance.unique().len();
            let snap = rewrite_surveillance(s, i, SweepParameter::SurveillanceSize, 7.0, &reg, &cfg, 1).unwrap();
            assert_eq!(snap.unique().len(), 7);
            assert_eq!(snap.count(&s.target), 1);

            let snap = rewrite_surveillance(s, i, SweepParameter::IdentifierDupFraction, 0.5, &reg, &cfg, 1).unwrap();
            assert_eq!(snap.unique().len(), n);
            let same = snap
                .callsigns
                .iter()
                .filter(|c| c.designator() == s.target.designator())
                .count();
            assert_eq!(same - 1, (0.5 * (n - 1) as f64).round() as usize);

            let snap = rewrite_surveillance(s, i, SweepParameter::NumberDuplicates, 2.0, &reg, &cfg, 1).unwrap();
            assert_eq!(snap.unique().len(), n.max(3));
            let dup = snap
                .callsigns
                .iter()
                .filter(|c| c.number() == s.target.number())
                .count();
            assert_eq!(dup, 3);
        }
    }

    #[test]
    fn report_serialization() {
        let report = SweepReport {
            parameter: SweepParameter::NumberDuplicates,
            mode: Mode::Sur,
            points: vec![
                SweepPoint {
                    value: 0.0,
                    csa: 90.0,
                    n: 10,
                },
                SweepPoint {
                    value: 1.0,
                    csa: 80.0,
                    n: 10,
                },
            ],
            corpus: CorpusDescriptor {
                target_wer: Some(7.0),
                seed: Some(1),
                size: 10,
            },
            trend: TrendCheck::of(&[], TREND_TOLERANCE),
        };
        assert_eq!(
            report.to_csv(),
            "# number_duplicates mode=sur\nvalue,csa,n\n0,90,10\n1,80,10\n"
        );
        let v: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(v["parameter"], "number_duplicates");
        assert_eq!(v["mode"], "sur");
        assert_eq!(v["points"][1]["csa"], 80.0);
        assert_eq!(v["corpus"]["target_wer"], 7.0);
    }

    #[test]
    fn invalid_values_rejected() {
        let reg = AirlineRegistry::builtin();
        let c = corpus(3, 1, 0.0);
        let cfg = SweepConfig::default();
        for (p, v) in [
            (SweepParameter::SurveillanceSize, 0.0),
            (SweepParameter::SurveillanceSize, 2.5),
            (SweepParameter::IdentifierDupFraction, 1.5),
            (SweepParameter::NumberDuplicates, -1.0),
            (SweepParameter::NumberDuplicates, 500.0),
        ] {
            assert!(sweep(&c, Mode::Sur, p, &[v], &reg, &cfg, 0).is_err(), "{p} {v}");
        }
    }

    #[test]
    fn trend_check() {
        let pts = |v: &[f64]| {
            v.iter()
                .map(|&csa| SweepPoint { value: 0.0, csa, n: 1 })
                .collect::<Vec<_>>()
        };
        let t = TrendCheck::of(&pts(&[90.0, 91.5, 85.0]), 2.0);
        assert!(t.non_increasing);
        assert_eq!(t.delta, -5.0);
        assert!(!TrendCheck::of(&pts(&[80.0, 83.0]), 2.0).non_increasing);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn sweeps_keep_target_and_count(seed in 0u64..1000, size in 1u32..25, frac in 0.0f64..=1.0, k in 0u32..4) {
            let reg = AirlineRegistry::builtin();
            let cfg = SweepConfig::default();
            let c = corpus(4, seed, 0.0);
            for (i, s) in c.iter().enumerate() {
                for (p, v) in [
                    (SweepParameter::SurveillanceSize, f64::from(size)),
                    (SweepParameter::IdentifierDupFraction, frac),
                    (SweepParameter::NumberDuplicates, f64::from(k)),
                ] {
                    let snap = rewrite_surveillance(s, i, p, v, &reg, &cfg, seed).unwrap();
                    prop_assert!(snap.contains(&s.target));
                }
            }
            let r = sweep(&c, Mode::Sur, SweepParameter::NumberDuplicates, &[0.0, f64::from(k)], &reg, &cfg, seed).unwrap();
            prop_assert!(r.points.iter().all(|p| p.n == c.len()));
        }
    }
}
