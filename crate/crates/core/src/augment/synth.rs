use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::callsign::{CallsignNumber, Designator, IcaoCallsign, MAX_NUMBER_LEN};
use crate::error::{CruError, Result};
use crate::registry::AirlineRegistry;

/// Weighted airline mix of an airspace.
#[derive(Debug, Clone)]
pub struct AirspaceProfile {
    designators: Vec<Designator>,
    weights: Vec<f64>,
    index: WeightedIndex<f64>,
}

impl AirspaceProfile {
    pub fn new(entries: Vec<(Designator, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(CruError::InvalidConfig("airspace profile is empty".into()));
        }
        let (designators, weights): (Vec<_>, Vec<_>) = entries.into_iter().unzip();
        let index = WeightedIndex::new(&weights)
            .map_err(|e| CruError::InvalidConfig(format!("airspace profile weights: {e}")))?;
        Ok(AirspaceProfile {
            designators,
            weights,
            index,
        })
    }

    /// Every registry airline with equal weight.
    pub fn uniform(reg: &AirlineRegistry) -> Result<Self> {
        Self::new(reg.designators().map(|d| (d, 1.0)).collect())
    }

    /// Builds a profile from designator codes and weights; an empty map
    /// means [`AirspaceProfile::uniform`].
    pub fn from_weights(weights: &std::collections::BTreeMap<String, f64>, reg: &AirlineRegistry) -> Result<Self> {
        if weights.is_empty() {
            return Self::uniform(reg);
        }
        let mut entries = Vec::with_capacity(weights.len());
        for (code, w) in weights {
            let d = Designator::new(code)
                .map_err(|_| CruError::InvalidConfig(format!("airspace profile: bad designator {code:?}")))?;
            if !reg.contains(d) {
                return Err(CruError::UnknownDesignator(code.clone()));
            }
            entries.push((d, *w));
        }
        Self::new(entries)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Designator {
        self.designators[self.index.sample(rng)]
    }

    pub fn designators(&self) -> &[Designator] {
        &self.designators
    }

    pub fn entries(&self) -> impl Iterator<Item = (Designator, f64)> + '_ {
        self.designators.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.designators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.designators.is_empty()
    }
}

/// Shape of synthesized call-sign numbers: a run of digits optionally
/// followed by letters (`83K`, `0WM`, `4572`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumberStyle {
    /// Relative weights of number lengths 1, 2, 3 and 4.
    pub length_weights: [f64; MAX_NUMBER_LEN],
    /// Chance that a character after a digit starts the letter suffix.
    pub letter_prob: f64,
}

impl Default for NumberStyle {
    fn default() -> Self {
        NumberStyle {
            length_weights: [0.05, 0.25, 0.4, 0.3],
            letter_prob: 0.3,
        }
    }
}

impl NumberStyle {
    pub fn validate(&self) -> Result<()> {
        WeightedIndex::new(self.length_weights)
            .map_err(|e| CruError::InvalidConfig(format!("number length weights: {e}")))?;
        if !(0.0..=1.0).contains(&self.letter_prob) {
            return Err(CruError::InvalidConfig("letter_prob must be in [0, 1]".into()));
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> CallsignNumber {
        let len = WeightedIndex::new(self.length_weights)
            .expect("validated weights")
            .sample(rng)
            + 1;
        let mut text = String::with_capacity(len);
        text.push(rng.random_range(b'0'..=b'9') as char);
        let mut letters = false;
        for _ in 1..len {
            letters = letters || rng.random_bool(self.letter_prob);
            let c = if letters {
                rng.random_range(b'A'..=b'Z')
            } else {
                rng.random_range(b'0'..=b'9')
            };
            text.push(c as char);
        }
        CallsignNumber::new(&text).expect("generated numbers follow the grammar")
    }
}

/// Draws an artificial call-sign for the airspace.
pub fn synthesize_callsign<R: Rng + ?Sized>(
    rng: &mut R,
    profile: &AirspaceProfile,
    style: &NumberStyle,
) -> IcaoCallsign {
    let designator = profile.sample(rng);
    IcaoCallsign::new(designator, style.sample(rng))
}

/// Like [`synthesize_callsign`] with the number fixed.
pub fn synthesize_with_number<R: Rng + ?Sized>(
    rng: &mut R,
    profile: &AirspaceProfile,
    number: &CallsignNumber,
) -> IcaoCallsign {
    IcaoCallsign::new(profile.sample(rng), number.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{rng_for, Stream};

    fn d(s: &str) -> Designator {
        Designator::new(s).unwrap()
    }

    #[test]
    fn single_airline_profile() {
        let profile = AirspaceProfile::new(vec![(d("MAJ"), 1.0)]).unwrap();
        let mut rng = rng_for(0, Stream::Test, 0);
        for _ in 0..100 {
            let cs = synthesize_callsign(&mut rng, &profile, &NumberStyle::default());
            assert_eq!(cs.designator(), d("MAJ"));
            crate::callsign::parse_icao(&cs.canonical()).unwrap();
        }
    }

    #[test]
    fn forced_number() {
        let profile = AirspaceProfile::new(vec![(d("DLH"), 1.0)]).unwrap();
        let mut rng = rng_for(0, Stream::Test, 0);
        let n = CallsignNumber::new("83K").unwrap();
        assert_eq!(synthesize_with_number(&mut rng, &profile, &n).canonical(), "DLH83K");
    }

    #[test]
    fn profile_weights_respected() {
        let profile = AirspaceProfile::new(vec![(d("DLH"), 3.0), (d("RYR"), 1.0)]).unwrap();
        let mut rng = rng_for(42, Stream::Test, 0);
        let n = 100_000;
        let dlh = (0..n)
            .filter(|_| synthesize_callsign(&mut rng, &profile, &NumberStyle::default()).designator() == d("DLH"))
            .count();
        let freq = dlh as f64 / n as f64;
        assert!((freq - 0.75).abs() <= 0.01, "{freq}");
    }

    #[test]
    fn number_lengths_follow_weights() {
        let style = NumberStyle {
            length_weights: [0.0, 0.0, 1.0, 0.0],
            letter_prob: 0.0,
        };
        let mut rng = rng_for(1, Stream::Test, 0);
        for _ in 0..50 {
            let n = style.sample(&mut rng);
            assert_eq!(n.as_str().len(), 3);
            assert!(n.as_str().bytes().all(|b| b.is_ascii_digit()));
        }
        assert!(AirspaceProfile::new(vec![]).is_err());
        assert!(NumberStyle {
            length_weights: [0.0; 4],
            letter_prob: 0.1
        }
        .validate()
        .is_err());
    }
}
