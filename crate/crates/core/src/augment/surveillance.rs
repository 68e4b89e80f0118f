use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson};
use serde::{Deserialize, Serialize};

use super::synth::{AirspaceProfile, NumberStyle};
use crate::callsign::{Designator, IcaoCallsign};
use crate::error::{CruError, Result};
use crate::matcher::SurveillanceSnapshot;

/// Statistics simulated surveillance lists are drawn to match.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurveillanceParams {
    /// Mean number of call-signs per snapshot, target included.
    pub size_mean: f64,
    /// Extra variance of the size beyond Poisson; 0 gives a shifted Poisson.
    pub size_dispersion: f64,
    /// Mean number of call-signs per distinct designator.
    pub identifier_dup_rate: f64,
    /// Probability that one distractor carries the target's number.
    pub number_dup_prob: f64,
}

impl Default for SurveillanceParams {
    fn default() -> Self {
        SurveillanceParams {
            size_mean: 26.0,
            size_dispersion: 0.0,
            identifier_dup_rate: 1.45,
            number_dup_prob: 0.027,
        }
    }
}

impl SurveillanceParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(CruError::InvalidConfig(m.into()));
        if !(self.size_mean.is_finite() && self.size_mean >= 1.0) {
            return bad("size_mean must be at least 1");
        }
        if !(self.size_dispersion.is_finite() && self.size_dispersion >= 0.0) {
            return bad("size_dispersion must be non-negative");
        }
        if !(self.identifier_dup_rate.is_finite() && self.identifier_dup_rate >= 1.0) {
            return bad("identifier_dup_rate must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.number_dup_prob) {
            return bad("number_dup_prob must be in [0, 1]");
        }
        Ok(())
    }

    fn sample_size<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let extra = self.size_mean - 1.0;
        if extra <= 0.0 {
            return 1;
        }
        let lambda = if self.size_dispersion > 0.0 {
            let shape = 1.0 / self.size_dispersion;
            Gamma::new(shape, extra / shape)
                .expect("positive gamma parameters")
                .sample(rng)
        } else {
            extra
        };
        if lambda <= 0.0 {
            return 1;
        }
        let k: f64 = Poisson::new(lambda).expect("positive rate").sample(rng);
        1 + k as usize
    }
}

/// Rounds `x` up with probability equal to its fractional part.
fn stochastic_round<R: Rng + ?Sized>(rng: &mut R, x: f64) -> usize {
    let floor = x.floor();
    let frac = x - floor;
    floor as usize + usize::from(rng.random::<f64>() < frac)
}

/// Draws up to `count` designators from the profile, all different from
/// each other and from `exclude`.
fn fresh_designators<R: Rng + ?Sized>(
    rng: &mut R,
    profile: &AirspaceProfile,
    exclude: &BTreeSet<Designator>,
    count: usize,
) -> Vec<Designator> {
    let mut taken = exclude.clone();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count && attempts < 64 * (count + 1) {
        attempts += 1;
        let d = profile.sample(rng);
        if taken.insert(d) {
            out.push(d);
        }
    }
    if out.len() < count {
        // Rejection sampling stalls on small profiles; take what is left.
        let mut rest: Vec<Designator> = profile
            .designators()
            .iter()
            .copied()
            .filter(|d| !taken.contains(d))
            .collect();
        rest.sort();
        rest.dedup();
        rest.shuffle(rng);
        out.extend(rest.into_iter().take(count - out.len()));
    }
    out
}

/// A number for a distractor that avoids the target's number and every
/// call-sign already in `used`.
pub(crate) fn distractor<R: Rng + ?Sized>(
    rng: &mut R,
    designator: Designator,
    target: &IcaoCallsign,
    style: &NumberStyle,
    used: &BTreeSet<IcaoCallsign>,
) -> IcaoCallsign {
    let mut cs = IcaoCallsign::new(designator, style.sample(rng));
    for _ in 0..256 {
        if cs.number() != target.number() && !used.contains(&cs) {
            break;
        }
        cs = IcaoCallsign::new(designator, style.sample(rng));
    }
    cs
}

/// Simulates the surveillance list of a transmission addressed to `target`.
pub fn generate_surveillance<R: Rng + ?Sized>(
    rng: &mut R,
    target: &IcaoCallsign,
    params: &SurveillanceParams,
    profile: &AirspaceProfile,
    style: &NumberStyle,
) -> SurveillanceSnapshot {
    let size = params.sample_size(rng);
    let number_dup = size >= 2 && rng.random_bool(params.number_dup_prob);

    let mut distinct = stochastic_round(rng, size as f64 / params.identifier_dup_rate).clamp(1, size);
    if number_dup {
        distinct = distinct.max(2);
    }
    let mut exclude = BTreeSet::new();
    exclude.insert(target.designator());
    let others = fresh_designators(rng, profile, &exclude, distinct - 1);

    // Each fresh designator gets one slot; the rest are spread over all
    // designators, the target's included.
    let mut slots: Vec<Designator> = others.clone();
    let pool: Vec<Designator> = std::iter::once(target.designator())
        .chain(others.iter().copied())
        .collect();
    while slots.len() < size - 1 {
        slots.push(pool[rng.random_range(0..pool.len())]);
    }

    let mut used = BTreeSet::new();
    used.insert(target.clone());
    let mut callsigns = Vec::with_capacity(size);
    for d in slots {
        let cs = distractor(rng, d, target, style, &used);
        used.insert(cs.clone());
        callsigns.push(cs);
    }
    if number_dup {
        if let Some(slot) = callsigns.iter_mut().find(|c| c.designator() != target.designator()) {
            *slot = IcaoCallsign::new(slot.designator(), target.number().clone());
        }
    }
    callsigns.push(target.clone());
    callsigns.shuffle(rng);
    SurveillanceSnapshot::new(callsigns)
}
