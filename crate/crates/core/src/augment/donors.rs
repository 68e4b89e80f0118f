//! Synthetic donor transcripts built from templated ATC phraseology.

use rand::Rng;

use super::synth::{synthesize_callsign, AirspaceProfile, NumberStyle};
use crate::corpus::TranscriptSample;
use crate::error::Result;
use crate::phonetic::DIGIT_WORDS;
use crate::registry::AirlineRegistry;
use crate::rng::{rng_for, Stream};
use crate::spoken::{expand_to_spoken, SpokenForm, VariantKind};

const TEMPLATES: &[&str] = &[
    "descend flight level {fl}",
    "climb flight level {fl}",
    "when ready descend flight level {fl}",
    "stop climb at flight level {fl}",
    "descend {alt} feet",
    "climb to altitude {alt} feet",
    "turn left heading {hdg}",
    "turn right heading {hdg}",
    "fly heading {hdg} vectors ils approach runway {rwy}",
    "contact {station} {freq}",
    "squawk {sqk}",
    "cleared ils approach runway {rwy}",
    "cleared to land runway {rwy} wind {hdg} degrees {kt} knots",
    "cleared for takeoff runway {rwy}",
    "line up and wait runway {rwy}",
    "hold short runway {rwy}",
    "reduce speed {spd} knots",
    "maintain {spd} knots until four miles final",
    "proceed direct {wpt}",
    "direct {wpt} descend flight level {fl}",
    "qnh {qnh}",
    "good morning radar contact",
    "identified",
    "say again",
    "roger",
    "expect vectors for ils approach runway {rwy}",
    "taxi to holding point runway {rwy}",
    "report established",
];

const WAYPOINTS: &[&str] = &["lanux", "tirlo", "abnob", "mopug", "resmi", "osbit", "nelsa", "bravi"];
const STATIONS: &[&str] = &["tower", "radar", "ground", "approach", "director", "departure"];

fn digits(n: u32) -> Vec<String> {
    n.to_string()
        .chars()
        .map(|c| DIGIT_WORDS[(c as u8 - b'0') as usize].to_string())
        .collect()
}

fn fill<R: Rng + ?Sized>(rng: &mut R, slot: &str) -> Vec<String> {
    match slot {
        "fl" => digits(rng.random_range(5..40) * 10),
        "alt" => {
            let mut out = vec![DIGIT_WORDS[rng.random_range(2..10)].to_string(), "thousand".into()];
            if rng.random_bool(0.3) {
                out.push(DIGIT_WORDS[rng.random_range(1..10)].to_string());
                out.push("hundred".into());
            }
            out
        }
        "hdg" => {
            let h = rng.random_range(1..37) * 10;
            let mut d = digits(h);
            while d.len() < 3 {
                d.insert(0, "zero".into());
            }
            d
        }
        "rwy" => {
            let mut out = digits(rng.random_range(1..37));
            if out.len() == 1 {
                out.insert(0, "zero".into());
            }
            match rng.random_range(0..3) {
                0 => out.push("left".into()),
                1 => out.push("right".into()),
                _ => {}
            }
            out
        }
        "freq" => {
            let mut out = digits(rng.random_range(118..136));
            out.push("decimal".into());
            out.extend(digits(rng.random_range(1..10)));
            if rng.random_bool(0.5) {
                out.extend(digits(rng.random_range(1..10)));
            }
            out
        }
        "sqk" => (0..4)
            .map(|_| DIGIT_WORDS[rng.random_range(0..8)].to_string())
            .collect(),
        "kt" => digits(rng.random_range(3..25)),
        "spd" => digits(rng.random_range(16..26) * 10),
        "qnh" => digits(rng.random_range(990..1035)),
        "wpt" => vec![WAYPOINTS[rng.random_range(0..WAYPOINTS.len())].to_string()],
        "station" => vec![STATIONS[rng.random_range(0..STATIONS.len())].to_string()],
        other => vec![other.to_string()],
    }
}

fn command<R: Rng + ?Sized>(rng: &mut R) -> Vec<String> {
    let template = TEMPLATES[rng.random_range(0..TEMPLATES.len())];
    let mut out = Vec::new();
    for word in template.split(' ') {
        match word.strip_prefix('{').and_then(|w| w.strip_suffix('}')) {
            Some(slot) => out.extend(fill(rng, slot)),
            None => out.push(word.to_string()),
        }
    }
    out
}

/// Generates `count` labeled donor transcripts. The call-sign leads the
/// transmission in most samples and closes it (readback style) otherwise.
pub fn synthetic_donors(
    count: usize,
    seed: u64,
    reg: &AirlineRegistry,
    profile: &AirspaceProfile,
) -> Result<Vec<TranscriptSample>> {
    let style = NumberStyle::default();
    (0..count)
        .map(|i| {
            let mut rng = rng_for(seed, Stream::Donor, i as u64);
            let cs = synthesize_callsign(&mut rng, profile, &style);
            let variants = expand_to_spoken(&cs, reg, &[VariantKind::Full])?;
            let spoken = variants[rng.random_range(0..variants.len())].tokens.tokens().to_vec();
            let cmd = command(&mut rng);
            let (tokens, span) = if rng.random_bool(0.8) {
                let span = [0, spoken.len()];
                (spoken.into_iter().chain(cmd).collect::<Vec<_>>(), span)
            } else {
                let span = [cmd.len(), cmd.len() + spoken.len()];
                (cmd.into_iter().chain(spoken).collect(), span)
            };
            let mut sample = TranscriptSample::new(SpokenForm::new(tokens)?, cs, Some(span));
            sample.variant = Some(VariantKind::Full);
            Ok(sample)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extractor::vanilla_recognize;

    #[test]
    fn donors_are_labeled_and_recognizable() {
        let reg = AirlineRegistry::builtin();
        let profile = AirspaceProfile::uniform(&reg).unwrap();
        let donors = synthetic_donors(300, 5, &reg, &profile).unwrap();
        assert_eq!(donors.len(), 300);
        let mut hits = 0;
        for d in &donors {
            d.validate().unwrap();
            let toks: Vec<&str> = d.span_tokens().unwrap().iter().map(String::as_str).collect();
            assert_eq!(
                crate::spoken::spoken_to_icao(&toks, &reg).unwrap().as_ref(),
                Some(&d.target)
            );
            hits += usize::from(vanilla_recognize(&d.transcript, &reg).as_ref() == Some(&d.target));
        }
        // Readbacks can put command digits right before the call-sign, which
        // is fine; leading call-signs must always be recovered.
        assert!(hits >= 290, "{hits}");
        assert_eq!(donors, synthetic_donors(300, 5, &reg, &profile).unwrap());
    }
}
