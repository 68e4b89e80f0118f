//! Conversion between ICAO call-signs and their spoken forms.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::callsign::{CallsignNumber, Designator, IcaoCallsign};
use crate::error::{CruError, Result};
use crate::phonetic::{decode_number, grouped_prefix, words_for_char};
use crate::registry::AirlineRegistry;

/// Lowercase word tokens of a transcript or call-sign utterance.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpokenForm(Vec<String>);

impl SpokenForm {
    /// Builds a form from tokens, rejecting empty tokens, embedded
    /// whitespace and uppercase characters.
    pub fn new<S: Into<String>>(tokens: impl IntoIterator<Item = S>) -> Result<Self> {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        for t in &tokens {
            if t.is_empty() || t.chars().any(|c| c.is_whitespace() || c.is_uppercase()) {
                return Err(CruError::UnparsableSpan(t.clone()));
            }
        }
        Ok(SpokenForm(tokens))
    }

    /// Splits on whitespace and lowercases.
    pub fn parse(text: &str) -> Self {
        SpokenForm(text.split_whitespace().map(str::to_lowercase).collect())
    }

    pub(crate) fn from_vec_unchecked(tokens: Vec<String>) -> Self {
        SpokenForm(tokens)
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn as_strs(&self) -> Vec<&str> {
        self.0.iter().map(String::as_str).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<String> {
        self.0
    }
}

impl fmt::Display for SpokenForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(" "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantKind {
    /// Telephony name followed by the number spelled per character.
    Full,
    /// Number only.
    NoIdentifier,
    /// Telephony name only.
    IdentifierOnly,
    /// Leading digits grouped (`seventy-two`, `three thousand`).
    GroupedNumber,
    /// Designator letters as one token (`dlh`).
    SpelledDesignator,
    /// First character of the number dropped.
    ShortenedNumber,
}

impl VariantKind {
    pub const ALL: [VariantKind; 6] = [
        VariantKind::Full,
        VariantKind::NoIdentifier,
        VariantKind::IdentifierOnly,
        VariantKind::GroupedNumber,
        VariantKind::SpelledDesignator,
        VariantKind::ShortenedNumber,
    ];

    /// Variants that carry both the identifier and the complete number and
    /// therefore invert exactly.
    pub const INVERTIBLE: [VariantKind; 3] = [
        VariantKind::Full,
        VariantKind::GroupedNumber,
        VariantKind::SpelledDesignator,
    ];

    pub fn needs_registry(self) -> bool {
        !matches!(self, VariantKind::NoIdentifier)
    }

    /// Whether the span of this kind is expected to parse back to its target.
    pub fn is_invertible(self) -> bool {
        Self::INVERTIBLE.contains(&self)
    }

    pub fn name(self) -> &'static str {
        match self {
            VariantKind::Full => "full",
            VariantKind::NoIdentifier => "no_identifier",
            VariantKind::IdentifierOnly => "identifier_only",
            VariantKind::GroupedNumber => "grouped_number",
            VariantKind::SpelledDesignator => "spelled_designator",
            VariantKind::ShortenedNumber => "shortened_number",
        }
    }
}

impl fmt::Display for VariantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpokenVariant {
    pub kind: VariantKind,
    pub tokens: SpokenForm,
}

/// All spellings of `chars` one word per character, with both `zero` and
/// `oh` for `0`.
fn spell_chars(chars: &str) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = vec![Vec::new()];
    for c in chars.chars() {
        let words = words_for_char(c);
        out = out
            .into_iter()
            .flat_map(|prefix| {
                words.iter().map(move |w| {
                    let mut next = prefix.clone();
                    next.push(w.to_string());
                    next
                })
            })
            .collect();
    }
    out
}

fn concat(a: &[String], b: &[String]) -> Vec<String> {
    a.iter().chain(b).cloned().collect()
}

/// Every spoken rendering of `cs` for the requested kinds, deduplicated and
/// sorted by (kind, tokens).
pub fn expand_to_spoken(cs: &IcaoCallsign, reg: &AirlineRegistry, kinds: &[VariantKind]) -> Result<Vec<SpokenVariant>> {
    let names = reg.names(cs.designator());
    if names.is_none() && kinds.iter().any(|k| k.needs_registry()) {
        return Err(CruError::UnknownDesignator(cs.designator().to_string()));
    }
    let names = names.unwrap_or(&[]);
    let number = cs.number().as_str();
    let spelled = spell_chars(number);

    let mut set: BTreeSet<(VariantKind, Vec<String>)> = BTreeSet::new();
    for &kind in kinds {
        match kind {
            VariantKind::Full => {
                for name in names {
                    for s in &spelled {
                        set.insert((kind, concat(name, s)));
                    }
                }
            }
            VariantKind::NoIdentifier => {
                for s in &spelled {
                    set.insert((kind, s.clone()));
                }
            }
            VariantKind::IdentifierOnly => {
                for name in names {
                    set.insert((kind, name.clone()));
                }
            }
            VariantKind::GroupedNumber => {
                if let Some((group, covered)) = grouped_prefix(number) {
                    for rest in spell_chars(&number[covered..]) {
                        let tail = concat(&group, &rest);
                        for name in names {
                            set.insert((kind, concat(name, &tail)));
                        }
                    }
                }
            }
            VariantKind::SpelledDesignator => {
                let head = vec![cs.designator().spoken()];
                for s in &spelled {
                    set.insert((kind, concat(&head, s)));
                }
            }
            VariantKind::ShortenedNumber => {
                if number.len() >= 2 {
                    for rest in spell_chars(&number[1..]) {
                        for name in names {
                            set.insert((kind, concat(name, &rest)));
                        }
                    }
                }
            }
        }
    }
    Ok(set
        .into_iter()
        .map(|(kind, tokens)| SpokenVariant {
            kind,
            tokens: SpokenForm::from_vec_unchecked(tokens),
        })
        .collect())
}

/// A call-sign parse that may lack its identifier or its number.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialCallsign {
    pub designator: Option<Designator>,
    pub number: Option<CallsignNumber>,
}

impl PartialCallsign {
    pub fn complete(&self) -> Option<IcaoCallsign> {
        match (&self.designator, &self.number) {
            (Some(d), Some(n)) => Some(IcaoCallsign::new(*d, n.clone())),
            _ => None,
        }
    }
}

impl fmt::Display for PartialCallsign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.designator {
            Some(d) => write!(f, "{d}")?,
            None => f.write_str("???")?,
        }
        match &self.number {
            Some(n) => write!(f, "{n}"),
            None => f.write_str("*"),
        }
    }
}

fn decode_callsign_number(tokens: &[&str]) -> Option<CallsignNumber> {
    decode_number(tokens).and_then(|s| CallsignNumber::new(&s).ok())
}

/// Parses a candidate span, allowing a missing identifier or number.
pub fn parse_spoken(tokens: &[&str], reg: &AirlineRegistry) -> Result<PartialCallsign> {
    let span_text = || tokens.join(" ");
    let Some(first) = tokens.first() else {
        return Err(CruError::UnparsableSpan(String::new()));
    };

    let mut heads = reg.prefix_matches(tokens);
    if let Some(d) = reg.designator_token(first) {
        heads.push((d, 1));
    }

    let mut parses: Vec<PartialCallsign> = Vec::new();
    for (designator, len) in heads {
        let rest = &tokens[len..];
        let number = if rest.is_empty() {
            None
        } else {
            match decode_callsign_number(rest) {
                Some(n) => Some(n),
                None => continue,
            }
        };
        let parse = PartialCallsign {
            designator: Some(designator),
            number,
        };
        if !parses.contains(&parse) {
            parses.push(parse);
        }
    }

    match parses.len() {
        1 => Ok(parses.pop().unwrap()),
        0 => decode_callsign_number(tokens)
            .map(|n| PartialCallsign {
                designator: None,
                number: Some(n),
            })
            .ok_or_else(|| CruError::UnparsableSpan(span_text())),
        _ => {
            let alts: Vec<String> = parses.iter().map(ToString::to_string).collect();
            Err(CruError::AmbiguousSpan(span_text(), alts.join(", ")))
        }
    }
}

/// Converts a spoken call-sign span to ICAO format.
///
/// Returns `Ok(None)` when the span names only the airline or only the
/// number; use [`parse_spoken`] to get at those partial parses.
pub fn spoken_to_icao(tokens: &[&str], reg: &AirlineRegistry) -> Result<Option<IcaoCallsign>> {
    parse_spoken(tokens, reg).map(|p| p.complete())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::callsign::parse_icao;

    fn reg() -> AirlineRegistry {
        AirlineRegistry::from_pairs([
            ("DLH", "lufthansa"),
            ("RYR", "ryanair"),
            ("MAJ", "majan"),
            ("GEC", "lufthansa cargo"),
            ("DAL", "delta"),
        ])
        .unwrap()
    }

    fn texts(vs: &[SpokenVariant]) -> Vec<String> {
        vs.iter().map(|v| v.tokens.to_string()).collect()
    }

    #[test]
    fn dlh72k_variants() {
        let cs = parse_icao("DLH72K").unwrap();
        let vs = expand_to_spoken(&cs, &reg(), &VariantKind::ALL).unwrap();
        let t = texts(&vs);
        for want in [
            "lufthansa seven two kilo",
            "seven two kilo",
            "lufthansa",
            "lufthansa seventy-two kilo",
            "dlh seven two kilo",
            "lufthansa two kilo",
        ] {
            assert!(t.contains(&want.to_string()), "missing {want}: {t:?}");
        }
        for v in &vs {
            for tok in v.tokens.tokens() {
                assert!(!tok.is_empty());
                assert_eq!(tok, &tok.to_lowercase());
            }
        }
    }

    #[test]
    fn full_only() {
        let cs = parse_icao("DLH83K").unwrap();
        let vs = expand_to_spoken(&cs, &reg(), &[VariantKind::Full]).unwrap();
        assert_eq!(texts(&vs), vec!["lufthansa eight three kilo"]);
    }

    #[test]
    fn zero_has_two_spellings() {
        let cs = parse_icao("MAJ0WM").unwrap();
        let t = texts(&expand_to_spoken(&cs, &reg(), &[VariantKind::NoIdentifier]).unwrap());
        assert!(t.contains(&"oh whiskey mike".to_string()));
        assert!(t.contains(&"zero whiskey mike".to_string()));
    }

    #[test]
    fn unknown_designator() {
        let cs = parse_icao("XYZ12").unwrap();
        assert!(matches!(
            expand_to_spoken(&cs, &reg(), &[VariantKind::Full]),
            Err(CruError::UnknownDesignator(_))
        ));
        let vs = expand_to_spoken(&cs, &reg(), &[VariantKind::NoIdentifier]).unwrap();
        assert_eq!(texts(&vs), vec!["one two"]);
    }

    #[test]
    fn parses_spoken_examples() {
        let r = reg();
        let p = |s: &str| spoken_to_icao(&s.split(' ').collect::<Vec<_>>(), &r);
        assert_eq!(p("lufthansa eight three kilo").unwrap().unwrap().canonical(), "DLH83K");
        assert_eq!(p("dlh seven two kilo").unwrap().unwrap().canonical(), "DLH72K");
        assert_eq!(p("lufthansa seventy-two kilo").unwrap().unwrap().canonical(), "DLH72K");
        assert_eq!(p("lufthansa cargo one two").unwrap().unwrap().canonical(), "GEC12");
        assert_eq!(p("delta eight three delta").unwrap().unwrap().canonical(), "DAL83D");
        assert_eq!(p("lufthansa").unwrap(), None);
        assert_eq!(p("eight three kilo").unwrap(), None);
        assert!(matches!(p("descend three"), Err(CruError::UnparsableSpan(_))));
        assert!(matches!(p("lufthansa kilo three"), Err(CruError::UnparsableSpan(_))));
        assert!(matches!(
            p("lufthansa one two three four five"),
            Err(CruError::UnparsableSpan(_))
        ));
    }

    #[test]
    fn partial_mode_keeps_number() {
        let r = reg();
        let p = parse_spoken(&["eight", "three", "kilo"], &r).unwrap();
        assert_eq!(p.designator, None);
        assert_eq!(p.number.unwrap().as_str(), "83K");
        let p = parse_spoken(&["ryanair"], &r).unwrap();
        assert_eq!(p.designator.unwrap().as_str(), "RYR");
        assert_eq!(p.number, None);
    }

    #[test]
    fn conflicting_readings_are_ambiguous() {
        // `abc` is both a telephony name of DLH and the spelled designator ABC.
        let r = AirlineRegistry::from_pairs([("DLH", "abc"), ("ABC", "alphabet")]).unwrap();
        assert!(matches!(
            spoken_to_icao(&["abc", "one"], &r),
            Err(CruError::AmbiguousSpan(..))
        ));
    }

    /// Brute force: enumerate every DLH call-sign with a number of up to
    /// three characters, expand it, and look for all that produce the
    /// grouped spelling `lufthansa seventy-two kilo`.
    #[test]
    fn grouped_inverse_matches_brute_force() {
        let r = reg();
        let alphabet: Vec<char> = ('0'..='9').chain('A'..='Z').collect();
        let mut numbers = Vec::new();
        for &a in alphabet.iter().filter(|c| c.is_ascii_digit()) {
            numbers.push(a.to_string());
            for &b in &alphabet {
                numbers.push(format!("{a}{b}"));
                for &c in &alphabet {
                    numbers.push(format!("{a}{b}{c}"));
                }
            }
        }
        let target = "lufthansa seventy-two kilo";
        let hits: Vec<String> = numbers
            .iter()
            .map(|n| parse_icao(&format!("DLH{n}")).unwrap())
            .filter(|cs| {
                expand_to_spoken(cs, &r, &[VariantKind::GroupedNumber])
                    .unwrap()
                    .iter()
                    .any(|v| v.tokens.to_string() == target)
            })
            .map(|cs| cs.canonical())
            .collect();
        assert_eq!(hits, vec!["DLH72K"]);
        let toks: Vec<&str> = target.split(' ').collect();
        assert_eq!(spoken_to_icao(&toks, &r).unwrap().unwrap().canonical(), hits[0]);
    }
}
