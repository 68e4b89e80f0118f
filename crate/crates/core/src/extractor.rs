//! Call-sign span detection and context-free ("vanilla") recognition.

use serde::{Deserialize, Serialize};

use crate::callsign::{IcaoCallsign, MAX_NUMBER_LEN};
use crate::phonetic::{self, decode_number, NumberWord};
use crate::registry::AirlineRegistry;
use crate::spoken::{spoken_to_icao, SpokenForm, VariantKind};

/// A candidate call-sign location, `start..end` in token indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub kind: VariantKind,
    pub tokens: SpokenForm,
}

impl Span {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

/// End of the longest run of number words starting at `from` that decodes
/// to at most [`MAX_NUMBER_LEN`] characters.
fn munch_number(tokens: &[&str], from: usize) -> usize {
    let run_end = tokens[from..]
        .iter()
        .position(|t| !phonetic::is_number_word(t))
        .map_or(tokens.len(), |p| from + p);
    (from..=run_end)
        .rev()
        .find(|&end| end == from || decode_number(&tokens[from..end]).is_some_and(|s| s.len() <= MAX_NUMBER_LEN))
        .unwrap_or(from)
}

fn has_group_word(tokens: &[&str]) -> bool {
    tokens
        .iter()
        .any(|t| !matches!(phonetic::classify(t), Some(NumberWord::Char(_)) | None))
}

/// Finds every candidate call-sign span.
///
/// Anchored spans start at a telephony name or a spelled designator and
/// continue through number words; bare spans are maximal runs of at least
/// two number words. Output is ordered by start, then longest first.
pub fn extract_spans(transcript: &SpokenForm, reg: &AirlineRegistry) -> Vec<Span> {
    let tokens = transcript.as_strs();
    let mut spans: Vec<Span> = Vec::new();
    let mut push = |start: usize, end: usize, kind: VariantKind| {
        if spans.iter().any(|s| s.start == start && s.end == end && s.kind == kind) {
            return;
        }
        spans.push(Span {
            start,
            end,
            kind,
            tokens: SpokenForm::from_vec_unchecked(tokens[start..end].iter().map(|t| t.to_string()).collect()),
        });
    };

    for i in 0..tokens.len() {
        let mut heads: Vec<(usize, bool)> = reg
            .prefix_matches(&tokens[i..])
            .into_iter()
            .map(|(_, len)| (len, false))
            .collect();
        if reg.designator_token(tokens[i]).is_some() {
            heads.push((1, true));
        }
        for (len, spelled) in heads {
            let num_start = i + len;
            let end = munch_number(&tokens, num_start);
            let kind = if spelled {
                VariantKind::SpelledDesignator
            } else if end == num_start {
                VariantKind::IdentifierOnly
            } else if has_group_word(&tokens[num_start..end]) {
                VariantKind::GroupedNumber
            } else {
                VariantKind::Full
            };
            push(i, end, kind);
        }

        let run_start = phonetic::is_number_word(tokens[i]) && (i == 0 || !phonetic::is_number_word(tokens[i - 1]));
        if run_start {
            let end = munch_number(&tokens, i);
            if end - i >= 2 {
                push(i, end, VariantKind::NoIdentifier);
            }
        }
    }

    spans.sort_by(|a, b| {
        a.start
            .cmp(&b.start)
            .then(b.len().cmp(&a.len()))
            .then(a.kind.cmp(&b.kind))
    });
    spans
}

/// Recognition without surveillance: the first anchored span (leftmost,
/// then longest) that parses to a complete call-sign.
pub fn vanilla_recognize_span(transcript: &SpokenForm, reg: &AirlineRegistry) -> Option<(IcaoCallsign, Span)> {
    extract_spans(transcript, reg)
        .into_iter()
        .filter(|s| s.kind != VariantKind::NoIdentifier)
        .find_map(|span| match spoken_to_icao(&span.tokens.as_strs(), reg) {
            Ok(Some(cs)) => Some((cs, span)),
            _ => None,
        })
}

pub fn vanilla_recognize(transcript: &SpokenForm, reg: &AirlineRegistry) -> Option<IcaoCallsign> {
    vanilla_recognize_span(transcript, reg).map(|(cs, _)| cs)
}
