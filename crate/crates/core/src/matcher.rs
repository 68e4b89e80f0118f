//! Surveillance-assisted recognition.
//!
//! Each surveillance call-sign is expanded into its spoken variants and
//! scored against the transcript with a windowed, weighted token edit
//! distance. Same-airline candidates whose windows cover the best one are
//! then compared on a common region (the union of those windows), so a
//! candidate that explains only part of the spoken call-sign loses to one
//! that explains all of it. The winner must reach the threshold; otherwise
//! the result falls back to [`vanilla_recognize`].

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::{Arc, LazyLock};

use serde::{Deserialize, Serialize};

use crate::augment::ConfusionTable;
use crate::callsign::IcaoCallsign;
use crate::error::{CruError, Result};
use crate::extractor::vanilla_recognize;
use crate::phonetic;
use crate::registry::AirlineRegistry;
use crate::spoken::{expand_to_spoken, SpokenForm, VariantKind};

/// Call-signs visible in the airspace at the time of a transmission.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SurveillanceSnapshot {
    pub callsigns: Vec<IcaoCallsign>,
}

impl SurveillanceSnapshot {
    pub fn new(callsigns: Vec<IcaoCallsign>) -> Self {
        SurveillanceSnapshot { callsigns }
    }

    pub fn len(&self) -> usize {
        self.callsigns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.callsigns.is_empty()
    }

    pub fn contains(&self, cs: &IcaoCallsign) -> bool {
        self.callsigns.contains(cs)
    }

    pub fn count(&self, cs: &IcaoCallsign) -> usize {
        self.callsigns.iter().filter(|c| *c == cs).count()
    }

    /// Sorted, duplicate-free copy of the call-signs.
    pub fn unique(&self) -> Vec<IcaoCallsign> {
        let set: BTreeSet<&IcaoCallsign> = self.callsigns.iter().collect();
        set.into_iter().cloned().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatchConfig {
    /// Minimum similarity for a surveillance candidate to be accepted.
    pub threshold: f64,
    pub substitution_cost: f64,
    pub deletion_cost: f64,
    pub insertion_cost: f64,
    /// Multiplier on edits that touch a digit, letter or number word.
    pub digit_weight: f64,
    /// Variant kinds each candidate is expanded into.
    pub kinds: Vec<VariantKind>,
    /// Re-rank overlapping candidates on their common region.
    pub region_rescoring: bool,
    /// Substitution cost multiplier for acoustically confusable token pairs.
    pub confusion_cost: f64,
    /// Confusion TSV replacing the built-in table.
    pub confusion_table: Option<PathBuf>,
    #[serde(skip, default = "builtin_confusions")]
    pub confusions: Arc<ConfusionTable>,
}

fn builtin_confusions() -> Arc<ConfusionTable> {
    static TABLE: LazyLock<Arc<ConfusionTable>> = LazyLock::new(|| Arc::new(ConfusionTable::builtin()));
    TABLE.clone()
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig {
            threshold: 0.3,
            substitution_cost: 1.0,
            deletion_cost: 1.0,
            insertion_cost: 1.0,
            digit_weight: 1.0,
            kinds: VariantKind::INVERTIBLE.to_vec(),
            region_rescoring: true,
            confusion_cost: 0.25,
            confusion_table: None,
            confusions: builtin_confusions(),
        }
    }
}

impl MatchConfig {
    /// Loads `confusion_table` if set.
    pub fn load_confusions(&mut self) -> Result<()> {
        if let Some(path) = &self.confusion_table {
            self.confusions = Arc::new(ConfusionTable::load(path)?);
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(CruError::InvalidConfig(msg.to_string()));
        if !(0.0..=1.0).contains(&self.threshold) {
            return bad("threshold must be in [0, 1]");
        }
        let costs = [self.substitution_cost, self.deletion_cost, self.insertion_cost];
        if costs.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
            return bad("edit costs must be positive");
        }
        if !(self.digit_weight.is_finite() && self.digit_weight >= 1.0) {
            return bad("digit_weight must be at least 1");
        }
        if self.kinds.is_empty() {
            return bad("at least one variant kind is required");
        }
        if !(self.confusion_cost > 0.0 && self.confusion_cost <= 1.0) {
            return bad("confusion_cost must be in (0, 1]");
        }
        Ok(())
    }

    fn weight(&self, token: &str) -> f64 {
        if phonetic::is_number_word(token) {
            self.digit_weight
        } else {
            1.0
        }
    }

    pub(crate) fn sub(&self, a: &str, b: &str) -> f64 {
        if a == b {
            0.0
        } else {
            let base = self.substitution_cost * self.weight(a).max(self.weight(b));
            if self.confusion_cost < 1.0 && self.confusions.confusable(a, b) {
                base * self.confusion_cost
            } else {
                base
            }
        }
    }

    /// Cost of a variant token missing from the transcript.
    pub(crate) fn del(&self, variant_token: &str) -> f64 {
        self.deletion_cost * self.weight(variant_token)
    }

    /// Cost of an extra transcript token inside the window.
    pub(crate) fn ins(&self, transcript_token: &str) -> f64 {
        self.insertion_cost * self.weight(transcript_token)
    }

    pub(crate) fn variant_weight(&self, variant: &[&str]) -> f64 {
        variant.iter().map(|t| self.del(t)).sum()
    }
}

/// Best alignment of a variant inside the transcript.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowMatch {
    pub cost: f64,
    pub start: usize,
    pub end: usize,
    /// Variant tokens matched exactly; among equal-cost alignments the one
    /// with the most matches is kept.
    pub matched: usize,
}

#[derive(Clone, Copy)]
struct Cell {
    cost: f64,
    start: usize,
    matched: usize,
}

impl Cell {
    fn better_than(&self, other: &Cell) -> bool {
        self.cost < other.cost || (self.cost == other.cost && self.matched > other.matched)
    }
}

/// Minimum weighted edit distance between `variant` and any contiguous
/// window of `transcript` (the empty window included).
pub fn best_window(transcript: &[&str], variant: &[&str], cfg: &MatchConfig) -> WindowMatch {
    let m = variant.len();
    // prev[j] / cur[j]: best alignment of variant[..j] ending at the
    // current transcript position.
    let mut prev: Vec<Cell> = Vec::with_capacity(m + 1);
    let mut acc = 0.0;
    prev.push(Cell {
        cost: 0.0,
        start: 0,
        matched: 0,
    });
    for t in variant {
        acc += cfg.del(t);
        prev.push(Cell {
            cost: acc,
            start: 0,
            matched: 0,
        });
    }
    let mut best = WindowMatch {
        cost: prev[m].cost,
        start: 0,
        end: 0,
        matched: 0,
    };
    let mut cur = prev.clone();
    for (i, a) in transcript.iter().enumerate() {
        cur[0] = Cell {
            cost: 0.0,
            start: i + 1,
            matched: 0,
        };
        for j in 1..=m {
            let b = variant[j - 1];
            let d = prev[j - 1];
            let mut pick = Cell {
                cost: d.cost + cfg.sub(a, b),
                start: d.start,
                matched: d.matched + usize::from(*a == b),
            };
            let up = Cell {
                cost: prev[j].cost + cfg.ins(a),
                ..prev[j]
            };
            let left = Cell {
                cost: cur[j - 1].cost + cfg.del(b),
                ..cur[j - 1]
            };
            for cand in [left, up] {
                if cand.better_than(&pick) {
                    pick = cand;
                }
            }
            cur[j] = pick;
        }
        let end = Cell {
            cost: best.cost,
            start: best.start,
            matched: best.matched,
        };
        if cur[m].better_than(&end) {
            best = WindowMatch {
                cost: cur[m].cost,
                start: cur[m].start,
                end: i + 1,
                matched: cur[m].matched,
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    best
}

/// Weighted edit distance between the whole of `window` and `variant`.
pub fn edit_cost(window: &[&str], variant: &[&str], cfg: &MatchConfig) -> f64 {
    let mut prev: Vec<f64> = Vec::with_capacity(variant.len() + 1);
    prev.push(0.0);
    for t in variant {
        prev.push(prev.last().unwrap() + cfg.del(t));
    }
    let mut cur = vec![0.0; variant.len() + 1];
    for a in window {
        cur[0] = prev[0] + cfg.ins(a);
        for (j, b) in variant.iter().enumerate() {
            cur[j + 1] = (prev[j] + cfg.sub(a, b))
                .min(prev[j + 1] + cfg.ins(a))
                .min(cur[j] + cfg.del(b));
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[variant.len()]
}

/// `1 - best window cost / weighted variant length`, clipped to `[0, 1]`.
pub fn similarity(transcript: &SpokenForm, variant: &SpokenForm, cfg: &MatchConfig) -> f64 {
    let t = transcript.as_strs();
    let v = variant.as_strs();
    score_of(best_window(&t, &v, cfg).cost, &v, cfg)
}

fn score_of(cost: f64, variant: &[&str], cfg: &MatchConfig) -> f64 {
    let total = cfg.variant_weight(variant);
    if total <= 0.0 {
        return 0.0;
    }
    (1.0 - cost / total).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    Matched,
    BelowThreshold,
    EmptySurveillance,
}

impl Decision {
    pub fn name(self) -> &'static str {
        match self {
            Decision::Matched => "matched",
            Decision::BelowThreshold => "below-threshold",
            Decision::EmptySurveillance => "empty-surveillance",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateScore {
    pub callsign: IcaoCallsign,
    pub similarity: f64,
    /// Weighted edit cost of the best window.
    pub cost: f64,
    pub best_kind: Option<VariantKind>,
    pub best_variant: Option<SpokenForm>,
    /// Transcript token range of the best alignment.
    pub window: Option<(usize, usize)>,
    /// Tokens of the best variant matched exactly inside the window.
    pub matched: usize,
    /// Set when the candidate could not be expanded.
    pub skipped: Option<String>,
    /// Similarity against the common region, for candidates that took part
    /// in region rescoring.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region_score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchTrace {
    pub candidates: Vec<CandidateScore>,
    /// Index into `candidates` of the highest-ranked candidate.
    pub chosen: Option<usize>,
    pub decision: Decision,
}

impl MatchTrace {
    pub fn best_score(&self) -> Option<f64> {
        self.chosen.map(|i| self.candidates[i].similarity)
    }
}

fn score_candidate(transcript: &[&str], cs: &IcaoCallsign, reg: &AirlineRegistry, cfg: &MatchConfig) -> CandidateScore {
    let variants = match expand_to_spoken(cs, reg, &cfg.kinds) {
        Ok(v) => v,
        Err(e) => {
            return CandidateScore {
                callsign: cs.clone(),
                similarity: 0.0,
                cost: 0.0,
                best_kind: None,
                best_variant: None,
                window: None,
                matched: 0,
                skipped: Some(e.to_string()),
                region_score: None,
            }
        }
    };
    let mut best: Option<(f64, VariantKind, SpokenForm, WindowMatch)> = None;
    for v in variants {
        let toks = v.tokens.as_strs();
        let w = best_window(transcript, &toks, cfg);
        let score = score_of(w.cost, &toks, cfg);
        // Variants arrive sorted by kind, so a strict improvement keeps the
        // preferred kind on ties.
        if best.as_ref().is_none_or(|b| score > b.0) {
            best = Some((score, v.kind, v.tokens, w));
        }
    }
    match best {
        Some((similarity, kind, tokens, w)) => CandidateScore {
            matched: w.matched,
            callsign: cs.clone(),
            similarity,
            cost: w.cost,
            best_kind: Some(kind),
            best_variant: Some(tokens),
            window: (w.end > w.start).then_some((w.start, w.end)),
            skipped: None,
            region_score: None,
        },
        None => CandidateScore {
            callsign: cs.clone(),
            similarity: 0.0,
            cost: 0.0,
            best_kind: None,
            best_variant: None,
            window: None,
            matched: 0,
            skipped: Some("no spoken variants for the configured kinds".into()),
            region_score: None,
        },
    }
}

/// Ranking: higher similarity, then more exactly matched tokens, then a
/// `Full` best variant, then the lexicographically smaller canonical form.
fn outranks(a: &CandidateScore, b: &CandidateScore) -> bool {
    let full = |c: &CandidateScore| c.best_kind == Some(VariantKind::Full);
    a.similarity
        .partial_cmp(&b.similarity)
        .unwrap_or(Ordering::Equal)
        .then(a.matched.cmp(&b.matched))
        .then(full(a).cmp(&full(b)))
        .then_with(|| b.callsign.canonical().cmp(&a.callsign.canonical()))
        == Ordering::Greater
}

fn covers(outer: (usize, usize), inner: (usize, usize)) -> bool {
    outer.0 <= inner.0 && inner.1 <= outer.1
}

/// Scores the leader and every accepted candidate of the same airline that
/// matches more tokens inside a window covering the leader's against the
/// union of those windows and returns the new leader. A candidate only
/// qualifies if its extra exact matches pay for its extra edit cost.
fn rescore_region(
    tokens: &[&str],
    candidates: &mut [CandidateScore],
    leader: usize,
    reg: &AirlineRegistry,
    cfg: &MatchConfig,
) -> usize {
    let Some(lw) = candidates[leader].window else {
        return leader;
    };
    let group: Vec<usize> = (0..candidates.len())
        .filter(|&j| {
            let c = &candidates[j];
            j == leader
                || (c.skipped.is_none()
                    && c.callsign.designator() == candidates[leader].callsign.designator()
                    && c.matched > candidates[leader].matched
                    && c.cost - candidates[leader].cost
                        <= (c.matched - candidates[leader].matched) as f64 * cfg.deletion_cost
                    && c.similarity >= cfg.threshold
                    && c.window.is_some_and(|w| covers(w, lw)))
        })
        .collect();
    if group.len() < 2 {
        return leader;
    }
    let start = group
        .iter()
        .filter_map(|&j| candidates[j].window)
        .map(|w| w.0)
        .min()
        .unwrap();
    let end = group
        .iter()
        .filter_map(|&j| candidates[j].window)
        .map(|w| w.1)
        .max()
        .unwrap();
    let region = &tokens[start..end];
    for &j in &group {
        let variants = expand_to_spoken(&candidates[j].callsign, reg, &cfg.kinds).unwrap_or_default();
        let best = variants
            .iter()
            .map(|v| {
                let toks = v.tokens.as_strs();
                score_of(edit_cost(region, &toks, cfg), &toks, cfg)
            })
            .fold(0.0, f64::max);
        candidates[j].region_score = Some(best);
    }
    let mut best = leader;
    for &j in &group {
        let (a, b) = (&candidates[j], &candidates[best]);
        match a.region_score.partial_cmp(&b.region_score) {
            Some(Ordering::Greater) => best = j,
            Some(Ordering::Equal) if outranks(a, b) => best = j,
            _ => {}
        }
    }
    best
}

/// Recognizes the call-sign in `transcript` using the surveillance list.
pub fn recognize_with_context(
    transcript: &SpokenForm,
    surveillance: &SurveillanceSnapshot,
    reg: &AirlineRegistry,
    cfg: &MatchConfig,
) -> (Option<IcaoCallsign>, MatchTrace) {
    let tokens = transcript.as_strs();
    let mut candidates: Vec<CandidateScore> = surveillance
        .unique()
        .iter()
        .map(|cs| score_candidate(&tokens, cs, reg, cfg))
        .collect();

    let mut chosen: Option<usize> = None;
    for (i, c) in candidates.iter().enumerate() {
        if c.skipped.is_some() {
            continue;
        }
        if chosen.is_none_or(|j| outranks(c, &candidates[j])) {
            chosen = Some(i);
        }
    }

    if cfg.region_rescoring {
        if let Some(i) = chosen.filter(|&i| candidates[i].similarity >= cfg.threshold) {
            chosen = Some(rescore_region(&tokens, &mut candidates, i, reg, cfg));
        }
    }

    let decision = match chosen {
        _ if surveillance.is_empty() => Decision::EmptySurveillance,
        Some(i) if candidates[i].similarity >= cfg.threshold => Decision::Matched,
        _ => Decision::BelowThreshold,
    };
    let result = match decision {
        Decision::Matched => chosen.map(|i| candidates[i].callsign.clone()),
        _ => vanilla_recognize(transcript, reg),
    };
    (
        result,
        MatchTrace {
            candidates,
            chosen,
            decision,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::callsign::parse_icao;
    use proptest::prelude::*;

    /// Plain weighted Levenshtein between two full sequences.
    fn oracle_levenshtein(a: &[&str], b: &[&str], cfg: &MatchConfig) -> f64 {
        let mut d = vec![vec![0.0; b.len() + 1]; a.len() + 1];
        for i in 1..=a.len() {
            d[i][0] = d[i - 1][0] + cfg.ins(a[i - 1]);
        }
        for j in 1..=b.len() {
            d[0][j] = d[0][j - 1] + cfg.del(b[j - 1]);
        }
        for i in 1..=a.len() {
            for j in 1..=b.len() {
                d[i][j] = (d[i - 1][j - 1] + cfg.sub(a[i - 1], b[j - 1]))
                    .min(d[i - 1][j] + cfg.ins(a[i - 1]))
                    .min(d[i][j - 1] + cfg.del(b[j - 1]));
            }
        }
        d[a.len()][b.len()]
    }

    /// Enumerates every window explicitly.
    pub(crate) fn oracle_window_cost(t: &[&str], v: &[&str], cfg: &MatchConfig) -> f64 {
        let mut best = oracle_levenshtein(&[], v, cfg);
        for i in 0..t.len() {
            for j in i + 1..=t.len() {
                best = best.min(oracle_levenshtein(&t[i..j], v, cfg));
            }
        }
        best
    }

    fn sf(s: &str) -> SpokenForm {
        SpokenForm::parse(s)
    }

    fn unit() -> MatchConfig {
        MatchConfig {
            digit_weight: 1.0,
            ..MatchConfig::default()
        }
    }

    #[test]
    fn exact_window_scores_one() {
        let t = sf("lufthansa eight three kilo descend three thousand feet");
        let v = sf("lufthansa eight three kilo");
        assert_eq!(similarity(&t, &v, &MatchConfig::default()), 1.0);
        let w = best_window(&t.as_strs(), &v.as_strs(), &MatchConfig::default());
        assert_eq!((w.start, w.end), (0, 4));
    }

    #[test]
    fn one_deletion_unit_costs() {
        let t = sf("ryanair eight three kilo descend");
        let v = sf("ryanair eight five three kilo");
        let s = similarity(&t, &v, &unit());
        assert_eq!(s, 0.8);
        assert_eq!(similarity(&t, &v, &MatchConfig::default()), 0.8);
        let oracle = 1.0 - oracle_window_cost(&t.as_strs(), &v.as_strs(), &unit()) / 5.0;
        assert_eq!(s, oracle);
        // digit_weight 2: the deleted `five` costs 2 of a total weight 9.
        let heavy = MatchConfig {
            digit_weight: 2.0,
            ..MatchConfig::default()
        };
        let s2 = similarity(&t, &v, &heavy);
        assert!((s2 - (1.0 - 2.0 / 9.0)).abs() < 1e-12);
    }

    #[test]
    fn unrelated_is_low() {
        let s = similarity(&sf("contact tower"), &sf("lufthansa eight three kilo"), &unit());
        assert!(s < 0.5, "{s}");
        assert_eq!(s, 0.0);
    }

    #[test]
    fn recovers_deleted_digit() {
        let reg = AirlineRegistry::builtin();
        let t = sf("ryanair eight three kilo climb flight level three four zero");
        let sur = SurveillanceSnapshot::new(vec![parse_icao("RYR853K").unwrap(), parse_icao("DLH83K").unwrap()]);
        let (cs, trace) = recognize_with_context(&t, &sur, &reg, &MatchConfig::default());
        assert_eq!(cs.unwrap().canonical(), "RYR853K");
        assert_eq!(trace.decision, Decision::Matched);
        assert_eq!(vanilla_recognize(&t, &reg).unwrap().canonical(), "RYR83K");
    }

    #[test]
    fn singleton_exact() {
        let reg = AirlineRegistry::builtin();
        let t = sf("lufthansa eight three kilo descend three thousand feet");
        let sur = SurveillanceSnapshot::new(vec![parse_icao("DLH83K").unwrap()]);
        let (cs, trace) = recognize_with_context(&t, &sur, &reg, &MatchConfig::default());
        assert_eq!(cs.unwrap().canonical(), "DLH83K");
        assert_eq!(trace.best_score(), Some(1.0));
        assert_eq!(trace.candidates[0].window, Some((0, 4)));
    }

    #[test]
    fn below_threshold_falls_back() {
        let reg = AirlineRegistry::builtin();
        let sur = SurveillanceSnapshot::new(vec![parse_icao("DLH83K").unwrap()]);
        let (cs, trace) = recognize_with_context(&sf("contact tower"), &sur, &reg, &MatchConfig::default());
        assert_eq!(cs, None);
        assert_eq!(trace.decision, Decision::BelowThreshold);
    }

    #[test]
    fn empty_surveillance_is_vanilla() {
        let reg = AirlineRegistry::builtin();
        let t = sf("ryanair eight three kilo");
        let (cs, trace) = recognize_with_context(&t, &SurveillanceSnapshot::default(), &reg, &MatchConfig::default());
        assert_eq!(cs.unwrap().canonical(), "RYR83K");
        assert_eq!(trace.decision, Decision::EmptySurveillance);
        assert!(trace.candidates.is_empty());
    }

    #[test]
    fn unknown_designator_is_skipped() {
        let reg = AirlineRegistry::builtin();
        let t = sf("lufthansa eight three kilo");
        let sur = SurveillanceSnapshot::new(vec![parse_icao("QQQ83K").unwrap(), parse_icao("DLH83K").unwrap()]);
        let (cs, trace) = recognize_with_context(&t, &sur, &reg, &MatchConfig::default());
        assert_eq!(cs.unwrap().canonical(), "DLH83K");
        let skipped: Vec<_> = trace.candidates.iter().filter(|c| c.skipped.is_some()).collect();
        assert_eq!(skipped.len(), 1);
        assert_eq!(skipped[0].callsign.canonical(), "QQQ83K");
    }

    #[test]
    fn ties_prefer_full_then_lexicographic() {
        let reg = AirlineRegistry::builtin();
        // Identifier missing: both candidates lose only the telephony token.
        let t = sf("eight three kilo");
        let sur = SurveillanceSnapshot::new(vec![
            parse_icao("RYR83K").unwrap(),
            parse_icao("DLH83K").unwrap(),
            parse_icao("DLH83K").unwrap(),
        ]);
        let (cs, trace) = recognize_with_context(&t, &sur, &reg, &MatchConfig::default());
        assert_eq!(cs.unwrap().canonical(), "DLH83K");
        assert_eq!(trace.candidates.len(), 2);
    }

    fn snapshot(list: &[&str]) -> SurveillanceSnapshot {
        SurveillanceSnapshot::new(list.iter().map(|s| parse_icao(s).unwrap()).collect())
    }

    #[test]
    fn exact_match_survives_costly_extension() {
        let reg = AirlineRegistry::builtin();
        let sur = snapshot(&["TUI33", "TUI2323", "TUI383"]);
        let t = SpokenForm::parse("tuijet three three squawk two three four one");
        let (cs, _) = recognize_with_context(&t, &sur, &reg, &MatchConfig::default());
        assert_eq!(cs.unwrap().canonical(), "TUI33");
    }

    #[test]
    fn longer_number_wins_over_its_prefix() {
        let reg = AirlineRegistry::builtin();
        let sur = snapshot(&["DLH8", "DLH83K"]);
        for text in [
            "lufthansa eight three kilo descend",
            "lufthansa eight tree kilo descend",
        ] {
            let (cs, trace) = recognize_with_context(&SpokenForm::parse(text), &sur, &reg, &MatchConfig::default());
            assert_eq!(cs.unwrap().canonical(), "DLH83K", "{text}");
            assert_eq!(trace.decision, Decision::Matched);
        }
        // Without rescoring the confusable form lets the prefix through.
        let plain = MatchConfig {
            region_rescoring: false,
            confusion_cost: 1.0,
            ..MatchConfig::default()
        };
        let (cs, _) = recognize_with_context(&SpokenForm::parse("lufthansa eight tree kilo"), &sur, &reg, &plain);
        assert_eq!(cs.unwrap().canonical(), "DLH8");
        // The shorter call-sign still wins when nothing follows it.
        let (cs, _) = recognize_with_context(
            &SpokenForm::parse("lufthansa eight descend flight level one two zero"),
            &sur,
            &reg,
            &MatchConfig::default(),
        );
        assert_eq!(cs.unwrap().canonical(), "DLH8");
    }

    #[test]
    fn confusable_substitution_is_cheaper() {
        let cfg = MatchConfig::default();
        assert_eq!(cfg.sub("tree", "three"), 0.25);
        assert_eq!(cfg.sub("three", "tree"), 0.25);
        assert_eq!(cfg.sub("tree", "five"), 1.0);
        let reg = AirlineRegistry::builtin();
        let sur = snapshot(&["DLH35", "DLH85"]);
        let (cs, _) = recognize_with_context(&SpokenForm::parse("lufthansa tree five"), &sur, &reg, &cfg);
        assert_eq!(cs.unwrap().canonical(), "DLH35");
    }

    #[test]
    fn equal_scores_prefer_more_matched_tokens() {
        let reg = AirlineRegistry::builtin();
        // Both score 0.8, but QTR matches five tokens and BAW four.
        let sur = snapshot(&["BAW0722", "QTR0722"]);
        let t = SpokenForm::parse("qatari two zero seven two two proceed");
        let (cs, trace) = recognize_with_context(&t, &sur, &reg, &MatchConfig::default());
        assert_eq!(cs.unwrap().canonical(), "QTR0722");
        let scores: Vec<f64> = trace.candidates.iter().map(|c| c.similarity).collect();
        assert_eq!(scores[0], scores[1]);
    }

    #[test]
    fn rejects_invalid_config() {
        let cfg = MatchConfig {
            threshold: 1.5,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = MatchConfig {
            deletion_cost: 0.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = MatchConfig {
            digit_weight: 0.5,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = MatchConfig {
            confusion_cost: 0.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        assert!(MatchConfig::default().validate().is_ok());
    }

    const VOCAB: [&str; 10] = [
        "lufthansa",
        "eight",
        "three",
        "kilo",
        "five",
        "descend",
        "oh",
        "ryanair",
        "tower",
        "two",
    ];

    fn tokens(max: usize) -> impl Strategy<Value = Vec<&'static str>> {
        prop::collection::vec(prop::sample::select(&VOCAB[..]), 1..max)
    }

    proptest! {
        #[test]
        fn dp_equals_window_oracle(t in tokens(9), v in tokens(6)) {
            let cfg = MatchConfig { digit_weight: 2.0, ..MatchConfig::default() };
            prop_assert_eq!(best_window(&t, &v, &cfg).cost, oracle_window_cost(&t, &v, &cfg));
        }

        #[test]
        fn cost_scaling_keeps_winner(
            t in tokens(9),
            k in prop::sample::select(vec![0.25, 0.5, 2.0, 8.0]),
        ) {
            let reg = AirlineRegistry::builtin();
            let sur = SurveillanceSnapshot::new(
                ["DLH83K", "RYR853K", "DLH5", "RYR83K"].iter().map(|s| parse_icao(s).unwrap()).collect(),
            );
            let base = MatchConfig::default();
            let scaled = MatchConfig {
                substitution_cost: base.substitution_cost * k,
                deletion_cost: base.deletion_cost * k,
                insertion_cost: base.insertion_cost * k,
                ..base.clone()
            };
            let transcript = SpokenForm::new(t).unwrap();
            let (_, a) = recognize_with_context(&transcript, &sur, &reg, &base);
            let (_, b) = recognize_with_context(&transcript, &sur, &reg, &scaled);
            prop_assert_eq!(a.chosen, b.chosen);
        }

        #[test]
        fn chosen_dominates(t in tokens(9)) {
            let reg = AirlineRegistry::builtin();
            let sur = SurveillanceSnapshot::new(
                ["DLH83K", "RYR853K", "BAW5", "KLM83K"].iter().map(|s| parse_icao(s).unwrap()).collect(),
            );
            let plain = MatchConfig { region_rescoring: false, ..MatchConfig::default() };
            let (_, trace) = recognize_with_context(&SpokenForm::new(t.clone()).unwrap(), &sur, &reg, &plain);
            let best = trace.best_score().unwrap();
            prop_assert!(trace.candidates.iter().all(|c| c.similarity <= best));

            let (_, trace) = recognize_with_context(&SpokenForm::new(t).unwrap(), &sur, &reg, &MatchConfig::default());
            let chosen = &trace.candidates[trace.chosen.unwrap()];
            if let Some(r) = chosen.region_score {
                prop_assert!(trace.candidates.iter().all(|c| c.region_score.is_none_or(|x| x <= r)));
            }
        }
    }
}
