//! Airline designator ↔ telephony name registry.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use crate::callsign::Designator;
use crate::error::{CruError, Result};

const BUILTIN_TSV: &str = include_str!("../data/airlines.tsv");

/// Maps ICAO designators to their spoken telephony names and back.
#[derive(Debug, Clone, Default)]
pub struct AirlineRegistry {
    entries: BTreeMap<Designator, Vec<Vec<String>>>,
    reverse: HashMap<Vec<String>, Designator>,
    longest_name: usize,
}

impl AirlineRegistry {
    /// The registry shipped with the crate (80+ airlines).
    pub fn builtin() -> Self {
        Self::from_tsv(BUILTIN_TSV).expect("built-in airline table is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| CruError::io(path, e))?;
        Self::from_tsv(&text)
    }

    /// Parses `DESIGNATOR<TAB>telephony name` rows. Lines starting with `#`
    /// and blank lines are skipped; repeated designators add aliases.
    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut reg = AirlineRegistry::default();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (code, name) = line.split_once('\t').ok_or_else(|| CruError::Registry {
                line: line_no,
                reason: "expected two tab-separated columns".into(),
            })?;
            if name.contains('\t') {
                return Err(CruError::Registry {
                    line: line_no,
                    reason: "too many columns".into(),
                });
            }
            let designator = Designator::new(code.trim()).map_err(|_| CruError::Registry {
                line: line_no,
                reason: format!("{code:?} is not a three-letter designator"),
            })?;
            reg.insert(designator, name)
                .map_err(|reason| CruError::Registry { line: line_no, reason })?;
        }
        Ok(reg)
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let mut reg = AirlineRegistry::default();
        for (i, (code, name)) in pairs.into_iter().enumerate() {
            let designator = Designator::new(code)?;
            reg.insert(designator, name)
                .map_err(|reason| CruError::Registry { line: i + 1, reason })?;
        }
        Ok(reg)
    }

    fn insert(&mut self, designator: Designator, name: &str) -> std::result::Result<(), String> {
        let tokens: Vec<String> = name.split_whitespace().map(|t| t.to_lowercase()).collect();
        if tokens.is_empty() {
            return Err("empty telephony name".into());
        }
        match self.reverse.get(&tokens) {
            Some(existing) if *existing == designator => return Ok(()),
            Some(existing) => {
                return Err(format!(
                    "telephony name {:?} already belongs to {existing}",
                    tokens.join(" ")
                ))
            }
            None => {}
        }
        self.longest_name = self.longest_name.max(tokens.len());
        self.reverse.insert(tokens.clone(), designator);
        self.entries.entry(designator).or_default().push(tokens);
        Ok(())
    }

    pub fn contains(&self, designator: Designator) -> bool {
        self.entries.contains_key(&designator)
    }

    /// Telephony names in registry order; the first is the primary name.
    pub fn names(&self, designator: Designator) -> Option<&[Vec<String>]> {
        self.entries.get(&designator).map(Vec::as_slice)
    }

    pub fn lookup(&self, name: &[&str]) -> Option<Designator> {
        let key: Vec<String> = name.iter().map(|s| s.to_string()).collect();
        self.reverse.get(&key).copied()
    }

    /// Every telephony name that is a prefix of `tokens`, as
    /// `(designator, token count)`, longest first.
    pub fn prefix_matches(&self, tokens: &[&str]) -> Vec<(Designator, usize)> {
        let mut out = Vec::new();
        for len in (1..=self.longest_name.min(tokens.len())).rev() {
            if let Some(d) = self.lookup(&tokens[..len]) {
                out.push((d, len));
            }
        }
        out
    }

    /// Designator spelled as a single lowercase token (`dlh`), if registered.
    pub fn designator_token(&self, token: &str) -> Option<Designator> {
        Designator::new(token)
            .ok()
            .filter(|d| token.bytes().all(|b| b.is_ascii_lowercase()) && self.contains(*d))
    }

    pub fn designators(&self) -> impl Iterator<Item = Designator> + '_ {
        self.entries.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
