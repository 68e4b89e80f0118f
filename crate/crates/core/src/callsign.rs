//! Standard ICAO call-sign representation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CruError, Result};

/// Longest call-sign number accepted after the designator.
pub const MAX_NUMBER_LEN: usize = 4;

/// Three-letter airline designator, e.g. `DLH`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Designator([u8; 3]);

impl Designator {
    pub fn new(text: &str) -> Result<Self> {
        let bytes = text.as_bytes();
        if bytes.len() != 3 || !bytes.iter().all(u8::is_ascii_alphabetic) {
            return Err(CruError::MalformedCallsign(text.to_string()));
        }
        let mut out = [0u8; 3];
        for (dst, src) in out.iter_mut().zip(bytes) {
            *dst = src.to_ascii_uppercase();
        }
        Ok(Designator(out))
    }

    pub fn as_str(&self) -> &str {
        // Only ASCII uppercase letters are ever stored.
        std::str::from_utf8(&self.0).expect("designator is ASCII")
    }

    /// Lowercase spelling as it appears in transcripts, e.g. `dlh`.
    pub fn spoken(&self) -> String {
        self.as_str().to_ascii_lowercase()
    }
}

impl fmt::Display for Designator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Alphanumeric part of a call-sign: a digit followed by up to three
/// digits or letters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CallsignNumber(String);

impl CallsignNumber {
    pub fn new(text: &str) -> Result<Self> {
        let upper = text.to_ascii_uppercase();
        let bytes = upper.as_bytes();
        let valid = !bytes.is_empty()
            && bytes.len() <= MAX_NUMBER_LEN
            && bytes[0].is_ascii_digit()
            && bytes.iter().all(|b| b.is_ascii_digit() || b.is_ascii_uppercase());
        if valid {
            Ok(CallsignNumber(upper))
        } else {
            Err(CruError::MalformedCallsign(text.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CallsignNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A call-sign in standard format: designator immediately followed by the
/// number (`DLH83K`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IcaoCallsign {
    designator: Designator,
    number: CallsignNumber,
}

impl IcaoCallsign {
    pub fn new(designator: Designator, number: CallsignNumber) -> Self {
        IcaoCallsign { designator, number }
    }

    pub fn designator(&self) -> Designator {
        self.designator
    }

    pub fn number(&self) -> &CallsignNumber {
        &self.number
    }

    pub fn canonical(&self) -> String {
        format!("{}{}", self.designator, self.number)
    }
}

/// Parses the canonical text form. Input is uppercased first.
pub fn parse_icao(text: &str) -> Result<IcaoCallsign> {
    if text.len() < 4 || !text.is_ascii() {
        return Err(CruError::MalformedCallsign(text.to_string()));
    }
    let (head, tail) = text.split_at(3);
    let designator = Designator::new(head).map_err(|_| CruError::MalformedCallsign(text.to_string()))?;
    let number = CallsignNumber::new(tail).map_err(|_| CruError::MalformedCallsign(text.to_string()))?;
    Ok(IcaoCallsign { designator, number })
}

impl FromStr for IcaoCallsign {
    type Err = CruError;

    fn from_str(s: &str) -> Result<Self> {
        parse_icao(s)
    }
}

impl fmt::Display for IcaoCallsign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.designator, self.number)
    }
}

impl Serialize for IcaoCallsign {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for IcaoCallsign {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_icao(&text).map_err(serde::de::Error::custom)
    }
}
