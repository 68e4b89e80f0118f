//! Call-sign recognition and understanding for air-traffic-control
//! transcripts.
//!
//! Spoken call-signs (`lufthansa eight three kilo`) are converted to ICAO
//! format (`DLH83K`), either from the transcript alone ([`extractor`]) or by
//! matching against the call-signs currently visible in surveillance data
//! ([`matcher`]). The [`augment`] module builds synthetic corpora with
//! simulated surveillance and ASR noise, and [`eval`] measures call-sign
//! accuracy and runs the robustness sweeps.

pub mod augment;
pub mod callsign;
pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod extractor;
pub mod matcher;
pub mod osn;
pub mod phonetic;
pub mod registry;
pub mod rng;
pub mod spoken;

pub use callsign::{parse_icao, CallsignNumber, Designator, IcaoCallsign};
pub use error::{CruError, Result};
pub use registry::AirlineRegistry;
pub use spoken::{expand_to_spoken, parse_spoken, spoken_to_icao, SpokenForm, SpokenVariant, VariantKind};
