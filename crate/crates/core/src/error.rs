use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CruError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CruError {
    #[error("malformed call-sign {0:?}")]
    MalformedCallsign(String),
    #[error("designator {0} is not in the airline registry")]
    UnknownDesignator(String),
    #[error("span {0:?} has several inconsistent parses: {1}")]
    AmbiguousSpan(String, String),
    #[error("span {0:?} does not parse as a call-sign")]
    UnparsableSpan(String),
    #[error("{0} has no {1} rendering")]
    NoVariant(String, crate::spoken::VariantKind),
    #[error("registry line {line}: {reason}")]
    Registry { line: usize, reason: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("noise calibration failed: {0}")]
    CalibrationFailed(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("reference corpus has no tokens")]
    EmptyReference,
    #[error("{path}:{line}: {reason}")]
    Schema { path: String, line: usize, reason: String },
    #[error("surveillance provider unavailable: {0}")]
    ProviderUnavailable(String),
    #[error("surveillance provider quota exceeded")]
    QuotaExceeded,
    #[error("malformed provider response: {0}")]
    MalformedResponse(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CruError {
    /// Stable snake_case name of the variant, for machine-readable output.
    pub fn kind(&self) -> &'static str {
        match self {
            CruError::MalformedCallsign(_) => "malformed_callsign",
            CruError::UnknownDesignator(_) => "unknown_designator",
            CruError::AmbiguousSpan(..) => "ambiguous_span",
            CruError::UnparsableSpan(_) => "unparsable_span",
            CruError::NoVariant(..) => "no_variant",
            CruError::Registry { .. } => "registry",
            CruError::InvalidConfig(_) => "invalid_config",
            CruError::CalibrationFailed(_) => "calibration_failed",
            CruError::LengthMismatch { .. } => "length_mismatch",
            CruError::EmptyReference => "empty_reference",
            CruError::Schema { .. } => "schema",
            CruError::ProviderUnavailable(_) => "provider_unavailable",
            CruError::QuotaExceeded => "quota_exceeded",
            CruError::MalformedResponse(_) => "malformed_response",
            CruError::Io { .. } => "io",
            CruError::Json(_) => "json",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CruError::Io {
            path: path.into(),
            source,
        }
    }
}
