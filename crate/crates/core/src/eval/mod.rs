//! Accuracy metrics and surveillance robustness sweeps.

pub mod metrics;
pub mod predict;
pub mod sweep;

pub use metrics::{csa, token_edits, wer};
pub use predict::{
    parse_predictions, predict, predict_corpus, predictions_csa, predictions_to_jsonl, Mode, Prediction,
};
pub use sweep::{
    rewrite_surveillance, sweep, CorpusDescriptor, SweepConfig, SweepParameter, SweepPoint, SweepReport, TrendCheck,
    TREND_TOLERANCE,
};
