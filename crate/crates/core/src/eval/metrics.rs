use crate::callsign::IcaoCallsign;
use crate::error::{CruError, Result};
use crate::spoken::SpokenForm;

/// Call-sign accuracy in percent; a missing prediction counts as a miss.
pub fn csa(predictions: &[Option<IcaoCallsign>], targets: &[IcaoCallsign]) -> Result<f64> {
    if predictions.len() != targets.len() {
        return Err(CruError::LengthMismatch {
            left: predictions.len(),
            right: targets.len(),
        });
    }
    if targets.is_empty() {
        return Err(CruError::EmptyReference);
    }
    let hits = predictions
        .iter()
        .zip(targets)
        .filter(|(p, t)| p.as_ref() == Some(*t))
        .count();
    Ok(100.0 * hits as f64 / targets.len() as f64)
}

/// Unit-cost token edit distance.
pub fn token_edits<S: AsRef<str>>(hyp: &[S], reference: &[S]) -> usize {
    if hyp.is_empty() {
        return reference.len();
    }
    let mut prev: Vec<usize> = (0..=hyp.len()).collect();
    let mut cur = vec![0usize; hyp.len() + 1];
    for (i, r) in reference.iter().enumerate() {
        cur[0] = i + 1;
        for (j, h) in hyp.iter().enumerate() {
            let sub = prev[j] + usize::from(h.as_ref() != r.as_ref());
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[hyp.len()]
}

/// Corpus-level word error rate in percent.
pub fn wer(hypotheses: &[SpokenForm], references: &[SpokenForm]) -> Result<f64> {
    if hypotheses.len() != references.len() {
        return Err(CruError::LengthMismatch {
            left: hypotheses.len(),
            right: references.len(),
        });
    }
    let total: usize = references.iter().map(SpokenForm::len).sum();
    if total == 0 {
        return Err(CruError::EmptyReference);
    }
    let edits: usize = hypotheses
        .iter()
        .zip(references)
        .map(|(h, r)| token_edits(h.tokens(), r.tokens()))
        .sum();
    Ok(100.0 * edits as f64 / total as f64)
}
